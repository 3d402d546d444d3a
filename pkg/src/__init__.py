# brownsim
# Simulator and verification suite for the five-qubit Brown state
__version__ = "1.0.0"
__author__ = "brownsim developers"
