# Utility functions for brownsim
