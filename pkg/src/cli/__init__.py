# Command-line interface for brownsim
