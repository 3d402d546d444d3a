# Core simulation, protocols and verification for brownsim
