# Data module for the fuzzy learning agent
