# Analysis module for the fuzzy learning agent
