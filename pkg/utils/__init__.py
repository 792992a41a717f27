# Utils module for the fuzzy learning agent
