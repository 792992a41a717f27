# App module for the fuzzy learning agent
