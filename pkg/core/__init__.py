# Core module for the fuzzy learning agent
