"""Maximum Coverage: instances, solvers, exchange graphs and the analysis replay."""
