"""Zero distributions of entire functions of exponential type."""
