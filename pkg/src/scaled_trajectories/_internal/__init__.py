"""
Internal implementation of scaled_trajectories.

This project uses ApiVer, and as such, all imports should be done from v* submodules.
"""
