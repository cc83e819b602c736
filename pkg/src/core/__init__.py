"""
Core analysis functionality.

Resolution, cloning, the install/build/test phases, custom analyses,
the per-package pipeline, and loading results back for the explorer.
"""
