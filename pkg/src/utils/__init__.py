"""
Utility functions and helpers.

Results document writing and per-package summaries.
"""
