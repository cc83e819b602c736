"""
Results visualization modules.

Contains the plotting functions for the explorer:
- Test pass/fail charts
- Tooling usage charts
- Outcome breakdown charts
"""
