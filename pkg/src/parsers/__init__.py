"""
Command classification and test-output parsing.
"""
