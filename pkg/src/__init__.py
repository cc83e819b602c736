"""
npm package miner - core package

Installs, builds and tests JavaScript packages and records what happened,
plus a Streamlit explorer over the results.
"""
