# scripts/__init__.py

"""
Initializes the 'scripts' directory as a Python package.

This package contains helper scripts for the cptw toolkit that run offline,
outside the command-line pipeline. For example, this is where the script that
pre-computes propagation matrices for a whole tau grid resides.
"""
