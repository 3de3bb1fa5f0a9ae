"""
SVP Grover Oracle - quantum search circuits for the shortest vector problem.

This package synthesizes the Grover oracle for the shortest vector problem
from an integer lattice basis, accounts its quantum resources, verifies it
against classical brute force and plugs the cost model into a BKZ reducer.
"""

__version__ = "0.1.0"
