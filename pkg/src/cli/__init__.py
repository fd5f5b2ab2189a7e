"""
CLI Module

Chain spec files and the markov_bounds command line.
"""

__version__ = "1.0.0"
