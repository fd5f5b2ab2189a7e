"""
Simulation Module

Exact transfer-matrix oracles and seeded Monte Carlo estimation.
"""

__version__ = "1.0.0"
