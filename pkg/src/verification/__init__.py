"""
Verification Module

Checks of theoretical bounds against exact and simulated values.
"""

__version__ = "1.0.0"
