"""
Bounds Module

Bernstein-type tail and MGF bounds, classical inequalities and Fenchel conjugates.
"""

__version__ = "1.0.0"
