"""
Markov Module

Finite chains, spectral gaps, Kato series and León-Perron reductions.
"""

__version__ = "1.0.0"
