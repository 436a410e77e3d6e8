"""Respiratory sound classification toolkit.

Time-frequency front ends (STFT, MFCC, CQT, cochleogram), a Vision
Transformer and a baseline CNN on a small numpy autodiff engine, ICBHI
protocol handling, ICBHI metrics and rank-based significance tests.
"""

__version__ = "0.1.0"
