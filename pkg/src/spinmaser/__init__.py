"""Photonic Carnot engine simulator.

Pipeline: thermalized spin-star (or spin-1/2 x spin-S) fuel -> effective
temperature of the central spin -> lossy micromaser cavity pumped by those
spins -> steady-field temperature scaling and polynomial fits.
"""

__version__ = "0.1.0"
