"""Figure rendering for spinmaser CSV artifacts."""

__version__ = "0.1.0"
