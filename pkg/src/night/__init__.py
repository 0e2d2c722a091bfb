"""NLoS-from-iToF toolkit: simulate, package and evaluate corner scenes."""

__version__ = "0.1.0"
