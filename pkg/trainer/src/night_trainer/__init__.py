"""Learned NLoS reconstruction: trains on datasets produced by the `night`
simulator and exports predictions back in its binary sample format."""

__version__ = "0.1.0"
