"""Simulation and control of a six-rotor VTOL with a tiltable front rotor link."""
__version__ = "0.1.0"
