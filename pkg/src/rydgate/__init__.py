"""Simulator for a hybrid atom-photon controlled-Z gate.

A four-level atom coupled to a single microwave resonator mode, driven
by rectangular or Gaussian pulses, propagated unitarily or with decay
channels; plus the parameter sweeps and CSV writers used to regenerate
the reference figures.
"""

from rydgate.numerics import kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
