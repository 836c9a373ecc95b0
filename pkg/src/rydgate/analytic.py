"""Closed-form benchmarks for the two decoupled drive channels.

With zero detuning, the dynamics splits into a photon-assisted
three-level channel (upper clock state with a photon) and a plain Rabi
channel (upper clock state without one). Both admit closed forms that
the integrators are checked against.
"""

from __future__ import annotations

import math

import numpy as np

from rydgate.model import GaussianPulse, RectangularPulse


def c11_rect(t, g, omega):
    """Return amplitude of the photon-assisted channel under a constant
    drive: (4 g^2 + omega^2 cos((t/2) sqrt(4 g^2 + omega^2))) / (4 g^2 + omega^2).
    """
    if not g > 0.0 or not omega > 0.0:
        raise ValueError("g and omega must be positive")
    s = 4.0 * g * g + omega * omega
    root = math.sqrt(s)
    return (4.0 * g * g + omega * omega * np.cos(0.5 * root * np.asarray(t, float))) / s


def rabi_amplitudes(t, omega):
    """Amplitude pair (cos(omega t / 2), -i sin(omega t / 2)) of the plain
    Rabi channel under a constant resonant drive."""
    half = 0.5 * omega * np.asarray(t, dtype=float)
    return np.cos(half), -1j * np.sin(half)


def pulse_area(pulse, t, panels=2000):
    """Integral of the drive envelope over [0, t] by composite Simpson.

    ``panels`` is the subinterval count (bumped to even); the default
    2000 makes the quadrature error negligible against the 1e-8
    integrator tolerances everywhere this is used.
    """
    if t < 0.0:
        raise ValueError("upper limit must be nonnegative")
    if t == 0.0:
        return 0.0
    if isinstance(pulse, RectangularPulse):
        return pulse.omega * t
    m = int(panels)
    if m < 2:
        raise ValueError("need at least 2 panels")
    m += m % 2
    grid = np.linspace(0.0, t, m + 1)
    values = pulse.envelope(grid)
    weights = np.ones(m + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float((t / m) / 3.0 * np.dot(weights, values))


def rabi_amplitudes_pulsed(t, pulse, panels=2000):
    """Rabi-channel amplitudes for a shaped drive: the constant-drive
    phase omega t is replaced by the accumulated area of the envelope."""
    if np.isscalar(t):
        theta = pulse_area(pulse, float(t), panels)
        return math.cos(0.5 * theta), -1j * math.sin(0.5 * theta)
    thetas = np.array([pulse_area(pulse, float(ti), panels) for ti in np.asarray(t)])
    return np.cos(0.5 * thetas), -1j * np.sin(0.5 * thetas)


def gaussian_full_area(pulse):
    """Closed-form area of a Gaussian pulse over its nominal 4 tau window:
    sqrt(pi) * omega_m * tau * erf(2)."""
    if not isinstance(pulse, GaussianPulse):
        raise TypeError("expected a GaussianPulse")
    return math.sqrt(math.pi) * pulse.omega_m * pulse.tau * math.erf(2.0)
