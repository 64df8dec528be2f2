"""Independent oracles built on adaptive quadrature."""

import numpy as np
from scipy.integrate import quad


def poisson_density(z, t):
    """Normalized Poisson kernel ``(1 - |z|^2) / |e^{it} - z|^2 / (2 pi)``."""
    return (1.0 - abs(z) ** 2) / abs(np.exp(1j * t) - z) ** 2 / (2 * np.pi)


def quad_poisson(z, h, breaks=(0.0, 2 * np.pi)):
    """Adaptive-quadrature Poisson integral of a real ``h``, split at ``breaks``."""
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        total += quad(lambda t: poisson_density(z, t) * h(t), a, b, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    return total


def quad_harmonic_measure(z, a, b):
    return quad_poisson(z, lambda t: 1.0, (a, b))
