"""Built-in perturbation families in action-angle form, used by the CLI and
the verification suite. Library callers can pass any callables instead.

The Hamiltonian family derives its two components from a single generating
function W by exact partial derivatives along the unperturbed circle motion
x = sqrt(2I) cos(theta), so the averaged identities hold by construction.
"""
from __future__ import annotations

import numpy as np

from .averaging import PerturbationSpec


def sin_theta_minus_phi(amplitude: float = 1.0) -> PerturbationSpec:
    """Action forcing amplitude*sin(theta - phi); no angle forcing."""
    return PerturbationSpec(
        f=lambda i, theta, phi: amplitude * np.sin(theta - phi),
        g=lambda i, theta, phi: np.zeros(np.broadcast(theta, phi).shape),
    )


def resonant_harmonic(p: int, q: int, amplitude: float = 1.0) -> PerturbationSpec:
    """Single harmonic sin(p*theta - q*phi), resonant with the (p, q) zone."""
    return PerturbationSpec(
        f=lambda i, theta, phi: amplitude * np.sin(p * theta - q * phi),
        g=lambda i, theta, phi: np.zeros(np.broadcast(theta, phi).shape),
    )


def resonant_family(decay: float = 0.6, n_terms: int = 8) -> PerturbationSpec:
    """Analytic multi-harmonic family sum_m decay^m sin(m*theta - phi).

    At the (p, 1) resonance only the m = p term survives averaging, so the
    extracted harmonic amplitude is decay^p: strictly decreasing in p.
    """

    def f(i, theta, phi):
        acc = np.zeros(np.broadcast(theta, phi).shape)
        for m in range(1, n_terms + 1):
            acc = acc + decay**m * np.sin(m * theta - phi)
        return acc

    return PerturbationSpec(
        f=f, g=lambda i, theta, phi: np.zeros(np.broadcast(theta, phi).shape)
    )


def hamiltonian_cos_wave(amplitude: float = 1.0) -> PerturbationSpec:
    """Perturbation generated by W = amplitude*cos(x - phi) with
    x = sqrt(2I) cos(theta): f = -dW/dtheta, g = dW/dI, both exact.

    Being an exact Hamiltonian perturbation, its averaged coefficients
    satisfy the mean and derivative identities to quadrature accuracy.
    """

    def x_of(i, theta):
        return np.sqrt(2.0 * i) * np.cos(theta)

    def f(i, theta, phi):
        # -dW/dtheta = -amplitude * sin(x - phi) * sqrt(2I) * sin(theta)... sign:
        # dW/dtheta = -sin(x - phi) * dx/dtheta, dx/dtheta = -sqrt(2I) sin(theta)
        return -amplitude * np.sin(x_of(i, theta) - phi) * np.sqrt(2.0 * i) * np.sin(theta)

    def g(i, theta, phi):
        # dW/dI = -sin(x - phi) * dx/dI, dx/dI = cos(theta)/sqrt(2I)
        return -amplitude * np.sin(x_of(i, theta) - phi) * np.cos(theta) / np.sqrt(2.0 * i)

    return PerturbationSpec(f=f, g=g)


CATALOG = {
    "sin_theta_minus_phi": lambda values: sin_theta_minus_phi(values.get("amplitude", 1.0)),
    "resonant_harmonic": lambda values: resonant_harmonic(
        values.get("p", 1), values.get("q", 1), values.get("amplitude", 1.0)
    ),
    "resonant_family": lambda values: resonant_family(values.get("decay", 0.6)),
    "hamiltonian_cos_wave": lambda values: hamiltonian_cos_wave(values.get("amplitude", 1.0)),
}
