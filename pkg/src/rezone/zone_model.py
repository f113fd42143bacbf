"""Averaged-system data types and evaluation of the zone Hamiltonians and vector fields.

The reduced model on the cylinder is

    H(u, v) = p*(mu2*u^2/2 + b*u^3/3 + b3*u^4/4) + (a + mu1*u)*cos(v)

with the rescaled angle v (one full resonance cell maps to v in [0, 2*pi)).
The general second-approximation system is evaluated through
:class:`GeneralAveragedModel`, which carries the periodic coefficient
functions and the degeneracy order j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ZoneParameters:
    """Coefficient set of the reduced zone system.

    Parameters
    ----------
    a : float
        Harmonic forcing amplitude.
    b : float
        Quadratic frequency coefficient (half the second derivative of the
        unperturbed frequency at the resonance level). Must be nonzero:
        the reduction assumes degeneracy order j = 2.
    p : int
        Resonance order, p >= 1.
    mu1 : float
        Slow forcing coefficient (epsilon^(1/3) times the u-dependent
        harmonic amplitude).
    mu2 : float
        Deformation parameter (linear frequency deformation).
    b3 : float
        Optional cubic frequency term; 0 in the reference configuration.
    """

    a: float
    b: float
    p: int
    mu1: float
    mu2: float
    b3: float = 0.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be an integer >= 1, got {self.p}")
        if self.b == 0.0:
            raise ValueError("b must be nonzero (degeneracy order 2 requires it)")


@dataclass(frozen=True)
class PhaseState:
    """Point on the cylinder: action deviation u (unbounded) and angle v."""

    u: float
    v: float

    def wrapped(self) -> "PhaseState":
        """Return the state with v reported in [0, 2*pi)."""
        return PhaseState(self.u, self.v % TWO_PI)


@dataclass(frozen=True)
class GeneralAveragedModel:
    """Second-approximation averaged system with arbitrary degeneracy order.

    a0, p0, q0 are callables of v, periodic with period 2*pi/p. j >= 2 is the
    degeneracy order, s = 1/(1+j) exactly, bj and bj1 the two leading Taylor
    coefficients of the frequency at the resonance level.
    """

    j: int
    bj: float
    bj1: float
    a0: Callable[[float], float]
    p0: Callable[[float], float]
    q0: Callable[[float], float]
    epsilon: float
    p: int = 1
    deformation: Sequence[float] = field(default=())

    def __post_init__(self):
        if self.j < 2:
            raise ValueError("degeneracy order j must be >= 2")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")

    @property
    def s(self) -> float:
        return 1.0 / (1.0 + self.j)


def eval_hamiltonian(params: ZoneParameters, state: PhaseState) -> float:
    """Energy of the reduced zone system at a phase point.

    Even in v about v = 0 and v = pi; total function of its arguments.
    """
    u, v = state.u, state.v
    poly = params.mu2 * u * u / 2.0 + params.b * u**3 / 3.0 + params.b3 * u**4 / 4.0
    return params.p * poly + (params.a + params.mu1 * u) * math.cos(v)


def eval_vector_field(params: ZoneParameters, state: PhaseState) -> tuple[float, float]:
    """Right-hand side (du/dtau, dv/dtau) of the reduced zone system.

    Hamiltonian: equals (-dH/dv, dH/du) identically, so the flow is
    divergence-free.
    """
    u, v = state.u, state.v
    du = (params.a + params.mu1 * u) * math.sin(v)
    dv = (
        params.p * (params.b * u * u + params.mu2 * u + params.b3 * u**3)
        + params.mu1 * math.cos(v)
    )
    return du, dv


def eval_jacobian(params: ZoneParameters, state: PhaseState) -> np.ndarray:
    """Jacobian matrix of the reduced field at a phase point (trace is 0)."""
    u, v = state.u, state.v
    sin_v, cos_v = math.sin(v), math.cos(v)
    return np.array(
        [
            [params.mu1 * sin_v, (params.a + params.mu1 * u) * cos_v],
            [params.p * (2.0 * params.b * u + params.mu2 + 3.0 * params.b3 * u * u),
             -params.mu1 * sin_v],
        ]
    )


def jacobian_determinant(params: ZoneParameters, state: PhaseState) -> float:
    """Determinant of the field Jacobian; sign classifies simple equilibria."""
    u, v = state.u, state.v
    sin_v, cos_v = math.sin(v), math.cos(v)
    return (
        -(params.mu1 * sin_v) ** 2
        - params.p
        * (2.0 * params.b * u + params.mu2 + 3.0 * params.b3 * u * u)
        * (params.a + params.mu1 * u)
        * cos_v
    )


def eval_reduced_hamiltonian(
    model: GeneralAveragedModel,
    harmonic: tuple[float, float, float],
    state: PhaseState,
    *,
    identity_tol: float = 1e-12,
) -> float:
    """Single-harmonic reduced Hamiltonian, optionally with deformation terms.

    Parameters
    ----------
    harmonic : (a_p, c_p, d_p)
        Amplitudes of the sin/cos harmonics of the reduced coefficient
        functions. The Hamiltonian identity requires c_p = p*d_p.
    state : PhaseState
        Evaluation point.

    Raises
    ------
    ValueError
        If c_p differs from p*d_p beyond ``identity_tol``.
    """
    a_p, c_p, d_p = harmonic
    p = model.p
    if abs(c_p - p * d_p) > identity_tol * max(1.0, abs(c_p), abs(p * d_p)):
        raise ValueError(
            f"harmonic amplitudes violate c = p*d: c={c_p!r}, p*d={p * d_p!r}"
        )
    u, v = state.u, state.v
    j = model.j
    value = model.bj * u ** (j + 1) / (j + 1) + (a_p / p) * math.cos(p * v)
    value += model.epsilon ** model.s * (
        (c_p / p) * u * math.cos(p * v) + model.bj1 * u ** (j + 2) / (j + 2)
    )
    for k, bk in enumerate(model.deformation, start=1):
        value += bk * u ** (k + 1) / (k + 1)
    return value


def eval_general_field(model: GeneralAveragedModel, state: PhaseState) -> tuple[float, float]:
    """Right-hand side of the full second-approximation system in fast time.

    Supports the non-Hamiltonian case (nonzero mean parts of the coefficient
    functions); evaluation failures of a0/p0/q0 propagate.
    """
    u, v = state.u, state.v
    eps, s = model.epsilon, model.s
    e1s = eps ** (1.0 - s)
    du = e1s * model.a0(v) + eps * model.p0(v) * u
    dv = e1s * model.bj * u**model.j + eps * (model.bj1 * u ** (model.j + 1) + model.q0(v))
    return du, dv
