"""Closed-form equilibria of the reduced zone system, Newton refinement, and
the local bifurcation curves of the (mu1, mu2) parameter plane.

Equilibrium labels
------------------
O1+ / O1-   roots on the v = 0 line (larger / smaller u)
O2+ / O2-   roots on the v = pi line (larger / smaller u)
O3  / O4    off-axis pair at u = -a/mu1 (O3 has v in (0, pi), O4 = 2*pi - v(O3))
refined     output of Newton refinement from an arbitrary guess
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergenceError, SingularJacobianError
from .zone_model import (
    TWO_PI,
    PhaseState,
    ZoneParameters,
    eval_hamiltonian,
    eval_jacobian,
    eval_vector_field,
    jacobian_determinant,
)

DELTA_TOL = 1e-9

SADDLE = "saddle"
CENTER = "center"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Equilibrium:
    """A fixed point with its linearization determinant, type, and energy."""

    state: PhaseState
    delta: float
    kind: str
    energy: float
    label: str


def _classify(delta: float, delta_tol: float) -> str:
    if delta < -delta_tol:
        return SADDLE
    if delta > delta_tol:
        return CENTER
    return DEGENERATE


def _make(params: ZoneParameters, u: float, v: float, label: str, delta_tol: float) -> Equilibrium:
    state = PhaseState(u, v % TWO_PI)
    delta = jacobian_determinant(params, state)
    return Equilibrium(
        state=state,
        delta=delta,
        kind=_classify(delta, delta_tol),
        energy=eval_hamiltonian(params, state),
        label=label,
    )


def off_axis_cosine(params: ZoneParameters) -> float:
    """cos(v) at the off-axis equilibria u = -a/mu1; off-axis points exist
    exactly when this lies in [-1, 1]. Infinite when mu1 = 0."""
    if params.mu1 == 0.0:
        return math.inf
    u0 = -params.a / params.mu1
    return -params.p * (params.b * u0 * u0 + params.mu2 * u0) / params.mu1


def closed_form_equilibria(
    params: ZoneParameters, *, delta_tol: float = DELTA_TOL
) -> list[Equilibrium]:
    """All equilibria of the reduced system in closed form.

    On-axis points solve b*u^2 + mu2*u +- mu1/p = 0 on the lines v = 0 and
    v = pi; the off-axis pair sits at u = -a/mu1 where the cosine condition
    admits solutions. Nonexistent families are simply absent from the list.

    Requires b3 = 0 (the closed forms are for the cubic-free system).
    """
    if params.b3 != 0.0:
        raise ValueError("closed-form equilibria require b3 = 0")
    a, b, p, mu1, mu2 = params.a, params.b, params.p, params.mu1, params.mu2
    out: list[Equilibrium] = []

    disc0 = mu2 * mu2 - 4.0 * b * mu1 / p
    if disc0 >= 0.0:
        r = math.sqrt(disc0)
        out.append(_make(params, (-mu2 + r) / (2.0 * b), 0.0, "O1+", delta_tol))
        if r > 0.0:
            out.append(_make(params, (-mu2 - r) / (2.0 * b), 0.0, "O1-", delta_tol))

    disc_pi = mu2 * mu2 + 4.0 * b * mu1 / p
    if disc_pi >= 0.0:
        r = math.sqrt(disc_pi)
        out.append(_make(params, (-mu2 + r) / (2.0 * b), math.pi, "O2+", delta_tol))
        if r > 0.0:
            out.append(_make(params, (-mu2 - r) / (2.0 * b), math.pi, "O2-", delta_tol))

    cos_v = off_axis_cosine(params)
    if abs(cos_v) <= 1.0:
        u0 = -a / mu1
        v3 = math.acos(cos_v)
        out.append(_make(params, u0, v3, "O3", delta_tol))
        if 0.0 < v3 < math.pi:
            out.append(_make(params, u0, TWO_PI - v3, "O4", delta_tol))
    return out


def refine_equilibrium(
    params: ZoneParameters,
    guess: PhaseState,
    *,
    residual_tol: float = 1e-12,
    max_steps: int = 50,
    allow_degenerate: bool = False,
    delta_tol: float = DELTA_TOL,
) -> Equilibrium:
    """Damped Newton refinement of an equilibrium from an initial guess.

    Raises
    ------
    SingularJacobianError
        When a Newton step exceeds 1e8 (near-singular linearization).
    NoConvergenceError
        When 50 steps do not reach the residual tolerance, or the converged
        point is degenerate and ``allow_degenerate`` is False.
    """
    x = np.array([guess.u, guess.v], dtype=float)

    def residual(vec: np.ndarray) -> np.ndarray:
        return np.array(eval_vector_field(params, PhaseState(vec[0], vec[1])))

    f = residual(x)
    for _ in range(max_steps):
        norm = float(np.linalg.norm(f))
        if norm < residual_tol:
            break
        jac = eval_jacobian(params, PhaseState(x[0], x[1]))
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"singular Jacobian at u={x[0]}, v={x[1]}") from exc
        if float(np.linalg.norm(step)) > 1e8:
            raise SingularJacobianError(
                f"Newton step exceeded 1e8 at u={x[0]}, v={x[1]}"
            )
        lam = 1.0
        for _ in range(30):
            trial = x + lam * step
            f_trial = residual(trial)
            if float(np.linalg.norm(f_trial)) < norm:
                break
            lam *= 0.5
        else:
            trial = x + step
            f_trial = residual(trial)
        x, f = trial, f_trial
    if float(np.linalg.norm(f)) >= residual_tol:
        raise NoConvergenceError(
            f"no convergence after {max_steps} steps; residual {np.linalg.norm(f):.3e}"
        )
    eq = _make(params, float(x[0]), float(x[1]), "refined", delta_tol)
    if eq.kind == DEGENERATE and not allow_degenerate:
        raise NoConvergenceError("converged to a degenerate point (|Delta| below tolerance)")
    return eq


# --- local bifurcation curves -------------------------------------------------

def curve_m3_mu2(params: ZoneParameters, mu1: float) -> list[float]:
    """mu2 values on the v=0 fold curve (p*mu2^2 = 4*b*mu1) at given mu1."""
    val = 4.0 * params.b * mu1 / params.p
    if val < 0.0:
        return []
    r = math.sqrt(val)
    return [r] if r == 0.0 else [r, -r]


def curve_m4_mu2(params: ZoneParameters, mu1: float) -> list[float]:
    """mu2 values on the v=pi fold curve (p*mu2^2 = -4*b*mu1) at given mu1."""
    val = -4.0 * params.b * mu1 / params.p
    if val < 0.0:
        return []
    r = math.sqrt(val)
    return [r] if r == 0.0 else [r, -r]


def curve_m5_mu2(params: ZoneParameters, mu1: float, sign: int) -> list[float]:
    """mu2 on the off-axis existence boundary (cos v0 = +-1) at given mu1.

    General form: mu2 = a*b/mu1 + sign * mu1^2/(p*a); reduces to the
    reference-case expression p*mu2 = 2/mu1 +- mu1^2/2 at a=2, b=1.
    """
    if mu1 == 0.0:
        return []
    return [params.a * params.b / mu1 + sign * mu1 * mu1 / (params.p * params.a)]


def local_bifurcation_curves(
    params: ZoneParameters, mu1_grid: list[float] | np.ndarray
) -> dict[str, list[tuple[float, float]]]:
    """Sample the four analytic bifurcation branches over a mu1 grid.

    Returns a dict keyed by curve id ("m3", "m4", "m5+", "m5-") whose values
    are (mu1, mu2) sample lists; m5 branches are only defined off mu1 = 0.
    """
    branches: dict[str, list[tuple[float, float]]] = {
        "m3": [], "m4": [], "m5+": [], "m5-": []
    }
    for mu1 in mu1_grid:
        mu1 = float(mu1)
        for mu2 in curve_m3_mu2(params, mu1):
            branches["m3"].append((mu1, mu2))
        for mu2 in curve_m4_mu2(params, mu1):
            branches["m4"].append((mu1, mu2))
        for mu2 in curve_m5_mu2(params, mu1, +1):
            branches["m5+"].append((mu1, mu2))
        for mu2 in curve_m5_mu2(params, mu1, -1):
            branches["m5-"].append((mu1, mu2))
    return branches


# --- local bifurcation detection along a parameter path -----------------------

VERTICAL = "VERTICAL"
HORIZONTAL_TRIPLE_SADDLE = "HORIZONTAL_TRIPLE_SADDLE"
TANGENTIAL_CROSSING = "TANGENTIAL_CROSSING"


@dataclass(frozen=True)
class BifurcationEvent:
    kind: str
    curve: str
    mu1: float
    mu2: float
    t: float


def _curve_functions(params: ZoneParameters):
    """Polynomial indicator functions whose zero sets are the four curves.

    The m5 indicators are cleared of the 1/mu1 poles so that paths through
    mu1 = 0 see no spurious roots.
    """
    a, b, p = params.a, params.b, params.p

    def f3(mu1, mu2):
        return p * mu2 * mu2 - 4.0 * b * mu1

    def f4(mu1, mu2):
        return p * mu2 * mu2 + 4.0 * b * mu1

    def f5(sign):
        def f(mu1, mu2):
            return p * a * mu1 * mu2 - p * a * a * b - sign * mu1**3
        return f

    return {"m3": f3, "m4": f4, "m5+": f5(+1), "m5-": f5(-1)}


def detect_local_bifurcation(
    params: ZoneParameters,
    start: tuple[float, float],
    end: tuple[float, float],
    *,
    n_scan: int = 1024,
    root_tol: float = 1e-12,
) -> list[BifurcationEvent]:
    """Bifurcation events along the straight parameter segment start -> end.

    Crossings of the fold curves are tagged VERTICAL (the closed-form root
    pair coalesces with Delta -> 0); crossings of the off-axis boundary are
    HORIZONTAL_TRIPLE_SADDLE (the off-axis pair exists strictly on exactly
    one side). A curve touched without a sign change of its indicator yields
    TANGENTIAL_CROSSING.

    Path endpoints must not lie on any curve.
    """
    (m1a, m2a), (m1b, m2b) = start, end
    funcs = _curve_functions(params)

    def at(t: float) -> tuple[float, float]:
        return m1a + t * (m1b - m1a), m2a + t * (m2b - m2a)

    for name, f in funcs.items():
        for t in (0.0, 1.0):
            if abs(f(*at(t))) < root_tol:
                raise ValueError(f"path endpoint lies on curve {name}")

    ts = np.linspace(0.0, 1.0, n_scan + 1)
    events: list[BifurcationEvent] = []
    for name, f in funcs.items():
        vals = np.array([f(*at(t)) for t in ts])
        scale = max(1.0, float(np.max(np.abs(vals))))
        vertical = name in ("m3", "m4")
        # sign-change crossings
        for i in range(n_scan):
            if vals[i] == 0.0 or vals[i] * vals[i + 1] < 0.0:
                lo, hi = ts[i], ts[i + 1]
                flo = vals[i]
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    fm = f(*at(mid))
                    if flo * fm <= 0.0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                    if hi - lo < 1e-15:
                        break
                t_star = 0.5 * (lo + hi)
                mu1, mu2 = at(t_star)
                kind = VERTICAL if vertical else HORIZONTAL_TRIPLE_SADDLE
                if not vertical:
                    # off-axis pair must exist strictly on exactly one side
                    eps = max(1e-6, 2.0 / n_scan)
                    sides = []
                    for tt in (t_star - eps, t_star + eps):
                        pp = ZoneParameters(params.a, params.b, params.p, *at(tt), params.b3)
                        sides.append(abs(off_axis_cosine(pp)) <= 1.0)
                    if sides[0] == sides[1]:
                        kind = TANGENTIAL_CROSSING
                events.append(BifurcationEvent(kind, name, mu1, mu2, t_star))
        # tangential touches: refine interior |f| minima without sign change
        last_touch = -math.inf
        for i in range(1, n_scan):
            if (
                vals[i - 1] * vals[i + 1] > 0.0
                and abs(vals[i]) <= abs(vals[i - 1])
                and abs(vals[i]) <= abs(vals[i + 1])
                and abs(vals[i]) < 1e-2 * scale
            ):
                t_touch = _refine_touch(lambda t: f(*at(t)), float(ts[i - 1]), float(ts[i + 1]))
                if abs(f(*at(t_touch))) < 1e-9 * scale and t_touch - last_touch > 2.0 / n_scan:
                    mu1, mu2 = at(t_touch)
                    events.append(
                        BifurcationEvent(TANGENTIAL_CROSSING, name, mu1, mu2, t_touch)
                    )
                    last_touch = t_touch
    events.sort(key=lambda e: e.t)
    return events


def _refine_touch(f, lo: float, hi: float, iterations: int = 120) -> float:
    """Golden-section refinement of a local minimum of |f|."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = abs(f(x1)), abs(f(x2))
    for _ in range(iterations):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = abs(f(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = abs(f(x2))
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)
