"""Area-preserving cylinder maps: the non-monotone standard map, its second
iterate's approximating Hamiltonians, and the conservative-Euler
discretization of the reduced zone flow.

Both variants are explicit, invertible, and have unit Jacobian determinant;
the determinant is still computed from the analytic entries (not hardcoded)
so tests can witness the cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonRealMultipliersError, SingularDenominatorError
from .zone_model import TWO_PI, PhaseState, ZoneParameters

DENOM_TOL = 1e-12


@dataclass(frozen=True)
class StandardMapParams:
    """Standard map with a quadratic (non-monotone) rotation function:
    u' = u + a*sin(v), v' = v + u' - beta*u'^2."""

    a: float
    beta: float


@dataclass(frozen=True)
class EulerMapParams:
    """Conservative-Euler discretization of the zone flow with step alpha:
    u' = (u + alpha*a*sin(v)) / (1 - alpha*mu1*sin(v)),
    v' = v + alpha*(p*b*u'^2 + p*mu2*u' + mu1*cos(v)).

    The denominator must stay away from zero along iterated orbits; that is
    a runtime error, not a constructor error.
    """

    alpha: float
    zone: ZoneParameters

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.zone.b3 != 0.0:
            raise ValueError("the Euler map is defined for b3 = 0")


MapSpec = Union[StandardMapParams, EulerMapParams]


@dataclass
class MapOrbit:
    """Iterates of a cylinder map with both wrapped and unwrapped angles."""

    u: np.ndarray
    v_unwrapped: np.ndarray

    @property
    def v_mod(self) -> np.ndarray:
        return self.v_unwrapped % TWO_PI

    def __len__(self) -> int:
        return len(self.u)


def _euler_denominator(spec: EulerMapParams, v: float) -> float:
    return 1.0 - spec.alpha * spec.zone.mu1 * math.sin(v)


def map_step(spec: MapSpec, state: PhaseState, *, wrap: bool = True) -> PhaseState:
    """One forward iterate; v is reported mod 2*pi unless ``wrap`` is False.

    Raises
    ------
    SingularDenominatorError
        For the Euler variant when |1 - alpha*mu1*sin(v)| <= 1e-12.
    """
    u, v = state.u, state.v
    if isinstance(spec, StandardMapParams):
        u_new = u + spec.a * math.sin(v)
        v_new = v + u_new - spec.beta * u_new * u_new
    else:
        denom = _euler_denominator(spec, v)
        if abs(denom) <= DENOM_TOL:
            raise SingularDenominatorError(f"denominator {denom:.3e} at v = {v}")
        z = spec.zone
        u_new = (u + spec.alpha * z.a * math.sin(v)) / denom
        v_new = v + spec.alpha * (
            z.p * z.b * u_new * u_new + z.mu2 * z.p * u_new + z.mu1 * math.cos(v)
        )
    return PhaseState(u_new, v_new % TWO_PI if wrap else v_new)


def map_step_inverse(spec: MapSpec, state: PhaseState, *, wrap: bool = True) -> PhaseState:
    """One backward iterate (both variants invert explicitly: the standard
    map triangularly, the Euler map by solving for the old angle first)."""
    u1, v1 = state.u, state.v
    if isinstance(spec, StandardMapParams):
        v0 = v1 - u1 + spec.beta * u1 * u1
        u0 = u1 - spec.a * math.sin(v0)
    else:
        z = spec.zone
        c = spec.alpha * (z.p * z.b * u1 * u1 + z.mu2 * z.p * u1)

        def g(v: float) -> float:
            return v + spec.alpha * z.mu1 * math.cos(v) + c - v1

        # monotone in v when |alpha*mu1| < 1; Newton from v1 - c
        v0 = v1 - c
        for _ in range(100):
            gv = g(v0)
            dg = 1.0 - spec.alpha * z.mu1 * math.sin(v0)
            if abs(dg) <= DENOM_TOL:
                raise SingularDenominatorError(f"denominator {dg:.3e} at v = {v0}")
            step = gv / dg
            v0 -= step
            if abs(step) < 1e-14 * max(1.0, abs(v0)):
                break
        denom = _euler_denominator(spec, v0)
        if abs(denom) <= DENOM_TOL:
            raise SingularDenominatorError(f"denominator {denom:.3e} at v = {v0}")
        u0 = u1 * denom - spec.alpha * z.a * math.sin(v0)
    return PhaseState(u0, v0 % TWO_PI if wrap else v0)


def map_jacobian(spec: MapSpec, state: PhaseState) -> np.ndarray:
    """Analytic Jacobian matrix of one forward step at a state."""
    u, v = state.u, state.v
    if isinstance(spec, StandardMapParams):
        u_new = u + spec.a * math.sin(v)
        du_du = 1.0
        du_dv = spec.a * math.cos(v)
        rot = 1.0 - 2.0 * spec.beta * u_new
        return np.array([[du_du, du_dv], [rot * du_du, 1.0 + rot * du_dv]])
    denom = _euler_denominator(spec, v)
    if abs(denom) <= DENOM_TOL:
        raise SingularDenominatorError(f"denominator {denom:.3e} at v = {v}")
    z = spec.zone
    u_new = (u + spec.alpha * z.a * math.sin(v)) / denom
    du_du = 1.0 / denom
    du_dv = spec.alpha * math.cos(v) * (z.a + z.mu1 * u_new) / denom
    w = spec.alpha * (2.0 * z.p * z.b * u_new + z.mu2 * z.p)
    dv_du = w * du_du
    dv_dv = 1.0 + w * du_dv - spec.alpha * z.mu1 * math.sin(v)
    return np.array([[du_du, du_dv], [dv_du, dv_dv]])


def map_jacobian_det(spec: MapSpec, state: PhaseState) -> float:
    """Determinant of the analytic one-step Jacobian (identically 1 for both
    variants; evaluated, not hardcoded)."""
    jac = map_jacobian(spec, state)
    return float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])


def iterate_orbit(spec: MapSpec, start: PhaseState, n: int) -> MapOrbit:
    """n forward iterates; the unwrapped angle is retained alongside the
    wrapped one for rotation-number use.

    A singular denominator aborts with the failing iterate index attached.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    us = np.empty(n + 1)
    vs = np.empty(n + 1)
    us[0], vs[0] = start.u, start.v
    state = PhaseState(start.u, start.v)
    for i in range(1, n + 1):
        try:
            state = map_step(spec, state, wrap=False)
        except SingularDenominatorError as exc:
            raise SingularDenominatorError(str(exc), index=i) from None
        us[i], vs[i] = state.u, state.v
    return MapOrbit(u=us, v_unwrapped=vs)


def approximating_hamiltonian(which: str, a: float, beta: float, state: PhaseState) -> float:
    """Hamiltonian of the flow approximating the standard map (``which`` = "T")
    or its second iterate (``which`` = "T2").

    T:  u^2/2 - beta*u^3/3 + a*cos(v)
    T2: u^2/2 - beta*u^3/3 + (a^2/16)*(1 - 2*beta*u)*cos(2*v)
    """
    u, v = state.u, state.v
    core = u * u / 2.0 - beta * u**3 / 3.0
    if which == "T":
        return core + a * math.cos(v)
    if which == "T2":
        return core + (a * a / 16.0) * (1.0 - 2.0 * beta * u) * math.cos(2.0 * v)
    raise ValueError("which must be 'T' or 'T2'")


def t2_zone_parameters(a: float, beta: float) -> ZoneParameters:
    """Zone-parameter encoding of the second-iterate approximating
    Hamiltonian (angle doubled), for reuse of the equilibria solver."""
    return ZoneParameters(
        a=a * a / 16.0, b=-beta, p=1, mu1=-beta * a * a / 8.0, mu2=1.0
    )


def t_zone_parameters(a: float, beta: float) -> ZoneParameters:
    """Zone-parameter encoding of the first-iterate approximating
    Hamiltonian: the cosine coefficient carries no u-dependence (mu1 = 0)."""
    return ZoneParameters(a=a, b=-beta, p=1, mu1=0.0, mu2=1.0)


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    tail_gap: float  # Cauchy estimate |rho_n - rho_{n/2}|
    n: int


def rotation_number(spec: MapSpec, start: PhaseState, n: int) -> RotationEstimate:
    """Average winding (v_n - v_0) / (2*pi*n) on the unwrapped angle, with
    the Cauchy tail |rho_n - rho_{n/2}| as a convergence estimate. Values are
    reported modulo 1 by convention of the unwrapped lift."""
    if n < 1000:
        raise ValueError("n must be >= 1000 for a stable estimate")
    orbit = iterate_orbit(spec, start, n)
    rho_n = (orbit.v_unwrapped[n] - orbit.v_unwrapped[0]) / (TWO_PI * n)
    half = n // 2
    rho_half = (orbit.v_unwrapped[half] - orbit.v_unwrapped[0]) / (TWO_PI * half)
    return RotationEstimate(value=float(rho_n), tail_gap=float(abs(rho_n - rho_half)), n=n)


# --- invariant manifolds ---------------------------------------------------------


@dataclass
class ManifoldBundle:
    fixed_point: PhaseState
    multipliers: tuple[float, float]  # (lambda, 1/lambda), |lambda| > 1
    unstable: list[np.ndarray]  # polylines, columns (u, v unwrapped)
    stable: list[np.ndarray]
    splitting_indicator: float


def _grow_manifold(
    advance,
    x0: np.ndarray,
    direction: np.ndarray,
    iterations: int,
    seed_points: int,
    offset: float,
    refine_gap: float,
    max_points: int = 400_000,
) -> np.ndarray:
    """Iterate a fundamental segment along ``direction``, adaptively
    refining seeds whenever adjacent images separate by more than
    ``refine_gap``."""
    a0 = x0 + offset * direction
    a1 = advance(a0)
    if np.linalg.norm(a1 - x0) < np.linalg.norm(a0 - x0):
        # direction contracted: wrong side for this propagator
        raise ValueError("direction is not expanding under the map")

    def seed(s: float) -> np.ndarray:
        return a0 + s * (a1 - a0)

    params = list(np.linspace(0.0, 1.0, seed_points))
    pts = [seed(s) for s in params]
    polyline = [x0.copy()] + [p.copy() for p in pts]
    current = pts
    cur_params = params
    for it in range(1, iterations + 1):
        nxt = [advance(p) for p in current]
        # adaptive refinement: subdivide seed parameters where images spread
        refined_params = list(cur_params)
        refined = list(nxt)
        guard = 0
        i = 0
        while i < len(refined) - 1 and guard < max_points:
            gap = float(np.linalg.norm(refined[i + 1] - refined[i]))
            if gap > refine_gap and refined_params[i + 1] - refined_params[i] > 1e-12:
                mid_s = 0.5 * (refined_params[i] + refined_params[i + 1])
                x = seed(mid_s)
                for _ in range(it):
                    x = advance(x)
                refined_params.insert(i + 1, mid_s)
                refined.insert(i + 1, x)
                guard += 1
            else:
                i += 1
        polyline.extend(p.copy() for p in refined)
        current, cur_params = refined, refined_params
        if len(polyline) > max_points:
            break
    return np.array(polyline)


def trace_manifolds(
    spec: MapSpec,
    fixed_point: PhaseState,
    segment_iterations: int,
    *,
    seed_points: int = 1000,
    offset: float = 1e-7,
    refine_gap: float = 1e-2,
) -> ManifoldBundle:
    """Unstable/stable manifold polylines of a saddle fixed point.

    The unstable manifold grows a fundamental segment under the forward map;
    the stable one uses the explicit inverse. The splitting indicator is the
    transversal gap between the two manifolds at the quarter-turn section
    (split manifolds intersect, so a plain minimal distance would be 0; the
    section gap measures the lobe scale and vanishes in the integrable limit).

    Raises
    ------
    NonRealMultipliersError
        If the fixed point's multipliers are not real with |lambda| > 1
        (elliptic point).
    """
    jac = map_jacobian(spec, fixed_point)
    eigvals, eigvecs = np.linalg.eig(jac)
    if np.iscomplexobj(eigvals) and np.max(np.abs(eigvals.imag)) > 1e-12:
        raise NonRealMultipliersError(f"multipliers {eigvals} are not real")
    eigvals = eigvals.real
    order = np.argsort(np.abs(eigvals))
    lam_s, lam_u = float(eigvals[order[0]]), float(eigvals[order[1]])
    if abs(lam_u) <= 1.0 + 1e-12:
        raise NonRealMultipliersError(
            f"largest multiplier {lam_u} is not expanding; not a saddle"
        )
    e_u = eigvecs[:, order[1]].real
    e_s = eigvecs[:, order[0]].real
    e_u /= np.linalg.norm(e_u)
    e_s /= np.linalg.norm(e_s)
    x0 = np.array([fixed_point.u, fixed_point.v])

    def fwd(x: np.ndarray) -> np.ndarray:
        s = map_step(spec, PhaseState(x[0], x[1]), wrap=False)
        return np.array([s.u, s.v])

    def bwd(x: np.ndarray) -> np.ndarray:
        s = map_step_inverse(spec, PhaseState(x[0], x[1]), wrap=False)
        return np.array([s.u, s.v])

    # for negative multipliers the fundamental segment uses the doubled map
    fwd2 = (lambda x: fwd(fwd(x))) if lam_u < 0 else fwd
    bwd2 = (lambda x: bwd(bwd(x))) if lam_s < 0 else bwd

    unstable, stable = [], []
    for sign in (+1, -1):
        unstable.append(
            _grow_manifold(fwd2, x0, sign * e_u, segment_iterations, seed_points, offset, refine_gap)
        )
        stable.append(
            _grow_manifold(bwd2, x0, sign * e_s, segment_iterations, seed_points, offset, refine_gap)
        )

    indicator = _splitting_indicator(x0, unstable, stable)
    return ManifoldBundle(
        fixed_point=fixed_point,
        multipliers=(lam_u, 1.0 / lam_u),
        unstable=unstable,
        stable=stable,
        splitting_indicator=indicator,
    )


def _section_crossing(
    branch: np.ndarray, v0: float, target: float
) -> tuple[float, float] | None:
    """First point where the branch's angle offset |v - v0| reaches
    ``target``; linear interpolation between polyline vertices. Returns
    (u, signed offset) or None."""
    w = branch[:, 1] - v0
    absw = np.abs(w)
    beyond = np.flatnonzero(absw >= target)
    if len(beyond) == 0:
        return None
    i = int(beyond[0])
    if i == 0:
        return float(branch[0, 0]), float(w[0])
    w0, w1 = absw[i - 1], absw[i]
    frac = (target - w0) / (w1 - w0) if w1 != w0 else 0.0
    u = float(branch[i - 1, 0] + frac * (branch[i, 0] - branch[i - 1, 0]))
    return u, float(math.copysign(target, w[i]))


def _splitting_indicator(
    x0: np.ndarray, unstable: list[np.ndarray], stable: list[np.ndarray]
) -> float:
    """Transversal manifold gap measured over mid-loop sections.

    Transversally split manifolds intersect, so their minimal distance is 0
    and a single section can land on a homoclinic point; the robust measure
    is the largest u-offset between the first unstable crossing of a section
    (reached a fraction s of a turn from the saddle) and the first stable
    crossing of the same physical section (reached after 2*pi - s), taken
    over a window of sections around the quarter turn. Zero exactly when the
    manifolds coincide (integrable limit); grows with the lobe amplitude.
    """
    v0 = float(x0[1])
    gaps: list[float] = []
    for s in np.linspace(math.pi / 4.0, 3.0 * math.pi / 4.0, 17):
        u_cross = [c for b in unstable if (c := _section_crossing(b, v0, float(s)))]
        s_cross = [c for b in stable if (c := _section_crossing(b, v0, TWO_PI - float(s)))]
        for uu, wu in u_cross:
            for us, ws in s_cross:
                # same physical section: the signed offsets differ by 2*pi
                if abs(abs(wu - ws) - TWO_PI) < 1e-9:
                    gaps.append(abs(uu - us))
    return max(gaps) if gaps else math.inf
