"""Orbit integration for the reduced zone flow, separatrix tracing from
saddles, and level-set phase portraits.

The integrator is an explicit embedded Runge-Kutta 5(4) pair (Dormand-Prince
tableau) with a PI step controller and quartic dense output. The angle v is
kept unwrapped along trajectories; wrapping happens only at reporting time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .equilibria import SADDLE, Equilibrium, closed_form_equilibria
from .errors import FlowBlowup, FlowStepUnderflow
from .zone_model import (
    TWO_PI,
    PhaseState,
    ZoneParameters,
    eval_hamiltonian,
    eval_jacobian,
)

BLOWUP_LIMIT = 1e6

# Dormand-Prince 5(4) tableau (plain floats: the step loop is scalar)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
# dense-output weights (quartic interpolant of the 5th-order solution)
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)


@dataclass
class OrbitTrace:
    """Time-ordered orbit samples with unwrapped angle.

    energy_drift is the maximum absolute deviation of the conserved quantity
    along the orbit (None for non-Hamiltonian fields).
    """

    tau: np.ndarray
    u: np.ndarray
    v: np.ndarray
    energy_drift: float | None = None
    n_steps: int = 0

    @property
    def v_mod(self) -> np.ndarray:
        return self.v % TWO_PI

    def states(self) -> list[tuple[float, PhaseState]]:
        return [
            (float(t), PhaseState(float(uu), float(vv)))
            for t, uu, vv in zip(self.tau, self.u, self.v)
        ]

    def final_state(self) -> PhaseState:
        return PhaseState(float(self.u[-1]), float(self.v[-1]))


def _dense_eval(u0, v0, hd, ku, kv, du5, dv5, theta):
    """Quartic dense-output interpolant of the accepted step."""
    out = []
    for y0, ks, dy5 in ((u0, ku, du5), (v0, kv, dv5)):
        ydiff = hd * dy5
        bspl = hd * ks[0] - ydiff
        r4 = ydiff - hd * ks[6] - bspl
        r5 = hd * sum(_D[i] * ks[i] for i in range(7))
        out.append(
            y0 + theta * (ydiff + (1 - theta) * (bspl + theta * (r4 + (1 - theta) * r5)))
        )
    return out[0], out[1]


def integrate_orbit(
    field: Callable[[float, np.ndarray], np.ndarray] | ZoneParameters,
    start: PhaseState,
    t_span: tuple[float, float],
    tol: float = 1e-10,
    *,
    t_eval: Sequence[float] | None = None,
    first_step: float | None = None,
    max_step: float = math.inf,
    record_steps: bool = True,
) -> OrbitTrace:
    """Integrate an orbit with the adaptive embedded 5(4) pair.

    Parameters
    ----------
    field
        Either zone parameters (Hamiltonian flow, energy drift recorded) or a
        callable (t, y) -> dy/dt for a general planar field.
    t_span
        (t0, t1); t1 < t0 integrates backward.
    tol
        Both absolute and relative tolerance, in [1e-13, 1e-3].
    t_eval
        Extra output times served from dense output (must lie inside t_span).

    Raises
    ------
    FlowStepUnderflow
        Near non-smooth inputs when the controller cannot make progress.
    FlowBlowup
        When |u| exceeds 1e6.
    """
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError("tol must lie in [1e-13, 1e-3]")
    hamiltonian: ZoneParameters | None = None
    if isinstance(field, ZoneParameters):
        hamiltonian = field
        a, b, p = field.a, field.b, field.p
        mu1, mu2, b3 = field.mu1, field.mu2, field.b3
        sin, cos = math.sin, math.cos

        def rhs(_t: float, u: float, v: float) -> tuple[float, float]:
            return (
                (a + mu1 * u) * sin(v),
                p * (b * u * u + mu2 * u + b3 * u**3) + mu1 * cos(v),
            )
    else:
        general = field

        def rhs(t: float, u: float, v: float) -> tuple[float, float]:
            out = general(t, np.array([u, v]))
            return float(out[0]), float(out[1])

    t0, t1 = float(t_span[0]), float(t_span[1])
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    u, v = float(start.u), float(start.v)
    t = t0

    eval_times: list[float] | None = None
    if t_eval is not None:
        eval_times = sorted((float(te) for te in t_eval), reverse=(direction < 0))
        lo, hi = min(t0, t1), max(t0, t1)
        if any(te < lo - 1e-12 or te > hi + 1e-12 for te in eval_times):
            raise ValueError("t_eval times must lie within t_span")
    next_eval = 0

    ts = [t]
    us = [u]
    vs = [v]

    if span == 0.0:
        return _finalize(ts, us, vs, hamiltonian, 0)
    if eval_times is not None:
        # dense-output mode: the trace holds exactly the requested times
        ts, us, vs = [], [], []

    ku = [0.0] * 7
    kv = [0.0] * 7
    ku[0], kv[0] = rhs(t, u, v)
    if first_step is None:
        scale_u = tol + tol * abs(u)
        scale_v = tol + tol * abs(v)
        d0 = math.sqrt(0.5 * ((u / scale_u) ** 2 + (v / scale_v) ** 2))
        d1 = math.sqrt(0.5 * ((ku[0] / scale_u) ** 2 + (kv[0] / scale_v) ** 2))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    else:
        h = abs(first_step)
    h = min(h, span, max_step)

    err_prev = 1.0
    n_steps = 0
    # conservative safety: the controller targets a scaled error well below
    # 1 so the conserved quantity stays an order under the tolerance
    safety, alpha, beta = 0.7, 0.7 / 5.0, 0.4 / 5.0
    min_factor, max_factor = 0.2, 5.0

    while (t1 - t) * direction > 0.0:
        remaining = abs(t1 - t)
        if remaining <= 1e-13 * max(1.0, abs(t0), abs(t1)):
            t = t1  # snap roundoff residue
            break
        h = min(h, remaining, max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise FlowStepUnderflow(f"step underflow at t = {t}")
        hd = h * direction
        for i in range(1, 7):
            row = _A[i]
            su = 0.0
            sv = 0.0
            for j, aij in enumerate(row):
                su += aij * ku[j]
                sv += aij * kv[j]
            ku[i], kv[i] = rhs(t + _C[i] * hd, u + hd * su, v + hd * sv)
        du5 = dv5 = du4 = dv4 = 0.0
        for i in range(7):
            du5 += _B5[i] * ku[i]
            dv5 += _B5[i] * kv[i]
            du4 += _B4[i] * ku[i]
            dv4 += _B4[i] * kv[i]
        u5, v5 = u + hd * du5, v + hd * dv5
        scale_u = tol + tol * max(abs(u), abs(u5))
        scale_v = tol + tol * max(abs(v), abs(v5))
        eu = hd * (du5 - du4) / scale_u
        ev = hd * (dv5 - dv4) / scale_v
        err = math.sqrt(0.5 * (eu * eu + ev * ev))
        if err <= 1.0:
            # accepted step: serve dense output, then advance (FSAL)
            t_new = t + hd
            if eval_times is not None:
                while next_eval < len(eval_times) and (
                    (eval_times[next_eval] - t_new) * direction
                    <= 1e-12 * max(1.0, abs(t_new))
                ):
                    te = eval_times[next_eval]
                    theta = min(max((te - t) / hd, 0.0), 1.0)
                    ue, ve = _dense_eval(u, v, hd, ku, kv, du5, dv5, theta)
                    ts.append(te)
                    us.append(ue)
                    vs.append(ve)
                    next_eval += 1
            t, u, v = t_new, u5, v5
            if record_steps and eval_times is None:
                ts.append(t)
                us.append(u)
                vs.append(v)
            if abs(u) > BLOWUP_LIMIT:
                raise FlowBlowup(f"|u| exceeded {BLOWUP_LIMIT:g} at t = {t}")
            ku[0], kv[0] = ku[6], kv[6]  # stage 7 equals the next first stage
            n_steps += 1
            factor = safety * err**-alpha * err_prev**beta if err > 0 else max_factor
            err_prev = max(err, 1e-10)
            h *= min(max_factor, max(min_factor, factor))
        else:
            h *= max(min_factor, safety * err**-0.2)

    if eval_times is not None:
        while next_eval < len(eval_times):
            # endpoint equals the remaining eval times up to roundoff
            ts.append(eval_times[next_eval])
            us.append(u)
            vs.append(v)
            next_eval += 1
    needs_endpoint = not record_steps and eval_times is None
    if not ts or (needs_endpoint and abs(ts[-1] - t) > 1e-12 * max(1.0, abs(t))):
        ts.append(t)
        us.append(u)
        vs.append(v)
    return _finalize(ts, us, vs, hamiltonian, n_steps)


def _finalize(ts, us, vs, hamiltonian, n_steps) -> OrbitTrace:
    drift = None
    if hamiltonian is not None:
        h_vals = np.array(
            [eval_hamiltonian(hamiltonian, PhaseState(uu, vv)) for uu, vv in zip(us, vs)]
        )
        drift = float(np.max(np.abs(h_vals - h_vals[0])))
    return OrbitTrace(
        tau=np.array(ts), u=np.array(us), v=np.array(vs),
        energy_drift=drift, n_steps=n_steps,
    )


# --- separatrices ---------------------------------------------------------------


@dataclass
class SeparatrixBranch:
    """One invariant-manifold branch launched from a saddle."""

    kind: str  # "unstable" | "stable"
    sign: int
    trace: OrbitTrace
    closed: bool  # returned to within the capture radius of a saddle
    max_energy_error: float


@dataclass
class SeparatrixBundle:
    saddle: Equilibrium
    branches: list[SeparatrixBranch] = field(default_factory=list)

    @property
    def level(self) -> float:
        return self.saddle.energy


def trace_separatrices(
    params: ZoneParameters,
    saddle: Equilibrium,
    arc_budget: float,
    *,
    offset: float = 1e-7,
    tol: float = 1e-10,
    capture_radius: float = 1e-5,
) -> SeparatrixBundle:
    """Trace the four separatrix branches of a saddle.

    Each branch starts offset from the saddle along a stable or unstable
    eigenvector of the linearization and is integrated (backward for stable
    branches) until the arclength budget is spent or the branch returns to
    within ``capture_radius`` of a saddle. Every branch point stays on the
    saddle's energy level to within the integration tolerance.
    """
    if saddle.kind != SADDLE:
        raise ValueError("separatrices emanate from saddles only")
    jac = eval_jacobian(params, saddle.state)
    eigvals, eigvecs = np.linalg.eig(jac)
    order = np.argsort(eigvals.real)
    stable_dir = eigvecs[:, order[0]].real
    unstable_dir = eigvecs[:, order[1]].real
    stable_dir /= np.linalg.norm(stable_dir)
    unstable_dir /= np.linalg.norm(unstable_dir)

    saddles = [e for e in closed_form_equilibria(params) if e.kind == SADDLE]
    h0 = saddle.energy
    bundle = SeparatrixBundle(saddle=saddle)
    x0 = np.array([saddle.state.u, saddle.state.v])

    for kind, direction, tdir in (
        ("unstable", unstable_dir, +1.0),
        ("stable", stable_dir, -1.0),
    ):
        for sign in (+1, -1):
            y = x0 + sign * offset * direction
            pts_t = [0.0]
            pts = [y.copy()]
            t = 0.0
            arclen = 0.0
            closed = False
            left_neighborhood = False
            # integrate in chunks so arclength and capture can be monitored
            chunk = max(arc_budget / 200.0, 1e-3)
            while arclen < arc_budget:
                trace = integrate_orbit(
                    params,
                    PhaseState(y[0], y[1]),
                    (t, t + tdir * chunk),
                    tol,
                )
                new_pts = np.column_stack([trace.u, trace.v])[1:]
                new_ts = trace.tau[1:]
                for row, tt in zip(new_pts, new_ts):
                    seg = float(np.linalg.norm(row - pts[-1]))
                    arclen += seg
                    pts.append(row.copy())
                    pts_t.append(float(tt))
                    dists = [
                        math.hypot(row[0] - s.state.u, _angle_dist(row[1], s.state.v))
                        for s in saddles
                    ]
                    near = min(dists) if dists else math.inf
                    if not left_neighborhood and near > 100.0 * offset + capture_radius:
                        left_neighborhood = True
                    if left_neighborhood and near < capture_radius:
                        closed = True
                        break
                    if arclen >= arc_budget:
                        break
                if closed or len(new_ts) == 0:
                    break
                y = pts[-1]
                t = pts_t[-1]
            arr = np.array(pts)
            energies = np.array(
                [eval_hamiltonian(params, PhaseState(r[0], r[1])) for r in arr]
            )
            branch_trace = OrbitTrace(
                tau=np.array(pts_t), u=arr[:, 0], v=arr[:, 1],
                energy_drift=float(np.max(np.abs(energies - energies[0]))),
            )
            bundle.branches.append(
                SeparatrixBranch(
                    kind=kind,
                    sign=sign,
                    trace=branch_trace,
                    closed=closed,
                    max_energy_error=float(np.max(np.abs(energies - h0))),
                )
            )
    return bundle


def _angle_dist(v1: float, v2: float) -> float:
    d = (v1 - v2) % TWO_PI
    return min(d, TWO_PI - d)


# --- phase portraits (marching squares) -----------------------------------------


@dataclass(frozen=True)
class ContourLevel:
    level: float
    kind: str  # "saddle" | "regular"
    segments: np.ndarray  # (n, 4): x0, y0, x1, y1 with x = v, y = u


@dataclass(frozen=True)
class PhasePortrait:
    window: tuple[float, float, float, float]  # u_min, u_max, v_min, v_max
    levels: tuple[ContourLevel, ...]
    equilibria: tuple[Equilibrium, ...]
    saddle_levels: tuple[float, ...]


_EDGE_LOOKUP = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 5: [(3, 0), (1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)], 10: [(0, 1), (2, 3)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def _marching_squares(values: np.ndarray, xs: np.ndarray, ys: np.ndarray, level: float) -> np.ndarray:
    """Line segments of the iso-contour values == level on a rectilinear grid.

    values has shape (len(ys), len(xs)). Returns (n, 4) segment endpoints.
    Ambiguous saddle cells (cases 5 and 10) are split by the standard
    two-segment rule without midpoint disambiguation.
    """
    f = values - level
    below = f < 0.0
    ny, nx = f.shape
    segs: list[tuple[float, float, float, float]] = []
    # cell corners: 0 = (i, j), 1 = (i, j+1), 2 = (i+1, j+1), 3 = (i+1, j)
    for i in range(ny - 1):
        for j in range(nx - 1):
            idx = 0
            if below[i, j]:
                idx |= 1
            if below[i, j + 1]:
                idx |= 2
            if below[i + 1, j + 1]:
                idx |= 4
            if below[i + 1, j]:
                idx |= 8
            if idx in (0, 15):
                continue
            corners = [
                (xs[j], ys[i], f[i, j]),
                (xs[j + 1], ys[i], f[i, j + 1]),
                (xs[j + 1], ys[i + 1], f[i + 1, j + 1]),
                (xs[j], ys[i + 1], f[i + 1, j]),
            ]

            def edge_point(e: int) -> tuple[float, float]:
                a = corners[e]
                b = corners[(e + 1) % 4]
                fa, fb = a[2], b[2]
                t = 0.5 if fb == fa else fa / (fa - fb)
                t = min(max(t, 0.0), 1.0)
                return a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])

            for e0, e1 in _EDGE_LOOKUP[idx]:
                x0, y0 = edge_point(e0)
                x1, y1 = edge_point(e1)
                segs.append((x0, y0, x1, y1))
    return np.array(segs, dtype=float).reshape(-1, 4)


def sample_phase_portrait(
    params: ZoneParameters,
    window: tuple[float, float],
    n_levels: int,
    *,
    v_range: tuple[float, float] = (0.0, TWO_PI),
    grid: int = 512,
) -> PhasePortrait:
    """Level-set phase portrait of the zone Hamiltonian over a u-window.

    Contours are extracted on a ``grid`` x ``grid`` mesh at every saddle
    energy (exactly) plus ``n_levels`` evenly spaced regular values between
    the extremes of the energy over the window. Output is tagged with the
    equilibria and the saddle levels.
    """
    if n_levels < 3:
        raise ValueError("n_levels must be >= 3")
    u_min, u_max = window
    if not u_min < u_max:
        raise ValueError("window must satisfy u_min < u_max")
    v_min, v_max = v_range
    us = np.linspace(u_min, u_max, grid)
    vs = np.linspace(v_min, v_max, grid)
    vv, uu = np.meshgrid(vs, us)
    poly = params.mu2 * uu**2 / 2.0 + params.b * uu**3 / 3.0 + params.b3 * uu**4 / 4.0
    h_vals = params.p * poly + (params.a + params.mu1 * uu) * np.cos(vv)

    eqs = closed_form_equilibria(params)
    in_window = [
        e
        for e in eqs
        if u_min <= e.state.u <= u_max and v_min <= e.state.v <= v_max
    ]
    saddle_levels = sorted({e.energy for e in in_window if e.kind == SADDLE})

    lo, hi = float(np.min(h_vals)), float(np.max(h_vals))
    regular = [
        lv
        for lv in np.linspace(lo, hi, n_levels + 2)[1:-1]
        if not any(abs(lv - s) < 1e-12 for s in saddle_levels)
    ]
    levels: list[ContourLevel] = []
    for lv in saddle_levels:
        levels.append(ContourLevel(float(lv), SADDLE, _marching_squares(h_vals, vs, us, float(lv))))
    for lv in regular:
        levels.append(ContourLevel(float(lv), "regular", _marching_squares(h_vals, vs, us, float(lv))))
    return PhasePortrait(
        window=(u_min, u_max, v_min, v_max),
        levels=tuple(levels),
        equilibria=tuple(in_window),
        saddle_levels=tuple(float(s) for s in saddle_levels),
    )
