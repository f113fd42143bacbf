"""Global structure of the (mu1, mu2) parameter plane: saddle energy levels,
the reconnection condition between saddles, traced reconnection curves,
region signatures, flood-fill region decomposition, and transition
classification.

Region identity is defined by a computable signature (equilibrium labels and
kinds, off-axis flag, saddle-energy order), not by any external numbering:
every bifurcation curve flips at least one signature field, so connected
components of equal-signature nodes are exactly the open regions between
curves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import ndimage

from .equilibria import (
    CENTER,
    DELTA_TOL,
    SADDLE,
    Equilibrium,
    closed_form_equilibria,
    curve_m3_mu2,
    curve_m4_mu2,
    curve_m5_mu2,
    off_axis_cosine,
)
from .errors import MissingSaddleError, OnCurveError
from .zone_model import ZoneParameters

ENERGY_TIE_TOL = 1e-9
CURVE_MARGIN = 1e-6

LOOPS = "LOOPS"
VORTEX_PAIRS = "VORTEX_PAIRS"
CODIM2_A = "CODIM2_A"
LOCAL = "LOCAL"
INCONSISTENT = "INCONSISTENT"


@dataclass(frozen=True)
class RegionSignature:
    """Computable proxy for a parameter-plane region.

    saddle_energy_order lists the saddle labels with their energies sorted
    ascending; energy_ties lists label pairs equal at tolerance. The
    vortex-pair flag mirrors has_off_axis.
    """

    n_saddles: int
    n_centers: int
    has_off_axis: bool
    kinds: tuple[tuple[str, str], ...]  # (label, kind), label-sorted
    saddle_energy_order: tuple[tuple[str, float], ...]
    energy_ties: tuple[tuple[str, str], ...]

    @property
    def vortex_pair_flag(self) -> bool:
        return self.has_off_axis

    def token(self) -> tuple:
        """Hashable region identity: everything except raw energy values."""
        return (
            self.n_saddles,
            self.n_centers,
            self.has_off_axis,
            self.kinds,
            tuple(label for label, _ in self.saddle_energy_order),
            self.energy_ties,
        )

    def differs_only_in_energy_order(self, other: "RegionSignature") -> bool:
        return (
            self.n_saddles == other.n_saddles
            and self.n_centers == other.n_centers
            and self.has_off_axis == other.has_off_axis
            and self.kinds == other.kinds
            and self.token() != other.token()
        )


@dataclass(frozen=True)
class CurveSamples:
    curve_id: str
    points: tuple[tuple[float, float], ...]
    pair: tuple[str, str] | None = None
    end_markers: tuple[str, str] = ("window", "window")


@dataclass(frozen=True)
class ParameterPlaneDiagram:
    a: float
    b: float
    p: int
    window: tuple[float, float, float, float]  # mu1_min, mu1_max, mu2_min, mu2_max
    analytic_curves: tuple[CurveSamples, ...]
    reconnection_curves: tuple[CurveSamples, ...]
    region_samples: tuple[tuple[tuple[float, float], RegionSignature], ...]

    @property
    def component_count(self) -> int:
        return len(self.region_samples)


# --- saddle energies and the reconnection residual ---------------------------


def saddle_energy_levels(params: ZoneParameters) -> list[tuple[Equilibrium, float]]:
    """All saddles with their energies, sorted by u."""
    saddles = [e for e in closed_form_equilibria(params) if e.kind == SADDLE]
    saddles.sort(key=lambda e: e.state.u)
    return [(e, e.energy) for e in saddles]


def reconnection_residual(params: ZoneParameters, pair: tuple[str, str]) -> float:
    """Energy difference h1 - h2 between two labeled saddles.

    Raises
    ------
    MissingSaddleError
        When either labeled point does not exist or is not a saddle here.
    """
    by_label = {e.label: e for e in closed_form_equilibria(params)}
    values = []
    for label in pair:
        eq = by_label.get(label)
        if eq is None or eq.kind != SADDLE:
            raise MissingSaddleError(f"no saddle labeled {label} at mu1={params.mu1}, mu2={params.mu2}")
        values.append(eq.energy)
    return values[0] - values[1]


DEFAULT_PAIR = ("O1+", "O2-")


def default_saddle_pair(params: ZoneParameters) -> tuple[str, str] | None:
    """(lowest-u, highest-u) among on-axis saddles, or None if fewer than 2."""
    on_axis = [
        (e, h)
        for e, h in saddle_energy_levels(params)
        if e.label.startswith(("O1", "O2"))
    ]
    if len(on_axis) < 2:
        return None
    return on_axis[0][0].label, on_axis[-1][0].label


@dataclass(frozen=True)
class ReconnectionSlice:
    mu1: float
    mu2: float
    residual: float


@dataclass(frozen=True)
class ReconnectionCurve:
    pair: tuple[str, str]
    points: tuple[ReconnectionSlice, ...]
    skipped: tuple[tuple[float, str], ...]  # (mu1, reason)

    def as_samples(self) -> CurveSamples:
        return CurveSamples(
            curve_id="m6",
            points=tuple((p.mu1, p.mu2) for p in self.points),
            pair=self.pair,
        )


def trace_reconnection_curve(
    p: int,
    a: float,
    b: float,
    mu1_grid: Iterable[float],
    mu2_bracket: tuple[float, float],
    pair: tuple[str, str] = DEFAULT_PAIR,
    *,
    residual_tol: float = 1e-10,
    b3: float = 0.0,
    coarse_probes: int = 64,
    fine_probes: int = 64,
) -> ReconnectionCurve:
    """Per-mu1 bisection for the saddle-energy equality between a labeled pair.

    Each mu1 column is scanned twice: a coarse pass locates the mu2 windows
    where both saddles exist, a fine pass inside each window brackets every
    sign change, and bisection refines each to |residual| < ``residual_tol``.
    A column can hold several equality points (all are returned, sorted).
    Columns where a saddle never exists or the residual never changes sign
    are omitted and recorded with an explicit marker.
    """
    points: list[ReconnectionSlice] = []
    skipped: list[tuple[float, str]] = []
    lo, hi = float(mu2_bracket[0]), float(mu2_bracket[1])
    for mu1 in mu1_grid:
        mu1 = float(mu1)

        def res(mu2: float) -> float | None:
            try:
                return reconnection_residual(ZoneParameters(a, b, p, mu1, mu2, b3), pair)
            except MissingSaddleError:
                return None

        # saddle existence/type changes happen exactly on the analytic
        # curves: probing just inside them catches windows narrower than the
        # uniform spacing (they pinch to zero at curve tangencies)
        template = ZoneParameters(a, b, p, 0.0, 0.0, b3)
        boundary_nodes: list[float] = []
        for mu2_c in (
            curve_m3_mu2(template, mu1)
            + curve_m4_mu2(template, mu1)
            + curve_m5_mu2(template, mu1, +1)
            + curve_m5_mu2(template, mu1, -1)
        ):
            for off in (-1e-7, 1e-7):
                node = mu2_c + off * max(1.0, abs(mu2_c))
                if lo < node < hi:
                    boundary_nodes.append(node)
        coarse = np.sort(np.concatenate([np.linspace(lo, hi, coarse_probes + 1), boundary_nodes]))
        coarse_vals = [res(m2) for m2 in coarse]
        if all(v is None for v in coarse_vals):
            skipped.append((mu1, "MISSING_SADDLE"))
            continue
        # contiguous existence windows on the coarse grid, padded a node
        windows: list[tuple[float, float]] = []
        start = None
        for i, val in enumerate(coarse_vals):
            if val is not None and start is None:
                start = max(0, i - 1)
            if val is None and start is not None:
                windows.append((float(coarse[start]), float(coarse[i])))
                start = None
        if start is not None:
            windows.append((float(coarse[start]), float(coarse[-1])))

        roots: list[float] = []
        for w_lo, w_hi in windows:
            fine = np.linspace(w_lo, w_hi, fine_probes + 1)
            vals = [res(m2) for m2 in fine]
            for i in range(fine_probes):
                va, vb = vals[i], vals[i + 1]
                if va is None or vb is None:
                    continue
                if not (va == 0.0 or va * vb < 0.0):
                    continue
                blo, bhi, flo = float(fine[i]), float(fine[i + 1]), va
                for _ in range(200):
                    mid = 0.5 * (blo + bhi)
                    fm = res(mid)
                    if fm is None:  # saddle died inside: keep the live side
                        bhi = mid
                        continue
                    if flo * fm <= 0.0:
                        bhi = mid
                    else:
                        blo, flo = mid, fm
                    if bhi - blo < 1e-15 * max(1.0, abs(blo)):
                        break
                mu2_star = 0.5 * (blo + bhi)
                r = res(mu2_star)
                if r is not None and abs(r) <= residual_tol:
                    roots.append(mu2_star)
        if not roots:
            skipped.append((mu1, "NO_SIGN_CHANGE"))
            continue
        for mu2_star in sorted(roots):
            points.append(
                ReconnectionSlice(mu1=mu1, mu2=mu2_star, residual=float(res(mu2_star)))
            )
    return ReconnectionCurve(pair=pair, points=tuple(points), skipped=tuple(skipped))


# --- region signatures --------------------------------------------------------


def region_signature(
    params: ZoneParameters,
    *,
    margin: float = CURVE_MARGIN,
    energy_tol: float = ENERGY_TIE_TOL,
) -> RegionSignature:
    """Signature of the parameter point, assembled from the closed-form
    equilibria and saddle energies.

    Raises
    ------
    OnCurveError
        When the point is within ``margin`` of a bifurcation curve in the
        curve-defining functions (fold discriminants, off-axis cosine), or an
        equilibrium is degenerate at tolerance.
    """
    a, b, p, mu1, mu2 = params.a, params.b, params.p, params.mu1, params.mu2
    disc0 = mu2 * mu2 - 4.0 * b * mu1 / p
    disc_pi = mu2 * mu2 + 4.0 * b * mu1 / p
    if abs(disc0) < margin or abs(disc_pi) < margin:
        raise OnCurveError(f"within margin of a fold curve at ({mu1}, {mu2})")
    cos_v = off_axis_cosine(params)
    if math.isfinite(cos_v) and abs(abs(cos_v) - 1.0) < margin:
        raise OnCurveError(f"within margin of the off-axis boundary at ({mu1}, {mu2})")
    eqs = closed_form_equilibria(params)
    if any(e.kind not in (SADDLE, CENTER) for e in eqs):
        raise OnCurveError(f"degenerate equilibrium at ({mu1}, {mu2})")
    saddles = sorted(
        [e for e in eqs if e.kind == SADDLE], key=lambda e: (e.energy, e.label)
    )
    ties = []
    for i in range(len(saddles)):
        for j in range(i + 1, len(saddles)):
            if abs(saddles[i].energy - saddles[j].energy) <= energy_tol:
                ties.append(tuple(sorted((saddles[i].label, saddles[j].label))))
    return RegionSignature(
        n_saddles=len(saddles),
        n_centers=sum(1 for e in eqs if e.kind == CENTER),
        has_off_axis=any(e.label in ("O3", "O4") for e in eqs),
        kinds=tuple(sorted((e.label, e.kind) for e in eqs)),
        saddle_energy_order=tuple((e.label, e.energy) for e in saddles),
        energy_ties=tuple(sorted(set(ties))),
    )


# --- vectorized signature grid + flood fill -----------------------------------

_LBL = ("O1+", "O1-", "O2+", "O2-", "O3")  # O3 stands for the off-axis pair


def _signature_token_grid(
    a: float,
    b: float,
    p: int,
    mu1: np.ndarray,
    mu2: np.ndarray,
    *,
    delta_tol: float = DELTA_TOL,
    energy_tol: float = ENERGY_TIE_TOL,
    margin: float = CURVE_MARGIN,
) -> np.ndarray:
    """Integer token per grid node; -1 marks nodes on/near a curve.

    Encodes, per label: absent/saddle/center, plus sign tokens of all
    pairwise saddle energy differences. Any curve crossing changes the token:
    folds change presence, the off-axis boundary flips the pair flag and one
    on-axis kind, reconnections flip an energy comparison.
    """
    disc0 = mu2 * mu2 - 4.0 * b * mu1 / p
    disc_pi = mu2 * mu2 + 4.0 * b * mu1 / p
    with np.errstate(invalid="ignore", divide="ignore"):
        r0 = np.sqrt(np.where(disc0 > 0, disc0, np.nan))
        rpi = np.sqrt(np.where(disc_pi > 0, disc_pi, np.nan))
        roots = {
            "O1+": (-mu2 + r0) / (2 * b),
            "O1-": (-mu2 - r0) / (2 * b),
            "O2+": (-mu2 + rpi) / (2 * b),
            "O2-": (-mu2 - rpi) / (2 * b),
        }
        u0 = np.where(mu1 != 0, -a / np.where(mu1 != 0, mu1, 1.0), np.nan)
        cos_v0 = (p * a / mu1**2) * (mu2 - a * b / mu1)
        off = (mu1 != 0) & (np.abs(cos_v0) <= 1.0)

        def on_axis(u, cos_sign):
            delta = -p * (2 * b * u + mu2) * (a + mu1 * u) * cos_sign
            h = p * (mu2 * u * u / 2 + b * u**3 / 3) + (a + mu1 * u) * cos_sign
            return delta, h

        deltas, energies = {}, {}
        for lbl, cs in (("O1+", 1.0), ("O1-", 1.0), ("O2+", -1.0), ("O2-", -1.0)):
            deltas[lbl], energies[lbl] = on_axis(roots[lbl], cs)
        sin2 = 1.0 - np.clip(cos_v0, -1.0, 1.0) ** 2
        deltas["O3"] = -(mu1 * mu1) * sin2
        energies["O3"] = p * (mu2 * u0 * u0 / 2 + b * u0**3 / 3)

    present = {
        "O1+": disc0 >= 0,
        "O1-": disc0 >= 0,
        "O2+": disc_pi >= 0,
        "O2-": disc_pi >= 0,
        "O3": off,
    }
    excl = (np.abs(disc0) < margin) | (np.abs(disc_pi) < margin)
    with np.errstate(invalid="ignore"):
        excl |= (mu1 != 0) & (np.abs(np.abs(cos_v0) - 1.0) < margin)

    token = np.zeros(mu1.shape, dtype=np.int64)
    kinds = {}
    for lbl in _LBL:
        d = deltas[lbl]
        k = np.zeros(mu1.shape, dtype=np.int64)
        k[present[lbl] & (d < -delta_tol)] = 1
        k[present[lbl] & (d > delta_tol)] = 2
        excl |= present[lbl] & (np.abs(d) <= delta_tol)
        kinds[lbl] = k
        token = token * 3 + k
    for i in range(len(_LBL)):
        for j in range(i + 1, len(_LBL)):
            li, lj = _LBL[i], _LBL[j]
            both = (kinds[li] == 1) & (kinds[lj] == 1)
            with np.errstate(invalid="ignore"):
                diff = energies[li] - energies[lj]
                near = both & (np.abs(diff) <= energy_tol)
                cmp = np.where(both & (diff > energy_tol), 1,
                               np.where(both & (diff < -energy_tol), 2, 0))
            excl |= near  # a tie between distinct saddle levels sits on m6
            token = token * 3 + cmp
    return np.where(excl, np.int64(-1), token)


@dataclass(frozen=True)
class RegionDecomposition:
    mu1_grid: np.ndarray
    mu2_grid: np.ndarray
    labels: np.ndarray  # component index per node, -1 excluded
    samples: tuple[tuple[tuple[float, float], RegionSignature], ...]

    @property
    def count(self) -> int:
        return len(self.samples)


def find_regions(
    a: float,
    b: float,
    p: int,
    window: tuple[float, float, float, float],
    *,
    grid: tuple[int, int] = (901, 901),
    min_cells: int = 4,
) -> RegionDecomposition:
    """Flood-fill decomposition of the window into equal-signature components.

    8-connectivity on equal tokens (every curve changes the token, so no
    leakage; 4-connectivity would split razor-thin diagonal regions). Grids
    spanning mu2 = 0 get a node row pinned at exactly 0 so regions touching
    only at the origin pinch are kept apart. Components below ``min_cells``
    nodes are grid noise and dropped.
    """
    mu1_lo, mu1_hi, mu2_lo, mu2_hi = window
    n1, n2 = grid
    g1 = np.linspace(mu1_lo, mu1_hi, n1)
    g2 = np.linspace(mu2_lo, mu2_hi, n2)
    if mu2_lo < 0.0 < mu2_hi and not np.any(g2 == 0.0):
        g2 = np.sort(np.append(g2, 0.0))
    if mu1_lo < 0.0 < mu1_hi and not np.any(g1 == 0.0):
        g1 = np.sort(np.append(g1, 0.0))
    m1, m2 = np.meshgrid(g1, g2, indexing="ij")
    tokens = _signature_token_grid(a, b, p, m1, m2)

    labels = np.full(tokens.shape, -1, dtype=np.int64)
    samples: list[tuple[tuple[float, float], RegionSignature]] = []
    structure = np.ones((3, 3), dtype=int)
    next_label = 0
    for tok in np.unique(tokens):
        if tok < 0:
            continue
        mask = tokens == tok
        lab, n = ndimage.label(mask, structure=structure)
        for comp in range(1, n + 1):
            comp_mask = lab == comp
            size = int(comp_mask.sum())
            if size < min_cells:
                continue
            idx = np.argwhere(comp_mask)
            mid = idx[len(idx) // 2]
            point = (float(m1[tuple(mid)]), float(m2[tuple(mid)]))
            try:
                sig = region_signature(ZoneParameters(a, b, p, point[0], point[1]))
            except OnCurveError:
                # fall back to any interior node of the component
                sig = None
                for alt in idx[:: max(1, len(idx) // 50)]:
                    try:
                        point = (float(m1[tuple(alt)]), float(m2[tuple(alt)]))
                        sig = region_signature(ZoneParameters(a, b, p, point[0], point[1]))
                        break
                    except OnCurveError:
                        continue
                if sig is None:
                    continue
            labels[comp_mask] = next_label
            samples.append((point, sig))
            next_label += 1
    return RegionDecomposition(
        mu1_grid=g1, mu2_grid=g2, labels=labels, samples=tuple(samples)
    )


# --- transition classification --------------------------------------------------


@dataclass(frozen=True)
class CrossingEvent:
    """Where a parameter path crossed something: a curve id ('m3', 'm4',
    'm5+', 'm5-', 'm6') and the crossing point."""

    curve: str
    mu1: float
    mu2: float


def classify_transition(
    before: RegionSignature,
    after: RegionSignature,
    crossing: CrossingEvent,
    *,
    params_template: ZoneParameters | None = None,
    codim2_tol: float = 1e-6,
) -> str:
    """Scenario of a single-curve transition between two region signatures.

    LOOPS: saddle-energy order flips with no count change. VORTEX_PAIRS: the
    off-axis flag flips. CODIM2_A: the crossing point satisfies an off-axis
    boundary branch and a reconnection equality simultaneously. LOCAL:
    vertical/horizontal event passthrough. INCONSISTENT when the signatures
    differ in ways no single crossing explains.
    """
    if before.token() == after.token() and crossing.curve != "m6":
        raise ValueError("signatures are identical and the crossing is not a reconnection")
    if params_template is not None:
        pars = ZoneParameters(
            params_template.a, params_template.b, params_template.p,
            crossing.mu1, crossing.mu2, params_template.b3,
        )
        cos_v = off_axis_cosine(pars)
        on_m5 = math.isfinite(cos_v) and abs(abs(cos_v) - 1.0) < codim2_tol
        if on_m5:
            # On an off-axis boundary the reconnection residual between the
            # on-axis saddle and the off-axis level degenerates to the energy
            # gap of the fold pair, which vanishes exactly when the fold
            # discriminant does; both conditions holding marks the
            # codimension-2 point.
            disc0 = pars.mu2**2 - 4.0 * pars.b * pars.mu1 / pars.p
            disc_pi = pars.mu2**2 + 4.0 * pars.b * pars.mu1 / pars.p
            if min(abs(disc0), abs(disc_pi)) < 10.0 * codim2_tol:
                return CODIM2_A
    order_flip = before.differs_only_in_energy_order(after)
    if order_flip and before.n_saddles == after.n_saddles:
        return LOOPS
    if before.has_off_axis != after.has_off_axis:
        return VORTEX_PAIRS
    if crossing.curve in ("m3", "m4", "m5+", "m5-"):
        counts_changed = (
            before.n_saddles != after.n_saddles or before.n_centers != after.n_centers
        )
        if counts_changed:
            return LOCAL
    return INCONSISTENT


# --- diagram assembly -----------------------------------------------------------


def _sample_analytic_curves(
    a: float, b: float, p: int, window: tuple[float, float, float, float], n: int = 600
) -> list[CurveSamples]:
    mu1_lo, mu1_hi, mu2_lo, mu2_hi = window
    params = ZoneParameters(a, b, p, 0.0, 0.0)
    grid = np.linspace(mu1_lo, mu1_hi, n)
    out: list[CurveSamples] = []

    def clip(points):
        return tuple(
            (m1, m2) for m1, m2 in points if mu2_lo <= m2 <= mu2_hi
        )

    for curve_id, func in (("m3", curve_m3_mu2), ("m4", curve_m4_mu2)):
        upper, lower = [], []
        for mu1 in grid:
            vals = func(params, float(mu1))
            if vals:
                upper.append((float(mu1), max(vals)))
                lower.append((float(mu1), min(vals)))
        for branch in (upper, lower):
            pts = clip(branch)
            if len(pts) >= 2:
                out.append(CurveSamples(curve_id=curve_id, points=pts))
    for curve_id, sign in (("m5+", +1), ("m5-", -1)):
        for side in (grid[grid < 0], grid[grid > 0]):
            pts = []
            for mu1 in side:
                vals = curve_m5_mu2(params, float(mu1), sign)
                if vals:
                    pts.append((float(mu1), vals[0]))
            pts = clip(pts)
            if len(pts) >= 2:
                out.append(CurveSamples(curve_id=curve_id, points=pts))
    return out


# saddle pairs that can meet in energy somewhere: on-axis pair, and each
# on-axis label against the off-axis level
_RECONNECTION_PAIRS = (
    ("O1+", "O2-"), ("O1-", "O2-"), ("O1+", "O1-"), ("O2+", "O2-"),
    ("O1+", "O3"), ("O1-", "O3"), ("O2+", "O3"), ("O2-", "O3"),
)


def _chain_slices(
    slices: tuple[ReconnectionSlice, ...], mu1_step: float, mu2_jump: float
) -> list[list[ReconnectionSlice]]:
    """Chain per-column equality points into polyline runs by proximity.

    Columns can hold several roots (distinct branches of the same pair); a
    point continues the run whose tail is one column back and nearest in mu2
    within the jump threshold, otherwise it starts a new run.
    """
    runs: list[list[ReconnectionSlice]] = []
    for pt in slices:
        best = None
        best_gap = mu2_jump
        for run in runs:
            tail = run[-1]
            if 0.0 < pt.mu1 - tail.mu1 <= 1.5 * mu1_step:
                gap = abs(pt.mu2 - tail.mu2)
                if gap <= best_gap:
                    best, best_gap = run, gap
        if best is None:
            runs.append([pt])
        else:
            best.append(pt)
    return runs


def build_parameter_diagram(
    p: int,
    a: float,
    b: float,
    window: tuple[float, float, float, float] = (-3.0, 3.0, -3.5, 3.5),
    *,
    grid: tuple[int, int] = (601, 701),
    curve_points: int = 600,
    trace_mu1_points: int = 240,
) -> ParameterPlaneDiagram:
    """Assemble the full parameter-plane diagram over a bounded window.

    Analytic fold and off-axis boundary branches are sampled directly;
    reconnection curves are traced by per-mu1 bisection for every saddle
    pair whose energy difference changes sign along the mu1 column; regions
    come from the flood-fill decomposition with one signature sample per
    component. Tracing failures leave curve gaps, never abort assembly.
    """
    mu1_lo, mu1_hi, mu2_lo, mu2_hi = window
    analytic = _sample_analytic_curves(a, b, p, window, n=curve_points)

    recon: list[CurveSamples] = []
    mu1_grid = np.linspace(mu1_lo, mu1_hi, trace_mu1_points)
    mu1_step = float(mu1_grid[1] - mu1_grid[0])
    mu2_jump = 0.05 * (mu2_hi - mu2_lo)
    for pair in _RECONNECTION_PAIRS:
        curve = trace_reconnection_curve(p, a, b, mu1_grid, (mu2_lo, mu2_hi), pair)
        for run in _chain_slices(curve.points, mu1_step, mu2_jump):
            if len(run) < 2:
                continue

            mu2_edge = 2.0 * (mu2_hi - mu2_lo) / 64.0

            def marker(pt: ReconnectionSlice) -> str:
                at_edge = (
                    abs(pt.mu1 - mu1_lo) < 0.5 * mu1_step
                    or abs(pt.mu1 - mu1_hi) < 0.5 * mu1_step
                    or abs(pt.mu2 - mu2_lo) < mu2_edge
                    or abs(pt.mu2 - mu2_hi) < mu2_edge
                )
                return "window" if at_edge else "terminated"

            recon.append(
                CurveSamples(
                    curve_id="m6",
                    points=tuple((q.mu1, q.mu2) for q in run),
                    pair=pair,
                    end_markers=(marker(run[0]), marker(run[-1])),
                )
            )

    decomposition = find_regions(a, b, p, window, grid=grid)
    return ParameterPlaneDiagram(
        a=a,
        b=b,
        p=p,
        window=window,
        analytic_curves=tuple(analytic),
        reconnection_curves=tuple(recon),
        region_samples=decomposition.samples,
    )
