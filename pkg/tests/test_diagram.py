import math

import numpy as np
import pytest

from rezone import (
    ZoneParameters,
    build_parameter_diagram,
    classify_transition,
    find_regions,
    reconnection_residual,
    region_signature,
    saddle_energy_levels,
    trace_reconnection_curve,
)
from rezone.diagram import (
    CODIM2_A,
    LOCAL,
    LOOPS,
    VORTEX_PAIRS,
    CrossingEvent,
    default_saddle_pair,
)
from rezone.errors import MissingSaddleError, OnCurveError

P1 = dict(a=2.0, b=1.0, p=1)


def zp(mu1, mu2):
    return ZoneParameters(mu1=mu1, mu2=mu2, **P1)


# --- saddle energies -------------------------------------------------------------


def test_saddle_levels_two_saddle_case():
    levels = saddle_energy_levels(zp(0.0, 1.0))
    assert [(e.label, h) for e, h in levels] == [
        ("O2-", pytest.approx(-11.0 / 6.0, abs=1e-14)),
        ("O1+", pytest.approx(2.0, abs=1e-14)),
    ]


def test_saddle_levels_single_saddle_case():
    levels = saddle_energy_levels(zp(1.0, 0.0))
    assert len(levels) == 1
    eq, h = levels[0]
    assert eq.label == "O2-"
    assert h == pytest.approx(-4.0 / 3.0, abs=1e-14)


def test_saddle_levels_off_axis_only_region():
    params = zp(2.5, 0.2)
    labels = [e.label for e, _ in saddle_energy_levels(params)]
    assert labels == ["O3", "O4"]


def test_saddle_levels_empty_without_hyperbolic_points():
    # zero forcing degenerates every closed-form point: no saddles at all
    params = ZoneParameters(a=0.0, b=1.0, p=1, mu1=0.0, mu2=1.0)
    assert saddle_energy_levels(params) == []


# --- reconnection residual ---------------------------------------------------------


def test_residual_missing_saddle_error():
    with pytest.raises(MissingSaddleError):
        reconnection_residual(zp(0.0, 0.0), ("O1+", "O2-"))


def test_residual_zero_for_symmetric_pair():
    params = zp(2.0, 1.0)
    assert reconnection_residual(params, ("O3", "O4")) == 0.0


def test_residual_value_and_sign_stability():
    params = zp(0.3, 1.5)
    value = reconnection_residual(params, ("O1+", "O2-"))
    levels = dict()
    for eq, h in saddle_energy_levels(params):
        levels[eq.label] = h
    assert value == pytest.approx(levels["O1+"] - levels["O2-"], abs=1e-15)
    for eps in (1e-8, -1e-8):
        shifted = reconnection_residual(zp(0.3 + eps, 1.5 + eps), ("O1+", "O2-"))
        assert math.copysign(1.0, shifted) == math.copysign(1.0, value)


def test_default_pair_is_extreme_on_axis_saddles():
    assert default_saddle_pair(zp(0.0, 1.0)) == ("O2-", "O1+")
    assert default_saddle_pair(zp(1.0, 0.0)) is None


# --- curve tracing --------------------------------------------------------------------


def test_traced_point_satisfies_equality():
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.3], (2.0, 3.2))
    assert len(curve.points) == 1
    pt = curve.points[0]
    assert abs(pt.residual) < 1e-10
    check = reconnection_residual(zp(pt.mu1, pt.mu2), curve.pair)
    assert abs(check) < 1e-10


def test_traced_curve_is_continuous():
    mu1s = np.linspace(0.1, 0.5, 17)
    curve = trace_reconnection_curve(1, 2.0, 1.0, mu1s, (2.0, 3.2))
    assert len(curve.points) == len(mu1s)
    mu2s = [pt.mu2 for pt in curve.points]
    grid_step = float(mu1s[1] - mu1s[0])
    for a, b in zip(mu2s, mu2s[1:]):
        assert abs(b - a) < 10 * grid_step


def test_trace_approaches_axis_limit():
    # independent dense-scan oracle at small mu1
    mu1 = 0.01
    grid = np.linspace(2.5, 3.2, 3001)
    vals = [reconnection_residual(zp(mu1, m2), ("O1+", "O2-")) for m2 in grid]
    sign_flip = next(
        i for i in range(len(grid) - 1) if vals[i] * vals[i + 1] < 0
    )
    oracle = 0.5 * (grid[sign_flip] + grid[sign_flip + 1])
    curve = trace_reconnection_curve(1, 2.0, 1.0, [mu1], (2.0, 3.2))
    assert curve.points[0].mu2 == pytest.approx(oracle, abs=1e-3)
    # the mu1 -> 0 layer tends to the symmetric-case value 24^(1/3); the
    # curve leaves the axis with slope O(1), hence the O(mu1) window
    assert curve.points[0].mu2 == pytest.approx(24.0 ** (1.0 / 3.0), abs=1e-2)


def test_trace_records_no_sign_change():
    # both saddles exist on (1.3, 1.8) at mu1 = 0.3 but the equality sits
    # higher, so the slice is skipped with the explicit marker
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.3], (1.3, 1.8))
    assert curve.points == ()
    assert curve.skipped == ((0.3, "NO_SIGN_CHANGE"),)


def test_trace_records_missing_saddle():
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.3], (0.1, 0.5))
    assert curve.points == ()
    assert curve.skipped == ((0.3, "MISSING_SADDLE"),)


# --- region signatures ------------------------------------------------------------------


def test_signature_single_saddle_region():
    sig = region_signature(zp(1.0, 0.0))
    assert (sig.n_saddles, sig.n_centers, sig.has_off_axis) == (1, 1, False)
    assert sig.vortex_pair_flag is False


def test_signature_four_point_region():
    sig = region_signature(zp(0.0, 1.0))
    assert (sig.n_saddles, sig.n_centers, sig.has_off_axis) == (2, 2, False)
    assert [lbl for lbl, _ in sig.saddle_energy_order] == ["O2-", "O1+"]


def test_signature_off_axis_region():
    # strictly inside the off-axis existence condition
    params = zp(2.0, 1.0)
    assert abs(
        (P1["p"] * P1["a"] / params.mu1**2) * (params.mu2 - P1["a"] * P1["b"] / params.mu1)
    ) < 1.0
    sig = region_signature(params)
    assert sig.has_off_axis is True
    assert ("O3", "O4") in sig.energy_ties


def test_signature_on_curve_rejected():
    with pytest.raises(OnCurveError):
        region_signature(zp(1.0, 2.0))  # exactly on the v=0 fold


def test_signature_deterministic():
    tokens = {region_signature(zp(0.9, 2.17)).token() for _ in range(10)}
    assert len(tokens) == 1


# --- transitions ------------------------------------------------------------------------


def test_transition_loops():
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.3], (2.0, 3.2))
    mu2_star = curve.points[0].mu2
    before = region_signature(zp(0.3, mu2_star - 0.05))
    after = region_signature(zp(0.3, mu2_star + 0.05))
    scenario = classify_transition(
        before, after, CrossingEvent("m6", 0.3, mu2_star)
    )
    assert scenario == LOOPS


def test_transition_vortex_pairs():
    # crossing the off-axis boundary m5- at mu1 = 1: mu2 = 2 - 0.5
    before = region_signature(zp(1.0, 1.45))
    after = region_signature(zp(1.0, 1.55))
    assert before.has_off_axis != after.has_off_axis
    scenario = classify_transition(before, after, CrossingEvent("m5-", 1.0, 1.5))
    assert scenario == VORTEX_PAIRS


def test_transition_codim2_point():
    # the tangency of the v=0 fold with the off-axis boundary:
    # mu1 = 4^(1/3), mu2 = 16^(1/3)
    mu1_a, mu2_a = 4.0 ** (1 / 3), 16.0 ** (1 / 3)
    before = region_signature(zp(mu1_a - 0.03, mu2_a - 0.05))
    after = region_signature(zp(mu1_a + 0.03, mu2_a + 0.05))
    scenario = classify_transition(
        before,
        after,
        CrossingEvent("m6", mu1_a, mu2_a),
        params_template=zp(0.0, 0.0),
    )
    assert scenario == CODIM2_A


def test_transition_local_fold():
    before = region_signature(zp(0.9, 2.0))
    after = region_signature(zp(1.1, 2.0))
    scenario = classify_transition(before, after, CrossingEvent("m3", 1.0, 2.0))
    assert scenario == LOCAL


# --- flood-fill regions -------------------------------------------------------------------


def test_signature_field_changes_once_per_crossing():
    # crossing only the v=0 fold changes the counts, not the off-axis flag
    before = region_signature(zp(0.9, 2.0))
    after = region_signature(zp(1.1, 2.0))
    assert before.has_off_axis == after.has_off_axis
    assert before.n_saddles != after.n_saddles or before.n_centers != after.n_centers
    # crossing only the v=pi fold: same structure on the other line
    before = region_signature(zp(-0.9, 2.0))
    after = region_signature(zp(-1.1, 2.0))
    assert before.has_off_axis == after.has_off_axis
    assert (before.n_saddles + before.n_centers) != (after.n_saddles + after.n_centers)
    # crossing only an off-axis boundary flips the flag and nothing about
    # the on-axis labels present
    before = region_signature(zp(1.0, 1.45))
    after = region_signature(zp(1.0, 1.55))
    assert before.has_off_axis != after.has_off_axis
    on_axis_before = {lbl for lbl, _ in before.kinds if not lbl.startswith("O3") and not lbl.startswith("O4")}
    on_axis_after = {lbl for lbl, _ in after.kinds if not lbl.startswith("O3") and not lbl.startswith("O4")}
    assert on_axis_before == on_axis_after
    # crossing only the reconnection curve flips the energy order alone
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.25], (2.0, 3.4))
    pt = curve.points[0]
    before = region_signature(zp(pt.mu1, pt.mu2 - 0.04))
    after = region_signature(zp(pt.mu1, pt.mu2 + 0.04))
    assert before.differs_only_in_energy_order(after)


def test_regions_upper_reference_window():
    decomposition = find_regions(2.0, 1.0, 1, (-3.0, 3.0, 0.0, 3.5), grid=(601, 351))
    assert decomposition.count == 12
    tokens = [sig.token() for _, sig in decomposition.samples]
    assert len(set(tokens)) == 12


def test_regions_full_reference_window():
    decomposition = find_regions(2.0, 1.0, 1, (-3.0, 3.0, -3.5, 3.5), grid=(601, 701))
    assert decomposition.count == 20


def test_regions_spec_window_documented_counts():
    # the [-3,3]x[0,3] window cuts off the all-points domain that only exists
    # for mu2 above (16*(1+sqrt(2)))^(1/3) ~ 3.383, hence 11 not 12
    upper = find_regions(2.0, 1.0, 1, (-3.0, 3.0, 0.0, 3.0), grid=(601, 301))
    assert upper.count == 11
    full = find_regions(2.0, 1.0, 1, (-3.0, 3.0, -3.0, 3.0), grid=(601, 601))
    assert full.count == 18


def test_region_samples_lie_off_curves():
    decomposition = find_regions(2.0, 1.0, 1, (-3.0, 3.0, 0.0, 3.5), grid=(301, 176))
    for (mu1, mu2), _ in decomposition.samples:
        region_signature(zp(mu1, mu2))  # does not raise OnCurveError


_MIRROR_LABEL = {"O1+": "O2-", "O1-": "O2+", "O2+": "O1-", "O2-": "O1+", "O3": "O3", "O4": "O4"}


def _mirror_token(sig):
    # the point reflection (u, v, mu1, mu2) -> (-u, v + pi, -mu1, -mu2) maps
    # the system onto itself, swapping the angle lines (O1+- <-> O2-+) and
    # negating the energy (order reverses; tied labels stay label-sorted)
    kinds = tuple(sorted((_MIRROR_LABEL[lbl], kind) for lbl, kind in sig.kinds))
    order = [_MIRROR_LABEL[lbl] for lbl, _ in reversed(sig.saddle_energy_order)]
    ties = tuple(sorted(tuple(sorted(_MIRROR_LABEL[x] for x in tie)) for tie in sig.energy_ties))
    for a, b in ties:
        if a in order and b in order:
            i, j = sorted((order.index(a), order.index(b)))
            if j == i + 1:
                order[i], order[j] = sorted((order[i], order[j]))
    return (sig.n_saddles, sig.n_centers, sig.has_off_axis, kinds, tuple(order), ties)


def test_mirror_symmetry_of_full_window_signatures():
    rng = np.random.default_rng(19)
    checked = 0
    while checked < 40:
        mu1 = float(rng.uniform(-3, 3))
        mu2 = float(rng.uniform(0.05, 3.5))
        try:
            upper = region_signature(zp(mu1, mu2))
            lower = region_signature(zp(-mu1, -mu2))
        except OnCurveError:
            continue
        checked += 1
        assert _mirror_token(upper) == lower.token()


# --- full diagram -----------------------------------------------------------------------


def test_build_parameter_diagram_structure():
    diagram = build_parameter_diagram(
        1, 2.0, 1.0, (-3.0, 3.0, 0.0, 3.5),
        grid=(301, 176), curve_points=200, trace_mu1_points=80,
    )
    ids = {c.curve_id for c in diagram.analytic_curves}
    assert ids == {"m3", "m4", "m5+", "m5-"}
    assert diagram.reconnection_curves, "reconnection curves must be traced"
    assert all(c.curve_id == "m6" for c in diagram.reconnection_curves)
    assert diagram.component_count == 12
    for curve in diagram.reconnection_curves:
        for mu1, mu2 in curve.points[:: max(1, len(curve.points) // 10)]:
            residual = reconnection_residual(zp(mu1, mu2), curve.pair)
            assert abs(residual) < 1e-10


def test_diagram_reconnection_separates_loops_regions():
    diagram = build_parameter_diagram(
        1, 2.0, 1.0, (-3.0, 3.0, 0.0, 3.5),
        grid=(301, 176), curve_points=200, trace_mu1_points=80,
    )
    curve = next(
        c for c in diagram.reconnection_curves if c.pair == ("O1+", "O2-") and len(c.points) > 5
    )
    mu1, mu2 = curve.points[len(curve.points) // 2]
    before = region_signature(zp(mu1, mu2 - 0.04))
    after = region_signature(zp(mu1, mu2 + 0.04))
    assert before.differs_only_in_energy_order(after)
