"""Invariant suite behind the ``verify`` command: one named check per module
invariant, each returning pass/fail with a measured detail string.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import perturbations
from .averaging import (
    FrequencyProfile,
    ResonanceClass,
    ResonanceSpec,
    classify_resonance,
    compute_averaged_coefficients,
    degeneracy_order,
    harmonic_reduction,
    verify_hamiltonian_identities,
)
from .diagram import (
    reconnection_residual,
    region_signature,
    trace_reconnection_curve,
)
from .equilibria import (
    SADDLE,
    closed_form_equilibria,
    refine_equilibrium,
)
from .errors import OnCurveError
from .flow import integrate_orbit, sample_phase_portrait, trace_separatrices
from .maps import (
    EulerMapParams,
    StandardMapParams,
    iterate_orbit,
    map_jacobian_det,
    map_step,
    map_step_inverse,
)
from .zone_model import (
    TWO_PI,
    PhaseState,
    ZoneParameters,
    eval_hamiltonian,
    eval_jacobian,
    eval_vector_field,
)

REFERENCE = ZoneParameters(a=2.0, b=1.0, p=1, mu1=1.0, mu2=0.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_states(rng: np.random.Generator, n: int, u_scale: float = 2.0) -> list[PhaseState]:
    return [
        PhaseState(float(u), float(v))
        for u, v in zip(
            rng.uniform(-u_scale, u_scale, n), rng.uniform(0.0, TWO_PI, n)
        )
    ]


def _random_params(rng: np.random.Generator) -> ZoneParameters:
    return ZoneParameters(
        a=2.0, b=1.0, p=1,
        mu1=float(rng.uniform(-3, 3)), mu2=float(rng.uniform(-3, 3)),
    )


def check_field_matches_hamiltonian_gradient(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    h = 1e-6
    for _ in range(10):
        params = _random_params(rng)
        for state in _random_states(rng, 10):
            du, dv = eval_vector_field(params, state)
            dh_dv = (
                eval_hamiltonian(params, PhaseState(state.u, state.v + h))
                - eval_hamiltonian(params, PhaseState(state.u, state.v - h))
            ) / (2 * h)
            dh_du = (
                eval_hamiltonian(params, PhaseState(state.u + h, state.v))
                - eval_hamiltonian(params, PhaseState(state.u - h, state.v))
            ) / (2 * h)
            worst = max(worst, abs(du + dh_dv), abs(dv - dh_du))
    return CheckResult(
        "zone.hamiltonian-consistency", worst < 1e-6, f"max gradient residual {worst:.3e}"
    )


def check_divergence_free(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        params = _random_params(rng)
        for state in _random_states(rng, 10):
            jac = eval_jacobian(params, state)
            worst = max(worst, abs(jac[0, 0] + jac[1, 1]))
    return CheckResult("zone.divergence-free", worst == 0.0, f"max |trace| {worst:.3e}")


def check_angle_periodicity(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    params = _random_params(rng)
    for state in _random_states(rng, 50):
        shifted = PhaseState(state.u, state.v + TWO_PI)
        worst = max(
            worst,
            abs(eval_hamiltonian(params, state) - eval_hamiltonian(params, shifted)),
            max(
                abs(x - y)
                for x, y in zip(
                    eval_vector_field(params, state), eval_vector_field(params, shifted)
                )
            ),
        )
    return CheckResult("zone.periodicity", worst < 1e-12, f"max 2pi-shift gap {worst:.3e}")


def check_time_reversal_symmetry(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    params = _random_params(rng)
    for state in _random_states(rng, 50):
        du, dv = eval_vector_field(params, state)
        du_m, dv_m = eval_vector_field(params, PhaseState(state.u, -state.v))
        worst = max(worst, abs(du_m + du), abs(dv_m - dv))
    return CheckResult("zone.time-reversal", worst < 1e-12, f"max asymmetry {worst:.3e}")


def _reference_spec() -> ResonanceSpec:
    return ResonanceSpec(p=1, q=1, i_pq=1.0, j=2, bj=1.0, bj1=0.0)


def check_quadrature_convergence(seed: int) -> CheckResult:
    pert = perturbations.hamiltonian_cos_wave()
    spec = _reference_spec()
    coarse = compute_averaged_coefficients(pert, spec, 512, v_points=128)
    fine = compute_averaged_coefficients(pert, spec, 1024, v_points=128)
    gap = float(np.max(np.abs(coarse.a0 - fine.a0)))
    return CheckResult("averaging.quadrature-convergence", gap < 1e-10, f"A0 change {gap:.3e}")


def check_mean_split_exactness(seed: int) -> CheckResult:
    pert = perturbations.sin_theta_minus_phi()
    coeffs = compute_averaged_coefficients(pert, _reference_spec(), 256, v_points=128)
    gap = float(np.max(np.abs(coeffs.a0 - (coeffs.a0_tilde + coeffs.b0))))
    return CheckResult("averaging.mean-split", gap < 1e-15, f"reconstruction gap {gap:.3e}")


def check_hamiltonian_identities(seed: int) -> CheckResult:
    pert = perturbations.hamiltonian_cos_wave()
    coeffs = compute_averaged_coefficients(pert, _reference_spec(), 2048, v_points=256)
    report = verify_hamiltonian_identities(coeffs)
    detail = (
        f"identity {report.max_identity_residual:.3e}, "
        f"|B0| {report.b0_abs:.3e}, |B1| {report.b1_abs:.3e}"
    )
    return CheckResult("averaging.hamiltonian-identities", report.passed, detail)


def check_classification_stability(seed: int) -> CheckResult:
    spec = _reference_spec()
    outcomes = []
    for v_points in (128, 256):
        mk = lambda arr: compute_averaged_coefficients(  # noqa: E731
            arr, spec, 256, v_points=v_points
        )
        passable = mk(perturbations.PerturbationSpec(
            f=lambda i, t, p: 0.5 * np.sin(t - p) + 2.0,
            g=lambda i, t, p: np.zeros(np.broadcast(t, p).shape),
        ))
        nonpass = mk(perturbations.sin_theta_minus_phi())
        partial = mk(perturbations.PerturbationSpec(
            f=lambda i, t, p: np.sin(t - p) + 0.5,
            g=lambda i, t, p: np.zeros(np.broadcast(t, p).shape),
        ))
        outcomes.append(
            (
                classify_resonance(passable),
                classify_resonance(nonpass),
                classify_resonance(partial),
            )
        )
    expected = (
        ResonanceClass.PASSABLE,
        ResonanceClass.NON_PASSABLE,
        ResonanceClass.PARTIALLY_PASSABLE,
    )
    ok = all(o == expected for o in outcomes)
    return CheckResult("averaging.classification-stability", ok, f"{outcomes[0]}")


def check_harmonic_amplitude_decay(seed: int) -> CheckResult:
    pert = perturbations.resonant_family(decay=0.6)
    amps = []
    for p in (1, 2, 3, 4):
        spec = ResonanceSpec(p=p, q=1, i_pq=1.0, j=2, bj=1.0, bj1=0.0)
        coeffs = compute_averaged_coefficients(pert, spec, 1024, v_points=128)
        red = harmonic_reduction(coeffs, spec, epsilon=0.0)
        amps.append(abs(red.a_p1))
    ok = all(amps[i] > amps[i + 1] for i in range(len(amps) - 1))
    return CheckResult(
        "averaging.harmonic-decay", ok, "|a_p| = " + ", ".join(f"{a:.4f}" for a in amps)
    )


def _well_separated(params: ZoneParameters, min_delta: float = 1e-6) -> list | None:
    """Closed-form equilibria when the draw is safely off every curve, else None."""
    eqs = closed_form_equilibria(params)
    if any(abs(e.delta) < min_delta for e in eqs):
        return None
    for i in range(len(eqs)):
        for j in range(i + 1, len(eqs)):
            du = eqs[i].state.u - eqs[j].state.u
            dv = abs(eqs[i].state.v - eqs[j].state.v)
            if math.hypot(du, min(dv, TWO_PI - dv)) < 1e-2:
                return None
    return eqs


def check_newton_agreement(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    while checked < 100:
        params = _random_params(rng)
        eqs = _well_separated(params)
        if eqs is None:
            continue
        checked += 1
        for eq in eqs:
            guess = PhaseState(eq.state.u + 1e-3, eq.state.v + 1e-3)
            refined = refine_equilibrium(params, guess)
            dv = abs(refined.state.v - eq.state.v)
            gap = math.hypot(refined.state.u - eq.state.u, min(dv, TWO_PI - dv))
            worst = max(worst, gap)
    return CheckResult("equilibria.newton-agreement", worst < 1e-10, f"max recovered gap {worst:.3e}")


def check_count_parity_on_fold(seed: int) -> CheckResult:
    # v = 0 line: 2 roots left of the fold, 1 double root on it, 0 beyond
    base = dict(a=2.0, b=1.0, p=1, mu2=2.0)
    on = [e for e in closed_form_equilibria(ZoneParameters(mu1=1.0, **base)) if e.state.v == 0.0]
    left = [e for e in closed_form_equilibria(ZoneParameters(mu1=0.9, **base)) if e.state.v == 0.0]
    right = [e for e in closed_form_equilibria(ZoneParameters(mu1=1.1, **base)) if e.state.v == 0.0]
    ok = len(on) == 1 and len(left) == 2 and len(right) == 0
    return CheckResult(
        "equilibria.count-parity", ok, f"counts (on, left, right) = ({len(on)}, {len(left)}, {len(right)})"
    )


def check_fold_pair_is_saddle_center(seed: int) -> CheckResult:
    # the saddle+center character of the merging pair is asymptotic at the
    # fold: probe just inside, below the height where the tangency with the
    # off-axis boundary changes the far-from-fold structure
    rng = np.random.default_rng(seed)
    ok = True
    tried = 0
    while tried < 20:
        mu2 = float(rng.uniform(0.5, 2.2))
        mu1 = mu2 * mu2 / 4.0 - 0.02
        eqs = [
            e
            for e in closed_form_equilibria(ZoneParameters(2.0, 1.0, 1, mu1, mu2))
            if e.state.v == 0.0
        ]
        if len(eqs) != 2:
            continue
        tried += 1
        kinds = sorted(e.kind for e in eqs)
        ok &= kinds == ["center", "saddle"]
    return CheckResult("equilibria.fold-pair-types", ok, "merging pair is saddle + center")


def check_energy_consistency(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        params = _random_params(rng)
        for eq in closed_form_equilibria(params):
            worst = max(worst, abs(eq.energy - eval_hamiltonian(params, eq.state)))
    return CheckResult("equilibria.energy-consistency", worst == 0.0, f"max gap {worst:.3e}")


def check_reconnection_equality(seed: int) -> CheckResult:
    curve = trace_reconnection_curve(1, 2.0, 1.0, [0.3], (2.0, 3.2))
    if not curve.points:
        return CheckResult("diagram.reconnection-equality", False, "no reconnection point found")
    pt = curve.points[0]
    params_lo = ZoneParameters(2.0, 1.0, 1, pt.mu1, pt.mu2 - 0.05)
    params_hi = ZoneParameters(2.0, 1.0, 1, pt.mu1, pt.mu2 + 0.05)
    r_lo = reconnection_residual(params_lo, curve.pair)
    r_hi = reconnection_residual(params_hi, curve.pair)
    ok = abs(pt.residual) < 1e-10 and r_lo * r_hi < 0.0
    return CheckResult(
        "diagram.reconnection-equality",
        ok,
        f"residual {pt.residual:.2e}, sides ({r_lo:+.2e}, {r_hi:+.2e})",
    )


def check_no_off_axis_for_small_mu1(seed: int) -> CheckResult:
    bad = 0
    for mu2 in np.linspace(-10, 10, 201):
        try:
            sig = region_signature(ZoneParameters(2.0, 1.0, 1, 0.01, float(mu2)))
        except OnCurveError:
            continue
        if sig.has_off_axis:
            bad += 1
    return CheckResult(
        "diagram.small-mu1-no-off-axis", bad == 0, f"{bad} off-axis samples on the slice"
    )


def check_signature_determinism(seed: int) -> CheckResult:
    params = ZoneParameters(2.0, 1.0, 1, 0.9, 2.17)
    tokens = {region_signature(params).token() for _ in range(5)}
    return CheckResult("diagram.signature-determinism", len(tokens) == 1, f"{len(tokens)} tokens")


def check_energy_conservation(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        params = _random_params(rng)
        start = PhaseState(float(rng.uniform(-1.5, 1.5)), float(rng.uniform(0, TWO_PI)))
        try:
            trace = integrate_orbit(params, start, (0.0, 100.0), 1e-10)
        except Exception:
            continue
        h0 = eval_hamiltonian(params, start)
        worst = max(worst, (trace.energy_drift or 0.0) / max(1.0, abs(h0)))
    return CheckResult("flow.energy-conservation", worst < 1e-8, f"max relative drift {worst:.3e}")


def check_separatrix_closure(seed: int) -> CheckResult:
    params = REFERENCE  # mu1 = 1, mu2 = 0: saddle at (-1, pi) with homoclinic loop
    saddle = next(e for e in closed_form_equilibria(params) if e.kind == SADDLE)
    bundle = trace_separatrices(params, saddle, arc_budget=40.0)
    closed = [b for b in bundle.branches if b.closed]
    level_ok = all(b.max_energy_error < 1e-7 for b in bundle.branches)
    return CheckResult(
        "flow.separatrix-closure",
        bool(closed) and level_ok,
        f"{len(closed)}/4 branches closed, max level error "
        f"{max(b.max_energy_error for b in bundle.branches):.2e}",
    )


def check_portrait_contracts(seed: int) -> CheckResult:
    params = REFERENCE
    portrait = sample_phase_portrait(params, (-3.0, 3.0), 7, grid=256)
    # every center enclosed by at least one closed regular contour: proxy test,
    # a contour segment ring exists within a small annulus around the center
    centers = [e for e in portrait.equilibria if e.kind == "center"]
    ok = len(portrait.saddle_levels) == 1
    worst = 0.0
    for level in portrait.levels:
        for x0, y0, x1, y1 in level.segments[:: max(1, len(level.segments) // 50)]:
            for (x, y) in ((x0, y0), (x1, y1)):
                value = eval_hamiltonian(params, PhaseState(y, x))
                worst = max(worst, abs(value - level.level))
    # grid-cell Lipschitz bound: field magnitude times cell diagonal
    ok &= worst < 0.5
    ok &= bool(centers)
    return CheckResult(
        "flow.portrait-contracts", ok, f"saddle levels {len(portrait.saddle_levels)}, "
        f"max contour residual {worst:.2e}"
    )


def check_area_preservation(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    specs = [
        StandardMapParams(a=2.0, beta=0.5),
        EulerMapParams(alpha=0.17, zone=REFERENCE),
    ]
    worst_analytic, worst_fd = 0.0, 0.0
    h = 1e-6
    for spec in specs:
        for state in _random_states(rng, 50):
            try:
                det = map_jacobian_det(spec, state)
            except Exception:
                continue
            worst_analytic = max(worst_analytic, abs(det - 1.0))
            cols = []
            for du, dv in ((h, 0.0), (0.0, h)):
                plus = map_step(spec, PhaseState(state.u + du, state.v + dv), wrap=False)
                minus = map_step(spec, PhaseState(state.u - du, state.v - dv), wrap=False)
                cols.append([(plus.u - minus.u) / (2 * h), (plus.v - minus.v) / (2 * h)])
            det_fd = cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]
            worst_fd = max(worst_fd, abs(det_fd - 1.0))
    ok = worst_analytic < 1e-12 and worst_fd < 1e-6
    return CheckResult(
        "maps.area-preservation", ok, f"analytic {worst_analytic:.2e}, fd {worst_fd:.2e}"
    )


def check_invertibility(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for spec in (StandardMapParams(2.0, 0.5), EulerMapParams(0.17, REFERENCE)):
        for state in _random_states(rng, 50):
            forward = map_step(spec, state, wrap=False)
            back = map_step_inverse(spec, forward, wrap=False)
            worst = max(worst, abs(back.u - state.u), abs(back.v - state.v))
    return CheckResult("maps.invertibility", worst < 1e-10, f"max round-trip gap {worst:.3e}")


def check_flow_consistency(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    params = REFERENCE
    states = _random_states(rng, 8, u_scale=1.0)
    errs = []
    for alpha in (0.01, 0.005):
        spec = EulerMapParams(alpha=alpha, zone=params)
        acc = 0.0
        for state in states:
            mapped = map_step(spec, state, wrap=False)
            flowed = integrate_orbit(
                params, state, (0.0, alpha), 1e-12, record_steps=False
            ).final_state()
            acc += (mapped.u - flowed.u) ** 2 + (mapped.v - flowed.v) ** 2
        errs.append(math.sqrt(acc / len(states)))
    order = math.log(errs[0] / errs[1]) / math.log(2.0)
    return CheckResult(
        "maps.flow-consistency", order >= 1.8, f"one-step errors {errs[0]:.2e}/{errs[1]:.2e}, order {order:.2f}"
    )


def check_double_step_composition(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    spec = StandardMapParams(a=2.0, beta=0.5)
    worst = 0.0
    for state in _random_states(rng, 20):
        orbit = iterate_orbit(spec, state, 2 * 7)
        s = state
        for _ in range(7):
            s = map_step(spec, map_step(spec, s, wrap=False), wrap=False)
        worst = max(worst, abs(s.u - orbit.u[-1]), abs(s.v - orbit.v_unwrapped[-1]))
    return CheckResult("maps.double-step-composition", worst < 1e-12, f"max gap {worst:.3e}")


def check_resonance_detection(seed: int) -> CheckResult:
    profile = FrequencyProfile(omega=lambda i: 1.0 + (i - 1.0) ** 2, i_range=(0.0, 2.0), nu=1.0)
    j, bj, bj1 = degeneracy_order(profile, 1.0)
    ok = j == 2 and abs(bj - 1.0) < 1e-8 and abs(bj1) < 1e-8
    return CheckResult("averaging.degeneracy-order", ok, f"j={j}, bj={bj:.6f}, bj1={bj1:.2e}")


def check_single_field_change_per_crossing(seed: int) -> CheckResult:
    # crossing one fold changes only the counts; crossing one off-axis
    # boundary changes only the off-axis flag (and the kind of the merging
    # on-axis point); nothing else moves
    fold_before = region_signature(ZoneParameters(2.0, 1.0, 1, 0.9, 2.0))
    fold_after = region_signature(ZoneParameters(2.0, 1.0, 1, 1.1, 2.0))
    ok = fold_before.has_off_axis == fold_after.has_off_axis
    ok &= fold_before.n_saddles != fold_after.n_saddles or (
        fold_before.n_centers != fold_after.n_centers
    )
    band_before = region_signature(ZoneParameters(2.0, 1.0, 1, 1.0, 1.45))
    band_after = region_signature(ZoneParameters(2.0, 1.0, 1, 1.0, 1.55))
    ok &= band_before.has_off_axis != band_after.has_off_axis
    on_axis = lambda sig: {  # noqa: E731
        lbl for lbl, _ in sig.kinds if lbl not in ("O3", "O4")
    }
    ok &= on_axis(band_before) == on_axis(band_after)
    return CheckResult(
        "diagram.single-field-change", bool(ok), "fold changes counts, boundary flips the flag"
    )


def check_csv_roundtrip(seed: int) -> CheckResult:
    from .io.writers import parse_csv, render_csv

    rng = np.random.default_rng(seed)
    values = [float(x) for x in rng.uniform(-1e3, 1e3, 64)] + [1.0 / 3.0, 2.0**-45]
    text = render_csv(("x",), [(v,) for v in values], {"check": "roundtrip"})
    _, rows, meta = parse_csv(text)
    recovered = [float(r[0]) for r in rows]
    ok = recovered == values and meta.get("check") == "roundtrip"
    return CheckResult("io.csv-roundtrip", ok, f"{len(values)} values binary-identical")


def check_svg_determinism(seed: int) -> CheckResult:
    from .io.svg import render_portrait_svg

    portrait = sample_phase_portrait(REFERENCE, (-2.0, 2.0), 5, grid=96)
    ok = render_portrait_svg(portrait) == render_portrait_svg(portrait)
    return CheckResult("io.svg-determinism", ok, "byte-identical renders")


_ALL_CHECKS: tuple[Callable[[int], CheckResult], ...] = (
    check_field_matches_hamiltonian_gradient,
    check_divergence_free,
    check_angle_periodicity,
    check_time_reversal_symmetry,
    check_quadrature_convergence,
    check_mean_split_exactness,
    check_hamiltonian_identities,
    check_classification_stability,
    check_harmonic_amplitude_decay,
    check_resonance_detection,
    check_newton_agreement,
    check_count_parity_on_fold,
    check_fold_pair_is_saddle_center,
    check_energy_consistency,
    check_reconnection_equality,
    check_no_off_axis_for_small_mu1,
    check_signature_determinism,
    check_single_field_change_per_crossing,
    check_csv_roundtrip,
    check_svg_determinism,
    check_energy_conservation,
    check_separatrix_closure,
    check_portrait_contracts,
    check_area_preservation,
    check_invertibility,
    check_flow_consistency,
    check_double_step_composition,
)

_FAST_SKIP = {"check_separatrix_closure", "check_energy_conservation"}


def run_all(seed: int = 0, fast: bool = False) -> list[CheckResult]:
    results = []
    for check in _ALL_CHECKS:
        if fast and check.__name__ in _FAST_SKIP:
            continue
        results.append(check(seed))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name.ljust(width)}  {status}  {r.detail}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
