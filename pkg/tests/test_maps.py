import math

import numpy as np
import pytest

from conftest import TWO_PI, random_states
from rezone import (
    EulerMapParams,
    PhaseState,
    StandardMapParams,
    ZoneParameters,
    approximating_hamiltonian,
    closed_form_equilibria,
    integrate_orbit,
    iterate_orbit,
    map_jacobian_det,
    map_step,
    map_step_inverse,
    rotation_number,
    trace_manifolds,
)
from rezone.errors import NonRealMultipliersError, SingularDenominatorError
from rezone.maps import t2_zone_parameters, t_zone_parameters


def euler_spec(alpha=0.17, mu1=1.0, mu2=0.0):
    return EulerMapParams(alpha=alpha, zone=ZoneParameters(2.0, 1.0, 1, mu1, mu2))


# --- stepping -------------------------------------------------------------------


def test_standard_map_integrable_limit():
    spec = StandardMapParams(a=0.0, beta=0.5)
    state = PhaseState(0.8, 1.0)
    out = map_step(spec, state)
    assert out.u == 0.8
    assert out.v == pytest.approx((1.0 + 0.8 - 0.5 * 0.64) % TWO_PI, abs=1e-15)


def test_standard_map_fixed_points():
    beta = 0.4
    spec = StandardMapParams(a=1.0, beta=beta)
    for u, v in [(0.0, 0.0), (0.0, math.pi), (1 / beta, 0.0), (1 / beta, math.pi)]:
        out = map_step(spec, PhaseState(u, v))
        assert out.u == pytest.approx(u, abs=1e-12)
        assert (out.v - v) % TWO_PI == pytest.approx(0.0, abs=1e-12)


def test_euler_map_orbits_stay_finite_at_reference_step():
    # representative parameter sets from the derived region table: an
    # off-axis (vortex-pair) domain and a plain two-saddle domain
    for mu1, mu2 in ((1.0, 2.1), (0.5, 1.9)):
        spec = euler_spec(alpha=0.17, mu1=mu1, mu2=mu2)
        orbit = iterate_orbit(spec, PhaseState(0.1, 0.1), 10_000)
        assert np.all(np.isfinite(orbit.u))
        assert np.all(np.isfinite(orbit.v_unwrapped))


def test_euler_map_singular_denominator_rejected():
    spec = euler_spec(alpha=0.5, mu1=2.0)  # alpha*mu1 = 1: denominator hits 0
    with pytest.raises(SingularDenominatorError):
        map_step(spec, PhaseState(0.0, math.pi / 2))


def test_singular_denominator_reports_failing_index():
    spec = euler_spec(alpha=0.5, mu1=2.0)
    with pytest.raises(SingularDenominatorError) as err:
        iterate_orbit(spec, PhaseState(0.0, math.pi / 2), 5)
    assert err.value.index == 1


# --- area preservation ------------------------------------------------------------


@pytest.mark.parametrize(
    "spec",
    [StandardMapParams(a=2.0, beta=0.5), euler_spec(0.17, 1.0, 0.0)],
    ids=["standard", "euler"],
)
def test_unit_jacobian_determinant(spec):
    rng = np.random.default_rng(31)
    h = 1e-6
    for state in random_states(rng, 100):
        det = map_jacobian_det(spec, state)
        assert abs(det - 1.0) < 1e-12
        cols = []
        for du, dv in ((h, 0.0), (0.0, h)):
            plus = map_step(spec, PhaseState(state.u + du, state.v + dv), wrap=False)
            minus = map_step(spec, PhaseState(state.u - du, state.v - dv), wrap=False)
            cols.append(((plus.u - minus.u) / (2 * h), (plus.v - minus.v) / (2 * h)))
        det_fd = cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]
        assert abs(det_fd - 1.0) < 1e-6


def test_jacobian_det_near_singularity_raises_not_fabricates():
    zone = ZoneParameters(2.0, 1.0, 1, 1.0, 0.0)
    spec = EulerMapParams(alpha=1.0, zone=zone)
    v = math.asin((1.0 - 1e-13) / 1.0)  # denominator ~ 1e-13
    with pytest.raises(SingularDenominatorError):
        map_jacobian_det(spec, PhaseState(0.0, v))


# --- orbits and inverses ------------------------------------------------------------


def test_fixed_point_orbit_is_constant():
    spec = StandardMapParams(a=1.0, beta=0.4)
    orbit = iterate_orbit(spec, PhaseState(0.0, 0.0), 50)
    assert np.max(np.abs(orbit.u)) < 1e-12
    assert np.max(np.abs(orbit.v_unwrapped)) < 1e-12


def test_zero_forcing_keeps_action_constant():
    spec = StandardMapParams(a=0.0, beta=0.3)
    orbit = iterate_orbit(spec, PhaseState(0.7, 0.3), 200)
    assert np.max(np.abs(orbit.u - 0.7)) == 0.0


def test_orbit_equals_composed_double_steps():
    spec = StandardMapParams(a=2.0, beta=0.5)
    rng = np.random.default_rng(5)
    for state in random_states(rng, 10):
        k = 6
        orbit = iterate_orbit(spec, state, 2 * k)
        s = state
        for _ in range(k):
            s = map_step(spec, map_step(spec, s, wrap=False), wrap=False)
        assert abs(s.u - orbit.u[-1]) < 1e-12
        assert abs(s.v - orbit.v_unwrapped[-1]) < 1e-12


@pytest.mark.parametrize(
    "spec",
    [StandardMapParams(a=2.0, beta=0.5), euler_spec(0.17, 1.0, 0.5)],
    ids=["standard", "euler"],
)
def test_inverse_round_trip(spec):
    rng = np.random.default_rng(13)
    for state in random_states(rng, 50):
        forward = map_step(spec, state, wrap=False)
        back = map_step_inverse(spec, forward, wrap=False)
        assert abs(back.u - state.u) < 1e-10
        assert abs(back.v - state.v) < 1e-10


def test_implicit_form_agrees_with_recast_form():
    # solving u' = u + alpha*(a + mu1*u')*sin(v) by fixed-point iteration
    # reproduces the explicit division form
    spec = euler_spec(0.17, 1.0, 0.5)
    z, al = spec.zone, spec.alpha
    rng = np.random.default_rng(3)
    for state in random_states(rng, 50):
        u_new = state.u
        for _ in range(200):
            u_new = state.u + al * (z.a + z.mu1 * u_new) * math.sin(state.v)
        explicit = map_step(spec, state, wrap=False)
        assert abs(u_new - explicit.u) < 1e-12


# --- approximating Hamiltonians ------------------------------------------------------


def test_first_iterate_hamiltonian_values():
    assert approximating_hamiltonian("T", 1.7, 0.5, PhaseState(0.0, 0.0)) == 1.7
    val = approximating_hamiltonian("T", 2.0, 0.5, PhaseState(1.0, math.pi))
    assert val == pytest.approx(0.5 - 0.5 / 3.0 - 2.0, abs=1e-15)


def test_second_iterate_hamiltonian_on_vortex_axis():
    a, beta = 2.0, 0.5
    u = 1.0 / (2.0 * beta)
    core = u * u / 2.0 - beta * u**3 / 3.0
    for v in np.linspace(0, TWO_PI, 9):
        val = approximating_hamiltonian("T2", a, beta, PhaseState(u, float(v)))
        assert val == pytest.approx(core, abs=1e-14)


def test_second_iterate_reduces_to_core_without_forcing():
    rng = np.random.default_rng(1)
    for state in random_states(rng, 20):
        t2 = approximating_hamiltonian("T2", 0.0, 0.7, state)
        core = state.u**2 / 2 - 0.7 * state.u**3 / 3
        assert t2 == pytest.approx(core, abs=1e-15)


def test_t_structure_has_no_off_axis_points_ever():
    for a in (0.5, 1.0, 2.0, 4.0):
        for beta in (0.1, 0.5, 1.0, 2.0):
            labels = {e.label for e in closed_form_equilibria(t_zone_parameters(a, beta))}
            assert "O3" not in labels and "O4" not in labels


def test_t2_structure_admits_off_axis_points_on_expected_axis():
    a, beta = 2.0, 1.0  # beta*a >= sqrt(2): off-axis pair exists
    eqs = {e.label: e for e in closed_form_equilibria(t2_zone_parameters(a, beta))}
    assert {"O3", "O4"} <= set(eqs)
    assert eqs["O3"].state.u == pytest.approx(1.0 / (2.0 * beta), abs=1e-12)


# --- rotation numbers ------------------------------------------------------------------


def test_rotation_number_rigid_case_exact():
    beta = 0.4
    spec = StandardMapParams(a=0.0, beta=beta)
    for u0 in (0.3, 0.9, 1.7):
        est = rotation_number(spec, PhaseState(u0, 0.5), 2000)
        assert est.value == pytest.approx((u0 - beta * u0 * u0) / TWO_PI, abs=1e-12)
        assert est.tail_gap < 1e-12


def test_rotation_function_is_nonmonotone_with_interior_maximum():
    beta = 0.4
    spec = StandardMapParams(a=0.0, beta=beta)
    us = np.linspace(0.2, 2.2, 21)
    rhos = [rotation_number(spec, PhaseState(float(u), 0.0), 1000).value for u in us]
    peak = us[int(np.argmax(rhos))]
    assert peak == pytest.approx(1.0 / (2.0 * beta), abs=0.11)
    assert rhos[0] < max(rhos) and rhos[-1] < max(rhos)


def test_rotation_number_zero_at_fixed_point():
    spec = StandardMapParams(a=1.0, beta=0.4)
    est = rotation_number(spec, PhaseState(0.0, 0.0), 1000)
    assert est.value == 0.0


def test_rotation_number_needs_enough_iterates():
    with pytest.raises(ValueError):
        rotation_number(StandardMapParams(1.0, 0.4), PhaseState(0.1, 0.1), 10)


# --- flow consistency -------------------------------------------------------------------


def test_euler_map_one_step_error_is_second_order():
    params = ZoneParameters(2.0, 1.0, 1, 1.0, 0.0)
    rng = np.random.default_rng(7)
    states = random_states(rng, 6, u_scale=1.0)
    errors = []
    for alpha in (0.01, 0.005):
        spec = EulerMapParams(alpha=alpha, zone=params)
        acc = 0.0
        for state in states:
            stepped = map_step(spec, state, wrap=False)
            flowed = integrate_orbit(
                params, state, (0.0, alpha), 1e-12, record_steps=False
            ).final_state()
            acc += (stepped.u - flowed.u) ** 2 + (stepped.v - flowed.v) ** 2
        errors.append(math.sqrt(acc / len(states)))
    order = math.log(errors[0] / errors[1]) / math.log(2.0)
    assert order >= 1.8


# --- invariant manifolds -----------------------------------------------------------------


def _growth_iterations(multiplier: float, offset: float = 1e-7, target: float = 8.0) -> int:
    return int(math.log(target / offset) / math.log(abs(multiplier))) + 2


def test_manifold_multipliers_on_unit_hyperbola():
    spec = StandardMapParams(a=0.4, beta=0.4)
    bundle = trace_manifolds(spec, PhaseState(0.0, 0.0), segment_iterations=10)
    lam, lam_inv = bundle.multipliers
    assert lam * lam_inv == pytest.approx(1.0, abs=1e-10)
    assert abs(lam) > 1.0


def test_manifolds_reject_elliptic_point():
    spec = StandardMapParams(a=0.4, beta=0.4)
    with pytest.raises(NonRealMultipliersError):
        trace_manifolds(spec, PhaseState(0.0, math.pi), segment_iterations=4)


def test_splitting_indicator_decreases_with_forcing():
    indicators = []
    for a in (0.4, 0.2, 0.1):
        spec = StandardMapParams(a=a, beta=0.4)
        trace = 0.5 * (2.0 + a + math.sqrt((2.0 + a) ** 2 - 4.0))
        bundle = trace_manifolds(
            spec,
            PhaseState(0.0, 0.0),
            segment_iterations=_growth_iterations(trace),
            seed_points=300,
            refine_gap=1e-3,
        )
        indicators.append(bundle.splitting_indicator)
    assert indicators[0] > indicators[1] > indicators[2]


def test_euler_manifold_segment_stays_near_energy_level():
    # the map manifold hugs the flow separatrix level; the deviation shrinks
    # with the approximation step
    zone = ZoneParameters(2.0, 1.0, 1, 1.0, 0.0)
    saddle = next(e for e in closed_form_equilibria(zone) if e.kind == "saddle")
    from rezone import eval_hamiltonian

    deviations = []
    for alpha in (0.2, 0.1):
        spec = EulerMapParams(alpha=alpha, zone=zone)
        lam = 1.0 + alpha * math.sqrt(-saddle.delta)
        bundle = trace_manifolds(
            spec,
            saddle.state,
            segment_iterations=_growth_iterations(lam, target=2.0),
            seed_points=64,
            refine_gap=5e-2,
        )
        worst = 0.0
        for branch in bundle.unstable:
            for u, v in branch:
                if abs(u - saddle.state.u) > 3.0:
                    continue
                worst = max(
                    worst, abs(eval_hamiltonian(zone, PhaseState(u, v)) - saddle.energy)
                )
        deviations.append(worst)
    assert deviations[1] < deviations[0]
    assert deviations[1] < 10.0 * 0.1  # calibrated O(alpha) bound
