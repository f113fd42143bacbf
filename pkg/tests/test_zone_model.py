import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TWO_PI, random_states, random_zone_params
from rezone import (
    GeneralAveragedModel,
    PhaseState,
    ZoneParameters,
    eval_general_field,
    eval_hamiltonian,
    eval_reduced_hamiltonian,
    eval_vector_field,
)
from rezone.zone_model import eval_jacobian


def test_hamiltonian_at_origin_is_forcing_amplitude():
    params = ZoneParameters(a=2.0, b=1.0, p=1, mu1=0.0, mu2=0.0)
    assert eval_hamiltonian(params, PhaseState(0.0, 0.0)) == 2.0


def test_hamiltonian_hand_value():
    # u^3/3 + (a + mu1*u)*cos(pi) = 1/3 - 3 = -8/3
    params = ZoneParameters(a=2.0, b=1.0, p=1, mu1=1.0, mu2=0.0)
    value = eval_hamiltonian(params, PhaseState(1.0, math.pi))
    assert value == pytest.approx(-8.0 / 3.0, abs=1e-15)


def test_hamiltonian_even_in_angle():
    rng = np.random.default_rng(7)
    params = random_zone_params(rng)
    for state in random_states(rng, 50):
        mirrored = PhaseState(state.u, TWO_PI - state.v)
        assert eval_hamiltonian(params, state) == pytest.approx(
            eval_hamiltonian(params, mirrored), abs=1e-12
        )


def test_field_hand_value():
    params = ZoneParameters(a=2.0, b=1.0, p=1, mu1=0.0, mu2=0.0)
    du, dv = eval_vector_field(params, PhaseState(0.0, math.pi / 2))
    assert du == pytest.approx(2.0, abs=1e-15)
    assert dv == pytest.approx(0.0, abs=1e-15)


def test_field_vanishes_at_closed_form_equilibria():
    from rezone import closed_form_equilibria

    rng = np.random.default_rng(3)
    for _ in range(20):
        params = random_zone_params(rng)
        for eq in closed_form_equilibria(params):
            du, dv = eval_vector_field(params, eq.state)
            assert math.hypot(du, dv) < 1e-12


def test_field_matches_hamiltonian_finite_differences():
    rng = np.random.default_rng(11)
    h = 1e-6
    for k in range(4):
        params = random_zone_params(rng)
        if k == 0:  # cubic frequency term participates in the pairing too
            params = ZoneParameters(
                params.a, params.b, params.p, params.mu1, params.mu2, b3=0.3
            )
        for state in random_states(rng, 25):
            du, dv = eval_vector_field(params, state)
            dh_dv = (
                eval_hamiltonian(params, PhaseState(state.u, state.v + h))
                - eval_hamiltonian(params, PhaseState(state.u, state.v - h))
            ) / (2 * h)
            dh_du = (
                eval_hamiltonian(params, PhaseState(state.u + h, state.v))
                - eval_hamiltonian(params, PhaseState(state.u - h, state.v))
            ) / (2 * h)
            assert du == pytest.approx(-dh_dv, abs=1e-6)
            assert dv == pytest.approx(dh_du, abs=1e-6)


@given(
    u=st.floats(-5, 5),
    v=st.floats(0, 2 * math.pi),
    mu1=st.floats(-3, 3),
    mu2=st.floats(-3, 3),
)
@settings(max_examples=60, deadline=None)
def test_jacobian_trace_exactly_zero(u, v, mu1, mu2):
    params = ZoneParameters(a=2.0, b=1.0, p=1, mu1=mu1, mu2=mu2)
    jac = eval_jacobian(params, PhaseState(u, v))
    assert jac[0, 0] + jac[1, 1] == 0.0


@given(
    u=st.floats(-5, 5),
    v=st.floats(-10, 10),
    mu1=st.floats(-3, 3),
    mu2=st.floats(-3, 3),
)
@settings(max_examples=60, deadline=None)
def test_period_and_reversal_symmetries(u, v, mu1, mu2):
    params = ZoneParameters(a=2.0, b=1.0, p=1, mu1=mu1, mu2=mu2)
    state = PhaseState(u, v)
    shifted = PhaseState(u, v + TWO_PI)
    assert eval_hamiltonian(params, state) == pytest.approx(
        eval_hamiltonian(params, shifted), abs=1e-11
    )
    du, dv = eval_vector_field(params, state)
    du_m, dv_m = eval_vector_field(params, PhaseState(u, -v))
    assert du_m == pytest.approx(-du, abs=1e-12)
    assert dv_m == pytest.approx(dv, abs=1e-12)


def test_zone_parameters_validation():
    with pytest.raises(ValueError):
        ZoneParameters(a=2.0, b=0.0, p=1, mu1=0.0, mu2=0.0)
    with pytest.raises(ValueError):
        ZoneParameters(a=2.0, b=1.0, p=0, mu1=0.0, mu2=0.0)


def test_state_wrapping_reports_canonical_angle():
    state = PhaseState(1.0, 7.0)
    assert 0.0 <= state.wrapped().v < TWO_PI
    assert state.wrapped().v == pytest.approx(7.0 - TWO_PI)


# --- reduced Hamiltonian -------------------------------------------------------


def _model(j=2, bj=1.0, bj1=0.0, eps=0.0, p=1, deformation=()):
    return GeneralAveragedModel(
        j=j, bj=bj, bj1=bj1,
        a0=lambda v: 0.0, p0=lambda v: 0.0, q0=lambda v: 0.0,
        epsilon=eps, p=p, deformation=deformation,
    )


def test_reduced_hamiltonian_matches_zone_hamiltonian():
    # j = 2, eps = 0, deformation b1 = mu2: identical to the zone model with mu1 = 0
    mu2 = 0.7
    model = _model(j=2, bj=1.0, deformation=(mu2,))
    zone = ZoneParameters(a=2.0, b=1.0, p=1, mu1=0.0, mu2=mu2)
    rng = np.random.default_rng(5)
    for state in random_states(rng, 30):
        reduced = eval_reduced_hamiltonian(model, (2.0, 0.0, 0.0), state)
        assert reduced == pytest.approx(eval_hamiltonian(zone, state), abs=1e-13)


def test_reduced_hamiltonian_at_zero_action_deviation():
    model = _model(j=2, bj=1.0, p=2)
    for v in np.linspace(0, TWO_PI, 17):
        value = eval_reduced_hamiltonian(model, (3.0, 0.0, 0.0), PhaseState(0.0, float(v)))
        assert value == pytest.approx(1.5 * math.cos(2 * v), abs=1e-13)


def test_reduced_hamiltonian_hand_value_cubic_order():
    # j = 3, leading coefficient 1, amplitude 1, p = 2, eps = 0 at (1, 0):
    # u^4/4 + (1/2) cos(0) = 0.75
    model = _model(j=3, bj=1.0, p=2)
    value = eval_reduced_hamiltonian(model, (1.0, 0.0, 0.0), PhaseState(1.0, 0.0))
    assert value == pytest.approx(0.75, abs=1e-15)


def test_reduced_hamiltonian_rejects_identity_violation():
    model = _model()
    with pytest.raises(ValueError):
        eval_reduced_hamiltonian(model, (1.0, 1.0, 2.0), PhaseState(0.5, 0.5))


# --- general field --------------------------------------------------------------


def test_general_field_first_approximation():
    model = GeneralAveragedModel(
        j=2, bj=1.0, bj1=0.0,
        a0=math.sin, p0=lambda v: 0.0, q0=lambda v: 0.0,
        epsilon=1.0,
    )
    du, dv = eval_general_field(model, PhaseState(0.7, 1.1))
    assert du == pytest.approx(math.sin(1.1), abs=1e-15)
    assert dv == pytest.approx(0.49, abs=1e-15)


def test_general_field_vanishes_at_zero_epsilon():
    model = GeneralAveragedModel(
        j=2, bj=1.0, bj1=0.5,
        a0=math.sin, p0=math.cos, q0=math.sin,
        epsilon=0.0,
    )
    assert eval_general_field(model, PhaseState(1.0, 1.0)) == (0.0, 0.0)


def test_general_field_matches_zone_field_after_rescaling():
    # harmonic coefficients sin(pv)/cos(pv): the general system in slow time
    # with the angle rescaled to w = p*v equals the zone field with
    # mu1 = eps^(1/3) * c and mu2 = 0
    rng = np.random.default_rng(9)
    p, a, b, c = 2, 1.3, 0.8, 0.9
    eps = 1e-3
    d = c / p
    model = GeneralAveragedModel(
        j=2, bj=b, bj1=0.0,
        a0=lambda v: a * math.sin(p * v),
        p0=lambda v: c * math.sin(p * v),
        q0=lambda v: d * math.cos(p * v),
        epsilon=eps, p=p,
    )
    s = 1.0 / 3.0
    zone = ZoneParameters(a=a, b=b, p=p, mu1=eps**s * c, mu2=0.0)
    for state in random_states(rng, 100):
        u, v = state.u, state.v
        du_fast, dv_fast = eval_general_field(model, PhaseState(u, v))
        # slow time tau = eps^(1-s) t, rescaled angle w = p v
        du_slow = du_fast / eps ** (1 - s)
        dw_slow = p * dv_fast / eps ** (1 - s)
        du_zone, dw_zone = eval_vector_field(zone, PhaseState(u, p * v))
        assert du_slow == pytest.approx(du_zone, abs=1e-12)
        assert dw_slow == pytest.approx(dw_zone, abs=1e-12)
