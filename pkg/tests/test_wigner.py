import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qarrival.states import GridSpec, prob_negative_axis, to_grid
from qarrival.twotime import SIGNS, infinity_norm_distance, quasi_probability
from qarrival.wigner import (PhaseSpaceFunction, ResolutionError, classical_kernel_W, kernel_W,
                             kernel_W_printed, q_via_phase_space, quantum_step_curve,
                             trace_with_symbol, weyl_symbol_of_projector, wigner_of_state)

coords = st.floats(-20, 20).filter(lambda v: abs(v) > 1e-9)
taus = st.floats(0.05, 10)


@given(coords, st.floats(-20, 20), taus)
def test_kernels_resolve_the_identity(X, p, tau):
    total = sum(kernel_W(a, b, X, p, tau) for a in SIGNS for b in SIGNS)
    assert total == pytest.approx(1 / (2 * math.pi), abs=1e-15)


@given(coords, st.floats(-20, 20), taus, st.sampled_from(SIGNS))
def test_kernel_marginals_are_projector_symbols(X, p, tau, s):
    Xt = X + p * tau
    first = sum(weyl_symbol_of_projector(s, b, X, p, tau) for b in SIGNS)
    second = sum(weyl_symbol_of_projector(a, s, X, p, tau) for a in SIGNS)
    assert first == pytest.approx(float(s * X > 0), abs=1e-15)
    if abs(Xt) > 1e-9:
        assert second == pytest.approx(float(s * Xt > 0), abs=1e-15)


def test_printed_unequal_sign_kernel_breaks_the_identity():
    X, p, tau = 0.7, -0.2, 1.0
    total = sum(kernel_W_printed(a, b, X, p, tau) for a in SIGNS for b in SIGNS)
    assert abs(total - 1 / (2 * math.pi)) > 1e-2


def test_classical_limit_of_the_kernel():
    tau = 1.0
    for X, p in [(30.0, 5.0), (-30.0, 80.0), (25.0, -70.0), (-40.0, -3.0)]:
        u = 2 * X * (X + p * tau) / tau
        for a in SIGNS:
            for b in SIGNS:
                gap = abs(kernel_W(a, b, X, p, tau) - classical_kernel_W(a, b, X, p, tau))
                assert gap < 1 / abs(u)


def test_quantum_step_curve_rows():
    rows = quantum_step_curve(-5, 5, 11)
    assert rows[5] == (0.0, 0.5)
    assert len(rows) == 11


@pytest.fixture(scope="module")
def state():
    from qarrival.analytic import TwoGaussianConfig
    cfg = TwoGaussianConfig(2.5, 1.0, 1.0, phi=0.9, theta=2.4)
    return cfg, cfg.state()


def test_wigner_function_marginals(state):
    _, st_ = state
    X = np.linspace(-12, 12, 241)
    p = np.linspace(-8, 8, 321)
    W = wigner_of_state(st_, X, p)
    assert W.integral() == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(W.position_marginal() - np.abs(st_(X)) ** 2)) < 1e-8


def test_grid_wigner_matches_closed_form(state):
    _, st_ = state
    spec = GridSpec(20.0, 2**11)
    psi = to_grid(st_, spec)
    X = spec.x[::64]
    p = np.linspace(-3, 3, 25)
    a = wigner_of_state(psi, X, p)
    b = wigner_of_state(st_, a.X, p)
    assert np.max(np.abs(a.values - b.values)) < 1e-9


def test_grid_wigner_refuses_coarse_grids(state):
    _, st_ = state
    psi = to_grid(st_, GridSpec(20.0, 2**7), edge_tol=1.0, norm_tol=1.0)
    with pytest.raises(ResolutionError):
        wigner_of_state(psi, [0.0], [0.0])


def test_phase_space_q_matches_engine(state):
    cfg, st_ = state
    ps = q_via_phase_space(st_, 0.0, cfg.tau)
    eng = quasi_probability(st_, 0.0, cfg.tau, refine_tol=1e-7)
    assert infinity_norm_distance(ps, eng) < 1e-6


def test_phase_space_q_on_a_lattice(state):
    cfg, st_ = state
    spec = GridSpec(20.0, 2**11)
    psi = to_grid(st_, spec)
    X = spec.x[(np.abs(spec.x) < 10)]
    p = np.linspace(-7, 7, 281)
    lat = q_via_phase_space(psi, 0.0, cfg.tau, lattice=(X, p))
    ref = q_via_phase_space(st_, 0.0, cfg.tau)
    assert infinity_norm_distance(lat, ref) < 5e-3
    with pytest.raises(ValueError):
        q_via_phase_space(psi, 0.0, cfg.tau)


def test_trace_with_projector_symbol(state):
    _, st_ = state
    val = trace_with_symbol(st_, lambda X, p: (X > 0).astype(float), t=0.4)
    assert val == pytest.approx(1 - prob_negative_axis(st_, 0.4), abs=1e-12)


def test_phase_space_function_shape_check():
    with pytest.raises(ValueError):
        PhaseSpaceFunction(np.zeros(3), np.zeros(4), np.zeros((4, 3)))
