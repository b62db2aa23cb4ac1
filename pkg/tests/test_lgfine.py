import numpy as np
import pytest
from hypothesis import given, strategies as st

from qarrival.lgfine import (PreconditionError, TSIRELSON_FLOOR, c22_window, disturbance_kernel,
                             fine_construct, lg_check)
from qarrival.scenarios import random_admissible_pair
from qarrival.twotime import SIGNS, MomentSet, TwoTimeTable, quasi_probability, \
    sequential_probability, table_from_moments


@given(st.integers(0, 2**32 - 1), st.sampled_from(["max", "midpoint"]))
def test_fine_construction_on_admissible_sets(seed, choice):
    q, p12 = random_admissible_pair(np.random.default_rng(seed))
    triple = fine_construct(q, p12, choice)
    assert triple.status == "constructed"
    assert min(triple.values.values()) >= 0
    assert sum(triple.values.values()) == pytest.approx(1.0, abs=1e-14)
    mu, md, ml = triple.marginal_undisturbed(), triple.marginal_disturbed(), triple.marginal_link()
    for k in q.values:
        assert mu[k] == pytest.approx(q[k], abs=1e-12)
        assert md[k] == pytest.approx(p12[k], abs=1e-12)
        assert ml[k] >= 0
    kernel = disturbance_kernel(triple)
    rebuilt = kernel.apply(q)
    for k in p12.values:
        assert rebuilt[k] == pytest.approx(p12[k], abs=1e-12)
    for (t, s2, s1) in kernel.values:
        if (s2, s1) not in kernel.undefined:
            assert sum(kernel(u, s2, s1) for u in SIGNS) == pytest.approx(1.0, abs=1e-12)


def test_non_disturbing_case_gives_identity_kernel():
    q = table_from_moments(MomentSet(0.2, -0.1, 0.3))
    p12 = TwoTimeTable(q.values, "sequential")
    kernel = disturbance_kernel(fine_construct(q, p12))
    for s1 in SIGNS:
        for s2 in SIGNS:
            for t in SIGNS:
                assert kernel(t, s2, s1) == pytest.approx(float(t == s2), abs=1e-12)


def test_zero_cells_are_flagged():
    q = TwoTimeTable({(-1, -1): 0.0, (-1, 1): 0.5, (1, -1): 0.25, (1, 1): 0.25}, "quasi")
    p12 = table_from_moments(MomentSet(0.0, 0.2, -0.5), "sequential")
    kernel = disturbance_kernel(fine_construct(q, p12))
    assert (-1, -1) in kernel.undefined
    assert np.isnan(kernel(1, -1, -1))


def test_negative_q_is_rejected():
    q = TwoTimeTable({(-1, -1): -0.05, (-1, 1): 0.35, (1, -1): 0.35, (1, 1): 0.35}, "quasi")
    p12 = TwoTimeTable({(-1, -1): 0.0, (-1, 1): 0.3, (1, -1): 0.35, (1, 1): 0.35}, "sequential")
    with pytest.raises(PreconditionError):
        fine_construct(q, p12)


def test_unequal_correlators_are_not_claimed():
    q = table_from_moments(MomentSet(0.1, 0.2, 0.3))
    p12 = table_from_moments(MomentSet(0.1, 0.2, 0.1), "sequential")
    triple = fine_construct(q, p12)
    assert triple.status == "unproven"
    assert triple.values == {}
    with pytest.raises(PreconditionError):
        disturbance_kernel(triple)
    assert triple.to_json()["status"] == "unproven"


def test_mismatched_first_moment_is_rejected():
    q = table_from_moments(MomentSet(0.1, 0.2, 0.3))
    p12 = table_from_moments(MomentSet(0.3, 0.2, 0.3), "sequential")
    with pytest.raises(PreconditionError):
        fine_construct(q, p12)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_c22_window_keeps_link_distribution_positive(a, b):
    lo, hi = c22_window(a, b)
    assert lo <= hi
    for c in (lo, hi):
        for s in SIGNS:
            for t in SIGNS:
                assert 1 + s * a + t * b + s * t * c >= -1e-12


def test_lg_values_are_four_q(pair_state):
    cfg, state = pair_state
    q = quasi_probability(state, 0.0, cfg.tau)
    rep = lg_check(q)
    for k in q.values:
        assert rep.values[k] == pytest.approx(4 * q[k], abs=1e-12)
        assert rep.violated[k] == (q[k] < 0)
    assert rep.min_value >= TSIRELSON_FLOOR
    assert set(rep.to_json()["values"]) == {"--", "-+", "+-", "++"}
    with pytest.raises(PreconditionError):
        lg_check(sequential_probability(state, 0.0, cfg.tau))


def test_physical_state_with_positive_q():
    from qarrival.states import WavepacketState
    state = WavepacketState.single(0.5, 1.0, 0.0)
    q = quasi_probability(state, 0.0, 1.0)
    p12 = sequential_probability(state, 0.0, 1.0)
    assert q.min() >= 0
    triple = fine_construct(q, p12, same_c_tol=1e-8)
    rebuilt = disturbance_kernel(triple).apply(q)
    for k in p12.values:
        assert rebuilt[k] == pytest.approx(p12[k], abs=1e-8)
    assert set(triple.to_json()["moments"]) >= {"Q1", "Q2", "Q2_disturbed", "C12", "C22", "D"}
