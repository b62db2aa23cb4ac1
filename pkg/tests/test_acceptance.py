"""The eight acceptance criteria at their stated tolerances.

Each test runs the scenario that reproduces the criterion, with one worker,
and requires every graded check plus the runtime budget.  A summary line per
criterion is printed at the end of the session.
"""

import pytest

from qarrival import tolerances
from qarrival.scenarios import execute

RESULTS = {}


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv("QARRIVAL_THREADS", "1")


def _grade(number, title, runs, budget, select=None):
    checks, elapsed = [], 0.0
    for outcome, _, seconds in runs:
        checks += [c for c in outcome.checks if select is None or c.name in select]
        elapsed += seconds
    failed = [c for c in checks if not c.passed]
    in_time = elapsed < budget
    ok = not failed and in_time
    detail = "; ".join(f"{c.name}={c.value:.6g} (need {c.limit})" for c in failed)
    if not in_time:
        detail += f"{'; ' if detail else ''}runtime {elapsed:.1f}s >= {budget}s"
    RESULTS[number] = (ok, f"{title} [{elapsed:.1f}s]" + (f": {detail}" if detail else ""))
    assert ok, detail


def test_criterion_1_lower_bound():
    run = execute("gauss-pair", "standard", seed=2024)
    _grade(1, "lower bound -1/8 and witness identity over 1000 random states", [run],
           tolerances.get("lower_bound")["runtime_s"],
           select={"random states: min q", "random states: witness identity"})


def test_criterion_2_qmin_curve():
    run = execute("qmin-sweep", "standard", overrides={"grid_ys": ""})
    _grade(2, "q_min(0) analytic and grid minimum at y = 1.15", [run],
           tolerances.get("qmin_curve")["runtime_s"])


def test_criterion_3_interpolation_law():
    run = execute("ambiguous", "standard", seed=99)
    _grade(3, "interpolation law and Monte-Carlo frequencies", [run],
           tolerances.get("interpolation")["runtime_s"],
           select={"interpolation law", "Monte-Carlo frequencies"})


def test_criterion_4_short_time_law():
    run = execute("short-time", "standard")
    _grade(4, "short-time flux ratio and node exponent", [run], tolerances.get("short_time")["runtime_s"])


def test_criterion_5_backflow():
    run = execute("backflow", "convergence")
    _grade(5, "backflow eigenvalue window, eigenstate q and lambda_max", [run],
           tolerances.get("backflow")["runtime_s"])


def test_criterion_6_phase_space():
    runs = [execute("phase-space-q", "standard"), execute("wigner-step", "standard")]
    _grade(6, "phase-space q vs engine and the quantum step", runs,
           tolerances.get("phase_space")["runtime_s"],
           select={"phase space vs engine", "step at large u", "step at u = 0"})


def test_criterion_7_lg_fine():
    run = execute("lg-fine", "standard", seed=7)
    _grade(7, "LG = 4q, Tsirelson floor, Fine construction and kernel", [run],
           tolerances.get("lg_fine")["runtime_s"])


def test_criterion_8_single_gaussian_kernel():
    run = execute("single-gauss", "standard")
    _grade(8, "single-Gaussian kernel limits and quadrature oracle", [run],
           tolerances.get("single_gauss")["runtime_s"])
