import json

import pytest

from qarrival import tolerances
from qarrival.cli import EXIT_NUMERIC, EXIT_PASS, EXIT_TOLERANCE, EXIT_USAGE, main
from qarrival.scenarios import SCENARIOS, worker_count


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv("QARRIVAL_THREADS", "1")


def _files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_scenario_list():
    assert set(SCENARIOS) == {"gauss-pair", "qmin-sweep", "single-gauss", "short-time", "backflow",
                              "wigner-step", "phase-space-q", "ambiguous", "lg-fine"}


def test_pass_writes_artifacts_and_metadata(tmp_path):
    assert main(["wigner-step", "--out", str(tmp_path)]) == EXIT_PASS
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["status"] == "pass"
    assert meta["tolerances"]["phase_space"] == tolerances.get("phase_space")
    assert meta["params"]["n_points"] == 1201
    assert {"numpy", "scipy", "python", "qarrival"} <= set(meta["versions"])
    header = (tmp_path / "quantum_step.csv").read_text().splitlines()[0]
    assert header == "u,quantum_step,classical_step"


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["lg-fine", "--tier", "fast", "--seed", "11", "--param", "n_states=10", "--param", "n_sets=200"]
    assert main(args + ["--out", str(a)]) == EXIT_PASS
    assert main(args + ["--out", str(b)]) == EXIT_PASS
    assert _files(a) == _files(b)


def test_seed_changes_monte_carlo_output(tmp_path):
    args = ["ambiguous", "--tier", "fast", "--param", "epsilons=0.5"]
    main(args + ["--seed", "1", "--out", str(tmp_path / "a")])
    main(args + ["--seed", "2", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "ambiguous.json").read_bytes() != (tmp_path / "b" / "ambiguous.json").read_bytes()


@pytest.mark.parametrize("argv", [
    ["no-such-scenario"],
    ["wigner-step", "--param", "bogus=1"],
    ["wigner-step", "--param", "n_points=abc"],
    ["wigner-step", "--param", "novalue"],
    ["wigner-step", "--tier", "huge"],
    ["gauss-pair", "--param", "sigma=-1"],
])
def test_usage_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("qarrival:")


def test_tolerance_failure_status(tmp_path):
    # the flux-ratio limit is dominated by the projector edge term and misses its window
    assert main(["short-time", "--tier", "fast", "--out", str(tmp_path)]) == EXIT_TOLERANCE
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["status"] == "tolerance failure"
    assert any(not c["passed"] for c in meta["checks"])


def test_numeric_failure_status(tmp_path):
    argv = ["gauss-pair", "--param", "L=200", "--param", "p0=0.001", "--out", str(tmp_path)]
    assert main(argv) == EXIT_NUMERIC
    assert json.loads((tmp_path / "metadata.json").read_text())["status"] == "numeric failure"


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("QARRIVAL_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.delenv("QARRIVAL_THREADS")
    assert worker_count() >= 1


def test_manifest_matches_acceptance_thresholds():
    t = tolerances.load()
    assert t["lower_bound"]["floor"] == -0.125 and t["lower_bound"]["witness_match"] == 1e-8
    assert (t["qmin_curve"]["y"], t["qmin_curve"]["target"], t["qmin_curve"]["window"]) == (1.15, -0.05, 0.005)
    assert t["interpolation"]["exact_match"] == 1e-7 and t["interpolation"]["binomial_sigmas"] == 5
    assert t["short_time"]["ratio_tol"] == 0.02 and t["short_time"]["exponent_tol"] == 0.05
    assert t["backflow"]["window"] == [-0.045, -0.030] and t["backflow"]["q_match"] == 5e-3
    assert t["phase_space"]["engine_match"] == 1e-4 and t["phase_space"]["step_tail"] == 1e-4
    assert t["lg_fine"]["marginal_match"] == 1e-12 and t["lg_fine"]["kernel_match"] == 1e-10
    assert t["single_gauss"]["large_p_ratio"] == 0.01 and t["single_gauss"]["quadrature_match"] == 1e-6
