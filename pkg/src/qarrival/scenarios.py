"""Reproduction scenarios: each computes its artifacts and grades them against the tolerance manifest."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import linalg

from . import tolerances
from .ambiguous import (AmbiguityModel, ambiguous_joint, infer_two_time, interpolation_weight,
                        recover_q_two_strengths, sample_records, weak_limit)
from .analytic import (TwoGaussianConfig, normalized_truncation_bound, optimal_angles, q_min_of_y,
                       short_time_expansion, single_gaussian_kernel,
                       single_gaussian_kernel_quadrature, two_gaussian_q, energy_time)
from .backflow import (backflow_increase, extrapolate_lambda, extremal_eigenvalue,
                       FluxSpectrumProblem, modes_for_cutoff, verify_eigenstate_q)
from .lgfine import (PreconditionError, disturbance_kernel, fine_construct, lg_check)
from .numerics import quantum_step
from .states import GaussianPacket, GridSpec, WavepacketState, current_at_origin
from .twotime import (SIGNS, MomentSet, TwoTimeTable, moments, quasi_probability,
                      quasi_probability_forms, sequential_probability, table_from_moments,
                      witness_table)
from .wigner import kernel_W, q_via_phase_space, wigner_of_state

TIERS = ("fast", "standard", "convergence")


class ParameterError(ValueError):
    """Unknown or malformed scenario parameter."""


@dataclass(frozen=True)
class Param:
    kind: type | str  # float, int, or "floats" for comma-separated lists
    default: Any
    help: str = ""

    def resolve(self, tier: str):
        return self.default[tier] if isinstance(self.default, dict) else self.default

    def parse(self, text: str):
        if self.kind == "floats":
            return tuple(float(v) for v in text.split(",") if v.strip())
        if self.kind is int:
            return int(text)
        return float(text)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: str
    passed: bool


@dataclass
class Outcome:
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, dict] = field(default_factory=dict)
    curves: dict[str, tuple[tuple[str, ...], list]] = field(default_factory=dict)

    def check(self, name: str, value: float, passed: bool, limit: str):
        self.checks.append(Check(name, float(value), limit, bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class Scenario:
    name: str
    run: Callable[[dict, "Context"], Outcome]
    params: dict[str, Param]
    tolerance_sections: tuple[str, ...]


@dataclass(frozen=True)
class Context:
    tier: str
    seed: int
    workers: int

    def map(self, fn, items):
        items = list(items)
        if self.workers <= 1 or len(items) < 2:
            return [fn(it) for it in items]
        with ProcessPoolExecutor(max_workers=min(self.workers, len(items))) as pool:
            return list(pool.map(fn, items))


def worker_count() -> int:
    cap = os.environ.get("QARRIVAL_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _table(t: TwoTimeTable) -> dict:
    return t.to_json()


def _config(params) -> TwoGaussianConfig:
    base = TwoGaussianConfig(params["L"], params["sigma"], params["p0"])
    phi, theta = params["phi"], params["theta"]
    if math.isnan(phi) or math.isnan(theta):
        o_phi, o_theta = optimal_angles(base.overlap_y)
        phi = o_phi if math.isnan(phi) else phi
        theta = o_theta if math.isnan(theta) else theta
    return TwoGaussianConfig(base.L, base.sigma, base.p0, phi, theta)


_PAIR_PARAMS = {
    "L": Param(float, 2.5, "packet offset"),
    "sigma": Param(float, 1.0, "packet width"),
    "p0": Param(float, 1.0, "packet momentum"),
    "phi": Param(float, float("nan"), "mixing angle (nan: optimal for q(+,+))"),
    "theta": Param(float, float("nan"), "relative phase (nan: optimal for q(+,+))"),
}


# ------------------------------------------------------------ random states

def random_state_and_times(rng: np.random.Generator):
    """A superposition of one to three Gaussians and a time pair (t1, t2)."""
    k = int(rng.integers(1, 4))
    packets = [GaussianPacket(rng.uniform(-3, 3), rng.uniform(0.5, 1.5), rng.uniform(-2, 2))
               for _ in range(k)]
    coeffs = rng.normal(size=k) + 1j * rng.normal(size=k)
    t1 = rng.uniform(0.0, 1.0)
    t2 = t1 + rng.uniform(0.05, 3.0)
    return WavepacketState.normalized(coeffs, packets), t1, t2


def light_grid(state, t1, t2) -> GridSpec:
    # The lower bound and the witness identity hold exactly on any grid, so
    # sweeps use a coarser box than the accuracy-oriented default.
    return GridSpec.for_state(state, (0.0, t1, t2), padding=3.0, points_per_sigma=12.0,
                              n_min=2**12)


def _sweep_one(item):
    state, t1, t2 = item
    grid = light_grid(state, t1, t2)
    q = quasi_probability(state, t1, t2, grid=grid)
    w = witness_table(state, t1, t2, grid=grid)
    lg = lg_check(q)
    return ([q[k] for k in sorted(q.values)], max(abs(w[k] - q[k]) for k in q.values),
            max(abs(lg.values[k] - 4 * q[k]) for k in q.values), lg.min_value)


def random_sweep(n: int, seed: int, ctx: Context):
    rng = np.random.default_rng(seed)
    items = [random_state_and_times(rng) for _ in range(n)]
    return items, ctx.map(_sweep_one, items)


# --------------------------------------------------------------- gauss-pair

def run_gauss_pair(params, ctx: Context) -> Outcome:
    tol = tolerances.get("lower_bound")
    out = Outcome()
    cfg = _config(params)
    state = cfg.state()
    closed = two_gaussian_q(cfg)
    printed = two_gaussian_q(cfg, printed_argument=True)
    engine = quasi_probability(state, 0.0, cfg.tau)
    seq = sequential_probability(state, 0.0, cfg.tau)
    bound = normalized_truncation_bound(cfg)
    gap = max(abs(closed[k] - engine[k]) for k in engine.values)
    out.tables["gauss_pair.json"] = {
        "config": {"L": cfg.L, "sigma": cfg.sigma, "p0": cfg.p0, "phi": cfg.phi,
                   "theta": cfg.theta, "tau": cfg.tau, "y": cfg.y, "Y": cfg.overlap_y},
        "closed_form": _table(closed), "closed_form_printed_argument": _table(printed),
        "engine_q": _table(engine), "engine_p12": _table(seq),
        "truncation_bound": bound, "closed_form_gap": gap,
        "approximation_valid": cfg.approximation_valid,
    }
    out.check("closed form vs engine", gap, gap <= bound, f"<= {bound:.3e} (truncation bound)")
    out.check("engine q above floor", engine.min(), engine.min() >= tol["floor"] - tol["floor_slack"],
              f">= {tol['floor']} - {tol['floor_slack']}")

    items, rows = random_sweep(params["n_states"], ctx.seed, ctx)
    curve = []
    for i, ((st, t1, t2), (qs, werr, _, _)) in enumerate(zip(items, rows)):
        curve.append((i, t1, t2, *qs, werr))
    out.curves["lower_bound_sweep.csv"] = (("index", "t1", "t2", "q_mm", "q_mp", "q_pm", "q_pp",
                                            "witness_error"), curve)
    qmin = min(min(r[0]) for r in rows)
    werr = max(r[1] for r in rows)
    out.check("random states: min q", qmin, qmin >= tol["floor"] - tol["floor_slack"],
              f">= {tol['floor']} - {tol['floor_slack']}")
    out.check("random states: witness identity", werr, werr <= tol["witness_match"],
              f"<= {tol['witness_match']}")
    return out


# --------------------------------------------------------------- qmin-sweep

def grid_minimum(y: float, p0_sigma: float) -> dict:
    """Smallest q entry over all superpositions of the two packets at argument y."""
    cfg = TwoGaussianConfig.from_y(y, 1.0, p0_sigma)
    forms, gram = quasi_probability_forms(cfg.packets_as_states(), 0.0, cfg.tau)
    best = {}
    for key, form in forms.items():
        vals, vecs = linalg.eigh(form, gram, subset_by_index=[0, 0])
        best[key] = float(vals[0])
    key = min(best, key=best.get)
    return {"y": y, "L_over_sigma": cfg.L / cfg.sigma, "tau": cfg.tau, "min": best[key],
            "entry": list(key), "per_entry": {f"{a:+d}{b:+d}": v for (a, b), v in best.items()}}


def _grid_minimum_item(args):
    return grid_minimum(*args)


def run_qmin_sweep(params, ctx: Context) -> Outcome:
    tol = tolerances.get("qmin_curve")
    out = Outcome()
    ys = np.linspace(0.0, params["y_max"], params["n_points"])
    printed = q_min_of_y(ys)
    exact = q_min_of_y(math.sqrt(2) * ys)
    out.curves["qmin_curve.csv"] = (("y", "qmin_printed_argument", "qmin_overlap_argument"),
                                    list(zip(ys.tolist(), np.atleast_1d(printed).tolist(),
                                             np.atleast_1d(exact).tolist())))
    zero = float(q_min_of_y(0.0))
    target0 = (1 - math.sqrt(2)) / 4
    grid_ys = sorted(set(params["grid_ys"]) | {tol["y"]})
    mins = ctx.map(_grid_minimum_item, [(y, params["p0_sigma"]) for y in grid_ys])
    out.curves["qmin_grid.csv"] = (("y", "L_over_sigma", "grid_min", "qmin_printed_argument",
                                    "qmin_overlap_argument"),
                                   [(m["y"], m["L_over_sigma"], m["min"], float(q_min_of_y(m["y"])),
                                     float(q_min_of_y(math.sqrt(2) * m["y"]))) for m in mins])
    at = next(m for m in mins if m["y"] == tol["y"])
    out.tables["qmin_points.json"] = {
        "marked": [{"y": 0.0, "qmin": zero}, {"y": tol["y"], "qmin": float(q_min_of_y(tol["y"])),
                                              "qmin_overlap_argument": float(q_min_of_y(math.sqrt(2) * tol["y"]))}],
        "grid_minimum": at, "p0_sigma": params["p0_sigma"],
    }
    out.check("qmin(0) = (1 - sqrt 2)/4", abs(zero - target0), abs(zero - target0) <= tol["analytic_zero"],
              f"<= {tol['analytic_zero']}")
    dev = abs(at["min"] - tol["target"])
    out.check(f"grid minimum at y = {tol['y']}", at["min"], dev <= tol["window"],
              f"{tol['target']} +- {tol['window']}")
    return out


# ------------------------------------------------------------- single-gauss

def run_single_gauss(params, ctx: Context) -> Outcome:
    tol = tolerances.get("single_gauss")
    out = Outcome()
    tau = params["tau"]
    ps = np.linspace(params["p_min"], params["p_max"], params["n_points"])
    f = single_gaussian_kernel(ps, tau)
    out.curves["single_gauss_kernel.csv"] = (("p", "f", "classical_p_tau"),
                                             list(zip(ps.tolist(), f.tolist(), (ps * tau).tolist())))
    p_big = tol["large_p_scaled"] * math.sqrt(2 / tau)
    ratio = float(single_gaussian_kernel(p_big, tau)) / (p_big * tau)
    out.check("large-p ratio to p tau", ratio, abs(ratio - 1) <= tol["large_p_ratio"],
              f"1 +- {tol['large_p_ratio']}")
    # Negative momenta for which tau lies inside the quantum window tau < c tau_E(p).
    p_edge = math.sqrt(2 * tol["lobe_window_tau_e"] / tau)
    neg = np.linspace(-p_edge, 0, 2001)[1:-1]
    fneg = single_gaussian_kernel(neg, tau)
    lobe = float(fneg.min())
    out.check("negative lobe for small negative p", lobe, lobe < 0,
              f"< 0 for some p with tau < {tol['lobe_window_tau_e']} tau_E")
    pts = [(p, t) for p in (-3.0, -1.0, -0.3, 0.0, 0.5, 2.0, 6.0) for t in (0.1, 1.0, 4.0)]
    rows = [(p, t, float(single_gaussian_kernel(p, t)), single_gaussian_kernel_quadrature(p, t))
            for p, t in pts]
    err = max(abs(a - b) for _, _, a, b in rows)
    out.curves["single_gauss_quadrature.csv"] = (("p", "tau", "closed_form", "quadrature"), rows)
    out.tables["single_gauss.json"] = {"tau": tau, "tau_E_at_lobe_edge": energy_time(p_edge),
                                       "large_p": p_big, "large_p_ratio": ratio,
                                       "lobe_min": lobe, "lobe_argmin": float(neg[np.argmin(fneg)]),
                                       "quadrature_max_error": err}
    out.check("closed form vs quadrature", err, err <= tol["quadrature_match"],
              f"<= {tol['quadrature_match']}")
    return out


# --------------------------------------------------------------- short-time

def richardson_limit(taus, values, powers=(0.5, 1.0)) -> float:
    """Value at tau = 0 of the fit values = r0 + sum_k r_k tau^powers[k] (exact for len(taus) points)."""
    taus = np.asarray(taus, dtype=float)
    design = np.column_stack([np.ones_like(taus)] + [taus**a for a in powers])
    return float(np.linalg.lstsq(design, np.asarray(values, float), rcond=None)[0][0])


def run_short_time(params, ctx: Context) -> Outcome:
    tol = tolerances.get("short_time")
    out = Outcome()
    grid = GridSpec(params["half_width"], params["n_grid"])
    tau0 = params["tau_min"]
    taus = np.array([tau0, 2 * tau0, 4 * tau0])
    mover = WavepacketState.single(params["x0"], params["sigma"], params["p0"])
    a = params["node_offset"]
    node = WavepacketState.normalized([1, -1], [GaussianPacket(a, params["sigma"], 0.0),
                                                GaussianPacket(-a, params["sigma"], 0.0)])
    J = current_at_origin(mover, 0.0)
    rows, ratios, corrected = [], [], []
    for t in taus:
        q = quasi_probability(mover, 0.0, t, grid=grid)[(-1, 1)]
        est = short_time_expansion(mover, t)
        ratios.append(q / (0.5 * J * t))
        corrected.append((q - est.edge) / (0.5 * J * t))
        rows.append(("moving", t, q, 0.5 * J * t, est.edge, est.value))
    node_q = []
    for t in taus:
        q = quasi_probability(node, 0.0, t, grid=grid)[(-1, 1)]
        node_q.append(q)
        rows.append(("node", t, q, 0.0, 0.0, short_time_expansion(node, t).value))
    out.curves["short_time.csv"] = (("state", "tau", "q_mp", "half_J_tau", "edge_term", "expansion"), rows)
    limit = richardson_limit(taus, ratios)
    corrected_limit = richardson_limit(taus, corrected)
    slope = float(np.polyfit(np.log(taus), np.log(node_q), 1)[0])
    out.tables["short_time.json"] = {"taus": taus.tolist(), "J0": J, "ratios": ratios,
                                     "ratio_limit": limit, "edge_corrected_ratios": corrected,
                                     "edge_corrected_limit": corrected_limit,
                                     "node_q": node_q, "node_exponent": slope}
    out.check("q(-,+) / (J tau / 2) -> 1", limit, abs(limit - 1) <= tol["ratio_tol"],
              f"1 +- {tol['ratio_tol']}")
    out.check("node-state exponent", slope, abs(slope - tol["node_exponent"]) <= tol["exponent_tol"],
              f"{tol['node_exponent']} +- {tol['exponent_tol']}")
    return out


# ----------------------------------------------------------------- backflow

def run_backflow(params, ctx: Context) -> Outcome:
    tol = tolerances.get("backflow")
    out = Outcome()
    ex = extrapolate_lambda(params["cutoffs"], per_unit_sq=params["per_unit_sq"])
    lo, hi = tol["window"]
    out.check("extrapolated lambda_min in window", ex.estimate, lo <= ex.estimate <= hi, f"[{lo}, {hi}]")
    lam_max = max(ex.lam_max)
    out.check("lambda_max", lam_max, lam_max <= 1 + tol["lam_max_slack"], f"<= 1 + {tol['lam_max_slack']}")
    u = params["cutoff"]
    pair = extremal_eigenvalue(FluxSpectrumProblem(u, modes_for_cutoff(u, params["per_unit_sq"])))
    chk = verify_eigenstate_q(pair, tol["q_match"])
    rise = backflow_increase(pair)
    out.check("q_from_lambda vs grid q(-,+)", abs(chk.q_grid - chk.q_formula), chk.passed,
              f"<= {tol['q_match']}")
    out.tables["backflow.json"] = {
        "cutoffs": list(ex.cutoffs), "modes": list(ex.modes), "lambda_min": list(ex.lambdas),
        "lambda_max": list(ex.lam_max), "extrapolated": ex.estimate, "error_bar": ex.error,
        "eigenstate": {"cutoff": u, "lambda": chk.lam, "q_grid": chk.q_grid,
                       "q_from_lambda": chk.q_formula, "q_momentum_route": chk.q_momentum,
                       "left_probability_increase": rise},
    }
    amps = pair.amplitudes
    stride = max(1, amps.amplitudes.size // 2048)
    out.curves["backflow_eigenstate.csv"] = (("p", "re", "im"), [
        (float(p), float(v.real), float(v.imag))
        for p, v in zip(amps.p[::stride], amps.amplitudes[::stride])])
    return out


# ------------------------------------------------------------- wigner-step

def run_wigner_step(params, ctx: Context) -> Outcome:
    tol = tolerances.get("phase_space")
    out = Outcome()
    u = np.linspace(params["u_min"], params["u_max"], params["n_points"])
    step = quantum_step(u)
    out.curves["quantum_step.csv"] = (("u", "quantum_step", "classical_step"),
                                      list(zip(u.tolist(), step.tolist(), np.heaviside(-u, 0.5).tolist())))
    tail = float(quantum_step(tol["step_tail_u"]))
    mid = float(quantum_step(0.0))
    out.check("step at large u", tail, abs(tail) < tol["step_tail"], f"|.| < {tol['step_tail']}")
    out.check("step at u = 0", mid, abs(mid - 0.5) < tol["step_zero"], f"0.5 +- {tol['step_zero']}")
    return out


# ----------------------------------------------------------- phase-space-q

TEST_PAIRS = (
    dict(L=2.5, sigma=1.0, p0=1.0, phi=float("nan"), theta=float("nan")),
    dict(L=3.0, sigma=1.0, p0=0.5, phi=math.pi / 4, theta=math.pi),
    dict(L=2.3, sigma=0.8, p0=1.5, phi=0.3, theta=0.5),
)


def _phase_space_item(pair):
    cfg = _config(pair)
    st = cfg.state()
    ps = q_via_phase_space(st, 0.0, cfg.tau)
    eng = quasi_probability(st, 0.0, cfg.tau)
    return cfg, ps, eng


def run_phase_space_q(params, ctx: Context) -> Outcome:
    tol = tolerances.get("phase_space")
    out = Outcome()
    results = ctx.map(_phase_space_item, TEST_PAIRS)
    rows, worst = [], 0.0
    for cfg, ps, eng in results:
        gap = max(abs(ps[k] - eng[k]) for k in eng.values)
        worst = max(worst, gap)
        rows.append({"L": cfg.L, "sigma": cfg.sigma, "p0": cfg.p0, "phi": cfg.phi, "theta": cfg.theta,
                     "phase_space": _table(ps), "engine": _table(eng), "gap": gap})
    out.tables["phase_space_q.json"] = {"states": rows}
    out.check("phase space vs engine", worst, worst <= tol["engine_match"], f"<= {tol['engine_match']}")
    X = np.linspace(-4, 4, 81)
    P = np.linspace(-3, 3, 61)
    ident = max(abs(sum(kernel_W(a, b, x, p, 1.7) for a in SIGNS for b in SIGNS) - 1 / (2 * np.pi))
                for x in X[::8] for p in P[::6])
    out.check("kernel resolution of identity", ident, ident <= tol["kernel_identity"],
              f"<= {tol['kernel_identity']}")
    cfg = results[0][0]
    W = wigner_of_state(cfg.state(), X * params["scale"], P / params["scale"])
    out.curves["wigner_function.csv"] = (("X", "p", "W"), list(W.to_csv_rows()))
    return out


# -------------------------------------------------------------- ambiguous

def run_ambiguous(params, ctx: Context) -> Outcome:
    tol = tolerances.get("interpolation")
    rec_tol = tolerances.get("ambiguous_recovery")
    out = Outcome()
    cfg = _config(params)
    st = cfg.state()
    t1, t2 = 0.0, cfg.tau
    q = quasi_probability(st, t1, t2)
    p12 = sequential_probability(st, t1, t2)
    report = {"q": _table(q), "p12": _table(p12), "epsilons": {}}
    worst, worst_z = 0.0, 0.0
    for i, eps in enumerate(params["epsilons"]):
        model = AmbiguityModel(eps)
        joint = ambiguous_joint(st, t1, t2, model)
        inferred = infer_two_time(joint, model)
        r = interpolation_weight(eps)
        gap = max(abs(inferred[k] - (r * q[k] + (1 - r) * p12[k])) for k in q.values)
        worst = max(worst, gap)
        n = params["n_samples"]
        mc = sample_records(st, t1, t2, model, n, ctx.seed + i, exact=joint)
        z = max(abs(mc[k] - joint[k]) / math.sqrt(max(joint[k] * (1 - joint[k]), 1e-300) / n)
                for k in joint.values)
        worst_z = max(worst_z, z)
        report["epsilons"][f"{eps:g}"] = {"joint": joint.to_json(), "inferred": _table(inferred),
                                          "monte_carlo": mc.to_json(), "interpolation_gap": gap,
                                          "max_z": z}
    out.check("interpolation law", worst, worst <= tol["exact_match"], f"<= {tol['exact_match']}")
    out.check("Monte-Carlo frequencies", worst_z, worst_z <= tol["binomial_sigmas"],
              f"<= {tol['binomial_sigmas']} sigma")
    rq, rp = recover_q_two_strengths(st, t1, t2, params["eps_a"], params["eps_b"],
                                     max_condition=rec_tol["max_condition"])
    rgap = max(max(abs(rq[k] - q[k]), abs(rp[k] - p12[k])) for k in q.values)
    out.check("two-strength recovery", rgap, rgap <= rec_tol["two_strength_match"],
              f"<= {rec_tol['two_strength_match']}")
    weak = weak_limit(st, t1, t2)
    report.update(recovered_q=_table(rq), recovered_p12=_table(rp), weak_limit=_table(weak))
    out.tables["ambiguous.json"] = report
    return out


# ------------------------------------------------------------------ lg-fine

def random_admissible_pair(rng: np.random.Generator) -> tuple[TwoTimeTable, TwoTimeTable]:
    """Non-negative q and a p12 sharing <Q1> and C12, including boundary cases."""
    w = rng.dirichlet(np.full(4, rng.choice([0.2, 1.0, 5.0])))
    if rng.random() < 0.15:
        w[rng.integers(4)] = 0.0
        w /= w.sum()
    keys = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    q = TwoTimeTable(dict(zip(keys, w.tolist())), "quasi")
    m = moments(q)
    lo = max(-(1 + m.q1) - m.c12, -(1 - m.q1) + m.c12)
    hi = min(1 + m.q1 - m.c12, 1 - m.q1 + m.c12)
    pick = rng.random()
    q2d = lo if pick < 0.1 else hi if pick < 0.2 else rng.uniform(lo, hi)
    return q, table_from_moments(MomentSet(m.q1, q2d, m.c12), "sequential")


def run_lg_fine(params, ctx: Context) -> Outcome:
    tol = tolerances.get("lg_fine")
    out = Outcome()
    rng = np.random.default_rng(ctx.seed)
    worst_marg, worst_kernel, min_entry, failures = 0.0, 0.0, 1.0, 0
    for i in range(params["n_sets"]):
        q, p12 = random_admissible_pair(rng)
        try:
            triple = fine_construct(q, p12, "max" if i % 2 == 0 else "midpoint")
        except (PreconditionError, RuntimeError):
            failures += 1
            continue
        min_entry = min(min_entry, min(triple.values.values()))
        mu, md = triple.marginal_undisturbed(), triple.marginal_disturbed()
        worst_marg = max(worst_marg, max(max(abs(mu[k] - q[k]), abs(md[k] - p12[k])) for k in q.values))
        rebuilt = disturbance_kernel(triple).apply(q)
        worst_kernel = max(worst_kernel, max(abs(rebuilt[k] - p12[k]) for k in p12.values))
    out.check("fine_construct failures", failures, failures == 0, "== 0")
    out.check("triple entries non-negative", min_entry, min_entry >= 0, ">= 0")
    out.check("triple marginals", worst_marg, worst_marg <= tol["marginal_match"], f"<= {tol['marginal_match']}")
    out.check("kernel reconstructs p12", worst_kernel, worst_kernel <= tol["kernel_match"],
              f"<= {tol['kernel_match']}")

    _, rows = random_sweep(params["n_states"], ctx.seed, ctx)
    lg_gap = max(r[2] for r in rows)
    floor = min(r[3] for r in rows)
    out.check("LG values = 4q", lg_gap, lg_gap <= tol["lg_exact"], f"<= {tol['lg_exact']}")
    out.check("Tsirelson floor", floor, floor >= tol["tsirelson_floor"] - tol["lg_exact"],
              f">= {tol['tsirelson_floor']}")

    report = {"random_sets": params["n_sets"], "random_states": params["n_states"],
              "min_lg_value": floor, "examples": {}}
    cfg = _config(params)
    examples = {"two_gaussian": (cfg.state(), cfg.tau),
                "resting_packet": (WavepacketState.single(0.5, 1.0, 0.0), 1.0)}
    for name, (st, tau) in examples.items():
        q = quasi_probability(st, 0.0, tau)
        p12 = sequential_probability(st, 0.0, tau)
        entry = {"lg": lg_check(q).to_json(), "q": _table(q), "p12": _table(p12)}
        try:
            triple = fine_construct(q, p12, same_c_tol=1e-8)
            entry["triple"] = triple.to_json()
            if triple.status == "constructed":
                k = disturbance_kernel(triple)
                entry["kernel"] = {f"{a:+d}|{b:+d};{c:+d}": v for (a, b, c), v in k.values.items()}
        except PreconditionError as exc:
            entry["triple"] = {"status": "no classical model", "reason": str(exc)}
        report["examples"][name] = entry
    out.tables["lg_fine.json"] = report
    return out


SCENARIOS: dict[str, Scenario] = {
    "gauss-pair": Scenario("gauss-pair", run_gauss_pair, {
        **_PAIR_PARAMS,
        "n_states": Param(int, {"fast": 100, "standard": 1000, "convergence": 1000},
                          "random states in the lower-bound sweep"),
    }, ("lower_bound", "gauss_pair")),
    "qmin-sweep": Scenario("qmin-sweep", run_qmin_sweep, {
        "y_max": Param(float, 3.0),
        "n_points": Param(int, 301),
        "p0_sigma": Param(float, 0.01, "p0 * sigma of the grid configurations"),
        "grid_ys": Param("floats", {"fast": (), "standard": (0.6, 0.9), "convergence": (0.4, 0.6, 0.9, 1.5, 2.0)},
                         "extra y values for the grid minimum"),
    }, ("qmin_curve",)),
    "single-gauss": Scenario("single-gauss", run_single_gauss, {
        "tau": Param(float, 1.0),
        "p_min": Param(float, -4.0),
        "p_max": Param(float, 8.0),
        "n_points": Param(int, 481),
    }, ("single_gauss",)),
    "short-time": Scenario("short-time", run_short_time, {
        "x0": Param(float, -0.3),
        "sigma": Param(float, 1.0),
        "p0": Param(float, 1.5),
        "node_offset": Param(float, 1.0),
        "tau_min": Param(float, 1e-3),
        "half_width": Param(float, 30.0),
        "n_grid": Param(int, {"fast": 2**16, "standard": 2**17, "convergence": 2**18}),
    }, ("short_time",)),
    "backflow": Scenario("backflow", run_backflow, {
        "cutoffs": Param("floats", {"fast": (10, 14, 20), "standard": (14, 20, 28),
                                    "convergence": (14, 20, 28, 40)}, "scaled momentum cutoffs"),
        "per_unit_sq": Param(float, 1.6, "nodes per unit squared cutoff"),
        "cutoff": Param(float, {"fast": 14.0, "standard": 20.0, "convergence": 28.0},
                        "cutoff of the eigenstate used for q(-,+)"),
    }, ("backflow",)),
    "wigner-step": Scenario("wigner-step", run_wigner_step, {
        "u_min": Param(float, -30.0),
        "u_max": Param(float, 30.0),
        "n_points": Param(int, 1201),
    }, ("phase_space",)),
    "phase-space-q": Scenario("phase-space-q", run_phase_space_q, {
        "scale": Param(float, 1.0, "stretch of the Wigner-function lattice"),
    }, ("phase_space",)),
    "ambiguous": Scenario("ambiguous", run_ambiguous, {
        **_PAIR_PARAMS,
        "epsilons": Param("floats", (0.2, 0.5, 0.8, 1.0)),
        "n_samples": Param(int, {"fast": 10**5, "standard": 10**6, "convergence": 10**7}),
        "eps_a": Param(float, 0.3),
        "eps_b": Param(float, 0.9),
    }, ("interpolation", "ambiguous_recovery")),
    "lg-fine": Scenario("lg-fine", run_lg_fine, {
        **_PAIR_PARAMS,
        "n_sets": Param(int, {"fast": 1000, "standard": 10000, "convergence": 10000}),
        "n_states": Param(int, {"fast": 50, "standard": 200, "convergence": 1000}),
    }, ("lg_fine",)),
}


def resolve_params(scenario: Scenario, tier: str, overrides: dict[str, str]) -> dict:
    unknown = sorted(set(overrides) - set(scenario.params))
    if unknown:
        raise ParameterError(f"unknown parameter(s) for {scenario.name}: {', '.join(unknown)}")
    out = {}
    for name, spec in scenario.params.items():
        if name not in overrides:
            out[name] = spec.resolve(tier)
            continue
        try:
            out[name] = spec.parse(overrides[name])
        except ValueError as exc:
            raise ParameterError(f"bad value for {name}: {overrides[name]!r}") from exc
    return out


def execute(name: str, tier: str = "standard", seed: int = 0, overrides: dict | None = None,
            workers: int | None = None) -> tuple[Outcome, dict, float]:
    scenario = SCENARIOS[name]
    params = resolve_params(scenario, tier, overrides or {})
    ctx = Context(tier, seed, worker_count() if workers is None else workers)
    start = time.perf_counter()
    outcome = scenario.run(params, ctx)
    return outcome, params, time.perf_counter() - start
