"""Ambiguous (weak) first measurements and the inference of two-time tables.

The first measurement returns alpha in {-1, +1} with conditional
probabilities c[alpha, s]; the inverse matrix d[s, alpha] turns the
measured joint table p(alpha, s2) into an inferred table for (s1, s2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .states import GridSpec
from .twotime import (SIGNS, TwoTimeTable, branches, quasi_probability,
                      sequential_probability)

__all__ = [
    "IllConditionedError",
    "AmbiguityModel",
    "JointTable",
    "ambiguous_joint",
    "infer_two_time",
    "interpolation_weight",
    "recover_q_two_strengths",
    "sample_records",
    "weak_limit",
]

_IDX = {-1: 0, 1: 1}
_KEYS = {(-1, -1): "mm", (-1, 1): "mp", (1, -1): "pm", (1, 1): "pp"}


class IllConditionedError(ValueError):
    """Two measurement strengths too close to separate q from p12."""


@dataclass(frozen=True)
class AmbiguityModel:
    """c[alpha, s] = (1 + alpha s eps) / 2 and its inverse d[s, alpha]."""

    epsilon: float
    c: np.ndarray = field(init=False, repr=False)
    d: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        eps = self.epsilon
        if not 0 < eps <= 1:
            raise ValueError("epsilon must lie in (0, 1]; eps = 0 has no inverse")
        c = 0.5 * np.array([[1 + eps, 1 - eps], [1 - eps, 1 + eps]])
        d = np.array([[1 + eps, eps - 1], [eps - 1, 1 + eps]]) / (2 * eps)
        c.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def cond(self, alpha: int, s: int) -> float:
        return float(self.c[_IDX[alpha], _IDX[s]])

    def inverse(self, s: int, alpha: int) -> float:
        return float(self.d[_IDX[s], _IDX[alpha]])


def interpolation_weight(epsilon: float) -> float:
    """sqrt(1 - eps^2): weight of q in the inferred table."""
    return math.sqrt(max(0.0, 1.0 - epsilon * epsilon))


@dataclass(frozen=True)
class JointTable:
    """p(alpha, s2): exact probabilities or Monte-Carlo frequencies."""

    values: Mapping[tuple[int, int], float]
    epsilon: float
    t1: float = 0.0
    t2: float = 0.0
    n_samples: int | None = None

    def __getitem__(self, key):
        return self.values[key]

    def to_json(self) -> dict:
        out = {name: float(self.values[key]) for key, name in _KEYS.items()}
        out.update(kind="joint", t1=self.t1, t2=self.t2, epsilon=self.epsilon)
        if self.n_samples is not None:
            out["n_samples"] = self.n_samples
        return out


def ambiguous_joint(state, t1: float, t2: float, model: AmbiguityModel,
                    grid: GridSpec | None = None) -> JointTable:
    """p(alpha, s2) = || P_s2(t2) M_alpha(t1) psi ||^2 with M_alpha = sum_s sqrt(c[alpha, s]) P_s."""
    br = branches(state, t1, t2, grid)
    vals = {}
    for alpha in SIGNS:
        for s2 in SIGNS:
            v = sum(math.sqrt(model.cond(alpha, s)) * br.branch[(s, s2)] for s in SIGNS)
            vals[(alpha, s2)] = br.inner(v, v).real
    return JointTable(vals, model.epsilon, t1, t2)


def infer_two_time(joint: JointTable, model: AmbiguityModel) -> TwoTimeTable:
    """p~(s1, s2) = sum_alpha d[s1, alpha] p(alpha, s2)."""
    if abs(joint.epsilon - model.epsilon) > 1e-15:
        raise ValueError("joint table was produced with a different epsilon")
    vals = {(s1, s2): sum(model.inverse(s1, a) * joint[(a, s2)] for a in SIGNS)
            for s1 in SIGNS for s2 in SIGNS}
    tol = 1e-8 if joint.n_samples is None else 1.0
    return TwoTimeTable(vals, "inferred", joint.t1, joint.t2, sum_tol=tol)


def recover_q_two_strengths(state, t1: float, t2: float, eps1: float, eps2: float,
                            grid: GridSpec | None = None, max_condition: float = 1e2):
    """Solve the two interpolation laws for (q, p12) from two ambiguous experiments."""
    if eps1 == eps2:
        raise IllConditionedError("strengths must differ")
    r1, r2 = interpolation_weight(eps1), interpolation_weight(eps2)
    system = np.array([[r1, 1 - r1], [r2, 1 - r2]])
    cond = np.linalg.cond(system)
    if not cond <= max_condition:
        raise IllConditionedError(
            f"strengths {eps1} and {eps2} give condition number {cond:.3g} > {max_condition:.3g}")
    inferred = [infer_two_time(ambiguous_joint(state, t1, t2, m, grid), m)
                for m in (AmbiguityModel(eps1), AmbiguityModel(eps2))]
    q, p12 = {}, {}
    for key in inferred[0].values:
        sol = np.linalg.solve(system, [inferred[0][key], inferred[1][key]])
        q[key], p12[key] = float(sol[0]), float(sol[1])
    return TwoTimeTable(q, "quasi", t1, t2), TwoTimeTable(p12, "sequential", t1, t2)


def sample_records(state, t1: float, t2: float, model: AmbiguityModel, n: int,
                   seed: int, grid: GridSpec | None = None,
                   exact: JointTable | None = None) -> JointTable:
    """Empirical frequencies of (alpha, s2) from n i.i.d. records (inverse-CDF sampling)."""
    if n < 1:
        raise ValueError("need at least one record")
    table = exact if exact is not None else ambiguous_joint(state, t1, t2, model, grid)
    keys = list(_KEYS)
    probs = np.clip([table[k] for k in keys], 0.0, None)
    cdf = np.cumsum(probs / probs.sum())
    rng = np.random.default_rng(seed)
    cells = np.searchsorted(cdf, rng.random(n), side="right")
    counts = np.bincount(np.minimum(cells, 3), minlength=4)
    freqs = {k: counts[i] / n for i, k in enumerate(keys)}
    return JointTable(freqs, model.epsilon, t1, t2, n_samples=n)


def weak_limit(state, t1: float, t2: float, epsilons: Sequence[float] = (0.2, 0.1, 0.05),
               grid: GridSpec | None = None) -> TwoTimeTable:
    """Extrapolate inferred tables to eps -> 0 with a polynomial in eps^2."""
    eps = np.asarray(epsilons, dtype=float)
    tables = [infer_two_time(ambiguous_joint(state, t1, t2, AmbiguityModel(e), grid),
                             AmbiguityModel(e)) for e in eps]
    vals = {}
    for key in tables[0].values:
        coeffs = np.polyfit(eps**2, [t[key] for t in tables], len(eps) - 1)
        vals[key] = float(coeffs[-1])
    return TwoTimeTable(vals, "inferred", t1, t2)


def direct_tables(state, t1, t2, grid=None):
    """(q, p12) from the two-time engine, for cross-checks."""
    return quasi_probability(state, t1, t2, grid), sequential_probability(state, t1, t2, grid)
