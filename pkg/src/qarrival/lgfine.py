"""Leggett-Garg checks and a classical disturbance model built from Fine's theorem.

When every q(s1, s2) >= 0, a joint distribution p(s1, s2, s2') exists whose
marginals are q (undisturbed pair), p12 (disturbed pair) and some p_m
linking Q2 to its disturbed copy.  The disturbance kernel
k(s2' | s2; s1) = p(s1, s2, s2') / q(s1, s2) then maps q onto p12.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .twotime import SIGNS, TwoTimeTable, moments

__all__ = [
    "PreconditionError",
    "ConstructionError",
    "LGReport",
    "lg_check",
    "c22_window",
    "TripleDistribution",
    "fine_construct",
    "DisturbanceKernel",
    "disturbance_kernel",
    "TSIRELSON_FLOOR",
]

TSIRELSON_FLOOR = -0.5
_TOL = 1e-12


class PreconditionError(ValueError):
    """Inputs for which no classical model is claimed."""


class ConstructionError(RuntimeError):
    """The construction failed although its hypotheses hold (a bug)."""


@dataclass(frozen=True)
class LGReport:
    values: Mapping[tuple[int, int], float]
    violated: Mapping[tuple[int, int], bool]
    min_value: float

    def to_json(self) -> dict:
        key = lambda k: f"{'+' if k[0] > 0 else '-'}{'+' if k[1] > 0 else '-'}"
        return {"values": {key(k): v for k, v in self.values.items()},
                "violated": {key(k): v for k, v in self.violated.items()},
                "min_value": self.min_value}


def lg_check(q_table: TwoTimeTable) -> LGReport:
    """The four two-time LG expressions 1 + s1 <Q1> + s2 <Q2> + s1 s2 C12."""
    if q_table.kind != "quasi":
        raise PreconditionError("LG check expects a quasi-probability table")
    m = moments(q_table)
    vals = {(s1, s2): 1 + s1 * m.q1 + s2 * m.q2 + s1 * s2 * m.c12
            for s1 in SIGNS for s2 in SIGNS}
    return LGReport(vals, {k: v < 0 for k, v in vals.items()}, min(vals.values()))


def c22_window(q2: float, q2_disturbed: float) -> tuple[float, float]:
    """Values of C22 for which p_m(s2, s2') is non-negative."""
    if abs(q2) > 1 + _TOL or abs(q2_disturbed) > 1 + _TOL:
        raise ValueError("means must lie in [-1, 1]")
    lo = -1 + abs(q2 + q2_disturbed)
    hi = 1 - abs(q2 - q2_disturbed)
    return lo, max(lo, hi)


@dataclass(frozen=True)
class TripleDistribution:
    """p(s1, s2, s2') with its moment representation.

    ``status`` is "constructed", or "unproven" when C12 != C12' (a case the
    existence argument does not cover); then ``values`` is empty.
    """

    values: Mapping[tuple[int, int, int], float]
    q1: float
    q2: float
    q2_disturbed: float
    c12: float
    c12_disturbed: float
    c22: float
    d: float
    status: str = "constructed"

    def marginal_undisturbed(self) -> dict:
        return {(s1, s2): sum(self.values[(s1, s2, t)] for t in SIGNS) for s1 in SIGNS for s2 in SIGNS}

    def marginal_disturbed(self) -> dict:
        return {(s1, t): sum(self.values[(s1, s2, t)] for s2 in SIGNS) for s1 in SIGNS for t in SIGNS}

    def marginal_link(self) -> dict:
        return {(s2, t): sum(self.values[(s1, s2, t)] for s1 in SIGNS) for s2 in SIGNS for t in SIGNS}

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "p": {f"{s1:+d}{s2:+d}{t:+d}": v for (s1, s2, t), v in self.values.items()},
            "moments": {"Q1": self.q1, "Q2": self.q2, "Q2_disturbed": self.q2_disturbed,
                        "C12": self.c12, "C12_disturbed": self.c12_disturbed,
                        "C22": self.c22, "D": self.d},
        }


def _moment_triple(q1, q2, q2d, c12, c12d, c22, d):
    return {(s1, s2, t): 0.125 * (1 + q1 * s1 + q2 * s2 + q2d * t + c12 * s1 * s2
                                  + c12d * s1 * t + c22 * s2 * t + d * s1 * s2 * t)
            for s1 in SIGNS for s2 in SIGNS for t in SIGNS}


def fine_construct(q_table: TwoTimeTable, p12_table: TwoTimeTable, c22_choice: str = "max",
                   same_c_tol: float = 1e-9) -> TripleDistribution:
    """Joint distribution of (Q1, Q2, Q2 disturbed) matching q and p12.

    C22 is taken at the top of its feasible interval (``c22_choice="max"``,
    the least-disturbing choice) or at its midpoint.  The triple correlator D
    is the exact maximiser of the smallest of the eight entries.
    """
    if q_table.min() < -_TOL:
        raise PreconditionError(f"q has a negative entry ({q_table.min():.3g}); "
                                "no classical disturbance model exists")
    if p12_table.min() < -_TOL:
        raise PreconditionError("p12 has a negative entry")
    mq, mp = moments(q_table), moments(p12_table)
    if abs(mq.q1 - mp.q1) > same_c_tol:
        raise PreconditionError("q and p12 disagree on <Q1>")
    if abs(mq.c12 - mp.c12) > same_c_tol:
        return TripleDistribution({}, mq.q1, mq.q2, mp.q2, mq.c12, mp.c12, float("nan"),
                                  float("nan"), status="unproven")
    q1, q2, q2d, c12 = mq.q1, mq.q2, mp.q2, mq.c12
    lo_m, hi_m = c22_window(q2, q2d)
    lo = max(lo_m, -1 + 2 * abs(c12))
    hi = hi_m
    if lo > hi + _TOL:
        raise ConstructionError(f"empty C22 interval [{lo:.6g}, {hi:.6g}] with non-negative q")
    if c22_choice == "max":
        c22 = hi
    elif c22_choice == "midpoint":
        c22 = 0.5 * (lo + hi)
    else:
        raise ValueError("c22_choice must be 'max' or 'midpoint'")
    base = _moment_triple(q1, q2, q2d, c12, mp.c12, c22, 0.0)
    plus = min(v for (s1, s2, t), v in base.items() if s1 * s2 * t > 0)
    minus = min(v for (s1, s2, t), v in base.items() if s1 * s2 * t < 0)
    d = min(1.0, max(-1.0, 4 * (minus - plus)))
    values = _moment_triple(q1, q2, q2d, c12, mp.c12, c22, d)
    low = min(values.values())
    if low < -_TOL:
        raise ConstructionError(f"no admissible triple correlator (min entry {low:.3g})")
    values = {k: max(v, 0.0) for k, v in values.items()}
    return TripleDistribution(values, q1, q2, q2d, c12, mp.c12, c22, d)


@dataclass(frozen=True)
class DisturbanceKernel:
    """k(s2' | s2; s1); rows conditioned on a zero q cell are listed in ``undefined``."""

    values: Mapping[tuple[int, int, int], float]
    undefined: frozenset = field(default_factory=frozenset)

    def __call__(self, s2_out: int, s2_in: int, s1: int) -> float:
        return self.values[(s2_out, s2_in, s1)]

    def apply(self, q_table: TwoTimeTable) -> dict:
        """sum_s2 k(s2' | s2; s1) q(s1, s2) for every (s1, s2')."""
        return {(s1, t): sum(self.values[(t, s2, s1)] * q_table[(s1, s2)]
                             for s2 in SIGNS if (s2, s1) not in self.undefined)
                for s1 in SIGNS for t in SIGNS}


def disturbance_kernel(triple: TripleDistribution, zero_tol: float = 1e-300) -> DisturbanceKernel:
    if triple.status != "constructed":
        raise PreconditionError("no triple distribution to condition")
    q = triple.marginal_undisturbed()
    vals, undefined = {}, set()
    for s1 in SIGNS:
        for s2 in SIGNS:
            if q[(s1, s2)] <= zero_tol:
                undefined.add((s2, s1))
                for t in SIGNS:
                    vals[(t, s2, s1)] = float("nan")
                continue
            for t in SIGNS:
                vals[(t, s2, s1)] = triple.values[(s1, s2, t)] / q[(s1, s2)]
    return DisturbanceKernel(vals, frozenset(undefined))
