"""Two-time quasi-probabilities and sequential probabilities for Q = sign(x).

Heisenberg projectors are never built as matrices.  With a = psi(t1) and
b = psi(t2) every quantity reduces to the branch vectors

    C[s1, s2] = P_s2 U(t2 - t1) P_s1 a

through
    q(s1, s2)   = Re <b | C[s1, s2]>
    p12(s1, s2) = ||C[s1, s2]||^2
    D(s1, s2 | s1', s2) = <C[s1', s2] | C[s1, s2]>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .numerics import ConvergenceError
from .states import (GridSpec, GridWaveFunction, free_propagate,
                     to_grid)

__all__ = [
    "SIGNS",
    "TwoTimeTable",
    "MomentSet",
    "HistoryBranches",
    "branches",
    "quasi_probability",
    "sequential_probability",
    "measured_state",
    "decoherence_functional",
    "DecoherenceEntry",
    "decoherence_entries",
    "moments",
    "table_from_moments",
    "mix_tables",
    "disturbed_mean",
    "lower_bound_witness",
    "witness_table",
    "single_time_probability",
    "linear_positivity",
    "infinity_norm_distance",
    "quasi_probability_forms",
]

SIGNS = (-1, 1)
_KEYS = {(-1, -1): "mm", (-1, 1): "mp", (1, -1): "pm", (1, 1): "pp"}
KINDS = ("quasi", "sequential", "inferred")


@dataclass(frozen=True)
class TwoTimeTable:
    """Four numbers indexed by (s1, s2) in {-1, +1}^2."""

    values: Mapping[tuple[int, int], float]
    kind: str
    t1: float = 0.0
    t2: float = 0.0
    sum_tol: float = field(default=1e-8, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")
        vals = {k: float(self.values[k]) for k in _KEYS}
        object.__setattr__(self, "values", vals)
        if abs(sum(vals.values()) - 1.0) > self.sum_tol:
            raise ValueError(f"table entries sum to {sum(vals.values()):.12g}, not 1")
        low = min(vals.values())
        if self.kind == "sequential" and low < -1e-10:
            raise ValueError(f"negative sequential probability {low:.3g}")
        if self.kind == "quasi" and low < -0.125 - 1e-8:
            raise ValueError(f"quasi-probability {low:.6g} below -1/8")

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.values[key]

    def min(self) -> float:
        return min(self.values.values())

    def argmin(self) -> tuple[int, int]:
        return min(self.values, key=self.values.get)

    def marginal_first(self, s1: int) -> float:
        return self[(s1, -1)] + self[(s1, 1)]

    def marginal_second(self, s2: int) -> float:
        return self[(-1, s2)] + self[(1, s2)]

    def as_array(self) -> np.ndarray:
        """2x2 array indexed [s1 index, s2 index] with index 0 for -1."""
        return np.array([[self[(-1, -1)], self[(-1, 1)]], [self[(1, -1)], self[(1, 1)]]])

    def to_json(self) -> dict:
        out = {name: self.values[key] for key, name in _KEYS.items()}
        out.update(kind=self.kind, t1=self.t1, t2=self.t2)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "TwoTimeTable":
        return cls({key: data[name] for key, name in _KEYS.items()}, data["kind"],
                   data.get("t1", 0.0), data.get("t2", 0.0))


@dataclass(frozen=True)
class MomentSet:
    """<Q1>, <Q2>, C12 and optionally the disturbed mean <Q2^(1)>."""

    q1: float
    q2: float
    c12: float
    q2_disturbed: float | None = None

    def __post_init__(self):
        tol = 1e-9
        for name in ("q1", "q2", "c12", "q2_disturbed"):
            v = getattr(self, name)
            if v is not None and abs(v) > 1 + tol:
                raise ValueError(f"moment {name} = {v} outside [-1, 1]")


def moments(table: TwoTimeTable) -> MomentSet:
    q1 = sum(s1 * v for (s1, _), v in table.values.items())
    q2 = sum(s2 * v for (_, s2), v in table.values.items())
    c12 = sum(s1 * s2 * v for (s1, s2), v in table.values.items())
    return MomentSet(q1, q2, c12)


def table_from_moments(m: MomentSet, kind: str = "quasi", t1: float = 0.0,
                       t2: float = 0.0) -> TwoTimeTable:
    vals = {(s1, s2): 0.25 * (1 + s1 * m.q1 + s2 * m.q2 + s1 * s2 * m.c12)
            for s1 in SIGNS for s2 in SIGNS}
    return TwoTimeTable(vals, kind, t1, t2)


def mix_tables(weights: Iterable[float], tables: Iterable[TwoTimeTable]) -> TwoTimeTable:
    """Table of a convex mixture of states (every table is linear in rho)."""
    weights = list(weights)
    tables = list(tables)
    if abs(sum(weights) - 1) > 1e-12 or min(weights) < 0:
        raise ValueError("mixture weights must be a probability vector")
    kinds = {t.kind for t in tables}
    if len(kinds) != 1:
        raise ValueError("cannot mix tables of different kinds")
    vals = {k: sum(w * t[k] for w, t in zip(weights, tables)) for k in _KEYS}
    return TwoTimeTable(vals, kinds.pop(), tables[0].t1, tables[0].t2)


# --------------------------------------------------------------- grid engine

@dataclass(frozen=True)
class HistoryBranches:
    """Grid vectors a = psi(t1), b = psi(t2) and the four C[s1, s2]."""

    a: np.ndarray
    b: np.ndarray
    branch: Mapping[tuple[int, int], np.ndarray]
    dx: float
    x: np.ndarray
    p: np.ndarray
    t1: float
    t2: float

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.vdot(u, v) * self.dx)


def _mask(x: np.ndarray, s: int) -> np.ndarray:
    return (s * x > 0).astype(float)


def _check_times(t1: float, t2: float):
    if not (t2 > t1 >= 0):
        raise ValueError(f"need t2 > t1 >= 0, got t1={t1}, t2={t2}")


def _grid_for(state, t1, t2, grid):
    if isinstance(state, GridWaveFunction):
        return state.spec
    if grid is not None:
        return grid
    return GridSpec.for_state(state, (0.0, t1, t2))


def _state_at(state, spec: GridSpec, t: float, edge_tol: float) -> np.ndarray:
    if isinstance(state, GridWaveFunction):
        amps = free_propagate(state.amplitudes, spec.p, t)
        edge = max(abs(amps[0]), abs(amps[-1]))
        if edge > edge_tol:
            raise ConvergenceError(f"state reaches the grid edge at t={t:g} (|psi| = {edge:.2e})",
                                   error=edge)
        return amps
    return to_grid(state.evolved(t), spec, edge_tol=edge_tol).amplitudes


def branches(state, t1: float, t2: float, grid: GridSpec | None = None,
             edge_tol: float = 1e-8) -> HistoryBranches:
    """Evaluate the four history branches on the grid oracle.

    ``state`` is a :class:`WavepacketState` (sampled analytically at t1 and t2)
    or a :class:`GridWaveFunction` (propagated on its own grid).
    """
    _check_times(t1, t2)
    spec = _grid_for(state, t1, t2, grid)
    x, p = spec.x, spec.p
    a = _state_at(state, spec, t1, edge_tol)
    b = _state_at(state, spec, t2, edge_tol)
    tau = t2 - t1
    out = {}
    for s1 in SIGNS:
        moved = free_propagate(a * _mask(x, s1), p, tau)
        for s2 in SIGNS:
            out[(s1, s2)] = moved * _mask(x, s2)
    return HistoryBranches(a, b, out, spec.dx, x, p, t1, t2)


def _refined(fn, state, t1, t2, grid, refine_tol, edge_tol):
    """Repeat fn on doubled grids until the table changes by less than refine_tol."""
    _check_times(t1, t2)
    spec = _grid_for(state, t1, t2, grid)
    if refine_tol is None or isinstance(state, GridWaveFunction):
        return fn(branches(state, t1, t2, spec, edge_tol))
    prev = fn(branches(state, t1, t2, spec, edge_tol))
    for _ in range(4):
        spec = spec.refined()
        cur = fn(branches(state, t1, t2, spec, edge_tol))
        change = max(abs(cur[k] - prev[k]) for k in _KEYS)
        if change < refine_tol:
            return cur
        prev = cur
    raise ConvergenceError(f"two-time table still changing by {change:.2e} after refinement",
                           estimate=cur, error=change)


def _q_from(br: HistoryBranches) -> TwoTimeTable:
    vals = {k: br.inner(br.b, c).real for k, c in br.branch.items()}
    return TwoTimeTable(vals, "quasi", br.t1, br.t2)


def _p12_from(br: HistoryBranches) -> TwoTimeTable:
    vals = {k: br.inner(c, c).real for k, c in br.branch.items()}
    return TwoTimeTable(vals, "sequential", br.t1, br.t2)


def quasi_probability(state, t1: float, t2: float, grid: GridSpec | None = None,
                      refine_tol: float | None = None, edge_tol: float = 1e-8) -> TwoTimeTable:
    """q(s1, s2) = Re <psi| P_s2(t2) P_s1(t1) |psi>."""
    return _refined(_q_from, state, t1, t2, grid, refine_tol, edge_tol)


def sequential_probability(state, t1: float, t2: float, grid: GridSpec | None = None,
                           refine_tol: float | None = None, edge_tol: float = 1e-8) -> TwoTimeTable:
    """p12(s1, s2) = || P_s2(t2) P_s1(t1) psi ||^2."""
    return _refined(_p12_from, state, t1, t2, grid, refine_tol, edge_tol)


def measured_state(state, t1: float, grid: GridSpec | None = None):
    """Ensemble form of the state after a non-selective measurement at t1.

    Returns [(weight, GridWaveFunction at time t1), ...] for s1 = -1, +1;
    empty branches are omitted.
    """
    spec = _grid_for(state, t1, t1 + 1.0, grid)
    a = _state_at(state, spec, t1, 1e-8)
    out = []
    for s1 in SIGNS:
        piece = a * _mask(spec.x, s1)
        w = float(np.sum(np.abs(piece) ** 2) * spec.dx)
        if w > 0:
            out.append((w, GridWaveFunction.on_grid(spec, piece)))
    return out


def decoherence_functional(state, t1: float, t2: float, s1: int, s1_alt: int, s2: int,
                           grid: GridSpec | None = None) -> complex:
    """D(s1, s2 | s1_alt, s2) = <psi| P_s1_alt(t1) P_s2(t2) P_s1(t1) |psi>."""
    br = branches(state, t1, t2, grid)
    return br.inner(br.branch[(s1_alt, s2)], br.branch[(s1, s2)])


@dataclass(frozen=True)
class DecoherenceEntry:
    s1: int
    s1_alt: int
    s2: int
    value: complex


def decoherence_entries(state, t1: float, t2: float, grid: GridSpec | None = None) -> list[DecoherenceEntry]:
    """All eight D(s1, s2 | s1_alt, s2); diagonal entries are the p12 table."""
    br = branches(state, t1, t2, grid)
    return [DecoherenceEntry(s1, s1_alt, s2, br.inner(br.branch[(s1_alt, s2)], br.branch[(s1, s2)]))
            for s1 in SIGNS for s1_alt in SIGNS for s2 in SIGNS]


def single_time_probability(state, t: float, s: int, grid: GridSpec | None = None) -> float:
    spec = _grid_for(state, t, t + 1.0, grid)
    a = _state_at(state, spec, t, 1e-8)
    return float(np.sum(np.abs(a * _mask(spec.x, s)) ** 2) * spec.dx)


def quasi_probability_forms(basis, t1: float, t2: float, grid: GridSpec | None = None):
    """Hermitian forms of q over superpositions of ``basis`` states.

    Returns (forms, gram) with forms[(s1, s2)][i, j] the matrix of
    (P_s2(t2) P_s1(t1) + h.c.) / 2 between basis states i and j, so that for
    psi = sum_j c_j basis_j one has q(s1, s2) = c^H forms c / c^H gram c.
    """
    _check_times(t1, t2)
    basis = list(basis)
    if grid is None:
        grid = _shared_grid(basis, t1, t2)
    brs = [branches(b, t1, t2, grid) for b in basis]
    dim = len(basis)
    raw = {k: np.zeros((dim, dim), complex) for k in _KEYS}
    gram = np.zeros((dim, dim), complex)
    for i, bi in enumerate(brs):
        for j, bj in enumerate(brs):
            gram[i, j] = bi.inner(bi.a, bj.a)
            for k in _KEYS:
                # <basis_i(t2)| P_s2 U P_s1 |basis_j(t1)>
                raw[k][i, j] = bi.inner(bi.b, bj.branch[k])
    forms = {k: 0.5 * (m + m.conj().T) for k, m in raw.items()}
    return forms, 0.5 * (gram + gram.conj().T)


def _shared_grid(basis, t1, t2) -> GridSpec:
    specs = [GridSpec.for_state(b, (0.0, t1, t2)) for b in basis]
    return GridSpec(max(s.half_width for s in specs), max(s.n for s in specs))


# -------------------------------------------------- operator-level identities

class _Operators:
    """Q1 = Q(t1), Q2 = Q(t2) acting on grid vectors in the Schroedinger picture at t = 0."""

    def __init__(self, state, t1, t2, grid):
        spec = _grid_for(state, t1, t2, grid)
        self.spec = spec
        self.t1, self.t2 = t1, t2
        self.psi = _state_at(state, spec, 0.0, 1e-8)
        self.sign = np.where(spec.x > 0, 1.0, -1.0)

    def Q(self, v, t):
        p = self.spec.p
        return free_propagate(self.sign * free_propagate(v, p, t), p, -t)

    def expect(self, u, v) -> complex:
        return complex(np.vdot(u, v) * self.spec.dx)


def disturbed_mean(state, t1: float, t2: float, grid: GridSpec | None = None) -> float:
    """<Q2^(1)> = <Q2> + <[Q1, Q2] Q1> / 2 = (<Q2> + <Q1 Q2 Q1>) / 2."""
    if t1 == t2:
        ops = _Operators(state, t1, t1 + 1.0, grid)
        return ops.expect(ops.psi, ops.Q(ops.psi, t1)).real
    _check_times(t1, t2)
    ops = _Operators(state, t1, t2, grid)
    psi = ops.psi
    q2 = ops.expect(psi, ops.Q(psi, t2)).real
    q1psi = ops.Q(psi, t1)
    q121 = ops.expect(q1psi, ops.Q(q1psi, t2)).real
    return 0.5 * (q2 + q121)


def lower_bound_witness(state, t1: float, t2: float, s1: int, s2: int,
                        grid: GridSpec | None = None) -> float:
    """(1/8) <(1 + s1 Q1 + s2 Q2)^2 - 1>, identically equal to q(s1, s2) and >= -1/8."""
    _check_times(t1, t2)
    ops = _Operators(state, t1, t2, grid)
    psi = ops.psi
    v = psi + s1 * ops.Q(psi, t1) + s2 * ops.Q(psi, t2)
    return (ops.expect(v, v).real - ops.expect(psi, psi).real) / 8.0


def witness_table(state, t1: float, t2: float, grid: GridSpec | None = None) -> dict:
    """lower_bound_witness for all four cells, sharing the two operator applications."""
    _check_times(t1, t2)
    ops = _Operators(state, t1, t2, grid)
    psi = ops.psi
    q1psi, q2psi = ops.Q(psi, t1), ops.Q(psi, t2)
    norm = ops.expect(psi, psi).real
    out = {}
    for s1 in SIGNS:
        for s2 in SIGNS:
            v = psi + s1 * q1psi + s2 * q2psi
            out[(s1, s2)] = (ops.expect(v, v).real - norm) / 8.0
    return out


def linear_positivity(state, t1: float, t2: float, grid: GridSpec | None = None):
    """Per cell: (|Re D(s1,s2|-s1,s2)| <= p12(s1,s2), q, p12)."""
    br = branches(state, t1, t2, grid)
    out = {}
    for (s1, s2), c in br.branch.items():
        p12 = br.inner(c, c).real
        off = br.inner(br.branch[(-s1, s2)], c).real
        out[(s1, s2)] = (abs(off) <= p12, p12 + off, p12)
    return out


def infinity_norm_distance(a: TwoTimeTable, b: TwoTimeTable) -> float:
    return max(abs(a[k] - b[k]) for k in _KEYS)

