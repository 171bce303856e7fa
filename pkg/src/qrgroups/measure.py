"""Functions on finite groups under normalized counting measure.

Sub-sigma-algebras of a finite probability space with uniform measure are
partitions, so conditional expectation is averaging over cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class GroupFunction:
    """Real function on a group (or product view), stored densely by element index."""

    group: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.group is not None and len(self.values) != self.group.n:
            raise ValueError(f"function has {len(self.values)} values, group has {self.group.n} elements")

    def __len__(self) -> int:
        return len(self.values)

    def integral(self) -> float:
        return integral(self.values)

    @classmethod
    def indicator(cls, group, members) -> "GroupFunction":
        v = np.zeros(group.n)
        v[np.asarray(members, dtype=np.int64)] = 1.0
        return cls(group, v)


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, GroupFunction) else np.asarray(f, dtype=float)


def _like(f, values):
    return GroupFunction(f.group, values) if isinstance(f, GroupFunction) else values


def integral(values) -> float:
    """Integral against uniform probability measure."""
    v = _values(values)
    return float(v.sum()) / len(v)


class Partition:
    """Partition of {0..size-1} into nonempty cells, stored as a cell-id vector."""

    def __init__(self, assignment):
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.ndim != 1 or len(assignment) == 0:
            raise ValueError("partition needs a nonempty 1-d assignment vector")
        # relabel to consecutive ids so every cell is nonempty
        _, self.assignment = np.unique(assignment, return_inverse=True)
        self.assignment = self.assignment.astype(np.int64)
        self.counts = np.bincount(self.assignment)

    @property
    def size(self) -> int:
        return len(self.assignment)

    @property
    def num_cells(self) -> int:
        return len(self.counts)

    def cells(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        return np.split(order, np.cumsum(self.counts)[:-1])

    @classmethod
    def from_cells(cls, cells, size: int) -> "Partition":
        assign = np.full(size, -1, dtype=np.int64)
        for cid, cell in enumerate(cells):
            cell = np.asarray(cell, dtype=np.int64)
            if len(cell) == 0:
                raise ValueError("empty cell")
            if (assign[cell] != -1).any():
                raise ValueError("cells overlap")
            assign[cell] = cid
        if (assign == -1).any():
            raise ValueError("cells do not cover the base set")
        return cls(assign)

    @classmethod
    def trivial(cls, size: int) -> "Partition":
        return cls(np.zeros(size, dtype=np.int64))

    @classmethod
    def singletons(cls, size: int) -> "Partition":
        return cls(np.arange(size))

    @classmethod
    def conjugacy(cls, G) -> "Partition":
        return cls(G.class_of)

    @classmethod
    def random(cls, size: int, rng: np.random.Generator, max_cells: int | None = None) -> "Partition":
        k = int(rng.integers(1, (max_cells or size) + 1))
        return cls(rng.integers(0, k, size=size))


def cond_expectation(f, P: Partition):
    """Average of f over each cell of P."""
    v = _values(f)
    if len(v) != P.size:
        raise ValueError(f"size mismatch: function on {len(v)} points, partition on {P.size}")
    means = np.bincount(P.assignment, weights=v, minlength=P.num_cells) / P.counts
    return _like(f, means[P.assignment])


def class_projection(f, G):
    """Orthogonal projection onto class functions (conditional expectation on classes)."""
    return cond_expectation(f, Partition.conjugacy(G))


def _check_nonneg(arrays, msg):
    for v in arrays:
        if (v < 0).any():
            raise ValueError(msg)


def chu_check(fs, partitions, tol: float = 1e-9) -> tuple[float, float, bool]:
    """Both sides of int f0 prod E(f_i|P_i) >= (int prod_{i=0}^n f_i^(1/(n+1)))^(n+1).

    fs holds f0..fn and partitions holds P1..Pn.
    """
    vals = [_values(f) for f in fs]
    n = len(vals) - 1
    if n < 1 or len(partitions) != n:
        raise ValueError("need f0..fn and n >= 1 partitions")
    if len({len(v) for v in vals} | {P.size for P in partitions}) != 1:
        raise ValueError("functions and partitions live on different base sets")
    _check_nonneg(vals, "Chu requires non-negative functions")

    prod = vals[0].copy()
    for v, P in zip(vals[1:], partitions):
        prod *= cond_expectation(v, P)
    lhs = integral(prod)

    root = np.ones_like(vals[0])
    for v in vals:
        root *= v ** (1.0 / (n + 1))
    rhs = integral(root) ** (n + 1)
    return lhs, rhs, bool(lhs >= rhs - tol)


def quadruple_holder_bound(f0, f1, f2) -> float:
    """(int f0^(1/4) f1^(1/4) f2^(1/4))^4; equals alpha^4 for three copies of a density-alpha indicator."""
    vals = [_values(f) for f in (f0, f1, f2)]
    _check_nonneg(vals, "bound requires non-negative functions")
    return integral((vals[0] * vals[1] * vals[2]) ** 0.25) ** 4


def chu_random_instance(rng: np.random.Generator, n: int, size: int, high: float = 2.0):
    fs = [rng.uniform(0.0, high, size=size) for _ in range(n + 1)]
    parts = [Partition.random(size, rng) for _ in range(n)]
    return fs, parts


def chu_sharpness_search(
    n: int, size: int, seed: int, restarts: int = 20, sweeps: int = 5
) -> dict:
    """Smallest lhs/rhs ratio found over indicator inputs.

    Random starts followed by greedy single-bit flips that lower the ratio.
    Purely exploratory; nothing is claimed about the true infimum.
    """
    rng = np.random.default_rng(seed)

    def ratio(fs, parts):
        lhs, rhs, _ = chu_check(fs, parts)
        return lhs / rhs if rhs > 0 else np.inf

    best = {"ratio": np.inf}
    for _ in range(restarts):
        fs = [(rng.random(size) < 0.5).astype(float) for _ in range(n + 1)]
        parts = [Partition.random(size, rng) for _ in range(n)]
        cur = ratio(fs, parts)
        for _ in range(sweeps):
            improved = False
            for i in range(n + 1):
                for x in range(size):
                    fs[i][x] = 1.0 - fs[i][x]
                    r = ratio(fs, parts)
                    if r < cur:
                        cur, improved = r, True
                    else:
                        fs[i][x] = 1.0 - fs[i][x]
            if not improved:
                break
        if cur < best["ratio"]:
            best = {
                "ratio": float(cur),
                "functions": [f.astype(int).tolist() for f in fs],
                "partitions": [P.assignment.tolist() for P in parts],
            }
    return best
