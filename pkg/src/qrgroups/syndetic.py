"""Right-syndeticity: fewest right shifts R f needed to cover a finite group."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .patterns import IndicatorSet

EXACT_LIMIT = 360
NODE_LIMIT = 200_000


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass
class CoverResult:
    exact: bool
    K: int
    witness: list[int]
    lower_bound: int
    method: str

    def to_dict(self, labels=None) -> dict:
        wit = [labels[f] for f in self.witness] if labels is not None else self.witness
        return {"K": self.K, "method": self.method, "lower_bound": self.lower_bound, "witness": wit}


def right_shifts(R: IndicatorSet) -> np.ndarray:
    """Boolean matrix whose row f is the membership vector of R f."""
    G = R.base
    r = R.members()
    S = np.zeros((G.n, G.n), dtype=bool)
    S[np.arange(G.n)[:, None], G.mul[r].T] = True
    return S


def _distinct_shifts(S: np.ndarray) -> list[int]:
    """Smallest f for each distinct set R f."""
    seen, reps = set(), []
    for f in range(S.shape[0]):
        key = np.packbits(S[f]).tobytes()
        if key not in seen:
            seen.add(key)
            reps.append(f)
    return reps


def _covers(S: np.ndarray, witness) -> bool:
    return bool(S[list(witness)].any(axis=0).all())


def greedy_cover(S: np.ndarray) -> list[int]:
    """Max-new-coverage greedy; argmax returns the smallest index on ties."""
    n = S.shape[1]
    covered = np.zeros(n, dtype=bool)
    chosen = []
    while not covered.all():
        gains = (S & ~covered).sum(axis=1)
        f = int(np.argmax(gains))
        chosen.append(f)
        covered |= S[f]
    return chosen


def exact_cover(S: np.ndarray, incumbent: list[int], node_limit: int = NODE_LIMIT) -> list[int]:
    """Minimum set cover by depth-first branch and bound.

    Branches on the uncovered element with the fewest candidate shifts.  The
    bound at a node is the larger of ceil(uncovered / best gain) and a greedy
    packing of uncovered elements no two of which share a candidate shift.
    Serial and deterministic.
    """
    n = S.shape[1]
    reps = _distinct_shifts(S)
    masks = [int.from_bytes(np.packbits(S[f], bitorder="little").tobytes(), "little") for f in reps]
    full = (1 << n) - 1
    # per element: bitmask over candidate positions, and the candidate list
    cand_bits = [0] * n
    containing = [[] for _ in range(n)]
    for j, f in enumerate(reps):
        for e in np.flatnonzero(S[f]):
            cand_bits[e] |= 1 << j
            containing[e].append(j)

    best = list(incumbent)
    memo: dict[int, int] = {}
    nodes = 0

    def lower_bound(uncovered: int) -> int:
        used, packed = 0, 0
        u = uncovered
        while u:
            low = u & -u
            e = low.bit_length() - 1
            u ^= low
            if not cand_bits[e] & used:
                used |= cand_bits[e]
                packed += 1
        top = max((m & uncovered).bit_count() for m in masks)
        return max(packed, -(-uncovered.bit_count() // top))

    def search(covered: int, chosen: list[int]):
        nonlocal best, nodes
        if covered == full:
            if len(chosen) < len(best):
                best = sorted(reps[j] for j in chosen)
            return
        nodes += 1
        if nodes > node_limit:
            raise SearchLimitExceeded(f"branch and bound exceeded {node_limit} nodes")
        depth = len(chosen)
        if memo.get(covered, math.inf) <= depth:
            return
        memo[covered] = depth
        uncovered = full & ~covered
        if depth + lower_bound(uncovered) >= len(best):
            return
        # element with fewest candidates
        e, fewest = -1, math.inf
        u = uncovered
        while u:
            low = u & -u
            x = low.bit_length() - 1
            u ^= low
            if len(containing[x]) < fewest:
                e, fewest = x, len(containing[x])
        order = sorted(containing[e], key=lambda j: (-(masks[j] & uncovered).bit_count(), j))
        for j in order:
            chosen.append(j)
            search(covered | masks[j], chosen)
            chosen.pop()
            if depth + 1 >= len(best):
                return

    search(0, [])
    return best


def covering_number(R: IndicatorSet, mode: str = "auto", node_limit: int = NODE_LIMIT) -> CoverResult:
    """Minimal K such that K right shifts of R cover the group."""
    if mode not in ("exact", "greedy", "auto"):
        raise ValueError(f"unknown mode {mode!r}")
    if R.cardinality == 0:
        raise ValueError("empty set is not syndetic")
    G = R.base
    if getattr(G, "mul", None) is None:
        raise ValueError("covering needs a dense group table")
    n = G.n
    lower = -(-n // R.cardinality)
    S = right_shifts(R)
    greedy = greedy_cover(S)

    if mode == "exact" and n > EXACT_LIMIT:
        raise ValueError(f"exact mode limited to groups of order <= {EXACT_LIMIT}")
    run_exact = mode == "exact" or (mode == "auto" and n <= EXACT_LIMIT)
    witness, exact = greedy, False
    if run_exact and len(greedy) > lower:
        try:
            witness, exact = exact_cover(S, greedy, node_limit), True
        except SearchLimitExceeded:
            if mode == "exact":
                raise
    elif run_exact:
        exact = True  # greedy already meets the counting bound
    if not _covers(S, witness):
        raise AssertionError("cover witness does not cover the group")
    witness = sorted(witness) if exact else witness
    return CoverResult(exact, len(witness), witness, lower, "exact" if exact else "greedy")
