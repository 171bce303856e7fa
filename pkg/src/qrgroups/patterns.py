"""Counting corners in G, triangles in G x G, and the triple-correlation discrepancy.

Every counter has a fast path (packed 64-bit words, AND, popcount) and a
naive loop used as an oracle in tests.  Product-group indices follow
(x, y) -> x*|G| + y.

Triangle conventions for g in G:

* ``"pattern"``: (x, y), (g x, y), (g x, g y) all in A.
* ``"literal"``: (x, y), (x, g y), (g x, g y) all in A, i.e.
  A n (1,g)^-1 A n (g,g)^-1 A.  This equals the pattern count of the
  transposed set.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .measure import _values, class_projection, integral

CONVENTIONS = ("pattern", "literal")


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean array along its last axis into little-endian uint64 words."""
    packed = np.packbits(bits, axis=-1, bitorder="little")
    pad = (-packed.shape[-1]) % 8
    if pad:
        widths = [(0, 0)] * (packed.ndim - 1) + [(0, pad)]
        packed = np.pad(packed, widths)
    return np.ascontiguousarray(packed).view("<u8")


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum(dtype=np.int64))


class IndicatorSet:
    """Membership vector of a subset of a group or product group."""

    def __init__(self, base, bits):
        bits = np.ascontiguousarray(bits, dtype=bool)
        if bits.shape != (base.n,):
            raise ValueError(f"expected {base.n} membership bits, got shape {bits.shape}")
        bits.setflags(write=False)
        self.base = base
        self.bits = bits
        self.cardinality = int(np.count_nonzero(bits))

    @classmethod
    def from_indices(cls, base, members) -> "IndicatorSet":
        bits = np.zeros(base.n, dtype=bool)
        members = np.asarray(list(members), dtype=np.int64)
        if len(members) and (members.min() < 0 or members.max() >= base.n):
            raise ValueError("element index out of range")
        bits[members] = True
        return cls(base, bits)

    @classmethod
    def from_pairs(cls, base, pairs) -> "IndicatorSet":
        G, H = _factors(base)
        idx = [int(x) * H.n + int(y) for x, y in pairs]
        return cls.from_indices(base, idx)

    @classmethod
    def full(cls, base) -> "IndicatorSet":
        return cls(base, np.ones(base.n, dtype=bool))

    @classmethod
    def empty(cls, base) -> "IndicatorSet":
        return cls(base, np.zeros(base.n, dtype=bool))

    @property
    def size(self) -> int:
        return self.base.n

    @property
    def density(self) -> float:
        return self.cardinality / self.base.n

    @property
    def words(self) -> np.ndarray:
        return _pack(self.bits)

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def matrix(self) -> np.ndarray:
        """For sets in G x H, the |G| x |H| membership matrix."""
        G, H = _factors(self.base)
        return self.bits.reshape(G.n, H.n)

    def transpose(self) -> "IndicatorSet":
        if not _is_square(self.base):
            raise ValueError("transpose needs a square product base")
        return IndicatorSet(self.base, self.matrix().T.ravel())

    def __and__(self, other: "IndicatorSet") -> "IndicatorSet":
        return IndicatorSet(self.base, self.bits & other.bits)

    def __le__(self, other: "IndicatorSet") -> bool:
        return bool((self.bits <= other.bits).all())

    def __eq__(self, other) -> bool:
        return isinstance(other, IndicatorSet) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        return f"IndicatorSet(size={self.size}, cardinality={self.cardinality})"


def _factors(base):
    factors = getattr(base, "factors", None)
    if factors is None:
        raise ValueError("set is not over a product group")
    return factors


def _is_square(base) -> bool:
    factors = getattr(base, "factors", None)
    if factors is None:
        return False
    G, H = factors
    return G is H or G == H


def _square_base(A: IndicatorSet):
    if not _is_square(A.base):
        raise ValueError("triangle counting needs a set in G x G")
    return A.base.factors[0]


def _plain_base(A: IndicatorSet):
    if getattr(A.base, "mul", None) is None:
        raise ValueError("corner counting needs a set in a dense group table")
    return A.base


def _check_g(G, g: int) -> int:
    g = int(g)
    if not 0 <= g < G.n:
        raise ValueError(f"element index {g} out of range for group of order {G.n}")
    return g


# ---------------------------------------------------------------- corners


def corner_count(A: IndicatorSet, g: int) -> int:
    """|A n gA n Ag| = #{x : x, g^-1 x, x g^-1 all in A}."""
    G = _plain_base(A)
    gi = int(G.inv[_check_g(G, g)])
    left = _pack(A.bits[G.mul[gi]])
    right = _pack(A.bits[G.mul[:, gi]])
    return popcount(A.words & left & right)


def corner_count_naive(A: IndicatorSet, g: int) -> int:
    G = _plain_base(A)
    mul = G.mul.tolist()
    S = set(A.members().tolist())
    gi = int(G.inv[g])
    return sum(1 for x in range(G.n) if x in S and mul[gi][x] in S and mul[x][gi] in S)


@dataclass
class CornerProfile:
    counts: np.ndarray
    order: int
    density: float
    eps: float | None = None
    in_band: int | None = None  # #{g : a^3 - eps <= count/|G| <= a^2 + eps}
    positive_in_A: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def corner_profile(A: IndicatorSet, eps: float | None = None) -> CornerProfile:
    G = _plain_base(A)
    base = A.words
    counts = np.empty(G.n, dtype=np.int64)
    for g in range(G.n):
        gi = G.inv[g]
        counts[g] = popcount(base & _pack(A.bits[G.mul[gi]]) & _pack(A.bits[G.mul[:, gi]]))
    alpha = A.density
    prof = CornerProfile(counts, G.n, alpha, eps)
    if eps is not None:
        dens = counts / G.n
        prof.in_band = int(((dens >= alpha**3 - eps) & (dens <= alpha**2 + eps)).sum())
    prof.positive_in_A = np.flatnonzero(A.bits & (counts > 0))
    return prof


# -------------------------------------------------------------- triangles


class _TriangleCounter:
    """Per-g counting with the packed rows of A computed once."""

    def __init__(self, A: IndicatorSet, convention: str = "pattern"):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        self.G = _square_base(A)
        self.M = A.matrix()
        self.P = _pack(self.M)
        self.convention = convention

    def count(self, g: int) -> int:
        L = self.G.mul[g]  # x -> g x
        both = _pack(self.M[L][:, L])  # row x: (gx, gy) in A
        if self.convention == "pattern":
            first = self.P[L]  # row x: (gx, y) in A
        else:
            first = _pack(self.M[:, L])  # row x: (x, gy) in A
        return popcount(self.P & first & both)


def triangle_count(A: IndicatorSet, g: int, convention: str = "pattern") -> int:
    counter = _TriangleCounter(A, convention)
    return counter.count(_check_g(counter.G, g))


def triangle_count_naive(A: IndicatorSet, g: int, convention: str = "pattern") -> int:
    G = _square_base(A)
    n = G.n
    mul = G.mul.tolist()
    S = {divmod(int(i), n) for i in A.members()}
    total = 0
    for x in range(n):
        gx = mul[g][x]
        for y in range(n):
            if (x, y) not in S:
                continue
            gy = mul[g][y]
            second = (gx, y) if convention == "pattern" else (x, gy)
            if second in S and (gx, gy) in S:
                total += 1
    return total


def triangle_count_shifted(A: IndicatorSet, g: int, convention: str = "pattern") -> int:
    """Same count via generic three-way intersection of translated sets.

    Translations use the product group's own multiplication rather than
    per-coordinate row permutations.
    """
    G = _square_base(A)
    P = A.base
    idx = np.arange(P.n)
    e = 0
    first = g * G.n + e if convention == "pattern" else e * G.n + g
    s1 = A.bits[P.op(np.full(P.n, first), idx)]
    s2 = A.bits[P.op(np.full(P.n, g * G.n + g), idx)]
    return popcount(_pack(A.bits) & _pack(s1) & _pack(s2))


def triangle_profile(A: IndicatorSet, convention: str = "pattern", workers: int = 1) -> np.ndarray:
    """triangle_count for every g; each g writes its own slot, so workers do not affect results."""
    counter = _TriangleCounter(A, convention)
    n = counter.G.n
    out = np.zeros(n, dtype=np.int64)
    if A.cardinality == 0:
        return out

    def run(chunk):
        for g in chunk:
            out[g] = counter.count(g)

    chunks = np.array_split(np.arange(n), max(1, workers))
    if workers <= 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(run, chunks))
    return out


def triangle_profile_naive(A: IndicatorSet, convention: str = "pattern") -> np.ndarray:
    G = _square_base(A)
    return np.array([triangle_count_naive(A, g, convention) for g in range(G.n)], dtype=np.int64)


def return_set(
    A: IndicatorSet,
    threshold: float | None = None,
    *,
    eps: float | None = None,
    alpha: float | None = None,
    convention: str = "pattern",
    profile: np.ndarray | None = None,
) -> IndicatorSet:
    """{g : triangle_count(A, g) / |G|^2 > threshold}, strict inequality.

    With no explicit threshold, uses alpha^4 - eps where alpha defaults to the
    density of A.  That default may be negative, in which case every g returns.
    """
    G = _square_base(A)
    if threshold is None:
        if eps is None:
            raise ValueError("give either threshold or eps")
        a = A.density if alpha is None else alpha
        threshold = a**4 - eps
    elif not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    if profile is None:
        profile = triangle_profile(A, convention)
    return IndicatorSet(G, profile / G.n**2 > threshold)


# ----------------------------------------------------------------- mixing


@dataclass
class MixingResult:
    delta: float
    per_g: np.ndarray
    main_term: float
    D: int | None = None
    austin_bound: float | None = None
    bound_holds: bool | None = None
    vacuous: bool | None = None


def _check_sup(vals, tol=1e-12):
    for v in vals:
        if np.abs(v).max(initial=0.0) > 1.0 + tol:
            raise ValueError("functions must be bounded in absolute value by 1")


def _mixing_result(per_g, main, D) -> MixingResult:
    delta = float(per_g.sum()) / len(per_g)
    res = MixingResult(delta, per_g, main)
    if D is not None:
        res.D = int(D)
        res.austin_bound = 4.0 * D ** (-1.0 / 8.0)
        res.bound_holds = delta <= res.austin_bound
        # |correlation| <= 1 and |main term| <= 1, so delta <= 2 always
        res.vacuous = res.austin_bound >= 2.0
    return res


def mixing_discrepancy(f1, f2, f3, G, D: int | None = None) -> MixingResult:
    """Mean over g of |int f1(x) f2(xg) f3(gx) dx - int f1 * int f2 E(f3 | classes)|."""
    v1, v2, v3 = (_values(f) for f in (f1, f2, f3))
    _check_sup((v1, v2, v3))
    n = G.n
    if not len(v1) == len(v2) == len(v3) == n:
        raise ValueError("functions must live on G")
    main = integral(v1) * integral(v2 * class_projection(v3, G))
    # column g: f2(x g) * f3(g x) over rows x
    prod = v2[G.mul] * v3[G.mul.T]
    corr = (v1 @ prod) / n
    return _mixing_result(np.abs(corr - main), main, D)


def mixing_discrepancy_naive(f1, f2, f3, G, D: int | None = None) -> MixingResult:
    v1, v2, v3 = (_values(f).tolist() for f in (f1, f2, f3))
    _check_sup([np.asarray(v) for v in (v1, v2, v3)])
    n = G.n
    mul = G.mul.tolist()
    cls = G.class_of.tolist()
    sums = {}
    for x in range(n):
        sums.setdefault(cls[x], []).append(v3[x])
    proj = [sum(sums[cls[x]]) / len(sums[cls[x]]) for x in range(n)]
    main = (sum(v1) / n) * (sum(a * b for a, b in zip(v2, proj)) / n)
    per_g = []
    for g in range(n):
        s = 0.0
        for x in range(n):
            s += v1[x] * v2[mul[x][g]] * v3[mul[g][x]]
        per_g.append(abs(s / n - main))
    return _mixing_result(np.array(per_g), main, D)
