"""Finite groups as dense Cayley tables over element indices 0..n-1.

Index 0 is always the identity.  Element order is the construction
enumeration order and is never changed after a table is built, so indicator
sets and cached tables stay comparable across runs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .field import PrimePowerField, field_build, is_prime

FAMILIES = ("cyclic", "symmetric", "sl2", "psl2", "product", "custom")

MAX_CYCLIC = 10_000
MAX_FIELD_FOR_SL2 = 16
# dense n x n tables above this many elements would need > 64 MiB
DENSE_PRODUCT_LIMIT = 4096
ASSOC_EXHAUSTIVE_LIMIT = 256


@dataclass(eq=False)
class GroupTable:
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    conj_classes: tuple[tuple[int, ...], ...]
    family: str = "custom"
    factors: tuple["GroupTable", "GroupTable"] | None = field(default=None, repr=False)

    identity = 0

    @property
    def n(self) -> int:
        return int(self.mul.shape[0])

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"GroupTable(family={self.family!r}, n={self.n}, classes={len(self.conj_classes)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupTable):
            return NotImplemented
        return (
            self.family == other.family
            and np.array_equal(self.mul, other.mul)
            and np.array_equal(self.inv, other.inv)
            and self.labels == other.labels
            and self.conj_classes == other.conj_classes
        )

    def op(self, a, b):
        return self.mul[a, b]

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for cid, cell in enumerate(self.conj_classes):
            out[list(cell)] = cid
        return out

    @property
    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.conj_classes]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def left_perm(self, g: int) -> np.ndarray:
        """Index permutation x -> g x."""
        return self.mul[g]

    def right_perm(self, g: int) -> np.ndarray:
        """Index permutation x -> x g."""
        return self.mul[:, g]


class ProductView:
    """Lazy direct product G x H; element (x, y) has index x*|H| + y."""

    family = "product"
    identity = 0

    def __init__(self, G: GroupTable, H: GroupTable):
        self.factors = (G, H)
        self.n = G.n * H.n

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        G, H = self.factors
        return f"ProductView({G!r}, {H!r})"

    def split(self, a):
        nh = self.factors[1].n
        return np.asarray(a) // nh, np.asarray(a) % nh

    def op(self, a, b):
        G, H = self.factors
        ga, ha = self.split(a)
        gb, hb = self.split(b)
        return G.mul[ga, gb] * H.n + H.mul[ha, hb]

    @cached_property
    def inv(self) -> np.ndarray:
        G, H = self.factors
        return (G.inv[:, None] * H.n + H.inv[None, :]).ravel()

    @property
    def labels(self):
        G, H = self.factors
        return _ProductLabels(G.labels, H.labels)

    @cached_property
    def conj_classes(self) -> tuple[tuple[int, ...], ...]:
        return _product_classes(*self.factors)

    @property
    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.conj_classes]


class _ProductLabels(Sequence):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def __len__(self):
        return len(self.a) * len(self.b)

    def __getitem__(self, i):
        x, y = divmod(int(i), len(self.b))
        return f"({self.a[x]}, {self.b[y]})"


# ---------------------------------------------------------------- classes


def _sort_classes(cells) -> tuple[tuple[int, ...], ...]:
    cells = [tuple(sorted(int(v) for v in c)) for c in cells]
    cells.sort(key=lambda c: (len(c), c[0]))
    return tuple(cells)


def conjugacy_classes(G: GroupTable) -> tuple[tuple[int, ...], ...]:
    """Partition into conjugacy classes by orbit expansion under all conjugations.

    Classes are sorted by (size, smallest member), which puts {identity} first.
    """
    mul, inv = G.mul, G.inv
    n = mul.shape[0]
    seen = np.zeros(n, dtype=bool)
    cells = []
    for x in range(n):
        if seen[x]:
            continue
        orbit = np.unique(mul[mul[:, x], inv])
        seen[orbit] = True
        cells.append(orbit)
    return _sort_classes(cells)


def _product_classes(G, H) -> tuple[tuple[int, ...], ...]:
    nh = H.n
    cells = []
    for cg in G.conj_classes:
        a = np.asarray(cg)[:, None] * nh
        for ch in H.conj_classes:
            cells.append((a + np.asarray(ch)[None, :]).ravel())
    return _sort_classes(cells)


# ------------------------------------------------------------ validation


def verify_group(G: GroupTable, rng: np.random.Generator | None = None, samples: int = 100_000) -> None:
    """Raise ValueError unless the table satisfies the group axioms.

    Associativity is checked on all triples up to 256 elements and on random
    triples above that.
    """
    mul, inv, n = G.mul, G.inv, G.n
    ref = np.arange(n)
    if not np.array_equal(mul[0], ref) or not np.array_equal(mul[:, 0], ref):
        raise ValueError("index 0 is not the identity")
    srt = np.sort(mul, axis=1)
    if not (srt == ref).all():
        raise ValueError("rows are not permutations")
    srt = np.sort(mul, axis=0)
    if not (srt == ref[:, None]).all():
        raise ValueError("columns are not permutations")
    if (mul[ref, inv] != 0).any() or (mul[inv, ref] != 0).any():
        raise ValueError("inverse table is wrong")
    if n <= ASSOC_EXHAUSTIVE_LIMIT:
        for a in range(n):
            if not np.array_equal(mul[mul[a]], mul[a][mul]):
                raise ValueError("multiplication is not associative")
    else:
        rng = rng or np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, samples))
        if (mul[mul[a, b], c] != mul[a, mul[b, c]]).any():
            raise ValueError("multiplication is not associative")

    cells = G.conj_classes
    flat = sorted(v for c in cells for v in c)
    if flat != list(range(n)):
        raise ValueError("conjugacy classes do not partition the group")
    cls = G.class_of
    for cell in cells:
        x = cell[0]
        orbit = mul[mul[:, x], inv]
        if (cls[orbit] != cls[x]).any() or len(np.unique(orbit)) != len(cell):
            raise ValueError("conjugacy classes are wrong")


# ----------------------------------------------------------- constructors


def _finish(mul, labels, family, factors=None, classes=None) -> GroupTable:
    mul = np.ascontiguousarray(mul, dtype=np.int32)
    n = mul.shape[0]
    # row x of mul hits 0 exactly once, at column inv[x]
    inv = np.argmin(mul, axis=1).astype(np.int32)
    G = GroupTable(mul, inv, tuple(labels), (), family, factors)
    G.conj_classes = classes if classes is not None else conjugacy_classes(G)
    mul.setflags(write=False)
    inv.setflags(write=False)
    assert n == len(G.labels)
    return G


def build_cyclic(n: int) -> GroupTable:
    if not 1 <= n <= MAX_CYCLIC:
        raise ValueError(f"cyclic order must be in 1..{MAX_CYCLIC}, got {n}")
    i = np.arange(n)
    mul = (i[:, None] + i[None, :]) % n
    return _finish(mul, [str(v) for v in range(n)], "cyclic")


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen, parts = set(), []
    for s in range(len(perm)):
        if s in seen or perm[s] == s:
            continue
        cyc, x = [], s
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def build_symmetric(m: int) -> GroupTable:
    """All permutations of m points, (st)(i) = s(t(i))."""
    if not 2 <= m <= 7:
        raise ValueError(f"symmetric degree must be in 2..7, got {m}")
    perms = list(itertools.permutations(range(m)))  # lexicographic, identity first
    P = np.array(perms, dtype=np.int64)
    weights = m ** np.arange(m - 1, -1, -1)
    keys = P @ weights  # increasing in lexicographic order
    n = len(perms)
    mul = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        comp = P[s][P]  # row t: i -> P[s][P[t][i]]
        mul[s] = np.searchsorted(keys, comp @ weights)
    return _finish(mul, [_cycle_label(p) for p in perms], "symmetric")


def _sl2_elements(F: PrimePowerField) -> np.ndarray:
    q = F.q
    grid = np.indices((q, q, q, q)).reshape(4, -1)
    a, b, c, d = grid
    det = F.sub(F.mul(a, d), F.mul(b, c))
    mats = grid[:, det == 1].T
    ident = np.array([1, 0, 0, 1])
    is_id = (mats == ident).all(axis=1)
    return np.concatenate([mats[is_id], mats[~is_id]])


def _matmul(F: PrimePowerField, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Entrywise-broadcast 2x2 products; X, Y have trailing axis (a, b, c, d)."""
    a1, b1, c1, d1 = (X[..., i] for i in range(4))
    a2, b2, c2, d2 = (Y[..., i] for i in range(4))
    return np.stack(
        [
            F.add(F.mul(a1, a2), F.mul(b1, c2)),
            F.add(F.mul(a1, b2), F.mul(b1, d2)),
            F.add(F.mul(c1, a2), F.mul(d1, c2)),
            F.add(F.mul(c1, b2), F.mul(d1, d2)),
        ],
        axis=-1,
    )


def _matrix_group(F: PrimePowerField, mats: np.ndarray, canon, family: str) -> GroupTable:
    q = F.q
    w = np.array([q**3, q**2, q, 1])
    lookup = np.full(q**4, -1, dtype=np.int64)
    lookup[mats @ w] = np.arange(len(mats))
    n = len(mats)
    mul = np.empty((n, n), dtype=np.int32)
    # chunk rows to bound memory at n^2 * 4 entries per step
    step = max(1, 400_000 // n)
    for r0 in range(0, n, step):
        prod = _matmul(F, mats[r0 : r0 + step, None, :], mats[None, :, :])
        mul[r0 : r0 + step] = lookup[canon(prod) @ w]
    if (mul < 0).any():
        raise AssertionError("matrix product left the enumerated set")

    def lab(m):
        a, b, c, d = (F.label(int(v)) for v in m)
        return f"[[{a},{b}],[{c},{d}]]"

    return _finish(mul, [lab(m) for m in mats], family)


def _check_field(F: PrimePowerField):
    if F.q > MAX_FIELD_FOR_SL2:
        raise ValueError(f"field order {F.q} exceeds {MAX_FIELD_FOR_SL2}")


def build_sl2(F: PrimePowerField) -> GroupTable:
    _check_field(F)
    return _matrix_group(F, _sl2_elements(F), lambda m: m, "sl2")


def _psl_canon(F: PrimePowerField):
    q = F.q
    w = np.array([q**3, q**2, q, 1])

    def canon(m):
        neg = F.neg(m)
        # lexicographic on entry tuples == numeric on base-q keys
        keep = (m @ w) <= (neg @ w)
        return np.where(keep[..., None], m, neg)

    return canon


def build_psl2(F: PrimePowerField) -> GroupTable:
    """SL(2,q)/{+-I}, represented by the lexicographically smaller of M, -M."""
    _check_field(F)
    mats = _sl2_elements(F)
    canon = _psl_canon(F)
    mats = mats[(canon(mats) == mats).all(axis=1)]
    return _matrix_group(F, mats, canon, "psl2")


def build_product(G: GroupTable, H: GroupTable) -> GroupTable | ProductView:
    n = G.n * H.n
    if n >= 2**32:
        raise ValueError("product order overflows the u32 index space")
    if n > DENSE_PRODUCT_LIMIT:
        return ProductView(G, H)
    i = np.arange(n)
    gi, hi = i // H.n, i % H.n
    mul = G.mul[gi[:, None], gi[None, :]].astype(np.int64) * H.n + H.mul[hi[:, None], hi[None, :]]
    labels = [f"({G.labels[x]}, {H.labels[y]})" for x, y in zip(gi, hi)]
    return _finish(mul, labels, "product", factors=(G, H), classes=_product_classes(G, H))


def from_table(mul, labels=None, family: str = "custom") -> GroupTable:
    mul = np.asarray(mul)
    labels = labels or [str(i) for i in range(mul.shape[0])]
    G = _finish(mul, labels, family)
    verify_group(G)
    return G


# ----------------------------------------------------------- subgroups


def subgroup_generated(G: GroupTable, gens: Sequence[int]) -> np.ndarray:
    """Sorted element indices of the subgroup generated by gens."""
    members = {0}
    frontier = [0]
    gens = [int(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.mul[x, g])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return np.array(sorted(members), dtype=np.int64)


def right_cosets(G: GroupTable, H: Sequence[int]) -> list[np.ndarray]:
    """Right cosets Hg, ordered by smallest member."""
    H = np.asarray(H)
    seen = np.zeros(G.n, dtype=bool)
    out = []
    for g in range(G.n):
        if not seen[g]:
            coset = np.sort(G.mul[H, g])
            seen[coset] = True
            out.append(coset)
    return out


# ----------------------------------------------------------- group specs


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                break
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r == 1:
                return p, k
            break
    raise ValueError(f"{q} is not a prime power")


def parse_group_spec(spec: str) -> GroupTable | ProductView:
    """Build a group from 'cyclic:12', 'sym:4', 'sl2:5', 'psl2:7', 'prod:<spec>'."""
    spec = spec.strip()
    kind, _, arg = spec.partition(":")
    if kind == "prod":
        base = parse_group_spec(arg)
        return build_product(base, base)
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"bad group spec {spec!r}") from None
    if kind == "cyclic":
        return build_cyclic(value)
    if kind == "sym":
        return build_symmetric(value)
    if kind in ("sl2", "psl2"):
        F = field_build(*_prime_power(value))
        return build_sl2(F) if kind == "sl2" else build_psl2(F)
    raise ValueError(f"unknown group family in spec {spec!r}")


def sl2_order(q: int) -> int:
    return q * (q * q - 1)


def psl2_order(q: int) -> int:
    return sl2_order(q) // math.gcd(2, q - 1)
