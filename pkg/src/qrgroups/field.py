"""Finite fields GF(p^k) with elements encoded as integers 0..q-1.

An element is the polynomial ``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` over GF(p)
and is stored as the integer ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``.  In
particular 0 and 1 are the additive and multiplicative identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_ORDER = 1 << 16
# above this the q x q tables get materialized only on request
DENSE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m (coefficients low to high)."""
    a = _trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * mc) % p
        _trim(a)
    return a


def _polymul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _monic_polys(deg: int, p: int):
    """Monic polynomials of degree deg, lexicographic in (c_{deg-1}, ..., c_0)."""
    for t in range(p**deg):
        coeffs = [(t // p**i) % p for i in range(deg)]
        yield coeffs + [1]


def _is_irreducible(f: list[int], p: int) -> bool:
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(d, p):
            if not _polymod(f, g, p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for f in _monic_polys(k, p):
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True, eq=False)
class PrimePowerField:
    p: int
    k: int
    modulus: tuple[int, ...]  # monic, coefficients low to high
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def generator(self) -> int:
        return int(self.exp_table[1]) if self.q > 2 else 1

    @cached_property
    def digits(self) -> np.ndarray:
        idx = np.arange(self.q)
        return np.stack([(idx // self.p**i) % self.p for i in range(self.k)], axis=1)

    @cached_property
    def _powers(self) -> np.ndarray:
        return self.p ** np.arange(self.k)

    @cached_property
    def labels(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(c) for c in row) for row in self.digits)

    def label(self, a: int) -> str:
        if self.k == 1:
            return str(a)
        terms = []
        for i, c in enumerate(self.labels[a]):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coef = str(c) if (c != 1 or i == 0) else ""
                terms.append(coef + mono)
        return "+".join(reversed(terms)) or "0"

    # -- arithmetic, all vectorized over numpy arrays --

    def add(self, a, b):
        if self.k == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        d = (self.digits[a] + self.digits[b]) % self.p
        return d @ self._powers

    def neg(self, a):
        if self.k == 1:
            return (-np.asarray(a)) % self.p
        return ((-self.digits[a]) % self.p) @ self._powers

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        s = (self.log_table[a] + self.log_table[b]) % (self.q - 1)
        return np.where((a == 0) | (b == 0), 0, self.exp_table[s])

    def inv(self, a):
        return self.inv_table[a]

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    @cached_property
    def add_table(self) -> np.ndarray:
        i = np.arange(self.q)
        return self.add(i[:, None], i[None, :])

    @cached_property
    def mul_table(self) -> np.ndarray:
        i = np.arange(self.q)
        return self.mul(i[:, None], i[None, :])

    @property
    def dense(self) -> bool:
        return self.q <= DENSE_LIMIT


def field_build(p: int, k: int = 1) -> PrimePowerField:
    """Build GF(p^k) using the lexicographically smallest monic irreducible modulus."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be positive")
    q = p**k
    if q > MAX_ORDER:
        raise ValueError(f"field too large: {p}^{k} > {MAX_ORDER}")

    modulus = smallest_irreducible(p, k)
    m = list(modulus)

    def to_poly(a: int) -> list[int]:
        return _trim([(a // p**i) % p for i in range(k)])

    def to_int(c: list[int]) -> int:
        return sum(int(x) * p**i for i, x in enumerate(c))

    def mulmod(a: int, b: int) -> int:
        return to_int(_polymod(_polymul(to_poly(a), to_poly(b), p), m, p))

    def powmod(a: int, e: int) -> int:
        r, base = 1, a
        while e:
            if e & 1:
                r = mulmod(r, base)
            base = mulmod(base, base)
            e >>= 1
        return r

    # smallest primitive element; its existence is the cyclicity check
    order = q - 1
    factors = prime_factors(order) if order > 1 else []
    gen = None
    for cand in range(1, q):
        if all(powmod(cand, order // r) != 1 for r in factors):
            gen = cand
            break
    if gen is None:
        raise ValueError("multiplicative group is not cyclic")

    exp_table = np.zeros(max(order, 1), dtype=np.int64)
    log_table = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(order):
        exp_table[i] = x
        log_table[x] = i
        x = mulmod(x, gen)
    if x != 1 or len(set(exp_table.tolist())) != order:
        raise ValueError("multiplicative group is not cyclic")

    inv_table = np.zeros(q, dtype=np.int64)
    nz = np.arange(1, q)
    inv_table[1:] = exp_table[(-log_table[nz]) % order]

    for arr in (exp_table, log_table, inv_table):
        arr.setflags(write=False)
    return PrimePowerField(p, k, modulus, exp_table, log_table, inv_table)
