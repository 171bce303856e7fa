import itertools

import numpy as np
import pytest

from qrgroups.field import MAX_ORDER, field_build, is_prime

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]


def gf4_mul_oracle(a, b):
    """Carry-less product of 2-bit polynomials reduced mod x^2 + x + 1."""
    prod = 0
    for i in range(2):
        if (b >> i) & 1:
            prod ^= a << i
    if prod & 0b100:
        prod ^= 0b111
    return prod


def test_gf5_inverse_of_two():
    F = field_build(5, 1)
    assert int(F.inv_table[2]) == 3
    assert int(F.mul_table[2, 3]) == 1


def test_gf4_matches_polynomial_oracle():
    F = field_build(2, 2)
    assert F.modulus == (1, 1, 1)
    expected = np.array([[gf4_mul_oracle(a, b) for b in range(4)] for a in range(4)])
    assert np.array_equal(F.mul_table, expected)
    # x is index 2, x + 1 is index 3
    assert int(F.mul_table[2, 3]) == 1
    assert int(F.inv_table[2]) == 3


@pytest.mark.parametrize("p,k", [(4, 1), (1, 1), (9, 2)])
def test_non_prime_characteristic(p, k):
    with pytest.raises(ValueError, match="not prime"):
        field_build(p, k)


def test_field_too_large():
    with pytest.raises(ValueError, match="field too large"):
        field_build(2, 17)
    assert 2**16 == MAX_ORDER


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _roots(coeffs, p):
    return [x for x in range(p) if sum(c * x**i for i, c in enumerate(coeffs)) % p == 0]


@pytest.mark.parametrize("p,k,expected", [(2, 3, (1, 1, 0, 1)), (3, 2, (1, 0, 1)), (2, 2, (1, 1, 1)), (7, 1, (0, 1))])
def test_modulus_is_smallest_irreducible(p, k, expected):
    F = field_build(p, k)
    assert F.modulus == expected
    # degree <= 3: irreducible iff rootless; every lexicographically smaller candidate has a root
    assert not _roots(expected, p) or k == 1
    for t in range(p**k):
        cand = tuple((t // p**i) % p for i in range(k)) + (1,)
        if cand == expected:
            break
        assert _roots(cand, p)


@pytest.mark.parametrize("p,k", SMALL)
def test_axioms_exhaustive(p, k):
    F = field_build(p, k)
    q = F.q
    A, M = F.add_table, F.mul_table
    assert np.array_equal(A, A.T) and np.array_equal(M, M.T)
    for a, b in itertools.product(range(q), repeat=2):
        assert np.array_equal(A[A[a, b]], A[a][A[b]])
        assert np.array_equal(M[M[a, b]], M[a][M[b]])
        assert np.array_equal(M[a][A[b]], A[M[a, b]][M[a]])
    assert np.array_equal(A[0], np.arange(q))
    assert np.array_equal(M[1], np.arange(q))
    nz = np.arange(1, q)
    assert (M[nz, F.inv_table[nz]] == 1).all()


@pytest.mark.parametrize("p,k", SMALL + [(2, 8), (3, 5), (5, 3)])
def test_multiplicative_group_cyclic_and_frobenius(p, k):
    F = field_build(p, k)
    q = F.q
    g = F.generator
    powers = {F.power(g, e) for e in range(q - 1)}
    assert powers == set(range(1, q))
    x = np.arange(q)
    frob = np.array([F.power(int(a), p) for a in x])
    a, b = np.meshgrid(x, x)
    assert np.array_equal(frob[F.add(a, b)], F.add(frob[a], frob[b]))
    assert np.array_equal(frob[F.mul(a, b)], F.mul(frob[a], frob[b]))


@pytest.mark.parametrize("p,k", [(2, 5), (3, 3), (5, 2), (17, 1), (2, 8)])
def test_axioms_sampled(p, k, rng):
    F = field_build(p, k)
    a, b, c = rng.integers(0, F.q, size=(3, 10_000))
    assert np.array_equal(F.add(F.add(a, b), c), F.add(a, F.add(b, c)))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert np.array_equal(F.sub(F.add(a, b), b), a)


def test_build_is_deterministic():
    F1, F2 = field_build(3, 2), field_build(3, 2)
    assert F1.modulus == F2.modulus
    assert np.array_equal(F1.mul_table, F2.mul_table)
    assert F1.labels[3] == (0, 1)
    assert F1.label(3) == "x"
