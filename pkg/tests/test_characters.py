import itertools

import numpy as np
import pytest

from conftest import group
from qrgroups.characters import (
    CharacterTableError,
    character_table,
    class_matrices,
    quasirandomness_degree,
)
from qrgroups.groups import build_cyclic


def structure_constants_oracle(G):
    """a_ijk by looping over all pairs (x, y) with x y = z_k."""
    cls = G.class_of
    r = len(G.conj_classes)
    a = np.zeros((r, r, r), dtype=np.int64)
    for k, cell in enumerate(G.conj_classes):
        z = cell[0]
        for x, y in itertools.product(range(G.n), repeat=2):
            if G.mul[x, y] == z:
                a[cls[x], cls[y], k] += 1
    return a


def commutator_subgroup_order(G):
    gens = {int(G.mul[G.mul[a, b], G.mul[G.inv[a], G.inv[b]]]) for a in range(G.n) for b in range(G.n)}
    members, frontier = {0}, [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.mul[x, g])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(members)


def test_trivial_and_c2_constants():
    assert class_matrices(build_cyclic(1)).tolist() == [[[1]]]
    M = class_matrices(build_cyclic(2))
    assert M[1][1, 0] == 1 and M[1][1, 1] == 0 and M[1][0, 1] == 1


@pytest.mark.parametrize("spec", ["sym:3", "sym:4", "cyclic:5"])
def test_structure_constants_brute_force(spec):
    G = group(spec)
    assert np.array_equal(class_matrices(G), structure_constants_oracle(G))


@pytest.mark.parametrize("spec", ["sym:4", "psl2:5", "sl2:5"])
def test_class_matrices_commute(spec):
    M = class_matrices(group(spec))
    for i, j in itertools.combinations(range(M.shape[0]), 2):
        assert np.array_equal(M[i] @ M[j], M[j] @ M[i])


@pytest.mark.parametrize(
    "spec,degrees",
    [
        ("cyclic:4", (1, 1, 1, 1)),
        ("sym:3", (1, 1, 2)),
        ("sym:4", (1, 1, 2, 3, 3)),
        ("sl2:3", (1, 1, 1, 2, 2, 2, 3)),
        ("psl2:5", (1, 3, 3, 4, 5)),
        ("sl2:5", (1, 2, 2, 3, 3, 4, 4, 5, 6)),
    ],
)
def test_degrees(spec, degrees):
    G = group(spec)
    T = character_table(G)
    assert T.degrees == degrees
    # independent consistency: sum of squares, class count, linear characters = |G/G'|
    assert sum(d * d for d in degrees) == G.n
    assert len(degrees) == len(G.conj_classes)
    assert all(G.n % d == 0 for d in degrees)
    assert degrees.count(1) == G.n // commutator_subgroup_order(G)
    assert T.orthogonality_error() < 1e-6


def test_psl2_5_degrees_unique_by_enumeration():
    # perfect, 5 classes, order 60, degrees dividing 60: only one solution
    divisors = [d for d in range(2, 8) if 60 % d == 0]
    sols = {
        c for c in itertools.combinations_with_replacement(divisors, 4) if sum(d * d for d in c) == 59
    }
    assert sols == {(3, 3, 4, 5)}
    assert character_table(group("psl2:5")).degrees == (1, 3, 3, 4, 5)


def test_sl2_5_degree_two():
    G = group("sl2:5")
    assert commutator_subgroup_order(G) == G.n  # perfect, so no nontrivial linear character
    assert quasirandomness_degree(G) == 2


def test_column_orthogonality_and_trivial_first():
    G = group("sym:4")
    T = character_table(G)
    assert np.allclose(T.values[0], 1)
    sizes = np.array(T.class_sizes)
    col = T.values.conj().T @ T.values
    assert np.allclose(col, np.diag(G.n / sizes), atol=1e-8)


def test_cyclic_values_are_roots_of_unity():
    n = 7
    T = character_table(build_cyclic(n))
    at_gen = T.values[:, 1]
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    assert np.allclose(np.sort_complex(np.round(at_gen, 10)), np.sort_complex(np.round(roots, 10)))


def test_seed_independence_and_determinism():
    G = group("psl2:7")
    first = character_table(G, seed=0)
    for seed in range(1, 5):
        assert character_table(G, seed=seed).degrees == first.degrees
    again = character_table(G, seed=0)
    assert np.array_equal(first.values, again.values)


@pytest.mark.parametrize("spec", ["cyclic:12", "sym:3", "psl2:5"])
def test_quasirandomness_degree(spec):
    expected = {"cyclic:12": 1, "sym:3": 1, "psl2:5": 3}[spec]
    assert quasirandomness_degree(group(spec)) == expected


def test_trivial_group_degree_undefined():
    with pytest.raises(CharacterTableError, match="trivial"):
        quasirandomness_degree(build_cyclic(1))


def test_too_many_classes():
    with pytest.raises(CharacterTableError, match="exceeds"):
        class_matrices(build_cyclic(65))


def test_degenerate_spectrum_reported(monkeypatch):
    real_eig = np.linalg.eig

    def collapsed(A):
        vals, vecs = real_eig(A)
        return np.zeros_like(vals), vecs

    monkeypatch.setattr(np.linalg, "eig", collapsed)
    with pytest.raises(CharacterTableError, match="not separated"):
        character_table(group("sym:3"))
