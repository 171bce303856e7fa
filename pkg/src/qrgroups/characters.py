"""Complex character tables from the class algebra, and the quasirandomness degree.

The class sums C_1..C_r span the centre of the group algebra, with
C_i C_j = sum_k a_ijk C_k.  For each irreducible character the vector of
central characters w_k = |C_k| chi(C_k) / chi(1) is a common eigenvector of
the matrices (M_i)_jk = a_ijk.  A generic real combination of the M_i has
simple spectrum, so its eigenvectors recover every irreducible character.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_CLASSES = 64
MAX_RETRIES = 8
ORTHO_TOL = 1e-6


class CharacterTableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CharacterTable:
    order: int
    class_sizes: tuple[int, ...]
    degrees: tuple[int, ...]
    values: np.ndarray  # values[i, j] = chi_i(C_j)
    central: np.ndarray  # central[i, j] = omega_i(C_j)

    @property
    def num_classes(self) -> int:
        return len(self.class_sizes)

    def orthogonality_error(self) -> float:
        sizes = np.asarray(self.class_sizes, dtype=float)
        gram = (self.values * sizes) @ self.values.conj().T
        return float(np.abs(gram - self.order * np.eye(len(sizes))).max())


def class_matrices(G) -> np.ndarray:
    """Integer structure constants, returned as M with M[i][j, k] = a_ijk.

    a_ijk = #{(x, y) in C_i x C_j : x y = z} for a fixed z in C_k.  A second
    choice of z is counted for every class of size > 1 as a consistency check.
    """
    classes = G.conj_classes
    r = len(classes)
    if r > MAX_CLASSES:
        raise CharacterTableError(f"{r} conjugacy classes exceeds limit {MAX_CLASSES}")
    cls = G.class_of
    xs = np.arange(G.n)
    cls_x = cls[xs]

    def count(z: int) -> np.ndarray:
        y = G.mul[G.inv, z]  # y = x^-1 z for every x
        return np.bincount(cls_x * r + cls[y], minlength=r * r).reshape(r, r)

    M = np.zeros((r, r, r), dtype=np.int64)
    for k, cell in enumerate(classes):
        M[:, :, k] = count(cell[0])
        if len(cell) > 1 and not np.array_equal(count(cell[-1]), M[:, :, k]):
            raise CharacterTableError("structure constants depend on class representative")
    return M


def _sort_key(degree: int, row: np.ndarray):
    # descending on rounded (re, im) puts the trivial character first among linear ones
    return (degree, tuple((-round(v.real, 8), -round(v.imag, 8)) for v in row))


def character_table(G, seed: int = 0) -> CharacterTable:
    M = class_matrices(G)
    r = M.shape[0]
    n = G.n
    sizes = np.array([len(c) for c in G.conj_classes], dtype=float)
    rng = np.random.default_rng(seed)
    failure = "class algebra not separated"

    for _ in range(MAX_RETRIES + 1):
        coeffs = rng.standard_normal(r)
        A = np.tensordot(coeffs, M.astype(float), axes=1)
        evals, vecs = np.linalg.eig(A)
        if r > 1:
            gaps = np.abs(evals[:, None] - evals[None, :])
            np.fill_diagonal(gaps, np.inf)
            scale = max(1.0, float(np.abs(evals).max()))
            if gaps.min() < 1e-6 * scale:
                failure = "class algebra not separated"
                continue
        lead = vecs[0]
        if np.abs(lead).min() < 1e-12:
            failure = "class algebra not separated"
            continue
        w = (vecs / lead).T  # row i: central character of irrep i

        raw = np.sqrt(n / (np.abs(w) ** 2 / sizes).sum(axis=1))
        degrees = np.rint(raw).astype(np.int64)
        chi = degrees[:, None] * w / sizes[None, :]
        table = CharacterTable(n, tuple(int(s) for s in sizes), (), chi, w)
        if (
            np.abs(raw - degrees).max() > 1e-6
            or int((degrees**2).sum()) != n
            or table.orthogonality_error() > ORTHO_TOL
        ):
            failure = "character reconstruction failed"
            continue

        order = sorted(range(r), key=lambda i: _sort_key(int(degrees[i]), chi[i]))
        chi, w, degrees = chi[order], w[order], degrees[order]
        if degrees[0] != 1 or np.abs(chi[0] - 1).max() > ORTHO_TOL:
            failure = "character reconstruction failed"
            continue
        return CharacterTable(
            n, tuple(int(s) for s in sizes), tuple(int(d) for d in degrees), chi, w
        )
    raise CharacterTableError(failure)


def quasirandomness_degree(G, table: CharacterTable | None = None) -> int:
    """Minimal dimension of a nontrivial irreducible representation.

    This is the largest D for which G is D-quasirandom.
    """
    if G.n < 2:
        raise CharacterTableError("degree undefined for trivial group")
    table = table or character_table(G)
    return min(table.degrees[1:])
