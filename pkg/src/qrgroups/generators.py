"""Seeded subset generators for groups and product groups.

Compact string forms (used by the CLI and config files):

    random:0.3            each element independently with probability 0.3
    full / empty
    classes:0,2           union of conjugacy classes by class id
    cosets:1,5/0,2        right cosets 0 and 2 of the subgroup generated by elements 1, 5
    product:<A>|<B>       S x T for sets S, T of the factor group
    file:<path>           one index (or "x y" pair for products) per line
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .groups import right_cosets, subgroup_generated
from .patterns import IndicatorSet

KINDS = ("random-density", "class-union", "coset-union", "product-of-sets", "explicit-file")


@dataclass
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def parse_generator(text: str, seed: int = 0) -> GeneratorSpec:
    text = text.strip()
    head, _, rest = text.partition(":")
    if text == "full":
        return GeneratorSpec("random-density", {"alpha": 1.0}, seed)
    if text == "empty":
        return GeneratorSpec("random-density", {"alpha": 0.0}, seed)
    if head == "random":
        return GeneratorSpec("random-density", {"alpha": float(rest)}, seed)
    if head == "classes":
        return GeneratorSpec("class-union", {"classes": _ints(rest)}, seed)
    if head == "cosets":
        gens, _, ids = rest.partition("/")
        return GeneratorSpec("coset-union", {"generators": _ints(gens), "cosets": _ints(ids)}, seed)
    if head == "product":
        left, sep, right = rest.partition("|")
        if not sep:
            raise ValueError("product generator needs 'product:<A>|<B>'")
        return GeneratorSpec(
            "product-of-sets",
            {"factors": [parse_generator(left, seed), parse_generator(right, seed)]},
            seed,
        )
    if head == "file":
        return GeneratorSpec("explicit-file", {"path": rest}, seed)
    raise ValueError(f"cannot parse set generator {text!r}")


def derive_seed(master: int, *keys) -> int:
    """64-bit seed for a substream identified by (master, *keys).

    String keys are hashed; the stream does not depend on the order in
    which substreams are requested.
    """
    words = []
    for k in keys:
        if isinstance(k, str):
            k = int.from_bytes(hashlib.sha256(k.encode()).digest()[:8], "little")
        words.append(int(k))
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(words))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def read_set_file(base, path) -> IndicatorSet:
    product = getattr(base, "factors", None) is not None
    idx = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if product and len(parts) == 2:
                idx.append(int(parts[0]) * base.factors[1].n + int(parts[1]))
            elif len(parts) == 1:
                idx.append(int(parts[0]))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected an index or an 'x y' pair") from None
    return IndicatorSet.from_indices(base, idx)


def generate_set(spec: GeneratorSpec | str, base) -> IndicatorSet:
    if isinstance(spec, str):
        spec = parse_generator(spec)
    p = spec.params
    if spec.kind == "random-density":
        alpha = float(p["alpha"])
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"density {alpha} outside [0, 1]")
        rng = np.random.default_rng(spec.seed)
        return IndicatorSet(base, rng.random(base.n) < alpha)
    if spec.kind == "class-union":
        classes = base.conj_classes
        bits = np.zeros(base.n, dtype=bool)
        for c in p["classes"]:
            if not 0 <= c < len(classes):
                raise ValueError(f"unknown class id {c}")
            bits[list(classes[c])] = True
        return IndicatorSet(base, bits)
    if spec.kind == "coset-union":
        for g in p["generators"]:
            if not 0 <= g < base.n:
                raise ValueError(f"unknown element id {g}")
        cosets = right_cosets(base, subgroup_generated(base, p["generators"]))
        bits = np.zeros(base.n, dtype=bool)
        for c in p["cosets"]:
            if not 0 <= c < len(cosets):
                raise ValueError(f"unknown coset id {c}")
            bits[cosets[c]] = True
        return IndicatorSet(base, bits)
    if spec.kind == "product-of-sets":
        factors = getattr(base, "factors", None)
        if factors is None:
            raise ValueError("product-of-sets needs a product base")
        specs = p["factors"]
        sets = []
        for i, (fs, grp) in enumerate(zip(specs, factors)):
            sub = GeneratorSpec(fs.kind, fs.params, derive_seed(spec.seed, "factor", i))
            sets.append(generate_set(sub, grp))
        return IndicatorSet(base, np.outer(sets[0].bits, sets[1].bits).ravel())
    return read_set_file(base, p["path"])


def density_within_3sigma(alpha: float, realized: float, size: int) -> bool:
    return abs(realized - alpha) <= 3 * math.sqrt(alpha * (1 - alpha) / size)
