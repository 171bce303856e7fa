"""Command-line entry point: ``qrg <command> ...`` (or ``python -m qrgroups``)."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .cache import cache_path, cayley_cache_write, load_group
from .characters import character_table, quasirandomness_degree
from .generators import derive_seed, generate_set, parse_generator
from .groups import build_product, verify_group
from .measure import chu_check, chu_random_instance, chu_sharpness_search
from .patterns import corner_profile, mixing_discrepancy, triangle_profile
from .syndetic import covering_number


def _dump(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _group(args):
    return load_group(args.group, args.cache_dir)


def cmd_group(args):
    G = _group(args)
    if args.action == "build":
        verify_group(G)
        if args.cache_dir:
            cayley_cache_write(G, cache_path(args.cache_dir, args.group))
    info = {
        "group": args.group,
        "family": G.family,
        "order": G.n,
        "classes": len(G.conj_classes),
        "class_sizes": G.class_sizes,
        "abelian": G.is_abelian(),
    }
    if args.action == "build" and args.cache_dir:
        info["cache_file"] = str(cache_path(args.cache_dir, args.group))
    _dump(info)
    return 0


def cmd_quasirandomness(args):
    G = _group(args)
    T = character_table(G, seed=args.seed)
    D = quasirandomness_degree(G, T) if G.n > 1 else None
    _dump({"order": G.n, "classes": T.num_classes, "degrees": list(T.degrees), "D": D})
    return 0


def _write_csv(out, header, rows):
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_count(args):
    G = _group(args)
    if args.what == "triangles":
        P = build_product(G, G)
        A = generate_set(parse_generator(args.set, args.seed), P)
        counts = triangle_profile(A, args.convention, workers=args.workers)
        denom = G.n**2
    else:
        A = generate_set(parse_generator(args.set, args.seed), G)
        counts = corner_profile(A).counts
        denom = G.n
    rows = [[g, G.labels[g], int(c), repr(float(c / denom))] for g, c in enumerate(counts)]
    _write_csv(args.out, ["g_index", "g_label", "count", "density"], rows)
    return 0


def _function(G, text: str, seed: int) -> np.ndarray:
    head, _, rest = text.partition(":")
    if head == "pm":
        rng = np.random.default_rng(seed)
        return np.where(rng.random(G.n) < float(rest), 1.0, -1.0)
    if head == "const":
        return np.full(G.n, float(rest))
    if head == "set":
        return generate_set(parse_generator(rest, seed), G).bits.astype(float)
    raise ValueError(f"cannot parse function {text!r} (use pm:<p>, const:<c>, set:<generator>)")


def cmd_discrepancy(args):
    G = _group(args)
    fs = [_function(G, spec, derive_seed(args.seed, "f", i)) for i, spec in enumerate((args.f1, args.f2, args.f3))]
    D = quasirandomness_degree(G) if G.n > 1 else None
    res = mixing_discrepancy(*fs, G, D=D)
    _dump({
        "order": G.n,
        "D": D,
        "delta": res.delta,
        "main_term": res.main_term,
        "austin_bound": res.austin_bound,
        "bound_holds": res.bound_holds,
        "bound_vacuous": res.vacuous,
    })
    return 0


def cmd_syndetic(args):
    G = _group(args)
    R = generate_set(parse_generator(args.set, args.seed), G)
    res = covering_number(R, args.mode)
    _dump(res.to_dict(G.labels))
    return 0


def cmd_chu(args):
    if args.sharpness:
        _dump(chu_sharpness_search(args.n, args.size, args.seed, restarts=args.trials))
        return 0
    rows, ok = [], True
    for t in range(args.trials):
        rng = np.random.default_rng(derive_seed(args.seed, "chu", t))
        n = args.n if args.n else int(rng.integers(1, 4))
        fs, parts = chu_random_instance(rng, n, args.size)
        lhs, rhs, holds = chu_check(fs, parts)
        ok &= holds
        rows.append([t, repr(lhs), repr(rhs), repr(lhs - rhs)])
    _write_csv(args.out, ["trial", "lhs", "rhs", "margin"], rows)
    return 0 if ok else 1


def cmd_experiment(args):
    from .config import run_config

    reports = run_config(args.config, args.out, workers=args.workers, cache_dir=args.cache_dir)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.experiment_id} ({r.kind}) {json.dumps(r.summary, sort_keys=True, default=str)[:200]}")
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrg", description=__doc__)
    p.add_argument("--cache-dir", default=None, help="directory for Cayley table caches")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="build or describe a group")
    g.add_argument("action", choices=["build", "info"])
    g.add_argument("--group", required=True)
    g.set_defaults(func=cmd_group)

    q = sub.add_parser("quasirandomness", help="character degrees and the degree D")
    q.add_argument("--group", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_quasirandomness)

    c = sub.add_parser("count", help="per-g triangle (in G x G) or corner (in G) profile")
    c.add_argument("what", choices=["triangles", "corners"])
    c.add_argument("--group", required=True, help="base group G")
    c.add_argument("--set", required=True, help="generator spec or file:<path>")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--convention", choices=["pattern", "literal"], default="pattern")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_count)

    d = sub.add_parser("discrepancy", help="mixing discrepancy of a function triple")
    d.add_argument("--group", required=True)
    d.add_argument("--f1", default="pm:0.5")
    d.add_argument("--f2", default="pm:0.5")
    d.add_argument("--f3", default="pm:0.5")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_discrepancy)

    s = sub.add_parser("syndetic", help="right covering number of a set")
    s.add_argument("--group", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["exact", "greedy", "auto"], default="auto")
    s.set_defaults(func=cmd_syndetic)

    h = sub.add_parser("chu", help="random checks of the conditional-expectation product bound")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--trials", type=int, default=100)
    h.add_argument("--n", type=int, default=0, help="number of conditional expectations (0: random in 1..3)")
    h.add_argument("--size", type=int, default=12, help="points in the probability space")
    h.add_argument("--sharpness", action="store_true", help="search indicator inputs for the smallest lhs/rhs")
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_chu)

    e = sub.add_parser("experiment", help="run experiments from a config file")
    e.add_argument("action", choices=["run"])
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "chu" and args.sharpness and not args.n:
        args.n = 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
