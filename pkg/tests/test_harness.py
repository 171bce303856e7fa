import csv
import io
import json

import numpy as np
import pytest

from conftest import group, square
from qrgroups.config import ConfigError, load_config, run_config
from qrgroups.experiments import (
    experiment_mixing_decay,
    experiment_nonempty_returns,
    experiment_productfree,
    experiment_triangle_law,
    is_product_free,
    triangle_summary_from_csv,
)
from qrgroups.generators import (
    GeneratorSpec,
    density_within_3sigma,
    derive_seed,
    generate_set,
    parse_generator,
    read_set_file,
)

# ------------------------------------------------------------ generators


def test_random_density_extremes_and_determinism():
    G = group("psl2:5")
    assert generate_set(parse_generator("random:0", 3), G).cardinality == 0
    assert generate_set(parse_generator("empty", 3), G).cardinality == 0
    assert generate_set(parse_generator("full", 3), G).cardinality == 60
    a = generate_set(parse_generator("random:0.5", 11), G)
    b = generate_set(parse_generator("random:0.5", 11), G)
    c = generate_set(parse_generator("random:0.5", 12), G)
    assert np.array_equal(a.bits, b.bits)
    assert not np.array_equal(a.bits, c.bits)
    with pytest.raises(ValueError):
        generate_set(GeneratorSpec("random-density", {"alpha": 1.5}), G)


def test_class_union():
    G = group("psl2:5")
    all_classes = ",".join(str(i) for i in range(len(G.conj_classes)))
    assert generate_set(parse_generator("classes:" + all_classes), G).cardinality == 60
    A = generate_set(parse_generator("classes:1,3"), G)
    assert A.cardinality == 12 + 15
    for cell in G.conj_classes:
        assert len(set(A.bits[list(cell)])) == 1
    with pytest.raises(ValueError, match="class id"):
        generate_set(parse_generator("classes:9"), G)


def test_coset_union():
    G = group("sym:4")
    A = generate_set(parse_generator("cosets:1/0,2"), G)
    assert A.cardinality == 4
    with pytest.raises(ValueError, match="coset id"):
        generate_set(parse_generator("cosets:1/12"), G)
    with pytest.raises(ValueError, match="element id"):
        generate_set(parse_generator("cosets:99/0"), G)


def test_product_of_sets():
    P = square("sym:3")
    A = generate_set(parse_generator("product:classes:1|full"), P)
    assert A.cardinality == len(group("sym:3").conj_classes[1]) * 6
    with pytest.raises(ValueError):
        generate_set(parse_generator("product:full|full"), group("sym:3"))


def test_set_file(tmp_path):
    P = square("sym:3")
    path = tmp_path / "a.txt"
    path.write_text("# pairs\n0 1\n2 3  # trailing comment\n\n5\n")
    A = read_set_file(P, path)
    assert A.members().tolist() == [1, 5, 15]
    assert generate_set(parse_generator(f"file:{path}"), P) == A
    path.write_text("0 1 2\n")
    with pytest.raises(ValueError, match=":1:"):
        read_set_file(P, path)


@pytest.mark.parametrize("bad", ["nonsense", "product:full", "random:x"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_generator(bad)


def test_derive_seed():
    assert derive_seed(1, "tri", 0) == derive_seed(1, "tri", 0)
    seeds = {derive_seed(1, "tri", t) for t in range(100)}
    assert len(seeds) == 100
    assert derive_seed(1, "tri", 0) != derive_seed(2, "tri", 0)
    assert derive_seed(1, "a", 0) != derive_seed(1, "b", 0)
    assert 0 <= derive_seed(5) < 2**64


def test_density_3sigma():
    assert density_within_3sigma(0.5, 0.5, 100)
    assert not density_within_3sigma(0.5, 0.8, 100)


# ------------------------------------------------------------ experiments


def test_triangle_law_full_set():
    rep = experiment_triangle_law("psl2:5", 0.5, 0.05, 2, 0, set_spec="full")
    assert rep.passed
    assert rep.summary["trials_return_set_is_G"] == 2
    assert rep.summary["K_max"] == 1


def test_triangle_law_random_psl7():
    rep = experiment_triangle_law("psl2:7", 0.5, 0.05, 3, 4)
    assert rep.passed and rep.D == 3
    assert rep.summary["good_fraction_mean"] == 1.0 and rep.summary["K_max"] == 1
    assert all(t["density_within_3sigma"] for t in rep.trials)
    assert rep.report_version == 1


def test_triangle_law_product_set_closed_form():
    G = group("psl2:5")
    rep = experiment_triangle_law("psl2:5", 0.5, 0.05, 2, 9, set_spec="product:random:0.5|full")
    rows = list(csv.reader(io.StringIO(rep.profile_csv)))[1:]
    for t in range(2):
        spec = parse_generator("product:random:0.5|full", derive_seed(9, "triangle_law", t))
        A = generate_set(spec, square("psl2:5"))
        S = set(np.flatnonzero(A.matrix().any(axis=1)).tolist())
        for g in range(G.n):
            gS = {int(G.mul[G.inv[g], s]) for s in S}
            row = rows[t * G.n + g]
            assert int(row[3]) == len(S & gS) * G.n
            assert float(row[4]) == pytest.approx(len(S & gS) / G.n, abs=1e-15)


def test_triangle_law_parameter_errors():
    with pytest.raises(ValueError):
        experiment_triangle_law("psl2:5", 1.5, 0.05, 1, 0)
    with pytest.raises(ValueError):
        experiment_triangle_law("psl2:5", 0.5, 0.0, 1, 0)
    with pytest.raises(ValueError):
        experiment_triangle_law("psl2:5", 0.5, 0.1, 0, 0)


def test_summary_recomputes_from_csv():
    rep = experiment_triangle_law("sym:4", 0.4, 0.01, 4, 2)
    assert triangle_summary_from_csv(rep.profile_csv, rep) == [
        (t["return_set_size"], t["per_g_density"]) for t in rep.trials
    ]


def test_mixing_decay_small():
    rep = experiment_mixing_decay([5, 7], 4, 1)
    assert rep.checks["bound_holds"]
    assert rep.D == {"5": 3, "7": 3}
    assert any("vacuous" in n for n in rep.notes)
    with pytest.raises(ValueError):
        experiment_mixing_decay([17], 1, 0)
    with pytest.raises(ValueError):
        experiment_mixing_decay([6], 1, 0)


def test_productfree():
    rep = experiment_productfree("cyclic:2")
    assert rep.summary["best_density"] == 0.5
    assert rep.summary["best_set_indices"] == [1]
    rep = experiment_productfree("psl2:5", "random-restart", 5, 3)
    assert rep.passed
    G = group("psl2:5")
    assert is_product_free(G, rep.summary["best_set_indices"])
    assert rep.summary["gowers_threshold_density"] == pytest.approx(2 * 60 ** (8 / 9) / 60)
    assert rep.summary["gowers_threshold_density"] > 1.26
    assert rep.summary["threshold_vacuous"]
    assert not is_product_free(G, [0])
    with pytest.raises(ValueError):
        experiment_productfree("psl2:5", budget=0)


def test_nonempty_returns():
    full = experiment_nonempty_returns([5], 1.0, 1, 0)
    assert full.trials[0]["mean_fraction"] == 1.0
    empty = experiment_nonempty_returns([5], 0.0, 1, 0, set_spec="empty")
    assert empty.trials[0]["mean_fraction"] == 0.0
    rand = experiment_nonempty_returns([7], 0.3, 2, 0)
    assert rand.trials[0]["min_fraction"] == 1.0
    with pytest.raises(ValueError):
        experiment_nonempty_returns([7, 5], 0.3, 1, 0)


# ---------------------------------------------------------------- config

CONFIG = """
[tri]
kind = triangle_law
group = psl2:5
alpha = 0.5
eps = 0.05
trials = 3
seed = 1

[mix]
kind = mixing_decay
q_list = 5, 7
trials = 3
seed = 2

[ne]
kind = nonempty_returns
q_list = 5
alpha = 0.3
trials = 2
seed = 3
"""


def test_empty_config(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("# nothing to run\n")
    assert run_config(path, tmp_path / "out") == []


def test_duplicate_id(tmp_path):
    path = tmp_path / "dup.ini"
    path.write_text("[a]\nkind = productfree\ngroup = cyclic:2\n\n[a]\nkind = productfree\ngroup = cyclic:3\n")
    with pytest.raises(ConfigError, match=r"dup.ini:5: duplicate id"):
        load_config(path)


@pytest.mark.parametrize(
    "body,pattern",
    [
        ("[a]\nkind = productfree\ngroup = cyclic:2\ncolour = red\n", r":4: .*unknown key"),
        ("[a]\nkind = triangle_law\ngroup = psl2:5\n", r":1: .*missing keys"),
        ("[a]\ngroup = psl2:5\n", r":1: .*kind"),
        ("[a]\nkind = mixing_decay\nq_list = 5\ntrials = many\nseed = 1\n", r":4: .*bad value"),
    ],
)
def test_config_errors_are_line_precise(tmp_path, body, pattern):
    path = tmp_path / "c.ini"
    path.write_text(body)
    with pytest.raises(ConfigError, match=pattern):
        load_config(path)


def test_config_runs_are_reproducible(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(CONFIG)
    outs = {}
    for name, workers in (("a", 1), ("b", 1), ("c", 4)):
        reports = run_config(path, tmp_path / name, workers=workers)
        assert [r.experiment_id for r in reports] == ["tri", "mix", "ne"]
        assert all(r.passed for r in reports)
        outs[name] = tmp_path / name
    for eid in ("tri", "mix", "ne"):
        csvs = {(outs[k] / f"{eid}.csv").read_bytes() for k in outs}
        assert len(csvs) == 1
        reports = []
        for k in outs:
            d = json.loads((outs[k] / f"{eid}.json").read_text())
            d.pop("wall_time_s")
            reports.append(d)
        assert reports[0] == reports[1] == reports[2]


def test_inline_comments(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[pf]\nkind = productfree   ; group only\ngroup = cyclic:2\n")
    assert load_config(path) == [{"id": "pf", "kind": "productfree", "group": "cyclic:2"}]
