"""INI experiment configs: one section per experiment, the section name is its id.

    [tri-psl7]
    kind = triangle_law
    group = psl2:7
    alpha = 0.5
    eps = 0.05
    trials = 20
    seed = 1
"""

from __future__ import annotations

import configparser
import re
from pathlib import Path

from . import experiments as ex

COMMON = {"kind"}
SCHEMA = {
    "triangle_law": {
        "required": {"group", "alpha", "eps", "trials", "seed"},
        "optional": {"set", "threshold_density", "convention"},
    },
    "mixing_decay": {"required": {"q_list", "trials", "seed"}, "optional": {"density"}},
    "productfree": {"required": {"group"}, "optional": {"strategy", "budget", "seed"}},
    "nonempty_returns": {
        "required": {"q_list", "alpha", "trials", "seed"},
        "optional": {"set", "convention"},
    },
}


class ConfigError(ValueError):
    pass


def _locate(lines: list[str], section: str, key: str | None = None) -> int:
    """1-based line of a section header, or of a key inside that section."""
    current = None
    for i, line in enumerate(lines, 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None:
            m = re.match(r"\s*([^=:#;\s]+)\s*[=:]", line)
            if m and m.group(1).strip().lower() == key:
                return i
    return 0


def load_config(path) -> list[dict]:
    text = Path(path).read_text()
    lines = text.splitlines()
    parser = configparser.ConfigParser(strict=True, interpolation=None, inline_comment_prefixes=(";",))
    try:
        parser.read_string(text, source=str(path))
    except configparser.DuplicateSectionError as e:
        raise ConfigError(f"{path}:{e.lineno}: duplicate id {e.section!r}") from None
    except configparser.DuplicateOptionError as e:
        raise ConfigError(f"{path}:{e.lineno}: duplicate key {e.option!r} in {e.section!r}") from None
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from None

    entries = []
    for sec in parser.sections():
        body = dict(parser[sec])
        where = f"{path}:{_locate(lines, sec)}"
        kind = body.get("kind")
        if kind not in SCHEMA:
            raise ConfigError(f"{where}: [{sec}] unknown or missing kind {kind!r}")
        spec = SCHEMA[kind]
        missing = spec["required"] - body.keys()
        if missing:
            raise ConfigError(f"{where}: [{sec}] missing keys {sorted(missing)}")
        for key in body:
            if key not in spec["required"] | spec["optional"] | COMMON:
                raise ConfigError(f"{path}:{_locate(lines, sec, key)}: [{sec}] unknown key {key!r}")
        entry = {"id": sec, "kind": kind}
        for key, raw in body.items():
            if key == "kind":
                continue
            try:
                entry[key] = _convert(key, raw)
            except ValueError as e:
                raise ConfigError(f"{path}:{_locate(lines, sec, key)}: [{sec}] bad value for {key}: {e}") from None
        entries.append(entry)
    return entries


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in ("alpha", "eps", "density"):
        return float(raw)
    if key in ("trials", "seed", "budget"):
        return int(raw, 0)
    if key == "q_list":
        return [int(v) for v in raw.replace(",", " ").split()]
    if key == "threshold_density" and raw not in ("requested", "realized"):
        raise ValueError("expected 'requested' or 'realized'")
    if key == "convention" and raw not in ("pattern", "literal"):
        raise ValueError("expected 'pattern' or 'literal'")
    return raw


def run_entry(entry: dict, workers: int = 1, cache_dir=None) -> ex.ExperimentReport:
    e = dict(entry)
    eid, kind = e.pop("id"), e.pop("kind")
    if kind == "triangle_law":
        return ex.experiment_triangle_law(
            e["group"], e["alpha"], e["eps"], e["trials"], e["seed"],
            experiment_id=eid, set_spec=e.get("set"),
            use_realized=e.get("threshold_density") == "realized",
            convention=e.get("convention", "pattern"), workers=workers, cache_dir=cache_dir,
        )
    if kind == "mixing_decay":
        return ex.experiment_mixing_decay(
            e["q_list"], e["trials"], e["seed"], density=e.get("density", 0.5),
            experiment_id=eid, workers=workers,
        )
    if kind == "productfree":
        return ex.experiment_productfree(
            e["group"], e.get("strategy", "greedy"), e.get("budget", 1), e.get("seed", 0),
            experiment_id=eid, cache_dir=cache_dir,
        )
    return ex.experiment_nonempty_returns(
        e["q_list"], e["alpha"], e["trials"], e["seed"], experiment_id=eid,
        set_spec=e.get("set"), convention=e.get("convention", "literal"), workers=workers,
    )


def run_config(path, out_dir=None, workers: int = 1, cache_dir=None) -> list[ex.ExperimentReport]:
    """Run every experiment in the config in file order; write reports when out_dir is given."""
    reports = []
    for entry in load_config(path):
        report = run_entry(entry, workers, cache_dir)
        if out_dir is not None:
            report.write(out_dir)
        reports.append(report)
    return reports
