import numpy as np
import pytest

from qrgroups.groups import build_product, parse_group_spec

_GROUPS = {}


def group(spec):
    """Session-wide memo so each table is built once."""
    if spec not in _GROUPS:
        _GROUPS[spec] = parse_group_spec(spec)
    return _GROUPS[spec]


def square(spec):
    key = "prod:" + spec
    if key not in _GROUPS:
        G = group(spec)
        _GROUPS[key] = build_product(G, G)
    return _GROUPS[key]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance criteria register one line each here; printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0].split("-")[1])):
            terminalreporter.write_line(line)
