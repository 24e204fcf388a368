import os

import pytest

import depdisc

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data")


@pytest.fixture(scope="module")
def fig2a():
    return depdisc.load_csv(os.path.join(DATA, "fig2a.csv"))


def test_load(fig2a):
    assert fig2a.rows == 4
    assert fig2a.columns == 4
    assert fig2a.names == ["A", "B", "C", "D"]


def test_discover_matches_golden(fig2a):
    golden = [
        "A,B -> C",
        "A,B -> D",
        "A,D -> B",
        "B,C -> A",
        "B,C -> D",
        "B,D -> A",
        "D -> C",
    ]
    for algo in ("tane", "fastfds", "hyfd"):
        for ldp in (1, 2):
            result = depdisc.discover(fig2a, "fd", algo, ldp=ldp, workers=3)
            assert result["dependencies"] == golden, (algo, ldp)


def test_discover_agrees_with_oracle(fig2a):
    found = depdisc.discover(fig2a, "ucc", "tane")["dependencies"]
    assert found == depdisc.oracle(fig2a, "ucc")["dependencies"]


def test_metrics_present(fig2a):
    result = depdisc.discover(fig2a, "fd", "tane", ldp=2, workers=2)
    assert result["metrics"]["total_bytes"] > 0
    assert result["phase_trace"]


def test_precision_trivial(fig2a):
    run = depdisc.precision(fig2a, parts=2)
    assert run["precision"] == 1.0


def test_errors(fig2a):
    with pytest.raises(ValueError):
        depdisc.discover(fig2a, "dc", "tane")
    with pytest.raises(ValueError):
        depdisc.load_csv(os.path.join(DATA, "missing.csv"))
    with pytest.raises(RuntimeError):
        depdisc.oracle(fig2a, "fd", max_rows=2)
