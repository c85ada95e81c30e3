import numpy as np
import pytest

from cventangle import R_PAPER, analytic_covariance, parse_partition, reduce
from cventangle.errors import ConfigError
from cventangle.transitions import (
    detection_threshold,
    optimal_direction_trace,
    restricted_value,
    support_pattern,
)

GRID = np.linspace(0.0, 1.0, 41)


def ghz(eta):
    return analytic_covariance("ghz3", R_PAPER, eta)


def cluster(eta):
    return analytic_covariance("cluster4", R_PAPER, eta)


def test_support_pattern():
    assert support_pattern([0.0, 0.06, -0.7, 0.04]) == (False, True, True, False)


def test_ghz_squeezing_transition():
    trace = optimal_direction_trace(ghz, GRID, parse_partition("A|B|C"), "squeezing")
    assert len(trace.transitions) == 1
    t = trace.transitions[0]
    assert t.eta == pytest.approx(0.17, abs=0.01)
    assert t.bracket[1] - t.bracket[0] <= 1e-3
    assert t.gain > 0.01 and t.detected_both_sides and trace.discontinuous
    # Low-transmission branch is the (x_B - x_C) direction.
    assert t.support_before == (False, False, True, False, True, False)
    assert trace.points[0].support == t.support_before


def test_ghz_qfi_transition():
    trace = optimal_direction_trace(ghz, GRID, parse_partition("A|B|C"), "qfi_witness")
    assert [round(t.eta, 2) for t in trace.transitions] == [pytest.approx(0.33, abs=0.011)]
    assert trace.transitions[0].eta == pytest.approx(0.34, abs=0.01)


def test_cluster_transitions():
    p = parse_partition("A|B|CD")
    sq = optimal_direction_trace(cluster, GRID, p, "squeezing").transitions
    qf = optimal_direction_trace(cluster, GRID, p, "qfi_witness").transitions
    assert len(sq) == 1 and sq[0].eta == pytest.approx(0.16, abs=0.01)
    assert len(qf) == 1 and qf[0].eta == pytest.approx(0.31, abs=0.01)


@pytest.mark.parametrize("label", ["A|BC", "B|AC", "C|AB"])
def test_no_transition_on_bipartitions(label):
    for crit in ("squeezing", "qfi_witness"):
        assert not optimal_direction_trace(ghz, GRID[::4], parse_partition(label), crit).transitions


def test_epr_has_no_transition():
    f = lambda e: analytic_covariance("epr", R_PAPER, e)  # noqa: E731
    trace = optimal_direction_trace(f, GRID, parse_partition("A|B"), "squeezing")
    assert not trace.transitions and not trace.discontinuous
    assert np.all(np.diff(trace.values) > 0)


def test_descending_grid_finds_same_crossing():
    p = parse_partition("A|B|C")
    up = optimal_direction_trace(ghz, GRID, p, "squeezing").transitions[0].eta
    down = optimal_direction_trace(ghz, GRID[::-1], p, "squeezing").transitions[0].eta
    assert up == pytest.approx(down, abs=2e-3)


def test_restricted_value_bounds_optimum():
    g = ghz(0.5)
    p = parse_partition("A|B|C")
    x_only = (True, False) * 3
    full = restricted_value(g, p, "squeezing", (True,) * 6)
    assert restricted_value(g, p, "squeezing", x_only) <= full + 1e-12
    assert restricted_value(g, p, "qfi_witness", x_only) <= restricted_value(g, p, "qfi_witness", (True,) * 6) + 1e-12


def test_trace_errors():
    p = parse_partition("A|BC")
    with pytest.raises(ConfigError):
        optimal_direction_trace(ghz, GRID, p, "ppt")
    with pytest.raises(ConfigError):
        optimal_direction_trace(ghz, [0.0, 0.5, 0.3], p, "squeezing")
    with pytest.raises(ConfigError):
        optimal_direction_trace(ghz, [0.3], p, "squeezing")


def test_reduced_detection_thresholds():
    def acd(eta):
        return reduce(cluster(eta), [0, 2, 3])

    thr = detection_threshold(acd, parse_partition("A|BC"), "squeezing", 0.05, 0.3)
    assert thr == pytest.approx(0.13, abs=0.01)

    def abc(eta):
        return reduce(cluster(eta), [0, 1, 2])

    thr = detection_threshold(abc, parse_partition("C|AB"), "squeezing", 0.01, 0.3)
    assert thr == pytest.approx(0.07, abs=0.01)
    with pytest.raises(ValueError):
        detection_threshold(acd, parse_partition("A|BC"), "qfi_witness", 0.3, 0.9)
