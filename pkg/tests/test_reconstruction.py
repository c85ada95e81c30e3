import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cventangle import (
    MeasurementRecord,
    aggregate,
    analytic_covariance,
    criterion_spread,
    parse_partition,
    reconstruct,
    synthesize_record,
)
from cventangle.errors import (
    IndexOutOfRangeError,
    InconsistentPairError,
    NegativeVarianceError,
    ShapeMismatchError,
)
from cventangle.reconstruction import read_manifest, read_record_csv, write_record_csv

import oracles


def quiet(record, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return reconstruct(record, **kw)


def test_uncorrelated_vacuum_pair():
    rec = MeasurementRecord(1, [0.5, 0.5], {(0, 1): {"+": 1.0}})
    np.testing.assert_array_equal(reconstruct(rec).gamma, 0.5 * np.eye(2))


def test_sum_identity_against_two_mode_entry():
    r = 0.4
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    rec = MeasurementRecord(2, [c / 2] * 4, {(0, 2): {"+": c - s}})
    g = quiet(rec).gamma
    assert g[0, 2] == pytest.approx(-s / 2, abs=1e-15)
    rec = MeasurementRecord(2, [c / 2] * 4, {(0, 2): {"-": c + s}})
    assert quiet(rec).gamma[0, 2] == pytest.approx(-s / 2, abs=1e-15)


@pytest.mark.parametrize("signs", [("+",), ("-",), ("+", "-")])
def test_round_trip_ghz(signs):
    g = analytic_covariance("ghz3", 0.3466, 0.7)
    res = reconstruct(synthesize_record(g, signs))
    assert np.max(np.abs(res.gamma - g)) < 1e-12
    assert res.physical and not res.missing


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_round_trip_random_states(n, seed):
    g = oracles.random_state(n, np.random.default_rng(seed))
    plus = reconstruct(synthesize_record(g, ("+",))).gamma
    minus = reconstruct(synthesize_record(g, ("-",))).gamma
    scale = max(1.0, np.abs(g).max())
    assert np.max(np.abs(plus - g)) < 1e-12 * scale
    assert np.max(np.abs(minus - g)) < 1e-12 * scale


def test_inconsistent_pair():
    rec = MeasurementRecord(1, [0.5, 0.5], {(0, 1): {"+": 1.4, "-": 1.0}})
    with pytest.raises(InconsistentPairError):
        reconstruct(rec)
    # Within the threshold the two estimates are averaged.
    rec = MeasurementRecord(1, [0.5, 0.5], {(0, 1): {"+": 1.04, "-": 1.0}})
    assert quiet(rec).gamma[0, 1] == pytest.approx(0.01)
    assert quiet(rec, consistency=0.5).gamma[0, 1] == pytest.approx(0.01)


def test_negative_variance_and_indices():
    with pytest.raises(NegativeVarianceError):
        MeasurementRecord(1, [0.5, -0.1])
    with pytest.raises(NegativeVarianceError):
        MeasurementRecord(1, [0.5, 0.5], {(0, 1): {"+": 0.0}})
    with pytest.raises(IndexOutOfRangeError):
        MeasurementRecord(1, [0.5, 0.5], {(0, 2): {"+": 1.0}})
    with pytest.raises(ShapeMismatchError):
        MeasurementRecord(2, [0.5, 0.5])
    with pytest.raises(ValueError):
        MeasurementRecord(1, [0.5, 0.5], {(0, 1): {"x": 1.0}})


@pytest.mark.filterwarnings("ignore:reconstructed matrix is unphysical")
def test_missing_pairs_warn_and_zero():
    g = analytic_covariance("epr", 0.4, 1.0)
    rec = synthesize_record(g)
    del rec.pairs[(0, 2)]
    with pytest.warns(RuntimeWarning, match="unmeasured"):
        res = reconstruct(rec)
    assert res.missing == [(0, 2)]
    assert res.gamma[0, 2] == 0.0


def test_unphysical_is_reported_not_enforced():
    rec = MeasurementRecord(1, [0.3, 0.3], {(0, 1): {"+": 0.6}})
    with pytest.warns(RuntimeWarning, match="unphysical"):
        res = reconstruct(rec)
    assert not res.physical and res.margin < 0


def test_aggregate_identical_and_two_point():
    g = analytic_covariance("epr", 0.4, 0.5)
    recs = [synthesize_record(g)] * 3
    agg = aggregate(recs)
    np.testing.assert_allclose(agg.mean, g, atol=1e-14)
    np.testing.assert_allclose(agg.std, np.zeros_like(g), atol=1e-15)
    eps = 1e-3
    a, b = g.copy(), g.copy()
    a[0, 0] += eps
    b[0, 0] -= eps
    agg = aggregate([reconstruct(synthesize_record(a)), reconstruct(synthesize_record(b))])
    assert agg.mean[0, 0] == pytest.approx(g[0, 0], abs=1e-14)
    assert agg.std[0, 0] == pytest.approx(eps * math.sqrt(2), rel=1e-9)
    assert agg.std[1, 1] == 0.0


def test_aggregate_errors():
    with pytest.raises(ShapeMismatchError):
        aggregate([])
    with pytest.raises(ShapeMismatchError):
        aggregate([synthesize_record(0.5 * np.eye(2)), synthesize_record(0.5 * np.eye(4))])


def test_criterion_spread_brackets_truth():
    g = analytic_covariance("epr", 0.3466, 0.6)
    rng = np.random.default_rng(42)
    gammas = []
    for _ in range(3):
        noise = rng.normal(0, 0.01, g.shape)
        gammas.append(g + 0.5 * (noise + noise.T))
    ab = parse_partition("A|B")
    for crit in ("qfi_witness", "squeezing", "ppt"):
        truth = criterion_spread([g], ab, crit)[0]
        mean, std, vals = criterion_spread(gammas, ab, crit)
        assert vals.shape == (3,) and std > 0
        assert mean - 3 * std <= truth <= mean + 3 * std


def test_csv_round_trip(tmp_path):
    g = analytic_covariance("cluster4", 0.3466, 0.3)
    rec = synthesize_record(g, ("+", "-"))
    path = tmp_path / "r1.csv"
    write_record_csv(path, rec)
    assert path.read_text().splitlines()[0] == "kind,i,j,sign,value"
    back = read_record_csv(path)
    assert back.n_modes == 4
    np.testing.assert_array_equal(reconstruct(back).gamma, reconstruct(rec).gamma)


def test_csv_parsing_details(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("kind,i,j,sign,value\n# comment\nsingle,1,1,na,0.5\nsingle,2,2,na,0.5\npair,1,2,−,1.0\n")
    rec = read_record_csv(path)
    assert rec.pairs == {(0, 1): {"-": 1.0}}
    path.write_text("single,1,1,na,0.5\n")
    with pytest.raises(ShapeMismatchError):
        read_record_csv(path)
    path.write_text("single,1,1,na,0.5\nsingle,2,2,na,abc\n")
    with pytest.raises(ValueError, match="line"):
        read_record_csv(path)
    path.write_text("single,1,1,na,0.5\nsingle,2,2,na,0.5\npair,1,2,na,1.0\n")
    with pytest.raises(ValueError, match="sign"):
        read_record_csv(path)


def test_manifest(tmp_path):
    sub = tmp_path / "data"
    sub.mkdir()
    (sub / "m.txt").write_text("# three sets\nr1.csv\n\nr2.csv  # second\n")
    assert read_manifest(sub / "m.txt") == [sub / "r1.csv", sub / "r2.csv"]
