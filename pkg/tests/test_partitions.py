import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cventangle import analytic_covariance, bell_number, check_physical, enumerate_partitions, parse_partition
from cventangle.errors import PartitionMismatchError, TooManyModesError
from cventangle.partitions import ModePartition, as_partition, block_mask, class_counts, project_block_diagonal
from cventangle.sweep import paper_scope, scope_keys

import oracles

R = 0.34657359027997264


@pytest.mark.parametrize("n", range(1, 7))
def test_partitions_match_bruteforce(n):
    got = {frozenset(frozenset(b) for b in p.blocks) for p in enumerate_partitions(n)}
    want = {p for p in oracles.set_partitions_rgs(n) if len(p) >= 2}
    assert got == want
    assert len(got) == bell_number(n) - 1 == oracles.bell_by_stirling(n) - 1


def test_bell_numbers():
    assert [bell_number(n) for n in range(9)] == [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def test_two_and_three_modes():
    assert [str(p) for p in enumerate_partitions(2)] == ["A|B"]
    parts = enumerate_partitions(3)
    assert len(parts) == 4
    assert str(parts[0]) == "A|B|C"
    assert {str(p) for p in parts} == {"A|B|C", "A|BC", "B|AC", "C|AB"}
    assert parse_partition("AC|B") == parse_partition("B|AC")


def test_four_mode_classes():
    counts = class_counts(enumerate_partitions(4))
    assert counts == {(1, 1, 1, 1): 1, (1, 1, 2): 6, (1, 3): 4, (2, 2): 3}
    assert len(enumerate_partitions(4, (2, 2))) == 3
    assert {str(p) for p in enumerate_partitions(4, [2, 1, 1])} == {
        "A|B|CD", "A|C|BD", "A|D|BC", "B|C|AD", "B|D|AC", "C|D|AB"
    }


def test_enumeration_order_and_errors():
    parts = enumerate_partitions(4)
    assert [p.n_blocks for p in parts] == sorted((p.n_blocks for p in parts), reverse=True)
    with pytest.raises(TooManyModesError):
        enumerate_partitions(13)
    with pytest.raises(PartitionMismatchError):
        enumerate_partitions(4, (1, 2))


def test_parse_and_labels():
    p = parse_partition("cd|b|a", 4)
    assert p.blocks == ((0,), (1,), (2, 3))
    assert str(p) == "A|B|CD"
    assert p.label("canonical") == "A|B|CD"
    assert str(parse_partition("AB|C")) == "C|AB"
    assert parse_partition("AB|C").label("canonical") == "AB|C"
    assert p.partition_class == (1, 1, 2) and not p.is_trivial
    assert parse_partition("ABC").is_trivial


@pytest.mark.parametrize("text", ["", "A||B", "A|X", "A|A", "A|B"])
def test_parse_errors(text):
    with pytest.raises(PartitionMismatchError):
        parse_partition(text, 3)


def test_relabel_and_localize():
    p = parse_partition("A|CD")
    local = p.localize((0, 2, 3))
    assert local == parse_partition("A|BC")
    assert local.relabel((0, 2, 3)) == p
    with pytest.raises(PartitionMismatchError):
        p.localize((0, 1, 2))


def test_as_partition_variants():
    assert as_partition([[0], [1, 2]], 3) == parse_partition("A|BC")
    assert as_partition("A|BC", 3) is not None
    with pytest.raises(PartitionMismatchError):
        as_partition("A|B", 3)
    with pytest.raises(PartitionMismatchError):
        ModePartition(((0, 1), (1,)))


def test_projection_examples():
    g = analytic_covariance("ghz3", R, 0.6)
    np.testing.assert_array_equal(project_block_diagonal(g, parse_partition("ABC")), g)
    eta = 0.6
    c = np.cosh(2 * R)
    e = analytic_covariance("epr", R, eta)
    a = (1 - eta) + eta * c
    np.testing.assert_allclose(project_block_diagonal(e, parse_partition("A|B")), 0.5 * np.diag([a, a, c, c]))
    out = project_block_diagonal(g, parse_partition("A|BC"))
    expected = g.copy()
    expected[0:2, 2:6] = 0
    expected[2:6, 0:2] = 0
    np.testing.assert_array_equal(out, expected)


def test_projection_mismatch():
    with pytest.raises(PartitionMismatchError):
        project_block_diagonal(np.eye(6), parse_partition("A|B"))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.data())
def test_projection_properties(n, seed, data):
    g = oracles.random_state(n, np.random.default_rng(seed))
    parts = enumerate_partitions(n)
    p = parts[data.draw(st.integers(0, len(parts) - 1))]
    proj = project_block_diagonal(g, p)
    np.testing.assert_array_equal(project_block_diagonal(proj, p), proj)
    np.testing.assert_array_equal(proj, oracles.block_decorrelate(g, p.blocks))
    assert check_physical(proj).physical
    # Refinement: splitting a block only adds zeros.
    q = parts[data.draw(st.integers(0, len(parts) - 1))]
    refines = all(any(set(b) <= set(c) for c in p.blocks) for b in q.blocks)
    if refines:
        assert np.all(~block_mask(q, n) | block_mask(p, n))


def test_summary_scope_has_44_rows():
    keys = scope_keys()
    assert len(keys) == 44 == len(set(keys))
    multi = [k for k in keys if k[2].count("|") >= 2]
    assert len(multi) == 12
    assert len(paper_scope()) == 1 + 1 + 3 + 1 + 4 + 6
