import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspan.basis import orbit_points
from kronspan.compositions import Composition, Support, enumerate_compositions, multinomial, w_support
from kronspan.config import BudgetExceeded
from kronspan.fields import QQ
from kronspan.tensor import unit_tensor
from kronspan.tightness import enumerate_tight_supports, is_tight
from kronspan.universal import (
    GlobalCoordinate,
    NotTight,
    UniversalSpec,
    block_table,
    build_universal,
    diagonal_spec,
    mode_dimension,
    orbit_coordinate,
    random_coordinate,
    sequence_stats,
    universal_entry,
)


def check_oracle_against_build(spec, zero_samples, seed=0):
    t = build_universal(spec)
    table = block_table(spec)
    assert table.dims == t.dims
    for coord in t.entries:
        assert universal_entry(table, coord) == 1
    rng = random.Random(seed)
    checked = 0
    while checked < zero_samples:
        coord = random_coordinate(table, rng)
        if coord in t.entries:
            continue
        assert universal_entry(table, coord) == 0
        checked += 1
    return t


def test_singleton_support_is_unit():
    spec = UniversalSpec("u", 2, 5, support=Support(2, ((1, 2, 1),)))
    assert build_universal(spec, field=QQ) == unit_tensor(1, QQ)


def test_t_1q_and_d_1():
    assert build_universal(UniversalSpec("td", 1, 4), field=QQ) == unit_tensor(1, QQ)
    d1 = diagonal_spec(1)
    assert d1.q == 1
    table = block_table(d1)
    assert table.dims == (1, 1, 1) and universal_entry(table, (1, 1, 1)) == 1


def test_u22_blocks_and_nnz():
    spec = UniversalSpec("ud", 2, 2)
    t = build_universal(spec)
    stats = sequence_stats(spec)
    assert stats["block_count"] == 36 == len(block_table(spec))
    assert t.nnz == stats["nnz"] == 64
    assert list(t.dims) == stats["dims"]
    assert set(t.entries.values()) == {1}


def test_cw_block_in_u23():
    spec = UniversalSpec("ud", 2, 3)
    table = block_table(spec)
    assert len(table) == 120 == sequence_stats(spec)["block_count"]
    cw = Composition.from_mapping(Support.full(2), {(1, 1, 2): 1, (1, 2, 1): 1, (2, 1, 1): 1})
    b = table.blocks.index(cw)
    assert table.block_dims[b] == (3, 3, 3)
    for I, J, K in orbit_points(cw):
        assert universal_entry(table, orbit_coordinate(table, b, I, J, K)) == 1
    # a non-orbit local coordinate in the same block
    assert universal_entry(table, GlobalCoordinate(b, (1, 1, 1))) == 0


def test_diagonal_stats_d2():
    stats = sequence_stats(diagonal_spec(2))
    assert stats["q"] == 16
    assert stats["block_count"] == math.comb(23, 7) == 245157
    assert stats["nnz"] == 2 ** (3 * 16)
    with pytest.raises(BudgetExceeded):
        build_universal(diagonal_spec(2))


@pytest.mark.parametrize("q", [1, 2, 3])
def test_oracle_matches_build_full_cube(q):
    t = check_oracle_against_build(UniversalSpec("ud", 2, q), 1000, seed=q)
    assert t.nnz == 2 ** (3 * q)


def test_oracle_matches_build_w_and_tight():
    check_oracle_against_build(UniversalSpec("u", 2, 4, support=w_support()), 300)
    spec = UniversalSpec("td", 2, 2)
    t = check_oracle_against_build(spec, 300)
    sups = spec.block_supports()
    assert all(is_tight(s) for s in sups)
    assert len(sups) == len(list(enumerate_tight_supports(2)))
    assert t.nnz == sum(len(s) ** 2 for s in sups)
    assert set(t.entries.values()) == {1}


def test_td_rejects_non_tight_supports():
    with pytest.raises(NotTight):
        UniversalSpec("td", 2, 2, supports=(Support.full(2),)).block_supports()


def test_coordinate_range_checks():
    table = block_table(UniversalSpec("ud", 2, 2))
    with pytest.raises(IndexError):
        universal_entry(table, (0, 1, 1))
    with pytest.raises(IndexError):
        universal_entry(table, (table.dims[0] + 1, 1, 1))
    with pytest.raises(IndexError):
        universal_entry(table, GlobalCoordinate(0, (2, 1, 1)))


triple = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))


@given(st.lists(triple, min_size=1, max_size=6, unique=True), st.integers(1, 5), st.integers(1, 3))
def test_mode_dimension_closed_form(triples, q, mode):
    support = Support(3, tuple(triples))
    brute = sum(multinomial(g.marginal(mode)) for g in enumerate_compositions(support, q))
    assert mode_dimension(support, q, mode) == brute


def test_universal_params_validation():
    with pytest.raises(ValueError):
        UniversalSpec("u", 2, 2)
    with pytest.raises(ValueError):
        UniversalSpec("diag", 2, 3)
    with pytest.raises(ValueError):
        UniversalSpec("bogus", 2, 2)
