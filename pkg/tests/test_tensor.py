import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F101, random_tensor
from kronspan.bounds import MMSpec, build_mm
from kronspan.config import BudgetExceeded
from kronspan.fields import QQ, DomainMismatch
from kronspan.tensor import (
    DimensionMismatch,
    LinearMap,
    SparseTensor3,
    apply_restriction,
    direct_sum,
    flat_index,
    flattening_ranks,
    kronecker_power,
    kronecker_product,
    multi_index,
    rank_one,
    unit_tensor,
    zero_tensor,
)

seeds = st.integers(0, 10**6)
shapes = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))


def dense(t):
    return np.array(t.to_dense(), dtype=np.int64)


def from_np(a, field):
    return SparseTensor3.from_dense(a.tolist(), field)


def test_unit_tensor():
    assert unit_tensor(1, QQ).entries == {(1, 1, 1): 1}
    assert unit_tensor(3, QQ).nnz == 3
    assert flattening_ranks(unit_tensor(3, QQ)) == (3, 3, 3)


def test_unit_is_kronecker_identity(rng):
    t = random_tensor((2, 3, 2), F101, rng)
    assert kronecker_product(unit_tensor(1, F101), t) == t
    assert kronecker_product(t, unit_tensor(1, F101)) == t
    assert kronecker_product(unit_tensor(2, F101), unit_tensor(3, F101)) == unit_tensor(6, F101)


def test_kronecker_entry_formula(rng):
    s = random_tensor((2, 2, 2), F101, rng)
    t = random_tensor((2, 2, 2), F101, rng)
    st_ = kronecker_product(s, t)
    for _ in range(20):
        a = [rng.randint(1, 2) for _ in range(6)]
        coord = tuple(flat_index((a[m], a[m + 3]), 2) for m in range(3))
        assert st_[coord] == F101.mul(s[tuple(a[:3])], t[tuple(a[3:])])


@given(shapes, shapes, seeds)
def test_kronecker_matches_numpy(sa, sb, seed):
    rng = random.Random(seed)
    s = random_tensor(sa, F101, rng, density=0.6)
    t = random_tensor(sb, F101, rng, density=0.6)
    expect = np.kron(dense(s), dense(t)) % 101
    assert kronecker_product(s, t) == from_np(expect, F101)


@given(seeds)
def test_kronecker_associative(seed):
    rng = random.Random(seed)
    a, b, c = (random_tensor((2, 2, 2), F101, rng, density=0.7) for _ in range(3))
    assert kronecker_product(kronecker_product(a, b), c) == kronecker_product(a, kronecker_product(b, c))


@given(shapes, shapes, seeds)
def test_nnz_multiplies(sa, sb, seed):
    rng = random.Random(seed)
    s = random_tensor(sa, F101, rng, density=0.5)
    t = random_tensor(sb, F101, rng, density=0.5)
    assert kronecker_product(s, t).nnz == s.nnz * t.nnz


@given(seeds)
def test_flattening_ranks_multiply(seed):
    rng = random.Random(seed)
    s = random_tensor((2, 2, 2), F101, rng, density=0.6)
    t = random_tensor((2, 2, 2), F101, rng, density=0.6)
    rs, rt = flattening_ranks(s), flattening_ranks(t)
    assert flattening_ranks(kronecker_product(s, t)) == tuple(x * y for x, y in zip(rs, rt))


@given(seeds)
def test_direct_sum_adds_flattening_ranks(seed):
    rng = random.Random(seed)
    s = random_tensor((2, 2, 2), F101, rng, density=0.6)
    t = random_tensor((2, 3, 2), F101, rng, density=0.6)
    u = direct_sum([s, t])
    assert u.dims == (4, 5, 4)
    assert u.nnz == s.nnz + t.nnz
    assert flattening_ranks(u) == tuple(x + y for x, y in zip(flattening_ranks(s), flattening_ranks(t)))
    for (i, j, k), v in t.entries.items():
        assert u[(i + 2, j + 2, k + 2)] == v


def test_direct_sum_small_cases(rng):
    assert direct_sum([unit_tensor(1, QQ), unit_tensor(1, QQ)]) == unit_tensor(2, QQ)
    t = random_tensor((2, 2, 2), QQ, rng)
    assert direct_sum([t]) == t
    with pytest.raises(ValueError):
        direct_sum([])


def test_kronecker_power_cases():
    assert kronecker_power(unit_tensor(2, QQ), 3) == unit_tensor(8, QQ)
    s = SparseTensor3((2, 2, 2), {(2, 1, 2): 3}, F101)
    p = kronecker_power(s, 3)
    assert p.entries == {(flat_index((2, 2, 2), 2), 1, flat_index((2, 2, 2), 2)): 27}


@given(seeds)
def test_kronecker_power_entrywise(seed):
    rng = random.Random(seed)
    s = random_tensor((2, 2, 2), F101, rng)
    p = kronecker_power(s, 3)
    for _ in range(10):
        I, J, K = (tuple(rng.randint(1, 2) for _ in range(3)) for _ in range(3))
        expect = 1
        for t in zip(I, J, K):
            expect = expect * s[t] % 101
        assert p[(flat_index(I, 2), flat_index(J, 2), flat_index(K, 2))] == expect


def test_budget_guard():
    s = random_tensor((2, 2, 2), F101, random.Random(1))
    with pytest.raises(BudgetExceeded):
        kronecker_power(s, 4, budget=100)
    with pytest.raises(BudgetExceeded):
        direct_sum([s, s], budget=3)


def test_apply_restriction_identity_zero_and_numpy(rng):
    t = random_tensor((2, 3, 2), F101, rng)
    ids = [LinearMap.identity(n, F101) for n in t.dims]
    assert apply_restriction(*ids, t) == t
    zeros = [LinearMap.zero(2, n, F101) for n in t.dims]
    assert apply_restriction(*zeros, t).is_zero()
    mats = [[[rng.randrange(101) for _ in range(n)] for _ in range(m)] for m, n in zip((3, 2, 4), t.dims)]
    got = apply_restriction(*(LinearMap.from_dense(m, F101) for m in mats), t)
    a, b, c = (np.array(m, dtype=object) for m in mats)
    expect = np.einsum("ia,jb,kc,abc->ijk", a, b, c, np.array(t.to_dense(), dtype=object)) % 101
    assert got == SparseTensor3.from_dense(expect.tolist(), F101)


def test_flattening_ranks_examples():
    assert flattening_ranks(rank_one([1, 2], [0, 3], [1, 1], QQ)) == (1, 1, 1)
    mm2 = build_mm(MMSpec(n=2), QQ)
    assert mm2.dims == (4, 4, 4) and mm2.nnz == 8
    assert flattening_ranks(mm2) == (4, 4, 4)


def test_canonical_form_and_errors():
    t = SparseTensor3((2, 2, 2), {(1, 1, 1): 0, (2, 2, 2): 5}, F101)
    assert dict(t.entries) == {(2, 2, 2): 5}
    assert zero_tensor((1, 2, 3), QQ).is_zero()
    with pytest.raises(DimensionMismatch):
        SparseTensor3((2, 2, 2), {(3, 1, 1): 1}, QQ)
    with pytest.raises(DomainMismatch):
        kronecker_product(unit_tensor(1, QQ), unit_tensor(1, F101))
    with pytest.raises(AttributeError):
        t.foo = 1


@given(st.integers(1, 4), st.integers(1, 4), seeds)
def test_flat_and_multi_index_inverse(d, q, seed):
    rng = random.Random(seed)
    idx = tuple(rng.randint(1, d) for _ in range(q))
    f = flat_index(idx, d)
    assert 1 <= f <= d**q
    assert multi_index(f, d, q) == idx
    # position 1 is most significant
    assert flat_index((d,) + (1,) * (q - 1), d) == (d - 1) * d ** (q - 1) + 1
