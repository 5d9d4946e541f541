import random
from fractions import Fraction

import pytest
import sympy

from conftest import F101, random_tensor
from kronspan.basis import build_t_g
from kronspan.compositions import Composition, Support, enumerate_compositions, w_support
from kronspan.fields import QQ, PrimeField
from kronspan.interpolation import (
    FieldTooSmall,
    build_scheme,
    dimension_of_span,
    interpolate_t_g,
    moment_times_inverse_is_identity,
    span_dimension,
    verify_scheme,
)
from kronspan.tensor import SparseTensor3, kronecker_power, rank_one

CW_G = Composition(w_support(), (1, 1, 1))


@pytest.mark.parametrize("q", [1, 2, 5])
def test_singleton_support(q):
    support = Support(2, ((2, 1, 2),))
    scheme = build_scheme(support, q, QQ)
    assert scheme.size == 1
    assert scheme.moment_matrix == [[q**q]]
    g = scheme.compositions[0]
    lam, ok = interpolate_t_g(scheme, g)
    assert ok and lam == [Fraction(1, q**q)]


def test_moment_matrix_independent_inverse():
    scheme = build_scheme(w_support(), 2, QQ)
    assert scheme.size == 6
    m = sympy.Matrix(scheme.moment_matrix)
    assert m.det() != 0
    inv = m.inv()
    got = scheme.inverse()
    assert all(Fraction(int(inv[i, j].p), int(inv[i, j].q)) == got[i][j] for i in range(6) for j in range(6))
    assert moment_times_inverse_is_identity(scheme)


def test_full_cube_mod_p_scheme():
    scheme = build_scheme(Support.full(2), 3, F101)
    assert scheme.size == 120
    assert moment_times_inverse_is_identity(scheme)


def test_small_cw_reconstruction():
    scheme = build_scheme(w_support(), 3, QQ)
    lam, ok = interpolate_t_g(scheme, CW_G)
    assert ok
    # independent re-summation with Fractions
    acc = {}
    for x, pt in zip(lam, scheme.points):
        for c, v in kronecker_power(pt, 3).entries.items():
            acc[c] = acc.get(c, 0) + x * v
    assert {c: v for c, v in acc.items() if v} == dict(build_t_g(CW_G, field=QQ).entries)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_every_g_on_w_support(q):
    scheme = build_scheme(w_support(), q, QQ)
    for g in scheme.compositions:
        assert interpolate_t_g(scheme, g)[1]
    assert verify_scheme(scheme)


def test_full_cube_q2_all_g():
    scheme = build_scheme(Support.full(2), 2, QQ)
    assert verify_scheme(scheme)
    assert all(interpolate_t_g(scheme, g)[1] for g in scheme.compositions[:5])


def test_random_points_variant():
    scheme = build_scheme(w_support(), 2, QQ, points="random", seed=3)
    assert verify_scheme(scheme)
    with pytest.raises(ValueError):
        build_scheme(w_support(), 2, QQ, points="random")


def test_field_too_small():
    with pytest.raises(FieldTooSmall):
        build_scheme(w_support(), 3, PrimeField(3))


def test_span_dimension_examples():
    rng = random.Random(2)
    support = Support.full(2)
    scheme = build_scheme(support, 2, F101)
    assert span_dimension(support, 2, scheme.points) == 36 == dimension_of_span(support, 2)
    assert span_dimension(support, 2, [random_tensor((2, 2, 2), F101, rng)]) == 1
    big = PrimeField(2**61 - 1)
    ones = [rank_one(*([big.random(rng) for _ in range(2)] for _ in range(3)), big) for _ in range(200)]
    # distinct marginal triples of degree-2 monomials on rank-one points: 3^3 = 27
    assert span_dimension(support, 2, ones) == 27
    with pytest.raises(ValueError):
        span_dimension(w_support(), 2, [SparseTensor3((2, 2, 2), {(2, 2, 2): 1}, QQ)])


def test_random_integer_samples_span_everything():
    rng = random.Random(11)
    support = w_support()
    n = dimension_of_span(support, 3)
    samples = [random_tensor((2, 2, 2), QQ, rng, cells=list(support)) for _ in range(2 * n)]
    assert span_dimension(support, 3, samples) == n
