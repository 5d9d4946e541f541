import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_nonempty_subsets_d2, brute_force_tight_d2
from kronspan.compositions import Support, w_support
from kronspan.tightness import (
    EnumerationLimit,
    NonTightnessWitness,
    TightnessCertificate,
    decide_tight,
    enumerate_tight_supports,
    is_tight,
    maximal_tight_supports,
    solution_basis,
    verify_certificate,
    verify_witness,
)


def test_singleton_d1():
    cert = decide_tight(Support(1, ((1, 1, 1),)))
    assert cert == TightnessCertificate((0,), (0,), (0,))


def test_w_support_certificate():
    w = w_support()
    cert = decide_tight(w)
    assert isinstance(cert, TightnessCertificate) and verify_certificate(w, cert)
    assert verify_certificate(w, TightnessCertificate((0, -1), (0, -1), (1, 0)))
    assert not verify_certificate(w, TightnessCertificate((0, -1), (0, -1), (0, 0)))
    assert TightnessCertificate.from_json(cert.to_json()) == cert


def test_full_cube_witness():
    cube = Support.full(2)
    wit = decide_tight(cube)
    assert isinstance(wit, NonTightnessWitness) and verify_witness(cube, wit)
    assert "vanishes" in wit.reason
    for a, b, c in itertools.product(itertools.product(range(-2, 3), repeat=2), repeat=3):
        assert not verify_certificate(cube, TightnessCertificate(a, b, c))


def test_agrees_with_brute_force_on_all_subsets():
    count = 0
    for combo in all_nonempty_subsets_d2():
        s = Support(2, combo)
        result = decide_tight(s)
        assert isinstance(result, TightnessCertificate) == brute_force_tight_d2(combo), combo
        if isinstance(result, TightnessCertificate):
            assert verify_certificate(s, result)
        else:
            assert verify_witness(s, result)
        count += 1
    assert count == 255


def test_solution_basis_solves_system():
    for combo in [((1, 1, 2), (2, 2, 1)), tuple(w_support())]:
        s = Support(2, combo)
        for v in solution_basis(s):
            assert all(v[i - 1] + v[2 + j - 1] + v[4 + k - 1] == 0 for i, j, k in combo)


triples3 = st.lists(st.tuples(*(st.integers(1, 3),) * 3), min_size=1, max_size=7, unique=True)


@given(triples3)
def test_sound_and_downward_closed(triples):
    s = Support(3, tuple(triples))
    res = decide_tight(s)
    if isinstance(res, TightnessCertificate):
        assert verify_certificate(s, res)
        for m in range(1, len(s)):
            for sub in itertools.combinations(s.triples, m):
                # a certificate for the superset certifies every subset
                assert verify_certificate(Support(3, sub), res)
                assert is_tight(Support(3, sub))
    else:
        assert verify_witness(s, res)


@given(triples3)
def test_deterministic(triples):
    s = Support(3, tuple(triples))
    decide_tight.cache_clear()
    first = decide_tight(s)
    decide_tight.cache_clear()
    assert decide_tight(s) == first


def test_enumeration_small_cases():
    assert [s.triples for s in enumerate_tight_supports(1)] == [((1, 1, 1),)]
    ones = list(enumerate_tight_supports(2, max_size=1))
    assert len(ones) == 8
    all_tight = list(enumerate_tight_supports(2))
    assert w_support() in all_tight and Support.full(2) not in all_tight
    keys = [(len(s), s.triples) for s in all_tight]
    assert keys == sorted(keys)
    brute = [c for c in all_nonempty_subsets_d2() if brute_force_tight_d2(c)]
    assert len(all_tight) == len(brute)


def test_maximal_mode_matches_exhaustive_d2():
    assert list(enumerate_tight_supports(2, mode="maximal")) == list(enumerate_tight_supports(2))
    maximal = maximal_tight_supports(2)
    tight = {frozenset(s.triples) for s in enumerate_tight_supports(2)}
    for m in maximal:
        assert not any(frozenset(m.triples) < t for t in tight)


def test_enumeration_limits():
    with pytest.raises(EnumerationLimit):
        next(enumerate_tight_supports(3))
    with pytest.raises(EnumerationLimit):
        next(enumerate_tight_supports(4, mode="maximal"))
