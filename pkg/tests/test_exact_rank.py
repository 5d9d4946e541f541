import itertools

import pytest

from kronspan.compositions import w_support
from kronspan.exact_rank import SearchLimit, decomposition_tensor, exact_rank_small
from kronspan.fields import QQ, PrimeField
from kronspan.tensor import SparseTensor3, flattening_ranks, rank_one, unit_tensor

F2, F3 = PrimeField(2), PrimeField(3)


def bfs_ranks(dims, p):
    """Rank of every tensor of the given shape by breadth-first sums of rank-one tensors."""
    a, b, c = dims
    vecs = lambda n: [v for v in itertools.product(range(p), repeat=n) if any(v)]
    ones = {
        tuple((x * y * z) % p for x in u for y in v for z in w)
        for u in vecs(a)
        for v in vecs(b)
        for w in vecs(c)
    }
    zero = (0,) * (a * b * c)
    rank = {zero: 0}
    frontier = [zero]
    r = 0
    while frontier:
        r += 1
        nxt = []
        for t in frontier:
            for o in ones:
                s = tuple((x + y) % p for x, y in zip(t, o))
                if s not in rank:
                    rank[s] = r
                    nxt.append(s)
        frontier = nxt
    return rank


def to_tensor(flat, dims, field):
    a, b, c = dims
    entries = {}
    for e, v in enumerate(flat):
        if v:
            i, rest = divmod(e, b * c)
            j, k = divmod(rest, c)
            entries[(i + 1, j + 1, k + 1)] = v
    return SparseTensor3(dims, entries, field)


@pytest.mark.parametrize("field", [F2, F3])
def test_all_2x2x2_match_bfs(field):
    oracle = bfs_ranks((2, 2, 2), field.p)
    assert len(oracle) == field.p**8
    for flat, r in oracle.items():
        t = to_tensor(flat, (2, 2, 2), field)
        res = exact_rank_small(t)
        assert res.rank == r, flat
        if r:
            assert decomposition_tensor((2, 2, 2), res.decomposition, field) == t


def test_2x2x3_over_f2_match_bfs():
    oracle = bfs_ranks((2, 2, 3), 2)
    for flat, r in list(oracle.items())[::7]:
        assert exact_rank_small(to_tensor(flat, (2, 2, 3), F2), decompose=False).rank == r


def test_known_ranks():
    assert exact_rank_small(unit_tensor(2, F2)).rank == 2
    assert exact_rank_small(unit_tensor(3, F3)).rank == 3
    assert exact_rank_small(rank_one([1, 1], [0, 1], [1, 0], F2)).rank == 1
    w = SparseTensor3((2, 2, 2), {t: 1 for t in w_support()}, F2)
    res = exact_rank_small(w)
    assert res.rank == 3 and max(flattening_ranks(w)) == 2
    assert decomposition_tensor((2, 2, 2), res.decomposition, F2) == w
    assert exact_rank_small(SparseTensor3((2, 2, 2), {}, F2)).rank == 0


def test_cap_reports_lower_bound():
    w = SparseTensor3((2, 2, 2), {t: 1 for t in w_support()}, F2)
    res = exact_rank_small(w, cap=2)
    assert res.rank is None and str(res) == "> 2"
    assert res.to_json()["rank"] == "> 2"


def test_3x3x3_decomposition_reconstructs():
    # the small Coppersmith-Winograd block: six permutation entries
    cw = SparseTensor3((3, 3, 3), {p: 1 for p in itertools.permutations((1, 2, 3))}, F3)
    res = exact_rank_small(cw)
    assert res.rank is not None and res.rank >= max(flattening_ranks(cw))
    assert decomposition_tensor((3, 3, 3), res.decomposition, F3) == cw


def test_limits():
    with pytest.raises(SearchLimit):
        exact_rank_small(unit_tensor(2, QQ))
    with pytest.raises(SearchLimit):
        exact_rank_small(unit_tensor(4, F2))
    with pytest.raises(SearchLimit):
        exact_rank_small(unit_tensor(2, PrimeField(5)))
    with pytest.raises(SearchLimit):
        exact_rank_small(unit_tensor(2, F2), cap=5)
