"""The composition basis tensors T^(g) and the expansion of Kronecker powers.

``T^(g)`` is the 0/1 indicator of ``{(I, J, K) : phi(I, J, K) = g}`` inside the
``d^q x d^q x d^q`` cube. The compressed form re-indexes that support inside
``U_1 x U_2 x U_3``, the q-tuples with the marginal contents of ``g``, each
ordered lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from kronspan.compositions import (
    Composition,
    Support,
    enumerate_compositions,
    multinomial,
    multiset_permutations,
    rank_multiset_permutation,
)
from kronspan.config import BudgetExceeded, resolve_budget
from kronspan.fields import Field, PrimeField
from kronspan.tensor import SparseTensor3, flat_index, kronecker_power, multi_index

# Field used for 0/1 basis tensors when the caller does not pick one.
BASIS_FIELD = PrimeField(2**61 - 1)


@dataclass(frozen=True)
class MarginalProfile:
    g1: tuple[int, ...]
    g2: tuple[int, ...]
    g3: tuple[int, ...]

    @classmethod
    def of(cls, g: Composition) -> "MarginalProfile":
        return cls(g.marginal(1), g.marginal(2), g.marginal(3))

    @property
    def marginals(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return self.g1, self.g2, self.g3

    @property
    def block_dims(self) -> tuple[int, int, int]:
        return multinomial(self.g1), multinomial(self.g2), multinomial(self.g3)


def t_g_entry(g: Composition, I, J, K) -> int:
    """``[phi(I, J, K) == g]`` in time linear in ``q``."""
    q = g.q
    if not len(I) == len(J) == len(K) == q:
        return 0
    target = dict(g.mass())
    seen: dict = {}
    for t in zip(I, J, K):
        c = seen.get(t, 0) + 1
        if c > target.get(t, 0):
            return 0
        seen[t] = c
    return 1


def orbit_points(g: Composition) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """All ``(I, J, K)`` with ``phi(I, J, K) = g``: arrangements of the multiset of triples."""
    multiset = [t for t, c in g.mass() for _ in range(c)]
    for seq in multiset_permutations(multiset):
        I, J, K = zip(*seq)
        yield I, J, K


def build_t_g(g: Composition, compressed: bool = False, field: Field = BASIS_FIELD, budget: int | None = None) -> SparseTensor3:
    size = multinomial(g.counts)
    limit = resolve_budget(budget)
    if size > limit:
        raise BudgetExceeded(f"T^(g) has {size} nonzeros, budget {limit}")
    d, q = g.d, g.q
    one = field.one
    entries = {}
    if compressed:
        prof = MarginalProfile.of(g)
        for I, J, K in orbit_points(g):
            key = (
                rank_multiset_permutation(I, prof.g1) + 1,
                rank_multiset_permutation(J, prof.g2) + 1,
                rank_multiset_permutation(K, prof.g3) + 1,
            )
            entries[key] = one
        return SparseTensor3._trusted(prof.block_dims, entries, field)
    for I, J, K in orbit_points(g):
        entries[(flat_index(I, d), flat_index(J, d), flat_index(K, d))] = one
    n = d**q
    return SparseTensor3._trusted((n, n, n), entries, field)


@lru_cache(maxsize=4096)
def _cached_t_g(g: Composition, field: Field) -> SparseTensor3:
    return build_t_g(g, field=field)


def monomial_eval(s: SparseTensor3, g: Composition):
    """``prod S[i,j,k]^g(i,j,k)``; absent entries are 0 and ``0^0 = 1``."""
    d = g.d
    if s.dims != (d, d, d):
        raise ValueError(f"tensor dims {s.dims} do not match d={d}")
    f = s.field
    out = f.one
    for t, c in g.mass():
        v = s[t]
        if not v:
            return f.zero
        out = f.mul(out, f.pow(v, c))
    return out


def support_of(s: SparseTensor3) -> Support | None:
    d = s.dims[0]
    if s.dims != (d, d, d):
        raise ValueError("expected a cubic tensor")
    return Support(d, tuple(s.entries)) if s.nnz else None


def expand_power(s: SparseTensor3, q: int, support: Support | None = None) -> SparseTensor3:
    """``sum_g S^g T^(g)`` over ``g`` in ``C_q^support`` (support defaults to supp S)."""
    d = s.dims[0]
    f = s.field
    support = support or support_of(s)
    n = d**q
    if support is None:
        return SparseTensor3._trusted((n, n, n), {}, f)
    out = {}
    for g in enumerate_compositions(support, q):
        coef = monomial_eval(s, g)
        if not coef:
            continue
        for coord in _cached_t_g(g, f).entries:
            out[coord] = f.add(out.get(coord, f.zero), coef)
    return SparseTensor3._trusted((n, n, n), {c: v for c, v in out.items() if v}, f)


def verify_expansion(s: SparseTensor3, q: int, budget: int | None = None) -> bool:
    """Check ``S^{⊠q} == sum_g S^g T^(g)`` exactly, with Δ the support of ``S``."""
    lhs = kronecker_power(s, q, budget=budget)
    return lhs == expand_power(s, q)


def _adjacent_swaps(point, q):
    I, J, K = point
    for pos in range(q - 1):
        if (I[pos], J[pos], K[pos]) == (I[pos + 1], J[pos + 1], K[pos + 1]):
            continue
        sw = lambda x: x[:pos] + (x[pos + 1], x[pos]) + x[pos + 2 :]
        yield sw(I), sw(J), sw(K)


def orbit_check(g: Composition, budget: int | None = None) -> bool:
    """The support of the full-form T^(g) is one orbit of simultaneous position permutations."""
    t = build_t_g(g, budget=budget)
    d, q = g.d, g.q
    support = {tuple(multi_index(x, d, q) for x in coord) for coord in t.entries}
    if not support:
        return False
    start = min(support)
    seen = {start}
    stack = [start]
    while stack:
        pt = stack.pop()
        for nxt in _adjacent_swaps(pt, q):
            if nxt not in support:
                return False
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen == support


def orbit_size(g: Composition) -> int:
    return multinomial(g.counts)
