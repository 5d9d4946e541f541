"""Universal sequences as block direct sums of compressed T^(g), plus an
entry oracle that never materializes the tensor.

Kinds:

* ``u``    U_{Δ,q}: one block per g in C_q^Δ
* ``ud``   U_{d,q}: Δ = [d]^3
* ``td``   T_{d,q}: U_{Δ,q} for every tight Δ, supports ordered by (size, lex)
* ``diag`` D_d = U_{d,d^4}
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field as dc_field
from itertools import accumulate
from math import comb
from typing import Sequence

from kronspan.basis import BASIS_FIELD, build_t_g, t_g_entry
from kronspan.compositions import (
    Composition,
    Support,
    count_compositions,
    enumerate_compositions,
    multinomial,
    rank_multiset_permutation,
    unrank_multiset_permutation,
)
from kronspan.config import BudgetExceeded, resolve_budget
from kronspan.fields import Field
from kronspan.tensor import SparseTensor3, direct_sum
from kronspan.tightness import TightnessCertificate, decide_tight, enumerate_tight_supports, verify_certificate

KINDS = ("u", "ud", "td", "diag")
DEFAULT_BLOCK_LIMIT = 2_000_000


class NotTight(ValueError):
    pass


@dataclass(frozen=True)
class UniversalSpec:
    kind: str
    d: int
    q: int | None = None
    support: Support | None = None
    supports: tuple[Support, ...] | None = None  # user-supplied tight supports for ``td``

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.kind == "diag":
            if self.q not in (None, self.d**4):
                raise ValueError("the diagonal sequence fixes q = d^4")
            object.__setattr__(self, "q", self.d**4)
        elif self.q is None or self.q < 1:
            raise ValueError("q must be a positive integer")
        if self.kind == "u":
            if self.support is None:
                raise ValueError("kind 'u' needs a support")
            if self.support.d != self.d:
                raise ValueError("support dimension does not match d")

    def block_supports(self) -> list[Support]:
        if self.kind == "u":
            return [self.support]
        if self.kind in ("ud", "diag"):
            return [Support.full(self.d)]
        if self.supports is not None:
            sups = sorted(self.supports, key=lambda s: (len(s), s.triples))
        else:
            mode = "exhaustive" if self.d <= 2 else "maximal"
            sups = sorted(enumerate_tight_supports(self.d, mode=mode), key=lambda s: (len(s), s.triples))
        for s in sups:
            cert = decide_tight(s)
            if not isinstance(cert, TightnessCertificate) or not verify_certificate(s, cert):
                raise NotTight(f"support {s.triples} is not tight")
        return sups

    def to_json(self) -> dict:
        out = {"kind": self.kind, "d": self.d, "q": self.q}
        if self.support is not None:
            out["support"] = self.support.to_json()
        if self.supports is not None:
            out["supports"] = [s.to_json() for s in self.supports]
        return out


@dataclass(frozen=True)
class GlobalCoordinate:
    """Block id (0-based, spec order) with 1-based within-block indices."""

    block: int
    local: tuple[int, int, int]


@dataclass
class BlockTable:
    """Block list with exact prefix-sum offsets per mode."""

    spec: UniversalSpec
    blocks: list[Composition]
    block_dims: list[tuple[int, int, int]]
    offsets: tuple[list[int], list[int], list[int]] = dc_field(repr=False)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(off[-1] for off in self.offsets)

    def __len__(self) -> int:
        return len(self.blocks)

    def locate(self, coord: Sequence[int]) -> GlobalCoordinate | None:
        """Translate absolute 1-based coordinates; ``None`` if the modes land in different blocks."""
        found = []
        for mode, x in enumerate(coord):
            off = self.offsets[mode]
            if not 1 <= x <= off[-1]:
                raise IndexError(f"coordinate {x} outside [1, {off[-1]}] in mode {mode + 1}")
            found.append(bisect_right(off, x - 1) - 1)
        if not found[0] == found[1] == found[2]:
            return None
        b = found[0]
        return GlobalCoordinate(b, tuple(x - self.offsets[m][b] for m, x in enumerate(coord)))

    def absolute(self, gc: GlobalCoordinate) -> tuple[int, int, int]:
        dims = self.block_dims[gc.block]
        if not all(1 <= x <= n for x, n in zip(gc.local, dims)):
            raise IndexError(f"local coordinate {gc.local} outside block dims {dims}")
        return tuple(self.offsets[m][gc.block] + x for m, x in enumerate(gc.local))


def block_table(spec: UniversalSpec, block_limit: int = DEFAULT_BLOCK_LIMIT) -> BlockTable:
    count = block_count(spec)
    if count > block_limit:
        raise BudgetExceeded(f"{count} blocks exceed the offset-table limit {block_limit}")
    blocks, dims = [], []
    for sup in spec.block_supports():
        for g in enumerate_compositions(sup, spec.q):
            blocks.append(g)
            dims.append(tuple(multinomial(g.marginal(m)) for m in (1, 2, 3)))
    offsets = tuple([0, *accumulate(x[m] for x in dims)] for m in range(3))
    return BlockTable(spec, blocks, dims, offsets)


def build_universal(spec: UniversalSpec, field: Field = BASIS_FIELD, budget: int | None = None) -> SparseTensor3:
    limit = resolve_budget(budget)
    total = sequence_nnz(spec)
    if total > limit:
        raise BudgetExceeded(f"{total} nonzeros exceed budget {limit}; use the entry oracle instead")
    parts = []
    for sup in spec.block_supports():
        for g in enumerate_compositions(sup, spec.q):
            parts.append(build_t_g(g, compressed=True, field=field, budget=limit))
    return direct_sum(parts, budget=limit)


def local_entry(g: Composition, local: Sequence[int]) -> int:
    I = unrank_multiset_permutation(local[0] - 1, g.marginal(1))
    J = unrank_multiset_permutation(local[1] - 1, g.marginal(2))
    K = unrank_multiset_permutation(local[2] - 1, g.marginal(3))
    return t_g_entry(g, I, J, K)


def universal_entry(table: BlockTable, coord: Sequence[int] | GlobalCoordinate) -> int:
    if isinstance(coord, GlobalCoordinate):
        table.absolute(coord)  # range check
        gc = coord
    else:
        gc = table.locate(coord)
        if gc is None:
            return 0
    return local_entry(table.blocks[gc.block], gc.local)


def orbit_coordinate(table: BlockTable, block: int, I, J, K) -> tuple[int, int, int]:
    """Absolute coordinate of the orbit point ``(I, J, K)`` inside ``block``."""
    g = table.blocks[block]
    local = tuple(rank_multiset_permutation(x, g.marginal(m)) + 1 for m, x in zip((1, 2, 3), (I, J, K)))
    return table.absolute(GlobalCoordinate(block, local))


def random_coordinate(table: BlockTable, rng: random.Random) -> tuple[int, int, int]:
    return tuple(rng.randint(1, n) for n in table.dims)


# -- closed-form statistics -------------------------------------------------------


def block_count(spec: UniversalSpec) -> int:
    return sum(count_compositions(len(s), spec.q) for s in spec.block_supports())


def sequence_nnz(spec: UniversalSpec) -> int:
    # the T^(g), g in C_q^Δ, partition the q-th power of the support
    return sum(len(s) ** spec.q for s in spec.block_supports())


def _exp_convolve(f: list[int], g: list[int]) -> list[int]:
    n = len(f) - 1
    return [sum(comb(m, a) * f[a] * g[m - a] for a in range(m + 1)) for m in range(n + 1)]


def mode_dimension(support: Support, q: int, mode: int) -> int:
    """``sum_g multinomial(g_mode)`` over g in C_q^Δ, without enumerating g.

    Grouping g by its marginal m, the count of g with that marginal is
    ``prod_j binom(m_j + c_j - 1, c_j - 1)`` where ``c_j`` counts triples with
    mode-coordinate j; summing ``multinomial(m)`` times that is an exponential
    convolution over the symbols j.
    """
    c = [0] * support.d
    for t in support:
        c[t[mode - 1] - 1] += 1
    acc = [1] + [0] * q
    for cj in c:
        if cj == 0:
            continue
        series = [comb(m + cj - 1, cj - 1) for m in range(q + 1)]
        acc = _exp_convolve(acc, series)
    return acc[q]


def sequence_stats(spec: UniversalSpec) -> dict:
    sups = spec.block_supports()
    dims = tuple(sum(mode_dimension(s, spec.q, m) for s in sups) for m in (1, 2, 3))
    return {
        "kind": spec.kind,
        "d": spec.d,
        "q": spec.q,
        "dims": list(dims),
        "nnz": sequence_nnz(spec),
        "block_count": block_count(spec),
        "supports": len(sups),
    }


def diagonal_spec(d: int) -> UniversalSpec:
    return UniversalSpec("diag", d)
