"""Integer compositions over a support, the triple-counting map, and
ranking of multiset permutations.

Compositions are enumerated in colexicographic order of their count vector
over the sorted support: the last coordinate varies slowest.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Sequence

Triple = tuple[int, int, int]


def multinomial(parts: Iterable[int]) -> int:
    parts = list(parts)
    out = factorial(sum(parts))
    for x in parts:
        out //= factorial(x)
    return out


def count_compositions(m: int, q: int) -> int:
    """Number of compositions of ``q`` into ``m`` nonnegative parts."""
    if m < 1:
        raise ValueError("need at least one part")
    if q < 0:
        return 0
    return comb(m - 1 + q, m - 1)


@dataclass(frozen=True)
class Support:
    """A nonempty set of triples in ``[d]^3``, kept sorted and deduplicated."""

    d: int
    triples: tuple[Triple, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        trip = tuple(sorted(set(tuple(int(x) for x in t) for t in self.triples)))
        if not trip:
            raise ValueError("support must be nonempty")
        for t in trip:
            if len(t) != 3 or not all(1 <= x <= self.d for x in t):
                raise ValueError(f"triple {t} outside [1,{self.d}]^3")
        object.__setattr__(self, "triples", trip)

    @classmethod
    def full(cls, d: int) -> "Support":
        return cls(d, tuple(product(range(1, d + 1), repeat=3)))

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._index

    @property
    def _index(self) -> dict[Triple, int]:
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = {t: n for n, t in enumerate(self.triples)}
            object.__setattr__(self, "_idx", idx)
            return idx

    def position(self, t: Triple) -> int:
        return self._index[tuple(t)]

    def projection(self, a: int, b: int) -> frozenset[tuple[int, int]]:
        """Projection onto modes ``a < b`` (1-based), e.g. ``projection(1, 2)``."""
        return frozenset((t[a - 1], t[b - 1]) for t in self.triples)

    def to_json(self) -> dict:
        return {"d": self.d, "triples": [list(t) for t in self.triples]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Support":
        return cls(int(obj["d"]), tuple(tuple(t) for t in obj["triples"]))


def w_support() -> Support:
    """The support {(1,1,2),(1,2,1),(2,1,1)} of the 2x2x2 W-tensor."""
    return Support(2, ((1, 1, 2), (1, 2, 1), (2, 1, 1)))


@dataclass(frozen=True)
class Composition:
    """A map ``support -> N`` with total mass ``q``; counts align with ``support.triples``."""

    support: Support
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != len(self.support):
            raise ValueError("counts must align with the support")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) < 1:
            raise ValueError("a composition needs positive total mass")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_mapping(cls, support: Support, mapping: Mapping[Triple, int]) -> "Composition":
        counts = [0] * len(support)
        for t, c in mapping.items():
            counts[support.position(t)] = c
        return cls(support, tuple(counts))

    @property
    def q(self) -> int:
        return sum(self.counts)

    @property
    def d(self) -> int:
        return self.support.d

    def __getitem__(self, t: Triple) -> int:
        t = tuple(t)
        return self.counts[self.support.position(t)] if t in self.support else 0

    def mass(self) -> tuple[tuple[Triple, int], ...]:
        """Positive part as sorted ``(triple, count)`` pairs; independent of the support."""
        return tuple((t, c) for t, c in zip(self.support.triples, self.counts) if c)

    def items(self) -> Iterator[tuple[Triple, int]]:
        return zip(self.support.triples, self.counts)

    def marginal(self, mode: int) -> tuple[int, ...]:
        out = [0] * self.d
        for t, c in zip(self.support.triples, self.counts):
            out[t[mode - 1] - 1] += c
        return tuple(out)

    def to_json(self) -> dict:
        return {"support": self.support.to_json(), "q": self.q, "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Composition":
        return cls(Support.from_json(obj["support"]), tuple(obj["counts"]))


# -- enumeration and ranking ---------------------------------------------------


def _colex(m: int, q: int) -> Iterator[tuple[int, ...]]:
    if m == 1:
        yield (q,)
        return
    for last in range(q + 1):
        for head in _colex(m - 1, q - last):
            yield head + (last,)


def enumerate_count_vectors(m: int, q: int) -> Iterator[tuple[int, ...]]:
    return _colex(m, q)


def enumerate_compositions(support: Support, q: int) -> Iterator[Composition]:
    if q < 1:
        raise ValueError("q must be positive")
    for counts in _colex(len(support), q):
        yield Composition(support, counts)


def rank_count_vector(counts: Sequence[int]) -> int:
    rank = 0
    rem = sum(counts)
    for t in range(len(counts) - 1, 0, -1):
        v = counts[t]
        # compositions of rem into t+1 parts whose last part is below v
        rank += comb(t + rem, t) - comb(t + rem - v, t)
        rem -= v
    return rank


def unrank_count_vector(m: int, q: int, idx: int) -> tuple[int, ...]:
    total = count_compositions(m, q)
    if not 0 <= idx < total:
        raise IndexError(f"rank {idx} outside [0, {total})")
    out = [0] * m
    rem = q
    for t in range(m - 1, 0, -1):
        v = 0
        while True:
            block = count_compositions(t, rem - v)
            if idx < block:
                break
            idx -= block
            v += 1
        out[t] = v
        rem -= v
    out[0] = rem
    return tuple(out)


def rank_composition(g: Composition) -> int:
    return rank_count_vector(g.counts)


def unrank_composition(support: Support, q: int, idx: int) -> Composition:
    return Composition(support, unrank_count_vector(len(support), q, idx))


# -- triple counting -------------------------------------------------------------


def phi(I: Sequence[int], J: Sequence[int], K: Sequence[int], d: int) -> Composition:
    """Triple-counting composition: multiplicity of each ``(i_l, j_l, k_l)``.

    The support of the result is the set of triples with positive count.
    """
    if not len(I) == len(J) == len(K):
        raise ValueError("I, J, K must have the same length")
    counts: dict[Triple, int] = {}
    for t in zip(I, J, K):
        if not all(1 <= x <= d for x in t):
            raise ValueError(f"index {t} outside [1,{d}]")
        counts[t] = counts.get(t, 0) + 1
    return Composition.from_mapping(Support(d, tuple(counts)), counts)


# -- multiset permutations (lexicographic) ----------------------------------------


def content(seq: Sequence[int], d: int) -> tuple[int, ...]:
    out = [0] * d
    for x in seq:
        out[x - 1] += 1
    return tuple(out)


def rank_multiset_permutation(seq: Sequence[int], counts: Sequence[int]) -> int:
    """0-based lexicographic rank of ``seq`` among arrangements of the multiset
    with ``counts[j-1]`` copies of symbol ``j``."""
    counts = list(counts)
    if content(seq, len(counts)) != tuple(counts):
        raise ValueError("sequence does not match the multiset")
    n = len(seq)
    total = multinomial(counts)
    rank = 0
    for pos, x in enumerate(seq):
        remaining = n - pos
        for s in range(1, x):
            if counts[s - 1]:
                # arrangements starting with s: total * counts[s]/remaining
                rank += total * counts[s - 1] // remaining
        total = total * counts[x - 1] // remaining
        counts[x - 1] -= 1
    return rank


def unrank_multiset_permutation(idx: int, counts: Sequence[int]) -> tuple[int, ...]:
    counts = list(counts)
    total = multinomial(counts)
    if not 0 <= idx < total:
        raise IndexError(f"rank {idx} outside [0, {total})")
    n = sum(counts)
    out = []
    for pos in range(n):
        remaining = n - pos
        for s in range(1, len(counts) + 1):
            if not counts[s - 1]:
                continue
            block = total * counts[s - 1] // remaining
            if idx < block:
                out.append(s)
                total = block
                counts[s - 1] -= 1
                break
            idx -= block
    return tuple(out)


def multiset_permutations(items: Sequence) -> Iterator[tuple]:
    """Distinct permutations of ``items`` in lexicographic order."""
    a = sorted(items)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])
