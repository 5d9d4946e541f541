"""Tightness of supports: exact decision with integer certificates.

A support is tight when injective ``alpha, beta, gamma: [d] -> Z`` exist with
``alpha[i] + beta[j] + gamma[k] = 0`` on every triple. The equations cut out a
rational subspace of ``Q^{3d}``; injectivity fails only on the hyperplanes
``x_i = x_i'``, so a certificate exists exactly when no such difference
vanishes on the whole subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations, product
from math import gcd, lcm
from typing import Iterator

from kronspan import linalg
from kronspan.compositions import Support
from kronspan.fields import QQ

MODE_NAMES = {1: "alpha", 2: "beta", 3: "gamma"}
EXHAUSTIVE_LIMIT = 2
MAXIMAL_LIMIT = 3


class EnumerationLimit(ValueError):
    pass


@dataclass(frozen=True)
class TightnessCertificate:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "beta": list(self.beta), "gamma": list(self.gamma)}

    @classmethod
    def from_json(cls, obj: dict) -> "TightnessCertificate":
        return cls(tuple(obj["alpha"]), tuple(obj["beta"]), tuple(obj["gamma"]))


@dataclass(frozen=True)
class NonTightnessWitness:
    """``x[pair[0]] - x[pair[1]]`` (x = alpha, beta or gamma by ``mode``) is zero on every solution."""

    mode: int
    pair: tuple[int, int]

    @property
    def reason(self) -> str:
        name = MODE_NAMES[self.mode]
        i, j = self.pair
        return f"{name}({i}) - {name}({j}) vanishes on every solution"

    def to_json(self) -> dict:
        return {"mode": self.mode, "pair": list(self.pair), "reason": self.reason}


def _system(support: Support) -> list[list[int]]:
    d = support.d
    rows = []
    for i, j, k in support:
        row = [0] * (3 * d)
        row[i - 1] += 1
        row[d + j - 1] += 1
        row[2 * d + k - 1] += 1
        rows.append(row)
    return rows


def solution_basis(support: Support) -> list[list[int]]:
    """Integer basis of the solutions of the tightness equations (3d unknowns)."""
    d = support.d
    basis = []
    for vec in linalg.nullspace(_system(support), 3 * d, QQ):
        den = reduce(lcm, (Fraction(x).denominator for x in vec), 1)
        ints = [int(Fraction(x) * den) for x in vec]
        g = reduce(gcd, ints, 0) or 1
        basis.append([x // g for x in ints])
    return basis


def _difference_pairs(d: int) -> list[tuple[int, int, int]]:
    return [(mode, i, j) for mode in (1, 2, 3) for i, j in combinations(range(1, d + 1), 2)]


def _injective_point(basis: list[list[int]], d: int, pairs) -> list[int]:
    """Smallest-first search for a combination of ``basis`` off all difference hyperplanes."""
    # each functional restricted to the parameter space
    forms = []
    for mode, i, j in pairs:
        off = (mode - 1) * d
        forms.append([v[off + i - 1] - v[off + j - 1] for v in basis])
    n = len(basis)

    def ok(c):
        return all(sum(a * b for a, b in zip(f, c)) != 0 for f in forms)

    if n <= 6:
        for bound in range(0, 3):
            for c in product(range(bound + 1), repeat=n):
                if max(c, default=0) == bound and ok(c):
                    return _combine(basis, c, d)
    # moment curve: each form becomes a nonzero polynomial in s of degree < n
    s = 1
    while True:
        c = [s**e for e in range(n)]
        if ok(c):
            return _combine(basis, c, d)
        s += 1


def _combine(basis, c, d):
    x = [sum(cv * v[t] for cv, v in zip(c, basis)) for t in range(3 * d)]
    g = reduce(gcd, x, 0)
    return [v // g for v in x] if g else x


@lru_cache(maxsize=1 << 16)
def decide_tight(support: Support) -> TightnessCertificate | NonTightnessWitness:
    d = support.d
    basis = solution_basis(support)
    for mode, i, j in _difference_pairs(d):
        off = (mode - 1) * d
        if all(v[off + i - 1] == v[off + j - 1] for v in basis):
            return NonTightnessWitness(mode, (i, j))
    x = _injective_point(basis, d, _difference_pairs(d))
    cert = TightnessCertificate(tuple(x[:d]), tuple(x[d : 2 * d]), tuple(x[2 * d :]))
    assert verify_certificate(support, cert)
    return cert


def is_tight(support: Support) -> bool:
    return isinstance(decide_tight(support), TightnessCertificate)


def verify_certificate(support: Support, cert: TightnessCertificate) -> bool:
    d = support.d
    arrays = (cert.alpha, cert.beta, cert.gamma)
    if any(len(a) != d for a in arrays):
        return False
    if any(len(set(a)) != d for a in arrays):
        return False
    return all(cert.alpha[i - 1] + cert.beta[j - 1] + cert.gamma[k - 1] == 0 for i, j, k in support)


def verify_witness(support: Support, witness: NonTightnessWitness) -> bool:
    d = support.d
    off = (witness.mode - 1) * d
    i, j = witness.pair
    if i == j:
        return False
    return all(v[off + i - 1] == v[off + j - 1] for v in solution_basis(support))


def _all_triples(d: int):
    return list(product(range(1, d + 1), repeat=3))


def enumerate_tight_supports(d: int, max_size: int | None = None, mode: str = "exhaustive", limit: int | None = None) -> Iterator[Support]:
    """Tight supports in ``[d]^3`` ordered by (size, lexicographic triples).

    ``exhaustive`` tests every nonempty subset. ``maximal`` grows supports one
    triple at a time and abandons a branch as soon as it stops being tight;
    since tightness passes to subsets, the result is the same set.
    """
    triples = _all_triples(d)
    top = len(triples) if max_size is None else min(max_size, len(triples))
    if mode == "exhaustive":
        if d > (EXHAUSTIVE_LIMIT if limit is None else limit):
            raise EnumerationLimit(f"exhaustive enumeration is limited to d <= {EXHAUSTIVE_LIMIT}")
        for size in range(1, top + 1):
            for combo in combinations(triples, size):
                s = Support(d, combo)
                if is_tight(s):
                    yield s
    elif mode == "maximal":
        if d > (MAXIMAL_LIMIT if limit is None else limit):
            raise EnumerationLimit(f"maximal-set enumeration is limited to d <= {MAXIMAL_LIMIT}")
        level = [(t,) for t in triples if is_tight(Support(d, (t,)))]
        size = 1
        while level and size <= top:
            for combo in level:
                yield Support(d, combo)
            if size == top:
                break
            nxt = []
            known = frozenset(level)
            # extend by larger triples only, so each set is produced once
            for combo in level:
                start = triples.index(combo[-1]) + 1
                for t in triples[start:]:
                    cand = combo + (t,)
                    if all(cand[:m] + cand[m + 1 :] in known for m in range(len(cand) - 1)) and is_tight(Support(d, cand)):
                        nxt.append(cand)
            level = nxt
            size += 1
    else:
        raise ValueError(f"unknown enumeration mode {mode!r}")


def maximal_tight_supports(d: int, limit: int | None = None) -> list[Support]:
    """Inclusion-maximal tight supports."""
    tight = [frozenset(s.triples) for s in enumerate_tight_supports(d, mode="maximal", limit=limit)]
    by_size = sorted(tight, key=len, reverse=True)
    maximal: list[frozenset] = []
    for s in by_size:
        if not any(s < m for m in maximal):
            maximal.append(s)
    return sorted((Support(d, tuple(m)) for m in maximal), key=lambda s: (len(s), s.triples))
