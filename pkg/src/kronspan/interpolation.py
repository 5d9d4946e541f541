"""Recovering each T^(g) as a combination of Kronecker powers S_f^{⊠q}.

Points sit on the principal lattice: ``S_f`` carries the value ``f(δ)`` at
each ``δ`` of the support, for ``f`` ranging over ``C_q^Δ``. Homogeneous
degree-q polynomials are unisolvent on this lattice in characteristic 0 and
over F_p with p > q, so the moment matrix ``M[f][g] = S_f^g`` is invertible.
Writing ``T^(g) = sum_f lam[f][g] S_f^{⊠q}`` and expanding each power in the
composition basis gives ``lam[f][g] = (M^{-1})[g][f]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from kronspan import linalg
from kronspan.basis import build_t_g, monomial_eval
from kronspan.compositions import Composition, Support, count_compositions, enumerate_compositions, rank_composition
from kronspan.config import resolve_budget, BudgetExceeded
from kronspan.fields import Field, PrimeField
from kronspan.tensor import SparseTensor3, kronecker_power


class FieldTooSmall(ValueError):
    pass


class InterpolationDefect(RuntimeError):
    """The moment matrix came out singular; for lattice points this is a bug."""


@dataclass
class InterpolationScheme:
    support: Support
    q: int
    field: Field
    compositions: list[Composition]
    points: list[SparseTensor3]
    moment_matrix: list[list]
    # M^{-1} = inverse_numerators / inverse_denominator (denominator 1 over F_p)
    inverse_numerators: list[list[int]]
    inverse_denominator: int
    point_kind: str = "lattice"
    _powers: dict[int, SparseTensor3] = dc_field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.compositions)

    def inverse(self) -> list[list]:
        d = self.inverse_denominator
        if isinstance(self.field, PrimeField):
            return [list(r) for r in self.inverse_numerators]
        return [[Fraction(x, d) for x in row] for row in self.inverse_numerators]

    def power(self, f_index: int, budget: int | None = None) -> SparseTensor3:
        if f_index not in self._powers:
            self._powers[f_index] = kronecker_power(self.points[f_index], self.q, budget=budget)
        return self._powers[f_index]

    def coefficients(self, g: Composition) -> list:
        """``lam[f][g]`` for every ``f`` in composition-rank order."""
        row = self.inverse_numerators[rank_composition(_on(self.support, g))]
        if isinstance(self.field, PrimeField):
            return list(row)
        return [Fraction(x, self.inverse_denominator) for x in row]


def _on(support: Support, g: Composition) -> Composition:
    if g.support == support:
        return g
    return Composition.from_mapping(support, dict(g.mass()))


def lattice_point(support: Support, f: Composition, field: Field) -> SparseTensor3:
    d = support.d
    return SparseTensor3((d, d, d), {t: c for t, c in f.items()}, field)


def build_scheme(support: Support, q: int, field: Field, points: str = "lattice", seed: int | None = None) -> InterpolationScheme:
    """Moment matrix on the chosen points and its exact inverse.

    ``points="random"`` draws seeded random integer points instead, for
    cross-validation; such a draw may be singular with small probability.
    """
    if not field.cardinality_exceeds(q):
        raise FieldTooSmall(f"field {field} must have more than q={q} elements")
    comps = list(enumerate_compositions(support, q))
    d = support.d
    if points == "lattice":
        pts = [lattice_point(support, f, field) for f in comps]
    elif points == "random":
        if seed is None:
            raise ValueError("random points need a seed")
        rng = random.Random(seed)
        bound = field.p if isinstance(field, PrimeField) else 10 * (q + 1) * len(support)
        pts = [SparseTensor3((d, d, d), {t: rng.randrange(1, bound) for t in support}, field) for _ in comps]
    else:
        raise ValueError(f"unknown point set {points!r}")
    moment = [[monomial_eval(s, g) for g in comps] for s in pts]
    try:
        if isinstance(field, PrimeField):
            num, den = linalg.inverse(moment, field), 1
        else:
            num, den = linalg.fraction_free_inverse([[int(x) for x in row] for row in moment])
    except linalg.SingularMatrix as exc:
        raise InterpolationDefect(f"singular moment matrix for {points} points") from exc
    return InterpolationScheme(support, q, field, comps, pts, moment, num, den, points)


def interpolate_t_g(scheme: InterpolationScheme, g: Composition, verify: bool = True, budget: int | None = None):
    """Coefficients ``lam[., g]`` and whether ``sum_f lam[f,g] S_f^{⊠q}`` equals T^(g) exactly."""
    lam = scheme.coefficients(g)
    if not verify:
        return lam, None
    d, q = scheme.support.d, scheme.q
    n = d**q
    limit = resolve_budget(budget)
    if scheme.size * min(n**3, len(scheme.support) ** q) > limit:
        raise BudgetExceeded("reconstruction exceeds the nnz budget; verify compressed blocks instead")
    f = scheme.field
    g_idx = rank_composition(_on(scheme.support, g))
    nums = scheme.inverse_numerators[g_idx]
    acc: dict = {}
    for fi, x in enumerate(nums):
        if not x:
            continue
        for coord, v in scheme.power(fi, budget).entries.items():
            acc[coord] = acc.get(coord, 0) + x * v
    if isinstance(f, PrimeField):
        acc = {c: v % f.p for c, v in acc.items()}
    target = build_t_g(_on(scheme.support, g), field=f)
    den = scheme.inverse_denominator
    expected = {c: den for c in target.entries}
    got = {c: v for c, v in acc.items() if v}
    if isinstance(f, PrimeField):
        expected = {c: 1 for c in target.entries}
    return lam, got == expected


def verify_scheme(scheme: InterpolationScheme) -> bool:
    """All reconstructions at once: ``X @ P == D * [T^(g) indicators]`` as one exact product."""
    coords: dict = {}
    cols = []
    for fi in range(scheme.size):
        ent = scheme.power(fi).entries
        cols.append(ent)
        for c in ent:
            coords.setdefault(c, len(coords))
    # any coordinate hit by a T^(g) is hit by the lattice point concentrated on g
    powers = np.zeros((scheme.size, len(coords)), dtype=object)
    for fi, ent in enumerate(cols):
        for c, v in ent.items():
            powers[fi, coords[c]] = int(v) if isinstance(scheme.field, PrimeField) else v
    x = np.array(scheme.inverse_numerators, dtype=object)
    recon = x.dot(powers)
    expected = np.zeros_like(recon)
    for gi, g in enumerate(scheme.compositions):
        for c in build_t_g(g, field=scheme.field).entries:
            if c not in coords:
                return False
            expected[gi, coords[c]] = scheme.inverse_denominator
    if isinstance(scheme.field, PrimeField):
        p = scheme.field.p
        recon = np.vectorize(lambda v: v % p, otypes=[object])(recon)
    return bool((recon == expected).all())


def moment_times_inverse_is_identity(scheme: InterpolationScheme) -> bool:
    prod = linalg.matmul(scheme.moment_matrix, scheme.inverse(), scheme.field)
    one, zero = scheme.field.one, scheme.field.zero
    return all(prod[i][j] == (one if i == j else zero) for i in range(scheme.size) for j in range(scheme.size))


def span_dimension(support: Support, q: int, samples: list[SparseTensor3]) -> int:
    """Rank of the vectors ``(S^g)_{g in C_q^Δ}`` over the samples' field."""
    if not samples:
        return 0
    field = samples[0].field
    for s in samples:
        if not set(s.entries) <= set(support.triples):
            raise ValueError("sample support is not contained in the given support")
    comps = list(enumerate_compositions(support, q))
    rows = [[monomial_eval(s, g) for g in comps] for s in samples]
    return linalg.rank(rows, field)


def dimension_of_span(support: Support, q: int) -> int:
    return count_compositions(len(support), q)


__all__ = [
    "FieldTooSmall",
    "InterpolationDefect",
    "InterpolationScheme",
    "build_scheme",
    "dimension_of_span",
    "interpolate_t_g",
    "moment_times_inverse_is_identity",
    "span_dimension",
    "verify_scheme",
]
