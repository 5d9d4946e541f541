"""Polynomials vanishing on bounded-rank tensors, and the bounds their absence gives.

The generic rank-r tensor has entries ``T[a,b,c] = sum_j x1[j,a] x2[j,b] x3[j,c]``.
For a composition g of p, ``g(T) = prod T[δ]^g(δ)`` expands into monomials of
degree (p, p, p) in the three variable groups. ``N_{d,r,p}`` stores those
coefficients with one column per g; its kernel is the space of degree-p forms
vanishing on every tensor of rank at most r.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import product
from math import comb, log10
from pathlib import Path
from typing import Iterator, Sequence

from kronspan import linalg
from kronspan.basis import monomial_eval
from kronspan.bounds import BoundReport, power_roundtrip, root_report
from kronspan.compositions import Support, count_compositions, enumerate_compositions, enumerate_count_vectors
from kronspan.config import BudgetExceeded, resolve_budget
from kronspan.fields import DEFAULT_PRIME, SECOND_PRIME, Field, PrimeField
from kronspan.tensor import SparseTensor3

EXACT_RANK_DIGITS = 1000


class KernelNotTrivial(ValueError):
    pass


@dataclass
class NMatrix:
    d: int
    r: int
    p: int
    rows: list[tuple[int, ...]]  # monomials as sorted variable-index tuples
    columns: list[dict[int, int]]  # per composition rank: row -> integer coefficient

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    @property
    def nominal_rows(self) -> int:
        return comb(self.p + self.d * self.r - 1, self.p) ** 3

    def column_vectors(self) -> list[list[int]]:
        n = len(self.rows)
        out = []
        for col in self.columns:
            v = [0] * n
            for row, c in col.items():
                v[row] = c
            out.append(v)
        return out

    def to_matrix_market(self) -> str:
        lines = ["%%MatrixMarket matrix coordinate integer general", f"{len(self.rows)} {len(self.columns)} {self.nnz}"]
        for c, col in enumerate(self.columns, 1):
            for row, v in sorted(col.items()):
                lines.append(f"{row + 1} {c} {v}")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_matrix_market())


def variable_index(group: int, j: int, k: int, d: int, r: int) -> int:
    """0-based index of the variable for coordinate k of factor j in mode ``group``."""
    return (group - 1) * d * r + (j - 1) * d + (k - 1)


def expand_composition(g_triples: Sequence[tuple[int, int, int]], d: int, r: int) -> Counter:
    """Monomial expansion of ``prod_l T[δ_l]`` for the listed triples (with repetition)."""
    out: Counter = Counter()
    for js in product(range(1, r + 1), repeat=len(g_triples)):
        mono = []
        for (a, b, c), j in zip(g_triples, js):
            mono += [variable_index(1, j, a, d, r), variable_index(2, j, b, d, r), variable_index(3, j, c, d, r)]
        out[tuple(sorted(mono))] += 1
    return out


def build_n_matrix(d: int, r: int, p: int, budget: int | None = None) -> NMatrix:
    if min(d, r, p) < 1:
        raise ValueError("d, r, p must be positive")
    limit = resolve_budget(budget)
    cols = count_compositions(d**3, p)
    if cols * r**p > limit:
        raise BudgetExceeded(f"N matrix expansion needs about {cols * r**p} terms, budget {limit}")
    row_of: dict[tuple[int, ...], int] = {}
    columns = []
    for g in enumerate_compositions(Support.full(d), p):
        triples = [t for t, c in g.mass() for _ in range(c)]
        col = {}
        for mono, coef in expand_composition(triples, d, r).items():
            row = row_of.setdefault(mono, len(row_of))
            col[row] = coef
        columns.append(col)
    return NMatrix(d, r, p, list(row_of), columns)


@dataclass
class RankComputation:
    rank: int
    method: str  # two-primes | rational
    moduli: tuple[int, ...]
    modular_ranks: tuple[int, ...]


def exact_rank(vectors: list[list[int]], primes: tuple[int, int] = (DEFAULT_PRIME, SECOND_PRIME), force_rational: bool = False) -> RankComputation:
    if force_rational:
        return RankComputation(linalg.bareiss_rank([list(v) for v in vectors]), "rational", (), ())
    r1, r2, exact = linalg.rank_two_primes(vectors, primes)
    if r1 == r2:
        return RankComputation(r1, "two-primes", primes, (r1, r2))
    return RankComputation(exact, "rational", primes, (r1, r2))


def kernel_dimension(n: NMatrix, force_rational: bool = False) -> int:
    return kernel_computation(n, force_rational)[0]


def kernel_computation(n: NMatrix, force_rational: bool = False) -> tuple[int, RankComputation]:
    # rank(N) = rank(N^T); the columns are the shorter side to eliminate
    rc = exact_rank(n.column_vectors(), force_rational=force_rational)
    return len(n.columns) - rc.rank, rc


@dataclass
class EquationVerdict:
    d: int
    r: int
    p: int
    kernel_dimension: int
    rank: RankComputation
    shape: tuple[int, int]
    bound: BoundReport | None = None

    def to_json(self) -> dict:
        out = {
            "d": self.d,
            "r": self.r,
            "p": self.p,
            "kernel_dimension": self.kernel_dimension,
            "columns": self.shape[1],
            "occupied_rows": self.shape[0],
            "rank": self.rank.rank,
            "method": self.rank.method,
            "moduli": [str(m) for m in self.rank.moduli],
            "modular_ranks": list(self.rank.modular_ranks),
        }
        if self.bound is not None:
            out["bound"] = self.bound.to_json()
        return out


def decide_equations(d: int, r: int, p: int, budget: int | None = None, digits: int = 30) -> EquationVerdict:
    n = build_n_matrix(d, r, p, budget)
    kdim, rc = kernel_computation(n)
    bound = absence_bound(d, r, p, kdim, digits=digits) if kdim == 0 else None
    return EquationVerdict(d, r, p, kdim, rc, n.shape, bound)


def absence_bound(d: int, n: int, p: int, kernel_dim: int = 0, assumed: bool = False, digits: int = 30) -> BoundReport:
    """``n * binom(d^3-1+p, d^3-1)^(1/p)`` once no degree-p form vanishes on rank-n tensors."""
    if kernel_dim != 0:
        raise KernelNotTrivial(f"kernel dimension {kernel_dim} is not zero; equations of degree {p} exist")
    if min(d, n, p) < 1:
        raise ValueError("d, n, p must be positive")
    dim = comb(d**3 - 1 + p, d**3 - 1)
    return _bound_from_span(dim, n, p, digits, formula="equation-absence", assumed=assumed,
                            inputs={"d": d, "n": n, "p": p, "dim_L": dim})


def _bound_from_span(dim: int, n: int, p: int, digits: int, formula: str, assumed: bool, inputs: dict) -> BoundReport:
    value, enclosure, lo, hi = root_report(dim, p, digits, scale=n)
    rank_log10 = log10(dim) + p * log10(n)
    cert = {
        "hypothesis": "assumed" if assumed else "verified",
        "power_roundtrip": power_roundtrip(lo, hi, p, dim * n**p, digits) if p * log10(max(n, 2)) < 10**6 else None,
        "rank_statement": {
            "space": "L_{d,p}",
            "rank_bound_log10": f"{rank_log10:.6f}",
        },
    }
    if rank_log10 < EXACT_RANK_DIGITS:
        cert["rank_statement"]["rank_bound"] = str(dim * n**p)
    return BoundReport(target=dict(inputs), bound_kind="asymptotic_rank", value=value, formula=formula,
                       inputs=inputs, certificate=cert, enclosure=enclosure)


# -- sampling and greedy spanning ---------------------------------------------------


@dataclass(frozen=True)
class RankSample:
    rank: int
    factors: tuple[tuple[tuple, tuple, tuple], ...]
    tensor: SparseTensor3

    def to_json(self) -> dict:
        f = self.tensor.field
        return {"rank": self.rank, "factors": [[[f.format(x) for x in v] for v in fac] for fac in self.factors]}


class RankSampler:
    """Deterministic random tensors of a given rank, with their decompositions."""

    def __init__(self, d: int, field: Field, seed: int):
        if seed is None:
            raise ValueError("a seed is required")
        self.d, self.field, self.seed = d, field, seed
        self.rng = random.Random(seed)

    def _vector(self):
        f = self.field
        if isinstance(f, PrimeField):
            return tuple(self.rng.randrange(f.p) for _ in range(self.d))
        return tuple(f(self.rng.randint(-9, 9)) for _ in range(self.d))

    def draw(self, rank: int) -> RankSample:
        f, d = self.field, self.d
        factors = tuple((self._vector(), self._vector(), self._vector()) for _ in range(rank))
        entries: dict = {}
        for u, v, w in factors:
            for i in range(d):
                if not u[i]:
                    continue
                for j in range(d):
                    uv = f.mul(u[i], v[j])
                    if not uv:
                        continue
                    for k in range(d):
                        x = f.mul(uv, w[k])
                        if x:
                            key = (i + 1, j + 1, k + 1)
                            entries[key] = f.add(entries.get(key, f.zero), x)
        return RankSample(rank, factors, SparseTensor3((d, d, d), entries, f))

    def stream(self, rank: int) -> Iterator[RankSample]:
        while True:
            yield self.draw(rank)


def evaluation_vector(t: SparseTensor3, p: int) -> list:
    return [monomial_eval(t, g) for g in enumerate_compositions(Support.full(t.dims[0]), p)]


@dataclass
class GreedyResult:
    d: int
    p: int
    target: int
    dimension: int
    witnesses: list[RankSample]
    drawn: list[RankSample] = dc_field(repr=False)
    seed: int | None = None

    @property
    def s(self) -> int:
        return len(self.witnesses)

    @property
    def full(self) -> bool:
        return self.dimension == self.target

    def rank_bound(self) -> int | None:
        """Rank bound for every tensor of L_{d,p}: sum over the basis of R(T_i)^p."""
        return sum(w.rank**self.p for w in self.witnesses) if self.full else None

    def to_json(self, digits: int = 30) -> dict:
        out = {
            "d": self.d,
            "p": self.p,
            "target_dimension": self.target,
            "dimension": self.dimension,
            "full_span": self.full,
            "spanning_count": self.s,
            "samples_drawn": len(self.drawn),
            "seed": self.seed,
            "accepted_ranks": [w.rank for w in self.witnesses],
            "witnesses": [w.to_json() for w in self.witnesses],
        }
        if self.full:
            rb = self.rank_bound()
            n = max(w.rank for w in self.witnesses)
            value, enclosure, _, _ = root_report(rb, self.p, digits)
            out["rank_bound"] = str(rb)
            out["uniform_rank_bound"] = str(self.s * n**self.p)
            out["asymptotic_bound"] = {"value": value, "enclosure": list(enclosure)}
        return out


def greedy_span(d: int, p: int, sampler: RankSampler, max_rank: int, patience: int = 8,
                max_samples: int = 100_000, target: int | None = None) -> GreedyResult:
    """Grow an exact basis of evaluation vectors, escalating the sample rank from 1.

    The rank moves up after ``patience`` consecutive rejections; the run stops
    at full span, after rejections at ``max_rank``, or after ``max_samples``.
    """
    total = count_compositions(d**3, p)
    target = total if target is None else target
    basis = linalg.IncrementalBasis(total, sampler.field)
    witnesses, drawn = [], []
    rank, misses = 1, 0
    while basis.dimension < target and len(drawn) < max_samples:
        sample = sampler.draw(rank)
        drawn.append(sample)
        if basis.insert(evaluation_vector(sample.tensor, p)):
            witnesses.append(sample)
            misses = 0
            continue
        misses += 1
        if misses >= patience:
            if rank >= max_rank:
                break
            rank, misses = rank + 1, 0
    return GreedyResult(d, p, target, basis.dimension, witnesses, drawn, sampler.seed)


# -- duality check ---------------------------------------------------------------------


def sampled_span_dimension(d: int, r: int, p: int, samples: int, seed: int, field: Field | None = None) -> int:
    field = field or PrimeField(DEFAULT_PRIME)
    sampler = RankSampler(d, field, seed)
    rows = [evaluation_vector(sampler.draw(r).tensor, p) for _ in range(samples)]
    return linalg.rank(rows, field)


def duality_check(d: int, r: int, p: int, samples: int = 200, seed: int = 0) -> dict:
    kdim = kernel_dimension(build_n_matrix(d, r, p))
    span = sampled_span_dimension(d, r, p, samples, seed)
    total = count_compositions(d**3, p)
    return {"kernel_dimension": kdim, "span_dimension": span, "total": total, "consistent": kdim + span == total}


# -- subspace variant ------------------------------------------------------------------


@dataclass
class SubspaceResult:
    dim_w: int
    p: int
    target: int
    dimension: int
    accepted: list[int]  # indices into the supplied samples
    ranks: list[int]

    @property
    def full(self) -> bool:
        return self.dimension == self.target

    def bound(self, digits: int = 30) -> BoundReport | None:
        if not self.full:
            return None
        n = max(self.ranks[i] for i in self.accepted)
        return _bound_from_span(self.target, n, self.p, digits, formula="subspace-equation-absence", assumed=False,
                                inputs={"dim_W": self.dim_w, "n": n, "p": self.p, "dim_L": self.target})

    def to_json(self, digits: int = 30) -> dict:
        out = {"dim_W": self.dim_w, "p": self.p, "target_dimension": self.target, "dimension": self.dimension,
               "full_span": self.full, "accepted": self.accepted}
        b = self.bound(digits)
        if b is not None:
            out["bound"] = b.to_json()
        return out


def subspace_coordinates(basis: Sequence[SparseTensor3], t: SparseTensor3) -> list:
    """Coordinates of ``t`` in the given basis of W; raises if ``t`` is outside W."""
    f = t.field
    cells = sorted(set().union(*(b.entries for b in basis)) | set(t.entries))
    m = len(basis)
    rows = [[b[c] for b in basis] + [t[c]] for c in cells]
    red, pivots = linalg.rref(rows, f)
    if m in pivots:
        raise ValueError("tensor does not lie in the subspace")
    if len(pivots) < m:
        raise ValueError("subspace generators are linearly dependent")
    return [red[i][m] for i in range(m)]


def greedy_span_subspace(basis: Sequence[SparseTensor3], samples: Sequence[tuple[SparseTensor3, int]], p: int) -> SubspaceResult:
    if not basis:
        raise ValueError("empty subspace basis")
    f = basis[0].field
    m = len(basis)
    exps = list(enumerate_count_vectors(m, p))
    acc = linalg.IncrementalBasis(len(exps), f)
    accepted, ranks = [], []
    for idx, (t, rank) in enumerate(samples):
        ranks.append(rank)
        y = subspace_coordinates(basis, t)
        vec = []
        for e in exps:
            v = f.one
            for yi, ei in zip(y, e):
                if ei:
                    v = f.mul(v, f.pow(yi, ei))
            vec.append(v)
        if acc.insert(vec):
            accepted.append(idx)
        if acc.dimension == len(exps):
            break
    return SubspaceResult(m, p, len(exps), acc.dimension, accepted, ranks)
