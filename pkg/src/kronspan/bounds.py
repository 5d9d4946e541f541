"""Rank and asymptotic-rank upper bounds.

Matrix multiplication tensors use ``MM_n = sum e_ij (x) e_jk (x) e_ki`` with
``e_ij`` at index ``(i-1)n + j``. For ``n = d^2`` the row index ``i`` is the
pair ``(i1, i2)`` at ``(i1-1)d + i2``, which is how the degeneration maps and
the support-localized ``MM_Δ`` address coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb
from typing import Any

import mpmath
from mpmath.libmp import to_rational

from kronspan.compositions import Composition, Support
from kronspan.config import BudgetExceeded, resolve_budget
from kronspan.fields import Field
from kronspan.tensor import LinearMap, SparseTensor3, apply_restriction, flat_index, kronecker_power

DEFAULT_OMEGA = Fraction("2.371866")


class NotApplicable(ValueError):
    pass


@dataclass
class BoundReport:
    target: dict
    bound_kind: str  # rank | asymptotic_rank | exponent
    value: Any  # int, Fraction, or decimal string of a certified upper endpoint
    formula: str
    inputs: dict
    certificate: dict | None = None
    enclosure: tuple[str, str] | None = None
    exponent: str | None = None

    def upper_float(self) -> float:
        return float(Fraction(self.value)) if not isinstance(self.value, str) else float(self.value)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else str(v.numerator)
            if isinstance(v, int):
                return str(v)
            return v

        out = {
            "target": self.target,
            "bound_kind": self.bound_kind,
            "value": enc(self.value),
            "formula": self.formula,
            "inputs": {k: enc(v) for k, v in self.inputs.items()},
        }
        if self.enclosure is not None:
            out["enclosure"] = list(self.enclosure)
        if self.exponent is not None:
            out["exponent"] = self.exponent
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


# -- certified real arithmetic -------------------------------------------------------


def _iv(digits: int):
    ctx = mpmath.iv
    ctx.dps = digits + 10
    return ctx


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


def certified_root(n: int, q: int, digits: int = 30, scale: int = 1) -> tuple[Fraction, Fraction]:
    """Exact rational enclosure ``[lo, hi]`` of ``scale * n^(1/q)`` from outward-rounded intervals."""
    if n < 1 or q < 1:
        raise ValueError("need n >= 1 and q >= 1")
    iv = _iv(digits)
    root = iv.exp(iv.log(iv.mpf(n)) / q) if n > 1 else iv.mpf(1)
    return _endpoints(root * scale)


def exact_root(n: int, q: int) -> int | None:
    """Integer ``x`` with ``x^q == n`` if one exists."""
    if n < 1:
        return None
    lo, hi = 1, 1 << (-(-n.bit_length() // q) + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**q < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**q == n else None


def root_report(n: int, q: int, digits: int, scale: int = 1) -> tuple[str, tuple[str, str], Fraction, Fraction]:
    """Certified upper value, printed enclosure, and the exact enclosure of ``scale * n^(1/q)``."""
    x = exact_root(n, q)
    if x is not None:
        v = Fraction(scale * x)
        return str(scale * x), (str(scale * x), str(scale * x)), v, v
    lo, hi = certified_root(n, q, digits, scale)
    return decimal_up(hi, digits), (decimal_down(lo, digits), decimal_up(hi, digits)), lo, hi


def decimal_up(x: Fraction, places: int) -> str:
    scaled = -((-x.numerator * 10**places) // x.denominator)
    return _decimal(scaled, places)


def decimal_down(x: Fraction, places: int) -> str:
    return _decimal((x.numerator * 10**places) // x.denominator, places)


def _decimal(scaled: int, places: int) -> str:
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def power_roundtrip(lo: Fraction, hi: Fraction, q: int, target: int, digits: int = 30) -> bool:
    """Check ``lo^q <= target <= hi^q`` in interval arithmetic."""
    iv = _iv(digits)
    low = iv.mpf(lo.numerator) / lo.denominator
    high = iv.mpf(hi.numerator) / hi.denominator
    t = iv.mpf(target)
    return bool((low**q).a <= t.b and (high**q).b >= t.a)


def log_ratio_up(x: Fraction, base: int, digits: int = 30) -> Fraction:
    """Certified upper bound on ``log_base(x)``."""
    iv = _iv(digits)
    val = iv.log(iv.mpf(x.numerator) / x.denominator) / iv.log(iv.mpf(base))
    return _endpoints(val)[1]


def asymptotic_bound_from_basis(r: int, domain_size: int, q: int, digits: int = 30, d: int | None = None) -> BoundReport:
    """``(r * binom(m-1+q, m-1))^(1/q)`` for composition-basis rank ``r`` on ``m`` support cells."""
    if r < 1 or q < 1 or domain_size < 1:
        raise ValueError("need r, q, domain_size >= 1")
    count = comb(domain_size - 1 + q, domain_size - 1)
    n = r * count
    value, enclosure, lo, hi = root_report(n, q, digits)
    report = BoundReport(
        target={"domain_size": domain_size, "q": q},
        bound_kind="asymptotic_rank",
        value=value,
        formula="basis-rank-root",
        inputs={"r": r, "domain_size": domain_size, "q": q, "compositions": count},
        enclosure=enclosure,
        certificate={"power_roundtrip": power_roundtrip(lo, hi, q, n, digits)},
    )
    if d is not None and d > 1:
        report.exponent = decimal_up(log_ratio_up(hi, d, digits), digits)
    return report


def strassen_sigma_bound(omega_upper: Fraction | str | float = DEFAULT_OMEGA) -> BoundReport:
    omega = Fraction(str(omega_upper)) if not isinstance(omega_upper, Fraction) else omega_upper
    if not 2 <= omega <= 3:
        raise ValueError("omega must lie in [2, 3]")
    value = 2 * omega / 3
    return BoundReport(
        target={"sigma": "all d"},
        bound_kind="exponent",
        value=value,
        formula="two-omega-thirds",
        inputs={"omega_upper": omega},
        exponent=f"{float(value):.6f}",
    )


# -- matrix multiplication tensors ------------------------------------------------


@dataclass(frozen=True)
class MMSpec:
    n: int | None = None
    support: Support | None = None

    def __post_init__(self):
        if (self.n is None) == (self.support is None):
            raise ValueError("give exactly one of n or support")
        if self.n is not None and self.n < 1:
            raise ValueError("n must be positive")


def _pair(x: int, y: int, d: int) -> int:
    return (x - 1) * d + y


def _unit(row: int, col: int, n: int) -> int:
    return (row - 1) * n + col


def mm_delta_terms(support: Support):
    """Index tuples ``(i1, i2, j1, j2, k1, k2)`` of the terms of ``MM_Δ``."""
    p23 = sorted(support.projection(2, 3))
    p13 = sorted(support.projection(1, 3))
    p12 = sorted(support.projection(1, 2))
    for j1, i1 in p23:
        for j2, k1 in p13:
            for i2, k2 in p12:
                yield i1, i2, j1, j2, k1, k2


def build_mm(spec: MMSpec, field: Field, budget: int | None = None) -> SparseTensor3:
    """Zero-one ``MM_n`` or ``MM_Δ``; the latter lives in the ambient ``MM_{d^2}`` coordinates."""
    limit = resolve_budget(budget)
    one = field.one
    if spec.n is not None:
        n = spec.n
        if n**3 > limit:
            raise BudgetExceeded(f"MM_{n} has {n**3} nonzeros")
        entries = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    entries[(_unit(i, j, n), _unit(j, k, n), _unit(k, i, n))] = one
        return SparseTensor3._trusted((n * n,) * 3, entries, field)
    s = spec.support
    d, n = s.d, s.d**2
    size = len(s.projection(1, 2)) * len(s.projection(1, 3)) * len(s.projection(2, 3))
    if size > limit:
        raise BudgetExceeded(f"MM_Δ has {size} nonzeros")
    entries = {}
    for i1, i2, j1, j2, k1, k2 in mm_delta_terms(s):
        i, j, k = _pair(i1, i2, d), _pair(j1, j2, d), _pair(k1, k2, d)
        entries[(_unit(i, j, n), _unit(j, k, n), _unit(k, i, n))] = one
    return SparseTensor3._trusted((n * n,) * 3, entries, field)


def strassen_degeneration_maps(t: SparseTensor3) -> tuple[LinearMap, LinearMap, LinearMap]:
    """The three ``d^3 x d^4`` maps taking ``MM_{d^2}`` to ``t^{⊠3}``."""
    d = t.dims[0]
    if t.dims != (d, d, d):
        raise ValueError("expected a d x d x d tensor")
    n = d * d
    lam = t.entries
    e1, e2, e3 = {}, {}, {}
    rng = range(1, d + 1)
    for x1 in rng:
        for x2 in rng:
            for y1 in rng:
                for y2 in rng:
                    col = _unit(_pair(x1, x2, d), _pair(y1, y2, d), n)
                    for s in rng:
                        # l1(e^{x1,x2}_{y1,y2}) = sum_a lam[a,y1,x1] e_{a,y2,x2}
                        v = lam.get((s, y1, x1))
                        if v:
                            e1[(flat_index((s, y2, x2), d), col)] = v
                        # l2(e^{x1,x2}_{y1,y2}) = sum_b lam[x2,b,y1] e_{x1,b,y2}
                        v = lam.get((x2, s, y1))
                        if v:
                            e2[(flat_index((x1, s, y2), d), col)] = v
                        # l3(e^{x1,x2}_{y1,y2}) = sum_c lam[y2,x2,c] e_{y1,x1,c}
                        v = lam.get((y2, x2, s))
                        if v:
                            e3[(flat_index((y1, x1, s), d), col)] = v
    f = t.field
    return LinearMap(d**3, d**4, e1, f), LinearMap(d**3, d**4, e2, f), LinearMap(d**3, d**4, e3, f)


def _restrict_columns(m: LinearMap, keep: set[int]) -> LinearMap:
    return LinearMap(m.rows, m.cols, {(r, c): v for (r, c), v in m.entries.items() if c in keep}, m.field)


def support_degeneration_maps(support: Support, t: SparseTensor3):
    """The maps restricted to the coordinates used by ``MM_Δ`` in each mode."""
    if not set(t.entries) <= set(support.triples):
        raise ValueError("tensor support is not contained in the given support")
    d, n = support.d, support.d**2
    used = (set(), set(), set())
    for i1, i2, j1, j2, k1, k2 in mm_delta_terms(support):
        i, j, k = _pair(i1, i2, d), _pair(j1, j2, d), _pair(k1, k2, d)
        used[0].add(_unit(i, j, n))
        used[1].add(_unit(j, k, n))
        used[2].add(_unit(k, i, n))
    maps = strassen_degeneration_maps(t)
    return tuple(_restrict_columns(m, u) for m, u in zip(maps, used))


def verify_degeneration(t: SparseTensor3, budget: int | None = None) -> bool:
    d = t.dims[0]
    mm = build_mm(MMSpec(n=d * d), t.field, budget)
    return apply_restriction(*strassen_degeneration_maps(t), mm) == kronecker_power(t, 3, budget=budget)


def verify_support_degeneration(support: Support, t: SparseTensor3, budget: int | None = None) -> bool:
    mm = build_mm(MMSpec(support=support), t.field, budget)
    return apply_restriction(*support_degeneration_maps(support, t), mm) == kronecker_power(t, 3, budget=budget)


# -- rank table and corollary bounds ---------------------------------------------------


@dataclass
class MMRankTable:
    """Known upper bounds on R(MM_n), closed under Kronecker submultiplicativity."""

    known: dict[int, int] = dc_field(default_factory=lambda: {1: 1, 2: 7})
    support_known: dict[tuple, int] = dc_field(default_factory=dict)

    def register(self, n: int, rank: int) -> None:
        if n < 1 or not 1 <= rank <= n**3:
            raise ValueError("need n >= 1 and 1 <= rank <= n^3")
        self.known[n] = min(rank, self.known.get(n, rank))

    def register_support(self, support: Support, rank: int) -> None:
        if rank < 1:
            raise ValueError("rank must be positive")
        self.support_known[(support.d, support.triples)] = rank

    def lookup(self, n: int) -> int:
        best = {1: 1}
        for m in range(2, n + 1):
            if n % m:
                continue
            val = min(m**3, self.known.get(m, m**3))
            for a in range(2, int(m**0.5) + 1):
                if m % a == 0:
                    val = min(val, best[a] * best[m // a])
            best[m] = val
        return best[n] if n > 1 else self.known.get(1, 1)

    def support_rank(self, support: Support) -> int:
        key = (support.d, support.triples)
        nnz = len(support.projection(1, 2)) * len(support.projection(1, 3)) * len(support.projection(2, 3))
        # MM_Δ is a restriction of MM_{d^2}
        val = min(nnz, self.lookup(support.d**2))
        return min(val, self.support_known.get(key, val))

    def to_json(self) -> dict:
        return {"known": {str(k): v for k, v in sorted(self.known.items())}}


def tg_rank_bound(g: Composition, table: MMRankTable | None = None, localized: bool = False) -> BoundReport:
    table = table or MMRankTable()
    q, d = g.q, g.d
    if q % 3:
        raise NotApplicable(f"q = {q} is not divisible by 3")
    k = q // 3
    if localized:
        m = len(g.support)
        mm = table.support_rank(g.support)
        # T^(g) for g in C_{3k} sits in the k-th power of the MM_Δ degeneration
        mm_power = mm**k
        value = mm_power * comb(m - 1 + q, m - 1)
        formula = "support-localized-mm-degeneration"
        inputs = {"q": q, "k": k, "support_size": m, "mm_rank": mm, "mm_rank_power": mm_power}
    else:
        mm_power = table.lookup(d ** (2 * k))
        value = mm_power * comb(d**3 - 1 + q, d**3 - 1)
        formula = "mm-degeneration"
        inputs = {"q": q, "k": k, "d": d, "mm_n": d ** (2 * k), "mm_rank": mm_power}
    inputs["compositions"] = value // mm_power
    return BoundReport(
        target={"composition": g.to_json()},
        bound_kind="rank",
        value=value,
        formula=formula,
        inputs=inputs,
    )

