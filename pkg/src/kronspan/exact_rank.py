"""Exact tensor rank of tiny tensors over F_2 or F_3 by exhaustive search.

Tensors of shape ``a x b x c`` (each at most 3) are encoded as integers holding
one bit-plane per nonzero field value. Sums of at most two rank-one tensors are tabulated
once; ranks 3 and 4 are decided by meeting that table from both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from kronspan.fields import PrimeField
from kronspan.tensor import SparseTensor3, flattening_ranks

MAX_DIM = 3
MAX_CAP = 4
CHUNK = 1 << 16


class SearchLimit(ValueError):
    pass


@dataclass(frozen=True)
class RankResult:
    rank: int | None  # None when the rank exceeds ``cap``
    cap: int
    decomposition: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...] | None = None

    def __str__(self) -> str:
        return str(self.rank) if self.rank is not None else f"> {self.cap}"

    def to_json(self) -> dict:
        out = {"rank": self.rank if self.rank is not None else f"> {self.cap}", "cap": self.cap}
        if self.decomposition is not None:
            out["decomposition"] = [[list(u), list(v), list(w)] for u, v, w in self.decomposition]
        return out


class _Codec:
    """Bit-plane codes: bit e set in plane v when flattened entry e equals v.

    Over F_2 only the plane for 1 is kept; over F_3 the code is
    ``ones | twos << n``, at most 54 bits for 3x3x3.
    """

    def __init__(self, dims, p):
        self.dims, self.p = dims, p
        self.n = dims[0] * dims[1] * dims[2]
        self.mask = (1 << self.n) - 1

    def encode_dense(self, flat) -> int:
        code = 0
        for e, v in enumerate(flat):
            if v % self.p:
                code |= 1 << (e + (self.n if v % self.p == 2 else 0))
        return code

    def combine(self, a: np.ndarray, b: np.ndarray, sign: int) -> np.ndarray:
        """Entrywise ``a + sign*b`` on encoded tensors (broadcasting)."""
        if self.p == 2:
            return np.bitwise_xor(a, b)
        n, m = self.n, self.mask
        a1, a2 = a & m, a >> n
        b1, b2 = b & m, b >> n
        if sign < 0:
            b1, b2 = b2, b1
        t = (a1 | b2) ^ (a2 | b1)
        return ((a2 | b2) ^ t) | (((a1 | b1) ^ t) << n)


def _vectors(length: int, p: int):
    return [v for v in product(range(p), repeat=length) if any(v)]


def _normalized(v):
    # first nonzero entry equal to 1
    return next(x for x in v if x) == 1


def rank_one_table(dims, p: int):
    """All distinct nonzero rank-one tensors: codes and their factor triples."""
    a, b, c = dims
    codec = _Codec(dims, p)
    codes, factors = {}, []
    us = [u for u in _vectors(a, p) if _normalized(u)]
    vs = [v for v in _vectors(b, p) if _normalized(v)]
    ws = _vectors(c, p)
    for u in us:
        for v in vs:
            for w in ws:
                flat = [(x * y * z) % p for x in u for y in v for z in w]
                code = codec.encode_dense(flat)
                if code not in codes:
                    codes[code] = len(factors)
                    factors.append((u, v, w))
    arr = np.array(sorted(codes), dtype=np.int64)
    return codec, arr, {code: factors[i] for code, i in codes.items()}


def _encode(t: SparseTensor3, codec: _Codec) -> int:
    a, b, c = t.dims
    flat = [0] * codec.n
    for (i, j, k), v in t.entries.items():
        flat[((i - 1) * b + (j - 1)) * c + (k - 1)] = v % codec.p
    return codec.encode_dense(flat)


def _pair_sums(codec, ones):
    """Sorted unique codes of sums of exactly two rank-one tensors."""
    parts = []
    for start in range(0, len(ones), max(1, CHUNK // len(ones))):
        block = ones[start : start + max(1, CHUNK // len(ones))]
        parts.append(np.unique(codec.combine(block[:, None], ones[None, :], 1)))
    return np.unique(np.concatenate(parts)) if parts else np.array([], dtype=np.int64)


def _member(sorted_codes: np.ndarray, queries: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(sorted_codes, queries)
    idx[idx >= len(sorted_codes)] = 0
    return sorted_codes[idx] == queries if len(sorted_codes) else np.zeros(len(queries), bool)


@lru_cache(maxsize=4)
def _level_tables(dims, p: int):
    """Rank-one table plus sorted codes of rank at most 1 and at most 2; shared across calls."""
    codec, ones, factor_of = rank_one_table(dims, p)
    upto1 = np.union1d(np.array([0], dtype=np.int64), ones)
    upto2 = np.union1d(upto1, _pair_sums(codec, ones))
    return codec, ones, factor_of, upto1, upto2


def exact_rank_small(t: SparseTensor3, cap: int = MAX_CAP, decompose: bool = True) -> RankResult:
    f = t.field
    if not isinstance(f, PrimeField) or f.p not in (2, 3):
        raise SearchLimit("exhaustive rank search runs over F_2 or F_3 only")
    if any(x > MAX_DIM for x in t.dims):
        raise SearchLimit(f"dims {t.dims} exceed {MAX_DIM}x{MAX_DIM}x{MAX_DIM}")
    if not 0 <= cap <= MAX_CAP:
        raise SearchLimit(f"cap must be in [0, {MAX_CAP}]")
    if t.is_zero():
        return RankResult(0, cap, ())
    codec, ones, factor_of, upto1, upto2 = _level_tables(t.dims, f.p)
    target = np.array([_encode(t, codec)], dtype=np.int64)

    def rank_at_most(code: np.ndarray, r: int) -> bool:
        if r <= 0:
            return bool(code[0] == 0)
        if r == 1:
            return bool(_member(upto1, code)[0])
        if r == 2:
            return bool(_member(upto2, code)[0])
        left = upto1 if r == 3 else upto2
        for start in range(0, len(left), CHUNK):
            rest = codec.combine(np.repeat(code, len(left[start : start + CHUNK])), left[start : start + CHUNK], -1)
            if _member(upto2, rest).any():
                return True
        return False

    lower = max(flattening_ranks(t))
    for r in range(max(1, lower), cap + 1):
        if rank_at_most(target, r):
            dec = _decompose(codec, ones, factor_of, int(target[0]), r, rank_at_most) if decompose else None
            return RankResult(r, cap, dec)
    return RankResult(None, cap)


def _decompose(codec, ones, factor_of, code: int, r: int, rank_at_most):
    out = []
    cur = np.array([code], dtype=np.int64)
    for left in range(r, 0, -1):
        if left == 1:
            out.append(factor_of[int(cur[0])])
            break
        for one in ones:
            rest = codec.combine(cur, np.array([one], dtype=np.int64), -1)
            if rank_at_most(rest, left - 1):
                out.append(factor_of[int(one)])
                cur = rest
                break
        else:  # pragma: no cover - the level tables guarantee a split
            raise RuntimeError("decomposition search failed")
    return tuple(out)


def decomposition_tensor(dims, decomposition, field: PrimeField) -> SparseTensor3:
    entries: dict = {}
    for u, v, w in decomposition:
        for i, x in enumerate(u, 1):
            for j, y in enumerate(v, 1):
                for k, z in enumerate(w, 1):
                    val = field.mul(field.mul(x, y), z)
                    if val:
                        entries[(i, j, k)] = field.add(entries.get((i, j, k), 0), val)
    return SparseTensor3(dims, entries, field)
