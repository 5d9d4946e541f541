"""Exact sparse order-3 tensors and the operations on them.

Coordinates are 1-based throughout. Kronecker products flatten index pairs
mixed-radix with the left factor most significant, so the ``q``-th power is
indexed by q-tuples read with position 1 most significant.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from kronspan import linalg
from kronspan.config import BudgetExceeded, resolve_budget
from kronspan.fields import Field, Scalar, check_same_field

Coord = tuple[int, int, int]


class DimensionMismatch(ValueError):
    pass


# -- multi-indices -----------------------------------------------------------


def flat_index(index: Sequence[int], d: int) -> int:
    """1-based mixed-radix position of a tuple in ``[d]^q``."""
    flat = 0
    for i in index:
        if not 1 <= i <= d:
            raise ValueError(f"component {i} outside [1, {d}]")
        flat = flat * d + (i - 1)
    return flat + 1


def multi_index(flat: int, d: int, q: int) -> tuple[int, ...]:
    if not 1 <= flat <= d**q:
        raise ValueError(f"flat index {flat} outside [1, {d}^{q}]")
    flat -= 1
    out = [0] * q
    for pos in range(q - 1, -1, -1):
        flat, rem = divmod(flat, d)
        out[pos] = rem + 1
    return tuple(out)


# -- tensors -----------------------------------------------------------------


class SparseTensor3:
    """Immutable order-3 tensor in canonical sparse form.

    Entries are coerced into ``field``, zeros are dropped, and coordinates are
    kept in sorted order, so equality is equality of dims, field and entry map.
    """

    __slots__ = ("_dims", "_field", "_entries")

    def __init__(self, dims: Sequence[int], entries: Mapping[Coord, object] | Iterable[tuple[Coord, object]], field: Field):
        dims = tuple(int(x) for x in dims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"dims must be three positive integers, got {dims}")
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict[Coord, Scalar] = {}
        a, b, c = dims
        for (i, j, k), v in items:
            if not (1 <= i <= a and 1 <= j <= b and 1 <= k <= c):
                raise DimensionMismatch(f"coordinate {(i, j, k)} outside dims {dims}")
            v = field(v)
            if v:
                clean[(int(i), int(j), int(k))] = v
        object.__setattr__(self, "_dims", dims)
        object.__setattr__(self, "_field", field)
        object.__setattr__(self, "_entries", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def _trusted(cls, dims: tuple[int, int, int], entries: dict, field: Field) -> "SparseTensor3":
        # entries already in-range, coerced and nonzero
        t = cls.__new__(cls)
        object.__setattr__(t, "_dims", dims)
        object.__setattr__(t, "_field", field)
        object.__setattr__(t, "_entries", MappingProxyType(dict(sorted(entries.items()))))
        return t

    def __setattr__(self, name, value):
        raise AttributeError("SparseTensor3 is immutable")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._dims

    @property
    def field(self) -> Field:
        return self._field

    @property
    def entries(self) -> Mapping[Coord, Scalar]:
        return self._entries

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, coord: Coord) -> Scalar:
        return self._entries.get(tuple(coord), self._field.zero)

    def __iter__(self) -> Iterator[tuple[Coord, Scalar]]:
        return iter(self._entries.items())

    def support(self) -> frozenset[Coord]:
        return frozenset(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor3):
            return NotImplemented
        return self._dims == other._dims and self._field == other._field and self._entries == other._entries

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SparseTensor3(dims={self._dims}, nnz={self.nnz}, field={self._field})"

    def __add__(self, other: "SparseTensor3") -> "SparseTensor3":
        check_same_field(self._field, other._field)
        if self._dims != other._dims:
            raise DimensionMismatch(f"{self._dims} vs {other._dims}")
        f = self._field
        out = dict(self._entries)
        for c, v in other._entries.items():
            s = f.add(out.get(c, f.zero), v)
            if s:
                out[c] = s
            else:
                out.pop(c, None)
        return SparseTensor3._trusted(self._dims, out, f)

    def __neg__(self) -> "SparseTensor3":
        f = self._field
        return SparseTensor3._trusted(self._dims, {c: f.neg(v) for c, v in self._entries.items()}, f)

    def __sub__(self, other: "SparseTensor3") -> "SparseTensor3":
        return self + (-other)

    def scale(self, s) -> "SparseTensor3":
        f = self._field
        s = f(s)
        if not s:
            return SparseTensor3._trusted(self._dims, {}, f)
        return SparseTensor3._trusted(self._dims, {c: f.mul(v, s) for c, v in self._entries.items()}, f)

    def is_zero(self) -> bool:
        return not self._entries

    def to_dense(self) -> list[list[list[Scalar]]]:
        a, b, c = self._dims
        z = self._field.zero
        out = [[[z] * c for _ in range(b)] for _ in range(a)]
        for (i, j, k), v in self._entries.items():
            out[i - 1][j - 1][k - 1] = v
        return out

    @classmethod
    def from_dense(cls, array, field: Field) -> "SparseTensor3":
        dims = (len(array), len(array[0]), len(array[0][0]))
        entries = {
            (i + 1, j + 1, k + 1): v
            for i, plane in enumerate(array)
            for j, row in enumerate(plane)
            for k, v in enumerate(row)
        }
        return cls(dims, entries, field)

    def flattening(self, mode: int) -> list[list[Scalar]]:
        """Dense one-vs-rest matricization; rows indexed by the chosen mode."""
        if mode not in (1, 2, 3):
            raise ValueError("mode must be 1, 2 or 3")
        a, b, c = self._dims
        rest = [d for m, d in enumerate(self._dims, start=1) if m != mode]
        nrows = self._dims[mode - 1]
        z = self._field.zero
        mat = [[z] * (rest[0] * rest[1]) for _ in range(nrows)]
        for (i, j, k), v in self._entries.items():
            coord = (i, j, k)
            r = coord[mode - 1]
            others = [x for m, x in enumerate(coord, start=1) if m != mode]
            mat[r - 1][(others[0] - 1) * rest[1] + others[1] - 1] = v
        return mat

    def permute_modes(self, perm: Sequence[int]) -> "SparseTensor3":
        """Tensor whose mode ``m`` is mode ``perm[m]`` of this one (0-based perm)."""
        dims = tuple(self._dims[p] for p in perm)
        return SparseTensor3._trusted(dims, {tuple(c[p] for p in perm): v for c, v in self._entries.items()}, self._field)


def zero_tensor(dims: Sequence[int], field: Field) -> SparseTensor3:
    return SparseTensor3(dims, {}, field)


def unit_tensor(s: int, field: Field) -> SparseTensor3:
    """The diagonal tensor <s> = sum_i e_i x e_i x e_i."""
    if s < 1:
        raise ValueError("s must be positive")
    return SparseTensor3._trusted((s, s, s), {(i, i, i): field.one for i in range(1, s + 1)}, field)


def rank_one(u: Sequence, v: Sequence, w: Sequence, field: Field) -> SparseTensor3:
    entries = {}
    for i, x in enumerate(u, start=1):
        if not field(x):
            continue
        for j, y in enumerate(v, start=1):
            xy = field.mul(field(x), field(y))
            if not xy:
                continue
            for k, z in enumerate(w, start=1):
                val = field.mul(xy, field(z))
                if val:
                    entries[(i, j, k)] = val
    return SparseTensor3._trusted((len(u), len(v), len(w)), entries, field)


def kronecker_product(s: SparseTensor3, t: SparseTensor3) -> SparseTensor3:
    """Entry at ((i,i'),(j,j'),(k,k')) is ``S[i,j,k] * T[i',j',k']``."""
    f = check_same_field(s.field, t.field)
    a2, b2, c2 = t.dims
    dims = (s.dims[0] * a2, s.dims[1] * b2, s.dims[2] * c2)
    out = {}
    titems = list(t.entries.items())
    for (i, j, k), x in s.entries.items():
        bi, bj, bk = (i - 1) * a2, (j - 1) * b2, (k - 1) * c2
        for (i2, j2, k2), y in titems:
            out[(bi + i2, bj + j2, bk + k2)] = f.mul(x, y)
    return SparseTensor3._trusted(dims, out, f)


def kronecker_power(s: SparseTensor3, q: int, budget: int | None = None) -> SparseTensor3:
    if q < 1:
        raise ValueError("q must be positive")
    limit = resolve_budget(budget)
    if s.nnz ** q > limit:
        raise BudgetExceeded(f"kronecker_power would hold {s.nnz}^{q} entries, budget {limit}")
    out = s
    for _ in range(q - 1):
        out = kronecker_product(out, s)
    return out


def direct_sum(tensors: Sequence[SparseTensor3], budget: int | None = None) -> SparseTensor3:
    """Block-diagonal placement; block offsets are prefix sums of operand dims."""
    if not tensors:
        raise ValueError("direct_sum needs at least one operand")
    f = check_same_field(*(t.field for t in tensors))
    limit = resolve_budget(budget)
    if sum(t.nnz for t in tensors) > limit:
        raise BudgetExceeded(f"direct_sum exceeds nnz budget {limit}")
    out = {}
    oa = ob = oc = 0
    for t in tensors:
        for (i, j, k), v in t.entries.items():
            out[(oa + i, ob + j, oc + k)] = v
        oa, ob, oc = oa + t.dims[0], ob + t.dims[1], oc + t.dims[2]
    return SparseTensor3._trusted((oa, ob, oc), out, f)


# -- linear maps ---------------------------------------------------------------


class LinearMap:
    """Sparse ``rows x cols`` matrix over a field, acting on column vectors."""

    __slots__ = ("rows", "cols", "field", "entries", "_by_col")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object], field: Field):
        if rows < 1 or cols < 1:
            raise ValueError("matrix dimensions must be positive")
        self.rows, self.cols, self.field = rows, cols, field
        clean = {}
        for (r, c), v in entries.items():
            if not (1 <= r <= rows and 1 <= c <= cols):
                raise DimensionMismatch(f"matrix entry {(r, c)} outside {rows}x{cols}")
            v = field(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean
        by_col: dict[int, list[tuple[int, Scalar]]] = {}
        for (r, c), v in sorted(clean.items()):
            by_col.setdefault(c, []).append((r, v))
        self._by_col = by_col

    @classmethod
    def identity(cls, n: int, field: Field) -> "LinearMap":
        return cls(n, n, {(i, i): 1 for i in range(1, n + 1)}, field)

    @classmethod
    def zero(cls, rows: int, cols: int, field: Field) -> "LinearMap":
        return cls(rows, cols, {}, field)

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence], field: Field) -> "LinearMap":
        return cls(
            len(matrix),
            len(matrix[0]),
            {(r + 1, c + 1): v for r, row in enumerate(matrix) for c, v in enumerate(row)},
            field,
        )

    def column(self, c: int) -> list[tuple[int, Scalar]]:
        return self._by_col.get(c, [])

    def to_dense(self) -> list[list[Scalar]]:
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r - 1][c - 1] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        return (self.rows, self.cols, self.field, self.entries) == (other.rows, other.cols, other.field, other.entries)

    def __repr__(self) -> str:
        return f"LinearMap({self.rows}x{self.cols}, nnz={len(self.entries)}, field={self.field})"


def apply_restriction(l1: LinearMap, l2: LinearMap, l3: LinearMap, t: SparseTensor3) -> SparseTensor3:
    """Image of ``t`` under ``l1 x l2 x l3`` acting on the three factors."""
    f = check_same_field(l1.field, l2.field, l3.field, t.field)
    if (l1.cols, l2.cols, l3.cols) != t.dims:
        raise DimensionMismatch(f"map columns {(l1.cols, l2.cols, l3.cols)} do not match tensor dims {t.dims}")
    out: dict[Coord, Scalar] = {}
    for (i, j, k), v in t.entries.items():
        ci, cj, ck = l1.column(i), l2.column(j), l3.column(k)
        if not (ci and cj and ck):
            continue
        for x, a in ci:
            va = f.mul(v, a)
            for y, b in cj:
                vab = f.mul(va, b)
                for z, c in ck:
                    key = (x, y, z)
                    out[key] = f.add(out.get(key, f.zero), f.mul(vab, c))
    out = {k: v for k, v in out.items() if v}
    return SparseTensor3._trusted((l1.rows, l2.rows, l3.rows), out, f)


def flattening_ranks(t: SparseTensor3) -> tuple[int, int, int]:
    """Exact ranks of the three one-vs-rest matricizations (tensor-rank lower bounds)."""
    ranks = []
    for mode in (1, 2, 3):
        if t.is_zero():
            ranks.append(0)
            continue
        mat = t.flattening(mode)
        # drop zero rows and columns before elimination
        rows = [r for r in mat if any(r)]
        keep = [c for c in range(len(rows[0])) if any(r[c] for r in rows)]
        rows = [[r[c] for c in keep] for r in rows]
        if len(keep) < len(rows):
            rows = [list(col) for col in zip(*rows)]
        ranks.append(linalg.rank(rows, t.field))
    return tuple(ranks)  # type: ignore[return-value]
