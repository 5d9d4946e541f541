"""Pure-Python modular elimination kernels (fallback for ``_ckernels``).

Both backends expose the same three functions over lists of int rows with
entries in ``[0, p)``; ``p`` must be prime and below ``2**62``.
"""

from __future__ import annotations


def rref_mod_p(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form of ``rows`` over F_p.

    Returns the nonzero rows of the RREF and their pivot columns.
    """
    a = [[x % p for x in row] for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        prow = [x * inv % p for x in a[r]]
        a[r] = prow
        for i in range(m):
            f = a[i][c]
            if i != r and f:
                row = a[i]
                a[i] = [(x - f * y) % p for x, y in zip(row, prow)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in row] for row in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        prow = [x * inv % p for x in a[r]]
        for i in range(r + 1, m):
            f = a[i][c]
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], prow)]
        r += 1
    return r


def reduce_row_mod_p(basis: list[list[int]], pivots: list[int], row: list[int], p: int) -> list[int]:
    """Reduce ``row`` against an echelon basis whose row ``t`` is monic at ``pivots[t]``
    and zero at every earlier pivot."""
    v = [x % p for x in row]
    for b, c in zip(basis, pivots):
        f = v[c]
        if f:
            v = [(x - f * y) % p for x, y in zip(v, b)]
    return v
