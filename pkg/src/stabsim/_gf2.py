"""Small dense GF(2) linear algebra on Python-int bit rows."""

from __future__ import annotations


def solve(rows: list[int], rhs: list[int], ncols: int) -> list[int] | None:
    """Solve ``A v = b`` for many right-hand sides at once.

    ``rows[r]`` holds row ``r`` of ``A`` as a bitmask over ``ncols`` columns and
    ``rhs[r]`` packs the right-hand sides (bit ``i`` belongs to system ``i``).
    Returns ``v`` as a list of column bitmasks, ``v[c]`` carrying the value of
    unknown ``c`` for every system, with free unknowns set to zero. Returns
    ``None`` if some system is inconsistent.
    """
    a = list(rows)
    b = list(rhs)
    pivots = []
    top = 0
    for c in range(ncols):
        bit = 1 << c
        sel = next((r for r in range(top, len(a)) if a[r] & bit), None)
        if sel is None:
            continue
        a[top], a[sel] = a[sel], a[top]
        b[top], b[sel] = b[sel], b[top]
        for r in range(len(a)):
            if r != top and a[r] & bit:
                a[r] ^= a[top]
                b[r] ^= b[top]
        pivots.append(c)
        top += 1
    if any(b[r] for r in range(top, len(a))):
        return None
    v = [0] * ncols
    for r, c in enumerate(pivots):
        v[c] = b[r]
    return v


def rank(rows: list[int]) -> int:
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            hi = row.bit_length() - 1
            if hi not in basis:
                basis[hi] = row
                break
            row ^= basis[hi]
    return len(basis)
