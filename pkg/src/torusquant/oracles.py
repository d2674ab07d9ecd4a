"""Slow reference computations used to cross-check the fast code paths.

Nothing here is needed at runtime; tests import these to get answers by
independent routes (combinatorial expansions, direct quadrature).
"""

from __future__ import annotations

from math import gcd

__all__ = ["pfaffian_int", "invariant_factors_by_pfaffians"]


def pfaffian_int(rows) -> int:
    """Pfaffian of an even integer skew matrix by cofactor recursion."""
    m = [list(row) for row in rows]
    dim = len(m)
    if dim % 2:
        raise ValueError("Pfaffian needs even dimension")
    if dim == 0:
        return 1
    total = 0
    for j in range(1, dim):
        if m[0][j] == 0:
            continue
        keep = [r for r in range(dim) if r not in (0, j)]
        sub = [[m[r][c] for c in keep] for r in keep]
        sign = -1 if (j - 1) % 2 else 1
        total += sign * m[0][j] * pfaffian_int(sub)
    return total


def invariant_factors_by_pfaffians(rows) -> tuple:
    """Invariant factors of a skew form from gcds of principal sub-Pfaffians.

    g_k = gcd over all 2k x 2k principal submatrices of |Pf|; the k-th
    invariant factor is g_k / g_{k-1}.  Independent of any congruence
    reduction, so it serves as an oracle for the normal-form divisors.
    """
    from itertools import combinations

    dim = len(rows)
    n = dim // 2
    g_prev = 1
    factors = []
    for k in range(1, n + 1):
        g = 0
        for idx in combinations(range(dim), 2 * k):
            sub = [[rows[r][c] for c in idx] for r in idx]
            g = gcd(g, abs(pfaffian_int(sub)))
            if g == 1:
                break
        if g == 0:
            raise ValueError("form is degenerate")
        factors.append(g // g_prev)
        g_prev = g
    return tuple(factors)
