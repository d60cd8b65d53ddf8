"""Exact moments of centered Gaussian vectors.

isserlis_moment sums over perfect matchings; the optional source variant
handles a polynomial times exp(i*Y) for Y in the Gaussian span, via the
complex shift E[F(X) e^{iY}] = E[e^{iY}] E[F(X + i Cov(X,Y))].
"""
from __future__ import annotations

from itertools import combinations

import numpy as np


def isserlis_moment(cov: np.ndarray, indices) -> float:
    """E[x_{i1} x_{i2} ... x_{ik}] for a centered Gaussian with covariance cov.

    indices may repeat; odd k gives 0.  Memoized over sub-multisets, which
    keeps repeated-site products (the common case) cheap.
    """
    idx = tuple(sorted(int(i) for i in indices))
    if len(idx) % 2 == 1:
        return 0.0
    memo: dict[tuple, float] = {}

    def rec(t: tuple) -> float:
        if not t:
            return 1.0
        got = memo.get(t)
        if got is not None:
            return got
        first, rest = t[0], t[1:]
        total = 0.0
        for pos in range(len(rest)):
            # pairing duplicates collapse via the memo, not by counting
            total += cov[first, rest[pos]] * rec(rest[:pos] + rest[pos + 1 :])
        memo[t] = total
        return total

    return rec(idx)


def gaussian_monomial_with_source(
    cov: np.ndarray, indices, source: np.ndarray | None = None
) -> complex:
    """E[x_{i1}...x_{ik} * exp(i sum_j source_j x_j)], exact.

    source is a coefficient vector over the same coordinates as cov (may be
    complex); source=None reduces to the plain Isserlis moment.
    """
    idx = tuple(int(i) for i in indices)
    if source is None:
        return complex(isserlis_moment(cov, idx))
    s = np.asarray(source, dtype=complex)
    var = complex(s @ (cov @ s))
    prefactor = np.exp(-0.5 * var)
    shift = cov @ s  # Cov(x_j, Y) for Y = sum s_j x_j
    memo: dict[tuple, float] = {}

    def even_moment(t: tuple) -> float:
        if not t:
            return 1.0
        if len(t) % 2 == 1:
            return 0.0
        got = memo.get(t)
        if got is not None:
            return got
        first, rest = t[0], t[1:]
        total = 0.0
        for pos in range(len(rest)):
            total += cov[first, rest[pos]] * even_moment(rest[:pos] + rest[pos + 1 :])
        memo[t] = total
        return total

    total = 0.0 + 0.0j
    positions = range(len(idx))
    for r in range(len(idx) + 1):
        for taken in combinations(positions, r):
            taken_set = set(taken)
            mean_part = 1.0 + 0.0j
            for p in taken:
                mean_part *= 1j * shift[idx[p]]
            rest = tuple(sorted(idx[p] for p in positions if p not in taken_set))
            total += mean_part * even_moment(rest)
    return complex(prefactor * total)
