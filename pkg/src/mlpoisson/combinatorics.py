"""Exact Stirling numbers of the second kind and the Bell polynomials.

Entries are arbitrary-precision integers (they outgrow 64 bits near n = 26),
so the closed-form moment expressions have exact coefficients.  The supported
range n <= 64 is far beyond what the moment engine ever requests.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import OutOfRange

__all__ = ["N_MAX", "StirlingTable", "stirling2", "bell_coefficients", "bell_polynomial"]

N_MAX = 64


@dataclass(frozen=True)
class StirlingTable:
    """Triangular table of S(n, k) for 0 <= k <= n <= n_max, built once."""

    n_max: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, n_max: int) -> "StirlingTable":
        if not (0 <= n_max <= N_MAX):
            raise OutOfRange(f"StirlingTable: n_max must be in [0, {N_MAX}], got {n_max}")
        rows = [(1,)]
        for n in range(1, n_max + 1):
            prev = rows[n - 1]
            # S(n, k) = k S(n-1, k) + S(n-1, k-1); boundary columns 0 and n
            row = [0]
            for k in range(1, n):
                row.append(k * prev[k] + prev[k - 1])
            row.append(1)
            rows.append(tuple(row))
        return cls(n_max, tuple(rows))

    def value(self, n: int, k: int) -> int:
        return self.rows[n][k]


_lock = threading.Lock()
_table = StirlingTable.build(20)


def _table_for(n: int) -> StirlingTable:
    global _table
    if n > _table.n_max:
        with _lock:
            if n > _table.n_max:
                _table = StirlingTable.build(min(N_MAX, max(n, 2 * _table.n_max)))
    return _table


def stirling2(n: int, k: int) -> int:
    """S(n, k): partitions of an n-set into k nonempty blocks, exact."""
    if not (isinstance(n, int) and isinstance(k, int)):
        raise OutOfRange(f"stirling2: indices must be integers, got ({n!r}, {k!r})")
    if n < 0 or k < 0 or k > n:
        raise OutOfRange(f"stirling2: need 0 <= k <= n, got (n={n}, k={k})")
    if n > N_MAX:
        raise OutOfRange(f"stirling2: n capped at {N_MAX}, got {n}")
    return _table_for(n).value(n, k)


def bell_coefficients(n: int) -> tuple[int, ...]:
    """Coefficients (S(n,0), ..., S(n,n)) of the n-th Bell polynomial."""
    if not isinstance(n, int) or n < 0:
        raise OutOfRange(f"bell_coefficients: n must be a nonnegative integer, got {n!r}")
    if n > N_MAX:
        raise OutOfRange(f"bell_coefficients: n capped at {N_MAX}, got {n}")
    return _table_for(n).rows[n]


def bell_polynomial(n: int, x):
    """B_n(x) = sum_{k=1..n} S(n,k) x^k, with B_0 = 1.

    Horner evaluation over the exact integer coefficients; accepts any
    numeric x (float, Fraction, ...) and preserves its arithmetic.
    """
    coeffs = bell_coefficients(n)
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        acc = acc * x + coeffs[k]
    return acc
