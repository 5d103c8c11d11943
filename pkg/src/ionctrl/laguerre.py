"""Associated Laguerre polynomials and their zeros.

The zeros of L_n^alpha fix the squared Lamb-Dicke parameters at which a
sideband or carrier coupling vanishes and the qubit/oscillator ladder
splits into a finite closed piece plus an infinite remainder.  Reference
truncation values (smallest zeros, 1e-10 accurate):

    L_6^1: 0.527668122  (severs the blue edge between phonon 6 and 7)
    L_5^0: 0.263560320  (severs the carrier edge at phonon 5)
    L_4^0: 0.322547690  (severs the carrier edge at phonon 4)
"""

from __future__ import annotations

import numpy as np

__all__ = ["laguerre", "laguerre_zeros", "laguerre_curve"]


def _validate(n: int, alpha: int) -> None:
    if n < 0 or int(n) != n:
        raise ValueError(f"degree n must be a nonnegative integer, got {n}")
    if alpha < 0 or int(alpha) != alpha:
        raise ValueError(f"order alpha must be a nonnegative integer, got {alpha}")


def laguerre(n: int, alpha: int, x):
    """Evaluate L_n^alpha(x) by the upward three-term recurrence.

    The recurrence (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
    is stable in the direction of increasing k for the moderate degrees
    (n <= ~30) used here.  Accepts scalar or array x >= 0.
    """
    _validate(n, alpha)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("argument x must be nonnegative")
    prev = np.ones_like(x_arr)
    if n == 0:
        return prev if x_arr.ndim else float(prev)
    cur = 1.0 + alpha - x_arr
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x_arr) * cur - (k + alpha) * prev) / (k + 1)
    return cur if x_arr.ndim else float(cur)


def _laguerre_deriv(n: int, alpha: int, x: float) -> float:
    # d/dx L_n^a = -L_{n-1}^{a+1}
    if n == 0:
        return 0.0
    return -laguerre(n - 1, alpha + 1, x)


def laguerre_zeros(n: int, alpha: int) -> list[float]:
    """All n zeros of L_n^alpha, increasing, each accurate to ~1e-12.

    The zeros are real, simple and lie in (0, 4n + 2 alpha + 2).  A sign
    change scan over 10 n subdivisions brackets each zero; bisection
    narrows the bracket to 1e-12 and one Newton step polishes it.
    """
    _validate(n, alpha)
    if n < 1:
        raise ValueError("zero finding requires degree n >= 1")
    upper = 4.0 * n + 2.0 * alpha + 2.0
    grid = np.linspace(0.0, upper, 10 * n + 1)
    vals = laguerre(n, alpha, grid)
    roots: list[float] = []
    for i in range(len(grid) - 1):
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo, fhi = float(vals[i]), float(vals[i + 1])
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi >= 0.0:
            continue
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            fmid = laguerre(n, alpha, mid)
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0.0:
                hi = mid
            else:
                lo, flo = mid, fmid
        root = 0.5 * (lo + hi)
        slope = _laguerre_deriv(n, alpha, root)
        if slope != 0.0:
            root -= laguerre(n, alpha, root) / slope
        roots.append(root)
    return roots


def laguerre_curve(n: int, alpha: int, x_grid) -> list[tuple[float, float]]:
    """Tabulate (x, L_n^alpha(x)) over a grid of nonnegative points."""
    xs = np.asarray(x_grid, dtype=float)
    vals = np.atleast_1d(laguerre(n, alpha, xs))
    return [(float(x), float(v)) for x, v in zip(np.atleast_1d(xs), vals)]
