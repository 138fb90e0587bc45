"""Independent reference routes used to cross-check the lattice solver.

* Mathieu characteristic values ``a_{2r}(Q)``, ``b_{2r+2}(Q)`` by bisection on
  the sign count of the continued-fraction partial denominators, and Fourier
  coefficients by forward/backward recurrence (no matrices involved).
* Dense symmetric eigensolves of the full truncated matrix (LAPACK via numpy).
* Bessel-function site populations for the hopping-only lattice.
"""

import math

import numpy as np
from scipy import special

CF_DEPTH = 80


def _count_below(a, Q, odd, depth):
    # number of characteristic values below ``a``: negative partial denominators
    # of the continued fraction (the LDL^T pivots of the recurrence)
    k0 = 1 if odd else 0
    p = 4.0 * k0 * k0 - a
    if p == 0.0:
        p = -1e-300
    count = int(p < 0)
    for k in range(k0 + 1, k0 + depth):
        coupling = 2.0 * Q * Q if (k == 1 and not odd) else Q * Q
        p = 4.0 * k * k - a - coupling / p
        if p == 0.0:
            p = -1e-300
        count += p < 0
    return count


def _characteristic(r, Q, odd, depth=CF_DEPTH):
    Q = abs(float(Q))
    depth = max(depth, r + 40)
    lo = -2.0 * Q - 1.0
    hi = (2 * r + (2 if odd else 0)) ** 2 + 2.0 * Q + 1.0
    while _count_below(hi, Q, odd, depth) < r + 1:
        hi = 2.0 * hi + 1.0
    eps = np.finfo(float).eps
    while hi - lo > 2.0 * eps * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _count_below(mid, Q, odd, depth) >= r + 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def mathieu_a_even(r, Q):
    """``a_{2r}(Q)`` for ``r = 0, 1, ...``."""
    if Q == 0:
        return 4.0 * r * r
    return _characteristic(r, Q, odd=False)


def mathieu_b_even(r, Q):
    """``b_{2r+2}(Q)`` for ``r = 0, 1, ...``."""
    if Q == 0:
        return 4.0 * (r + 1) ** 2
    return _characteristic(r, Q, odd=True)


def characteristic_values(Q, count):
    """Lowest ``count`` of ``a_0, b_2, a_2, b_4, ...`` in ascending (interlaced) order.

    Returns a list of ``(kind, order, value)``.
    """
    out = [("ce", 2 * r, mathieu_a_even(r, Q)) for r in range((count + 1) // 2)]
    out += [("se", 2 * r + 2, mathieu_b_even(r, Q)) for r in range(count // 2)]
    out.sort(key=lambda t: t[2])
    return out


def mathieu_coefficients(kind, order, Q, nterms=60):
    """Fourier coefficients of ``ce_{2r}`` (``A_0, A_2, ...``) or ``se_{2r+2}`` (``B_2, B_4, ...``).

    Normalisation ``2 A_0^2 + sum A_{2k}^2 = 1`` resp. ``sum B_{2k}^2 = 1``;
    the coefficient of index ``order`` is positive. Returns ``(value, coeffs)``
    where ``coeffs[k]`` multiplies ``cos(2k v)`` (ce) or ``sin(2(k+1) v)`` (se).
    """
    if Q <= 0:
        raise ValueError("Q must be positive")
    if kind == "ce":
        r = order // 2
        a = mathieu_a_even(r, Q)
        c = np.zeros(nterms)
        # forward from the bottom up to index r
        c[0] = 1.0
        if r >= 1:
            c[1] = a / Q
        for k in range(1, r):
            prev = 2.0 * c[0] if k == 1 else c[k - 1]
            c[k + 1] = ((a - 4.0 * k * k) * c[k] - Q * prev) / Q
        # ratios c[k]/c[k-1] for k > r from the top (minimal solution)
        ratio = 0.0
        ratios = np.zeros(nterms + 1)
        for k in range(nterms - 1, r, -1):
            ratio = Q / (a - 4.0 * k * k - Q * ratio)
            ratios[k] = ratio
        if r == 0:
            # row 0: a A0 = Q A2 is implied; use the row-1 ratio with the factor 2
            c[1] = 2.0 * Q / (a - 4.0 - Q * ratios[2]) * c[0] if nterms > 1 else 0.0
            start = 2
        else:
            start = r + 1
        for k in range(start, nterms):
            c[k] = ratios[k] * c[k - 1]
        norm = math.sqrt(2.0 * c[0] ** 2 + np.sum(c[1:] ** 2))
        c /= norm
        if c[r] < 0:
            c = -c
        return a, c
    if kind == "se":
        r = order // 2 - 1
        b = mathieu_b_even(r, Q)
        c = np.zeros(nterms)  # c[k] = B_{2k+2}
        c[0] = 1.0
        if r >= 1:
            c[1] = (b - 4.0) / Q
        for k in range(1, r):
            kk = k + 1
            c[k + 1] = ((b - 4.0 * kk * kk) * c[k] - Q * c[k - 1]) / Q
        ratio = 0.0
        ratios = np.zeros(nterms + 1)
        for k in range(nterms - 1, r, -1):
            kk = k + 1
            ratio = Q / (b - 4.0 * kk * kk - Q * ratio)
            ratios[k] = ratio
        for k in range(r + 1, nterms):
            c[k] = ratios[k] * c[k - 1]
        c /= math.sqrt(np.sum(c ** 2))
        if c[r] < 0:
            c = -c
        return b, c
    raise ValueError(f"kind must be 'ce' or 'se', got {kind!r}")


def ce_even(order, v, Q, nterms=60):
    """``ce_{order}(v, Q)`` for even ``order`` from the continued-fraction coefficients."""
    _, c = mathieu_coefficients("ce", order, Q, nterms)
    v = np.asarray(v, dtype=float)
    return np.cos(2.0 * np.multiply.outer(v, np.arange(nterms))) @ c


def se_even(order, v, Q, nterms=60):
    """``se_{order}(v, Q)`` for even ``order >= 2``."""
    _, c = mathieu_coefficients("se", order, Q, nterms)
    v = np.asarray(v, dtype=float)
    return np.sin(2.0 * np.multiply.outer(v, np.arange(1, nterms + 1))) @ c


def dense_spectrum(q, J, kinetic=True):
    """Eigenvalues of the dense ``(2J+1)``-square lattice matrix via LAPACK."""
    j = np.arange(-J, J + 1, dtype=float)
    h = np.diag(j * j if kinetic else np.zeros_like(j))
    idx = np.arange(2 * J)
    h[idx, idx + 1] = q
    h[idx + 1, idx] = q
    return np.linalg.eigvalsh(h)


def bessel_populations(n, x):
    """``|J_n(x)|^2`` broadcast over site indices ``n`` and arguments ``x``."""
    return special.jv(np.asarray(n), np.asarray(x)) ** 2


J0_FIRST_ZERO = float(special.jn_zeros(0, 1)[0])
