"""Bloch-Floquet functions ``cse_m(x; q) = sum_j A_j^(m) e^{ijx}`` and their ce/se form.

For even modes ``cse_m(x; q) = sqrt2 ce_{2r}(x/2, 4q)``; for odd modes
``cse_m(x; q) = i sqrt2 se_{2r+2}(x/2, 4q)``, up to the sign convention of the
stored coefficients (see :func:`classical_form`).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContaminatedModeError, DomainError, LabelingError
from .spectrum import SQRT2, SpectralBasis


@dataclass(frozen=True)
class MathieuFunction:
    m: int
    q: float
    coefficients: np.ndarray
    eigenvalue: float
    parity: Optional[str]
    kind: Optional[str]
    order: Optional[int]
    contaminated: bool
    kinetic: bool = True

    @property
    def J(self):
        return (self.coefficients.size - 1) // 2

    @classmethod
    def from_basis(cls, basis: SpectralBasis, m):
        if not 0 <= m < len(basis):
            raise DomainError(f"mode index {m} outside [0, {len(basis) - 1}]")
        label = basis.mathieu_index[m]
        return cls(
            m=m,
            q=basis.q,
            coefficients=basis.coefficients[m],
            eigenvalue=float(basis.eigenvalues[m]),
            parity=basis.parity[m],
            kind=label[0] if label else None,
            order=label[1] if label else None,
            contaminated=bool(basis.contaminated[m]),
            kinetic=basis.kinetic,
        )


def _require_clean(fn):
    if fn.contaminated:
        raise ContaminatedModeError(
            f"mode {fn.m} is truncation-contaminated (edge coefficient above tolerance); increase J"
        )


def eval_cse(fn: MathieuFunction, x):
    """Evaluate ``cse_m`` at angles ``x`` (scalar or array); returns complex values.

    Definite-parity modes use the cosine/sine form, so even modes are exactly
    real and odd modes exactly imaginary.
    """
    _require_clean(fn)
    x = np.asarray(x, dtype=float)
    A = fn.coefficients
    J = fn.J
    if fn.parity == "even":
        k = np.arange(1, J + 1)
        re = A[J] + 2.0 * (np.cos(np.multiply.outer(x, k)) @ A[J + 1:])
        return re.astype(np.complex128)
    if fn.parity == "odd":
        k = np.arange(1, J + 1)
        return 1j * (2.0 * (np.sin(np.multiply.outer(x, k)) @ A[J + 1:]))
    j = np.arange(-J, J + 1)
    return np.exp(1j * np.multiply.outer(x, j)) @ A.astype(np.complex128)


@dataclass(frozen=True)
class ClassicalForm:
    """Standard Mathieu coefficients recovered from the lattice coefficients.

    ``coefficients[k]`` is ``A_{2k}`` (``kind == "ce"``, ``k >= 0``) or
    ``B_{2k+2}`` (``kind == "se"``), with the coefficient of index ``order``
    positive. ``sign`` is the factor applied to the lattice vector to reach that
    convention, so ``cse_m(x) = sign * sqrt2 * ce(x/2)`` (or ``i sqrt2 se``).
    """

    kind: str
    order: int
    q_mathieu: float
    coefficients: np.ndarray
    sign: float

    def evaluate(self, v):
        v = np.asarray(v, dtype=float)
        k = np.arange(self.coefficients.size)
        if self.kind == "ce":
            return np.cos(2.0 * np.multiply.outer(v, k)) @ self.coefficients
        return np.sin(2.0 * np.multiply.outer(v, k + 1)) @ self.coefficients


def classical_form(fn: MathieuFunction) -> ClassicalForm:
    if fn.parity is None:
        raise LabelingError(f"mode {fn.m} has no definite parity")
    if fn.kind is None:
        raise LabelingError(f"mode {fn.m} has no Mathieu label (needs q > 0 and a clean mode)")
    J = fn.J
    A = fn.coefficients
    if fn.kind == "ce":
        c = np.concatenate([[A[J] / SQRT2], SQRT2 * A[J + 1:]])
        lead = fn.order // 2
    else:
        c = SQRT2 * A[J + 1:]
        lead = fn.order // 2 - 1
    sign = -1.0 if c[lead] < 0 else 1.0
    return ClassicalForm(kind=fn.kind, order=fn.order, q_mathieu=4.0 * fn.q, coefficients=sign * c, sign=sign)


def ode_residual(fn: MathieuFunction, E, x_grid):
    """Max over ``x_grid`` of ``|[-d^2/dx^2 + q(e^{ix} + e^{-ix}) - E] cse_m(x)|``.

    Applied term by term on the Fourier sum: the second derivative becomes
    ``j^2`` and each exponential shifts the index, so the residual's Fourier
    coefficients are the recurrence residuals (including the two sites just
    outside the truncation window).
    """
    _require_clean(fn)
    A = fn.coefficients
    J = fn.J
    pad = np.concatenate([[0.0, 0.0], A, [0.0, 0.0]])  # sites -J-2 .. J+2
    j = np.arange(-J - 1, J + 2).astype(float)
    kin = j * j if fn.kinetic else np.zeros_like(j)
    r = (kin - E) * pad[1:-1] + fn.q * (pad[:-2] + pad[2:])
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    vals = np.exp(1j * np.multiply.outer(x, j)) @ r.astype(np.complex128)
    return float(np.max(np.abs(vals)))


def overlap(fm: MathieuFunction, fn: MathieuFunction):
    """``(1/2pi) int cse_m^* cse_n dx``, evaluated exactly via Parseval."""
    return float(np.dot(fm.coefficients, fn.coefficients))


def overlap_quadrature(fm: MathieuFunction, fn: MathieuFunction, points=None):
    """Same integral by the trapezoid rule on a uniform grid (exact above the Nyquist index)."""
    n = points or 4 * max(fm.J, fn.J) + 4
    x = 2.0 * math.pi * np.arange(n) / n
    return complex(np.mean(np.conj(eval_cse(fm, x)) * eval_cse(fn, x)))


def uniform_grid(points):
    """``points`` angles evenly spaced on ``[0, 2 pi)``."""
    if points < 1:
        raise DomainError("points must be positive")
    return 2.0 * math.pi * np.arange(points) / points
