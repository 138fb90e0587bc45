"""Truncated lattice operator N^2 + q(V + V^dagger) and its eigenbasis.

The operator commutes with the reflection j -> -j, so it is diagonalised in
its even and odd invariant subspaces separately. This keeps every eigenvector
exactly symmetric or antisymmetric even where the (j, -j) doublets are
degenerate to machine precision.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._accel import thread_cap
from .errors import ConfigurationError, LabelingError
from .kernels import tridiagonal_eigh

SQRT2 = math.sqrt(2.0)


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LatticeConfig:
    """One simulation instance: coupling ``q`` on sites ``-J..J``."""

    q: float
    J: int
    eig_tol: float = 1e-12
    tail_tol: float = 1e-10

    def __post_init__(self):
        if isinstance(self.J, bool) or not isinstance(self.J, (int, np.integer)):
            raise ConfigurationError(f"J must be an integer, got {self.J!r}")
        if self.J < 1:
            raise ConfigurationError(f"J must be >= 1, got {self.J}")
        try:
            q = float(self.q)
        except (TypeError, ValueError):
            raise ConfigurationError(f"q must be a real number, got {self.q!r}") from None
        if not math.isfinite(q):
            raise ConfigurationError(f"q must be finite, got {self.q!r}")
        if not (self.eig_tol > 0 and self.tail_tol > 0):
            raise ConfigurationError("eig_tol and tail_tol must be positive")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "J", int(self.J))

    @property
    def dim(self):
        return 2 * self.J + 1

    @property
    def sites(self):
        return np.arange(-self.J, self.J + 1)


@dataclass(frozen=True)
class TruncatedOperator:
    """Symmetric tridiagonal matrix with diagonal ``diag`` and constant off-diagonal ``offdiag``.

    ``kinetic`` is False for the hopping-only variant used in the Raman-Nath limit.
    """

    J: int
    diag: np.ndarray
    offdiag: float
    kinetic: bool = True

    @property
    def dim(self):
        return 2 * self.J + 1

    @property
    def sites(self):
        return np.arange(-self.J, self.J + 1)

    def to_dense(self):
        h = np.diag(np.asarray(self.diag, dtype=float))
        idx = np.arange(self.dim - 1)
        h[idx, idx + 1] = self.offdiag
        h[idx + 1, idx] = self.offdiag
        return h


def build_operator(cfg: LatticeConfig) -> TruncatedOperator:
    """Diagonal ``j**2`` for ``j = -J..J``, both off-diagonals equal to ``q``."""
    if not isinstance(cfg, LatticeConfig):
        raise ConfigurationError("build_operator expects a LatticeConfig")
    j = cfg.sites.astype(float)
    return TruncatedOperator(J=cfg.J, diag=_frozen(j * j), offdiag=cfg.q)


def hopping_operator(cfg: LatticeConfig) -> TruncatedOperator:
    """``q(V + V^dagger)`` alone: the kinetic diagonal is dropped."""
    return TruncatedOperator(J=cfg.J, diag=_frozen(np.zeros(cfg.dim)), offdiag=cfg.q, kinetic=False)


def ladder_matrices(J):
    """Truncated ``N``, ``V`` and ``V^dagger`` as dense matrices on sites ``-J..J``.

    ``V = sum_j |j><j+1|`` lowers the site index; rows/columns follow the site order.
    """
    n = 2 * J + 1
    N = np.diag(np.arange(-J, J + 1).astype(float))
    V = np.eye(n, k=1)
    return N, V, V.T.copy()


class MathieuLabel(NamedTuple):
    m: int
    kind: str
    order: int
    value: float


@dataclass(frozen=True)
class SpectralBasis:
    """Ascending eigenpairs of a :class:`TruncatedOperator`.

    ``coefficients[m]`` is the unit vector ``A^(m)`` over sites ``-J..J``.
    ``parity[m]`` is ``"even"``, ``"odd"`` or ``None``; ``contaminated[m]``
    marks modes whose edge coefficients exceed ``tail_tol``;
    ``mathieu_index[m]`` is ``(kind, order)`` or ``None``.
    """

    q: float
    J: int
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    parity: tuple
    contaminated: np.ndarray
    mathieu_index: tuple
    eig_tol: float = 1e-12
    tail_tol: float = 1e-10
    kinetic: bool = True
    sites: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sites", _frozen(np.arange(-self.J, self.J + 1)))

    @property
    def dim(self):
        return 2 * self.J + 1

    def __len__(self):
        return self.eigenvalues.shape[0]

    def site_index(self, j):
        return int(j) + self.J


def _fix_sign(vec, sites):
    mags = np.abs(vec)
    top = mags.max()
    cand = np.flatnonzero(mags >= top * (1.0 - 1e-9))
    # lowest |j| first, then positive j
    best = min(cand, key=lambda i: (abs(sites[i]), -sites[i]))
    return -vec if vec[best] < 0 else vec


def _coordinate_basis(op):
    sites = op.sites
    order = sorted(range(op.dim), key=lambda i: (op.diag[i], abs(sites[i]), sites[i]))
    evals = np.asarray(op.diag, dtype=float)[order]
    coeffs = np.eye(op.dim)[order]
    parity = tuple("even" if sites[i] == 0 else None for i in order)
    return evals, coeffs, parity


def _parity_blocks(op, backend=None):
    J = op.J
    diag = np.asarray(op.diag, dtype=float)
    pos = diag[J:]  # sites 0..J
    if not np.array_equal(diag[:J][::-1], pos[1:]):
        raise ConfigurationError("operator diagonal is not reflection symmetric")
    q = float(op.offdiag)

    even_off = np.full(J, q)
    even_off[0] = SQRT2 * q
    ev, evec = tridiagonal_eigh(pos, even_off, backend=backend)
    od, ovec = tridiagonal_eigh(pos[1:], np.full(J - 1, q), backend=backend)

    n = op.dim
    ne = ev.shape[0]
    full = np.zeros((n, n))
    # even: A_0 = v_0, A_{+-k} = v_k / sqrt2
    full[:ne, J] = evec[0]
    full[:ne, J + 1:] = evec[1:].T / SQRT2
    full[:ne, :J] = full[:ne, J + 1:][:, ::-1]
    # odd: A_{+k} = w_k / sqrt2, A_{-k} = -w_k / sqrt2
    full[ne:, J + 1:] = ovec.T / SQRT2
    full[ne:, :J] = -full[ne:, J + 1:][:, ::-1]

    evals = np.concatenate([ev, od])
    parity = ["even"] * ne + ["odd"] * od.shape[0]
    order = np.argsort(evals, kind="stable")
    return evals[order], full[order], tuple(parity[i] for i in order)


def solve_spectrum(op: TruncatedOperator, cfg: LatticeConfig, backend=None) -> SpectralBasis:
    """Full eigendecomposition of ``op`` with sign, parity and Mathieu-label conventions."""
    if op.J != cfg.J:
        raise ConfigurationError(f"operator J={op.J} does not match config J={cfg.J}")
    if op.offdiag == 0.0:
        evals, coeffs, parity = _coordinate_basis(op)
    else:
        evals, coeffs, parity = _parity_blocks(op, backend=backend)

    sites = op.sites
    coeffs = np.array([_fix_sign(v, sites) for v in coeffs])
    edge = np.maximum(np.abs(coeffs[:, 0]), np.abs(coeffs[:, -1]))
    contaminated = edge > cfg.tail_tol

    labels = [None] * len(evals)
    if op.kinetic and op.offdiag > 0:
        n_even = n_odd = 0
        for m, p in enumerate(parity):
            if p == "even":
                label = ("ce", 2 * n_even)
                n_even += 1
            else:
                label = ("se", 2 * n_odd + 2)
                n_odd += 1
            if not contaminated[m]:
                labels[m] = label

    return SpectralBasis(
        q=float(op.offdiag),
        J=op.J,
        eigenvalues=_frozen(evals),
        coefficients=_frozen(coeffs),
        parity=parity,
        contaminated=_frozen(contaminated),
        mathieu_index=tuple(labels),
        eig_tol=cfg.eig_tol,
        tail_tol=cfg.tail_tol,
        kinetic=op.kinetic,
    )


def spectral_basis(q, J, backend=None, **tols) -> SpectralBasis:
    """Shortcut: build and solve the kinetic lattice for ``(q, J)``."""
    cfg = LatticeConfig(q=q, J=J, **tols)
    return solve_spectrum(build_operator(cfg), cfg, backend=backend)


def recurrence_residuals(basis: SpectralBasis):
    """``(j^2 - E_m) A_j + q (A_{j-1} + A_{j+1})`` for interior sites, shape (modes, 2J-1)."""
    A = basis.coefficients
    diag = (basis.sites.astype(float) ** 2) if basis.kinetic else np.zeros(basis.dim)
    E = basis.eigenvalues[:, None]
    return (diag[1:-1] - E) * A[:, 1:-1] + basis.q * (A[:, :-2] + A[:, 2:])


def mathieu_characteristics(basis: SpectralBasis):
    """Mathieu labels of the cleanly converged modes.

    Returns a list of :class:`MathieuLabel` with ``value = 4 E_m``, the standard
    characteristic value ``a_order(4q)`` (``kind == "ce"``) or ``b_order(4q)``
    (``kind == "se"``).
    """
    if not basis.kinetic or not basis.q > 0:
        raise LabelingError("Mathieu labels require the kinetic lattice with q > 0")
    out = []
    for m, label in enumerate(basis.mathieu_index):
        if label is None:
            if basis.parity[m] is None:
                raise LabelingError(f"mode {m} has no definite parity")
            continue
        kind, order = label
        out.append(MathieuLabel(m, kind, order, 4.0 * float(basis.eigenvalues[m])))
    return out


@dataclass(frozen=True)
class StabilityChart:
    """``values[i, m] = E_m(q_grid[i])`` for ``m = 0..m_max``."""

    q_grid: np.ndarray
    values: np.ndarray
    J: int

    @property
    def m_max(self):
        return self.values.shape[1] - 1

    def rows(self):
        for i, q in enumerate(self.q_grid):
            for m in range(self.values.shape[1]):
                yield float(q), m, float(self.values[i, m])


def spectral_bases(q_grid, J, backend=None, workers: Optional[int] = None):
    """One :class:`SpectralBasis` per ``q``; solved on up to ``workers`` threads.

    Each solve is independent and the result order follows ``q_grid``, so the
    output does not depend on the worker count.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    if q_grid.ndim != 1 or q_grid.size == 0:
        raise ConfigurationError("q_grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(q_grid)):
        raise ConfigurationError("q_grid must be finite")

    def solve(q):
        return spectral_basis(q, J, backend=backend)

    workers = thread_cap() if workers is None else max(1, int(workers))
    if workers > 1 and q_grid.size > 1:
        with ThreadPoolExecutor(max_workers=min(workers, q_grid.size)) as pool:
            return list(pool.map(solve, q_grid))
    return [solve(q) for q in q_grid]


def stability_chart(q_grid, J, m_max, backend=None, workers: Optional[int] = None) -> StabilityChart:
    """Lowest ``m_max + 1`` eigenvalues ``E_0..E_{m_max}`` at every ``q`` in ``q_grid``."""
    q_grid = np.asarray(q_grid, dtype=float)
    if q_grid.ndim != 1 or q_grid.size == 0:
        raise ConfigurationError("q_grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(q_grid)):
        raise ConfigurationError("q_grid must be finite")
    if np.any(np.diff(q_grid) < 0):
        raise ConfigurationError("q_grid must be ascending")
    if m_max < 0 or m_max >= 2 * J + 1:
        raise ConfigurationError(f"m_max must lie in [0, 2J], got {m_max}")
    cols = [b.eigenvalues[: m_max + 1] for b in spectral_bases(q_grid, J, backend, workers)]
    return StabilityChart(q_grid=_frozen(q_grid), values=_frozen(np.array(cols)), J=J)
