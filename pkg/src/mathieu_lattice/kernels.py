"""Hot numerical kernels, each with a numba and a pure-numpy implementation.

The public entry points (``tridiagonal_eigh``, ``rk4_lattice``, ``rk4_bragg``)
pick the implementation from ``backend`` or, when it is ``None``, from the
``MATHIEU_LATTICE_NUMBA`` environment flag.
"""

import math

import numpy as np

from ._accel import njit, resolve_backend
from .errors import NumericError

MAX_QL_SWEEPS = 60


# ---------------------------------------------------------------------------
# symmetric tridiagonal eigensolver (implicit-shift QL)
# ---------------------------------------------------------------------------

@njit
def _tql_numba(d, e, z):
    n = d.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_QL_SWEEPS:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def _tql_numpy(d, e, z):
    # same sweep as _tql_numba; the rotation of eigenvector columns is vectorised
    n = d.shape[0]
    e[:-1] = e[1:].copy()
    e[n - 1] = 0.0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_QL_SWEEPS:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                zi1 = z[:, i + 1]
                z[:, i] = c * zi - s * zi1
                z[:, i + 1] = s * zi + c * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tridiagonal_eigh(diag, offdiag, backend=None):
    """Eigen-decompose a real symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : (n,) array_like
        Main diagonal.
    offdiag : (n-1,) array_like
        Sub/super-diagonal.
    backend : {"numba", "numpy"}, optional

    Returns
    -------
    eigenvalues : (n,) ndarray, ascending
    eigenvectors : (n, n) ndarray, column ``k`` pairs with ``eigenvalues[k]``
    """
    d = np.array(diag, dtype=np.float64)
    n = d.shape[0]
    e = np.zeros(n, dtype=np.float64)
    e[1:] = np.asarray(offdiag, dtype=np.float64)
    z = np.eye(n, dtype=np.float64)
    if n == 0:
        return d, z
    kernel = _tql_numba if resolve_backend(backend) == "numba" else _tql_numpy
    status = kernel(d, e, z)
    if status >= 0:
        raise NumericError(f"QL iteration did not converge for eigenvalue {status}", index=int(status))
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]


# ---------------------------------------------------------------------------
# RK4 for the stationary lattice  i dc/dz = diag*c + q*(c[j-1] + c[j+1])
# ---------------------------------------------------------------------------

@njit
def _lattice_rhs_numba(y, diag, q, out):
    n = y.shape[0]
    for j in range(n):
        acc = diag[j] * y[j]
        if j > 0:
            acc += q * y[j - 1]
        if j < n - 1:
            acc += q * y[j + 1]
        out[j] = -1j * acc


@njit
def _rk4_lattice_numba(c, diag, q, h, nsteps):
    n = c.shape[0]
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    for _ in range(nsteps):
        _lattice_rhs_numba(c, diag, q, k1)
        for j in range(n):
            tmp[j] = c[j] + 0.5 * h * k1[j]
        _lattice_rhs_numba(tmp, diag, q, k2)
        for j in range(n):
            tmp[j] = c[j] + 0.5 * h * k2[j]
        _lattice_rhs_numba(tmp, diag, q, k3)
        for j in range(n):
            tmp[j] = c[j] + h * k3[j]
        _lattice_rhs_numba(tmp, diag, q, k4)
        for j in range(n):
            c[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return c


def _lattice_rhs_numpy(y, diag, q):
    out = diag * y
    out[:-1] += q * y[1:]
    out[1:] += q * y[:-1]
    return -1j * out


def _rk4_lattice_numpy(c, diag, q, h, nsteps):
    for _ in range(nsteps):
        k1 = _lattice_rhs_numpy(c, diag, q)
        k2 = _lattice_rhs_numpy(c + 0.5 * h * k1, diag, q)
        k3 = _lattice_rhs_numpy(c + 0.5 * h * k2, diag, q)
        k4 = _lattice_rhs_numpy(c + h * k3, diag, q)
        c = c + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return c


def rk4_lattice(c, diag, q, h, nsteps, backend=None):
    """Advance lattice amplitudes ``c`` by ``nsteps`` classical RK4 steps of size ``h``."""
    c = np.array(c, dtype=np.complex128)
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    if resolve_backend(backend) == "numba":
        return _rk4_lattice_numba(c, diag, float(q), float(h), int(nsteps))
    return _rk4_lattice_numpy(c, diag, float(q), float(h), int(nsteps))


# ---------------------------------------------------------------------------
# RK4 for the time-dependent Bragg ladder
#   dg_j/dt = i*omega*[p_{j-1}(t) g_{j-1} + conj(p_j(t)) g_{j+1}],
#   p_j(t) = exp(i*bond_freq_j*t)  on the bond (j, j+1)
# ---------------------------------------------------------------------------

@njit
def _bragg_rhs_numba(y, omega, bond_freq, t, out):
    n = y.shape[0]
    for j in range(n):
        out[j] = 0.0
    for b in range(n - 1):
        p = complex(math.cos(bond_freq[b] * t), math.sin(bond_freq[b] * t))
        out[b + 1] += p * y[b]
        out[b] += p.conjugate() * y[b + 1]
    for j in range(n):
        out[j] *= 1j * omega


@njit
def _rk4_bragg_numba(g, omega, bond_freq, t0, h, nsteps):
    n = g.shape[0]
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    for s in range(nsteps):
        t = t0 + s * h
        _bragg_rhs_numba(g, omega, bond_freq, t, k1)
        for j in range(n):
            tmp[j] = g[j] + 0.5 * h * k1[j]
        _bragg_rhs_numba(tmp, omega, bond_freq, t + 0.5 * h, k2)
        for j in range(n):
            tmp[j] = g[j] + 0.5 * h * k2[j]
        _bragg_rhs_numba(tmp, omega, bond_freq, t + 0.5 * h, k3)
        for j in range(n):
            tmp[j] = g[j] + h * k3[j]
        _bragg_rhs_numba(tmp, omega, bond_freq, t + h, k4)
        for j in range(n):
            g[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return g


def _bragg_rhs_numpy(y, omega, phase):
    out = np.zeros_like(y)
    out[1:] += phase * y[:-1]
    out[:-1] += phase.conj() * y[1:]
    return 1j * omega * out


def _rk4_bragg_numpy(g, omega, bond_freq, t0, h, nsteps):
    for s in range(nsteps):
        t = t0 + s * h
        p0 = np.exp(1j * bond_freq * t)
        ph = np.exp(1j * bond_freq * (t + 0.5 * h))
        p1 = np.exp(1j * bond_freq * (t + h))
        k1 = _bragg_rhs_numpy(g, omega, p0)
        k2 = _bragg_rhs_numpy(g + 0.5 * h * k1, omega, ph)
        k3 = _bragg_rhs_numpy(g + 0.5 * h * k2, omega, ph)
        k4 = _bragg_rhs_numpy(g + h * k3, omega, p1)
        g = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return g


def rk4_bragg(g, omega, bond_freq, t0, h, nsteps, backend=None):
    """Advance Bragg amplitudes from ``t0`` by ``nsteps`` RK4 steps of size ``h``.

    Stage times are ``t0 + s*h`` (+ h/2, + h), recomputed from the step index
    so that the phases do not accumulate rounding drift.
    """
    g = np.array(g, dtype=np.complex128)
    bond_freq = np.ascontiguousarray(bond_freq, dtype=np.float64)
    if resolve_backend(backend) == "numba":
        return _rk4_bragg_numba(g, float(omega), bond_freq, float(t0), float(h), int(nsteps))
    return _rk4_bragg_numpy(g, float(omega), bond_freq, float(t0), float(h), int(nsteps))
