"""Single Bragg diffraction ladder and its mapping onto the lattice.

The ladder amplitudes obey

    i dg_j/dt = -Omega [g_{j-1} e^{i w_D t} e^{2i w_k (j-1) t}
                        + g_{j+1} e^{-i w_D t} e^{-2i w_k j t}].

With delta = -w_k, eta = w_k - w_D and l = eta / (2 delta) (integer), the
gauge transform

    c_k = exp(i delta k^2 t) g_{k-l}(t),   z = -delta t = w_k t,   q = Omega / delta

turns the ladder into the stationary lattice i dc/dz = [N^2 + q(V + V^dagger)] c.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .kernels import rk4_bragg
from .oracles import bessel_populations
from .propagator import NORM_DRIFT_WARN, RK4_STABILITY, FieldState, propagate
from .spectrum import LatticeConfig, hopping_operator, solve_spectrum, spectral_basis

log = logging.getLogger(__name__)

L_INT_TOL = 1e-12


@dataclass(frozen=True)
class BraggConfig:
    """Bragg parameters: ``omega`` (half the Bragg-Rabi frequency), recoil ``omega_k``, Doppler ``omega_D``."""

    omega: float
    omega_k: float
    omega_D: float

    def __post_init__(self):
        for name in ("omega", "omega_k", "omega_D"):
            v = getattr(self, name)
            if not math.isfinite(float(v)):
                raise ConfigurationError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))
        if not self.omega_k > 0:
            raise ConfigurationError("omega_k must be positive")

    @property
    def delta(self):
        return -self.omega_k

    @property
    def eta(self):
        return self.omega_k - self.omega_D

    @property
    def l(self):
        return self.eta / (2.0 * self.delta)

    @property
    def q(self):
        return self.omega / self.delta

    def integer_l(self):
        """``l`` as an int; non-integer values are rejected."""
        l = self.l
        if abs(l - round(l)) > L_INT_TOL * max(1.0, abs(l)):
            raise ConfigurationError(
                f"l = eta/(2 delta) = (omega_k - omega_D)/(-2 omega_k) = {l:g} is not an integer"
            )
        return int(round(l))


@dataclass(frozen=True)
class BraggState:
    """Ladder amplitudes ``g_j`` for ``j = -J..J`` at time ``t``."""

    t: float
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size % 2 == 0:
            raise DomainError("amplitudes must be a 1-d array of odd length 2J+1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "t", float(self.t))

    @property
    def J(self):
        return (self.amplitudes.size - 1) // 2

    @classmethod
    def from_sites(cls, J, sites, weights=None, t=0.0):
        f = FieldState.from_sites(J, sites, weights)
        return cls(t=t, amplitudes=f.amplitudes)


@dataclass(frozen=True)
class BraggRun:
    t_grid: np.ndarray
    amplitudes: np.ndarray
    warnings: tuple = ()
    input_norm: float | None = None

    @property
    def states(self):
        return [BraggState(t=t, amplitudes=a) for t, a in zip(self.t_grid, self.amplitudes)]

    @property
    def populations(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_drift(self):
        n = self.populations.sum(axis=1)
        ref = n[0] if self.input_norm is None else self.input_norm
        return float(np.max(np.abs(n - ref)))


def _bond_frequencies(cfg, J):
    # bond (j, j+1) carries exp(i (w_D + 2 w_k j) t)
    j = np.arange(-J, J, dtype=float)
    return cfg.omega_D + 2.0 * cfg.omega_k * j


def integrate_bragg(cfg: BraggConfig, initial: BraggState, t_grid, step, backend=None) -> BraggRun:
    """RK4 on the explicitly time-dependent ladder; phases are evaluated at every stage time."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size == 0:
        raise DomainError("t_grid is empty")
    if np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly ascending")
    if t[0] < initial.t:
        raise DomainError("t_grid must start at or after the initial time")
    h = float(step)
    if not h > 0:
        raise ConfigurationError("step must be positive")
    J = initial.J
    bound = h * (2.0 * abs(cfg.omega) + 2.0 * cfg.omega_k * J + abs(cfg.omega_D))
    if bound > RK4_STABILITY:
        raise ConfigurationError(f"step too large: h*(2|Omega| + 2 w_k J + |w_D|) = {bound:.3g} > {RK4_STABILITY}")

    bond_freq = _bond_frequencies(cfg, J)
    g = np.array(initial.amplitudes)
    out = np.empty((t.size, g.size), dtype=np.complex128)
    t_now = initial.t
    for k, t_target in enumerate(t):
        span = t_target - t_now
        if span > 0:
            nsteps = max(1, math.ceil(span / h - 1e-9))
            g = rk4_bragg(g, cfg.omega, bond_freq, t_now, span / nsteps, nsteps, backend=backend)
        out[k] = g
        t_now = t_target

    n0 = float(np.vdot(initial.amplitudes, initial.amplitudes).real)
    run = BraggRun(t_grid=t, amplitudes=out, input_norm=n0)
    drift = run.norm_drift
    if drift > NORM_DRIFT_WARN:
        msg = f"Bragg RK4 norm drift {drift:.3g} exceeds {NORM_DRIFT_WARN:g}"
        log.warning(msg)
        run = BraggRun(t_grid=t, amplitudes=out, warnings=(msg,), input_norm=n0)
    return run


def frame_map(cfg: BraggConfig, state: BraggState) -> FieldState:
    """Map ladder amplitudes at time ``t`` to lattice amplitudes at ``z = -delta t``.

    ``c_k = exp(i delta k^2 t) g_{k-l}``; sites shifted outside ``[-J, J]`` are
    dropped and vacated sites are zero.
    """
    l = cfg.integer_l()
    J = state.J
    g = state.amplitudes
    c = np.zeros_like(g)
    k = np.arange(-J, J + 1)
    src = k - l
    ok = np.abs(src) <= J
    c[ok] = np.exp(1j * cfg.delta * k[ok].astype(float) ** 2 * state.t) * g[src[ok] + J]
    return FieldState(z=-cfg.delta * state.t, amplitudes=c)


@dataclass(frozen=True)
class EquivalenceReport:
    omega: float
    omega_k: float
    omega_D: float
    delta: float
    eta: float
    l: int
    q: float
    t_max: float
    h: float
    max_population_discrepancy: float
    norm_drift_bragg: float
    norm_drift_lattice: float
    # not part of the JSON report
    bragg_populations: np.ndarray = field(repr=False, compare=False, default=None)
    lattice_populations: np.ndarray = field(repr=False, compare=False, default=None)
    max_amplitude_discrepancy: float = field(repr=False, compare=False, default=float("nan"))
    t_grid: np.ndarray = field(repr=False, compare=False, default=None)

    REPORT_FIELDS = (
        "omega", "omega_k", "omega_D", "delta", "eta", "l", "q", "t_max", "h",
        "max_population_discrepancy", "norm_drift_bragg", "norm_drift_lattice",
    )

    def to_dict(self):
        d = asdict(self)
        return {k: d[k] for k in self.REPORT_FIELDS}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def verify_equivalence(cfg: BraggConfig, initial: BraggState, t_max, h, samples=301, backend=None) -> EquivalenceReport:
    """Integrate the ladder, map it to the lattice frame, and compare with the spectral lattice run.

    The discrepancy is the largest population difference over all sample
    times and sites.
    """
    l = cfg.integer_l()
    if not (t_max > 0 and math.isfinite(t_max)):
        raise DomainError("t_max must be positive and finite")
    J = initial.J
    t_grid = np.linspace(initial.t, initial.t + t_max, int(samples))
    run = integrate_bragg(cfg, initial, t_grid, h, backend=backend)
    mapped = np.array([frame_map(cfg, s).amplitudes for s in run.states])

    start = frame_map(cfg, BraggState(t=0.0, amplitudes=initial.amplitudes))
    basis = spectral_basis(cfg.q, J, backend=backend)
    lattice = propagate(basis, start, -cfg.delta * (t_grid - initial.t))

    pop_b = np.abs(mapped) ** 2
    pop_l = lattice.intensities
    if initial.t != 0.0:
        amp_gap = float("nan")
    else:
        amp_gap = float(np.max(np.abs(mapped - lattice.amplitudes)))
    return EquivalenceReport(
        omega=cfg.omega,
        omega_k=cfg.omega_k,
        omega_D=cfg.omega_D,
        delta=cfg.delta,
        eta=cfg.eta,
        l=l,
        q=cfg.q,
        t_max=float(t_max),
        h=float(h),
        max_population_discrepancy=float(np.max(np.abs(pop_b - pop_l))),
        norm_drift_bragg=run.norm_drift,
        norm_drift_lattice=lattice.norm_drift,
        bragg_populations=run.populations,
        lattice_populations=pop_l,
        max_amplitude_discrepancy=amp_gap,
        t_grid=t_grid,
    )


@dataclass(frozen=True)
class RamanNathTable:
    """``bessel[k, i] = |J_{n_i}(2 x_k)|^2`` and the hopping-only lattice populations at ``q z = x_k``."""

    products: np.ndarray
    n: np.ndarray
    bessel: np.ndarray
    lattice: np.ndarray

    @property
    def max_deviation(self):
        return float(np.max(np.abs(self.bessel - self.lattice)))


def raman_nath_profile(products, n_max, J=64, q=1.0, backend=None) -> RamanNathTable:
    """Bessel populations for site-0 input with the kinetic term dropped.

    ``products`` are values of ``Omega t`` (equivalently ``q z``); the lattice
    side evolves the hopping-only operator with coupling ``q`` to ``z = products / q``.
    """
    x = np.atleast_1d(np.asarray(products, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("products must be finite")
    if n_max < 0 or n_max > J:
        raise DomainError(f"n_max must lie in [0, J={J}]")
    if q == 0:
        raise DomainError("q must be nonzero")
    n = np.arange(-n_max, n_max + 1)
    bessel = bessel_populations(n[None, :], 2.0 * x[:, None])

    cfg = LatticeConfig(q=q, J=J)
    basis = solve_spectrum(hopping_operator(cfg), cfg, backend=backend)
    initial = FieldState.from_sites(J, [0])
    order = np.argsort(x, kind="stable")
    # propagate needs a strictly ascending grid; collapse repeats and restore order
    zs, inverse = np.unique(x[order] / q, return_inverse=True)
    amps = propagate(basis, initial, zs).amplitudes[inverse]
    pops = np.empty((x.size, n.size))
    pops[order] = np.abs(amps[:, n + J]) ** 2
    return RamanNathTable(products=x, n=n, bessel=bessel, lattice=pops)
