"""Split-step spectral propagation of the wave field.

The stepper is Strang-split with the kinetic half steps outermost:

    exp(-i K dt/2) exp(-i V dt) exp(-i K dt/2)

per step, all factors diagonal (kinetic in k-space, potential in q-space),
hence exactly norm-preserving; the splitting error is second order in dt
and vanishes identically for the free particle. Periodic boundaries are
implicit in the FFT: scenarios must keep packets away from the seam, and an
optional edge monitor warns when they do not.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AliasingWarning, EdgeLeakWarning, StepSizeWarning
from .fields import WaveField
from .grid import SpatialGrid
from .operators import spectral_gradient


class Potential:
    """Time-independent external potential; subclasses provide values on a grid."""

    kind = "custom"

    def as_field(self, grid: SpatialGrid) -> np.ndarray:
        raise NotImplementedError

    def at(self, x: np.ndarray) -> np.ndarray:
        """Pointwise evaluation at arbitrary positions (for trajectory work)."""
        raise NotImplementedError


class FreePotential(Potential):
    kind = "free"

    def as_field(self, grid):
        return np.zeros(grid.shape)

    def at(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] if x.ndim > 1 else x.shape[:1] or (1,))


class HarmonicPotential(Potential):
    """V = (m omega^2 / 2) |q - center|^2."""

    kind = "harmonic"

    def __init__(self, omega: float, mass: float = 1.0, center=0.0):
        if omega <= 0:
            raise ValueError("omega must be positive")
        self.omega = float(omega)
        self.mass = float(mass)
        self.center = np.atleast_1d(np.asarray(center, dtype=float))

    def as_field(self, grid):
        coords = grid.coordinates()
        center = np.broadcast_to(self.center, (grid.dim,))
        r2 = sum((coords[a] - center[a]) ** 2 for a in range(grid.dim))
        return 0.5 * self.mass * self.omega**2 * r2

    def at(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        center = np.broadcast_to(self.center, (x.shape[1],))
        return 0.5 * self.mass * self.omega**2 * np.sum((x - center) ** 2, axis=1)


class GridPotential(Potential):
    """Potential given by explicit grid samples (held fixed in time)."""

    kind = "custom-grid"

    def __init__(self, grid: SpatialGrid, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError("potential samples do not match grid shape")
        if not np.all(np.isfinite(values)):
            raise ValueError("potential must be finite everywhere")
        self.grid = grid
        self.values = values.copy()

    def as_field(self, grid):
        if grid != self.grid:
            raise ValueError("grid potential sampled on a different grid")
        return self.values


@dataclass
class PropagatorConfig:
    """Stepping parameters for one propagation run.

    ``dt`` above dx^2 * m / (pi * hbar) triggers a StepSizeWarning (the
    potential phase then rotates near-Nyquist modes by more than pi per
    step). ``snapshot_stride`` controls emission; the final state is always
    emitted. ``monitor_edges`` turns on the leak check for localized
    packets (meaningless for extended states like plane waves, hence
    opt-in).
    """

    dt: float
    steps: int
    hbar: float = 1.0
    mass: float = 1.0
    snapshot_stride: int = 1
    splitting: str = "strang"
    monitor_edges: bool = False
    check_aliasing: bool = True
    edge_band_fraction: float = 0.10
    edge_leak_threshold: float = 1e-10

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be at least 1")
        if self.splitting != "strang":
            raise ValueError("only Strang splitting is implemented")


def _aliasing_fraction(values: np.ndarray, grid: SpatialGrid) -> float:
    """Fraction of the norm carried by the top 10% of |k| per axis."""
    spec = np.abs(np.fft.fftn(values)) ** 2
    total = spec.sum()
    if total == 0.0:
        return 0.0
    tail = np.zeros(grid.shape, dtype=bool)
    for a in range(grid.dim):
        k = grid.wavenumbers(a)
        kmax = np.max(np.abs(k))
        shape = [1] * grid.dim
        shape[a] = grid.shape[a]
        tail |= (np.abs(k) >= 0.9 * kmax).reshape(shape)
    return float(spec[tail].sum() / total)


def edge_band_max(values: np.ndarray, grid: SpatialGrid, fraction: float) -> float:
    """Largest |value| inside the per-axis edge bands (leak diagnostic)."""
    worst = 0.0
    for a in range(grid.dim):
        n = grid.shape[a]
        band = max(1, int(np.floor(fraction * n)))
        mag = np.abs(values)
        lo = np.take(mag, range(band), axis=a)
        hi = np.take(mag, range(n - band, n), axis=a)
        worst = max(worst, float(lo.max()), float(hi.max()))
    return worst


def propagate(psi0: WaveField, potential: Potential, cfg: PropagatorConfig) -> list[WaveField]:
    """Evolve psi0 and return snapshots [t0, t0+stride*dt, ..., t_final].

    Zero steps returns [psi0] unchanged. Norm is preserved to roundoff per
    step by construction; no renormalization is applied, so norm drift is a
    faithful error indicator.
    """
    grid = psi0.grid
    dt_bound = float(np.min(grid.dx) ** 2) * cfg.mass / (np.pi * cfg.hbar)
    if cfg.dt > dt_bound:
        warnings.warn(
            f"dt={cfg.dt:g} exceeds the phase-aliasing bound {dt_bound:g}",
            StepSizeWarning,
            stacklevel=2,
        )
    if cfg.steps == 0:
        return [psi0]

    k2 = np.zeros(grid.shape, dtype=float)
    for a in range(grid.dim):
        k = grid.wavenumbers(a)
        shape = [1] * grid.dim
        shape[a] = grid.shape[a]
        k2 = k2 + (k**2).reshape(shape)
    half_kinetic = np.exp(-1j * cfg.hbar * k2 * cfg.dt / (4.0 * cfg.mass))
    v_phase = np.exp(-1j * potential.as_field(grid) * cfg.dt / cfg.hbar)

    def checks(values, t):
        if cfg.check_aliasing:
            frac = _aliasing_fraction(values, grid)
            if frac > 1e-8:
                warnings.warn(
                    f"k-space tail fraction {frac:.3e} at t={t:g} "
                    "(momentum content near Nyquist)",
                    AliasingWarning,
                    stacklevel=3,
                )
        if cfg.monitor_edges:
            leak = edge_band_max(values, grid, cfg.edge_band_fraction)
            if leak > cfg.edge_leak_threshold:
                warnings.warn(
                    f"|psi| reaches {leak:.3e} inside the edge bands at t={t:g}",
                    EdgeLeakWarning,
                    stacklevel=3,
                )

    values = psi0.values.copy()
    t0 = psi0.time
    checks(values, t0)
    snapshots = [psi0]
    for step in range(1, cfg.steps + 1):
        spec = np.fft.fftn(values)
        values = np.fft.ifftn(spec * half_kinetic)
        values *= v_phase
        spec = np.fft.fftn(values)
        values = np.fft.ifftn(spec * half_kinetic)
        if step % cfg.snapshot_stride == 0 or step == cfg.steps:
            t = t0 + step * cfg.dt
            checks(values, t)
            snapshots.append(WaveField(grid, values, t))
    return snapshots


def expectation_energy(psi: WaveField, potential: Potential,
                       mass: float = 1.0, hbar: float = 1.0) -> float:
    """<H> = kinetic (in k-space) + potential expectation."""
    grid = psi.grid
    spec = np.fft.fftn(psi.values)
    k2 = np.zeros(grid.shape, dtype=float)
    for a in range(grid.dim):
        k = grid.wavenumbers(a)
        shape = [1] * grid.dim
        shape[a] = grid.shape[a]
        k2 = k2 + (k**2).reshape(shape)
    # Parseval: sum|fft|^2 * dv / N integrates |psi_hat|^2 consistently
    weight = grid.cell_volume / grid.size
    kinetic = (hbar**2 / (2.0 * mass)) * float(np.sum(k2 * np.abs(spec) ** 2)) * weight
    pot = grid.integrate(potential.as_field(grid) * np.abs(psi.values) ** 2)
    return kinetic + pot


def probability_current(psi: WaveField, mass: float = 1.0,
                        hbar: float = 1.0) -> list[np.ndarray]:
    """Current j_a = (hbar/m) Im(conj(psi) d_a psi), one array per axis."""
    out = []
    for a in range(psi.grid.dim):
        dpsi = spectral_gradient(psi.values, psi.grid, axis=a)
        out.append((hbar / mass) * np.imag(np.conj(psi.values) * dpsi))
    return out


def continuity_residual(snapshots: list[WaveField], mass: float = 1.0,
                        hbar: float = 1.0) -> np.ndarray:
    """Max-norm of d(rho)/dt + div(j) at each interior snapshot.

    Time derivative by central differences across neighboring snapshots,
    divergence spectrally in space; the result is second order in the
    snapshot spacing.
    """
    if len(snapshots) < 3:
        raise ValueError("need at least 3 consecutive snapshots")
    grid = snapshots[0].grid
    rho = [np.abs(s.values) ** 2 for s in snapshots]
    times = np.array([s.time for s in snapshots])
    residuals = np.empty(len(snapshots) - 2)
    for i in range(1, len(snapshots) - 1):
        drho_dt = (rho[i + 1] - rho[i - 1]) / (times[i + 1] - times[i - 1])
        div_j = np.zeros(grid.shape)
        for a, j_a in enumerate(probability_current(snapshots[i], mass, hbar)):
            div_j += spectral_gradient(j_a, grid, axis=a)
        residuals[i - 1] = float(np.max(np.abs(drho_dt + div_j)))
    return residuals
