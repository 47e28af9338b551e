"""Guided trajectories: velocity-field evaluation off the grid, RK4
integration of single paths and whole ensembles, and the divergence
experiment for phase-gradient-matched preparations.

The guiding velocity is (hbar/m) Im(grad psi / psi), equivalently
grad(S)/m in polar variables; both routes are implemented and agree off
nodes. Interpolation is cubic B-spline in space and cubic Hermite in time
between snapshots (slopes from neighboring snapshots), which is the
accuracy bottleneck of the integrator: RK4's O(dt^4) is easily finer than
the interpolation error, so tightening dt_traj beyond the snapshot spacing
buys little.

Positions are integrated in unwrapped coordinates (displacements
accumulate; fields are evaluated at the periodic image), so trajectory
ordering is meaningful even when a path runs around the box.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import NodeProximityError, PreparationMismatchError
from .fields import PolarField, WaveField
from .grid import SpatialGrid
from .operators import phase_gradient, phase_winding, spectral_gradient

_TWO_PI = 2.0 * np.pi


def wave_velocity_grids(psi: WaveField, mass: float, hbar: float,
                        floor_rho: float) -> list[np.ndarray]:
    """Guiding velocity on the grid via Im(grad psi / psi), zeroed below floor_rho."""
    rho = np.abs(psi.values) ** 2
    bad = rho < floor_rho
    safe = np.where(bad, 1.0, psi.values)
    out = []
    for a in range(psi.grid.dim):
        dpsi = spectral_gradient(psi.values, psi.grid, axis=a)
        v = (hbar / mass) * np.imag(dpsi / safe)
        v[bad] = 0.0
        out.append(v)
    return out


def polar_velocity_grids(polar: PolarField, mass: float) -> list[np.ndarray]:
    """Guiding velocity grad(S)/m from a polar decomposition.

    Node-free fields use the spectral gradient after peeling off the
    winding slope (the unwrapped S of a state with net momentum is not
    periodic; the residual after subtracting the linear part is). Fields
    with masked nodes fall back to the wrapped-difference 4th-order
    stencil, which keeps the damage from node cells local.
    """
    grid = polar.grid
    theta = polar.S / polar.hbar
    if polar.node_mask.any():
        return [polar.hbar * phase_gradient(theta, grid, axis=a) / mass
                for a in range(grid.dim)]
    coords = grid.coordinates()
    s_per = polar.S.copy()
    slopes = []
    for a in range(grid.dim):
        w = phase_winding(theta, grid, axis=a)
        slope = polar.hbar * _TWO_PI * w / grid.lengths[a]
        slopes.append(slope)
        s_per = s_per - slope * (coords[a] - grid.qmin[a])
    return [(spectral_gradient(s_per, grid, axis=a) + slopes[a]) / mass
            for a in range(grid.dim)]


class GuidingField:
    """Space-time interpolant of the guiding velocity over field snapshots.

    Accepts WaveField or PolarField snapshots (all on one grid, strictly
    increasing times). Queries return velocities plus node flags; a query
    is flagged when the locally interpolated |psi|^2 sits below
    (node_eps * max|psi|)^2, meaning the guiding law is not trustworthy
    there.
    """

    def __init__(self, snapshots, mass: float = 1.0, hbar: float = 1.0,
                 node_eps: float = 1e-6):
        if not snapshots:
            raise ValueError("need at least one snapshot")
        self.grid: SpatialGrid = snapshots[0].grid
        if any(s.grid != self.grid for s in snapshots):
            raise ValueError("snapshots live on different grids")
        self.mass = float(mass)
        self.hbar = float(hbar)
        self.node_eps = float(node_eps)
        self.times = np.array([s.time for s in snapshots], dtype=float)
        if len(snapshots) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("snapshot times must be strictly increasing")

        self._v_coef = []   # per snapshot: list of prefiltered arrays per axis
        self._rho = []
        self._gate = np.empty(len(snapshots))
        for i, snap in enumerate(snapshots):
            if isinstance(snap, WaveField):
                amax = float(np.max(np.abs(snap.values)))
                gate = (self.node_eps * amax) ** 2
                v = wave_velocity_grids(snap, self.mass, self.hbar,
                                        floor_rho=0.01 * gate)
                rho = np.abs(snap.values) ** 2
            elif isinstance(snap, PolarField):
                amax = float(np.max(snap.R))
                gate = (self.node_eps * amax) ** 2
                v = polar_velocity_grids(snap, self.mass)
                rho = snap.R**2
            else:
                raise TypeError(f"unsupported snapshot type {type(snap)!r}")
            self._v_coef.append([
                ndimage.spline_filter(va, order=3, mode="grid-wrap") for va in v
            ])
            self._rho.append(rho)
            self._gate[i] = gate

    def _coords(self, x: np.ndarray) -> np.ndarray:
        return self.grid.to_fractional_index(x).T

    def _v_at(self, snap_idx: int, coords: np.ndarray) -> np.ndarray:
        return np.stack([
            ndimage.map_coordinates(c, coords, order=3, mode="grid-wrap",
                                    prefilter=False)
            for c in self._v_coef[snap_idx]
        ], axis=-1)

    def _rho_at(self, snap_idx: int, coords: np.ndarray) -> np.ndarray:
        return ndimage.map_coordinates(self._rho[snap_idx], coords, order=1,
                                       mode="grid-wrap")

    def velocity(self, x: np.ndarray, t: float):
        """Velocities and node flags at positions x (N, dim) and time t."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        coords = self._coords(x)
        times = self.times
        m = len(times)
        if m == 1:
            v = self._v_at(0, coords)
            flags = self._rho_at(0, coords) < self._gate[0]
            return v, flags

        t = float(np.clip(t, times[0], times[-1]))
        k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, m - 2))
        h = times[k + 1] - times[k]
        s = (t - times[k]) / h

        v_k = self._v_at(k, coords)
        v_k1 = self._v_at(k + 1, coords)
        # Hermite slopes from neighboring snapshots (one-sided at the ends)
        if k > 0:
            slope_k = (v_k1 - self._v_at(k - 1, coords)) / (times[k + 1] - times[k - 1])
        else:
            slope_k = (v_k1 - v_k) / h
        if k + 2 < m:
            slope_k1 = (self._v_at(k + 2, coords) - v_k) / (times[k + 2] - times[k])
        else:
            slope_k1 = (v_k1 - v_k) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        v = h00 * v_k + h01 * v_k1 + h * (h10 * slope_k + h11 * slope_k1)

        rho = (1 - s) * self._rho_at(k, coords) + s * self._rho_at(k + 1, coords)
        gate = (1 - s) * self._gate[k] + s * self._gate[k + 1]
        return v, rho < gate


def velocity_at(state, x, mass: float = 1.0, hbar: float = 1.0,
                node_eps: float = 1e-6) -> np.ndarray:
    """Guiding velocity at configuration x for a single field snapshot.

    ``state`` may be a WaveField (Im(grad psi/psi) route) or a PolarField
    (grad S / m route). Raises NodeProximityError when x falls inside the
    node gate.
    """
    gf = GuidingField([state], mass=mass, hbar=hbar, node_eps=node_eps)
    x_arr = np.atleast_2d(np.asarray(x, dtype=float))
    v, flags = gf.velocity(x_arr, state.time)
    if np.any(flags):
        raise NodeProximityError(
            "interpolated |psi| below node threshold at query point",
            position=x_arr[flags][0], time=state.time,
        )
    if np.asarray(x).ndim <= 1:
        return v[0]
    return v


@dataclass
class Trajectory:
    """Time-stamped configuration path.

    ``status`` is 'completed' or 'halted'; a halted trajectory records the
    halt time and its arrays stop there.
    """

    times: np.ndarray
    positions: np.ndarray
    status: str = "completed"
    halt_time: float | None = None
    velocities: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim == 1:
            self.positions = self.positions[:, None]
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("trajectory positions must be finite")

    @property
    def halted(self) -> bool:
        return self.status == "halted"

    def final_position(self) -> np.ndarray:
        return self.positions[-1]


@dataclass
class EnsembleResult:
    """Batch of trajectories integrated under one guiding field.

    ``positions`` has shape (records, N, dim), unwrapped; halted members
    are frozen at their halt position from the halt record onward. The
    per-member view is available through ``trajectory(i)`` /
    ``trajectories``.
    """

    times: np.ndarray
    positions: np.ndarray
    status: np.ndarray
    halt_times: np.ndarray
    seed: int | None = None
    sampler: str = "explicit"
    velocities: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def halted_fraction(self) -> float:
        if self.n == 0:
            return 0.0
        return float(np.mean(self.status == 1))

    def alive_at(self, record_index: int) -> np.ndarray:
        t = self.times[record_index]
        return ~((self.status == 1) & (self.halt_times <= t))

    def trajectory(self, i: int) -> Trajectory:
        if self.status[i] == 1:
            keep = self.times <= self.halt_times[i]
            return Trajectory(
                self.times[keep], self.positions[keep, i], status="halted",
                halt_time=float(self.halt_times[i]),
                velocities=None if self.velocities is None
                else self.velocities[keep, i],
            )
        return Trajectory(
            self.times, self.positions[:, i],
            velocities=None if self.velocities is None else self.velocities[:, i],
        )

    @property
    def trajectories(self) -> list[Trajectory]:
        return [self.trajectory(i) for i in range(self.n)]


def _rk4_step(gf: GuidingField, x: np.ndarray, t: float, dt: float):
    v1, f1 = gf.velocity(x, t)
    v2, f2 = gf.velocity(x + 0.5 * dt * v1, t + 0.5 * dt)
    v3, f3 = gf.velocity(x + 0.5 * dt * v2, t + 0.5 * dt)
    v4, f4 = gf.velocity(x + dt * v3, t + dt)
    x_new = x + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
    return x_new, f1 | f2 | f3 | f4, v1


def _substep_chain(gf, x, t, dt, parts):
    """Advance by dt in ``parts`` equal substeps; flag if any substep flags."""
    xi = x
    flagged = np.zeros(x.shape[0], dtype=bool)
    sub = dt / parts
    for p in range(parts):
        xi_new, fl, _ = _rk4_step(gf, xi, t + p * sub, sub)
        flagged |= fl
        xi = np.where(fl[:, None], xi, xi_new)
    return xi, flagged


def integrate_ensemble(gf: GuidingField, x0: np.ndarray, t0: float, t1: float,
                       dt: float, record_stride: int = 1,
                       record_velocities: bool = False,
                       seed: int | None = None,
                       sampler: str = "explicit") -> EnsembleResult:
    """RK4-integrate a batch of starting points under the guiding field.

    A step whose velocity evaluation lands in a node gate is retried at
    dt/2 and dt/4; if still gated the member halts at the step start and
    its status records it (halts are data, not errors). t1 == t0 returns
    the initial positions unchanged.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    n, dim = x0.shape
    if dim != gf.grid.dim:
        raise ValueError("starting points do not match the grid dimension")
    span = t1 - t0
    if span < 0:
        raise ValueError("t1 must be >= t0")
    if span == 0 or n == 0:
        vel0 = None
        if record_velocities and n > 0:
            vel0 = gf.velocity(x0, t0)[0][None]
        return EnsembleResult(
            times=np.array([t0]), positions=x0[None].copy(),
            status=np.zeros(n, dtype=int), halt_times=np.full(n, np.nan),
            seed=seed, sampler=sampler, velocities=vel0,
        )
    n_steps = max(1, int(round(span / dt)))
    dt_eff = span / n_steps

    record_idx = list(range(0, n_steps + 1, record_stride))
    if record_idx[-1] != n_steps:
        record_idx.append(n_steps)
    rec_map = {s: r for r, s in enumerate(record_idx)}
    n_rec = len(record_idx)

    positions = np.empty((n_rec, n, dim))
    velocities = np.empty((n_rec, n, dim)) if record_velocities else None
    times_rec = np.array([t0 + s * dt_eff for s in record_idx])
    status = np.zeros(n, dtype=int)
    halt_times = np.full(n, np.nan)

    x = x0.copy()
    positions[0] = x
    if record_velocities:
        velocities[0] = gf.velocity(x, t0)[0]

    active = np.ones(n, dtype=bool)
    for step in range(n_steps):
        t = t0 + step * dt_eff
        if active.any():
            xa = x[active]
            x_new, flagged, _ = _rk4_step(gf, xa, t, dt_eff)
            if flagged.any():
                # retry the gated members at dt/2, then dt/4, then halt
                idx = np.where(flagged)[0]
                x_half, fl_half = _substep_chain(gf, xa[idx], t, dt_eff, 2)
                still = np.where(fl_half)[0]
                if still.size:
                    x_q, fl_q = _substep_chain(gf, xa[idx][still], t, dt_eff, 4)
                    x_half[still] = np.where(fl_q[:, None], xa[idx][still], x_q)
                    fl_half[still] = fl_q
                x_new[idx] = x_half
                halted_global = np.where(active)[0][idx[fl_half]]
                status[halted_global] = 1
                halt_times[halted_global] = t
            x[active] = x_new
            if flagged.any():
                active = status == 0
        r = rec_map.get(step + 1)
        if r is not None:
            positions[r] = x
            if record_velocities:
                v_rec = np.zeros((n, dim))
                if active.any():
                    v_rec[active] = gf.velocity(x[active], t0 + (step + 1) * dt_eff)[0]
                velocities[r] = v_rec
    return EnsembleResult(times=times_rec, positions=positions, status=status,
                          halt_times=halt_times, seed=seed, sampler=sampler,
                          velocities=velocities)


def _as_guiding_field(snapshots, mass, hbar, node_eps):
    if isinstance(snapshots, GuidingField):
        return snapshots
    return GuidingField(snapshots, mass=mass, hbar=hbar, node_eps=node_eps)


def integrate_trajectory(snapshots, x0, dt_traj: float, mass: float = 1.0,
                         hbar: float = 1.0, node_eps: float = 1e-6,
                         t0: float | None = None, t1: float | None = None,
                         record_velocities: bool = True) -> Trajectory:
    """Integrate a single guided trajectory through the snapshot window."""
    gf = _as_guiding_field(snapshots, mass, hbar, node_eps)
    if t0 is None:
        t0 = float(gf.times[0])
    if t1 is None:
        t1 = float(gf.times[-1])
    if len(gf.times) > 1:
        max_gap = float(np.max(np.diff(gf.times)))
        if dt_traj > max_gap * (1 + 1e-12):
            raise ValueError("dt_traj must not exceed the snapshot spacing")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))[None]
    res = integrate_ensemble(gf, x0, t0, t1, dt_traj,
                             record_velocities=record_velocities)
    return res.trajectory(0)


def propagate_ensemble(snapshots, x0s: np.ndarray, dt_traj: float,
                       mass: float = 1.0, hbar: float = 1.0,
                       node_eps: float = 1e-6, record_stride: int = 1,
                       seed: int | None = None,
                       sampler: str = "explicit") -> EnsembleResult:
    """Integrate all members of an ensemble through the snapshot window."""
    gf = _as_guiding_field(snapshots, mass, hbar, node_eps)
    x0s = np.atleast_2d(np.asarray(x0s, dtype=float))
    if x0s.shape[0] == 0:
        return EnsembleResult(
            times=np.array([float(gf.times[0])]),
            positions=np.empty((1, 0, gf.grid.dim)),
            status=np.zeros(0, dtype=int), halt_times=np.zeros(0),
            seed=seed, sampler=sampler,
        )
    return integrate_ensemble(gf, x0s, float(gf.times[0]), float(gf.times[-1]),
                              dt_traj, record_stride=record_stride, seed=seed,
                              sampler=sampler)


@dataclass
class DivergenceReport:
    times: np.ndarray
    separation: np.ndarray
    trajectory_a: Trajectory
    trajectory_b: Trajectory

    @property
    def final_separation(self) -> float:
        return float(self.separation[-1])


def divergence_experiment(snaps_a, snaps_b, q0, dt_traj: float,
                          mass: float = 1.0, hbar: float = 1.0,
                          node_eps: float = 1e-6,
                          grad_tol: float = 1e-8) -> DivergenceReport:
    """Separation of trajectories from one starting point under two
    preparations that share the initial phase gradient.

    ``snaps_a`` / ``snaps_b`` are snapshot sequences from two propagation
    runs whose initial states must satisfy |grad S_a - grad S_b| < grad_tol
    at q0 (checked via m * velocity); PreparationMismatchError otherwise.
    """
    gf_a = _as_guiding_field(snaps_a, mass, hbar, node_eps)
    gf_b = _as_guiding_field(snaps_b, mass, hbar, node_eps)
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    va, fa = gf_a.velocity(q0[None], gf_a.times[0])
    vb, fb = gf_b.velocity(q0[None], gf_b.times[0])
    if fa.any() or fb.any():
        raise PreparationMismatchError("q0 sits in a node gate of a preparation")
    grad_gap = mass * float(np.linalg.norm(va[0] - vb[0]))
    if grad_gap >= grad_tol:
        raise PreparationMismatchError(
            f"initial phase gradients differ by {grad_gap:.3e} >= {grad_tol:.3e}"
        )
    traj_a = integrate_trajectory(gf_a, q0, dt_traj)
    traj_b = integrate_trajectory(gf_b, q0, dt_traj)
    m = min(len(traj_a.times), len(traj_b.times))
    sep = np.linalg.norm(traj_a.positions[:m] - traj_b.positions[:m], axis=1)
    return DivergenceReport(times=traj_a.times[:m], separation=sep,
                            trajectory_a=traj_a, trajectory_b=traj_b)


def count_axis_crossings(result: EnsembleResult, axis_value: float = 0.0,
                         axis: int | None = None) -> int:
    """Number of members whose coordinate ever changes side of axis_value.

    Members starting exactly on the axis are ignored (their side is
    undefined); halted members are checked up to their halt record.
    """
    if axis is None:
        axis = result.positions.shape[2] - 1
    coord = result.positions[:, :, axis] - axis_value
    start_side = np.sign(coord[0])
    relevant = start_side != 0
    crossed = np.zeros(result.n, dtype=bool)
    for r in range(1, len(result.times)):
        alive = result.alive_at(r)
        check = relevant & alive
        crossed |= check & (np.sign(coord[r]) * start_side < 0)
    return int(np.count_nonzero(crossed))
