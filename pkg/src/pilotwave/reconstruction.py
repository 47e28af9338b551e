"""Reconstruction of amplitude and action along a realized trajectory.

The total derivatives along a guided path C obey

    dS/dt           = sum_a m v_a^2 / 2 - V - U
    d(ln R)/dt      = -(1/2) sum_a dv_a/dq_a
    v               = grad(S) / m

where U is the amplitude-curvature potential. The first two involve
transverse derivatives (div v, lap R) that a single curve cannot supply:
estimating them takes a bundle of neighboring trajectories. A bundle of
half-width k < 2 cannot form the transverse second-derivative stencil, so
reconstruction fails by construction -- the single-trajectory case k = 0
is the sharpest instance. The classical counterpart needs none of this:
S along a classical path is just the accumulated Lagrangian.

Everything here consumes trajectories and initial data only; no operation
reads the propagated field. (Building bundles and oracle comparisons, which
legitimately use the solver, live in separate helpers.)
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import BundleCrossingError, InsufficientBundleError
from .fields import to_polar
from .schrodinger import FreePotential, Potential
from .trajectories import GuidingField, Trajectory, integrate_ensemble

_TWO_PI = 2.0 * np.pi


@dataclass
class Bundle:
    """A center trajectory plus axis-aligned neighbor chains.

    ``chains[a]`` lists the 2k+1 members offset along axis a at t = 0 by
    -k*delta .. +k*delta (the center sits at index k and is shared between
    chains). k = 0 encodes the bare single-trajectory case.
    """

    center: Trajectory
    chains: list[list[Trajectory]]
    spacing: float
    k: int

    @property
    def times(self) -> np.ndarray:
        return self.center.times

    def start_points(self) -> list[np.ndarray]:
        """Distinct member start positions, chain by chain."""
        return [np.array([m.positions[0] for m in chain]) for chain in self.chains]


def build_bundle(snapshots, x0, k: int, delta: float, dt_traj: float,
                 mass: float = 1.0, hbar: float = 1.0,
                 node_eps: float = 1e-6) -> Bundle:
    """Integrate the center and its 2k-per-axis neighbors under one field."""
    gf = snapshots if isinstance(snapshots, GuidingField) else \
        GuidingField(snapshots, mass=mass, hbar=hbar, node_eps=node_eps)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dim = gf.grid.dim
    if k < 0:
        raise ValueError("k must be non-negative")
    if delta <= 0 and k > 0:
        raise ValueError("delta must be positive")
    offsets = np.arange(-k, k + 1)
    starts = [x0.copy()]
    index = {}
    for a in range(dim):
        for o in offsets:
            if o == 0:
                continue
            pt = x0.copy()
            pt[a] += o * delta
            index[(a, int(o))] = len(starts)
            starts.append(pt)
    res = integrate_ensemble(gf, np.array(starts), float(gf.times[0]),
                             float(gf.times[-1]), dt_traj,
                             record_velocities=True)
    if np.any(res.status == 1):
        raise BundleCrossingError("a bundle member halted inside the window")
    members = res.trajectories
    chains = []
    for a in range(dim):
        chain = [members[index[(a, int(o))]] if o != 0 else members[0]
                 for o in offsets]
        chains.append(chain)
    return Bundle(center=members[0], chains=chains, spacing=float(delta), k=int(k))


def _nonuniform_first(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """d f / d x along axis 1 of (T, M) arrays at their own (moving) nodes.

    Second-order 3-point interior stencil on nonuniform spacing; one-sided
    2-point at the chain edges.
    """
    out = np.empty_like(f)
    hm = x[:, 1:-1] - x[:, :-2]
    hp = x[:, 2:] - x[:, 1:-1]
    out[:, 1:-1] = (hm**2 * f[:, 2:] - hp**2 * f[:, :-2]
                    + (hp**2 - hm**2) * f[:, 1:-1]) / (hp * hm * (hp + hm))
    out[:, 0] = (f[:, 1] - f[:, 0]) / (x[:, 1] - x[:, 0])
    out[:, -1] = (f[:, -1] - f[:, -2]) / (x[:, -1] - x[:, -2])
    return out


def _nonuniform_second_at(x: np.ndarray, f: np.ndarray, j: int) -> np.ndarray:
    """d^2 f / d x^2 at column j from its two neighbors (per row)."""
    hm = x[:, j] - x[:, j - 1]
    hp = x[:, j + 1] - x[:, j]
    return 2.0 * (hm * f[:, j + 1] + hp * f[:, j - 1]
                  - (hp + hm) * f[:, j]) / (hp * hm * (hp + hm))


@dataclass
class ReconstructionResult:
    times: np.ndarray
    action: np.ndarray          # S along the center
    amplitude: np.ndarray       # R along the center
    curvature_potential: np.ndarray


def reconstruct_along_center(bundle: Bundle, potential: Potential,
                             mass: float, hbar: float, s0: float,
                             r0) -> ReconstructionResult:
    """Integrate the along-path relations for (S, R) on the center.

    ``r0`` gives the initial amplitude near C(0): either a callable
    evaluated at the member start points or an array of shape
    (n_axes, 2k+1) (flat (2k+1,) accepted in 1D). Divergence and amplitude
    curvature are estimated transversely across the bundle chains; in 2D
    the cross-axis divergence at off-center members is approximated by the
    center value (exact for product-structure flows).

    Raises InsufficientBundleError for k < 2 and BundleCrossingError when
    chain ordering breaks mid-window.
    """
    if bundle.k < 2:
        raise InsufficientBundleError(
            f"bundle half-width k = {bundle.k} cannot form the transverse "
            "second-derivative stencil (need k >= 2)"
        )
    if potential is None:
        potential = FreePotential()
    dim = len(bundle.chains)
    times = bundle.times
    n_t = len(times)
    m = 2 * bundle.k + 1
    kc = bundle.k  # center column

    if callable(r0):
        r0_arrays = [np.asarray(r0(pts), dtype=float)
                     for pts in bundle.start_points()]
    else:
        r0_arr = np.asarray(r0, dtype=float)
        if r0_arr.ndim == 1 and dim == 1:
            r0_arr = r0_arr[None, :]
        if r0_arr.shape != (dim, m):
            raise ValueError(f"r0 must have shape ({dim}, {m})")
        r0_arrays = [r0_arr[a] for a in range(dim)]

    # per chain: coordinate along its axis and velocity component along it
    X = []
    V_axis = []
    for a, chain in enumerate(bundle.chains):
        xa = np.stack([t.positions[:, a] for t in chain], axis=1)   # (T, M)
        if np.any(np.diff(xa, axis=1) <= 0):
            raise BundleCrossingError(
                f"chain ordering along axis {a} broke during the window"
            )
        if any(t.velocities is None for t in chain):
            raise ValueError("bundle members must carry recorded velocities")
        va = np.stack([t.velocities[:, a] for t in chain], axis=1)  # (T, M)
        X.append(xa)
        V_axis.append(va)

    dv_own = [_nonuniform_first(X[a], V_axis[a]) for a in range(dim)]
    center_div_terms = [dv_own[a][:, kc] for a in range(dim)]

    # transport ln R along every member; off-axis divergence taken at center
    ln_r = []
    for a in range(dim):
        div_a = dv_own[a].copy()
        for b in range(dim):
            if b != a:
                div_a += center_div_terms[b][:, None]
        rhs = -0.5 * div_a
        ln = np.empty((n_t, m))
        ln[0] = np.log(r0_arrays[a])
        dt_seg = np.diff(times)
        incr = 0.5 * dt_seg[:, None] * (rhs[:-1] + rhs[1:])
        ln[1:] = ln[0] + np.cumsum(incr, axis=0)
        ln_r.append(ln)

    r_center = np.exp(ln_r[0][:, kc])
    lap_r = np.zeros(n_t)
    for a in range(dim):
        lap_r += _nonuniform_second_at(X[a], np.exp(ln_r[a]), kc)
    u_curv = -(hbar**2) / (2.0 * mass) * lap_r / r_center

    v_c = bundle.center.velocities
    kin = 0.5 * mass * np.sum(v_c**2, axis=1)
    v_pot = potential.at(bundle.center.positions)
    ds_dt = kin - v_pot - u_curv
    s = np.empty(n_t)
    s[0] = s0
    dt_seg = np.diff(times)
    s[1:] = s0 + np.cumsum(0.5 * dt_seg * (ds_dt[:-1] + ds_dt[1:]))
    return ReconstructionResult(times=times, action=s, amplitude=r_center,
                                curvature_potential=u_curv)


def classical_reconstruct(traj: Trajectory, potential: Potential | None = None,
                          mass: float = 1.0, s0: float = 0.0):
    """Action along a classical path: S(t) = S(0) + integral of the Lagrangian.

    One trajectory suffices -- no transverse information enters. Velocities
    are taken from the trajectory record (finite differences of positions
    as a fallback).
    """
    if potential is None:
        potential = FreePotential()
    if traj.velocities is not None:
        v = traj.velocities
    else:
        v = np.gradient(traj.positions, traj.times, axis=0)
    lagr = 0.5 * mass * np.sum(v**2, axis=1) - potential.at(traj.positions)
    s = np.empty(len(traj.times))
    s[0] = s0
    dt_seg = np.diff(traj.times)
    s[1:] = s0 + np.cumsum(0.5 * dt_seg * (lagr[:-1] + lagr[1:]))
    return traj.times, s


def polar_along_trajectory(snapshots, traj: Trajectory, hbar: float = 1.0,
                           node_eps: float = 1e-6):
    """Solver-side oracle: (S, R) of the propagated field sampled on a path.

    Each snapshot is polar-decomposed, S and R are cubic-interpolated at the
    path position nearest in time (non-periodic spline; callers keep paths
    mid-box), and the S series is unwrapped in time to remove inter-snapshot
    branch offsets.
    """
    grid = snapshots[0].grid
    snap_times = np.array([s.time for s in snapshots])
    s_out = np.empty(len(traj.times))
    r_out = np.empty(len(traj.times))
    polar_cache = {}
    for i, (t, pos) in enumerate(zip(traj.times, traj.positions)):
        k = int(np.argmin(np.abs(snap_times - t)))
        if k not in polar_cache:
            polar_cache[k] = to_polar(snapshots[k], node_eps=node_eps, hbar=hbar)
        polar = polar_cache[k]
        coords = grid.to_fractional_index(pos)[:, None]
        s_out[i] = ndimage.map_coordinates(polar.S, coords, order=3,
                                           mode="nearest")[0]
        r_out[i] = ndimage.map_coordinates(polar.R, coords, order=3,
                                           mode="nearest")[0]
    s_out = np.unwrap(s_out, period=_TWO_PI * hbar)
    return s_out, r_out


def _relative_l2(rec: np.ndarray, oracle: np.ndarray) -> float:
    spread = float(np.max(oracle) - np.min(oracle))
    scale = spread if spread > 1e-12 * np.max(np.abs(oracle), initial=0.0) \
        else float(np.max(np.abs(oracle)))
    if scale == 0.0:
        scale = 1.0
    return float(np.sqrt(np.mean((rec - oracle) ** 2)) / scale)


@dataclass
class ConvergenceRow:
    delta: float
    k: int
    err_s: float
    err_r: float
    slope: float  # local slope vs previous row; nan for the first


def bundle_convergence(snapshots, x0, k: int, deltas, potential: Potential,
                       mass: float = 1.0, hbar: float = 1.0,
                       dt_traj: float = 0.01,
                       node_eps: float = 1e-6) -> list[ConvergenceRow]:
    """Reconstruction error against the solver oracle for decreasing delta.

    For each spacing the bundle is rebuilt, (S, R) reconstructed on the
    center, and compared to the solver's polar field along the same path.
    All deltas must be grid-resolvable (delta >= 2 dx).
    """
    gf = snapshots if isinstance(snapshots, GuidingField) else \
        GuidingField(snapshots, mass=mass, hbar=hbar, node_eps=node_eps)
    deltas = list(deltas)
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    min_dx = float(np.min(gf.grid.dx))
    if any(d < 2.0 * min_dx for d in deltas):
        raise ValueError("every delta must satisfy delta >= 2 dx")
    raw_snapshots = snapshots if not isinstance(snapshots, GuidingField) else None
    if raw_snapshots is None:
        raise ValueError("bundle_convergence needs the raw snapshot list "
                         "for its oracle")

    polar0 = to_polar(raw_snapshots[0], node_eps=node_eps, hbar=hbar)

    def r0_fn(points):
        coords = gf.grid.to_fractional_index(points).T
        return ndimage.map_coordinates(polar0.R, coords, order=3, mode="nearest")

    def s0_at(point):
        coords = gf.grid.to_fractional_index(point)[:, None]
        return float(ndimage.map_coordinates(polar0.S, coords, order=3,
                                             mode="nearest")[0])

    rows = []
    prev = None
    for delta in deltas:
        bundle = build_bundle(gf, x0, k, delta, dt_traj)
        s0 = s0_at(bundle.center.positions[0])
        rec = reconstruct_along_center(bundle, potential, mass, hbar, s0, r0_fn)
        s_oracle, r_oracle = polar_along_trajectory(raw_snapshots,
                                                    bundle.center, hbar,
                                                    node_eps)
        err_s = _relative_l2(rec.action, s_oracle)
        err_r = _relative_l2(rec.amplitude, r_oracle)
        if prev is None:
            slope = float("nan")
        else:
            d_prev, e_prev = prev
            slope = float(np.log(e_prev / max(err_s, 1e-300))
                          / np.log(d_prev / delta))
        rows.append(ConvergenceRow(delta=float(delta), k=int(k),
                                   err_s=err_s, err_r=err_r, slope=slope))
        prev = (delta, err_s)
    return rows
