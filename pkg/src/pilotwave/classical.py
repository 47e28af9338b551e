"""Classical side of the comparison: analytic action fields, the classical
guiding law dQ/dt = grad(S)/m, probabilistic transport by characteristics,
and the semiclassical sweep.

Two closed-form solutions of the free Hamilton-Jacobi equation are
provided: the plane-wave family S = P.q - P^2 t / 2m + S0 and the circular
family S = m (q - c)^2 / (2t) that emanates from a point (singular at
t = 0, where its gradient encodes no momentum at the center). Both satisfy
the free HJ equation identically; integrated from matched initial data
they generate the same trajectory, which is the classical nonuniqueness
demonstration.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CausticDetectedError, UndefinedGradientError
from .grid import SpatialGrid
from .schrodinger import FreePotential, Potential
from .trajectories import Trajectory


def _as_points(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.ndim == 0:
        return q[None, None]
    if q.ndim == 1:
        return q[None, :]
    return q


class ActionField:
    """Scalar action on configuration space with closed-form partials."""

    form = "custom"

    def evaluate(self, q, t: float) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, q, t: float) -> np.ndarray:
        raise NotImplementedError

    def time_derivative(self, q, t: float) -> np.ndarray:
        raise NotImplementedError

    def gradient_defined(self, q, t: float) -> bool:
        return True


class PlaneWaveAction(ActionField):
    """S(q, t) = P.q - |P|^2 t / (2m) + S0."""

    form = "planeWave"

    def __init__(self, momentum, mass: float = 1.0, offset: float = 0.0):
        self.momentum = np.atleast_1d(np.asarray(momentum, dtype=float))
        self.mass = float(mass)
        self.offset = float(offset)

    def evaluate(self, q, t):
        pts = _as_points(q)
        e = self.momentum.dot(self.momentum) / (2.0 * self.mass)
        return pts @ self.momentum - e * t + self.offset

    def gradient(self, q, t):
        pts = _as_points(q)
        return np.broadcast_to(self.momentum, pts.shape).copy()

    def time_derivative(self, q, t):
        pts = _as_points(q)
        e = self.momentum.dot(self.momentum) / (2.0 * self.mass)
        return np.full(pts.shape[0], -e)


class CircularAction(ActionField):
    """S(q, t) = m |q - center|^2 / (2 t), defined for t > 0 only.

    The gradient m (q - center) / t is undefined at t = 0: started exactly
    there, the field selects no momentum at the center and an explicit P0
    must be supplied to the integrator.
    """

    form = "circular"

    def __init__(self, center, mass: float = 1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.mass = float(mass)

    def _check_time(self, t):
        if t <= 0.0:
            raise UndefinedGradientError(
                f"circular action is singular at t = {t:g} (needs t > 0)"
            )

    def evaluate(self, q, t):
        self._check_time(t)
        pts = _as_points(q)
        r2 = np.sum((pts - self.center) ** 2, axis=1)
        return self.mass * r2 / (2.0 * t)

    def gradient(self, q, t):
        self._check_time(t)
        pts = _as_points(q)
        return self.mass * (pts - self.center) / t

    def time_derivative(self, q, t):
        self._check_time(t)
        pts = _as_points(q)
        r2 = np.sum((pts - self.center) ** 2, axis=1)
        return -self.mass * r2 / (2.0 * t**2)

    def gradient_defined(self, q, t):
        return t > 0.0


class TransportedAction(ActionField):
    """Action sampled along transported characteristics (1D).

    Cubic in space on each record, linear between records. Defined only on
    the convex hull of the characteristic positions within the time window.
    """

    form = "gridTransported"

    def __init__(self, times: np.ndarray, positions: list[np.ndarray],
                 values: list[np.ndarray]):
        self.times = np.asarray(times, dtype=float)
        self._splines = [CubicSpline(x, s) for x, s in zip(positions, values)]
        self._ranges = [(float(x[0]), float(x[-1])) for x in positions]

    def _bracket(self, t):
        if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
            raise UndefinedGradientError(
                f"t = {t:g} outside the transported window "
                f"[{self.times[0]:g}, {self.times[-1]:g}]"
            )
        if len(self.times) == 1:
            return 0, 0.0
        k = int(np.clip(np.searchsorted(self.times, t) - 1, 0, len(self.times) - 2))
        w = (t - self.times[k]) / (self.times[k + 1] - self.times[k])
        return k, float(np.clip(w, 0.0, 1.0))

    def _eval(self, q, t, derivative):
        k, w = self._bracket(t)
        k1 = min(k + 1, len(self.times) - 1)
        pts = _as_points(q)
        x = pts[:, 0]
        for kk in (k, k1):
            lo, hi = self._ranges[kk]
            if np.any(x < lo) or np.any(x > hi):
                raise UndefinedGradientError(
                    "query outside the transported characteristic hull"
                )
        a = self._splines[k](x, derivative)
        b = self._splines[k1](x, derivative)
        return (1 - w) * a + w * b

    def evaluate(self, q, t):
        return self._eval(q, t, 0)

    def gradient(self, q, t):
        return self._eval(q, t, 1)[:, None]

    def time_derivative(self, q, t):
        k, _ = self._bracket(t)
        k1 = min(k + 1, len(self.times) - 1)
        pts = _as_points(q)
        x = pts[:, 0]
        if k1 == k:
            return np.zeros(len(x))
        dt = self.times[k1] - self.times[k]
        return (self._splines[k1](x) - self._splines[k](x)) / dt


@dataclass
class ClassicalState:
    """Initial data (Q0, action) for the classical guiding law.

    ``p0`` may be omitted when the action's gradient is defined at the
    start; when both are given they must agree to 1e-10.
    """

    q0: np.ndarray
    action: ActionField
    p0: np.ndarray | None = None
    t0: float = 0.0

    def __post_init__(self):
        self.q0 = np.atleast_1d(np.asarray(self.q0, dtype=float))
        if self.p0 is not None:
            self.p0 = np.atleast_1d(np.asarray(self.p0, dtype=float))
            if self.action.gradient_defined(self.q0, self.t0):
                g = self.action.gradient(self.q0, self.t0)[0]
                if np.linalg.norm(g - self.p0) >= 1e-10:
                    raise ValueError(
                        f"p0 {self.p0} disagrees with grad S {g} at the start"
                    )


def hj_residual(action: ActionField, q, t, mass: float = 1.0,
                potential: Potential | None = None) -> np.ndarray:
    """Residual of dS/dt + |grad S|^2 / 2m + V at points (q, t scalar)."""
    if potential is None:
        potential = FreePotential()
    pts = _as_points(q)
    grad = action.gradient(pts, t)
    kin = np.sum(grad**2, axis=1) / (2.0 * mass)
    return action.time_derivative(pts, t) + kin + potential.at(pts)


def classical_trajectory(state: ClassicalState, t_end: float, dt: float,
                         record_stride: int = 1) -> Trajectory:
    """RK4 on dQ/dt = grad S(Q, t) / m from (q0, t0) to t_end.

    Where the gradient is undefined (the circular action at t = 0) the
    velocity falls back to p0/m; without p0 this raises
    UndefinedGradientError — the pathological start the circular family is
    known for.
    """
    action = state.action
    mass = getattr(action, "mass", None) or 1.0

    def velocity(q, t):
        if not action.gradient_defined(q, t):
            if state.p0 is None:
                raise UndefinedGradientError(
                    f"action gradient undefined at t = {t:g} and no p0 given"
                )
            return state.p0 / mass
        return action.gradient(q, t)[0] / mass

    span = t_end - state.t0
    if span < 0:
        raise ValueError("t_end must be >= t0")
    n_steps = max(1, int(round(span / dt))) if span > 0 else 0
    dt_eff = span / n_steps if n_steps else 0.0
    q = state.q0.copy()
    times = [state.t0]
    path = [q.copy()]
    vels = [velocity(q, state.t0)]
    for step in range(n_steps):
        t = state.t0 + step * dt_eff
        k1 = velocity(q, t)
        k2 = velocity(q + 0.5 * dt_eff * k1, t + 0.5 * dt_eff)
        k3 = velocity(q + 0.5 * dt_eff * k2, t + 0.5 * dt_eff)
        k4 = velocity(q + dt_eff * k3, t + dt_eff)
        q = q + (dt_eff / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (step + 1) % record_stride == 0 or step + 1 == n_steps:
            t_next = state.t0 + (step + 1) * dt_eff
            times.append(t_next)
            path.append(q.copy())
            vels.append(velocity(q, t_next))
    return Trajectory(np.array(times), np.array(path),
                      velocities=np.array(vels))


@dataclass
class NonuniquenessReport:
    trajectory_plane: Trajectory
    trajectory_circular: Trajectory
    max_deviation: float


def holland_nonuniqueness(momentum, q0, mass: float, t_end: float,
                          t_start: float = 0.1,
                          dt: float = 1e-3) -> NonuniquenessReport:
    """Integrate one mechanical problem under two distinct action functions.

    A free particle leaving q0 with momentum P realizes the line
    Q(t) = q0 + P t / m. Both the plane-wave action and the circular action
    centered on q0 have gradient P everywhere on that line, so the two
    integrations must coincide; the report carries their max deviation.
    The circular branch starts at t_start > 0 to stay off its singularity.
    """
    momentum = np.atleast_1d(np.asarray(momentum, dtype=float))
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    if t_start <= 0 or t_end <= t_start:
        raise ValueError("need t_end > t_start > 0 for the circular branch")
    q_start = q0 + momentum * t_start / mass
    plane = ClassicalState(q_start, PlaneWaveAction(momentum, mass),
                           p0=momentum, t0=t_start)
    circ = ClassicalState(q_start, CircularAction(q0, mass),
                          p0=momentum, t0=t_start)
    traj_p = classical_trajectory(plane, t_end, dt)
    traj_c = classical_trajectory(circ, t_end, dt)
    dev = float(np.max(np.linalg.norm(traj_p.positions - traj_c.positions,
                                      axis=1)))
    return NonuniquenessReport(traj_p, traj_c, dev)


@dataclass
class ClassicalDensity:
    """Probability density of the classical statistical ensemble on a grid."""

    grid: SpatialGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("density shape does not match grid")
        if np.any(self.values < 0):
            raise ValueError("density must be non-negative")

    def mass(self) -> float:
        return self.grid.integrate(self.values)


@dataclass
class TransportResult:
    densities: list[ClassicalDensity]
    action: TransportedAction
    min_jacobian: float


def transport_classical(density0: ClassicalDensity, action: ActionField,
                        t_end: float, dt: float, n_records: int = 9,
                        potential: Potential | None = None,
                        t_start: float = 0.0,
                        jacobian_floor: float = 1e-8) -> TransportResult:
    """Carry a 1D density and its action along classical characteristics.

    Characteristics start on the grid nodes and obey dQ/dt = grad S / m;
    the density transports as rho(Q(t), t) = rho0 / J with J the stretch of
    the characteristic map, and S rides along via dS/dt = L. Records are
    resampled onto the grid with cubic splines (zero outside the
    characteristic hull, which must stay inside the box for mass to be
    conserved). A Jacobian falling below ``jacobian_floor`` means a
    caustic: CausticDetectedError is raised carrying the partial result.
    """
    grid = density0.grid
    if grid.dim != 1:
        raise NotImplementedError("characteristic transport is 1D")
    if potential is None:
        potential = FreePotential()
    mass_p = getattr(action, "mass", None) or 1.0
    q_nodes = grid.axes[0].copy()
    span = t_end - t_start
    n_steps = max(1, int(round(span / dt))) if span > 0 else 0
    record_every = max(1, n_steps // max(1, n_records - 1)) if n_steps else 1

    x = q_nodes.copy()
    s = np.asarray(action.evaluate(q_nodes[:, None], t_start), dtype=float)

    def rhs(xv, t):
        g = action.gradient(xv[:, None], t)[:, 0]
        v = g / mass_p
        lagr = 0.5 * mass_p * v**2 - potential.at(xv[:, None])
        return v, lagr

    rec_times = [t_start]
    rec_x = [x.copy()]
    rec_s = [s.copy()]
    densities = [ClassicalDensity(grid, density0.values.copy(), t_start)]
    min_jac = 1.0

    def resample(xc, vals, outside=0.0):
        spline = CubicSpline(xc, vals)
        out = np.full(grid.shape[0], outside)
        inside = (q_nodes >= xc[0]) & (q_nodes <= xc[-1])
        out[inside] = spline(q_nodes[inside])
        return out

    def caustic(reason):
        partial = TransportResult(
            densities, TransportedAction(np.array(rec_times), rec_x, rec_s),
            min_jac)
        raise CausticDetectedError(reason, partial=partial)

    for step in range(n_steps):
        t = t_start + step * span / n_steps
        h = span / n_steps
        with np.errstate(all="ignore"):
            v1, l1 = rhs(x, t)
            v2, l2 = rhs(x + 0.5 * h * v1, t + 0.5 * h)
            v3, l3 = rhs(x + 0.5 * h * v2, t + 0.5 * h)
            v4, l4 = rhs(x + h * v3, t + h)
            x = x + (h / 6.0) * (v1 + 2 * v2 + 2 * v3 + v4)
            s = s + (h / 6.0) * (l1 + 2 * l2 + 2 * l3 + l4)
        t_now = t_start + (step + 1) * span / n_steps
        if not np.all(np.isfinite(x)):
            caustic(f"characteristics became non-finite near t = {t_now:g} "
                    "(caustic crossed within one step)")
        jac = np.gradient(x, q_nodes)
        jmin = float(np.min(jac))
        min_jac = min(min_jac, jmin)
        if jmin < jacobian_floor:
            caustic(
                f"characteristic Jacobian fell to {jmin:.3e} at t = {t_now:g}")
        if (step + 1) % record_every == 0 or step + 1 == n_steps:
            rho_c = density0.values / jac
            densities.append(ClassicalDensity(grid, np.maximum(
                resample(x, rho_c), 0.0), t_now))
            rec_times.append(t_now)
            rec_x.append(x.copy())
            rec_s.append(s.copy())
    return TransportResult(densities,
                           TransportedAction(np.array(rec_times), rec_x, rec_s),
                           min_jac)


@dataclass
class SemiclassicalSweep:
    hbars: list[float]
    errors: list[float]

    @property
    def monotone_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))


def semiclassical_compare(psi_family: dict[float, "WaveField"],
                          classical_state: ClassicalState,
                          potential: Potential, t_end: float, dt: float,
                          dt_traj: float, snapshot_stride: int,
                          mass: float = 1.0,
                          assert_monotone: bool = False) -> SemiclassicalSweep:
    """Max trajectory distance between guided and classical motion per hbar.

    Each family member shares the initial amplitude and action with the
    classical preparation; only the dynamics scale with hbar. Entries run
    in decreasing-hbar order; with ``assert_monotone`` a non-decreasing
    error curve raises ValueError.
    """
    from .errors import PreparationMismatchError
    from .schrodinger import PropagatorConfig, propagate
    from .trajectories import integrate_trajectory, velocity_at

    hbars = sorted(psi_family, reverse=True)
    c_traj = classical_trajectory(classical_state, t_end, dt_traj)
    errors = []
    for hbar in hbars:
        # the family must share the classical preparation's phase gradient
        p_psi = mass * velocity_at(psi_family[hbar], classical_state.q0,
                                   mass=mass, hbar=hbar)
        if classical_state.action.gradient_defined(classical_state.q0,
                                                   classical_state.t0):
            p_cls = classical_state.action.gradient(classical_state.q0,
                                                    classical_state.t0)[0]
        elif classical_state.p0 is not None:
            p_cls = classical_state.p0
        else:
            raise UndefinedGradientError(
                "classical preparation has no momentum at the start point")
        if np.max(np.abs(p_psi - p_cls)) > 1e-6:
            raise PreparationMismatchError(
                f"family member hbar={hbar:g} has phase gradient {p_psi} at "
                f"q0, classical action gives {p_cls}"
            )
        cfg = PropagatorConfig(dt=dt, steps=int(round(t_end / dt)), hbar=hbar,
                               mass=mass, snapshot_stride=snapshot_stride)
        snaps = propagate(psi_family[hbar], potential, cfg)
        traj = integrate_trajectory(snaps, classical_state.q0, dt_traj,
                                    mass=mass, hbar=hbar)
        if traj.halted:
            raise ValueError(
                f"guided trajectory halted at t = {traj.halt_time:g} for "
                f"hbar = {hbar:g}; start the comparison inside the packet"
            )
        qc = np.array([
            np.interp(t, c_traj.times, c_traj.positions[:, a])
            for t in traj.times for a in range(traj.positions.shape[1])
        ]).reshape(len(traj.times), -1)
        errors.append(float(np.max(np.linalg.norm(traj.positions - qc, axis=1))))
    sweep = SemiclassicalSweep(hbars, errors)
    if assert_monotone and not sweep.monotone_decreasing:
        raise ValueError(f"semiclassical error curve is not decreasing: {errors}")
    return sweep
