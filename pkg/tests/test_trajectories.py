import numpy as np
import pytest

import pilotwave as pw
from oracles import (
    free_gaussian_psi,
    free_gaussian_trajectory,
    free_gaussian_velocity,
)


@pytest.fixture(scope="module")
def circle():
    return pw.SpatialGrid(64, (0.0, 2.0 * np.pi))


def test_plane_wave_velocity_constant(circle):
    psi = pw.plane_wave(circle, 2.0)
    for x in (0.0, 1.3, 5.9):
        v = pw.velocity_at(psi, [x], mass=1.0, hbar=1.0)
        assert abs(v[0] - 2.0) < 1e-9


def test_real_gaussian_velocity_zero(grid1d):
    psi = pw.gaussian_packet(grid1d, 0.0, 1.0)
    v = pw.velocity_at(psi, [0.7])
    assert abs(v[0]) < 1e-10


def test_spreading_gaussian_velocity_matches_analytic(grid1d):
    t, sigma0 = 2.0, 1.0
    q = grid1d.axes[0]
    psi_t = pw.WaveField(grid1d, free_gaussian_psi(q, t, sigma0), time=t)
    for x in (-2.0, -0.5, 0.8, 1.9):
        v = pw.velocity_at(psi_t, [x])[0]
        exact = free_gaussian_velocity(x, t, sigma0)
        assert abs(v - exact) / abs(exact) < 1e-4


def test_velocity_routes_agree_off_nodes(free_gaussian_run):
    last = free_gaussian_run[-1]
    polar = pw.to_polar(last)
    for x in np.linspace(-3.5, 3.5, 15):
        v_wave = pw.velocity_at(last, [x])[0]
        v_phase = pw.velocity_at(polar, [x])[0]
        assert abs(v_wave - v_phase) < 1e-8


def test_node_proximity_raises(circle):
    psi = pw.superpose(pw.plane_wave(circle, 1.0), pw.plane_wave(circle, -1.0))
    with pytest.raises(pw.NodeProximityError):
        pw.velocity_at(psi, [np.pi / 2], node_eps=0.05)


def test_plane_wave_trajectory(circle):
    psi = pw.plane_wave(circle, 2.0)
    snaps = [psi.with_time(t) for t in np.linspace(0.0, 1.0, 11)]
    traj = pw.integrate_trajectory(snaps, [0.5], 0.01)
    assert abs(traj.positions[-1, 0] - 2.5) < 1e-8
    assert traj.status == "completed"


def test_stationary_state_static_trajectory():
    g = pw.SpatialGrid(256, (-16.0, 16.0))
    psi0 = pw.harmonic_ground_state(g, omega=1.0)
    cfg = pw.PropagatorConfig(dt=1e-3, steps=500, snapshot_stride=50)
    snaps = pw.propagate(psi0, pw.HarmonicPotential(1.0), cfg)
    traj = pw.integrate_trajectory(snaps, [0.7], 0.005)
    assert np.max(np.abs(traj.positions - 0.7)) < 1e-6


def test_free_gaussian_trajectory_scales_with_width(free_gaussian_run):
    traj = pw.integrate_trajectory(free_gaussian_run, [1.0], 0.01)
    expected = free_gaussian_trajectory(1.0, 2.0, 1.0)
    assert expected == pytest.approx(np.sqrt(2.0))
    assert abs(traj.positions[-1, 0] - expected) < 1e-3


def test_trajectory_records_velocities(free_gaussian_run):
    traj = pw.integrate_trajectory(free_gaussian_run, [1.0], 0.01)
    assert traj.velocities is not None
    assert traj.velocities.shape == traj.positions.shape
    assert abs(traj.velocities[0, 0]) < 1e-10  # starts at rest


def test_global_phase_invariance(grid1d, rng):
    psi0 = pw.gaussian_packet(grid1d, 0.0, 1.0)
    cfg = pw.PropagatorConfig(dt=1e-3, steps=500, snapshot_stride=50)
    snaps = pw.propagate(psi0, pw.FreePotential(), cfg)
    base = pw.integrate_trajectory(snaps, [1.0], 0.01)
    for _ in range(3):
        alpha = rng.uniform(0.0, 2.0 * np.pi)
        rotated = pw.WaveField(grid1d, psi0.values * np.exp(1j * alpha))
        snaps_r = pw.propagate(rotated, pw.FreePotential(), cfg)
        traj_r = pw.integrate_trajectory(snaps_r, [1.0], 0.01)
        assert np.max(np.abs(traj_r.positions - base.positions)) < 1e-10


def test_ensemble_no_crossing_order_preserved(free_gaussian_run):
    x0 = pw.born_sample(free_gaussian_run[0], 100, seed=3)
    ens = pw.propagate_ensemble(free_gaussian_run, x0, 0.01, record_stride=10)
    assert ens.halted_fraction == 0.0
    order0 = np.argsort(ens.positions[0][:, 0])
    for r in range(len(ens.times)):
        assert np.array_equal(np.argsort(ens.positions[r][:, 0]), order0)


def test_ensemble_equivariance_ks(free_gaussian_run):
    x0 = pw.born_sample(free_gaussian_run[0], 4000, seed=5)
    ens = pw.propagate_ensemble(free_gaussian_run, x0, 0.01, seed=5,
                                sampler="born", record_stride=40)
    rho_t = pw.density(free_gaussian_run[-1])
    ks = pw.ks_statistic(ens.positions[-1][:, 0], rho_t)
    assert ks < 0.02


def test_empty_ensemble(free_gaussian_run):
    ens = pw.propagate_ensemble(free_gaussian_run, np.empty((0, 1)), 0.01)
    assert ens.n == 0
    assert ens.trajectories == []
    assert ens.halted_fraction == 0.0


def test_trajectory_halts_at_node(circle):
    psi = pw.superpose(pw.plane_wave(circle, 1.0), pw.plane_wave(circle, -1.0))
    snaps = [psi.with_time(t) for t in np.linspace(0.0, 1.0, 11)]
    traj = pw.integrate_trajectory(snaps, [np.pi / 2], 0.01, node_eps=0.05)
    assert traj.status == "halted"
    assert traj.halt_time == 0.0
    assert len(traj.times) == 1


def test_divergence_experiment_widths(grid1d):
    cfg = pw.PropagatorConfig(dt=1e-3, steps=2000, snapshot_stride=20)
    snaps_a = pw.propagate(pw.gaussian_packet(grid1d, 0.0, 1.0),
                           pw.FreePotential(), cfg)
    snaps_b = pw.propagate(pw.gaussian_packet(grid1d, 0.0, 2.0),
                           pw.FreePotential(), cfg)
    rep = pw.divergence_experiment(snaps_a, snaps_b, [1.0], 0.01)
    assert rep.final_separation > 0.1
    # oracle: both trajectories scale with their own packet width
    expected = abs(free_gaussian_trajectory(1.0, 2.0, 1.0)
                   - free_gaussian_trajectory(1.0, 2.0, 2.0))
    assert rep.final_separation == pytest.approx(expected, rel=1e-2)


def test_divergence_identical_preparations(grid1d):
    cfg = pw.PropagatorConfig(dt=1e-3, steps=1000, snapshot_stride=20)
    snaps = pw.propagate(pw.gaussian_packet(grid1d, 0.0, 1.0),
                         pw.FreePotential(), cfg)
    rep = pw.divergence_experiment(snaps, snaps, [1.0], 0.01)
    assert np.max(rep.separation) < 1e-12


def test_divergence_global_phase_pair(grid1d):
    psi = pw.gaussian_packet(grid1d, 0.0, 1.0)
    rotated = pw.WaveField(grid1d, psi.values * np.exp(1j * 1.234))
    cfg = pw.PropagatorConfig(dt=1e-3, steps=1000, snapshot_stride=20)
    snaps_a = pw.propagate(psi, pw.FreePotential(), cfg)
    snaps_b = pw.propagate(rotated, pw.FreePotential(), cfg)
    rep = pw.divergence_experiment(snaps_a, snaps_b, [1.0], 0.01)
    assert np.max(rep.separation) < 1e-10


def test_divergence_rejects_mismatched_gradients(grid1d):
    p = 2.0 * np.pi * 16 / 40.0
    cfg = pw.PropagatorConfig(dt=1e-3, steps=100, snapshot_stride=10)
    snaps_a = pw.propagate(pw.gaussian_packet(grid1d, 0.0, 1.0),
                           pw.FreePotential(), cfg)
    snaps_b = pw.propagate(pw.gaussian_packet(grid1d, 0.0, 1.0, momentum=p),
                           pw.FreePotential(), cfg)
    with pytest.raises(pw.PreparationMismatchError):
        pw.divergence_experiment(snaps_a, snaps_b, [0.5], 0.01)


def test_dt_traj_must_not_exceed_snapshot_spacing(free_gaussian_run):
    with pytest.raises(ValueError):
        pw.integrate_trajectory(free_gaussian_run, [0.0], 1.0)


def test_2d_configuration_space_guidance():
    """A 2D grid is the configuration space of two 1D particles (or one 2D
    particle): a product plane wave guides each coordinate independently."""
    g = pw.SpatialGrid((64, 64), ((0.0, 2 * np.pi), (0.0, 2 * np.pi)))
    psi = pw.plane_wave(g, (2.0, -1.0))
    v = pw.velocity_at(psi, [1.0, 4.0])
    assert np.allclose(v, [2.0, -1.0], atol=1e-9)
    snaps = [psi.with_time(t) for t in np.linspace(0.0, 1.0, 11)]
    traj = pw.integrate_trajectory(snaps, [0.5, 0.5], 0.02)
    assert np.allclose(traj.positions[-1], [2.5, -0.5], atol=1e-8)
