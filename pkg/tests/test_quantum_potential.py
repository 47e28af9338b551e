import numpy as np
import pytest

import pilotwave as pw
from oracles import gaussian_curvature_potential


@pytest.fixture(scope="module")
def gaussian_polar():
    g = pw.SpatialGrid(1024, (-20.0, 20.0))
    return pw.to_polar(pw.gaussian_packet(g, 0.0, 1.0))


def test_plane_wave_curvature_vanishes():
    g = pw.SpatialGrid(256, (0.0, 2.0 * np.pi))
    pol = pw.to_polar(pw.plane_wave(g, 2.0))
    u = pw.quantum_potential(pol, 1.0, 1.0)
    assert np.max(np.abs(u.values)) < 1e-10


def test_gaussian_matches_symbolic_oracle(gaussian_polar):
    u = pw.quantum_potential(gaussian_polar, 1.0, 1.0)
    q = gaussian_polar.grid.axes[0]
    oracle = gaussian_curvature_potential(q, 1.0)
    interior = np.abs(q) < 6.0
    rel = np.max(np.abs(u.values - oracle)[interior]) / np.max(np.abs(oracle[interior]))
    assert rel < 1e-6


def test_invariant_under_global_phase(grid1d, rng):
    psi = pw.gaussian_packet(grid1d, 0.0, 1.0)
    base = pw.quantum_potential(pw.to_polar(psi), 1.0, 1.0)
    ok = ~base.mask if base.mask is not None else slice(None)
    for _ in range(5):
        alpha = rng.uniform(0, 2 * np.pi)
        rotated = pw.WaveField(grid1d, psi.values * np.exp(1j * alpha))
        u = pw.quantum_potential(pw.to_polar(rotated), 1.0, 1.0)
        assert np.max(np.abs(u.values[ok] - base.values[ok])) < 1e-12


def test_hbar_squared_scaling_exact(gaussian_polar):
    u_full = pw.quantum_potential(gaussian_polar, 1.0, hbar=1.0)
    u_half = pw.quantum_potential(gaussian_polar, 1.0, hbar=0.5)
    ok = ~u_full.mask if u_full.mask is not None else slice(None)
    assert np.max(np.abs(u_half.values[ok] - 0.25 * u_full.values[ok])) <= 1e-12


def test_node_region_masked_finite_elsewhere():
    g = pw.SpatialGrid(512, (0.0, 2.0 * np.pi))
    psi = pw.superpose(pw.plane_wave(g, 1.0), pw.plane_wave(g, -1.0))
    pol = pw.to_polar(psi, node_eps=float(g.dx[0]))
    u = pw.quantum_potential(pol, 1.0, 1.0)
    assert u.mask is not None
    assert u.mask.any()
    # mask dilates over the stencil reach around every node cell
    assert np.all(u.mask[np.where(pol.node_mask)[0]])
    off = ~u.mask
    assert np.all(np.isfinite(u.values[off]))
    assert np.all(np.isnan(u.values[u.mask]))


def test_mass_must_be_positive(gaussian_polar):
    with pytest.raises(ValueError):
        pw.quantum_potential(gaussian_polar, mass=0.0)
