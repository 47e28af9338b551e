"""Config-driven experiment registry and runner.

Each scenario is a named, reproducible experiment: a strict config schema
(unknown keys rejected with their dotted path, numeric ranges validated
before any allocation), a runner that writes CSV artifacts plus a
machine-readable ``report.json``, and an explicit list of checks -- every
invariant a scenario verifies appears in the report with its measured
value, pass/fail, and threshold. Physics parameters carry no code-side
defaults; the committed example configs under ``configs/`` are the
canonical parameter sets.
"""

import json
import os
from dataclasses import asdict, dataclass

import numpy as np
import yaml

from . import io as pwio
from .classical import (
    CircularAction,
    ClassicalState,
    PlaneWaveAction,
    classical_trajectory,
    hj_residual,
    holland_nonuniqueness,
    semiclassical_compare,
)
from .errors import ConfigError, InsufficientBundleError, ScenarioFailure
from .fields import density
from .grid import SpatialGrid
from .reconstruction import (
    build_bundle,
    bundle_convergence,
    classical_reconstruct,
    reconstruct_along_center,
)
from .sampling import born_sample, uniform_sample
from .schrodinger import (
    FreePotential,
    HarmonicPotential,
    PropagatorConfig,
    continuity_residual,
    edge_band_max,
    propagate,
)
from .states import double_slit_state, gaussian_packet
from .stats import chi_square_gof, ks_statistic
from .trajectories import (
    count_axis_crossings,
    divergence_experiment,
    propagate_ensemble,
    velocity_at,
)

OUTPUT_ROOT_ENV = "PILOTWAVE_OUTPUT_ROOT"


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: str


# ---------------------------------------------------------------------------
# config schema machinery

class Key:
    """One config leaf: expected type, optional range check, optional choices."""

    def __init__(self, type_, required=True, check=None, choices=None,
                 describe=""):
        self.type_ = type_
        self.required = required
        self.check = check
        self.choices = choices
        self.describe = describe


def _type_ok(value, type_):
    if type_ is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_ is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if type_ is bool:
        return isinstance(value, bool)
    if type_ is str:
        return isinstance(value, str)
    if isinstance(type_, tuple) and type_[0] == "list":
        return (isinstance(value, list)
                and all(_type_ok(v, type_[1]) for v in value))
    raise TypeError(f"unsupported schema type {type_!r}")


def validate_section(cfg, schema, path=""):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path or 'config'} must be a mapping", path=path)
    for key in cfg:
        if key not in schema:
            full = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown key `{full}`", path=full)
    for key, spec in schema.items():
        full = f"{path}.{key}" if path else key
        if isinstance(spec, dict):
            if key not in cfg:
                raise ConfigError(f"missing section `{full}`", path=full)
            validate_section(cfg[key], spec, full)
            continue
        if key not in cfg:
            if spec.required:
                raise ConfigError(f"missing key `{full}`", path=full)
            continue
        value = cfg[key]
        if not _type_ok(value, spec.type_):
            raise ConfigError(
                f"`{full}` has wrong type (expected {spec.type_})", path=full)
        if spec.choices is not None and value not in spec.choices:
            raise ConfigError(
                f"`{full}` must be one of {spec.choices}", path=full)
        if spec.check is not None and not spec.check(value):
            raise ConfigError(f"`{full}` out of range: {value!r}", path=full)


_positive = lambda v: v > 0
_non_negative = lambda v: v >= 0

_GRID = {
    "n": Key(int, check=lambda v: v >= 16),
    "qmin": Key(float),
    "qmax": Key(float),
    "dim": Key(int, choices=(1,)),
}
_PHYSICS = {
    "hbar": Key(float, check=_positive),
    "mass": Key(float, check=_positive),
    "potential": {
        "kind": Key(str, choices=("free", "harmonic")),
        "omega": Key(float, required=False, check=_positive),
    },
}
_RUN_FULL = {
    "dt": Key(float, check=_positive),
    "T": Key(float, check=_positive),
    "snapshot_stride": Key(int, check=_positive),
    "dt_traj": Key(float, check=_positive),
    "monitor_edges": Key(bool, required=False),
}
_ENSEMBLE = {
    "N": Key(int, check=_positive),
    "sampler": Key(str, choices=("born", "uniform")),
    "seed": Key(int, check=_non_negative),
}
_OUTPUT = {
    "directory": Key(str),
    "formats": Key(("list", str), required=False),
}


def _build_grid(cfg):
    return SpatialGrid(cfg["grid"]["n"], (cfg["grid"]["qmin"], cfg["grid"]["qmax"]))


def _build_potential(cfg):
    pot = cfg["physics"]["potential"]
    if pot["kind"] == "free":
        return FreePotential()
    if "omega" not in pot:
        raise ConfigError("harmonic potential needs `physics.potential.omega`",
                          path="physics.potential.omega")
    return HarmonicPotential(pot["omega"], mass=cfg["physics"]["mass"])


def _prop_config(cfg, check_stride=True):
    run = cfg["run"]
    steps = int(round(run["T"] / run["dt"]))
    if abs(steps * run["dt"] - run["T"]) > 1e-9 * run["T"]:
        raise ConfigError("run.T must be an integer multiple of run.dt",
                          path="run.T")
    if check_stride and steps % run["snapshot_stride"] != 0:
        raise ConfigError("run.snapshot_stride must divide the step count",
                          path="run.snapshot_stride")
    return PropagatorConfig(
        dt=run["dt"], steps=steps, hbar=cfg["physics"]["hbar"],
        mass=cfg["physics"]["mass"], snapshot_stride=run["snapshot_stride"],
        monitor_edges=run.get("monitor_edges", False),
    )


def _sample(psi0, cfg):
    ens = cfg["ensemble"]
    if ens["sampler"] == "born":
        return born_sample(psi0, ens["N"], ens["seed"])
    return uniform_sample(psi0.grid, ens["N"], ens["seed"])


def _record_stride(cfg):
    run = cfg["run"]
    snap_dt = run["snapshot_stride"] * run["dt"]
    ratio = snap_dt / run["dt_traj"]
    if abs(ratio - round(ratio)) > 1e-9:
        raise ConfigError(
            "run.dt_traj must divide the snapshot spacing so ensemble "
            "records align with dump times", path="run.dt_traj")
    return int(round(ratio))


# ---------------------------------------------------------------------------
# scenario runners (each returns (checks, artifact relative paths))

def _run_equivariance(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    psi0 = gaussian_packet(grid, st["center"], st["sigma"],
                           momentum=st.get("momentum"),
                           hbar=cfg["physics"]["hbar"])
    pot = _build_potential(cfg)
    pcfg = _prop_config(cfg)
    snaps = propagate(psi0, pot, pcfg)
    x0 = _sample(psi0, cfg)
    stat, dof, p_val = chi_square_gof(x0[:, 0], density(psi0))
    ens = propagate_ensemble(snaps, x0, cfg["run"]["dt_traj"],
                             mass=pcfg.mass, hbar=pcfg.hbar,
                             record_stride=_record_stride(cfg),
                             seed=cfg["ensemble"]["seed"],
                             sampler=cfg["ensemble"]["sampler"])
    ks_rows = []
    worst_ks = 0.0
    for r, t in enumerate(ens.times):
        k = int(np.argmin(np.abs(np.array([s.time for s in snaps]) - t)))
        alive = ens.alive_at(r)
        ks = ks_statistic(ens.positions[r][alive, 0], density(snaps[k]))
        worst_ks = max(worst_ks, ks)
        ks_rows.append((t, ks, ens.halted_fraction))
    checks = [
        Check("born_sampling_gof_p", p_val > 0.01, p_val, "> 0.01"),
        Check("ks_all_dump_times", worst_ks < 0.02, worst_ks, "< 0.02"),
        Check("norm_drift", abs(snaps[-1].norm() - 1.0) < 1e-10,
              abs(snaps[-1].norm() - 1.0), "< 1e-10"),
        Check("edge_leak", edge_band_max(snaps[-1].values, grid, 0.10) < 1e-10,
              edge_band_max(snaps[-1].values, grid, 0.10), "< 1e-10"),
    ]
    pwio.dump_ensemble_stats(out / "ensemble_stats.csv", ks_rows)
    pwio.dump_trajectories(out / "trajectories.csv",
                           [ens.trajectory(i) for i in range(min(100, ens.n))])
    pwio.dump_wave_field(out / "field_initial.csv", snaps[0])
    pwio.dump_wave_field(out / "field_final.csv", snaps[-1])
    return checks, ["ensemble_stats.csv", "trajectories.csv",
                    "field_initial.csv", "field_final.csv"]


def _run_holland(cfg, out):
    cl = cfg["classical"]
    rep = holland_nonuniqueness(cl["momentum"], cl["q0"],
                                cfg["physics"]["mass"], cfg["run"]["T"],
                                t_start=cl["t_start"], dt=cfg["run"]["dt"])
    rng = np.random.default_rng(cl["seed"])
    pts = rng.uniform(cl["q0"] - 5.0, cl["q0"] + 5.0, (1000, 1))
    ts = rng.uniform(cl["t_start"], cfg["run"]["T"], 1000)
    plane = PlaneWaveAction([cl["momentum"]], cfg["physics"]["mass"])
    circ = CircularAction([cl["q0"]], cfg["physics"]["mass"])
    res_p = max(abs(float(hj_residual(plane, pts[i], float(ts[i]))[0]))
                for i in range(1000))
    res_c = max(abs(float(hj_residual(circ, pts[i], float(ts[i]))[0]))
                for i in range(1000))
    checks = [
        Check("trajectory_max_deviation", rep.max_deviation < 1e-8,
              rep.max_deviation, "< 1e-8"),
        Check("hj_residual_plane_wave", res_p < 1e-10, res_p, "< 1e-10"),
        Check("hj_residual_circular", res_c < 1e-10, res_c, "< 1e-10"),
    ]
    pwio.dump_trajectories(out / "trajectory_plane.csv", [rep.trajectory_plane])
    pwio.dump_trajectories(out / "trajectory_circular.csv",
                           [rep.trajectory_circular])
    return checks, ["trajectory_plane.csv", "trajectory_circular.csv"]


def _run_p2_divergence(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    hbar, mass = cfg["physics"]["hbar"], cfg["physics"]["mass"]
    psi_a = gaussian_packet(grid, st["center"], st["sigma_a"], hbar=hbar)
    psi_b = gaussian_packet(grid, st["center"], st["sigma_b"], hbar=hbar)
    pot = _build_potential(cfg)
    pcfg = _prop_config(cfg)
    snaps_a = propagate(psi_a, pot, pcfg)
    snaps_b = propagate(psi_b, pot, pcfg)
    rep = divergence_experiment(snaps_a, snaps_b, [st["q0"]],
                                cfg["run"]["dt_traj"], mass=mass, hbar=hbar)
    # matched classical pair: each preparation reduces to the action-level
    # data (q0, grad S(q0)) measured from its own field; identical data,
    # identical motion
    p0_a = mass * velocity_at(psi_a, [st["q0"]], mass=mass, hbar=hbar)
    p0_b = mass * velocity_at(psi_b, [st["q0"]], mass=mass, hbar=hbar)
    ca = classical_trajectory(
        ClassicalState([st["q0"]], PlaneWaveAction(p0_a, mass), p0=p0_a),
        cfg["run"]["T"], cfg["run"]["dt_traj"])
    cb = classical_trajectory(
        ClassicalState([st["q0"]], PlaneWaveAction(p0_b, mass), p0=p0_b),
        cfg["run"]["T"], cfg["run"]["dt_traj"])
    sep_classical = float(np.max(np.abs(ca.positions - cb.positions)))
    checks = [
        Check("quantum_separation_final", rep.final_separation > 0.1,
              rep.final_separation, "> 0.1"),
        Check("classical_separation", sep_classical < 1e-8, sep_classical,
              "< 1e-8"),
    ]
    pwio.dump_table(out / "separation.csv", ["t", "separation"],
                    list(zip(rep.times, rep.separation)))
    pwio.dump_trajectories(out / "trajectories.csv",
                           [rep.trajectory_a, rep.trajectory_b])
    return checks, ["separation.csv", "trajectories.csv"]


def _run_double_slit(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    hbar, mass = cfg["physics"]["hbar"], cfg["physics"]["mass"]
    psi0 = double_slit_state(grid, st["separation"], st["width"], hbar=hbar)
    rho0 = density(psi0).values
    sym_err = float(np.max(np.abs(rho0 - np.roll(rho0[::-1], 1))))
    pcfg = _prop_config(cfg)
    snaps = propagate(psi0, _build_potential(cfg), pcfg)
    x0 = _sample(psi0, cfg)
    ens = propagate_ensemble(snaps, x0, cfg["run"]["dt_traj"], mass=mass,
                             hbar=hbar, record_stride=_record_stride(cfg),
                             seed=cfg["ensemble"]["seed"],
                             sampler=cfg["ensemble"]["sampler"])
    mid = float(0.5 * (grid.qmin[0] + grid.qmax[0]))
    crossings = count_axis_crossings(ens, mid)
    rho_t = density(snaps[-1])
    ks_final = ks_statistic(ens.positions[-1][ens.alive_at(-1), 0], rho_t)

    hist_cfg = cfg["histogram"]
    edges = np.linspace(hist_cfg["qmin"], hist_cfg["qmax"],
                        hist_cfg["bins"] + 1)
    hist, _ = np.histogram(ens.positions[-1][:, 0], bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    bin_w = edges[1] - edges[0]
    h_peaks = [centers[i] for i in range(1, len(hist) - 1)
               if hist[i] >= hist[i - 1] and hist[i] > hist[i + 1]
               and hist[i] > 0.15 * hist.max()]
    v = rho_t.values
    d_peaks = [grid.axes[0][i] for i in range(1, len(v) - 1)
               if v[i] > v[i - 1] and v[i] > v[i + 1] and v[i] > 0.1 * v.max()]
    matched = sum(1 for h in h_peaks
                  if d_peaks and min(abs(h - d) for d in d_peaks) <= bin_w)
    norm_drift = abs(snaps[-1].norm() - 1.0)
    checks = [
        Check("initial_symmetry", sym_err < 1e-12, sym_err, "< 1e-12"),
        Check("axis_crossings", crossings == 0, float(crossings), "== 0"),
        Check("ks_final", ks_final < 0.02, ks_final, "< 0.02"),
        Check("interference_maxima_matched", matched >= 3, float(matched),
              ">= 3 within one bin"),
        Check("norm_drift", norm_drift < 1e-10, norm_drift, "< 1e-10"),
    ]
    ks_rows = []
    for r, t in enumerate(ens.times):
        k = int(np.argmin(np.abs(np.array([s.time for s in snaps]) - t)))
        alive = ens.alive_at(r)
        ks_rows.append((t, ks_statistic(ens.positions[r][alive, 0],
                                        density(snaps[k])),
                        ens.halted_fraction))
    pwio.dump_ensemble_stats(out / "ensemble_stats.csv", ks_rows)
    pwio.dump_table(out / "histogram.csv", ["q", "count"],
                    list(zip(centers, hist.astype(float))))
    pwio.dump_wave_field(out / "field_final.csv", snaps[-1])
    return checks, ["ensemble_stats.csv", "histogram.csv", "field_final.csv"]


def _run_semiclassical(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    mass = cfg["physics"]["mass"]
    hbars = cfg["physics"]["hbars"]
    family = {h: gaussian_packet(grid, st["center"], st["sigma"],
                                 momentum=st["momentum"], hbar=h)
              for h in hbars}
    state = ClassicalState([st["q0"]], PlaneWaveAction([st["momentum"]], mass),
                           p0=[st["momentum"]])
    sweep = semiclassical_compare(family, state, _build_potential(cfg),
                                  cfg["run"]["T"], cfg["run"]["dt"],
                                  cfg["run"]["dt_traj"],
                                  cfg["run"]["snapshot_stride"], mass=mass)
    gaps = [a - b for a, b in zip(sweep.errors, sweep.errors[1:])]
    checks = [
        Check("error_strictly_decreasing", sweep.monotone_decreasing,
              min(gaps) if gaps else float("nan"), "> 0 per hbar halving"),
    ]
    pwio.dump_table(out / "errors.csv", ["hbar", "max_trajectory_error"],
                    list(zip(sweep.hbars, sweep.errors)))
    return checks, ["errors.csv"]


def _run_reconstruction(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    hbar, mass = cfg["physics"]["hbar"], cfg["physics"]["mass"]
    psi0 = gaussian_packet(grid, st["center"], st["sigma"], hbar=hbar)
    pot = _build_potential(cfg)
    snaps = propagate(psi0, pot, _prop_config(cfg))
    bcfg = cfg["bundle"]
    rows = bundle_convergence(snaps, [bcfg["x0"]], bcfg["k"], bcfg["deltas"],
                              pot, mass=mass, hbar=hbar,
                              dt_traj=cfg["run"]["dt_traj"])
    errs = [r.err_s for r in rows]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))

    single = build_bundle(snaps, [bcfg["x0"]], 0, bcfg["deltas"][-1],
                          cfg["run"]["dt_traj"], mass=mass, hbar=hbar)
    try:
        reconstruct_along_center(single, pot, mass, hbar, 0.0,
                                 lambda pts: np.ones(len(pts)))
        k0_refused = False
    except InsufficientBundleError:
        k0_refused = True

    p0 = cfg["classical"]["momentum"]
    cstate = ClassicalState([cfg["classical"]["q0"]],
                            PlaneWaveAction([p0], mass), p0=[p0])
    ctraj = classical_trajectory(cstate, cfg["run"]["T"], cfg["run"]["dt_traj"])
    _, s_line = classical_reconstruct(ctraj, pot, mass, s0=0.0)
    action = PlaneWaveAction([p0], mass)
    s_oracle = np.array([
        float(action.evaluate(ctraj.positions[i], ctraj.times[i])[0]
              - action.evaluate(ctraj.positions[0], ctraj.times[0])[0])
        for i in range(len(ctraj.times))
    ])
    classical_err = float(np.max(np.abs(s_line - s_oracle)))
    checks = [
        Check("classical_single_trajectory_matches_action",
              classical_err < 1e-8, classical_err, "< 1e-8"),
        Check("k0_insufficient_bundle", k0_refused, float(k0_refused),
              "raises"),
        Check("bundle_error_strictly_decreasing", decreasing,
              min(a - b for a, b in zip(errs, errs[1:])) if len(errs) > 1
              else float("nan"), "> 0 per delta step"),
    ]
    pwio.dump_convergence_table(out / "convergence.csv", rows)
    return checks, ["convergence.csv"]


def _run_continuity(cfg, out):
    grid = _build_grid(cfg)
    st = cfg["state"]
    psi0 = gaussian_packet(grid, st["center"], st["sigma"],
                           momentum=st.get("momentum"),
                           hbar=cfg["physics"]["hbar"])
    pot = _build_potential(cfg)

    def max_residual(dt):
        steps = int(round(cfg["run"]["T"] / dt))
        pcfg = PropagatorConfig(dt=dt, steps=steps,
                                hbar=cfg["physics"]["hbar"],
                                mass=cfg["physics"]["mass"],
                                snapshot_stride=1)
        snaps = propagate(psi0, pot, pcfg)
        res = continuity_residual(snaps, cfg["physics"]["mass"],
                                  cfg["physics"]["hbar"])
        return snaps, res

    snaps, res = max_residual(cfg["run"]["dt"])
    _, res_half = max_residual(cfg["run"]["dt"] / 2.0)
    r0, r1 = float(np.max(res)), float(np.max(res_half))
    ratio = r0 / r1
    checks = [
        Check("residual_max", r0 < 1e-4, r0, "< 1e-4"),
        Check("self_convergence_ratio", 3.2 <= ratio <= 4.8, ratio,
              "in [3.2, 4.8]"),
    ]
    rows = [(snaps[i + 1].time, float(res[i])) for i in range(len(res))]
    pwio.dump_table(out / "residuals.csv", ["t", "residual"], rows)
    return checks, ["residuals.csv"]


# ---------------------------------------------------------------------------
# registry

_STATE_GAUSSIAN = {
    "sigma": Key(float, check=_positive),
    "center": Key(float),
    "momentum": Key(float, required=False),
}

REGISTRY = {
    "continuity-residual": {
        "claim": "local probability conservation holds at second order in dt",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": _PHYSICS,
            "state": _STATE_GAUSSIAN,
            "run": {"dt": Key(float, check=_positive),
                    "T": Key(float, check=_positive)},
            "output": _OUTPUT,
        },
        "runner": _run_continuity,
    },
    "double-slit-nocross": {
        "claim": "two-branch interference: no trajectory crosses the symmetry axis",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": _PHYSICS,
            "state": {"separation": Key(float, check=_positive),
                      "width": Key(float, check=_positive)},
            "run": _RUN_FULL,
            "ensemble": _ENSEMBLE,
            "histogram": {"qmin": Key(float), "qmax": Key(float),
                          "bins": Key(int, check=lambda v: v >= 10)},
            "output": _OUTPUT,
        },
        "runner": _run_double_slit,
    },
    "equivariance-free-gaussian": {
        "claim": "born-distributed ensembles keep tracking |psi|^2 under the flow",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": _PHYSICS,
            "state": _STATE_GAUSSIAN,
            "run": _RUN_FULL,
            "ensemble": _ENSEMBLE,
            "output": _OUTPUT,
        },
        "runner": _run_equivariance,
    },
    "holland-nonuniqueness": {
        "claim": "two distinct free action functions guide one classical path",
        "schema": {
            "scenario": Key(str),
            "physics": {"hbar": Key(float, check=_positive),
                        "mass": Key(float, check=_positive)},
            "classical": {"momentum": Key(float), "q0": Key(float),
                          "t_start": Key(float, check=_positive),
                          "seed": Key(int, check=_non_negative)},
            "run": {"dt": Key(float, check=_positive),
                    "T": Key(float, check=_positive)},
            "output": _OUTPUT,
        },
        "runner": _run_holland,
    },
    "p2-divergence": {
        "claim": "same start and phase gradient, different amplitudes: guided "
                 "paths split while the classical pair stays together",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": _PHYSICS,
            "state": {"sigma_a": Key(float, check=_positive),
                      "sigma_b": Key(float, check=_positive),
                      "center": Key(float), "q0": Key(float)},
            "run": _RUN_FULL,
            "output": _OUTPUT,
        },
        "runner": _run_p2_divergence,
    },
    "reconstruction-bundle": {
        "claim": "amplitude and action along a path need a neighborhood "
                 "bundle; one classical path reconstructs its own action",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": _PHYSICS,
            "state": _STATE_GAUSSIAN,
            "bundle": {"x0": Key(float), "k": Key(int, check=lambda v: v >= 2),
                       "deltas": Key(("list", float),
                                     check=lambda v: len(v) >= 2)},
            "classical": {"momentum": Key(float), "q0": Key(float)},
            "run": _RUN_FULL,
            "output": _OUTPUT,
        },
        "runner": _run_reconstruction,
    },
    "semiclassical-sweep": {
        "claim": "the guided-vs-classical trajectory gap shrinks as hbar drops",
        "schema": {
            "scenario": Key(str),
            "grid": _GRID,
            "physics": {"mass": Key(float, check=_positive),
                        "hbars": Key(("list", float),
                                     check=lambda v: len(v) >= 2
                                     and all(x > 0 for x in v)),
                        "potential": {
                            "kind": Key(str, choices=("free", "harmonic")),
                            "omega": Key(float, required=False,
                                         check=_positive)}},
            "state": {"sigma": Key(float, check=_positive),
                      "center": Key(float), "momentum": Key(float),
                      "q0": Key(float)},
            "run": _RUN_FULL,
            "output": _OUTPUT,
        },
        "runner": _run_semiclassical,
    },
}


def load_config(path) -> dict:
    with open(path) as fh:
        cfg = yaml.safe_load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config file must contain a mapping")
    return cfg


def validate_config(cfg: dict) -> str:
    """Full strict validation; returns the scenario name."""
    name = cfg.get("scenario")
    if not isinstance(name, str) or name not in REGISTRY:
        raise ConfigError(
            f"unknown scenario {name!r} (see `pilotwave list`)",
            path="scenario")
    validate_section(cfg, REGISTRY[name]["schema"])
    return name


def _required_keys(schema, prefix=""):
    out = []
    for key, spec in schema.items():
        full = f"{prefix}.{key}" if prefix else key
        if isinstance(spec, dict):
            out.extend(_required_keys(spec, full))
        elif spec.required:
            out.append(full)
    return out


def list_scenarios() -> str:
    """Stable, sorted registry listing with claims and required keys."""
    lines = []
    for name in sorted(REGISTRY):
        entry = REGISTRY[name]
        lines.append(f"{name}")
        lines.append(f"    {entry['claim']}")
        lines.append("    required: " + ", ".join(
            _required_keys(entry["schema"])))
    return "\n".join(lines)


def resolve_output_dir(cfg: dict):
    from pathlib import Path

    directory = Path(cfg["output"]["directory"])
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not directory.is_absolute():
        directory = Path(root) / directory
    return directory


def run_scenario(cfg: dict, out_dir=None) -> dict:
    """Execute a validated config end to end and write the report.

    Returns the report dict; raises ScenarioFailure after writing the
    report when any check failed, and ConfigError before any output when
    the config is invalid.
    """
    name = validate_config(cfg)
    from pathlib import Path

    out = Path(out_dir) if out_dir is not None else resolve_output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    checks, artifacts = REGISTRY[name]["runner"](cfg, out)
    passed = all(c.passed for c in checks)
    report = {
        "scenario": name,
        "passed": passed,
        "checks": [asdict(c) for c in checks],
        "artifacts": sorted(artifacts) + ["report.json"],
        "config": cfg,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not passed:
        raise ScenarioFailure(
            f"scenario {name} failed checks: "
            + ", ".join(c.name for c in checks if not c.passed),
            failed_checks=[c.name for c in checks if not c.passed],
        )
    return report
