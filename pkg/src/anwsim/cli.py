"""Command-line interface: scenario runners and result persistence.

Subcommands: supermodes | propagate | vlf | cluster | verify | oracle-check.
Every run writes a self-contained JSON record (the echoed configuration
plus all computed metrics, versions and the seed), and optionally a
plot-ready CSV with a z_mm first column. Runs are deterministic given
the config and seed; sweeps can fan out to a process pool with ordered,
reproducible assembly.

Exit codes: 0 on success, 2 when a verify run fails certification,
1 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, ScenarioConfig, load_config
from .entanglement import CertificationReport, certify, vlf_values
from .measurement import change_basis, min_variance, squeezing_db
from .model import (
    ArrayConfig,
    GaussianState,
    PumpProfile,
    linear_supermodes,
    propagator_exact,
    propagator_no_ordering,
    rk4_propagate,
)
from .optimize import optimize_vlf, synthesize_cluster, synthesize_emulation
from .symplectic import bloch_messiah

__all__ = ["main", "run", "ResultRecord"]


def _versions() -> dict:
    return {
        "anwsim": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
    }


@dataclass(frozen=True)
class ResultRecord:
    """Replayable artifact: echoed config, metrics, versions and seed."""

    command: str
    config: dict
    seed: int | None
    results: dict
    versions: dict = field(default_factory=_versions)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "versions": self.versions,
            "results": self.results,
        }


@dataclass
class RunOutput:
    record: ResultRecord
    summary: str
    header: list[str] | None = None
    rows: list[list[float]] | None = None
    exit_code: int = 0


def _round_trip(values) -> list:
    """Plain JSON-safe floats (handles numpy scalars and arrays)."""
    return np.asarray(values, dtype=float).tolist()


def _state_summary(state: GaussianState) -> dict:
    """Covariance plus per-mode and per-supermode squeezing levels."""
    n = state.n
    cfg_modes = [min_variance(state, i)[0] for i in range(1, n + 1)]
    bm = bloch_messiah(state.propagator)
    nsm_vars = np.exp(-2.0 * bm.gains)
    return {
        "covariance": _round_trip(state.covariance),
        "mode_min_variance": _round_trip(cfg_modes),
        "mode_min_variance_db": _round_trip([squeezing_db(v) for v in cfg_modes]),
        "supermode_gains": _round_trip(bm.gains),
        "supermode_min_variance": _round_trip(nsm_vars),
        "supermode_min_variance_db": _round_trip([squeezing_db(v) for v in nsm_vars]),
        "mean_photon_number": float(state.mean_photon_number),
    }


def _report_dict(report: CertificationReport) -> dict:
    return {
        "graph": report.graph,
        "lo_phases_pi": _round_trip(np.asarray(report.lo_phases) / np.pi),
        "gains": _round_trip(report.gains),
        "nullifier_variances": _round_trip(report.nullifier_variances),
        "vlf": _round_trip(report.vlf),
        "bound_pairs": [list(p) for p in report.bound_pairs],
        "bound_sums": _round_trip(report.bound_sums),
        "bounds": _round_trip(report.bounds),
        "below_shot_noise": bool(report.below_shot),
        "inseparable": bool(report.inseparable),
        "passed": bool(report.passed),
    }


def _map_ordered(fn, tasks, workers: int):
    """Apply fn over tasks, optionally on a process pool, preserving order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# supermodes


def cmd_supermodes(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    cfg = scn.array.array_config()
    modes = linear_supermodes(cfg)
    header = ["k", "lambda_k"] + [f"m_{j}" for j in range(1, cfg.n + 1)]
    rows = [
        [float(k + 1), float(modes.eigenvalues[k])] + _round_trip(modes.matrix[k])
        for k in range(cfg.n)
    ]
    record = ResultRecord(
        command="supermodes",
        config=scn.to_dict(),
        seed=seed,
        results={
            "eigenvalues": _round_trip(modes.eigenvalues),
            "matrix": _round_trip(modes.matrix),
        },
    )
    lam = ", ".join(f"{v:+.4f}" for v in modes.eigenvalues)
    return RunOutput(record, f"{cfg.n} supermodes, eigenvalues [{lam}] mm^-1", header, rows)


# ---------------------------------------------------------------------------
# propagate


def _propagate_row(task) -> list[float]:
    cfg, pump, z = task
    n = cfg.n
    state = propagator_exact(cfg, pump, z)
    t = linear_supermodes(cfg).to_supermode_basis()
    sm_state = change_basis(state, t, "linear_supermode")
    row = [z]
    for i in range(1, n + 1):
        v = min_variance(state, i)[0]
        row += [v, squeezing_db(v)]
    for k in range(1, n + 1):
        v = min_variance(sm_state, k)[0]
        row += [v, squeezing_db(v)]
    gains = bloch_messiah(state.propagator).gains
    for r in gains:
        v = float(np.exp(-2.0 * r))
        row += [v, squeezing_db(v)]
    return row


def cmd_propagate(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    scn.require("pump")
    cfg = scn.array.array_config()
    pump = scn.pump.pump_profile()
    if scn.sweep is not None:
        if scn.sweep.variable != "z":
            raise ConfigError("propagate: sweep variable must be 'z'")
        grid = list(scn.sweep.values)
    else:
        grid = np.linspace(0.0, cfg.length, 61).tolist()
    if any(z < 0 for z in grid):
        raise ConfigError("propagate: z values must be nonnegative")
    rows = _map_ordered(_propagate_row, [(cfg, pump, z) for z in grid], workers)
    n = cfg.n
    header = ["z_mm"]
    for tag in ("mode", "sm", "nsm"):
        for i in range(1, n + 1):
            header += [f"{tag}{i}_var", f"{tag}{i}_db"]
    record = ResultRecord(
        command="propagate",
        config=scn.to_dict(),
        seed=seed,
        results={"header": header, "rows": rows},
    )
    best = min(min(r[1 + 2 * n : 1 + 4 * n : 2]) for r in rows)
    return RunOutput(
        record,
        f"{len(grid)} z points, best supermode variance {best:.4f} "
        f"({squeezing_db(best):.2f} dB)",
        header,
        rows,
    )


# ---------------------------------------------------------------------------
# vlf


def _vlf_point(task) -> list[float]:
    (cfg, pump, z, theta, gains, opt) = task
    if opt is None:
        state = propagator_exact(cfg, pump, z)
        rho = vlf_values(state, theta, gains)
        return [float(v) for v in rho]
    res = optimize_vlf(
        cfg,
        z,
        float(pump.amplitudes[0]),
        optimize_pump_phases=opt["optimize_pump_phases"],
        seed=opt["seed"],
        generations=opt["generations"],
        sigma0=opt["sigma0"],
    )
    return [float(v) for v in res.rho]


def cmd_vlf(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    scn.require("pump")
    cfg = scn.array.array_config()
    pump = scn.pump.pump_profile()
    n = cfg.n
    sweep = scn.sweep
    variable = "z" if sweep is None else sweep.variable
    grid = [cfg.length] if sweep is None else list(sweep.values)

    opt = None
    if scn.optimizer is not None:
        if scn.optimizer.fitness != "FM":
            raise ConfigError("vlf: optimizer.fitness must be 'FM'")
        opt = {
            "optimize_pump_phases": scn.optimizer.optimize_pump_phases,
            "seed": scn.optimizer.seed if seed is None else seed,
            "generations": scn.optimizer.generations,
            "sigma0": scn.optimizer.sigma0,
        }
        if not np.allclose(pump.amplitudes, pump.amplitudes[0]):
            raise ConfigError("vlf: optimized runs use a flat pump amplitude")
    else:
        scn.require("measurement")

    tasks = []
    for v in grid:
        if variable == "z":
            task_pump, z = pump, float(v)
        else:
            task_pump = PumpProfile(np.full(n, float(v)), np.asarray(pump.phases))
            z = cfg.length
        theta = scn.measurement.lo_phases() if scn.measurement is not None else np.zeros(n)
        gains = (
            scn.measurement.gain_vector(n) if scn.measurement is not None else np.zeros(n)
        )
        tasks.append((cfg, task_pump, z, theta, gains, opt))
    rows_rho = _map_ordered(_vlf_point, tasks, workers)

    col0 = "z_mm" if variable == "z" else "eta_per_mm"
    header = [col0] + [f"rho_{i}" for i in range(1, n)] + ["rho_sum"]
    rows = [[float(v)] + r + [float(np.sum(r))] for v, r in zip(grid, rows_rho)]
    record = ResultRecord(
        command="vlf",
        config=scn.to_dict(),
        seed=seed if seed is not None else (opt["seed"] if opt else None),
        results={
            "variable": variable,
            "header": header,
            "rows": rows,
            "optimized": opt is not None,
        },
    )
    last = rows[-1]
    return RunOutput(
        record,
        f"{len(grid)} {variable} points, last rho = "
        + ", ".join(f"{v:.3f}" for v in last[1:-1]),
        header,
        rows,
    )


# ---------------------------------------------------------------------------
# cluster


def cmd_cluster(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    scn.require("graph", "optimizer")
    cfg = scn.array.array_config()
    graph = scn.graph.graph_spec()
    opt = scn.optimizer
    eff_seed = opt.seed if seed is None else seed

    if opt.fitness == "FM":
        raise ConfigError("cluster: optimizer.fitness must be 'FC' or 'FP'")

    if opt.generations == 0:
        # forward evaluation at the configured pump and detection setting
        scn.require("pump", "measurement")
        pump = scn.pump.pump_profile()
        theta = scn.measurement.lo_phases()
        state = propagator_exact(cfg, pump, cfg.length)
        report = certify(state, graph, theta)
        results = {
            "mode": "forward",
            "fitness": opt.fitness,
            "pump_amplitudes": _round_trip(pump.amplitudes),
            "pump_phases_pi": _round_trip(np.asarray(pump.phases) / np.pi),
            "lo_phases_pi": _round_trip(theta / np.pi),
            "report": _report_dict(report),
            "state": _state_summary(state),
            "trace": [],
        }
        record = ResultRecord("cluster", scn.to_dict(), eff_seed, results)
        s = float(report.nullifier_variances.sum())
        return RunOutput(
            record,
            f"{graph.name}: forward evaluation, sum of nullifier variances "
            f"{s:.4f}, certified={report.passed}",
        )

    if opt.fitness == "FC":
        syn = synthesize_cluster(
            cfg,
            cfg.length,
            graph,
            seed=eff_seed,
            restarts=opt.restarts if opt.restarts is not None else 5,
            generations=opt.generations,
            parents=opt.parents,
            population=opt.population,
            eta_max=opt.eta_max,
            target=opt.target,
        )
        state = propagator_exact(cfg, syn.pump, cfg.length)
        results = {
            "mode": "synthesis",
            "fitness": "FC",
            "pump_amplitudes": _round_trip(syn.pump.amplitudes),
            "pump_phases_pi": _round_trip(np.asarray(syn.pump.phases) / np.pi),
            "lo_phases_pi": _round_trip(syn.lo_phases / np.pi),
            "report": _report_dict(syn.report),
            "state": _state_summary(state),
            "best_fitness": float(syn.optimization.fitness),
            "trace": _round_trip(syn.optimization.trace),
            "evaluations": int(syn.optimization.evaluations),
            "generations": int(syn.optimization.generations),
            "restarts_used": int(syn.restarts_used),
        }
        record = ResultRecord("cluster", scn.to_dict(), eff_seed, results)
        return RunOutput(
            record,
            f"{graph.name}: F_C synthesis, sum of nullifier variances "
            f"{syn.total_variance:.4f}, certified={syn.report.passed}",
        )

    syn = synthesize_emulation(
        cfg,
        cfg.length,
        graph,
        seed=eff_seed,
        restarts=opt.restarts if opt.restarts is not None else 6,
        generations=opt.generations,
        eta_max=opt.eta_max,
        target=opt.target,
    )
    state = propagator_exact(cfg, syn.pump, cfg.length)
    results = {
        "mode": "synthesis",
        "fitness": "FP",
        "pump_amplitudes": _round_trip(syn.pump.amplitudes),
        "pump_phases_pi": _round_trip(np.asarray(syn.pump.phases) / np.pi),
        "mixing_euler_pi": _round_trip(syn.mixing_euler / np.pi),
        "lo_phases_pi": _round_trip(syn.lo_phases / np.pi),
        "post_euler_pi": _round_trip(syn.post_euler / np.pi),
        "emulation_error": float(syn.fp),
        "nullifier_variances": _round_trip(syn.nullifier_variances),
        "state": _state_summary(state),
        "best_fitness": float(syn.optimization.fitness),
        "trace": _round_trip(syn.optimization.trace),
        "evaluations": int(syn.optimization.evaluations),
        "generations": int(syn.optimization.generations),
    }
    record = ResultRecord("cluster", scn.to_dict(), eff_seed, results)
    s = float(syn.nullifier_variances.sum())
    return RunOutput(
        record,
        f"{graph.name}: F_P synthesis, emulation error {syn.fp:.3e}, "
        f"sum of cluster-basis variances {s:.4f}",
    )


# ---------------------------------------------------------------------------
# verify


def cmd_verify(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    scn.require("pump", "measurement", "graph")
    cfg = scn.array.array_config()
    pump = scn.pump.pump_profile()
    graph = scn.graph.graph_spec()
    theta = scn.measurement.lo_phases()
    gains = scn.measurement.gain_vector(cfg.n)
    state = propagator_exact(cfg, pump, cfg.length)
    report = certify(state, graph, theta, gains=gains)
    results = {"report": _report_dict(report), "state": _state_summary(state)}
    record = ResultRecord("verify", scn.to_dict(), seed, results)
    code = 0 if report.passed else 2
    return RunOutput(
        record,
        f"{graph.name}: certified={report.passed} (below shot noise: "
        f"{report.below_shot}, inseparable: {report.inseparable})",
        exit_code=code,
    )


# ---------------------------------------------------------------------------
# oracle-check


def _covariance_diff_supermode(cfg: ArrayConfig, pump: PumpProfile, z: float) -> float:
    """Max abs covariance difference, no-ordering vs exact, supermode basis."""
    t = linear_supermodes(cfg).to_supermode_basis()
    exact = propagator_exact(cfg, pump, z)
    approx = propagator_no_ordering(cfg, pump, z)
    v_exact = t @ exact.covariance @ t.T
    return float(np.abs(approx.covariance - v_exact).max())


def cmd_oracle_check(scn: ScenarioConfig, seed: int | None, workers: int) -> RunOutput:
    scn.require("pump")
    cfg = scn.array.array_config()
    pump = scn.pump.pump_profile()
    z = cfg.length
    exact = propagator_exact(cfg, pump, z)
    rk4 = rk4_propagate(cfg, pump, z)
    results: dict = {
        "exact_vs_rk4": float(np.abs(exact.propagator - rk4.propagator).max()),
        "symplectic_defect": float(
            np.abs(
                exact.propagator
                @ np.block(
                    [
                        [np.zeros((cfg.n, cfg.n)), np.eye(cfg.n)],
                        [-np.eye(cfg.n), np.zeros((cfg.n, cfg.n))],
                    ]
                )
                @ exact.propagator.T
                - np.block(
                    [
                        [np.zeros((cfg.n, cfg.n)), np.eye(cfg.n)],
                        [-np.eye(cfg.n), np.zeros((cfg.n, cfg.n))],
                    ]
                )
            ).max()
        ),
    }
    amps = np.asarray(pump.amplitudes)
    flat = bool(
        amps.size > 0
        and np.allclose(amps, amps[0])
        and np.allclose(pump.phases, pump.phases[0])
        and (cfg.profile is None or np.allclose(cfg.profile, 1.0))
    )
    results["flat_pump"] = flat
    if flat:
        from .model import flat_pump_analytic

        eta = amps[0] * np.exp(1j * pump.phases[0])
        sol = flat_pump_analytic(cfg, eta, z)
        sm = propagator_no_ordering(cfg, pump, z)
        t = linear_supermodes(cfg).to_supermode_basis()
        results["analytic_vs_exact"] = float(
            np.abs(sol.state.propagator - t @ exact.propagator @ t.T).max()
        )
        results["analytic_vs_no_ordering"] = float(
            np.abs(sol.state.propagator - sm.propagator).max()
        )
    elif np.any(amps > 0):
        # third-order onset of space-ordering corrections: fit the
        # covariance error against the pump scale on a log-log grid
        shape = amps / amps.max()
        scales = np.logspace(-3.0, -2.0, 8)
        errs = [
            _covariance_diff_supermode(
                cfg, PumpProfile(s * shape, np.asarray(pump.phases)), z
            )
            for s in scales
        ]
        slope = float(np.polyfit(np.log(scales), np.log(errs), 1)[0])
        results["no_ordering_error_slope"] = slope
        results["no_ordering_errors"] = _round_trip(errs)
        results["no_ordering_scales"] = _round_trip(scales)
    record = ResultRecord("oracle-check", scn.to_dict(), seed, results)
    parts = [f"exact vs RK4 {results['exact_vs_rk4']:.2e}"]
    if flat:
        parts.append(f"analytic vs no-ordering {results['analytic_vs_no_ordering']:.2e}")
    elif "no_ordering_error_slope" in results:
        parts.append(f"no-ordering error slope {results['no_ordering_error_slope']:.2f}")
    return RunOutput(record, "; ".join(parts))


# ---------------------------------------------------------------------------
# driver


_COMMANDS = {
    "supermodes": (cmd_supermodes, "Eigenvalues and profiles of the linear supermodes"),
    "propagate": (cmd_propagate, "Squeezing vs z in each basis (CSV-friendly)"),
    "vlf": (cmd_vlf, "van Loock-Furusawa combinations over a sweep"),
    "cluster": (cmd_cluster, "Synthesize or evaluate a cluster-state setting"),
    "verify": (cmd_verify, "Certify a configured setting against its graph"),
    "oracle-check": (cmd_oracle_check, "Cross-validate the propagator backends"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anwsim",
        description="Gaussian-state simulation of arrays of nonlinear waveguides",
    )
    parser.add_argument("--version", action="version", version=f"anwsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="scenario file (JSON)")
        sp.add_argument("--seed", type=int, default=None, help="override the optimizer seed")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default=None, help="table format")
        sp.add_argument(
            "--parallel", type=int, default=1, metavar="N", help="worker processes for sweeps"
        )
        sp.add_argument(
            "--deterministic",
            action="store_true",
            help="force serial execution (runs are seeded either way)",
        )
    return parser


def _write_outputs(out: RunOutput, outdir: Path, fmt: str) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    record_path = outdir / f"{out.record.command.replace('-', '_')}_record.json"
    record_path.write_text(json.dumps(out.record.to_dict(), indent=2) + "\n")
    written.append(record_path)
    if fmt == "csv" and out.header is not None and out.rows is not None:
        csv_path = outdir / f"{out.record.command.replace('-', '_')}.csv"
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(out.header)
            writer.writerows(out.rows)
        written.append(csv_path)
    return written


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        scn = load_config(args.config)
        workers = 1 if args.deterministic else max(1, args.parallel)
        out = _COMMANDS[args.command][0](scn, args.seed, workers)
    except (ConfigError, ValueError) as exc:
        print(f"anwsim: error: {exc}", file=sys.stderr)
        return 1
    outdir = Path(args.out) if args.out is not None else Path(scn.output.directory)
    fmt = args.format if args.format is not None else scn.output.format
    written = _write_outputs(out, outdir, fmt)
    print(out.summary)
    for path in written:
        print(f"wrote {path}")
    return out.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
