"""Command-line front end.

Subcommands: overlaps, usd, eve, simulate, maxloss.  Each prints one
JSON report document on stdout (keys sorted, no timestamps, so equal
configs give byte-identical output); sweeps additionally write a CSV
series to the path given with --csv.

Exit codes: 0 success, 2 validation error, 3 infeasible or degenerate
analytic outcome (the report is still printed).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import channel as ch
from . import montecarlo as mc
from . import states as st
from . import usd
from .config import ConfigError, load_config, require_int, require_number

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

DECOY_KINDS = ("cat", "squeezed", "orthogonal", "raw")


def _cplx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _tolerances(cfg: dict) -> dict:
    return {
        "num_tol": require_number(cfg, "tolerances.num_tol", lo=0.0),
        "tail_tol": require_number(cfg, "tolerances.tail_tol", lo=0.0),
        "degeneracy_tol": require_number(cfg, "tolerances.degeneracy_tol", lo=0.0),
    }


def _signal_params(cfg: dict) -> tuple[float, float, int]:
    alpha = require_number(cfg, "alpha", lo=0.0)
    phi = require_number(cfg, "phi")
    n_cut = require_int(cfg, "n_cut", lo=1)
    return alpha, phi, n_cut


def _decoy_prep(cfg: dict, alpha: float, phi: float, n_cut: int) -> st.StatePrep:
    kind = cfg["decoy"].get("kind")
    if kind not in DECOY_KINDS:
        raise ConfigError("decoy.kind", f"expected one of {DECOY_KINDS}, got {kind!r}")
    if kind == "cat":
        return st.cat_prep(alpha, phi)
    if kind == "squeezed":
        return st.squeezed_prep(require_number(cfg, "decoy.r"))
    if kind == "orthogonal":
        try:
            return st.orthogonal_decoy_prep(alpha, phi, n_cut)
        except ValueError as exc:
            raise ConfigError("decoy", str(exc))
    amps = cfg["decoy"].get("amplitudes")
    if not isinstance(amps, list) or len(amps) < 2:
        raise ConfigError("decoy.amplitudes", "raw decoy requires a list of [re, im] pairs")
    try:
        vec = np.array([complex(a[0], a[1]) for a in amps])
        return st.raw_prep(vec)
    except (TypeError, IndexError, ValueError) as exc:
        raise ConfigError("decoy.amplitudes", str(exc))


def _gram(cfg: dict, alpha: float, phi: float, n_cut: int, tols: dict) -> st.GramData:
    decoy = _decoy_prep(cfg, alpha, phi, n_cut)
    try:
        return st.gram_from_preps(
            st.coherent_prep(alpha, phi),
            st.coherent_prep(alpha, phi + math.pi),
            decoy,
            n_cut=n_cut,
            tail_tol=tols["tail_tol"],
            num_tol=tols["num_tol"],
        )
    except (st.CrossCheckError, st.TruncationError, ValueError) as exc:
        raise ConfigError("decoy", str(exc))


def _channel(cfg: dict) -> ch.ChannelModel:
    try:
        return ch.ChannelModel(
            g=require_number(cfg, "channel.g", 0.0, 1.0),
            e=require_number(cfg, "channel.e", 0.0, 1.0),
            d0=require_number(cfg, "channel.d0", 0.0, 1.0),
            d1=require_number(cfg, "channel.d1", 0.0, 1.0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("channel", str(exc))


def _eve_strategy(cfg: dict, model: ch.ChannelModel) -> ch.EveStrategy | None:
    eve_cfg = cfg.get("eve")
    if eve_cfg is None:
        return None
    if not isinstance(eve_cfg, dict):
        raise ConfigError("eve", "expected an object or null")
    try:
        if eve_cfg.get("solve"):
            result = ch.solve_eve(
                model,
                require_number(cfg, "eve.p_s", 0.0, 1.0),
                require_number(cfg, "eve.p_d", 0.0, 1.0),
            )
            if not result.feasible:
                raise ConfigError("eve", "; ".join(result.violations))
            p_e = eve_cfg.get("p_e", 1.0)
            strat = result.strategy
            return ch.EveStrategy(
                p_e=float(p_e),
                p_s=strat.p_s,
                p_d=strat.p_d,
                g_e=strat.g_e,
                e_e=strat.e_e,
                d0_e=strat.d0_e,
                d1_e=strat.d1_e,
            )
        return ch.EveStrategy(
            p_e=require_number(cfg, "eve.p_e", 0.0, 1.0),
            p_s=require_number(cfg, "eve.p_s", 0.0, 1.0),
            p_d=require_number(cfg, "eve.p_d", 0.0, 1.0),
            g_e=require_number(cfg, "eve.g_e", 0.0, 1.0),
            e_e=require_number(cfg, "eve.e_e", 0.0, 1.0),
            d0_e=require_number(cfg, "eve.d0_e", 0.0, 1.0),
            d1_e=require_number(cfg, "eve.d1_e", 0.0, 1.0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("eve", str(exc))


def _sweep_values(cfg: dict, allowed: tuple[str, ...]) -> tuple[str, np.ndarray] | None:
    sweep = cfg.get("sweep")
    if sweep is None:
        return None
    if not isinstance(sweep, dict):
        raise ConfigError("sweep", "expected an object or null")
    param = sweep.get("param")
    if param not in allowed:
        raise ConfigError("sweep.param", f"expected one of {allowed}, got {param!r}")
    start = require_number(cfg, "sweep.start")
    stop = require_number(cfg, "sweep.stop")
    steps = require_int(cfg, "sweep.steps", lo=2)
    return param, np.linspace(start, stop, steps)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def _overlap_entry(numeric: complex, analytic: complex | None) -> dict:
    return {
        "numeric": _cplx(numeric),
        "analytic": None if analytic is None else _cplx(analytic),
        "discrepancy": None if analytic is None else float(abs(numeric - analytic)),
    }


def cmd_overlaps(cfg: dict) -> int:
    alpha, phi, n_cut = _signal_params(cfg)
    tols = _tolerances(cfg)
    decoy = _decoy_prep(cfg, alpha, phi, n_cut)
    u1 = st.coherent_prep(alpha, phi)
    u2 = st.coherent_prep(alpha, phi + math.pi)
    try:
        gram = st.gram_from_preps(
            u1, u2, decoy, n_cut=n_cut, tail_tol=tols["tail_tol"], num_tol=tols["num_tol"]
        )
    except (st.CrossCheckError, st.TruncationError, ValueError) as exc:
        raise ConfigError("decoy", str(exc))
    result = {
        "n_cut": n_cut,
        "gram": {
            "s12": _overlap_entry(gram.s12, st.closed_overlap(u1, u2)),
            "s13": _overlap_entry(gram.s13, st.closed_overlap(u1, decoy)),
            "s23": _overlap_entry(gram.s23, st.closed_overlap(u2, decoy)),
        },
        "symmetric": gram.is_symmetric(),
    }
    _emit({"command": "overlaps", "inputs": _echo_inputs(cfg), "result": result})
    return EXIT_OK


def _solve_point(cfg: dict, alpha: float, phi: float, n_cut: int, tols: dict) -> usd.UsdSolution:
    gram = _gram(cfg, alpha, phi, n_cut, tols)
    return usd.optimize_usd(
        gram,
        require_number(cfg, "nu", 0.0, 1.0),
        num_tol=tols["num_tol"],
        degeneracy_tol=tols["degeneracy_tol"],
    )


def cmd_usd(cfg: dict, csv_path: str | None) -> int:
    alpha, phi, n_cut = _signal_params(cfg)
    tols = _tolerances(cfg)
    nu = require_number(cfg, "nu", 0.0, 1.0)
    gram = _gram(cfg, alpha, phi, n_cut, tols)
    geom = usd.build_geometry(gram, tols["num_tol"], tols["degeneracy_tol"])
    solution = usd.optimize_usd(gram, nu, tols["num_tol"], tols["degeneracy_tol"])

    sweep_info = None
    sweep = _sweep_values(cfg, ("alpha", "r"))
    if sweep is not None:
        param, values = sweep
        if csv_path is None:
            raise ConfigError("--csv", "sweep output needs a CSV path")
        rows = []
        for value in values:
            point_cfg = json.loads(json.dumps(cfg))
            if param == "alpha":
                point_cfg["alpha"] = float(value)
                sol = _solve_point(point_cfg, float(value), phi, n_cut, tols)
            else:
                if cfg["decoy"].get("kind") != "squeezed":
                    raise ConfigError("sweep.param", "r sweeps require a squeezed decoy")
                point_cfg["decoy"]["r"] = float(value)
                sol = _solve_point(point_cfg, alpha, phi, n_cut, tols)
            rows.append([float(value), sol.p_s, sol.p_d, sol.p0])
        _write_csv(csv_path, [param, "p_s", "p_d", "p0"], rows)
        sweep_info = {"param": param, "points": len(rows), "csv": csv_path}

    result = {
        "gram": {"s12": _cplx(gram.s12), "s13": _cplx(gram.s13), "s23": _cplx(gram.s23)},
        "geometry": {"l": geom.l, "m": geom.m, "degenerate": geom.degenerate},
        "solution": {
            "p_s": solution.p_s,
            "p_d": solution.p_d,
            "p0": solution.p0,
            "min_eig_a0": solution.min_eig_a0,
            "on_det_zero": solution.on_det_zero,
            "degenerate": solution.degenerate,
            "nu": solution.nu,
        },
        "sweep": sweep_info,
    }
    _emit({"command": "usd", "inputs": _echo_inputs(cfg), "result": result})
    return EXIT_INFEASIBLE if solution.degenerate else EXIT_OK


def cmd_eve(cfg: dict) -> int:
    alpha, phi, n_cut = _signal_params(cfg)
    tols = _tolerances(cfg)
    model = _channel(cfg)
    eve_cfg = cfg.get("eve") or {}
    if isinstance(eve_cfg, dict) and "p_s" in eve_cfg and "p_d" in eve_cfg:
        p_s = require_number(cfg, "eve.p_s", 0.0, 1.0)
        p_d = require_number(cfg, "eve.p_d", 0.0, 1.0)
        source = "config"
    else:
        solution = _solve_point(cfg, alpha, phi, n_cut, tols)
        p_s, p_d = solution.p_s, solution.p_d
        source = "usd"
    try:
        solve = ch.solve_eve(model, p_s, p_d)
    except ValueError as exc:
        raise ConfigError("channel", str(exc))

    honest = ch.ab_table(model)
    attacked = None
    masking = None
    if solve.feasible:
        attacked = ch.aeb_table(model, solve.strategy)
        masking = float(np.abs(attacked.matrix - honest.matrix).max())
    result = {
        "p_s": p_s,
        "p_d": p_d,
        "source": source,
        "solve": {
            "feasible": solve.feasible,
            "attack_impossible": solve.attack_impossible,
            "g_e": solve.g_e,
            "e_e": solve.e_e,
            "d_e": solve.d_e,
            "violations": list(solve.violations),
        },
        "strategy": None
        if solve.strategy is None
        else {
            "p_e": solve.strategy.p_e,
            "p_s": solve.strategy.p_s,
            "p_d": solve.strategy.p_d,
            "g_e": solve.strategy.g_e,
            "e_e": solve.strategy.e_e,
            "d0_e": solve.strategy.d0_e,
            "d1_e": solve.strategy.d1_e,
        },
        "honest_table": honest.as_dict(),
        "attacked_table": None if attacked is None else attacked.as_dict(),
        "masking_max_abs_diff": masking,
        "detection_rate_check": {
            "d": model.d,
            "p_d": p_d,
            "attack_excluded": bool(p_d < model.d),
        },
    }
    _emit({"command": "eve", "inputs": _echo_inputs(cfg), "result": result})
    return EXIT_OK if solve.feasible else EXIT_INFEASIBLE


def cmd_simulate(cfg: dict) -> int:
    model = _channel(cfg)
    eve = _eve_strategy(cfg, model)
    try:
        sim_cfg = mc.SimConfig(
            n_pulses=require_int(cfg, "simulation.n_pulses", lo=1),
            nu=require_number(cfg, "nu", 0.0, 1.0),
            channel=model,
            eve=eve,
            seed=require_int(cfg, "simulation.seed", lo=0),
            chunk_size=require_int(cfg, "simulation.chunk_size", lo=1),
        )
        z = require_number(cfg, "simulation.z", lo=0.0)
        verdict, stats = mc.run_experiment(sim_cfg, z)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("simulation", str(exc))
    result = {
        "stats": stats.to_dict(),
        "verdict": {
            "n": verdict.n,
            "n_d": verdict.n_d,
            "z": verdict.z,
            "lower_attack_bound": verdict.lower_attack_bound,
            "upper_honest_bound": verdict.upper_honest_bound,
            "bounds_separated": verdict.bounds_separated,
            "attack_detected": verdict.attack_detected,
            "confidence": verdict.confidence,
        },
    }
    _emit({"command": "simulate", "inputs": _echo_inputs(cfg), "result": result})
    return EXIT_OK


def cmd_maxloss(cfg: dict, csv_path: str | None) -> int:
    mu = require_number(cfg, "loss.mu")
    eta_b = require_number(cfg, "loss.eta_b", 0.0, 1.0)
    eta_d = require_number(cfg, "loss.eta_d", 0.0, 1.0)
    p_d = require_number(cfg, "loss.p_d", 0.0, 1.0)

    sweep_info = None
    sweep = _sweep_values(cfg, ("mu",))
    if sweep is not None:
        _, values = sweep
        if csv_path is None:
            raise ConfigError("--csv", "sweep output needs a CSV path")
        rows = []
        for value in values:
            try:
                loss = ch.max_loss(float(value), eta_b, eta_d, p_d)
            except ValueError as exc:
                raise ConfigError("sweep", str(exc))
            rows.append([float(value), "" if loss is None else loss, loss is not None])
        _write_csv(csv_path, ["mu", "max_loss_db", "feasible"], rows)
        sweep_info = {"param": "mu", "points": len(rows), "csv": csv_path}

    try:
        loss = ch.max_loss(mu, eta_b, eta_d, p_d)
    except ValueError as exc:
        raise ConfigError("loss", str(exc))
    result = {
        "mu": mu,
        "eta_b": eta_b,
        "eta_d": eta_d,
        "p_d": p_d,
        "max_loss_db": loss,
        "feasible": loss is not None,
        "sweep": sweep_info,
    }
    _emit({"command": "maxloss", "inputs": _echo_inputs(cfg), "result": result})
    return EXIT_OK if loss is not None else EXIT_INFEASIBLE


def _echo_inputs(cfg: dict) -> dict:
    # the resolved config is echoed so a report is self-describing
    return json.loads(json.dumps(cfg, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usdguard",
        description="Discrimination-attack analysis and decoy design for two-state phase-coded QKD",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("overlaps", "print analytic and Fock-numeric state overlaps"),
        ("usd", "solve the discrimination optimum for the configured decoy"),
        ("eve", "solve the statistics-preserving interception constraints"),
        ("simulate", "run a seeded pulse-level session and threshold test"),
        ("maxloss", "evaluate the maximum tolerable channel loss"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="JSON config file")
        cmd.add_argument("--seed", type=int, help="override simulation.seed")
        cmd.add_argument("--csv", help="CSV output path for sweeps")
        cmd.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config field (dotted path, repeatable)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set, args.seed)
        if args.command == "overlaps":
            return cmd_overlaps(cfg)
        if args.command == "usd":
            return cmd_usd(cfg, args.csv)
        if args.command == "eve":
            return cmd_eve(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_maxloss(cfg, args.csv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
