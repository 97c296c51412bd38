"""Command-line front end: time sweeps, fraction sweeps, classicality reports, self-verification."""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

from . import classicality, verification
from .branchstate import DensityMatrix, SubsystemSelector, build_state, reduce
from .config import (FRACTION_SWEEP_COLUMNS, QUANTITIES, ConfigError, RunConfig, build_config,
                     load_config_file, parse_int_list, parse_real, parse_time_grid)
from .infomeasures import (discord_measured_on_qubit, entropy_of, l1_coherence, matrix_mutual_information,
                           mutual_information, state_entropy)
from .oracle import DenseParams, DenseState


def _threads() -> int:
    try:
        n = int(os.environ.get("DARWINSIM_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _ordered_map(fn, items):
    """Map with a thread pool; results come back in input order."""
    items = list(items)
    workers = _threads()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def s1s2e1_matrix(cfg: RunConfig, t: float) -> DensityMatrix:
    p = cfg.params.replace(t=t)
    sel = SubsystemSelector(True, True, 1)
    if cfg.non_commuting:
        return DenseState.evolve(DenseParams.from_model(p, cfg.Jx, cfg.Jy)).reduce(sel)
    return reduce(build_state(p), sel)


def time_row(rho: DensityMatrix, wanted: Sequence[str], nullity_tol: float = classicality.NULLITY_TOL) -> Dict[str, float]:
    """Every time-sweep quantity from rho_{S1S2E1} (subsystem order S1, S2, E1)."""
    out = {}
    sys_pair = rho.reduce([0, 1])
    for q in wanted:
        if q == "mi_s1s2_e1":
            out[q] = matrix_mutual_information(rho, [0, 1])
        elif q == "entropy_s1s2":
            out[q] = entropy_of(sys_pair)
        elif q == "coherence_s1s2":
            out[q] = l1_coherence(sys_pair)
        elif q == "coherence_e1":
            out[q] = l1_coherence(rho.reduce([2]))
        elif q == "discord_s1s2_measured_s1":
            out[q] = discord_measured_on_qubit(sys_pair, 0).discord
        elif q == "discord_s1ek_measured_s1":
            out[q] = discord_measured_on_qubit(rho.reduce([0, 2]), 0).discord
        elif q == "backward_nullity_residual":
            bd = classicality.decompose(rho)
            out[q] = classicality.nullity_certificate(bd, nullity_tol).max_residual_backward
    return out


def time_sweep_rows(cfg: RunConfig) -> (List[str], List[List[float]]):
    wanted = [q for q in QUANTITIES if cfg.outputs is None or q in cfg.outputs]
    if cfg.non_commuting and cfg.params.N > 8:
        raise ConfigError("Jx != Jy needs dense evolution, which is limited to N <= 8")

    def row(t):
        vals = time_row(s1s2e1_matrix(cfg, t), wanted, cfg.nullity_tol)
        return [t] + [vals[q] for q in wanted]

    return ["t"] + wanted, _ordered_map(row, cfg.time_grid)


def _single_time(cfg: RunConfig) -> float:
    if len(cfg.time_grid) != 1:
        raise ConfigError("this command needs a single time (use --time)")
    return cfg.time_grid[0]


def fraction_sweep_rows(cfg: RunConfig) -> (List[str], List[List[float]]):
    if cfg.non_commuting:
        raise ConfigError("fraction-sweep uses the analytic state and needs Jx == Jy")
    s = build_state(cfg.params.replace(t=_single_time(cfg)))
    s1s2, s1 = SubsystemSelector(True, True), SubsystemSelector(True)
    ent_pair, ent_single = state_entropy(s, s1s2), state_entropy(s, s1)
    if ent_pair < 1e-12 or ent_single < 1e-12:
        raise classicality.DegenerateInputError("system entropy is zero; fraction curves are undefined")

    def row(m):
        if m == 0:
            return [0.0, 0.0, 0.0]
        env = SubsystemSelector(env_kept=m)
        return [m / s.N, mutual_information(s, s1s2, env) / ent_pair, mutual_information(s, s1, env) / ent_single]

    return list(FRACTION_SWEEP_COLUMNS), _ordered_map(row, cfg.fractions())


def classicality_report(cfg: RunConfig) -> dict:
    t = _single_time(cfg)
    rho = s1s2e1_matrix(cfg, t)
    report = classicality.nullity_certificate(classicality.decompose(rho), cfg.nullity_tol)
    out = {"t": t, "params": cfg.to_dict()["params"], "classicality": report.to_dict(),
           "plateau": None, "degenerate_entropy": False}
    if cfg.non_commuting:
        out["notice"] = "non-commuting regime: plateau detection uses the analytic state and is omitted"
        return out
    try:
        out["plateau"] = classicality.detect_plateau(build_state(cfg.params.replace(t=t)), cfg.plateau_tol).to_dict()
    except classicality.DegenerateInputError as exc:
        out["degenerate_entropy"] = True
        out["notice"] = str(exc)
    return out


# -- output --------------------------------------------------------------

def format_csv(columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(f"{float(v):.17g}" for v in r) + "\n")
    return buf.getvalue()


def format_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_output(text: str, path: str):
    if path in ("-", ""):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _table_text(cfg: RunConfig, columns, rows) -> str:
    if cfg.format == "csv":
        return format_csv(columns, rows)
    return format_json({"columns": list(columns), "rows": [[float(v) for v in r] for r in rows]})


def run_time_sweep(cfg: RunConfig) -> str:
    text = _table_text(cfg, *time_sweep_rows(cfg))
    write_output(text, cfg.output_path)
    return text


def run_fraction_sweep(cfg: RunConfig) -> str:
    text = _table_text(cfg, *fraction_sweep_rows(cfg))
    write_output(text, cfg.output_path)
    return text


def run_classicality(cfg: RunConfig) -> str:
    text = format_json(classicality_report(cfg))
    write_output(text, cfg.output_path)
    return text


def run_verify(cfg: RunConfig, draws: int = 20, times: int = 10, inject_fault: bool = False):
    """Run every self-check; returns (exit status, summary dict)."""
    results = verification.run_all(cfg.params, cfg.Jx, cfg.Jy, cfg.seed, draws, times,
                                   cfg.plateau_tol, cfg.nullity_tol, corrupt=inject_fault)
    failed = [r.name for r in results if not r.ok]
    summary = {"passed": not failed, "failed_suites": failed,
               "suites": {r.name: r.to_dict() for r in results}}
    write_output(format_json(summary), cfg.output_path)
    return (1 if failed else 0), summary


# -- argument parsing ------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags override its values)")
    common.add_argument("--theta1", type=parse_real)
    common.add_argument("--theta2", type=parse_real)
    common.add_argument("--j", dest="J", type=parse_real, help="S1-S2 exchange coupling (Jx = Jy = J)")
    common.add_argument("--jz", dest="Jz", type=parse_real)
    common.add_argument("--jse", dest="Jse", type=parse_real)
    common.add_argument("--jx", dest="Jx", type=parse_real, help="XX coupling for dense runs")
    common.add_argument("--jy", dest="Jy", type=parse_real, help="YY coupling for dense runs")
    common.add_argument("--n-env", dest="N", type=int)
    common.add_argument("--time", type=parse_real, help="single time point")
    common.add_argument("--time-grid", help="start:stop:count or comma list")
    common.add_argument("--fractions", help="comma list of environment fraction sizes")
    common.add_argument("--outputs", help="comma list of quantities for time-sweep")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", dest="output_path", help="output path ('-' for stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--plateau-tol", dest="plateau_tol", type=float)
    common.add_argument("--nullity-tol", dest="nullity_tol", type=float)

    ap = argparse.ArgumentParser(prog="darwinsim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("time-sweep", parents=[common], help="quantities vs time")
    sub.add_parser("fraction-sweep", parents=[common], help="mutual information vs environment fraction")
    sub.add_parser("classicality", parents=[common], help="nullity and plateau report at one time")
    v = sub.add_parser("verify", parents=[common], help="oracle, identity, bound, plateau and nullity checks")
    v.add_argument("--draws", type=int, default=20)
    v.add_argument("--times-per-draw", type=int, default=10)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return ap


def config_from_args(args) -> RunConfig:
    file_data = load_config_file(args.config) if args.config else None
    overrides = {k: getattr(args, k) for k in ("theta1", "theta2", "J", "Jz", "Jse", "N", "Jx", "Jy",
                                               "format", "output_path", "seed", "plateau_tol", "nullity_tol")}
    if args.time is not None and args.time_grid is not None:
        raise ConfigError("give either --time or --time-grid, not both")
    if args.time is not None:
        overrides["time_grid"] = [args.time]
    elif args.time_grid is not None:
        overrides["time_grid"] = parse_time_grid(args.time_grid)
    if args.fractions is not None:
        overrides["fraction_grid"] = parse_int_list(args.fractions)
    if args.outputs is not None:
        overrides["outputs"] = [q.strip() for q in args.outputs.split(",") if q.strip()]
    return build_config(file_data, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "time-sweep":
            run_time_sweep(cfg)
        elif args.command == "fraction-sweep":
            run_fraction_sweep(cfg)
        elif args.command == "classicality":
            run_classicality(cfg)
        else:
            status, summary = run_verify(cfg, args.draws, args.times_per_draw, args.inject_fault)
            if status:
                print(f"verify failed: {', '.join(summary['failed_suites'])}", file=sys.stderr)
            return status
    except (ConfigError, classicality.DegenerateInputError, ValueError) as exc:
        print(f"darwinsim: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
