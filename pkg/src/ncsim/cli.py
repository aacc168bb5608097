"""Command-line front end.

Subcommands: ``certify`` (verify the shipped gains against a model and
write a certificate file), ``simulate`` (one seeded run with trajectory and
jump-log CSV output), ``sweep`` (deadband grid over seeds, summary CSV and
figures), ``table1`` (fixed-schedule interval bounds per deadband from a
sweep summary), ``plot`` (re-render figures from a summary).

Deadband values on the command line follow the benchmark convention: they
are per-node trigger thresholds (see ncsim.experiment).

Exit codes: 0 success, 2 parse/usage error, 3 certification failure,
4 simulation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiment, plots
from .certify import Certificate, CertificationError, compute_L
from .hybrid_sim import (
    SimulationError,
    TriggerConfig,
    average_transmission_interval,
    export_jump_log_csv,
    export_trajectory_csv,
    monitor_lyapunov,
    sample_initial_conditions,
    simulate,
)
from .mati import LambdaPolicy
from .model_io import (
    ModelParseError,
    batch_reactor_path,
    certificate_from_gains,
    load_model,
)
from .protocols import PROTOCOL_KINDS, Protocol

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CERTIFY = 3
EXIT_SIMULATE = 4


def _parse_deadbands(text: str):
    """Accept '0.1,0.2,0.3' or a range 'lo..hi:step'."""
    text = text.strip()
    if ".." in text:
        head, _, step_s = text.partition(":")
        lo_s, _, hi_s = head.partition("..")
        if not step_s or not hi_s:
            raise argparse.ArgumentTypeError(
                "range deadbands must look like 'lo..hi:step'"
            )
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError("bad deadband range")
        n = int(round((hi - lo) / step))
        return tuple(round(lo + i * step, 12) for i in range(n + 1))
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad deadband list: {text!r}") from None


def _add_common(parser):
    parser.add_argument(
        "--model",
        default=None,
        help="model file (JSON); defaults to the packaged batch-reactor benchmark",
    )
    parser.add_argument(
        "--protocol",
        choices=PROTOCOL_KINDS,
        default="mtod",
        help="scheduling protocol (default: mtod)",
    )
    parser.add_argument("--out", default="out", help="output directory (default: out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncsim",
        description="Networked control system simulation and certification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", help="verify shipped gains, write a certificate file")
    _add_common(p_cert)
    p_cert.add_argument(
        "--bisect",
        action="store_true",
        help="also bisect the smallest certifiable gain with the shipped storage matrix",
    )

    p_sim = sub.add_parser("simulate", help="run one seeded simulation, export CSVs")
    _add_common(p_sim)
    p_sim.add_argument("--deadband", type=float, default=0.1, help="per-node trigger threshold")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--horizon", type=float, default=5.0)
    p_sim.add_argument("--step", type=float, default=1e-4)
    p_sim.add_argument(
        "--lambda",
        dest="lambda_mode",
        choices=("state", "fixed"),
        default="state",
        help="decay-ratio policy (fixed uses --fixed-lambda)",
    )
    p_sim.add_argument("--fixed-lambda", type=float, default=None)

    p_sweep = sub.add_parser("sweep", help="deadband grid over seeds, summary CSV + figures")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--deadband",
        type=_parse_deadbands,
        default=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),
        help="comma list or 'lo..hi:step' of per-node thresholds",
    )
    p_sweep.add_argument("--seeds", type=int, default=20)
    p_sweep.add_argument("--horizon", type=float, default=5.0)
    p_sweep.add_argument("--step", type=float, default=1e-4)
    p_sweep.add_argument(
        "--lambda",
        dest="lambda_mode",
        choices=("state", "fixed"),
        default="state",
        help="fixed mode pins each deadband's ratio to the state-dependent "
        "sweep's realized maximum",
    )
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--no-plots", action="store_true")

    p_tab = sub.add_parser("table1", help="interval bounds per deadband from a sweep summary")
    p_tab.add_argument("--summary", required=True, help="summary CSV from 'sweep'")
    p_tab.add_argument("--out", default="out")

    p_plot = sub.add_parser("plot", help="re-render figures from a sweep summary")
    _add_common(p_plot)
    p_plot.add_argument("--summary", required=True, help="summary CSV from 'sweep'")
    p_plot.add_argument("--seed", type=int, default=0, help="seed for the showcase state overlays")
    p_plot.add_argument(
        "--overlay-deadbands",
        type=_parse_deadbands,
        default=(0.1, 0.6),
        help="two deadbands for the solid/dashed state overlay",
    )
    return parser


def _load(args):
    path = args.model if args.model else batch_reactor_path()
    model, gains = load_model(path)
    cert = certificate_from_gains(model, gains, args.protocol)
    protocol = Protocol(args.protocol, model.partition)
    return model, gains, cert, protocol


def _cmd_certify(args) -> int:
    model, gains, cert, protocol = _load(args)
    recomputed_l = compute_L(cert.m_bound, model.a22)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cert_path = outdir / f"certificate_{protocol.kind}.json"
    cert.save(cert_path)
    print(f"model hash        : {model.content_hash()}")
    print(f"protocol          : {protocol.kind}")
    print(f"gamma (shipped)   : {cert.gamma}")
    print(f"L shipped/recomp  : {cert.L} / {recomputed_l:.6g}")
    print(f"eta               : {cert.eta:.6g}")
    print(f"LMI verified      : True (eps={cert.eps_lmi}, M={cert.m_bound})")
    if args.bisect:
        from .certify import bisect_gamma

        gamma_star, _ = bisect_gamma(
            model,
            lambda g: cert.p,
            (0.05 * cert.gamma, cert.gamma),
            eps_lmi=cert.eps_lmi,
            m_bound=cert.m_bound,
        )
        print(f"bisected gamma*   : {gamma_star:.6g} (shipped storage matrix)")
    print(f"certificate file  : {cert_path}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    model, gains, cert, protocol = _load(args)
    if args.lambda_mode == "fixed":
        if args.fixed_lambda is None:
            print("simulate: --lambda fixed requires --fixed-lambda", file=sys.stderr)
            return EXIT_PARSE
        policy = LambdaPolicy(mode="fixed", fixed_value=args.fixed_lambda)
    else:
        policy = LambdaPolicy()
    rng = np.random.default_rng(args.seed)
    x0, e0 = sample_initial_conditions(rng, model.n_x, model.n_e)
    cfg = TriggerConfig(
        deadband=args.deadband * protocol.num_nodes,
        horizon=args.horizon,
        step=args.step,
        lambda_policy=policy,
    )
    traj = simulate(model, protocol, cert, cfg, x0, e0)
    report = monitor_lyapunov(traj, cert, protocol)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    traj_path = outdir / f"trajectory_{protocol.kind}_d{args.deadband}_s{args.seed}.csv"
    jump_path = outdir / f"jumps_{protocol.kind}_d{args.deadband}_s{args.seed}.csv"
    export_trajectory_csv(traj, traj_path, monitor=report)
    export_jump_log_csv(traj, jump_path)
    print(f"jumps             : {traj.jump_count}")
    if traj.jump_count >= 2:
        print(f"avg interval      : {average_transmission_interval(traj)*1000:.3f} ms")
    print(f"min inter-jump    : {traj.min_interjump*1000:.4f} ms")
    print(f"final |x|         : {traj.final_x_norm:.6g}")
    print(f"monitor           : flow={report.flow_ok} jump={report.jump_ok} envelope={report.envelope_ok}")
    print(f"trajectory CSV    : {traj_path}")
    print(f"jump log CSV      : {jump_path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    model, gains, cert, protocol = _load(args)
    base = experiment.ExperimentConfig(
        protocol=protocol.kind,
        deadbands=tuple(args.deadband),
        seeds=args.seeds,
        horizon=args.horizon,
        step=args.step,
        workers=args.workers,
    )
    if args.lambda_mode == "fixed":
        # realized maxima of a state-dependent sweep pin the fixed ratios
        state_summary = experiment.run_sweep(model, protocol, cert, base)
        fixed = {row.deadband: row.lambda_max for row in state_summary.rows}
        cfg = experiment.ExperimentConfig(
            protocol=base.protocol,
            deadbands=base.deadbands,
            seeds=base.seeds,
            horizon=base.horizon,
            step=base.step,
            lambda_mode="fixed",
            fixed_lambdas=fixed,
            workers=base.workers,
        )
        summary = experiment.run_sweep(model, protocol, cert, cfg)
    else:
        summary = experiment.run_sweep(model, protocol, cert, base)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary_path = outdir / f"summary_{protocol.kind}_{args.lambda_mode}.csv"
    experiment.write_summary_csv(summary, summary_path)
    print(f"{'d':>6} {'Tbar[ms]':>10} {'lam_max':>9} {'T_lower':>10} {'ult|x|':>8}")
    for row in summary.rows:
        print(
            f"{row.deadband:>6.3g} {row.tbar_mean*1000:>10.2f} {row.lambda_max:>9.5f} "
            f"{row.t_lower:>10.6f} {row.ultimate_bound:>8.3f}"
        )
    print(f"summary CSV       : {summary_path}")
    if not args.no_plots:
        written = plots.emit_plots(summary, None, outdir)
        for p in written:
            print(f"figure            : {p}")
    return EXIT_OK


def _cmd_table1(args) -> int:
    summary = experiment.read_summary_csv(args.summary)
    pairs = experiment.table1(summary)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    out_path = outdir / "table1.csv"
    with open(out_path, "w") as fh:
        fh.write("deadband,t_lower\n")
        for d, t in pairs:
            fh.write(f"{d!r},{t!r}\n")
    print(f"{'d':>6} {'T_lower':>12}")
    for d, t in pairs:
        print(f"{d:>6.3g} {t:>12.6f}")
    print(f"table CSV         : {out_path}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    model, gains, cert, protocol = _load(args)
    summary = experiment.read_summary_csv(args.summary)
    if len(args.overlay_deadbands) != 2:
        print("plot: --overlay-deadbands needs exactly two values", file=sys.stderr)
        return EXIT_PARSE
    rng = np.random.default_rng(args.seed)
    x0, e0 = sample_initial_conditions(rng, model.n_x, model.n_e)
    trajs = {}
    for d in args.overlay_deadbands:
        cfg = TriggerConfig(
            deadband=d * protocol.num_nodes, horizon=5.0, step=1e-4
        )
        trajs[f"d={d}"] = simulate(model, protocol, cert, cfg, x0, e0)
    written = plots.emit_plots(summary, trajs, args.out)
    for p in written:
        print(f"figure            : {p}")
    return EXIT_OK


_COMMANDS = {
    "certify": _cmd_certify,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "table1": _cmd_table1,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ModelParseError, FileNotFoundError, ValueError) as exc:
        print(f"ncsim: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CertificationError as exc:
        print(f"ncsim: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFY
    except (SimulationError, experiment.SweepError) as exc:
        print(f"ncsim: simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATE


if __name__ == "__main__":
    sys.exit(main())
