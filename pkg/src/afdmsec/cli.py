"""Command-line entry point: validate configs, run campaigns, print bound reports."""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .config import ExperimentConfig, load_config, parse_config
from .errors import ConfigurationError, NumericalRankError
from .experiments import (config_digest, run_ber_vs_mismatch, run_ber_vs_snr,
                          run_c2_sweep, write_sweep_csv)
from .phasefn import CONVENTIONAL, df_dc2, df_dkappa
from .security import (EveModel, MismatchSweepSpec, SearchAxis,
                       brute_force_search, complexity_estimate,
                       find_threshold_crossing, intercept,
                       system_mismatch_bound)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _write_text(path: str, text: str) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _curve_path(output: str, label: str, many: bool) -> str:
    if not many:
        return output
    stem, dot, ext = output.rpartition(".")
    slug = label.replace(" ", "-")
    if not dot:
        return f"{output}_{slug}"
    return f"{stem}_{slug}.{ext}"


def _experiment_digest(cfg: ExperimentConfig) -> str:
    # the output path is not part of the experiment identity
    return config_digest({k: v for k, v in cfg.raw.items() if k != "output"})


def _base_summary(cfg: ExperimentConfig) -> dict:
    return {
        "config_sha256": _experiment_digest(cfg),
        "seed": cfg.scenario.master_seed,
    }


def _run_ber_vs_mismatch(cfg: ExperimentConfig) -> list[str]:
    p = cfg.campaign_params
    written = []
    many = len(p["curves"]) > 1
    for curve in p["curves"]:
        scn = replace(cfg.scenario, afdm=replace(cfg.scenario.afdm,
                                                 phase=curve["phase"]))
        points = run_ber_vs_mismatch(scn, p["delta_grid"], axis=p["axis"],
                                     early_stop_errors=p["early_stop_errors"])
        interval = find_threshold_crossing(points, p["threshold"])
        summary = _base_summary(cfg) | {
            "label": curve["label"],
            "axis": p["axis"],
            "threshold": p["threshold"],
            "delta_star": f"{interval.delta_star:.6e}",
            "status": interval.status,
            "bracket": interval.bracket,
        }
        path = _curve_path(cfg.output, curve["label"], many)
        write_sweep_csv(path, "delta", points, scn.bits_per_frame, summary)
        written.append(path)
    return written


def _run_ber_vs_snr(cfg: ExperimentConfig) -> list[str]:
    p = cfg.campaign_params
    written = []
    many = len(p["curves"]) > 1
    for curve in p["curves"]:
        scn = replace(cfg.scenario, afdm=replace(cfg.scenario.afdm,
                                                 phase=curve["phase"]))
        points = run_ber_vs_snr(scn, p["snr_grid"], curve["delta"])
        summary = _base_summary(cfg) | {
            "label": curve["label"],
            "delta": f"{curve['delta']:.6e}",
        }
        path = _curve_path(cfg.output, curve["label"], many)
        write_sweep_csv(path, "snr_db", points, scn.bits_per_frame, summary)
        written.append(path)
    return written


def _run_c2_sweep(cfg: ExperimentConfig) -> list[str]:
    p = cfg.campaign_params
    sweep = MismatchSweepSpec(
        delta_grid=p["delta_grid"],
        snr_db=cfg.scenario.snr_db,
        trials_per_point=cfg.scenario.trials,
    )
    results = run_c2_sweep(cfg.scenario, p["c2_values"], p["b"], sweep,
                           threshold=p["threshold"])
    written = []
    summary_rows = []
    for c2, interval, degenerate in results:
        label = f"c2-{c2:g}"
        summary = _base_summary(cfg) | {
            "label": label,
            "threshold": p["threshold"],
            "delta_star": f"{interval.delta_star:.6e}",
            "status": interval.status,
            "degenerate_subcarriers": degenerate,
        }
        path = _curve_path(cfg.output, label, many=True)
        write_sweep_csv(path, "delta", list(interval.points),
                        cfg.scenario.bits_per_frame, summary)
        written.append(path)
        summary_rows.append((c2, interval, degenerate))
    stem, dot, ext = cfg.output.rpartition(".")
    summary_path = f"{stem}_summary.{ext}" if dot else f"{cfg.output}_summary"
    lines = ["c2,delta_star,status,degenerate_subcarriers"]
    for c2, interval, degenerate in summary_rows:
        lines.append(f"{c2:.10e},{interval.delta_star:.6e},"
                     f"{interval.status},{degenerate}")
    lines.append(f"# config_sha256 = {_experiment_digest(cfg)}")
    lines.append(f"# seed = {cfg.scenario.master_seed}")
    _write_text(summary_path, "\n".join(lines) + "\n")
    written.append(summary_path)
    return written


def _run_eavesdrop_search(cfg: ExperimentConfig) -> list[str]:
    p = cfg.campaign_params
    axes = tuple(
        SearchAxis(ax["name"], tuple(np.linspace(ax["start"], ax["stop"],
                                                 ax["points"])))
        for ax in p["axes"]
    )
    eve = EveModel(axes=axes, template=cfg.scenario.afdm.phase,
                   success_ber_threshold=p["threshold"])
    obs = intercept(cfg.scenario, p["pilot_frames"])
    result = brute_force_search(eve, obs)
    lines = ["axis,best_value"]
    for name, value in result.best_params.items():
        lines.append(f"{name},{value:.12e}")
    lines.append(f"# best_ber = {result.best_ber:.6e}")
    lines.append(f"# success = {str(result.success).lower()}")
    lines.append(f"# candidates_evaluated = {result.evaluated}")
    lines.append(f"# elapsed_s = {result.elapsed_s:.3f}")
    lines.append(f"# per_candidate_s = {result.per_candidate_s:.3e}")
    lines.append(f"# threshold = {p['threshold']}")
    lines.append(f"# config_sha256 = {_experiment_digest(cfg)}")
    lines.append(f"# seed = {cfg.scenario.master_seed}")
    _write_text(cfg.output, "\n".join(lines) + "\n")
    return [cfg.output]


def _bound_report_text(cfg: ExperimentConfig, epsilon: float,
                       include_kappa: bool, kappa_range: tuple) -> str:
    scn = cfg.scenario
    phase = scn.afdm.phase
    n = scn.afdm.n
    out = []
    out.append(f"bound report: N={n}, epsilon={epsilon:g}")
    out.append("phase: " + ", ".join(f"{k}={v}" for k, v in phase.to_dict().items()))
    axes = ("c2", "kappa") if include_kappa else ("c2",)
    est = complexity_estimate(phase, n, axes, epsilon=epsilon,
                              kappa_range=kappa_range)
    for axis in axes:
        bound = system_mismatch_bound(phase, n, epsilon, axis=axis)
        out.append(f"axis {axis}:")
        if bound.argmin_m < 0:
            out.append("  all subcarriers degenerate (zero derivative)")
        else:
            out.append(
                f"  binding subcarrier m={bound.argmin_m}, "
                f"delta_max={bound.delta_max:.6e}"
            )
        out.append(f"  degenerate subcarriers: {bound.degenerate_count}/{n}")
        out.append(f"  estimated candidates: {est.per_axis_counts[axis]:.4e}")
    out.append(f"search order exponent: N^{est.order_exponent:g}")
    out.append(f"total estimated candidates: {est.total_count:.4e}")
    out.append("")
    header = "m,|df_dc2|,delta_max_c2"
    if include_kappa:
        header += ",|df_dkappa|,delta_max_kappa"
    out.append(header)
    c2b = system_mismatch_bound(phase, n, epsilon, axis="c2").per_m
    kb = (system_mismatch_bound(phase, n, epsilon, axis="kappa").per_m
          if include_kappa else None)
    for m in range(n):
        row = f"{m},{abs(df_dc2(phase, m)):.6e},{c2b[m]:.6e}"
        if include_kappa:
            row += f",{abs(df_dkappa(phase, m)):.6e},{kb[m]:.6e}"
        out.append(row)
    return "\n".join(out) + "\n"


def _bound_params(cfg: ExperimentConfig) -> tuple[float, bool, tuple]:
    if cfg.campaign == "bound-report":
        p = cfg.campaign_params
        return p["epsilon"], p["include_kappa"], p["kappa_range"]
    include_kappa = cfg.scenario.afdm.phase.kind != CONVENTIONAL
    return 0.1, include_kappa, (0.0, 1.0)


def _run_bound_report(cfg: ExperimentConfig) -> list[str]:
    epsilon, include_kappa, kappa_range = _bound_params(cfg)
    text = _bound_report_text(cfg, epsilon, include_kappa, kappa_range)
    _write_text(cfg.output, text)
    return [cfg.output]


_RUNNERS = {
    "ber-vs-mismatch": _run_ber_vs_mismatch,
    "ber-vs-snr": _run_ber_vs_snr,
    "c2-sweep": _run_c2_sweep,
    "eavesdrop-search": _run_eavesdrop_search,
    "bound-report": _run_bound_report,
}


def run_campaign(cfg: ExperimentConfig) -> list[str]:
    return _RUNNERS[cfg.campaign](cfg)


def _load_with_overrides(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    raw = cfg.raw
    changed = False
    if getattr(args, "seed", None) is not None:
        raw = {**raw, "scenario": {**raw["scenario"], "master_seed": args.seed}}
        changed = True
    if getattr(args, "trials", None) is not None:
        raw = {**raw, "scenario": {**raw["scenario"], "trials": args.trials}}
        changed = True
    if getattr(args, "out", None) is not None:
        raw = {**raw, "output": args.out}
        changed = True
    return parse_config(raw) if changed else cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdmsec",
        description="AFDM security simulation campaigns",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the campaign named in a config")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, help="override scenario.master_seed")
    run_p.add_argument("--trials", type=int, help="override scenario.trials")
    run_p.add_argument("--out", help="override the output path")

    val_p = sub.add_parser("validate", help="check a config without running it")
    val_p.add_argument("config")

    bound_p = sub.add_parser(
        "bound-report", help="print analytic mismatch bounds and search complexity"
    )
    bound_p.add_argument("config")
    bound_p.add_argument("--epsilon", type=float,
                         help="override the tolerable phase error (radians)")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            load_config(args.config)
            print(f"{args.config}: OK")
            return EXIT_OK
        if args.command == "bound-report":
            cfg = load_config(args.config)
            epsilon, include_kappa, kappa_range = _bound_params(cfg)
            if args.epsilon is not None:
                epsilon = args.epsilon
            sys.stdout.write(
                _bound_report_text(cfg, epsilon, include_kappa, kappa_range)
            )
            return EXIT_OK
        cfg = _load_with_overrides(args)
        for path in run_campaign(cfg):
            print(f"wrote {path}")
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalRankError as exc:
        print(f"numerical rank error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
