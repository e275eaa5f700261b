"""Command-line front end: single-shot estimation and experiment presets.

``estimate`` runs the estimator on one channel (from a JSON file or freshly
sampled) and reports the recovered paths. ``experiment`` runs seeded Monte
Carlo sweeps (three figure presets plus ``custom``) and writes trial CSVs,
an aggregate CSV keyed by the sweep variables, a reproduction manifest and
optional SVG charts.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .channel_model import (
    DelayDistribution,
    MultipathChannel,
    OfdmConfig,
    cfr,
    channel_from_json,
    channel_to_json,
    pilot_observation,
    sample_channel,
)
from .errors import GsdSceError
from .estimator import GsdOptions, estimate
from .evaluation import (
    ExperimentConfig,
    NMSE_CDF_GRID,
    nmse,
    run_experiment,
    summarize,
    write_aggregate_csv,
    write_trial_csv,
)
from .svgchart import line_chart

DEFAULT_SEED = 1729

DEFAULT_OFDM = dict(
    n_subcarriers=360,
    subcarrier_spacing=60e3,
    pilot_spacing=12,
    pilot_symbol=1.0 + 0.0j,
    modulation_order=1024,
)
DEFAULT_RATE = 2e6  # mean excess delay 5e-7 s

FIG1_TAU_GRID_US = (0.6, 0.8, 1.0, 1.2, 1.389, 1.6, 1.8, 2.1, 2.5, 3.0)
FIG2_K_GRID = (40, 32, 24, 20, 16, 13, 12, 10, 8, 6, 5, 4)
FIG2_TAU_US = (1.0, math.inf)
FIG3_PATHS = (4, 8)

CONFIG_KEYS = {
    "n_subcarriers": int,
    "delta_f_hz": float,
    "pilot_spacing": int,
    "modulation_order": int,
    "path_count": int,
    "rate_inv_s": float,
    "tau_max_s": float,
    "trials": int,
    "seed": int,
    "methods": str,
}


class CliError(Exception):
    pass


def parse_config_file(path) -> dict:
    """Flat ``key = value`` configuration; '#' starts a comment."""
    values: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    if "methods" in values:
        values["methods"] = tuple(m.strip() for m in values["methods"].split(",") if m.strip())
    return values


def _ofdm_from_config(values: dict) -> OfdmConfig:
    return OfdmConfig(
        n_subcarriers=values.get("n_subcarriers", DEFAULT_OFDM["n_subcarriers"]),
        subcarrier_spacing=values.get("delta_f_hz", DEFAULT_OFDM["subcarrier_spacing"]),
        pilot_spacing=values.get("pilot_spacing", DEFAULT_OFDM["pilot_spacing"]),
        pilot_symbol=DEFAULT_OFDM["pilot_symbol"],
        modulation_order=values.get("modulation_order", DEFAULT_OFDM["modulation_order"]),
    )


def _gsd_options(cfg: OfdmConfig, path_count: int) -> GsdOptions:
    l_max = min(max(8, path_count), (cfg.pilot_count - 1) // 2)
    return GsdOptions(l_max=max(1, l_max))


def _experiment_point(cfg, path_count, dist, seed, trials, methods) -> ExperimentConfig:
    return ExperimentConfig(
        base_seed=seed,
        trial_count=trials,
        cfg=cfg,
        path_count=path_count,
        dist=dist,
        methods=methods,
        gsd_options=_gsd_options(cfg, path_count),
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:g}"
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsdsce",
        description="Sparse channel estimation by geometric sequence decomposition",
    )
    parser.add_argument("--version", action="version", version=f"gsdsce {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate one channel and report the recovered paths")
    est.add_argument("--channel", type=Path, help="channel JSON file (gains / delays_s)")
    est.add_argument("--paths", type=int, help="sample a fresh channel with this many paths")
    est.add_argument("--rate-inv-s", type=float, default=1.0 / DEFAULT_RATE,
                     help="mean excess delay in seconds for sampled channels")
    est.add_argument("--tau-max-s", type=float, default=math.inf,
                     help="delay truncation in seconds for sampled channels (inf = unbounded)")
    est.add_argument("--config", type=Path, help="OFDM configuration file")
    est.add_argument("--seed", type=int, default=DEFAULT_SEED)
    est.add_argument("--out-dir", type=Path, default=Path("."))
    est.add_argument("--include-cfr", action="store_true",
                     help="embed the full reconstructed response in the output JSON")

    exp = sub.add_parser("experiment", help="run a Monte Carlo experiment preset")
    exp.add_argument("--preset", choices=("fig1", "fig2", "fig3", "custom"), required=True)
    exp.add_argument("--config", type=Path, help="configuration file (custom preset)")
    exp.add_argument("--trials", type=int, help="override trials per sweep point")
    exp.add_argument("--seed", type=int, help="override the base seed")
    exp.add_argument("--out-dir", type=Path, default=Path("results"))
    exp.add_argument("--plot", action="store_true", help="also write SVG charts")
    exp.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    exp.add_argument("--tau-grid-us", type=str,
                     help="fig1 override: comma-separated tau_max grid in microseconds")
    exp.add_argument("--k-grid", type=str,
                     help="fig2 override: comma-separated pilot spacings")
    exp.add_argument("--paths", type=str,
                     help="fig3 override: comma-separated path counts")
    return parser


def _load_channel(path: Path) -> MultipathChannel:
    try:
        return channel_from_json(path.read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except ValueError as exc:
        raise CliError(f"{path}: {exc}")


def cmd_estimate(args) -> int:
    values = parse_config_file(args.config) if args.config else {}
    cfg = _ofdm_from_config(values)

    if (args.channel is None) == (args.paths is None):
        raise CliError("exactly one of --channel or --paths is required")
    if args.channel is not None:
        channel = _load_channel(args.channel)
    else:
        dist = DelayDistribution(rate=1.0 / args.rate_inv_s, tau_max=args.tau_max_s)
        rng = np.random.default_rng(args.seed)
        channel = sample_channel(rng, args.paths, dist)

    s = pilot_observation(channel, cfg)
    est = estimate(s, cfg, _gsd_options(cfg, channel.path_count))
    h_true = cfr(channel, cfg)
    estimate_nmse = nmse(h_true, est.cfr_hat)

    print(f"detected paths: {est.detected_paths}")
    for i, (gain, delay) in enumerate(zip(est.gains_hat, est.delays_hat)):
        print(f"  path {i}: gain {gain.real:+.6f}{gain.imag:+.6f}j   delay {delay * 1e6:.6f} us")
    print(f"NMSE vs true channel: {estimate_nmse:.3e}")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = args.out_dir / "estimate.json"
    doc = {
        "version": __version__,
        "seed": args.seed,
        "ofdm": {
            "n_subcarriers": cfg.n_subcarriers,
            "delta_f_hz": cfg.subcarrier_spacing,
            "pilot_spacing": cfg.pilot_spacing,
            "modulation_order": cfg.modulation_order,
        },
        "channel": json.loads(channel_to_json(channel)),
        "estimate": est.to_json_dict(include_cfr=args.include_cfr),
        "nmse": estimate_nmse,
    }
    out_path.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out_path}")
    return 0


def _preset_points(args, values: dict):
    """Resolve a preset into (key_names, [(key, ExperimentConfig), ...])."""
    seed = args.seed if args.seed is not None else values.get("seed", DEFAULT_SEED)
    trials = args.trials if args.trials is not None else values.get("trials", 5000)
    cfg = _ofdm_from_config(values)

    if args.preset == "fig1":
        taus_us = FIG1_TAU_GRID_US
        if args.tau_grid_us:
            taus_us = tuple(float(v) for v in args.tau_grid_us.split(","))
        points = []
        for tau_us in taus_us:
            dist = DelayDistribution(rate=DEFAULT_RATE, tau_max=tau_us * 1e-6)
            ec = _experiment_point(cfg, 4, dist, seed, trials, ("gsd", "omp", "cubic"))
            points.append(((tau_us,), ec))
        return ("tau_max_us",), points

    if args.preset == "fig2":
        k_grid = FIG2_K_GRID
        if args.k_grid:
            k_grid = tuple(int(v) for v in args.k_grid.split(","))
        points = []
        for k in k_grid:
            cfg_k = OfdmConfig(
                cfg.n_subcarriers, cfg.subcarrier_spacing, k, cfg.pilot_symbol, cfg.modulation_order
            )
            for tau_us in FIG2_TAU_US:
                dist = DelayDistribution(rate=DEFAULT_RATE, tau_max=tau_us * 1e-6)
                ec = _experiment_point(cfg_k, 4, dist, seed, trials, ("gsd", "omp", "cubic"))
                points.append(((100.0 / k, tau_us), ec))
        return ("pilot_density_pct", "tau_max_us"), points

    if args.preset == "fig3":
        paths = FIG3_PATHS
        if args.paths:
            paths = tuple(int(v) for v in args.paths.split(","))
        dist = DelayDistribution(rate=DEFAULT_RATE)
        points = [
            ((L,), _experiment_point(cfg, L, dist, seed, trials, ("gsd",))) for L in paths
        ]
        return ("path_count",), points

    # custom: one point, fully config-driven
    path_count = values.get("path_count", 4)
    tau_max = values.get("tau_max_s", math.inf)
    rate = 1.0 / values.get("rate_inv_s", 1.0 / DEFAULT_RATE)
    methods = values.get("methods", ("gsd", "omp", "cubic"))
    dist = DelayDistribution(rate=rate, tau_max=tau_max)
    ec = _experiment_point(cfg, path_count, dist, seed, trials, methods)
    return ("path_count", "tau_max_us"), [((path_count, tau_max * 1e6), ec)]


def _plot_experiment(preset, key_names, keyed_rows, out_dir) -> list[Path]:
    written = []
    if preset == "fig3":
        series = [
            (f"gsd L={key[0]}", list(NMSE_CDF_GRID), list(row.nmse_cdf))
            for key, row in keyed_rows
            if row.method == "gsd"
        ]
        path = out_dir / f"{preset}_nmse_cdf.svg"
        line_chart(path, series, title="Empirical CDF of NMSE", xlabel="NMSE",
                   ylabel="CDF", xlog=True)
        written.append(path)
        return written

    # SE against the first sweep key, one line per method (and per remaining keys)
    series_map: dict = {}
    for key, row in keyed_rows:
        label = row.method if len(key) == 1 else f"{row.method} {key_names[1]}={_fmt(key[1])}"
        series_map.setdefault(label, []).append((key[0], row.mean_se))
    series = [
        (label, [p[0] for p in sorted(pts)], [p[1] for p in sorted(pts)])
        for label, pts in sorted(series_map.items())
    ]
    path = out_dir / f"{preset}_se.svg"
    line_chart(path, series, title="Mean spectral efficiency", xlabel=key_names[0],
               ylabel="SE (bits/s/Hz)")
    written.append(path)
    return written


def cmd_experiment(args) -> int:
    values = parse_config_file(args.config) if args.config else {}
    key_names, points = _preset_points(args, values)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    keyed_rows = []
    outputs = []
    for key, ec in points:
        records = run_experiment(ec, workers=args.workers)
        suffix = "_".join(f"{name}_{_fmt(value)}" for name, value in zip(key_names, key))
        trial_path = args.out_dir / f"{args.preset}_trials_{suffix}.csv"
        write_trial_csv(records, trial_path)
        outputs.append(trial_path)
        for row in summarize(records):
            keyed_rows.append((key, row))
        print(f"{args.preset} point {suffix}: {ec.trial_count} trials done")

    aggregate_path = args.out_dir / f"{args.preset}_aggregate.csv"
    write_aggregate_csv(keyed_rows, key_names, aggregate_path)
    outputs.append(aggregate_path)

    if args.plot:
        outputs.extend(_plot_experiment(args.preset, key_names, keyed_rows, args.out_dir))

    manifest = {
        "package": "gsdsce",
        "version": __version__,
        "command": "experiment",
        "preset": args.preset,
        "workers": args.workers,
        "key_names": list(key_names),
        "points": [
            {
                "key": [None if isinstance(v, float) and math.isinf(v) else v for v in key],
                "base_seed": ec.base_seed,
                "trials": ec.trial_count,
                "path_count": ec.path_count,
                "methods": list(ec.methods),
                "delay_rate_per_s": ec.dist.rate,
                "tau_max_s": None if math.isinf(ec.dist.tau_max) else ec.dist.tau_max,
                "ofdm": {
                    "n_subcarriers": ec.cfg.n_subcarriers,
                    "delta_f_hz": ec.cfg.subcarrier_spacing,
                    "pilot_spacing": ec.cfg.pilot_spacing,
                    "modulation_order": ec.cfg.modulation_order,
                },
                "gsd_options": asdict(ec.gsd_options),
                "omp": {
                    "grid_size": ec.omp_grid_size,
                    "max_iterations": ec.omp_max_iterations or ec.path_count,
                    "residual_threshold": ec.omp_residual_threshold,
                },
                "data_symbols_per_trial": ec.n_data_symbols,
            }
            for key, ec in points
        ],
        "outputs": [p.name for p in outputs],
    }
    manifest_path = args.out_dir / f"{args.preset}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {aggregate_path} and {manifest_path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            return cmd_estimate(args)
        return cmd_experiment(args)
    except (CliError, GsdSceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
