"""Command-line entry point: ``swkde generate|track|sweep-window|sweep-bandwidth``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from swkde.bench import (
    DEFAULT_BANDWIDTHS,
    DEFAULT_WINDOWS,
    emit_results,
    render_results,
    run_tracking,
    sweep_bandwidth,
    sweep_window,
)
from swkde.synthgen import GeneratorConfig, generate, load_dataset, save_dataset
from swkde.tracker import PARAM_MODES, SCHEMES, TrackerConfig


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_generator_flags(p, with_seed=True):
    d = GeneratorConfig()
    if with_seed:
        p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--batches", type=int, default=d.num_batches, help="number of batches per dataset")
    p.add_argument("--mu0", type=float, default=d.mu0)
    p.add_argument("--gamma0", type=float, default=d.gamma0)
    p.add_argument("--mu-step", type=float, default=d.mu_step, help="half-width of the mean increment")
    p.add_argument("--gamma-step", type=float, default=d.gamma_step, help="half-width of the std increment")
    p.add_argument("--n-min", type=int, default=d.n_min)
    p.add_argument("--n-max", type=int, default=d.n_max)
    p.add_argument("--start-at-origin", action="store_true", help="sample batch 1 at (mu0, gamma0)")


def _generator_config(args, seed=None) -> GeneratorConfig:
    return GeneratorConfig(
        seed=args.seed if seed is None else seed,
        num_batches=args.batches,
        mu0=args.mu0,
        gamma0=args.gamma0,
        mu_step=args.mu_step,
        gamma_step=args.gamma_step,
        n_min=args.n_min,
        n_max=args.n_max,
        start_at_origin=args.start_at_origin,
    )


def _modes(mode):
    return list(PARAM_MODES) if mode == "both" else [mode]


def _mode_path(out, mode, multi):
    if not multi:
        return out
    p = Path(out)
    return p.with_name(f"{p.stem}.{mode}{p.suffix}")


def _write(items, fmt, out):
    if out in (None, "-"):
        sys.stdout.write(render_results(items, fmt))
    else:
        emit_results(items, fmt, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swkde", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic evolving-Gaussian dataset")
    _add_generator_flags(g)
    g.add_argument("--out", required=True)

    t = sub.add_parser("track", help="run one tracker over a dataset and emit per-step errors")
    t.add_argument("--data", required=True)
    t.add_argument("--scheme", choices=SCHEMES, default="dynamic")
    t.add_argument("--window", type=int, default=5)
    t.add_argument("--bandwidth", type=float, default=1.0)
    t.add_argument("--beta", type=float, default=0.1)
    t.add_argument("--mode", choices=[*PARAM_MODES, "both"], default="plugin")
    t.add_argument("--out", default="-", help="output path; '-' for stdout")
    t.add_argument("--format", choices=("csv", "json"), default="csv")

    for name, values_flag, values_type, values_default, fixed_flag, fixed_type, fixed_default in (
        ("sweep-window", "--windows", _int_list, DEFAULT_WINDOWS, "--bandwidth", float, 1.0),
        ("sweep-bandwidth", "--bandwidths", _float_list, DEFAULT_BANDWIDTHS, "--window", int, 5),
    ):
        s = sub.add_parser(name, help=f"Monte-Carlo sweep over {values_flag[2:]}")
        s.add_argument("--seeds", type=int, default=20, help="number of Monte-Carlo runs")
        s.add_argument("--seed-base", type=int, default=0)
        s.add_argument(values_flag, type=values_type, default=list(values_default))
        s.add_argument(fixed_flag, type=fixed_type, default=fixed_default)
        s.add_argument("--beta", type=float, default=0.1)
        s.add_argument("--schemes", type=lambda v: v.split(","), default=list(SCHEMES))
        s.add_argument("--mode", choices=[*PARAM_MODES, "both"], default="plugin")
        s.add_argument("--jobs", type=int, default=1, help="worker processes")
        s.add_argument("--out", default="-")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        _add_generator_flags(s, with_seed=False)
    return parser


def _cmd_generate(args):
    save_dataset(generate(_generator_config(args)), args.out)


def _cmd_track(args):
    dataset = load_dataset(args.data)
    modes = _modes(args.mode)
    if len(modes) > 1 and args.out in (None, "-"):
        raise ValueError("--mode both needs --out (one file per mode)")
    for mode in modes:
        cfg = TrackerConfig(args.window, args.bandwidth, args.scheme, args.beta, mode)
        _write(run_tracking(dataset, cfg), args.format, _mode_path(args.out, mode, len(modes) > 1))


def _cmd_sweep(args):
    if args.seeds < 1:
        raise ValueError("--seeds must be at least 1")
    for scheme in args.schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
    seeds = range(args.seed_base, args.seed_base + args.seeds)
    gen_base = _generator_config(args, seed=args.seed_base)
    modes = _modes(args.mode)
    if len(modes) > 1 and args.out in (None, "-"):
        raise ValueError("--mode both needs --out (one file per mode)")
    for mode in modes:
        if args.command == "sweep-window":
            base = TrackerConfig(bandwidth=args.bandwidth, beta=args.beta, param_mode=mode)
            result = sweep_window(seeds, args.windows, base, gen_base, args.schemes, args.jobs)
        else:
            base = TrackerConfig(window=args.window, beta=args.beta, param_mode=mode)
            result = sweep_bandwidth(seeds, args.bandwidths, base, gen_base, args.schemes, args.jobs)
        _write(result, args.format, _mode_path(args.out, mode, len(modes) > 1))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"generate": _cmd_generate, "track": _cmd_track}.get(args.command, _cmd_sweep)
    try:
        handler(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"swkde: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
