"""
Command-line entry point ``swipt-re``.

Subcommands::

    swipt-re run <config.json | preset> --out <dir>
    swipt-re solve-p3 --channel <file> --power <P> --qbar <Q> [--tol <t>]
    swipt-re gen-channel --m <M> --n <N> --var <v> --seed <s>

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 infeasible harvest target. ``SWIPT_RE_THREADS`` caps the worker count
(0 means one per CPU).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ChannelPair
from .errors import ConfigError, InfeasibleError, SwiptError
from .scenario import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_NONCONVERGED,
    EXIT_OK,
    generate_rayleigh_channel,
    list_presets,
    load_config,
    matrix_from_literal,
    matrix_to_literal,
    run_scenario,
)
from .solvers import solve_p3


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with 2 on bad usage, the same code as a config error
    parser = argparse.ArgumentParser(prog="swipt-re",
                                     description="Rate-energy regions for MIMO SWIPT links.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="trace every scheme of a scenario and write CSV files")
    run.add_argument("config", help=f"JSON file or preset ({', '.join(list_presets())})")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override a rayleigh scenario's seed")

    p3 = sub.add_parser("solve-p3", help="maximize rate subject to a harvested-power floor")
    p3.add_argument("--channel", required=True,
                    help="JSON file with h_matrix and optional g_matrix ([re, im] pairs)")
    p3.add_argument("--power", type=float, required=True)
    p3.add_argument("--qbar", type=float, required=True)
    p3.add_argument("--tol", type=float, default=1e-6, help="duality gap target in nats")
    p3.add_argument("--max-iter", type=int, default=5000)

    gen = sub.add_parser("gen-channel", help="print a seeded Rayleigh channel as JSON")
    gen.add_argument("--m", type=int, required=True, help="transmit antennas")
    gen.add_argument("--n", type=int, required=True, help="receive antennas")
    gen.add_argument("--var", type=float, default=1.0, help="per-element variance")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", default=None, help="write to this file instead of stdout")
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        if cfg.channel_source != "rayleigh":
            raise ConfigError("--seed: only valid for a rayleigh channel source")
        cfg = cfg.with_seed(args.seed)
    code = run_scenario(cfg, args.out)
    print(f"wrote {len(cfg.schemes)} curve(s) and manifest.json to {args.out}")
    if code == EXIT_NONCONVERGED:
        print("warning: some sweep points did not converge", file=sys.stderr)
    return code


def _load_channel(path: str) -> ChannelPair:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or "h_matrix" not in data:
        raise ConfigError(f"{path}: expected an object with h_matrix")
    h = matrix_from_literal(data["h_matrix"], "h_matrix")
    if data.get("g_matrix") is None:
        return ChannelPair.shared(h)
    g = matrix_from_literal(data["g_matrix"], "g_matrix")
    if g.shape[1] != h.shape[1]:
        raise ConfigError("g_matrix: transmit dimension differs from h_matrix")
    return ChannelPair(h, g)


def _cmd_solve_p3(args) -> int:
    channels = _load_channel(args.channel)
    if not args.power > 0:
        raise ConfigError(f"--power: must be > 0, got {args.power}")
    if args.qbar < 0:
        raise ConfigError(f"--qbar: must be >= 0, got {args.qbar}")
    sol = solve_p3(channels, args.power, args.qbar, tol=args.tol, max_iter=args.max_iter)
    out = {
        "rate": sol.rate,
        "harvested": sol.harvested,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "gap": sol.gap,
        "regime": sol.regime,
        "dual": None if sol.dual is None else {"lam": sol.dual.lam, "mu": sol.dual.mu},
        "covariance": matrix_to_literal(sol.covariance.s_matrix),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK if sol.converged else EXIT_NONCONVERGED


def _cmd_gen_channel(args) -> int:
    if args.m < 1 or args.n < 1:
        raise ConfigError("--m and --n must be >= 1")
    if not args.var > 0:
        raise ConfigError(f"--var: must be > 0, got {args.var}")
    h = generate_rayleigh_channel(args.m, args.n, args.var, args.seed)
    text = json.dumps({"h_matrix": matrix_to_literal(h)}, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "solve-p3": _cmd_solve_p3, "gen-channel": _cmd_gen_channel}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SwiptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
