"""Command-line entry point.

Commands: ``check`` (invariant suites), ``equiv`` (special-case reduction
deviations), ``encode`` (apply an encoding to a tensor file), ``grad``
(analytic vs finite-difference gradients), ``bench`` (kernel timings).
Exit codes: 0 success, 1 property failure, 2 usage/config error, 3 I/O
error. Everything except bench timings is deterministic given the seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import bench as bench_mod
from . import checks
from .encodings import (
    METHODS,
    EncodingMethod,
    TokenBlock,
    apply_encoding,
    care_apply,
    grid_positions,
    mixed_apply,
    quatro_apply,
    rope1d_apply,
    rotation_gradient,
    spherical_apply,
    unit_axis,
)
from .formats import (
    ConfigError,
    RunConfig,
    TensorFileError,
    build_method,
    config_positions,
    load_run_config,
    read_tensor,
    write_tensor,
)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_CONFIG = 2
EXIT_IO = 3

GRAD_H_SWEEP = (1e-4, 1e-5, 1e-6)
GRAD_DEFAULT_TOL = 1e-6
GRAD_CHANNEL_TOL = 1e-10
EQUIV_DEFAULT_TOL = 1e-10


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
    common.add_argument("--config", default=None, help="run config file path")
    common.add_argument(
        "--tolerance", type=float, default=None, help="pass/fail tolerance (overrides config)"
    )
    common.add_argument("--output", default=None, help="write report/tensor here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="garope", description="rotary positional encodings over quaternion/Clifford rotors"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="run the named invariant suites")
    sub.add_parser("equiv", parents=[common], help="measure the special-case reductions")
    p_enc = sub.add_parser("encode", parents=[common], help="encode a rank-3 tensor file")
    p_enc.add_argument("input", help="input tensor file (batch x tokens x head_dim)")
    sub.add_parser("grad", parents=[common], help="analytic vs finite-difference gradients")
    p_bench = sub.add_parser("bench", parents=[common], help="time the rotation kernels")
    p_bench.add_argument("--reps", type=int, default=50, help="timing repetitions (min 30)")
    p_bench.add_argument("--batch", type=int, default=2, help="batch size of the workload")
    p_bench.add_argument(
        "--kernels", default=None, help="comma-separated kernel subset (default: all)"
    )
    return parser


def _load_config(args) -> RunConfig:
    if args.config is None:
        return RunConfig()
    return load_run_config(args.config)


def _seed(args, config: RunConfig) -> int:
    if args.seed is not None:
        return args.seed
    return config.seed


def _tolerance(args, config: RunConfig, default: float) -> float:
    if args.tolerance is not None:
        return args.tolerance
    if config.tolerance is not None:
        return config.tolerance
    return default


def _emit(text: str, args) -> None:
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_check(args) -> int:
    config = _load_config(args)
    seed = _seed(args, config)
    results = checks.run_all(seed)
    lines = [
        f"{'ok  ' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results
    ]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} suites passed (seed {seed})")
    _emit("\n".join(lines) + "\n", args)
    if passed != len(results):
        failing = ", ".join(r.name for r in results if not r.passed)
        print(f"failing suites: {failing}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_equiv(args) -> int:
    config = _load_config(args)
    seed = _seed(args, config)
    tol = _tolerance(args, config, EQUIV_DEFAULT_TOL)
    dev = checks.reduction_deviations(
        seed, samples=1000, grid_h=config.grid_h, grid_w=config.grid_w, base=config.base
    )
    lines = ["reduction,max_abs_dev,tolerance,pass"]
    all_ok = True
    for name, value in dev.items():
        ok = value <= tol
        all_ok &= ok
        lines.append(f"{name},{value!r},{tol!r},{'true' if ok else 'false'}")
    _emit("\n".join(lines) + "\n", args)
    if not all_ok:
        worst = max(dev, key=dev.get)
        print(f"reduction {worst} exceeded tolerance: {dev[worst]!r} > {tol!r}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_encode(args) -> int:
    config = _load_config(args)
    if args.output is None:
        print("encode requires --output", file=sys.stderr)
        return EXIT_CONFIG
    arr = read_tensor(args.input)
    if arr.ndim != 3:
        print(f"input must be rank 3 (batch x tokens x head_dim), got rank {arr.ndim}", file=sys.stderr)
        return EXIT_CONFIG
    batch, tokens, head_dim = arr.shape
    if "head_dim" in config.explicit_keys and config.head_dim != head_dim:
        print(
            f"config head_dim {config.head_dim} does not match tensor head_dim {head_dim}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    if tokens != config.grid_h * config.grid_w:
        print(
            f"tensor has {tokens} tokens but the {config.grid_h}x{config.grid_w} grid "
            f"needs {config.grid_h * config.grid_w}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    method = build_method(dataclasses.replace(config, head_dim=head_dim))
    block = TokenBlock(data=arr.astype(np.float64), positions=config_positions(config))
    out = apply_encoding(block, method, inverse=config.invert)
    write_tensor(args.output, out.data.astype(arr.dtype, copy=False))
    return EXIT_OK


def _grad_case(tag: str, rng: np.random.Generator, positions: np.ndarray, schedule):
    """One random gradient sample: carrier, position, angle and axes."""
    from .encodings import METHOD_WIDTHS

    v = rng.standard_normal(METHOD_WIDTHS[tag])
    p = positions[rng.integers(0, positions.shape[0])]
    theta = float(schedule.band_angles[rng.integers(0, schedule.num_bands)])
    axis_x = unit_axis(rng.standard_normal(3))
    axis_y = axis_x if tag == "mixed" else unit_axis(rng.standard_normal(3))
    return v, p, theta, axis_x, axis_y


def _grad_fd(tag, v, ax, ay, axis_x, axis_y, coordinate, h):
    def f(dx, dy):
        if tag == "rope1d":
            return rope1d_apply(v, ax + dx)
        if tag == "mixed":
            return mixed_apply(v, (ax + dx) + (ay + dy), axis_x)
        if tag == "spherical":
            return spherical_apply(v, ax + dx, ay + dy)
        if tag == "quatro":
            return quatro_apply(v, ax + dx, ay + dy, axis_x, axis_y)
        return care_apply(v, ax + dx, ay + dy, axis_x, axis_y)

    if coordinate == "angle_x":
        return (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h)
    return (f(0.0, h) - f(0.0, -h)) / (2.0 * h)


def cmd_grad(args) -> int:
    config = _load_config(args)
    seed = _seed(args, config)
    tol = _tolerance(args, config, GRAD_DEFAULT_TOL)
    positions = config_positions(config)
    schedule = EncodingMethod.configure("quatro", 64, base=config.base).schedule
    scales = (config.coord_scale_x, config.coord_scale_y)
    samples_per_case = 100

    lines = ["case,coordinate,h,max_rel_err,pass"]
    all_ok = True
    worst_label, worst_val = "", -1.0
    for tag_index, tag in enumerate(METHODS):
        for coord_index, coordinate in enumerate(("angle_x", "angle_y")):
            rng = np.random.default_rng([seed, 2 * tag_index + coord_index])
            cases = [
                _grad_case(tag, rng, positions, schedule)
                for _ in range(samples_per_case)
            ]
            for h in GRAD_H_SWEEP:
                worst = 0.0
                for v, p, theta, axis_x, axis_y in cases:
                    g = rotation_gradient(
                        tag, v, p, theta, coordinate,
                        axis_x=axis_x, axis_y=axis_y,
                        scale_x=scales[0], scale_y=scales[1],
                    )
                    ax = theta * scales[0] * float(p[0])
                    ay = theta * scales[1] * float(p[1])
                    fd = _grad_fd(tag, v, ax, ay, axis_x, axis_y, coordinate, h)
                    rel = float(np.max(np.abs(g - fd))) / max(1.0, float(np.max(np.abs(fd))))
                    worst = max(worst, rel)
                ok = worst <= tol
                all_ok &= ok
                if worst > worst_val:
                    worst_label, worst_val = f"{tag}/{coordinate} at h={h:g}", worst
                lines.append(f"{tag},{coordinate},{h:g},{worst!r},{'true' if ok else 'false'}")

    # invariant channels: care scalar/e123 slots must have zero sensitivity
    rng = np.random.default_rng([seed, 999])
    chan_worst = 0.0
    for _ in range(samples_per_case):
        v, p, theta, axis_x, axis_y = _grad_case("care", rng, positions, schedule)
        for coordinate in ("angle_x", "angle_y"):
            g = rotation_gradient(
                "care", v, p, theta, coordinate,
                axis_x=axis_x, axis_y=axis_y, scale_x=scales[0], scale_y=scales[1],
            )
            ax = theta * scales[0] * float(p[0])
            ay = theta * scales[1] * float(p[1])
            fd = _grad_fd("care", v, ax, ay, axis_x, axis_y, coordinate, 1e-5)
            chan_worst = max(chan_worst, float(np.max(np.abs(g[[0, 7]]))))
            chan_worst = max(chan_worst, float(np.max(np.abs(fd[[0, 7]]))))
    chan_ok = chan_worst <= GRAD_CHANNEL_TOL
    all_ok &= chan_ok
    lines.append(
        f"care_invariant_channels,both,1e-05,{chan_worst!r},{'true' if chan_ok else 'false'}"
    )
    _emit("\n".join(lines) + "\n", args)
    if not all_ok:
        print(f"gradient check failed: {worst_label} rel err {worst_val!r}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _load_config(args)
    seed = _seed(args, config)
    kernels = None
    if args.kernels is not None:
        kernels = tuple(k.strip() for k in args.kernels.split(",") if k.strip())
    report = bench_mod.run_bench(
        batch=args.batch,
        tokens=config.grid_h * config.grid_w,
        head_dim=config.head_dim,
        reps=args.reps,
        seed=seed,
        kernels=kernels,
    )
    _emit(report.to_csv(), args)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "check": cmd_check,
    "equiv": cmd_equiv,
    "encode": cmd_encode,
    "grad": cmd_grad,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TensorFileError as exc:
        print(f"tensor file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
