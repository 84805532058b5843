"""Command line front end.

Every subcommand writes CSV, either to stdout or to ``-o PATH``.  The file
starts with ``#``-prefixed comment lines recording the tool version and the
full resolved configuration, so a result file is self-describing and two runs
with identical configurations produce identical bytes.  The Monte Carlo
thread count is deliberately not part of the recorded configuration: results
are bit-identical for any thread count.

SNR values are accepted either as linear ratios (default) or in dB with
``--snr-unit db``; they are converted once at parse time and all outputs and
headers use the linear scale (the ``perr`` table also prints a dB column).
Grids are given as comma lists (``1,10,100``) or ranges (``start:stop:step``,
end inclusive).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .channel import eve_transmittance, load_channel_model, total_input_noise
from .constellation import build_constellation, permute_constellation
from .errors import DomainError, InsufficientTrialsError
from .manifold import CURVE_KINDS, OutageParams, perr_amqd, perr_single, tradeoff_curve
from .montecarlo import (
    TrialConfig,
    estimate_mean_fade_outage,
    estimate_rate_outage,
)
from .rates import (
    optimal_attack_noise,
    private_capacity_complex,
    rate_report,
    subchannel_capacity,
    svd_capacity,
)
from .singular_layer import load_matrix_csv, reconstruct, svd_decompose

_MC_CONFIG_KEYS = (
    "mode",
    "l",
    "multiplex",
    "snr",
    "snr_unit",
    "trials",
    "seed",
    "fade_variance",
    "threads",
)


def _parse_grid(text: str) -> list[float]:
    """Parse ``a,b,c`` lists or ``start:stop:step`` inclusive ranges."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad range {text!r}: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError(f"empty grid {text!r}")
    return values


def _to_linear(values: list[float], unit: str) -> list[float]:
    if unit == "db":
        return [10.0 ** (v / 10.0) for v in values]
    return values


def _format_value(value, fmt: str) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt.format(float(value))
    return str(value)


def _emit(output, subcommand: str, params: dict, columns, rows, precision: int) -> None:
    fmt = f"{{:.{precision}g}}"
    lines = [f"# tool=mcqkd {__version__}", f"# subcommand={subcommand}"]
    for key in sorted(params):
        lines.append(f"# {key}={params[key]}")
    if columns:
        lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_value(v, fmt) for v in row))
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid_param(values: list[float]) -> str:
    return ",".join(f"{v:.9g}" for v in values)


def _run_tradeoff(args) -> int:
    grid = _parse_grid(args.grid)
    curve = tradeoff_curve(
        args.kind,
        grid,
        z_exponent=args.z,
        l=args.l,
        g_scale=args.g,
        k_in=args.k_in,
        k_out=args.k_out,
    )
    params = {"kind": args.kind, "grid": _grid_param(grid)}
    params.update({k: v for k, v in curve.params.items()})
    _emit(
        args.output,
        "tradeoff",
        params,
        ("sigma", "delta"),
        curve.points,
        args.precision,
    )
    return 0


def _run_perr(args) -> int:
    snr = _to_linear(_parse_grid(args.snr), args.snr_unit)
    l_values = [int(v) for v in _parse_grid(args.l)]
    if any(v < 1 for v in l_values):
        raise ValueError("every l must be >= 1")
    columns = ["snr_db", "p_single"] + [f"p_amqd_l{v}" for v in l_values]
    rows = []
    for s in snr:
        row = [10.0 * math.log10(s), perr_single(OutageParams(s, args.multiplex))]
        row.extend(
            perr_amqd(OutageParams(s, args.multiplex, l=v)) for v in l_values
        )
        rows.append(row)
    params = {
        "snr": _grid_param(snr),
        "multiplex": args.multiplex,
        "l": ",".join(str(v) for v in l_values),
    }
    _emit(args.output, "perr", params, columns, rows, args.precision)
    return 0


def _read_mc_config(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or not value:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            if key not in _MC_CONFIG_KEYS:
                raise ValueError(
                    f"{path}:{lineno}: unknown key {key!r}; allowed: {', '.join(_MC_CONFIG_KEYS)}"
                )
            if key in out:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value
    return out


def _run_mc(args) -> int:
    settings: dict[str, str] = {}
    if args.config:
        settings = _read_mc_config(args.config)
    flag_values = {
        "mode": args.mode,
        "l": args.l,
        "multiplex": args.multiplex,
        "snr": args.snr,
        "snr_unit": args.snr_unit,
        "trials": args.trials,
        "seed": args.seed,
        "fade_variance": args.fade_variance,
        "threads": args.threads,
    }
    for key, value in flag_values.items():
        if value is not None:
            settings[key] = str(value)
    defaults = {"l": "1", "multiplex": "0", "snr_unit": "linear",
                "trials": "100000", "seed": "1", "fade_variance": "1", "threads": "1"}
    for key, value in defaults.items():
        settings.setdefault(key, value)
    missing = [k for k in ("mode", "snr") if k not in settings]
    if missing:
        raise ValueError(f"missing mc settings: {', '.join(missing)}")
    mode = settings["mode"]
    if mode not in ("mean_fade", "rate"):
        raise ValueError(f"mode must be mean_fade or rate, got {mode!r}")
    if settings["snr_unit"] not in ("linear", "db"):
        raise ValueError(f"snr_unit must be linear or db, got {settings['snr_unit']!r}")
    snr = _to_linear(_parse_grid(settings["snr"]), settings["snr_unit"])
    cfg = TrialConfig(
        l=int(settings["l"]),
        multiplex_ratio=float(settings["multiplex"]),
        snr_grid=tuple(snr),
        trials=int(settings["trials"]),
        seed=int(settings["seed"]),
        fade_variance=float(settings["fade_variance"]),
    )
    threads = int(settings["threads"])
    if mode == "mean_fade":
        outage = estimate_mean_fade_outage(cfg, threads=threads)
    else:
        outage = estimate_rate_outage(cfg, threads=threads)
    params = {
        "mode": mode,
        "l": cfg.l,
        "multiplex": f"{cfg.multiplex_ratio:.9g}",
        "snr": _grid_param(list(cfg.snr_grid)),
        "trials": cfg.trials,
        "seed": cfg.seed,
        "fade_variance": f"{cfg.fade_variance:.9g}",
    }
    fmt = f"{{:.{args.precision}g}}"
    lines = [f"# tool=mcqkd {__version__}", "# subcommand=mc"]
    for key in sorted(params):
        lines.append(f"# {key}={params[key]}")
    lines.append(outage.to_csv(args.precision).rstrip("\n"))
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _run_svd(args) -> int:
    matrix = load_matrix_csv(args.matrix)
    decomp = svd_decompose(matrix)
    rebuilt = reconstruct(decomp)
    norm = float(np.linalg.norm(matrix.entries))
    err = float(np.linalg.norm(matrix.entries - rebuilt.entries))
    rel = err / norm if norm > 0 else err
    rows = [(i, lam) for i, lam in enumerate(decomp.lambdas)]
    rows.append(("recon_error", rel))
    params = {"matrix": args.matrix, "k_in": matrix.k_in, "k_out": matrix.k_out}
    _emit(args.output, "svd", params, ("index", "eigenchannel"), rows, args.precision)
    return 0


def _run_rates(args) -> int:
    model = load_channel_model(args.channel)
    fades_sq = None
    if args.fades:
        fades_sq = _parse_grid(args.fades)
    report = rate_report(model, args.mod_variance, args.gain_c, fades_sq)
    if fades_sq is None:
        fades_sq = [abs(sub.transmittance) ** 2 for sub in model.active]
    rows = []
    for i, (sub, fade_sq) in enumerate(zip(model.active, fades_sq)):
        input_noise = total_input_noise(
            sub.eve_epr_variance, eve_transmittance(sub.transmittance), model.vacuum_variance
        )
        attack = optimal_attack_noise(args.mod_variance, fade_sq, input_noise)
        rows.append(
            (
                i,
                fade_sq,
                attack,
                subchannel_capacity(args.mod_variance, fade_sq, sub.noise_variance),
                svd_capacity(args.mod_variance, args.gain_c, fade_sq, sub.noise_variance),
                private_capacity_complex(args.mod_variance, fade_sq, attack),
                private_capacity_complex(
                    args.mod_variance * (1.0 + args.gain_c), fade_sq, attack
                ),
            )
        )
    rows.append(
        (
            "total",
            "",
            "",
            report.capacity,
            report.svd_capacity,
            report.private_capacity,
            report.svd_private_capacity,
        )
    )
    params = {
        "channel": args.channel,
        "mod_variance": args.mod_variance,
        "gain_c": args.gain_c,
        "active_count": model.active_count,
        "vacuum_variance": model.vacuum_variance,
    }
    columns = (
        "index",
        "fade_sq",
        "attack_noise",
        "capacity",
        "svd_capacity",
        "private",
        "svd_private",
    )
    _emit(args.output, "rates", params, columns, rows, args.precision)
    return 0


def _run_constellation(args) -> int:
    base = build_constellation(args.bits)
    params = {"bits": args.bits, "l": args.l, "seed": args.seed}
    if args.l == 1:
        columns = ("index", "re", "im")
        rows = [(i, p.real, p.imag) for i, p in enumerate(base.points)]
    else:
        spread = permute_constellation(base, args.l, args.seed)
        columns = ("subchannel", "index", "re", "im")
        rows = []
        for sub in range(1, spread.subchannel_count + 1):
            for i, p in enumerate(spread.subchannel_points(sub)):
                rows.append((sub, i, p.real, p.imag))
    _emit(args.output, "constellation", params, columns, rows, args.precision)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcqkd",
        description="Multicarrier CVQKD tradeoff, rate, constellation and outage tables",
    )
    parser.add_argument("--version", action="version", version=f"mcqkd {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("-o", "--output", help="output CSV path (default: stdout)")
        p.add_argument(
            "--precision", type=int, default=9, help="significant digits (default 9)"
        )

    p = sub.add_parser("tradeoff", help="sample a diversity-multiplexing curve")
    p.add_argument("--kind", required=True, choices=CURVE_KINDS)
    p.add_argument("--grid", required=True, help="multiplex-ratio grid")
    p.add_argument("--z", type=float, default=1.0, help="exponent scale Z (default 1)")
    p.add_argument("--l", type=int, default=1, help="active sub-channels (default 1)")
    p.add_argument("--g", type=float, default=0.0, help="interference scale (default 0)")
    p.add_argument("--k-in", type=int, help="transmitter count for multiaccess kinds")
    p.add_argument("--k-out", type=int, help="receiver count for multiaccess kinds")
    add_common(p)
    p.set_defaults(handler=_run_tradeoff)

    p = sub.add_parser("perr", help="outage power-law table")
    p.add_argument("--snr", required=True, help="snr grid")
    p.add_argument("--snr-unit", choices=("linear", "db"), default="linear")
    p.add_argument("--multiplex", type=float, required=True, help="multiplex ratio")
    p.add_argument("--l", default="1", help="comma list of sub-channel counts")
    add_common(p)
    p.set_defaults(handler=_run_perr)

    p = sub.add_parser("mc", help="Monte Carlo outage estimation")
    p.add_argument("--config", help="flat key=value settings file")
    p.add_argument("--mode", choices=("mean_fade", "rate"))
    p.add_argument("--l", type=int)
    p.add_argument("--multiplex", type=float)
    p.add_argument("--snr")
    p.add_argument("--snr-unit", choices=("linear", "db"))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--fade-variance", type=float)
    p.add_argument("--threads", type=int, help="worker threads (never changes results)")
    add_common(p)
    p.set_defaults(handler=_run_mc)

    p = sub.add_parser("svd", help="eigenchannels of a transmittance matrix")
    p.add_argument("--matrix", required=True, help="re:im CSV matrix path")
    add_common(p)
    p.set_defaults(handler=_run_svd)

    p = sub.add_parser("rates", help="capacity and secret-key rates of a channel file")
    p.add_argument("--channel", required=True, help="channel model path")
    p.add_argument("--mod-variance", type=float, required=True)
    p.add_argument("--gain-c", type=float, default=1.0)
    p.add_argument("--fades", help="optional squared fades, one per active sub-channel")
    add_common(p)
    p.set_defaults(handler=_run_rates)

    p = sub.add_parser("constellation", help="export a grid constellation")
    p.add_argument("--bits", type=float, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(handler=_run_constellation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except InsufficientTrialsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
