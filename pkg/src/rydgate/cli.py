"""Command-line front end.

Four commands: `simulate` runs one gate and emits a trajectory CSV,
`sweep` runs one parameter scan and emits a two-curve CSV, `figures`
regenerates every reference dataset into a directory, and `example`
prints the cesium worked-example fidelity. Data goes to stdout or the
requested file as CSV only; diagnostics go to stderr.

Options resolve in three layers: built-in defaults, then a config file
of flat `key = value` lines (keys spelled like the CLI flags), then
explicit flags. Unknown config keys are rejected. Numbers are written
with 17 significant digits so the CSV round-trips bit-exactly, and a
leading `# meta:` line records the parameters that produced the file;
wall-clock time stays out of it so identical runs produce identical
bytes.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from rydgate.experiments import (
    DEFAULT_RANGES,
    GSC_RATIO,
    DT_RULE,
    SweepResult,
    SweepSpec,
    cesium_example,
    fidelity_trajectory,
    run_sweep,
    sweep_decay,
    sweep_detuning,
    sweep_ratio,
    sweep_relative_error,
)
from rydgate.gate import GateConfig, GateResult, run_gate
from rydgate.model import (
    BasisIndex,
    GaussianPulse,
    RectangularPulse,
    STATE_LABELS,
    SystemParams,
    magic_ratio,
)
from rydgate.numerics import IntegrationError

TWO_PI = 2.0 * math.pi
WORKERS_ENV = "RYDGATE_WORKERS"


class CliError(Exception):
    """Configuration problem reported on stderr with exit code 1."""


@dataclass(frozen=True)
class RunManifest:
    """Parsed invocation: command, optional config file, output target,
    and the explicitly supplied flag values as strings."""

    command: str
    config: str | None
    out: str | None
    overrides: dict


def _to_float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise CliError(f"{key}: expected a number, got {raw!r}") from None


def _to_int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{key}: expected an integer, got {raw!r}") from None


def _to_bool(key, raw):
    low = raw.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise CliError(f"{key}: expected true or false, got {raw!r}")


def _to_choice(*choices):
    def convert(key, raw):
        if raw not in choices:
            allowed = ", ".join(choices)
            raise CliError(f"{key}: expected one of {allowed}, got {raw!r}")
        return raw

    return convert


def _to_str(key, raw):
    return raw


# key -> (converter, default) per command; config-file keys must match
_SIMULATE_SCHEMA = {
    "pulse": (_to_choice("gaussian", "rect"), "gaussian"),
    "ratio": (_to_float, 1.3),
    "g": (_to_float, None),
    "units": (_to_choice("dimensionless", "hz"), "dimensionless"),
    "delta2": (_to_float, 0.0),
    "polar-ratio": (_to_float, 22.0),
    "gamma1": (_to_float, 0.0),
    "gamma2": (_to_float, 0.0),
    "kappa": (_to_float, 0.0),
    "dissipative": (_to_bool, False),
    "initial": (_to_choice("superposition", *STATE_LABELS), "superposition"),
    "duration": (_to_float, None),
    "out": (_to_str, "-"),
}

_SWEEP_SCHEMA = {
    "axis": (_to_choice(*DEFAULT_RANGES), None),
    "min": (_to_float, None),
    "max": (_to_float, None),
    "points": (_to_int, None),
    "workers": (_to_int, None),
    "out": (_to_str, "-"),
}

_FIGURES_SCHEMA = {
    "out-dir": (_to_str, "figs"),
    "workers": (_to_int, None),
}

_SCHEMAS = {
    "simulate": _SIMULATE_SCHEMA,
    "sweep": _SWEEP_SCHEMA,
    "figures": _FIGURES_SCHEMA,
    "example": {},
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rydgate",
        description="Atom-photon controlled-Z gate simulator.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    sim = sub.add_parser("simulate", help="run one gate and emit a trajectory CSV")
    sim.add_argument("--config", help="config file of flat key = value lines")
    sim.add_argument("--pulse", help="drive shape: gaussian or rect")
    sim.add_argument("--ratio", help="coupling-to-peak-drive ratio (default 1.3)")
    sim.add_argument("--g", help="coupling strength; required for --units hz")
    sim.add_argument("--units", help="dimensionless (g = 1) or hz (inputs in Hz)")
    sim.add_argument("--delta2", help="Stark detuning of the second Rydberg level")
    sim.add_argument("--polar-ratio", help="polarizability ratio (default 22)")
    sim.add_argument("--gamma1", help="first Rydberg decay rate")
    sim.add_argument("--gamma2", help="second Rydberg decay rate")
    sim.add_argument("--kappa", help="photon loss rate")
    sim.add_argument(
        "--dissipative",
        action="store_const",
        const="true",
        help="evolve the master equation instead of the pure state",
    )
    sim.add_argument(
        "--initial",
        help="superposition (default) or one basis label, e.g. 1m1a",
    )
    sim.add_argument("--duration", help="evaluation window (default: nominal)")
    sim.add_argument("--out", help="output CSV path; - for stdout (default)")

    swp = sub.add_parser("sweep", help="run one parameter scan and emit a CSV")
    swp.add_argument("--config", help="config file of flat key = value lines")
    swp.add_argument(
        "--axis",
        help="one of: " + ", ".join(DEFAULT_RANGES),
    )
    swp.add_argument("--min", help="grid start (default: per-axis)")
    swp.add_argument("--max", help="grid end (default: per-axis)")
    swp.add_argument("--points", help="grid size (default: per-axis)")
    swp.add_argument("--workers", help="worker processes (default: all cores)")
    swp.add_argument("--out", help="output CSV path; - for stdout (default)")

    fig = sub.add_parser("figures", help="regenerate every reference dataset")
    fig.add_argument("--config", help="config file of flat key = value lines")
    fig.add_argument("--out-dir", help="output directory (default: figs)")
    fig.add_argument("--workers", help="worker processes (default: all cores)")

    sub.add_parser("example", help="print the cesium worked-example fidelity")

    return parser


def parse_args(argv=None):
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.error("missing command (simulate, sweep, figures, example)")
    values = vars(ns)
    out = values.get("out") or values.get("out_dir")
    overrides = {}
    for dest, raw in values.items():
        if dest in ("command", "config", "out", "out_dir") or raw is None:
            continue
        overrides[dest.replace("_", "-")] = raw
    return RunManifest(
        command=ns.command,
        config=values.get("config"),
        out=out,
        overrides=overrides,
    )


def read_config(path):
    """Flat key = value lines; # starts a comment; blank lines ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, raw = stripped.partition("=")
        if not sep or not key.strip() or not raw.strip():
            raise CliError(f"{path}:{lineno}: expected key = value")
        values[key.strip()] = raw.strip()
    return values


def _resolve_options(manifest):
    schema = _SCHEMAS[manifest.command]
    options = {key: default for key, (_, default) in schema.items()}
    if manifest.config is not None:
        for key, raw in read_config(manifest.config).items():
            if key not in schema:
                raise CliError(f"unknown config key: {key!r}")
            options[key] = schema[key][0](key, raw)
    for key, raw in manifest.overrides.items():
        options[key] = schema[key][0](key, raw)
    if manifest.out is not None:
        target = "out-dir" if manifest.command == "figures" else "out"
        options[target] = manifest.out
    return options


def _workers_option(options):
    if options.get("workers") is not None:
        return options["workers"]
    env = os.environ.get(WORKERS_ENV)
    if env:
        return _to_int(WORKERS_ENV, env)
    return None


# ---------------------------------------------------------------------------
# CSV serialization


def _fmt(x):
    return "%.17g" % x


def _cell(x):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return _fmt(x)


def _meta_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _meta_line(meta):
    body = " ".join(f"{k}={_meta_value(v)}" for k, v in meta.items())
    return f"# meta: {body}"


def _gate_meta(result):
    cfg = result.config
    p = cfg.params
    pulse = cfg.pulse
    meta = {}
    if isinstance(pulse, GaussianPulse):
        meta["pulse"] = "gaussian"
        meta["omega_m"] = pulse.omega_m
        meta["tau"] = pulse.tau
    else:
        meta["pulse"] = "rect"
        meta["omega"] = pulse.omega
    meta.update(
        g=p.g,
        delta2=p.delta2,
        polar_ratio=p.polar_ratio,
        gamma1=p.gamma1,
        gamma2=p.gamma2,
        kappa=p.kappa,
        dissipative=cfg.dissipative,
        initial=cfg.initial_basis.label if cfg.initial_basis else "superposition",
        t_final=float(result.times[-1]) if len(result.times) else 0.0,
        dt=result.dt,
    )
    return meta


def _gate_lines(result):
    lines = [_meta_line(_gate_meta(result))]
    lines.append(
        "t," + ",".join("p_" + label for label in STATE_LABELS) + ",phase,fidelity"
    )
    phase = result.phase
    fidelity = result.fidelity
    for i, t in enumerate(result.times):
        row = [_fmt(t)]
        row.extend(_fmt(p) for p in result.populations[i])
        row.append(_cell(phase[i]) if phase is not None else "")
        row.append(_cell(fidelity[i]) if fidelity is not None else "")
        lines.append(",".join(row))
    return lines


def _sweep_lines(result):
    meta = {k: v for k, v in result.meta.items() if k != "wall_clock_s"}
    lines = [_meta_line(meta), "x,fidelity_gsc,fidelity_rect"]
    gsc = result.fidelity_gsc
    rect = result.fidelity_rect
    for i, x in enumerate(result.values):
        lines.append(
            ",".join(
                [
                    _fmt(x),
                    _cell(gsc[i]) if gsc is not None else "",
                    _cell(rect[i]) if rect is not None else "",
                ]
            )
        )
    return lines


def write_csv(result, path):
    """Serialize a gate trajectory or a sweep to CSV at path ('-' or None
    for stdout): meta comment, header row, then LF-terminated data rows
    with 17 significant digits."""
    if isinstance(result, GateResult):
        lines = _gate_lines(result)
    elif isinstance(result, SweepResult):
        lines = _sweep_lines(result)
    else:
        raise CliError(f"cannot serialize {type(result).__name__}")
    data = "".join(line + "\n" for line in lines)
    if path is None or path == "-":
        sys.stdout.write(data)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def _plot_script(csv_name, xlabel, trajectory):
    lines = [
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
    ]
    if trajectory:
        lines += [
            "set ylabel 'population / phase / fidelity'",
            "set key outside",
            f"plot for [col=2:11] '{csv_name}' using 1:col with lines"
            " title columnheader(col)",
        ]
    else:
        lines += [
            "set ylabel 'fidelity'",
            "set key left bottom",
            f"plot '{csv_name}' using 1:2 with lines title 'gsc', \\",
            f"     '{csv_name}' using 1:3 with lines title 'rect'",
        ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _cmd_simulate(options):
    units = options["units"]
    scale = TWO_PI if units == "hz" else 1.0
    if units == "hz":
        if options["g"] is None:
            raise CliError("--units hz requires --g (coupling in Hz)")
        g = scale * options["g"]
    else:
        if options["g"] is not None and options["g"] != 1.0:
            raise CliError("dimensionless mode fixes g = 1; use --units hz")
        g = 1.0
    ratio = options["ratio"]
    if ratio <= 0.0:
        raise CliError("ratio must be positive")
    params = SystemParams(
        g=g,
        delta2=scale * options["delta2"],
        polar_ratio=options["polar-ratio"],
        gamma1=scale * options["gamma1"],
        gamma2=scale * options["gamma2"],
        kappa=scale * options["kappa"],
    )
    if options["pulse"] == "gaussian":
        pulse = GaussianPulse.matched(omega_m=g / ratio)
    else:
        pulse = RectangularPulse(omega=g / ratio)
    initial = options["initial"]
    config = GateConfig(
        params=params,
        pulse=pulse,
        dissipative=options["dissipative"],
        duration_override=options["duration"],
        initial_basis=(
            None
            if initial == "superposition"
            else BasisIndex.from_flat(STATE_LABELS.index(initial))
        ),
    )
    write_csv(run_gate(config), options["out"])
    return 0


def _cmd_sweep(options):
    axis = options["axis"]
    if axis is None:
        raise CliError("sweep requires --axis (or axis in the config file)")
    lo, hi, points = DEFAULT_RANGES[axis]
    spec = SweepSpec(
        axis=axis,
        min=lo if options["min"] is None else options["min"],
        max=hi if options["max"] is None else options["max"],
        points=points if options["points"] is None else options["points"],
    )
    result = run_sweep(spec, workers=_workers_option(options))
    write_csv(result, options["out"])
    return 0


def _merged_ratio_sweep(workers):
    gsc = sweep_ratio("gsc", workers=workers)
    rect = sweep_ratio("rect", workers=workers)
    if not np.array_equal(gsc.values, rect.values):
        raise RuntimeError("ratio sweeps produced different grids")
    meta = {
        "axis": "ratio",
        "min": gsc.meta["min"],
        "max": gsc.meta["max"],
        "points": gsc.meta["points"],
        "g": 1.0,
        "dt_rule": DT_RULE,
        "gsc_ratio": GSC_RATIO,
        "wall_clock_s": gsc.meta["wall_clock_s"] + rect.meta["wall_clock_s"],
    }
    return SweepResult(
        axis="ratio",
        values=gsc.values,
        fidelity_gsc=gsc.fidelity_gsc,
        fidelity_rect=rect.fidelity_rect,
        meta=meta,
    )


def _trajectory_run(initial_label):
    flat = STATE_LABELS.index(initial_label)
    config = GateConfig(
        params=SystemParams(g=1.0),
        pulse=GaussianPulse.matched(omega_m=1.0 / GSC_RATIO),
        initial_basis=BasisIndex.from_flat(flat),
    )
    return run_gate(config)


def _example_lines(fid):
    return [
        "# dissipative soft-pulse gate at realistic cesium numbers:",
        "# g = 2 pi x 2 MHz, peak drive g/1.3, gamma1 = 2 pi x 194 Hz,",
        "# gamma2 = 2 pi x 80 Hz, kappa = 2 pi x 5 kHz",
        f"fidelity = {fid:.6f}",
    ]


def _cmd_figures(options):
    out_dir = options["out-dir"]
    workers = _workers_option(options)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out_dir}: {exc}") from None

    def emit(name, result, xlabel, trajectory=False):
        csv_path = os.path.join(out_dir, name + ".csv")
        print(f"writing {csv_path}", file=sys.stderr)
        write_csv(result, csv_path)
        with open(
            os.path.join(out_dir, name + ".gp"), "w", encoding="utf-8", newline=""
        ) as fh:
            fh.write(_plot_script(name + ".csv", xlabel, trajectory))

    emit("fig3", _merged_ratio_sweep(workers), "g / drive peak")
    emit("fig4a", _trajectory_run("0m1a"), "t", trajectory=True)
    emit("fig4b", _trajectory_run("1m1a"), "t", trajectory=True)
    emit("fig5", fidelity_trajectory(), "t")
    emit("fig6a", sweep_relative_error("t", workers=workers), "dT / T")
    emit("fig6b", sweep_relative_error("g", workers=workers), "dg / g")
    emit("fig7", sweep_detuning(workers=workers), "detuning / g")
    emit("fig8a", sweep_decay("gamma", workers=workers), "gamma / g")
    emit("fig8b", sweep_decay("kappa", workers=workers), "kappa / g")
    fast = magic_ratio(1)
    emit(
        "fig8a_fast",
        sweep_decay(
            "gamma", workers=workers, rect_ratio=fast, include_gsc=False, window=None
        ),
        "gamma / g",
    )
    emit(
        "fig8b_fast",
        sweep_decay(
            "kappa", workers=workers, rect_ratio=fast, include_gsc=False, window=None
        ),
        "kappa / g",
    )

    example_path = os.path.join(out_dir, "example.txt")
    print(f"writing {example_path}", file=sys.stderr)
    fid = cesium_example()
    with open(example_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("".join(line + "\n" for line in _example_lines(fid)))
    return 0


def _cmd_example():
    fid = cesium_example()
    print(f"fidelity = {fid:.6f}")
    return 0 if fid > 0.98 else 1


def run_manifest(manifest):
    """Execute a parsed invocation; returns the process exit code."""
    try:
        options = _resolve_options(manifest)
        if manifest.command == "simulate":
            return _cmd_simulate(options)
        if manifest.command == "sweep":
            return _cmd_sweep(options)
        if manifest.command == "figures":
            return _cmd_figures(options)
        if manifest.command == "example":
            return _cmd_example()
        raise CliError(f"unknown command: {manifest.command!r}")
    except CliError as exc:
        print(f"rydgate: {exc}", file=sys.stderr)
        return 1
    except (ValueError, IntegrationError, OSError, RuntimeError) as exc:
        print(f"rydgate: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    return run_manifest(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
