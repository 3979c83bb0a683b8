"""``polotdr`` command line.

Every failure prints one line to stderr of the form::

    polotdr-error code=<n> kind=<config|data|io> [key=<k>] [line=<l>] message="<text>"

and exits with ``code``: 2 config, 3 data, 4 I/O.
"""

import argparse
import os
import re
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, config_items, parse_config_text
from .estimators import Scheme
from .experiments import observe_run, profile_table, run_scenario
from .io import DataError, ingest_measured, process_measured, write_measured, write_profile, write_realization, write_table
from .metrics import DiffMode

OUT_ENV = "POLOTDR_OUT"
DEFAULT_OUT = "polotdr-out"

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_IO = 0, 2, 3, 4

SUBCOMMANDS = {
    "sweep-theta": "theta_mis",
    "sweep-theta-cap": "theta_cap",
    "profile": "distance_profile",
    "monte-carlo": "monte_carlo",
}

# used when no --config is given
BUILTIN = {
    "theta_mis": "length_m = 10\n",
    "theta_cap": "length_m = 10\n",
    "distance_profile": "length_m = 25000\nsegment_length_m = 25\n",
    "monte_carlo": "length_m = 25000\nsegment_length_m = 25\n",
}


class CliError(Exception):
    def __init__(self, code, kind, message, key=None, line=None):
        super().__init__(message)
        self.code, self.kind, self.key, self.line = code, kind, key, line

    def render(self):
        parts = [f"polotdr-error code={self.code} kind={self.kind}"]
        if self.key is not None:
            parts.append(f"key={self.key}")
        if self.line is not None:
            parts.append(f"line={self.line}")
        msg = " ".join(str(self.args[0]).split()).replace('"', "'")
        parts.append(f'message="{msg}"')
        return " ".join(parts)


def _config_error(exc):
    return CliError(EXIT_CONFIG, "config", exc.args[0], exc.key, exc.line)


def build_parser():
    p = argparse.ArgumentParser(prog="polotdr", description="Dual-polarization phi-OTDR phase-noise simulator.")
    p.add_argument("--version", action="version", version=f"polotdr {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        sp.add_argument("--name", help="fixed output stem; default is the scenario name plus a UTC timestamp")
        sp.add_argument("--schemes", help="comma list of SISO,SIMO,MIMO")
        sp.add_argument("--diff-mode", choices=[m.value for m in DiffMode])
        sp.add_argument("--no-plots", action="store_true", help="write CSVs and the manifest only")

    for cmd in SUBCOMMANDS:
        sp = sub.add_parser(cmd)
        common(sp)
        sp.add_argument("--config", help="key = value scenario file")
        sp.add_argument("--seed", help="master seed (unsigned 64-bit)")
        sp.add_argument("--workers", help="process pool size for Monte-Carlo runs")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
        if cmd == "profile":
            sp.add_argument("--export-observed", action="store_true",
                            help="also write the noisy channel estimates as a measured-record CSV")

    sp = sub.add_parser("ingest")
    common(sp)
    sp.add_argument("--input", required=True, help="measured-record CSV")
    sp.add_argument("--dt-s", type=float, default=160e-6)
    sp.add_argument("--simo-launch", choices=("x", "y"), default="x")
    sp.add_argument("--exclude-flagged", action="store_true")
    return p


def resolve_config(args):
    sweep = SUBCOMMANDS[args.command]
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(EXIT_IO, "io", f"cannot read config {args.config}: {exc.strerror}") from None
    else:
        text = BUILTIN[sweep]
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise CliError(EXIT_CONFIG, "config", f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    for key, value in (("master_seed", args.seed), ("schemes", args.schemes),
                       ("diff_mode", args.diff_mode), ("workers", args.workers)):
        if value is not None:
            overrides[key] = value
    # the subcommand names the sweep when the file leaves it out
    if "sweep" not in overrides and not re.search(r"^\s*sweep\s*=", text, re.M):
        overrides["sweep"] = sweep
    try:
        cfg = parse_config_text(text, overrides)
    except ConfigError as exc:
        raise _config_error(exc) from None
    if cfg.sweep != sweep:
        raise CliError(EXIT_CONFIG, "config", f"config sweep is {cfg.sweep}, subcommand runs {sweep}", key="sweep")
    return cfg


def output_stem(base, fixed):
    if fixed:
        return fixed
    return f"{base}_{time.strftime('%Y%m%dT%H%M%SZ', time.gmtime())}"


def preflight(out):
    """Create ``out`` and prove it is writable, before any simulation work."""
    try:
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=out, prefix=".polotdr-probe-"):
            pass
    except OSError as exc:
        raise CliError(EXIT_IO, "io", f"output directory {out} is not writable: {exc.strerror or exc}") from None


def write_manifest(path, config_pairs, comments):
    lines = [f"# polotdr {__version__}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{k} = {v}" for k, v in config_pairs]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _plot(kind, table, path):
    from .plotting import plot_table

    plot_table(kind, table, path)


def emit(out, stem, tables, profiles=None, realization=None, plots=True):
    written = []
    for kind, table in tables.items():
        path = out / f"{stem}_{kind}.csv"
        write_table(path, table)
        written.append(path)
        if plots:
            svg = out / f"{stem}_{kind}.svg"
            _plot(kind, table, svg)
            written.append(svg)
    for scheme, prof in (profiles or {}).items():
        path = out / f"{stem}_{scheme.value}_stdv.csv"
        write_profile(path, prof)
        written.append(path)
    if realization is not None:
        path = out / f"{stem}_fiber.csv"
        write_realization(path, realization)
        written.append(path)
    return written


def cmd_scenario(args, out):
    cfg = resolve_config(args)
    stem = output_stem(cfg.name, args.name)
    cfg = replace(cfg, name=stem)
    preflight(out)
    result = run_scenario(cfg)
    written = emit(out, stem, result.tables, result.profiles, result.realization, plots=not args.no_plots)
    if getattr(args, "export_observed", False):
        _, observed = observe_run(result.config, 0)
        path = out / f"{stem}_observed.csv"
        write_measured(path, observed)
        written.append(path)
    manifest = out / f"{stem}_manifest.txt"
    comments = [f"created {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}"] + result.notes
    write_manifest(manifest, config_items(result.config), comments)
    written.append(manifest)
    return written


def cmd_ingest(args, out):
    try:
        schemes = None if args.schemes is None else [Scheme.parse(s) for s in args.schemes.split(",") if s.strip()]
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, "config", str(exc), key="schemes") from None
    stem = output_stem(Path(args.input).stem, args.name)
    col = 0 if args.simo_launch == "x" else 1
    preflight(out)
    try:
        data = ingest_measured(args.input)
    except OSError as exc:
        raise CliError(EXIT_IO, "io", f"cannot read {args.input}: {exc.strerror or exc}") from None
    if schemes is None:
        schemes = list(data.compatible_schemes(col))
    profiles = {}
    for s in schemes:
        profiles[s] = process_measured(data, s, args.dt_s, args.diff_mode or DiffMode.TEMPORAL,
                                       args.exclude_flagged, col)
    seg = list(range(data.n_segments))
    table = profile_table(profiles, seg)
    written = emit(out, stem, {"ingest": table}, profiles, plots=not args.no_plots)
    manifest = out / f"{stem}_manifest.txt"
    pairs = [("input", args.input), ("schemes", ",".join(s.value for s in schemes)), ("dt_s", repr(args.dt_s)),
             ("diff_mode", DiffMode.parse(args.diff_mode or "temporal").value), ("simo_launch", args.simo_launch),
             ("exclude_flagged", "true" if args.exclude_flagged else "false")]
    comments = [f"created {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
                f"segments {data.n_segments}, samples {data.n_samples}, coefficients {','.join(data.present)}",
                "z_m column holds the segment index; measured files carry no positions"]
    write_manifest(manifest, pairs, comments)
    written.append(manifest)
    return written


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    try:
        try:
            written = cmd_ingest(args, out) if args.command == "ingest" else cmd_scenario(args, out)
        except DataError as exc:
            raise CliError(EXIT_DATA, "data", str(exc)) from None
        except ConfigError as exc:
            raise _config_error(exc) from None
        except OSError as exc:
            raise CliError(EXIT_IO, "io", f"{exc.filename or ''} {exc.strerror or exc}".strip()) from None
        except ValueError as exc:
            raise CliError(EXIT_DATA, "data", str(exc)) from None
    except CliError as exc:
        print(exc.render(), file=sys.stderr)
        return exc.code
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
