"""Command line entry point.

Exit codes: 0 success, 1 invalid config, 2 invariant failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, HybdError
from .harness.config import ScenarioConfig, dump_config, load_config
from .harness.output import OutputError, emit_csv, emit_plot_script, format_csv, write_channel
from .harness.presets import PRESET_NAMES, preset
from .harness.sweep import run_sweep
from .harness.trial import sample_channel
from .harness.validate import validate

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("hybd")


def resolve_config(source: str) -> ScenarioConfig:
    """``source`` is a YAML path or ``preset:<name>``."""
    if source.startswith("preset:"):
        return preset(source.split(":", 1)[1])
    try:
        return load_config(source)
    except OSError as exc:
        raise ConfigError(f"cannot read config {source}: {exc.strerror or exc}") from exc


def _override(config: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    return replace(config, **changes) if changes else config


def _progress(param, value, results):
    flagged = sum(r.flagged for r in results)
    where = "" if value is None else f" {param}={value}"
    log.info("done%s: %d trials, %d flagged", where, len(results), flagged)


def _simulate(args, ignore_sweep: bool) -> int:
    if args.plot_script and not args.out:
        raise ConfigError("--plot-script needs --out")
    config = _override(resolve_config(args.config), args)
    rows = run_sweep(config, workers=args.workers, ignore_sweep=ignore_sweep,
                     progress=_progress)
    if args.out:
        emit_csv(rows, args.out)
        log.info("wrote %s", args.out)
        if args.plot_script:
            emit_plot_script(args.out, args.plot_script, rows[0].sweep_param)
    else:
        sys.stdout.write(format_csv(rows))
    return EXIT_OK


def cmd_run(args) -> int:
    return _simulate(args, ignore_sweep=True)


def cmd_sweep(args) -> int:
    return _simulate(args, ignore_sweep=False)


def cmd_validate(args) -> int:
    report = validate(args.seed)
    for line in report.lines():
        print(line)
    print(f"{len(report.checks)} invariants, {len(report.failures)} failed")
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_channels(args) -> int:
    config = _override(resolve_config(args.config), args)
    if config.sweep is not None:
        config = config.at(config.points()[0])
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out}: {exc.strerror or exc}") from exc
    for t in range(config.trials):
        write_channel(sample_channel(config, t), out / f"channel_{t:05d}.txt",
                      config.master_seed, t)
    log.info("wrote %d channel files to %s", config.trials, out)
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.name:
        sys.stdout.write(dump_config(preset(args.name)))
    else:
        print("\n".join(PRESET_NAMES))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybd", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("run", cmd_run, "simulate one scenario over its SNR grid"),
                            ("sweep", cmd_sweep, "simulate every sweep point")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("config", help="YAML file or preset:<name>")
        s.add_argument("--out", help="CSV output path (stdout if omitted)")
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--trials", type=int, help="override the trial count")
        s.add_argument("--seed", type=int, help="override master_seed")
        s.add_argument("--plot-script", help="also write a matplotlib script for the CSV")
        s.set_defaults(func=fn)

    s = sub.add_parser("validate", help="check library invariants")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("channels", help="dump sampled channels as text files")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_channels)

    s = sub.add_parser("presets", help="list presets or print one as YAML")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, HybdError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
