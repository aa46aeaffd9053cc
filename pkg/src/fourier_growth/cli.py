"""Command line entry point: ``fourier-growth <subcommand> [--config cfg.json] [overrides]``."""

import argparse
from dataclasses import fields
import json
import sys

from . import harness
from .errors import ConfigError, DomainError

# subcommand -> (default experiment, experiments it accepts)
SUBCOMMANDS = {
    "scan": ("scan", ("scan",)),
    "theorem": ("gen_estimates", ("gen_estimates", "picks_upper", "picks_lower",
                                  "riemann_lebesgue", "approx_identity")),
    "lip-tail": ("lip_tail", ("lip_tail",)),
    "sharpness": ("sharpness", ("sharpness",)),
    "wave": ("wave_equiv", ("wave_equiv",)),
    "beta-range": ("beta_range", ("beta_range",)),
    "abs-convergence": ("torus_abs_convergence", ("torus_abs_convergence",)),
}


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _add_overrides(parser):
    for f in fields(harness.ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "betas":
            parser.add_argument(flag, dest=f.name, type=float, nargs="+", default=None)
        elif isinstance(f.default, bool):
            parser.add_argument(flag, dest=f.name, type=_bool, default=None)
        elif isinstance(f.default, int):
            parser.add_argument(flag, dest=f.name, type=int, default=None)
        elif isinstance(f.default, str):
            parser.add_argument(flag, dest=f.name, default=None)
        else:
            parser.add_argument(flag, dest=f.name, type=float, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="fourier-growth",
                                     description="Numerical checks for multiplier growth estimates.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration document")
        p.add_argument("--out", help="CSV file for result rows")
        p.add_argument("--summary", help="JSON file for the run summary")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")
        _add_overrides(p)
    return parser


def config_for(args):
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"cannot parse {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
    default, allowed = SUBCOMMANDS[args.command]
    for f in fields(harness.ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            doc[f.name] = value
    doc.setdefault("experiment", default)
    if doc["experiment"] not in allowed:
        raise ConfigError(f"subcommand {args.command!r} runs {allowed}, not {doc['experiment']!r}")
    return harness.config_from_dict(doc)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 1
    try:
        cfg = config_for(args)
        report = harness.run_experiment(cfg, jobs=args.jobs)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    harness.write_outputs(report, args.out, args.summary)
    print(json.dumps({"experiment": report.experiment, "n_rows": len(report.rows),
                      "worst_ratio": report.worst_ratio(), "verdict": report.verdict}))
    return 0 if report.verdict == "pass" else 2


if __name__ == "__main__":
    sys.exit(main())
