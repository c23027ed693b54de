"""Command line: ``skewdiff run`` and ``skewdiff derive``."""

import argparse
import json
import sys

from .experiments import ConfigError, ExperimentConfig, derive_parameters, run
from .model import MediumSpec, ParameterDomainError
from .paths import WorkerError

EXIT_USAGE = 2
EXIT_PARTIAL = 3


def _parser():
    p = argparse.ArgumentParser(prog="skewdiff",
                                description="Interface diffusion experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("--config", required=True, help="path to the JSON config")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--workers", type=int, help="worker threads (default: SKEWDIFF_WORKERS or 1)")
    r.add_argument("--out", help="output directory (default: config 'output')")
    d = sub.add_parser("derive", help="print derived parameters")
    d.add_argument("--d-minus", type=float, required=True)
    d.add_argument("--d-plus", type=float, required=True)
    d.add_argument("--lambda", dest="lam", type=float, required=True)
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "derive":
        try:
            out = derive_parameters(MediumSpec(args.d_minus, args.d_plus), args.lam)
        except ParameterDomainError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(json.dumps(out, indent=2))
        return 0

    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_json(fh.read())
        if args.seed is not None:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    except OSError as exc:
        print(f"usage error: config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        manifest = run(cfg, args.workers, args.out)
    except WorkerError as exc:
        print(f"partial-result error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    for name, verdict in manifest.verdicts.items():
        print(f"{verdict:<12} {name}")
    return 0 if manifest.passed else 1


if __name__ == "__main__":
    sys.exit(main())
