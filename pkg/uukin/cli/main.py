"""
Command line: ``uukin run|validate|scales <config>`` and ``uukin fit <index.csv>``.

Exit codes: 0 success, 2 domain or configuration error, 3 numerical
failure, 4 capacity exceeded, 1 anything unexpected.
"""

import argparse
import logging
import sys
from typing import List, Optional

from uukin import __version__
from uukin.errors import ConfigError, KineticError

from .config import FitConfig, load_config
from .runner import fit_index, run

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="uukin", description="Uehling-Uhlenbeck kinetics engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "run the scenario named in the configuration"),
        ("validate", "run the validation suite (scenario forced to validate)"),
        ("scales", "compute boundary-layer scales (scenario forced to scales)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="key = value file or YAML file")
        cmd.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="override one configuration key; repeatable")
        if name == "run":
            cmd.add_argument("--resume", action="store_true", help="continue from the last checkpoint")

    fit = sub.add_parser("fit", help="blow-up analysis of a stored trajectory")
    fit.add_argument("index", help="trajectory index.csv")
    fit.add_argument("--characteristic", default="median_energy", choices=["median_energy", "half_max"])
    fit.add_argument("--window-fraction", type=float, default=0.5)
    fit.add_argument("--kappa", type=float, default=0.5)
    fit.add_argument("--c", type=float, default=1.0, help="occupancy constant of the stored run")
    return parser.parse_args(argv)


def _report_config_error(e: ConfigError):
    print(f"❌ {e}", file=sys.stderr)
    for issue in e.issues:
        print(f"   line {issue['line']}: {issue['key']}: {issue['reason']}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        if args.command == "fit":
            fit = FitConfig({"characteristic": args.characteristic,
                             "window_fraction": args.window_fraction, "kappa": args.kappa})
            record = fit_index(args.index, fit, args.c)
        else:
            overrides = list(args.overrides)
            if args.command != "run":
                overrides.append(f"scenario={args.command}")
            config = load_config(args.config).with_overrides(overrides)
            record = run(config, resume=getattr(args, "resume", False))
    except ConfigError as e:
        _report_config_error(e)
        return e.exit_code
    except KineticError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except Exception:
        logger.exception("unexpected failure")
        return 1

    print(f"✅ {record.scenario}: {record.status}, {len(record.files)} files, {len(record.warnings)} warnings")
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
