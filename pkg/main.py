"""
MPS2 command line: symmetric spin-1/2 matrix product states with 2x2 matrices.

    python main.py classify --pair-file cirac.json
    python main.py scan --model B --param g:-1:1:401 --output b.csv
    python main.py verify --model C --u 1 --g 1 --n 6,8
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError as SchemaError

from commands import routers
from config import LOG_LEVEL
from errors import MPSError, ValidationError
from helpers import parse_sites_list
from schemas import MODEL_CHOICES, RunConfig

log = logging.getLogger("mps2")

MODEL_PARAMS = ("g", "theta", "c", "u", "q", "epsilon")
CSV_COMMANDS = ("scan", "correlate")


class ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so run() owns the exit code"""

    def error(self, message):
        raise ValidationError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("model")
    source.add_argument("--model", choices=MODEL_CHOICES, help="Canonical family")
    source.add_argument("--pair-file", help="JSON file with matrices a0 and a1")
    for name in MODEL_PARAMS:
        source.add_argument(f"--{name}", type=float, help=f"Model parameter {name}")
    parser.add_argument("--output", "-o", help="Output path (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")


def _add_group(parser: argparse.ArgumentParser, group: str) -> None:
    if group == "tolerance":
        parser.add_argument("--null-tol", type=float, help="Relative rank tolerance for null spaces")
        parser.add_argument("--diag-tol", type=float, help="Eigenvalue-gap tolerance for diagonalizability")
    elif group == "other":
        parser.add_argument("--other", required=True, help="Second model: TAG:name=value,... or a pair file")
    elif group == "grid":
        parser.add_argument("--param", action="append", default=[], help="Scan axis name:min:max:steps")
        parser.add_argument("--kink-factor", type=float, help="Kink threshold in units of the median second difference")
    elif group == "report":
        parser.add_argument("--report", help="Crossing report path (stdout when omitted)")
    elif group == "correlate":
        parser.add_argument("--operator", default="Z", help="Site operator I, X, Y or Z")
        parser.add_argument("--r-max", type=int, default=10)
        parser.add_argument("--mode", choices=("finite", "thermodynamic", "asymptotic"), default="thermodynamic")
        parser.add_argument("--n", help="Chain length for finite mode")
    elif group == "hamiltonian":
        parser.add_argument("--k-max", type=int, default=6, help="Largest block size searched for a null space")
        parser.add_argument("--orbit-mode", choices=("auto", "sparse", "adapted"), default="auto")
        parser.add_argument("--weights", help="Comma-separated positive orbit weights")
    elif group == "sites":
        parser.add_argument("--n", required=True, help="Comma-separated chain lengths")
        parser.add_argument("--export-state", help="Write the dense MPS vector as little-endian complex128")


def build_parser():
    parser = ArgumentParser(prog="mps2", description="Symmetric 2x2 matrix product states")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    handlers = {}
    for router in routers():
        for command in router.commands.values():
            sub = subparsers.add_parser(command.name, help=command.help)
            _add_common(sub)
            for group in command.arguments:
                _add_group(sub, group)
            handlers[command.name] = command.handler
    return parser, handlers


def _config(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    data = {
        "subcommand": args.subcommand,
        "model": args.model,
        "pair_file": args.pair_file,
        "params": {k: values[k] for k in MODEL_PARAMS if values.get(k) is not None},
        "output": args.output,
        "format": args.format,
    }
    renames = {"param": "grids", "n": "sites"}
    for key in ("param", "kink_factor", "report", "operator", "r_max", "mode", "n", "k_max",
                "orbit_mode", "weights", "export_state", "other", "null_tol", "diag_tol"):
        if values.get(key) is not None:
            data[renames.get(key, key)] = values[key]
    if "sites" in data:
        data["sites"] = parse_sites_list(data["sites"])
    try:
        return RunConfig.model_validate(data)
    except SchemaError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "arguments"
        raise ValidationError(f"{field}: {first['msg']}") from exc


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch the subcommand and map errors to exit codes"""
    try:
        parser, handlers = build_parser()
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else LOG_LEVEL,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        config = _config(args)
        if config.format == "csv" and config.subcommand not in CSV_COMMANDS:
            raise ValidationError(f"format: csv output is only available for {', '.join(CSV_COMMANDS)}")
        handlers[config.subcommand](config)
    except MPSError as exc:
        log.debug("%s failed", type(exc).__name__, exc_info=True)
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(run())
