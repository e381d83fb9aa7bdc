"""The command-line interface.

Results go to stdout as JSON documents, logs to stderr. Exit status is 0
on success, 1 on a domain error (impossible evidence, infeasible
budget, ...) and 2 on a usage or document error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import humanfriendly
from wipac_dev_tools import argparse_tools, logging_tools

from . import __version__
from .compiler import CompiledNetwork, compile_network
from .config import DEFAULT_VERIFY_SEED, DEFAULT_VERIFY_TRIALS, QUERY_SIGNIFICANT_DIGITS
from .documents import (
    NetworkDocument,
    compile_document,
    load_document,
    serialize_document,
    to_circuit,
    to_link_graph,
    to_network,
)
from .exceptions import DocumentException, DomainException, UnreachableTargetException
from .inference import Query, eliminate
from .model.graph import validate_network
from .model.schema import Evidence, Network
from .toolkits import diagnosis, reliability
from .verify import run_verify

LOGGER = logging.getLogger(__name__)

DEMOS_DIR = Path(__file__).resolve().parent / "demos"

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


def _rounded(p: float) -> float:
    return float(f"{p:.{QUERY_SIGNIFICANT_DIGITS}g}")


def _print_json(obj: Any) -> None:
    print(json.dumps(obj, indent=2))


def _resolve_evidence(net: Network, pairs: Sequence[list[str]] | None) -> Evidence:
    observed: dict[str, str | int] = {}
    for name, state in pairs or []:
        if name in observed:
            raise ValueError(f"'{name}' is observed more than once")
        observed[name] = state
    return Evidence.resolve(net, observed)


def _checked_network(doc: NetworkDocument, tolerance: float | None) -> Network:
    if not doc.nodes:
        raise DocumentException("document has no network nodes")
    net = to_network(doc)
    report = validate_network(net, tolerance)
    if not report.ok:
        raise DocumentException(
            "invalid network: "
            + "; ".join(f"{v.kind} at '{v.node}': {v.message}" for v in report.violations)
        )
    return net


# -----------------------------------------------------------------------------
# commands


def cmd_compile(args: argparse.Namespace) -> None:
    """Replace noisy gates with explicit CPTs."""
    doc = compile_document(load_document(args.file), args.node, budget=args.budget)
    print(serialize_document(doc))


def cmd_query(args: argparse.Namespace) -> None:
    """Print posterior marginals."""
    net = _checked_network(load_document(args.file), args.tolerance)
    query = Query(
        compile_network(net, budget=args.budget),
        _resolve_evidence(net, args.evidence),
        tuple(args.target or ()),
    )
    _print_json(eliminate(query).to_dict())


def cmd_reliability(args: argparse.Namespace) -> None:
    """Print the path-exists probability or the path-count distribution."""
    g = to_link_graph(load_document(args.file))
    out: dict[str, Any] = {"source": g.source, "target": g.target, "mode": args.mode}

    match args.mode:
        case "connect":
            try:
                net = reliability.build_connectivity_model(g, budget=args.budget)
            except UnreachableTargetException as e:
                LOGGER.info(f"{e}, so no path can exist")
                out["probability"] = 0.0
            else:
                out["probability"] = _rounded(reliability.query_connectivity(net, g.source, g.target))
        case "paths":
            net = reliability.build_path_count_model(g, budget=args.budget)
            distribution = reliability.query_path_distribution(net, g.source, g.target)
            out["distribution"] = [_rounded(p) for p in distribution]
            out["expected_paths"] = _rounded(reliability.expected_path_count(distribution))
        case other:
            raise RuntimeError(f"Reliability mode not supported: {other}")

    _print_json(out)


def cmd_diagnose(args: argparse.Namespace) -> None:
    """Print posteriors over wires and device-failure variables."""
    circuit, fault_model, marginals = to_circuit(load_document(args.file))
    net: CompiledNetwork = diagnosis.build_circuit_model(
        circuit, fault_model, input_marginals=marginals, budget=args.budget
    )
    evidence = _resolve_evidence(net.network, args.evidence)
    for name in args.target or ():
        net.network.node(name)
    _print_json(diagnosis.diagnose(net, evidence, tuple(args.target or ())).to_dict())


def cmd_verify(args: argparse.Namespace) -> int:
    """Print the cross-check report; fail if any check fails."""
    paths = args.files or sorted(DEMOS_DIR.glob("*.json"))
    if not paths:
        raise DocumentException(f"no documents to verify (none given, none found in {DEMOS_DIR})")
    documents = [(p.stem, load_document(p)) for p in paths]
    report = run_verify(
        documents, args.trials, args.seed, budget=args.budget, tolerance=args.tolerance
    )
    _print_json(report.to_dict())
    return EXIT_OK if report.passed else EXIT_DOMAIN_ERROR


# -----------------------------------------------------------------------------
# args


def _size(arg: str) -> int:
    try:
        return int(humanfriendly.parse_size(arg))
    except humanfriendly.InvalidSize as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _assignment(arg: str) -> list[str]:
    return argparse_tools.validate_arg(  # type: ignore[no-any-return]
        arg.split("=", maxsplit=1),
        len(arg.split("=", maxsplit=1)) == 2 and all(arg.split("=", maxsplit=1)),
        ValueError('must be "VAR=state"'),
    )


class CommandArgs:
    @staticmethod
    def document(sub_parser: argparse.ArgumentParser) -> None:
        """Add args to subparser."""
        sub_parser.add_argument(
            "file",
            type=Path,
            help="the network document (json)",
        )

    @staticmethod
    def observations(sub_parser: argparse.ArgumentParser) -> None:
        """Add args to subparser."""
        sub_parser.add_argument(
            "--evidence",
            nargs="*",
            type=_assignment,
            help="observed states, as 'VAR=state' pairs (a state label or index)",
        )
        sub_parser.add_argument(
            "--target",
            nargs="*",
            help="variables to report -- if not given, every variable is reported",
        )

    @staticmethod
    def compile(sub_parser: argparse.ArgumentParser) -> None:
        """Add args to subparser."""
        CommandArgs.document(sub_parser)
        sub_parser.add_argument(
            "--node",
            default=None,
            help="compile only this node's noisy gate",
        )

    @staticmethod
    def reliability(sub_parser: argparse.ArgumentParser) -> None:
        """Add args to subparser."""
        CommandArgs.document(sub_parser)
        sub_parser.add_argument(
            "--mode",
            choices=["connect", "paths"],
            default="connect",
            help="'connect' for the path-exists probability, 'paths' for the path-count distribution",
        )

    @staticmethod
    def verify(sub_parser: argparse.ArgumentParser) -> None:
        """Add args to subparser."""
        sub_parser.add_argument(
            "files",
            nargs="*",
            type=Path,
            help="documents to check -- if not given, every shipped demo is checked",
        )
        sub_parser.add_argument(
            "--trials",
            type=int,
            default=DEFAULT_VERIFY_TRIALS,
            help="number of random specs per randomized check",
        )
        sub_parser.add_argument(
            "--seed",
            type=int,
            default=DEFAULT_VERIFY_SEED,
            help="seed for the randomized checks",
        )


def main(argv: Sequence[str] | None = None) -> int:
    """Main."""
    parser = argparse.ArgumentParser(
        prog="noisynet",
        description="Compile noisy-gate Bayesian networks and answer queries on them",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--budget",
        type=_size,
        default=None,
        help="max joint input states to enumerate per gate (ex: 250k, 1M) -- overrides ENUMERATION_BUDGET",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="normalization/equivalence tolerance -- overrides the configured defaults",
    )

    subparsers = parser.add_subparsers(required=True, dest="command", help="the command to run")
    CommandArgs.compile(subparsers.add_parser("compile", help="replace noisy gates with explicit CPTs"))
    for name, help_ in [("query", "posterior marginals"), ("diagnose", "circuit diagnosis")]:
        p = subparsers.add_parser(name, help=help_)
        CommandArgs.document(p)
        CommandArgs.observations(p)
    CommandArgs.reliability(subparsers.add_parser("reliability", help="two-terminal reliability"))
    CommandArgs.verify(subparsers.add_parser("verify", help="cross-check against brute force"))

    args = parser.parse_args(argv)
    logging_tools.log_argparse_args(args, logger=LOGGER, level="DEBUG")

    # Go!
    try:
        match args.command:
            case "compile":
                cmd_compile(args)
            case "query":
                cmd_query(args)
            case "reliability":
                cmd_reliability(args)
            case "diagnose":
                cmd_diagnose(args)
            case "verify":
                return cmd_verify(args)
            case other:
                raise RuntimeError(f"Command not supported: {other}")
    except DomainException as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except (DocumentException, KeyError, ValueError) as e:
        print(f"error: {e.args[0] if isinstance(e, KeyError) else e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    return EXIT_OK
