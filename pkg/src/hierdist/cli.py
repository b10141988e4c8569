"""Command-line entry point.

Three commands: `validate` checks a terminology and prints its counts,
`distance` scores two ad-hoc code sets, and `report` runs a full
configured evaluation. Results go to stdout as key: value lines or
files; diagnostics go to stderr. Exit codes are stable:

    0  success
    1  parse error (malformed line, duplicate record, missing rating)
    2  validation error (cycle, dangling edge, unknown concept, bad thresholds)
    3  I/O error (unreadable input file)
    4  a compared code set normalized to empty (distance command)
    5  configuration error (bad config document, unknown coder)
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .config import CLINICAL_FINDING_ROOT, load_run_config
from .errors import (
    ConfigError,
    DuplicateRecord,
    GraphValidationError,
    HierdistError,
    IngestIOError,
    InvalidThresholds,
    MalformedLine,
    MissingRating,
    NoCommonAncestor,
    OutOfFocus,
    UnknownCoder,
    UnknownConcept,
)
from .hierarchy import focus_subgraph
from .ingest import IngestConfig, ingest
from .metric import (
    DenominatorPolicy,
    band_of_value,
    code_set_distance,
    normalize_code_set,
    normalize_thresholds,
)
from .report import run_report

EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_EMPTY_CODE_SET = 4
EXIT_CONFIG = 5


def _add_terminology_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("terminology source")
    source.add_argument("--edge-list", metavar="PATH", help="edge-list CSV (child_id,parent_id)")
    source.add_argument("--rf2-concepts", metavar="PATH", help="RF2 concept snapshot TSV")
    source.add_argument(
        "--rf2-relationships", metavar="PATH", help="RF2 relationship snapshot TSV"
    )
    source.add_argument(
        "--selector",
        choices=("inferred", "stated", "any"),
        default="inferred",
        help="which RF2 relationship rows count as hierarchy edges (default: inferred)",
    )
    source.add_argument(
        "--include-inactive",
        action="store_true",
        help="keep inactive RF2 concepts instead of excluding them",
    )
    source.add_argument(
        "--lenient",
        action="store_true",
        help="skip malformed lines (counted) instead of aborting",
    )
    parser.add_argument(
        "--focus-root",
        type=int,
        default=CLINICAL_FINDING_ROOT,
        help=f"focus subhierarchy root (default: {CLINICAL_FINDING_ROOT})",
    )
    parser.add_argument(
        "--strict-focus",
        action="store_true",
        help="exclude the focus root itself from the focus subhierarchy",
    )


def _ingest_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> IngestConfig:
    if args.edge_list and (args.rf2_concepts or args.rf2_relationships):
        parser.error("give either --edge-list or the two --rf2-* paths, not both")
    if args.edge_list:
        return IngestConfig.edge_list(args.edge_list, lenient=args.lenient)
    if args.rf2_concepts and args.rf2_relationships:
        return IngestConfig.rf2(
            concept_path=args.rf2_concepts,
            relationship_path=args.rf2_relationships,
            relationship_selector=args.selector,
            include_inactive=args.include_inactive,
            lenient=args.lenient,
        )
    parser.error("a terminology source is required: --edge-list or --rf2-concepts with --rf2-relationships")
    raise AssertionError  # parser.error never returns


def _parse_thresholds(text: str) -> tuple[Fraction, ...]:
    return normalize_thresholds([part.strip() for part in text.split(",") if part.strip()])


def _parse_codes(text: str, side: str) -> list[int]:
    codes = []
    for part in text.split("|"):
        part = part.strip()
        if not part.isdigit() or int(part) <= 0:
            raise MalformedLine(0, f"--{side} code {part!r} is not a positive integer")
        codes.append(int(part))
    if not codes:
        raise MalformedLine(0, f"--{side} must list at least one code")
    return codes


def cmd_validate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _ingest_config(args, parser)
    result = ingest(config)
    view = focus_subgraph(result.graph, args.focus_root, inclusive=not args.strict_focus)
    print(f"concepts: {result.graph.concept_count}")
    print(f"edges: {result.graph.edge_count}")
    print("acyclic: true")
    print(f"focus root: {args.focus_root}")
    print(f"focus inclusive: {str(not args.strict_focus).lower()}")
    print(f"focus members: {len(view.members)}")
    report_json = result.report.to_json()
    if args.report_json:
        with open(args.report_json, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(report_json + "\n")
    else:
        print(report_json)
    return 0


def cmd_distance(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _ingest_config(args, parser)
    thresholds = _parse_thresholds(args.thresholds)
    policy = DenominatorPolicy.parse(args.policy)
    left_raw = _parse_codes(args.left, "left")
    right_raw = _parse_codes(args.right, "right")

    result = ingest(config)
    view = focus_subgraph(result.graph, args.focus_root, inclusive=not args.strict_focus)
    left_set, left_report = normalize_code_set(left_raw, view)
    right_set, right_report = normalize_code_set(right_raw, view)
    failed = []
    if left_set is None:
        failed.append(("left", left_report))
    if right_set is None:
        failed.append(("right", right_report))
    if failed:
        for side, norm_report in failed:
            print(f"{side} code set is empty after normalization:", file=sys.stderr)
            print(json.dumps(norm_report.as_dict(), indent=2, sort_keys=True), file=sys.stderr)
        return EXIT_EMPTY_CODE_SET

    distance = code_set_distance(left_set, right_set, view, policy)
    print(f"left: {'|'.join(str(c) for c in left_set.sorted())}")
    print(f"right: {'|'.join(str(c) for c in right_set.sorted())}")
    print(f"numerator: {distance.numerator}")
    print(f"denominator: {distance.denominator}")
    print(f"value: {distance.value}")
    print(f"policy: {distance.policy.value}")
    print(f"band: {band_of_value(distance.value, thresholds)}")
    print(f"exact_match: {str(distance.exact_match).lower()}")
    print(f"focus root: {args.focus_root}")
    print(f"focus inclusive: {str(not args.strict_focus).lower()}")
    print(f"thresholds: {','.join(str(t) for t in thresholds)}")
    for side, norm_report in (("left", left_report), ("right", right_report)):
        dropped = (
            norm_report.dropped_unknown
            or norm_report.dropped_out_of_focus
            or norm_report.dropped_duplicates
        )
        if dropped:
            print(
                f"note: {side} codes dropped during normalization: "
                + json.dumps(norm_report.as_dict(), sort_keys=True),
                file=sys.stderr,
            )
    return 0


def cmd_report(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = load_run_config(args.config)
    if args.policy is not None:
        config.policy = DenominatorPolicy.parse(args.policy)
    if args.thresholds is not None:
        config.thresholds = _parse_thresholds(args.thresholds)
    if args.focus_root is not None:
        config.focus_root = args.focus_root
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    if args.markdown is not None:
        config.markdown = args.markdown
    if args.figures is not None:
        config.figures = args.figures
    written = run_report(config)
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierdist",
        description=(
            "Hierarchy-distance metrics between clinical code sets and "
            "inter-coder agreement reports over a subsumption terminology."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser(
        "validate", help="ingest a terminology, check it, and print its counts"
    )
    _add_terminology_args(validate)
    validate.add_argument(
        "--report-json", metavar="PATH", help="write the ingest report JSON here instead of stdout"
    )
    validate.set_defaults(func=cmd_validate)

    distance = subparsers.add_parser(
        "distance", help="score two pipe-separated code sets against each other"
    )
    _add_terminology_args(distance)
    distance.add_argument("--left", required=True, help="pipe-separated concept ids")
    distance.add_argument("--right", required=True, help="pipe-separated concept ids")
    distance.add_argument(
        "--policy",
        choices=[p.value for p in DenominatorPolicy],
        default=DenominatorPolicy.TERM_COUNT.value,
        help="set-distance denominator (default: term_count)",
    )
    distance.add_argument(
        "--thresholds", default="1,2,3", help="comma-separated band thresholds (default: 1,2,3)"
    )
    distance.set_defaults(func=cmd_distance)

    report = subparsers.add_parser(
        "report", help="run a configured evaluation and write its report files"
    )
    report.add_argument("config", help="path to the JSON run configuration")
    report.add_argument("--policy", choices=[p.value for p in DenominatorPolicy], default=None)
    report.add_argument("--thresholds", default=None, help="comma-separated band thresholds")
    report.add_argument("--focus-root", type=int, default=None)
    report.add_argument("--output-dir", default=None)
    report.add_argument("--markdown", action=argparse.BooleanOptionalAction, default=None)
    report.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (MalformedLine, DuplicateRecord, MissingRating) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        GraphValidationError,
        UnknownConcept,
        OutOfFocus,
        NoCommonAncestor,
        InvalidThresholds,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IngestIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, UnknownCoder) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HierdistError as exc:  # any future toolkit error: treat as validation
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
