"""Command line entry point: every pipeline stage as a subcommand.

Exit codes: 0 on success, 1 on configuration errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from . import pipeline
from .errors import ConfigurationError, DataError
from .pipeline import BuildTuple, load_manifest
from .rdf import load_ntriples
from .stats import compute_stats, format_stats_table

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "KGFORGE_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map onto exit code 1."""

    def error(self, message: str):  # noqa: D102
        raise ConfigurationError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kgforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--manifest", required=True, help="path to the build manifest (JSON)")
        p.add_argument("--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} or the manifest's output_dir)")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                          help="abort on malformed input lines (default)")
        mode.add_argument("--lenient", dest="strict", action="store_false",
                          help="log and skip malformed input lines")
        p.add_argument("--threads", type=int, default=1, help="worker threads for independent units")
        return p

    stage("qc", "clean the manifest ontologies and write QC reports")
    stage("merge", "merge cleaned ontologies into the core graph")
    stage("edges", "assemble edge lists from the tabular sources")

    for name, help_text in (
        ("build", "insert edges into the core graph for selected build tuples"),
        ("abstract", "semantically abstract built graphs for selected tuples"),
        ("stats", "compute statistics for selected tuples (or --input FILE)"),
    ):
        p = stage(name, help_text)
        p.add_argument("--model", choices=("class", "instance"), help="restrict to one knowledge model")
        p.add_argument("--strategy", choices=("standard", "inverse"), help="restrict to one relation strategy")
        p.add_argument("--abstraction", choices=pipeline.ABSTRACTION_MODES,
                       help="restrict to one abstraction mode")
        if name == "stats":
            p.add_argument("--input", help="compute statistics for one N-Triples file and print them")

    p = stage("pipeline", "run all stages end to end")
    p.add_argument("--all-builds", action="store_true",
                   help="build the full 2x2x3 matrix instead of the manifest's builds list")
    return parser


def _output_dir(args: argparse.Namespace, manifest_output_dir: str) -> str:
    return args.out or os.environ.get(OUTPUT_DIR_ENV) or manifest_output_dir


def _selected_tuples(args: argparse.Namespace, manifest) -> list[BuildTuple]:
    tuples = list(manifest.builds)
    if args.model:
        tuples = [t for t in tuples if t.knowledge_model == args.model]
    if args.strategy:
        tuples = [t for t in tuples if t.relation_strategy == args.strategy]
    if args.abstraction:
        tuples = [t for t in tuples if t.abstraction == args.abstraction]
    if args.model or args.strategy or args.abstraction:
        # an explicit selection may name a tuple outside the manifest's list
        explicit = BuildTuple(
            args.model or "class",
            args.strategy or "standard",
            args.abstraction or "none",
        )
        if args.model and args.strategy and args.abstraction and explicit not in tuples:
            tuples = [explicit]
    if not tuples:
        raise ConfigurationError("no build tuples match the given selection")
    return tuples


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        manifest = load_manifest(args.manifest)
        out = _output_dir(args, manifest.output_dir)

        if args.command == "qc":
            reports = pipeline.run_qc(manifest, out, strict=args.strict)
            print(f"cleaned {len(reports)} ontologies -> {os.path.join(out, 'qc')}")
        elif args.command == "merge":
            core = pipeline.run_merge(manifest, out, strict=args.strict)
            print(f"merged core: {len(core)} triples -> {os.path.join(out, 'core')}")
        elif args.command == "edges":
            collection = pipeline.run_edges(manifest, out, strict=args.strict, threads=args.threads)
            pair_count = sum(len(e.pairs) for e in collection.edge_lists.values())
            print(f"assembled {len(collection.edge_lists)} edge types, {pair_count} pairs "
                  f"({len(collection.failures)} failures)")
            if collection.failures:
                return 2
        elif args.command == "build":
            for tup in _selected_tuples(args, manifest):
                graph = pipeline.run_build_tuple(manifest, out, tup)
                print(f"{tup.label}: built {len(graph)} triples")
        elif args.command == "abstract":
            for tup in _selected_tuples(args, manifest):
                hybrid = pipeline.run_abstract_tuple(manifest, out, tup)
                if hybrid is None:
                    print(f"{tup.label}: no abstraction requested, skipped")
                else:
                    print(f"{tup.label}: {len(hybrid)} hybrid edges")
        elif args.command == "stats":
            if getattr(args, "input", None):
                stats = compute_stats(load_ntriples(args.input, strict=args.strict))
                print(format_stats_table([(os.path.basename(args.input), stats)]), end="")
            else:
                rows = []
                for tup in _selected_tuples(args, manifest):
                    rows.append((tup.label, pipeline.run_stats_tuple(manifest, out, tup)))
                print(format_stats_table(rows), end="")
        elif args.command == "pipeline":
            results = pipeline.run_pipeline(
                manifest, out,
                all_builds=args.all_builds,
                strict=args.strict,
                threads=args.threads,
            )
            print(format_stats_table([(t.label, s) for t, s in results]), end="")
            print(f"{len(results)} build(s) -> {os.path.join(out, 'builds')}")
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
