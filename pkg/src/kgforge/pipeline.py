"""End-to-end orchestration: manifest loading, staged builds, the 12-way matrix.

The merged core and the edge lists are computed once and shared by every
build in the matrix. Each stage writes its outputs under the output
directory, and each stage can start from the previous stage's files, so
interrupted runs resume where they stopped:

    out/qc/      cleaned ontologies + cleaning report
    out/core/    merged core graph + merged-level check report + stats
    out/edges/   assembled edge lists (JSON)
    out/builds/<model>_<strategy>_<abstraction>/   one directory per tuple
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import __version__, qc as qc_mod, vocab
from .abstraction import abstract, harmonize, hybrid_edges_tsv
from .build import (
    BuildConfig,
    KNOWLEDGE_MODELS,
    RELATION_STRATEGIES,
    build,
    read_anchor_map,
    read_relation_catalog,
)
from .edges import (
    EdgeListCollection,
    EdgeTypeSpec,
    FilterRule,
    assemble_edges,
    read_edge_lists,
    write_edge_lists,
)
from .errors import ConfigurationError, DataError, NTriplesParseError
from .merge import (
    align_identifiers,
    detect_semantic_heterogeneity,
    merge,
    read_alignment_map,
)
from .provenance import (
    BuildLog,
    BuildMetadata,
    SourceRecord,
    StepRecord,
    read_build_metadata,
    record_source,
    sha256_text,
    write_build_metadata,
)
from .rdf import IRI, NamespaceTable, Term, TripleGraph, load_ntriples, save_ntriples
from .stats import GraphStats, compute_stats, format_stats_table

logger = logging.getLogger(__name__)

ABSTRACTION_NONE = "none"
ABSTRACTION_ONLY = "abstract-only"
ABSTRACTION_HARMONIZED = "abstract-harmonized"
ABSTRACTION_MODES = (ABSTRACTION_NONE, ABSTRACTION_ONLY, ABSTRACTION_HARMONIZED)

DEFAULT_LABEL_PREDICATES = (vocab.RDFS_LABEL,)
DEFAULT_DEFINITION_PREDICATES = (vocab.IAO_DEFINITION,)
DEFAULT_SYNONYM_PREDICATES = vocab.SYNONYM_PREDICATES

_SAFE_NAME_RE = re.compile(r"[^A-Za-z0-9._\-]")


@dataclass(frozen=True)
class BuildTuple:
    """One point of the build matrix."""

    knowledge_model: str
    relation_strategy: str
    abstraction: str

    def __post_init__(self) -> None:
        if self.knowledge_model not in KNOWLEDGE_MODELS:
            raise ConfigurationError(f"builds: unknown knowledge model {self.knowledge_model!r}")
        if self.relation_strategy not in RELATION_STRATEGIES:
            raise ConfigurationError(f"builds: unknown relation strategy {self.relation_strategy!r}")
        if self.abstraction not in ABSTRACTION_MODES:
            raise ConfigurationError(f"builds: unknown abstraction mode {self.abstraction!r}")

    @property
    def label(self) -> str:
        return f"{self.knowledge_model}_{self.relation_strategy}_{self.abstraction}"


ALL_BUILD_TUPLES = tuple(
    BuildTuple(model, strategy, mode)
    for model in KNOWLEDGE_MODELS
    for strategy in RELATION_STRATEGIES
    for mode in ABSTRACTION_MODES
)


@dataclass
class BuildManifest:
    """Parsed build manifest with paths resolved against its own directory."""

    path: str
    ontologies: list[tuple[str, str]]
    edge_specs: list[EdgeTypeSpec]
    anchor_map: str
    relation_catalog: str
    builds: list[BuildTuple]
    output_dir: str
    alignment_map: Optional[str] = None
    namespaces: dict[str, str] = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def namespace_table(self) -> NamespaceTable:
        return NamespaceTable(self.namespaces)

    def config_digest(self) -> str:
        return sha256_text(json.dumps(self.raw, sort_keys=True))


def _require(payload: dict, key: str, path: str):
    if key not in payload:
        raise ConfigurationError(f"{path}: manifest field {key!r} is missing")
    return payload[key]


def _edge_spec_from_dict(entry: dict, index: int, base: str,
                         namespaces: NamespaceTable, manifest_path: str) -> EdgeTypeSpec:
    where = f"{manifest_path}: edge_specs[{index}]"
    try:
        name = entry["name"]
        source = os.path.join(base, entry["source"])
        relation = entry["relation"]
        subject_column = int(entry["subject_column"])
        object_column = int(entry["object_column"])
    except KeyError as exc:
        raise ConfigurationError(f"{where}: field {exc.args[0]!r} is missing") from None
    if "://" not in relation:
        relation = namespaces.to_iri(relation)
    inverse_iri = entry.get("inverse_iri")
    if inverse_iri and "://" not in inverse_iri:
        inverse_iri = namespaces.to_iri(inverse_iri)
    filters = tuple(
        FilterRule(int(f["column"]), f["operator"], f["operand"])
        for f in entry.get("filters", ())
    )
    def _resolve_map(key: str) -> Optional[str]:
        value = entry.get(key)
        return os.path.join(base, value) if value else None

    return EdgeTypeSpec(
        name=name,
        source=source,
        subject_column=subject_column,
        object_column=object_column,
        relation=relation,
        delimiter=entry.get("delimiter", "\t"),
        inverse_mode=entry.get("inverse_mode", "none"),
        inverse_iri=inverse_iri,
        filters=filters,
        subject_map=_resolve_map("subject_map"),
        object_map=_resolve_map("object_map"),
        pre_symmetrized=bool(entry.get("pre_symmetrized", False)),
        header=bool(entry.get("header", False)),
    )


def load_manifest(path: str) -> BuildManifest:
    """Parse and structurally validate a build manifest."""
    if not os.path.isfile(path):
        raise ConfigurationError(f"manifest does not exist: {path}")
    with open(path, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: not valid JSON: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))
    namespaces = NamespaceTable(payload.get("namespaces", {}))

    ontologies = []
    for index, entry in enumerate(_require(payload, "ontologies", path)):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigurationError(f"{path}: ontologies[{index}] must be [name, path]")
        ontologies.append((entry[0], os.path.join(base, entry[1])))
    names = [name for name, _ in ontologies]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"{path}: ontologies: names must be unique")

    edge_specs = [
        _edge_spec_from_dict(entry, index, base, namespaces, path)
        for index, entry in enumerate(_require(payload, "edge_specs", path))
    ]
    spec_names = [s.name for s in edge_specs]
    if len(set(spec_names)) != len(spec_names):
        raise ConfigurationError(f"{path}: edge_specs: names must be unique")

    builds = [
        BuildTuple(
            _require(entry, "knowledge_model", f"{path}: builds[{index}]"),
            _require(entry, "relation_strategy", f"{path}: builds[{index}]"),
            entry.get("abstraction", ABSTRACTION_NONE),
        )
        for index, entry in enumerate(_require(payload, "builds", path))
    ]
    if not builds:
        raise ConfigurationError(f"{path}: builds must not be empty")
    if len(set(builds)) != len(builds):
        raise ConfigurationError(f"{path}: builds contains duplicate tuples")

    alignment = payload.get("alignment_map")
    return BuildManifest(
        path=path,
        ontologies=ontologies,
        edge_specs=edge_specs,
        anchor_map=os.path.join(base, _require(payload, "anchor_map", path)),
        relation_catalog=os.path.join(base, _require(payload, "relation_catalog", path)),
        builds=builds,
        output_dir=os.path.join(base, payload.get("output_dir", "out")),
        alignment_map=os.path.join(base, alignment) if alignment else None,
        namespaces=dict(payload.get("namespaces", {})),
        raw=payload,
    )


def _safe(name: str) -> str:
    return _SAFE_NAME_RE.sub("_", name)


def _qc_dir(out: str) -> str:
    return os.path.join(out, "qc")


def _core_path(out: str) -> str:
    return os.path.join(out, "core", "core_merged.nt")


def _edges_path(out: str) -> str:
    return os.path.join(out, "edges", "edge_lists.json")


def build_dir(out: str, tup: BuildTuple) -> str:
    return os.path.join(out, "builds", tup.label)


def kg_path(out: str, tup: BuildTuple) -> str:
    return os.path.join(build_dir(out, tup), f"kg_{tup.label}.nt")


def full_kg_path(out: str, tup: BuildTuple) -> str:
    return os.path.join(
        build_dir(out, tup),
        f"full_kg_{tup.knowledge_model}_{tup.relation_strategy}.nt",
    )


def _check_exists(path: str, field_name: str, manifest_path: str) -> None:
    if not os.path.isfile(path):
        raise ConfigurationError(f"{manifest_path}: {field_name} refers to a missing file: {path}")


def _load_ontology(path: str, strict: bool) -> TripleGraph:
    try:
        return load_ntriples(path, strict=strict)
    except NTriplesParseError:
        raise
    except OSError as exc:
        raise DataError(f"cannot read ontology file {path}: {exc}") from exc


def run_qc(manifest: BuildManifest, out: str, strict: bool = True) -> list[qc_mod.QCReport]:
    """Clean every manifest ontology and write cleaned graphs plus reports."""
    qc_dir = _qc_dir(out)
    os.makedirs(qc_dir, exist_ok=True)
    reports = []
    for name, path in manifest.ontologies:
        _check_exists(path, f"ontologies[{name}]", manifest.path)
        graph = _load_ontology(path, strict)
        cleaned, report = qc_mod.clean_ontology(graph, name=name)
        save_ntriples(cleaned, os.path.join(qc_dir, f"{_safe(name)}.cleaned.nt"))
        reports.append(report)
        logger.info("qc %s: %d -> %d triples", name, report.pre.triples, report.post.triples)
    with open(os.path.join(qc_dir, "ontology_cleaning_report.txt"), "w", encoding="utf-8") as handle:
        handle.write(qc_mod.format_reports(reports))
    with open(os.path.join(qc_dir, "ontology_cleaning_report.json"), "w", encoding="utf-8") as handle:
        json.dump([r.as_dict() for r in reports], handle, indent=2, sort_keys=True)
        handle.write("\n")
    return reports


def run_merge(manifest: BuildManifest, out: str, strict: bool = True) -> TripleGraph:
    """Merge the (cleaned when available) ontologies into the core graph."""
    qc_dir = _qc_dir(out)
    named: list[tuple[str, TripleGraph]] = []
    for name, path in manifest.ontologies:
        cleaned_path = os.path.join(qc_dir, f"{_safe(name)}.cleaned.nt")
        if os.path.isfile(cleaned_path):
            named.append((name, _load_ontology(cleaned_path, strict)))
        else:
            _check_exists(path, f"ontologies[{name}]", manifest.path)
            logger.warning("no cleaned graph for %s, merging the raw file", name)
            named.append((name, _load_ontology(path, strict)))
    core = merge(named)
    heterogeneity = detect_semantic_heterogeneity(core, named)
    aligned_count = 0
    if manifest.alignment_map:
        _check_exists(manifest.alignment_map, "alignment_map", manifest.path)
        core, aligned_count = align_identifiers(core, read_alignment_map(manifest.alignment_map))
    core_dir = os.path.join(out, "core")
    os.makedirs(core_dir, exist_ok=True)
    save_ntriples(core, _core_path(out))
    core_stats = compute_stats(core)
    _write_stats(core_stats, core_dir, "core")
    lines = [f"semantic-heterogeneity\t{len(heterogeneity)}"]
    lines += [f"conflict\t{f.entity.value}\t{f.detail}" for f in heterogeneity]
    lines.append(f"identifier-alignment\t{aligned_count}")
    with open(os.path.join(core_dir, "merged_checks.txt"), "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    logger.info("core: %d triples, %d heterogeneity findings, %d aligned occurrences",
                len(core), len(heterogeneity), aligned_count)
    return core


def run_edges(manifest: BuildManifest, out: str, strict: bool = False,
              threads: int = 1) -> EdgeListCollection:
    """Assemble every edge spec and serialize the collection."""
    for index, spec in enumerate(manifest.edge_specs):
        _check_exists(spec.source, f"edge_specs[{index}].source", manifest.path)
        for key, value in (("subject_map", spec.subject_map), ("object_map", spec.object_map)):
            if value:
                _check_exists(value, f"edge_specs[{index}].{key}", manifest.path)
    namespaces = manifest.namespace_table()
    if threads > 1:
        collection = EdgeListCollection()
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(assemble_edges, [spec], namespaces, strict): spec
                for spec in manifest.edge_specs
            }
            for future, spec in futures.items():
                partial = future.result()
                collection.edge_lists.update(partial.edge_lists)
                collection.failures.update(partial.failures)
    else:
        collection = assemble_edges(manifest.edge_specs, namespaces, strict)
    edges_dir = os.path.join(out, "edges")
    os.makedirs(edges_dir, exist_ok=True)
    write_edge_lists(collection, _edges_path(out))
    for name, reason in sorted(collection.failures.items()):
        logger.error("edge type %s failed: %s", name, reason)
    return collection


def _write_stats(stats: GraphStats, directory: str, label: str) -> None:
    with open(os.path.join(directory, f"stats_{label}.json"), "w", encoding="utf-8") as handle:
        json.dump(stats.as_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    with open(os.path.join(directory, f"stats_{label}.txt"), "w", encoding="utf-8") as handle:
        handle.write(format_stats_table([(label, stats)]))


def export_node_metadata(
    full_graph: TripleGraph,
    nodes: list[str],
    label_predicates: tuple[str, ...] = DEFAULT_LABEL_PREDICATES,
    definition_predicates: tuple[str, ...] = DEFAULT_DEFINITION_PREDICATES,
    synonym_predicates: tuple[str, ...] = DEFAULT_SYNONYM_PREDICATES,
) -> str:
    """Render a node metadata sidecar as TSV: iri, label, definition, synonyms.

    Annotation values come from the full (pre-abstraction) graph; missing
    fields stay empty and multiple values are sorted and joined with '|'.
    """
    def annotation(node: Term, predicates: tuple[str, ...]) -> str:
        values = sorted(
            t.object.value
            for predicate in predicates
            for t in full_graph.match(node, Term(IRI, predicate), None)
            if t.object.is_literal
        )
        return "|".join(values)

    lines = ["iri\tlabel\tdefinition\tsynonyms"]
    for value in sorted(nodes):
        node = Term(IRI, value)
        lines.append(
            f"{value}\t{annotation(node, label_predicates)}"
            f"\t{annotation(node, definition_predicates)}"
            f"\t{annotation(node, synonym_predicates)}"
        )
    return "\n".join(lines) + "\n"


def _update_metadata(
    directory: str,
    manifest: BuildManifest,
    tup: BuildTuple,
    steps: list[StepRecord],
    sources: Optional[list[SourceRecord]] = None,
) -> None:
    digest = manifest.config_digest()
    try:
        meta = read_build_metadata(directory)
        if meta.config_digest != digest:
            meta = None  # config changed; start fresh
    except (OSError, ValueError, KeyError):
        meta = None
    if meta is None:
        meta = BuildMetadata(
            build_id=f"{tup.label}-{digest[:12]}",
            tool_version=__version__,
            config_digest=digest,
        )
    if sources:
        meta.sources = sources
    for record in steps:
        meta.add_step(record)
    write_build_metadata(meta, directory)


def _iri_nodes(graph: TripleGraph) -> list[str]:
    nodes = set()
    terms = graph._terms
    for s, _, o in graph._spo:
        st = terms[s]
        if st.kind == IRI:
            nodes.add(st.value)
        ot = terms[o]
        if ot.kind == IRI:
            nodes.add(ot.value)
    return sorted(nodes)


def run_build_tuple(
    manifest: BuildManifest,
    out: str,
    tup: BuildTuple,
    core: Optional[TripleGraph] = None,
    edges: Optional[EdgeListCollection] = None,
    shared_steps: Optional[list[StepRecord]] = None,
    sources: Optional[list[SourceRecord]] = None,
) -> TripleGraph:
    """Construct the OWL graph for one tuple and write its build directory.

    For non-abstracted tuples this produces the final KG file and sidecar;
    abstracted tuples get their final KG from :func:`run_abstract_tuple`.
    """
    _check_exists(manifest.anchor_map, "anchor_map", manifest.path)
    _check_exists(manifest.relation_catalog, "relation_catalog", manifest.path)
    if core is None:
        if not os.path.isfile(_core_path(out)):
            raise DataError(f"no merged core at {_core_path(out)}; run the merge stage first")
        core = load_ntriples(_core_path(out))
    if edges is None:
        if not os.path.isfile(_edges_path(out)):
            raise DataError(f"no edge lists at {_edges_path(out)}; run the edges stage first")
        edges = read_edge_lists(_edges_path(out))

    directory = build_dir(out, tup)
    os.makedirs(directory, exist_ok=True)
    log = BuildLog(os.path.join(directory, "build.log"))
    try:
        config = BuildConfig(
            knowledge_model=tup.knowledge_model,
            relation_strategy=tup.relation_strategy,
            anchors=read_anchor_map(manifest.anchor_map),
            catalog=read_relation_catalog(manifest.relation_catalog),
        )
        config.anchors.validate_against(core)
        log.info("graph-construction", f"building {tup.label} from {len(core)} core triples")
        started = time.perf_counter()
        graph, build_stats = build(core, edges, config)
        seconds = time.perf_counter() - started
        for name, reason in sorted(build_stats.failures.items()):
            log.error("graph-construction", f"edge type {name} skipped: {reason}")
        log.info(
            "graph-construction",
            f"added {build_stats.triples_added} triples for {build_stats.directed_edges} directed edges",
        )
        with open(os.path.join(directory, "build_stats.json"), "w", encoding="utf-8") as handle:
            json.dump(build_stats.as_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        if tup.abstraction == ABSTRACTION_NONE:
            save_ntriples(graph, kg_path(out, tup))
            sidecar = export_node_metadata(graph, _iri_nodes(graph))
            with open(os.path.join(directory, f"node_metadata_{tup.label}.tsv"),
                      "w", encoding="utf-8") as handle:
                handle.write(sidecar)
        else:
            save_ntriples(graph, full_kg_path(out, tup))
        step = StepRecord("graph-construction", seconds,
                          items_in=len(core), items_out=len(graph))
        _update_metadata(directory, manifest, tup, (shared_steps or []) + [step], sources)
        return graph
    finally:
        log.close()


def run_abstract_tuple(
    manifest: BuildManifest,
    out: str,
    tup: BuildTuple,
    full: Optional[TripleGraph] = None,
) -> Optional[TripleGraph]:
    """Abstract (and possibly harmonize) one tuple's built graph."""
    if tup.abstraction == ABSTRACTION_NONE:
        return None
    directory = build_dir(out, tup)
    os.makedirs(directory, exist_ok=True)
    if full is None:
        path = full_kg_path(out, tup)
        if not os.path.isfile(path):
            raise DataError(f"no built graph at {path}; run the build stage first")
        full = load_ntriples(path)
    log = BuildLog(os.path.join(directory, "build.log"))
    try:
        started = time.perf_counter()
        hybrid, report = abstract(full)
        if tup.abstraction == ABSTRACTION_HARMONIZED:
            hybrid = harmonize(hybrid, tup.knowledge_model)
        seconds = time.perf_counter() - started
        log.info("abstraction",
                 f"decoded {len(full)} triples into {len(hybrid)} hybrid edges")
        save_ntriples(hybrid, kg_path(out, tup))
        with open(os.path.join(directory, f"hybrid_edges_{tup.label}.tsv"),
                  "w", encoding="utf-8") as handle:
            handle.write(hybrid_edges_tsv(hybrid))
        with open(os.path.join(directory, f"abstraction_report_{tup.label}.json"),
                  "w", encoding="utf-8") as handle:
            json.dump(report.as_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        sidecar = export_node_metadata(full, _iri_nodes(hybrid))
        with open(os.path.join(directory, f"node_metadata_{tup.label}.tsv"),
                  "w", encoding="utf-8") as handle:
            handle.write(sidecar)
        step = StepRecord("abstraction", seconds, items_in=len(full), items_out=len(hybrid))
        _update_metadata(directory, manifest, tup, [step])
        return hybrid
    finally:
        log.close()


def run_stats_tuple(manifest: BuildManifest, out: str, tup: BuildTuple) -> GraphStats:
    """Compute and write statistics for one tuple's final KG file."""
    path = kg_path(out, tup)
    if not os.path.isfile(path):
        raise DataError(f"no KG at {path}; run the build/abstract stages first")
    directory = build_dir(out, tup)
    started = time.perf_counter()
    graph = load_ntriples(path)
    stats = compute_stats(graph)
    _write_stats(stats, directory, tup.label)
    step = StepRecord("stats", time.perf_counter() - started,
                      items_in=stats.triples, items_out=stats.triples)
    _update_metadata(directory, manifest, tup, [step])
    return stats


def _record_sources(manifest: BuildManifest) -> tuple[list[SourceRecord], StepRecord]:
    started = time.perf_counter()
    paths: dict[str, str] = {}

    def note(logical: str, path: Optional[str]) -> None:
        if path and os.path.isfile(path):
            paths.setdefault(os.path.abspath(path), logical)

    note("build_manifest", manifest.path)
    for name, path in manifest.ontologies:
        note(f"ontology:{name}", path)
    note("alignment_map", manifest.alignment_map)
    note("anchor_map", manifest.anchor_map)
    note("relation_catalog", manifest.relation_catalog)
    for spec in manifest.edge_specs:
        note(f"edge_source:{spec.name}", spec.source)
        note(f"subject_map:{spec.name}", spec.subject_map)
        note(f"object_map:{spec.name}", spec.object_map)
    records = [
        record_source(path, logical)
        for path, logical in sorted(paths.items(), key=lambda kv: kv[1])
    ]
    step = StepRecord("data-download", time.perf_counter() - started,
                      items_in=len(records), items_out=len(records))
    return records, step


def run_pipeline(
    manifest: BuildManifest,
    out: str,
    all_builds: bool = False,
    strict: bool = True,
    threads: int = 1,
) -> list[tuple[BuildTuple, GraphStats]]:
    """Run every stage, sharing one core and one edge collection across builds."""
    os.makedirs(out, exist_ok=True)
    sources, download_step = _record_sources(manifest)
    run_qc(manifest, out, strict=strict)
    core = run_merge(manifest, out, strict=strict)
    started = time.perf_counter()
    edges = run_edges(manifest, out, strict=False, threads=threads)
    edges_step = StepRecord(
        "edge-list-creation",
        time.perf_counter() - started,
        items_in=sum(e.stats.rows_read for e in edges.edge_lists.values()),
        items_out=sum(len(e.pairs) for e in edges.edge_lists.values()),
    )
    tuples = list(ALL_BUILD_TUPLES) if all_builds else list(manifest.builds)

    def run_one(tup: BuildTuple) -> tuple[BuildTuple, GraphStats]:
        full = run_build_tuple(
            manifest, out, tup, core=core, edges=edges,
            shared_steps=[download_step, edges_step], sources=sources,
        )
        run_abstract_tuple(manifest, out, tup, full=full)
        return tup, run_stats_tuple(manifest, out, tup)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, tuples))
    else:
        results = [run_one(tup) for tup in tuples]

    summary = format_stats_table([(tup.label, stats) for tup, stats in results])
    with open(os.path.join(out, "builds", "stats_summary.txt"), "w", encoding="utf-8") as handle:
        handle.write(summary)
    return results
