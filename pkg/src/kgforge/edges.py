"""Edge list assembly: parse tabular sources, filter, map identifiers, dedup.

Each edge type is described by an :class:`EdgeTypeSpec` and flows through
``parse -> filter -> map -> dedup``; every stage is usable on its own. Pairs
are kept in first-seen order but compared as sets, and serialized sorted so
repeated runs produce identical files.
"""

from __future__ import annotations

import gzip
import io
import json
import logging
import os
import re
import zipfile
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import ConfigurationError, DataError, UnknownPrefixError
from .rdf import NamespaceTable, iri_is_valid

logger = logging.getLogger(__name__)

OPERATORS = ("==", "!=", "<", "<=", ">", ">=", "in-set", "matches-regex")


@dataclass(frozen=True)
class FilterRule:
    """One column predicate; a row survives only if every rule holds."""

    column: int
    operator: str
    operand: object

    def __post_init__(self) -> None:
        if self.operator not in OPERATORS:
            raise ConfigurationError(f"unknown filter operator {self.operator!r}")
        if self.operator == "in-set" and not isinstance(self.operand, (list, tuple, set, frozenset)):
            raise ConfigurationError("in-set operand must be a collection")
        if self.operator == "matches-regex":
            re.compile(str(self.operand))

    def accepts(self, row: list[str]) -> bool:
        value = row[self.column]
        op = self.operator
        if op == "in-set":
            return value in self.operand  # type: ignore[operator]
        if op == "matches-regex":
            return re.search(str(self.operand), value) is not None
        left: object = value
        right: object = str(self.operand)
        try:
            left, right = float(value), float(str(self.operand))
        except ValueError:
            pass
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right  # type: ignore[operator]
        if op == "<=":
            return left <= right  # type: ignore[operator]
        if op == ">":
            return left > right  # type: ignore[operator]
        return left >= right  # type: ignore[operator]


@dataclass(frozen=True)
class EdgeTypeSpec:
    """Declarative recipe for one edge type.

    ``inverse_mode`` is one of ``none``, ``symmetric``, or ``inverse`` (the
    latter carrying ``inverse_iri``); ``pre_symmetrized`` marks sources that
    already contain both directions of a symmetric relation.
    """

    name: str
    source: str
    subject_column: int
    object_column: int
    relation: str
    delimiter: str = "\t"
    inverse_mode: str = "none"
    inverse_iri: Optional[str] = None
    filters: tuple[FilterRule, ...] = ()
    subject_map: Optional[str] = None
    object_map: Optional[str] = None
    pre_symmetrized: bool = False
    header: bool = False

    def __post_init__(self) -> None:
        if self.subject_column == self.object_column:
            raise ConfigurationError(f"edge type {self.name!r}: subject and object columns must differ")
        if self.inverse_mode not in ("none", "symmetric", "inverse"):
            raise ConfigurationError(f"edge type {self.name!r}: bad inverse_mode {self.inverse_mode!r}")
        if self.inverse_mode == "inverse":
            if not self.inverse_iri:
                raise ConfigurationError(f"edge type {self.name!r}: inverse_mode=inverse requires inverse_iri")
            if self.inverse_iri == self.relation:
                raise ConfigurationError(f"edge type {self.name!r}: inverse_iri must differ from relation")
        elif self.inverse_iri:
            raise ConfigurationError(f"edge type {self.name!r}: inverse_iri only allowed with inverse_mode=inverse")


@dataclass
class IngestStats:
    rows_read: int = 0
    rows_malformed: int = 0
    rows_filtered: int = 0
    rows_unmapped: int = 0
    pairs_deduplicated: int = 0
    distinct_subjects: int = 0
    distinct_objects: int = 0

    def as_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_malformed": self.rows_malformed,
            "rows_filtered": self.rows_filtered,
            "rows_unmapped": self.rows_unmapped,
            "pairs_deduplicated": self.pairs_deduplicated,
            "distinct_subjects": self.distinct_subjects,
            "distinct_objects": self.distinct_objects,
        }


@dataclass
class EdgeList:
    """Assembled subject-object IRI pairs for one edge type."""

    spec_name: str
    relation: str
    pairs: tuple[tuple[str, str], ...]
    pre_symmetrized: bool = False
    stats: IngestStats = field(default_factory=IngestStats)

    def pair_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeList):
            return NotImplemented
        return (
            self.spec_name == other.spec_name
            and self.relation == other.relation
            and self.pre_symmetrized == other.pre_symmetrized
            and self.pair_set() == other.pair_set()
            and self.stats == other.stats
        )


@dataclass
class EdgeListCollection:
    edge_lists: dict[str, EdgeList] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)


def parse_tabular(path: str, delimiter: str = "\t") -> Iterator[list[str]]:
    """Yield one field vector per line; plain, gzip, and zip files supported."""
    if not os.path.exists(path):
        raise DataError(f"source file does not exist: {path}")
    if path.endswith(".gz"):
        stream = gzip.open(path, "rt", encoding="utf-8")
    elif path.endswith(".zip"):
        archive = zipfile.ZipFile(path)
        members = archive.namelist()
        if len(members) != 1:
            raise DataError(f"zip source must contain exactly one member, found {len(members)}: {path}")
        stream = io.TextIOWrapper(archive.open(members[0]), encoding="utf-8")
    else:
        stream = open(path, encoding="utf-8")
    with stream:
        for raw in stream:
            yield raw.rstrip("\r\n").split(delimiter)


def apply_filters(rows: Iterable[list[str]], rules: Iterable[FilterRule]) -> Iterator[list[str]]:
    """Keep the rows on which every rule holds (empty rule list keeps all)."""
    rules = tuple(rules)
    for row in rows:
        if all(rule.accepts(row) for rule in rules):
            yield row


class MappingTable:
    """source identifier -> target IRIs (one-to-many)."""

    def __init__(self, mapping: dict[str, tuple[str, ...]]) -> None:
        for source, targets in mapping.items():
            for target in targets:
                if not iri_is_valid(target):
                    raise ConfigurationError(f"mapping target for {source!r} is not a valid IRI: {target!r}")
        self._mapping = mapping

    def __len__(self) -> int:
        return len(self._mapping)

    def targets(self, identifier: str) -> tuple[str, ...]:
        return self._mapping.get(identifier, ())


def read_mapping_table(path: str, namespaces: Optional[NamespaceTable] = None) -> MappingTable:
    """Read ``source_id<TAB>target`` rows; repeated sources accumulate targets.

    Targets may be CURIEs when a namespace table is supplied.
    """
    mapping: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected source<TAB>target, got {line!r}")
            source, target = parts
            if namespaces is not None and not iri_is_valid(target):
                target = namespaces.to_iri(target)
            mapping.setdefault(source, []).append(target)
    return MappingTable({k: tuple(v) for k, v in mapping.items()})


def _resolve(value: str, table: Optional[MappingTable], namespaces: Optional[NamespaceTable]) -> tuple[str, ...]:
    if table is not None:
        return table.targets(value)
    if iri_is_valid(value) and "://" in value:
        return (value,)
    if namespaces is not None:
        try:
            expanded = namespaces.to_iri(value)
        except UnknownPrefixError:
            return ()
        return (expanded,) if iri_is_valid(expanded) else ()
    return ()


def map_identifiers(
    pairs: Iterable[tuple[str, str]],
    subject_map: Optional[MappingTable] = None,
    object_map: Optional[MappingTable] = None,
    namespaces: Optional[NamespaceTable] = None,
) -> tuple[list[tuple[str, str]], int]:
    """Replace raw identifiers with IRIs, expanding one-to-many cross products.

    Rows with any unmapped side are dropped and counted. An absent map means
    the column already holds IRIs or CURIEs (expanded via ``namespaces``).

    Returns:
        (iri_pairs preserving input order without dedup, unmapped row count)
    """
    out: list[tuple[str, str]] = []
    unmapped = 0
    for raw_s, raw_o in pairs:
        subjects = _resolve(raw_s, subject_map, namespaces)
        objects = _resolve(raw_o, object_map, namespaces)
        if not subjects or not objects:
            unmapped += 1
            continue
        for s in subjects:
            for o in objects:
                out.append((s, o))
    return out, unmapped


def assemble_one(
    spec: EdgeTypeSpec,
    namespaces: Optional[NamespaceTable] = None,
    strict: bool = False,
) -> EdgeList:
    """Run one spec through parse -> filter -> map -> dedup."""
    stats = IngestStats()
    subject_map = read_mapping_table(spec.subject_map, namespaces) if spec.subject_map else None
    object_map = read_mapping_table(spec.object_map, namespaces) if spec.object_map else None
    needed = max(
        (spec.subject_column, spec.object_column, *(r.column for r in spec.filters))
    )

    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    rows = parse_tabular(spec.source, spec.delimiter)
    if spec.header:
        next(rows, None)
    for row in rows:
        stats.rows_read += 1
        if len(row) <= needed:
            if strict:
                raise DataError(
                    f"edge type {spec.name!r}: row {stats.rows_read} has "
                    f"{len(row)} columns, needs at least {needed + 1}"
                )
            stats.rows_malformed += 1
            continue
        if not all(rule.accepts(row) for rule in spec.filters):
            stats.rows_filtered += 1
            continue
        mapped, unmapped = map_identifiers(
            [(row[spec.subject_column], row[spec.object_column])],
            subject_map, object_map, namespaces,
        )
        stats.rows_unmapped += unmapped
        for pair in mapped:
            if pair in seen:
                stats.pairs_deduplicated += 1
            else:
                seen.add(pair)
                pairs.append(pair)

    stats.distinct_subjects = len({s for s, _ in pairs})
    stats.distinct_objects = len({o for _, o in pairs})
    return EdgeList(
        spec_name=spec.name,
        relation=spec.relation,
        pairs=tuple(pairs),
        pre_symmetrized=spec.pre_symmetrized,
        stats=stats,
    )


def assemble_edges(
    specs: Iterable[EdgeTypeSpec],
    namespaces: Optional[NamespaceTable] = None,
    strict: bool = False,
) -> EdgeListCollection:
    """Assemble every spec; one failing spec is reported, not fatal."""
    collection = EdgeListCollection()
    for spec in specs:
        try:
            collection.edge_lists[spec.name] = assemble_one(spec, namespaces, strict)
        except (DataError, ConfigurationError, OSError) as exc:
            logger.error("edge type %s failed: %s", spec.name, exc)
            collection.failures[spec.name] = str(exc)
    return collection


def write_edge_lists(collection: EdgeListCollection, path: str) -> None:
    """Serialize to JSON with deterministic key order and sorted pairs."""
    payload = {
        "edge_lists": {
            name: {
                "relation": el.relation,
                "pre_symmetrized": el.pre_symmetrized,
                "pairs": sorted(list(p) for p in el.pair_set()),
                "stats": el.stats.as_dict(),
            }
            for name, el in sorted(collection.edge_lists.items())
        },
        "failures": dict(sorted(collection.failures.items())),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_edge_lists(path: str) -> EdgeListCollection:
    """Inverse of :func:`write_edge_lists`."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    collection = EdgeListCollection(failures=dict(payload.get("failures", {})))
    for name, entry in payload["edge_lists"].items():
        stats = IngestStats(**entry["stats"])
        collection.edge_lists[name] = EdgeList(
            spec_name=name,
            relation=entry["relation"],
            pairs=tuple((s, o) for s, o in entry["pairs"]),
            pre_symmetrized=entry["pre_symmetrized"],
            stats=stats,
        )
    return collection
