"""Insert assembled edges into the core graph under a chosen knowledge model.

Class-based insertion encodes each edge as an anonymous subclass of the
subject restricted by an existential on the relation; instance-based insertion
asserts the edge between two fresh individuals of the endpoint classes. Either
way an edge contributes exactly five triples and two fresh nodes, and every
endpoint new to the core graph is first grounded under its anchor class with
two declaration triples.

Fresh node identifiers are deterministic digests of (edge type, subject,
relation, object, slot) rendered as blank nodes, so identical inputs rebuild
byte-identical canonical graphs and re-inserting an edge is a no-op.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import vocab
from .edges import EdgeList, EdgeListCollection
from .errors import BuildError, ConfigurationError
from .rdf import BLANK, IRI, Term, TripleGraph, iri_is_valid

CLASS_MODEL = "class"
INSTANCE_MODEL = "instance"
KNOWLEDGE_MODELS = (CLASS_MODEL, INSTANCE_MODEL)

STANDARD_RELATIONS = "standard"
INVERSE_RELATIONS = "inverse"
RELATION_STRATEGIES = (STANDARD_RELATIONS, INVERSE_RELATIONS)

_RDF_TYPE = Term(IRI, vocab.RDF_TYPE)
_RDFS_SUBCLASSOF = Term(IRI, vocab.RDFS_SUBCLASSOF)
_OWL_CLASS = Term(IRI, vocab.OWL_CLASS)
_OWL_NAMED_INDIVIDUAL = Term(IRI, vocab.OWL_NAMED_INDIVIDUAL)
_OWL_RESTRICTION = Term(IRI, vocab.OWL_RESTRICTION)
_OWL_ON_PROPERTY = Term(IRI, vocab.OWL_ON_PROPERTY)
_OWL_SOME_VALUES_FROM = Term(IRI, vocab.OWL_SOME_VALUES_FROM)


@dataclass(frozen=True)
class CatalogEntry:
    """Relation metadata: label plus inverse IRI or symmetry marker."""

    relation: str
    label: str
    inverse: Optional[str] = None
    symmetric: bool = False

    def __post_init__(self) -> None:
        if self.inverse == self.relation:
            raise ConfigurationError(f"relation {self.relation} lists itself as inverse")
        if self.symmetric and self.inverse:
            raise ConfigurationError(f"symmetric relation {self.relation} must not carry an inverse")


class RelationCatalog:
    """Lookup table from relation IRI to :class:`CatalogEntry`."""

    def __init__(self, entries: Iterable[CatalogEntry] = ()) -> None:
        self._entries = {e.relation: e for e in entries}

    def __contains__(self, relation: str) -> bool:
        return relation in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, relation: str) -> CatalogEntry:
        try:
            return self._entries[relation]
        except KeyError:
            raise BuildError(f"relation {relation} is not in the relation catalog") from None


def read_relation_catalog(path: str) -> RelationCatalog:
    """Read ``relation<TAB>label<TAB>inverse_iri|SYMMETRIC|NONE`` rows."""
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ConfigurationError(f"{path}:{lineno}: expected 3 tab-separated fields, got {line!r}")
            relation, label, tail = parts
            if tail == "SYMMETRIC":
                entries.append(CatalogEntry(relation, label, symmetric=True))
            elif tail == "NONE":
                entries.append(CatalogEntry(relation, label))
            else:
                entries.append(CatalogEntry(relation, label, inverse=tail))
    return RelationCatalog(entries)


class AnchorMap:
    """database entity IRI -> core ontology class IRI."""

    def __init__(self, mapping: dict[str, str]) -> None:
        self._mapping = dict(mapping)

    def __contains__(self, entity: str) -> bool:
        return entity in self._mapping

    def __len__(self) -> int:
        return len(self._mapping)

    def anchor(self, entity: str) -> Optional[str]:
        return self._mapping.get(entity)

    def validate_against(self, core: TripleGraph) -> None:
        """Check that every anchor class is declared owl:Class in the core."""
        missing = sorted(
            anchor for anchor in set(self._mapping.values())
            if Term(IRI, anchor) not in core.subjects(_RDF_TYPE, _OWL_CLASS)
        )
        if missing:
            raise BuildError(f"anchor classes not declared in the core graph: {', '.join(missing)}")


def read_anchor_map(path: str) -> AnchorMap:
    """Read ``entity_iri<TAB>anchor_class_iri`` rows."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected entity<TAB>anchor, got {line!r}")
            mapping[parts[0]] = parts[1]
    return AnchorMap(mapping)


@dataclass(frozen=True)
class BuildConfig:
    """One point in the build matrix plus its supporting tables."""

    knowledge_model: str
    relation_strategy: str
    anchors: AnchorMap
    catalog: RelationCatalog

    def __post_init__(self) -> None:
        if self.knowledge_model not in KNOWLEDGE_MODELS:
            raise ConfigurationError(f"unknown knowledge model {self.knowledge_model!r}")
        if self.relation_strategy not in RELATION_STRATEGIES:
            raise ConfigurationError(f"unknown relation strategy {self.relation_strategy!r}")


@dataclass
class EdgeTypeBuildStats:
    name: str
    relation: str
    pairs_in: int
    directed_edges: int
    new_entities: int
    triples_added: int
    seconds: float

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "pairs_in": self.pairs_in,
            "directed_edges": self.directed_edges,
            "new_entities": self.new_entities,
            "triples_added": self.triples_added,
            "seconds": self.seconds,
        }


@dataclass
class BuildStats:
    per_type: list[EdgeTypeBuildStats] = field(default_factory=list)
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def triples_added(self) -> int:
        return sum(r.triples_added for r in self.per_type)

    @property
    def directed_edges(self) -> int:
        return sum(r.directed_edges for r in self.per_type)

    def as_dict(self) -> dict:
        return {
            "per_type": [r.as_dict() for r in self.per_type],
            "failures": dict(sorted(self.failures.items())),
            "triples_added": self.triples_added,
            "directed_edges": self.directed_edges,
        }


def fresh_node(edge_type: str, s: str, p: str, o: str, slot: int) -> Term:
    """Deterministic blank node for one slot of one inserted edge."""
    digest = hashlib.blake2b(
        f"{edge_type}\t{s}\t{p}\t{o}\t{slot}".encode("utf-8"), digest_size=16
    ).hexdigest()
    return Term(BLANK, f"e{digest}")


def ensure_entity(graph: TripleGraph, entity: str, anchors: AnchorMap,
                  edge_type: str = "?") -> int:
    """Ground an entity under its anchor class; no-op when already a class.

    Returns:
        Number of triples added (0 or 2).

    Raises:
        BuildError: When the entity is neither a declared class nor anchored.
    """
    term = Term(IRI, entity)
    type_id = graph._handle(_RDF_TYPE)
    class_id = graph._handle(_OWL_CLASS)
    entity_id = graph._handle(term)
    if entity_id is not None and type_id is not None and class_id is not None:
        if (entity_id, type_id, class_id) in graph._spo:
            return 0
    anchor = anchors.anchor(entity)
    if anchor is None:
        raise BuildError(f"entity {entity} (edge type {edge_type!r}) is missing from the anchor map")
    added = 0
    added += graph.add_interned(graph.intern(term), graph.intern(_RDFS_SUBCLASSOF), graph.intern(Term(IRI, anchor)))
    added += graph.add_interned(graph.intern(term), graph.intern(_RDF_TYPE), graph.intern(_OWL_CLASS))
    return added


def add_edge_class_model(graph: TripleGraph, s: str, p: str, o: str,
                         edge_type: str = "") -> int:
    """Encode one edge as an anonymous subclass with an existential restriction."""
    u1 = fresh_node(edge_type, s, p, o, 1)
    u2 = fresh_node(edge_type, s, p, o, 2)
    intern = graph.intern
    add = graph.add_interned
    u1_id, u2_id = intern(u1), intern(u2)
    sub_id = intern(_RDFS_SUBCLASSOF)
    added = 0
    added += add(u1_id, sub_id, intern(Term(IRI, s)))
    added += add(u1_id, sub_id, u2_id)
    added += add(u2_id, intern(_RDF_TYPE), intern(_OWL_RESTRICTION))
    added += add(u2_id, intern(_OWL_SOME_VALUES_FROM), intern(Term(IRI, o)))
    added += add(u2_id, intern(_OWL_ON_PROPERTY), intern(Term(IRI, p)))
    return added


def add_edge_instance_model(graph: TripleGraph, s: str, p: str, o: str,
                            edge_type: str = "") -> int:
    """Encode one edge between two fresh individuals of the endpoint classes."""
    u1 = fresh_node(edge_type, s, p, o, 1)
    u2 = fresh_node(edge_type, s, p, o, 2)
    intern = graph.intern
    add = graph.add_interned
    u1_id, u2_id = intern(u1), intern(u2)
    type_id = intern(_RDF_TYPE)
    individual_id = intern(_OWL_NAMED_INDIVIDUAL)
    added = 0
    added += add(u1_id, type_id, intern(Term(IRI, s)))
    added += add(u1_id, type_id, individual_id)
    added += add(u2_id, type_id, intern(Term(IRI, o)))
    added += add(u2_id, type_id, individual_id)
    added += add(u1_id, intern(Term(IRI, p)), u2_id)
    return added


def apply_relation_strategy(
    pairs: Iterable[tuple[str, str]],
    relation: str,
    catalog: RelationCatalog,
    strategy: str,
    pre_symmetrized: bool = False,
) -> list[tuple[str, str, str]]:
    """Expand subject-object pairs into directed (s, relation, o) edges.

    Standard keeps the pairs as-is. Inverse adds the reverse edge under the
    inverse relation where one exists, repeats the relation for symmetric
    entries unless the source was already symmetrized, and leaves
    inverse-less relations unchanged. The result is deduplicated in
    first-seen order.

    Raises:
        BuildError: When the relation is absent from the catalog.
    """
    entry = catalog.entry(relation)
    out: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str, str]] = set()

    def emit(s: str, p: str, o: str) -> None:
        edge = (s, p, o)
        if edge not in seen:
            seen.add(edge)
            out.append(edge)

    pairs = list(pairs)
    for s, o in pairs:
        emit(s, relation, o)
    if strategy == INVERSE_RELATIONS:
        if entry.inverse:
            for s, o in pairs:
                emit(o, entry.inverse, s)
        elif entry.symmetric and not pre_symmetrized:
            for s, o in pairs:
                emit(o, relation, s)
    return out


def build(
    core: TripleGraph,
    edges: EdgeListCollection,
    config: BuildConfig,
) -> tuple[TripleGraph, BuildStats]:
    """Expand and insert every edge list into a copy of the core graph.

    Edge types are processed in name order; data-level problems in one edge
    type are recorded and do not abort the others, while anchor map and
    relation catalog problems abort the build.
    """
    graph = core.copy()
    stats = BuildStats()
    add_edge = add_edge_class_model if config.knowledge_model == CLASS_MODEL else add_edge_instance_model
    for name in sorted(edges.edge_lists):
        edge_list: EdgeList = edges.edge_lists[name]
        started = time.perf_counter()
        directed = apply_relation_strategy(
            edge_list.pairs, edge_list.relation, config.catalog,
            config.relation_strategy, edge_list.pre_symmetrized,
        )
        bad = next((x for e in directed for x in e if not iri_is_valid(x)), None)
        if bad is not None:
            stats.failures[name] = f"invalid IRI in expanded edges: {bad!r}"
            continue
        triples_added = 0
        new_entities = 0
        ensured: set[str] = set()
        for s, p, o in directed:
            for endpoint in (s, o):
                if endpoint not in ensured:
                    ensured.add(endpoint)
                    grew = ensure_entity(graph, endpoint, config.anchors, name)
                    triples_added += grew
                    if grew:
                        new_entities += 1
            triples_added += add_edge(graph, s, p, o, name)
        stats.per_type.append(EdgeTypeBuildStats(
            name=name,
            relation=edge_list.relation,
            pairs_in=len(edge_list.pairs),
            directed_edges=len(directed),
            new_entities=new_entities,
            triples_added=triples_added,
            seconds=time.perf_counter() - started,
        ))
    return graph, stats
