"""Shared test helpers: random-graph generators and independent oracles.

The oracles here deliberately avoid the library's indexed/batched code paths:
statistics are recomputed with plain scans and breadth-first search, and build
universes are expanded with straight-line code, so the tests compare two
independent routes to the same answer.
"""

from __future__ import annotations

import os
import random
from collections import deque
from dataclasses import dataclass

import pytest

from kgforge.build import AnchorMap, CatalogEntry, RelationCatalog
from kgforge.edges import EdgeList, EdgeListCollection, IngestStats
from kgforge.rdf import Term, Triple, TripleGraph, iri, literal, triple
from kgforge.vocab import OWL_CLASS, RDF_TYPE, RDFS_SUBCLASSOF

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")
TOY_MANIFEST = os.path.abspath(os.path.join(FIXTURES, "toy", "manifest.json"))


@pytest.fixture
def toy_manifest_path() -> str:
    return TOY_MANIFEST


def random_term(rng: random.Random, allow_literal: bool = True) -> Term:
    kind = rng.randrange(10)
    if kind < 6 or not allow_literal:
        return iri(f"http://example.org/n{rng.randrange(40)}")
    if kind < 8:
        return Term("blank", f"b{rng.randrange(15)}")
    if rng.randrange(2):
        return literal(f"value {rng.randrange(30)}")
    return literal(str(rng.randrange(100)), datatype="http://www.w3.org/2001/XMLSchema#integer")


def random_graph(rng: random.Random, max_triples: int = 60,
                 allow_literal: bool = True, allow_blank: bool = True) -> TripleGraph:
    graph = TripleGraph()
    for _ in range(rng.randrange(max_triples + 1)):
        subject = random_term(rng, allow_literal=False)
        if not allow_blank and subject.kind == "blank":
            subject = iri(f"http://example.org/n{rng.randrange(40)}")
        predicate = iri(f"http://example.org/p{rng.randrange(8)}")
        obj = random_term(rng, allow_literal=allow_literal)
        if not allow_blank and obj.kind == "blank":
            obj = iri(f"http://example.org/n{rng.randrange(40)}")
        graph.add(triple(subject, predicate, obj))
    return graph


# Brute-force statistics oracles (independent of kgforge.stats).

def oracle_counts(graph: TripleGraph) -> dict:
    triples = list(graph)
    nodes = set()
    relations = set()
    self_loops = 0
    for t in triples:
        nodes.add(t.subject)
        relations.add(t.predicate)
        if not t.object.is_literal:
            nodes.add(t.object)
            if t.subject == t.object:
                self_loops += 1
    return {
        "triples": len(triples),
        "nodes": len(nodes),
        "relations": len(relations),
        "self_loops": self_loops,
        "components": oracle_components(triples),
    }


def oracle_components(triples: list[Triple]) -> int:
    adjacency: dict[Term, set[Term]] = {}
    for t in triples:
        adjacency.setdefault(t.subject, set())
        if not t.object.is_literal:
            adjacency.setdefault(t.object, set())
            adjacency[t.subject].add(t.object)
            adjacency[t.object].add(t.subject)
    seen: set[Term] = set()
    components = 0
    for start in adjacency:
        if start in seen:
            continue
        components += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            node = queue.popleft()
            for neighbour in adjacency[node]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    queue.append(neighbour)
    return components


# Random build universes for round-trip testing.

@dataclass
class BuildCase:
    core: TripleGraph
    edges: EdgeListCollection
    anchors: AnchorMap
    catalog: RelationCatalog
    expected: dict[str, set[tuple[str, str, str]]]  # strategy -> directed edges


def _expand_for_strategy(
    pairs: list[tuple[str, str]], relation: str, entry: CatalogEntry,
    strategy: str, pre_symmetrized: bool,
) -> set[tuple[str, str, str]]:
    edges = {(s, relation, o) for s, o in pairs}
    if strategy == "inverse":
        if entry.inverse:
            edges |= {(o, entry.inverse, s) for s, o in pairs}
        elif entry.symmetric and not pre_symmetrized:
            edges |= {(o, relation, s) for s, o in pairs}
    return edges


def random_build_case(rng: random.Random, max_edges: int = 200) -> BuildCase:
    """A random toy universe: core classes, anchored entities, edge lists."""
    anchor_classes = [f"http://example.org/onto/A{i}" for i in range(rng.randint(1, 4))]
    entities = [f"http://example.org/ent/E{i}" for i in range(rng.randint(2, 25))]
    core = TripleGraph()
    rdf_type, owl_class, subclass = iri(RDF_TYPE), iri(OWL_CLASS), iri(RDFS_SUBCLASSOF)
    for value in anchor_classes:
        core.add(triple(iri(value), rdf_type, owl_class))
    for value in anchor_classes[1:]:
        core.add(triple(iri(value), subclass, iri(anchor_classes[0])))

    entries = []
    for i in range(rng.randint(1, 4)):
        relation = f"http://example.org/rel/R{i}"
        kind = rng.randrange(3)
        if kind == 0:
            entries.append(CatalogEntry(relation, f"r{i}", inverse=f"http://example.org/rel/R{i}inv"))
        elif kind == 1:
            entries.append(CatalogEntry(relation, f"r{i}", symmetric=True))
        else:
            entries.append(CatalogEntry(relation, f"r{i}"))
    catalog = RelationCatalog(entries)
    # Relations are declared in the core, as in a merged relation ontology;
    # this is what makes node growth identical across knowledge models.
    object_property = iri("http://www.w3.org/2002/07/owl#ObjectProperty")
    for entry in entries:
        core.add(triple(iri(entry.relation), rdf_type, object_property))
        if entry.inverse:
            core.add(triple(iri(entry.inverse), rdf_type, object_property))

    collection = EdgeListCollection()
    budget = rng.randint(1, max_edges)
    expected: dict[str, set[tuple[str, str, str]]] = {"standard": set(), "inverse": set()}
    n_types = rng.randint(1, 3)
    for index in range(n_types):
        entry = entries[rng.randrange(len(entries))]
        share = max(1, budget // n_types)
        pairs: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()
        for _ in range(share):
            s = entities[rng.randrange(len(entities))]
            o = s if rng.randrange(12) == 0 else entities[rng.randrange(len(entities))]
            if (s, o) not in seen:
                seen.add((s, o))
                pairs.append((s, o))
        pre_symmetrized = bool(entry.symmetric and rng.randrange(3) == 0)
        if pre_symmetrized:
            for s, o in list(pairs):
                if (o, s) not in seen:
                    seen.add((o, s))
                    pairs.append((o, s))
        name = f"type-{index}"
        collection.edge_lists[name] = EdgeList(
            spec_name=name,
            relation=entry.relation,
            pairs=tuple(pairs),
            pre_symmetrized=pre_symmetrized,
            stats=IngestStats(rows_read=len(pairs)),
        )
        for strategy in ("standard", "inverse"):
            expected[strategy] |= _expand_for_strategy(
                pairs, entry.relation, entry, strategy, pre_symmetrized
            )
    anchors = AnchorMap({e: anchor_classes[rng.randrange(len(anchor_classes))] for e in entities})
    return BuildCase(core=core, edges=collection, anchors=anchors,
                     catalog=catalog, expected=expected)


def relabel_blanks_canonically(graph: TripleGraph) -> TripleGraph:
    """Rename blank nodes to a canonical numbering for modulo-label comparison.

    Labels are assigned in the lexicographic order of each blank node's
    occurrence signature, which is stable across different input labelings of
    isomorphic graphs whose blank nodes are structurally distinguishable.
    """
    from kgforge.rdf import serialize_term

    signature: dict[Term, list[str]] = {}
    for t in sorted(graph, key=lambda t: (
        serialize_term(t.subject) if not t.subject.is_blank else "_",
        serialize_term(t.predicate),
        serialize_term(t.object) if not t.object.is_blank else "_",
    )):
        for position, term in enumerate(t):
            if term.is_blank:
                signature.setdefault(term, []).append(
                    f"{position}|{serialize_term(t.predicate)}|"
                    f"{serialize_term(t.object) if position == 0 and not t.object.is_blank else ''}|"
                    f"{serialize_term(t.subject) if position == 2 and not t.subject.is_blank else ''}"
                )
    order = sorted(signature, key=lambda term: (sorted(signature[term]), term.value))
    renaming = {term: Term("blank", f"c{i}") for i, term in enumerate(order)}
    out = TripleGraph()
    for t in graph:
        s = renaming.get(t.subject, t.subject)
        o = renaming.get(t.object, t.object)
        out.add(Triple(s, t.predicate, o))
    return out
