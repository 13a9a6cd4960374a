"""
Class-based and instance-based knowledge models
===============================================

A database edge such as <<gene G77, causes, acoustic syndrome>> cannot be
asserted directly between two ontology classes. The build grounds each new
entity under its anchor class (two declaration triples) and then encodes the
edge with five triples and two fresh nodes, in one of two ways:

* class-based: an anonymous subclass of the subject constrained by an
  existential restriction on the relation, or
* instance-based: two fresh individuals of the endpoint classes linked by
  the relation directly.
"""

from kgforge import TripleGraph, iri, serialize_ntriples, triple
from kgforge.build import (
    AnchorMap,
    BuildConfig,
    CatalogEntry,
    RelationCatalog,
    build,
)
from kgforge.edges import EdgeList, EdgeListCollection, IngestStats
from kgforge.vocab import OWL_CLASS, RDF_TYPE

GENE_CLASS = "http://example.org/onto/Gene"
SYNDROME = "http://example.org/onto/AcousticSyndrome"
NEW_GENE = "http://example.org/gene/G77"
CAUSES = "http://example.org/rel/causes"

core = TripleGraph([
    triple(iri(GENE_CLASS), iri(RDF_TYPE), iri(OWL_CLASS)),
    triple(iri(SYNDROME), iri(RDF_TYPE), iri(OWL_CLASS)),
])
edges = EdgeListCollection()
edges.edge_lists["gene-syndrome"] = EdgeList(
    "gene-syndrome", CAUSES, ((NEW_GENE, SYNDROME),), stats=IngestStats(rows_read=1)
)
anchors = AnchorMap({NEW_GENE: GENE_CLASS})
catalog = RelationCatalog([CatalogEntry(CAUSES, "causes")])

for model in ("class", "instance"):
    config = BuildConfig(model, "standard", anchors, catalog)
    built, _ = build(core, edges, config)
    added = TripleGraph(t for t in built if t not in core)
    print(f"--- {model}-based model adds {len(added)} triples ---")
    print(serialize_ntriples(added, canonical=True))

print("the two declaration triples are shared; the five edge triples differ, "
      "and the blank labels are digests, so rebuilding is reproducible")
