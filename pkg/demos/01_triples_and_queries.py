"""
Triples, pattern matching, and the N-Triples wire format
=========================================================

The substrate of every graph in this package is a set of subject-
predicate-object statements with indexed pattern matching.
"""

from kgforge import (
    NamespaceTable,
    TripleGraph,
    iri,
    literal,
    parse_ntriples,
    serialize_ntriples,
    triple,
)

# Build a tiny graph by hand. Adding a duplicate statement is a no-op.
graph = TripleGraph()
gene = iri("http://www.ncbi.nlm.nih.gov/gene/1956")
label = iri("http://www.w3.org/2000/01/rdf-schema#label")
interacts = iri("http://purl.obolibrary.org/obo/RO_0002434")
other = iri("http://www.ncbi.nlm.nih.gov/gene/2064")

graph.add(triple(gene, label, literal("EGFR")))
graph.add(triple(other, label, literal("ERBB2")))
graph.add(triple(gene, interacts, other))
graph.add(triple(gene, interacts, other))  # duplicate, ignored

print(f"graph holds {len(graph)} statements (4 adds, 1 duplicate)")

# Pattern matching: any combination of bound slots.
print("\nstatements about EGFR:")
for t in sorted(graph.match(gene, None, None), key=str):
    print(f"  {t.predicate.value.rsplit('/', 1)[-1]:>20}  ->  {t.object}")

# CURIEs expand against a namespace table, and contract back.
table = NamespaceTable({"obo": "http://purl.obolibrary.org/obo/"})
expanded = table.expand("obo:MONDO_0010895")
print(f"\nobo:MONDO_0010895 expands to {expanded}")
print(f"and contracts back to {table.contract(expanded)}")

# The canonical serialization is sorted, so equal graphs give equal bytes.
print("\ncanonical N-Triples:")
print(serialize_ntriples(graph, canonical=True))

# Parsing streams lazily and round-trips exactly on blank-free graphs.
reparsed = TripleGraph(parse_ntriples(serialize_ntriples(graph, canonical=True)))
print(f"round trip preserved all {len(reparsed)} statements:",
      set(reparsed) == set(graph))
