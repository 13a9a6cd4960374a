"""Semantic abstraction tests: pattern decoding, accounting, harmonization."""

from __future__ import annotations

import random

from conftest import random_build_case
from kgforge import vocab
from kgforge.abstraction import (
    BACKBONE,
    INSTANCE,
    RESTRICTION,
    UNDECODABLE,
    abstract,
    harmonize,
    hybrid_edges_tsv,
)
from kgforge.build import (
    BuildConfig,
    add_edge_class_model,
    add_edge_instance_model,
    build,
)
from kgforge.rdf import TripleGraph, iri, literal, parse_ntriples, triple

GENE_CLASS = "http://example.org/onto/Gene"
SYNDROME = "http://example.org/onto/AcousticSyndrome"
NEW_GENE = "http://example.org/gene/G77"
CAUSES = "http://example.org/rel/causes"

RDF_TYPE = iri(vocab.RDF_TYPE)
SUBCLASS = iri(vocab.RDFS_SUBCLASSOF)
OWL_CLASS = iri(vocab.OWL_CLASS)


def seven_triple_fragment(model: str) -> TripleGraph:
    """The two-declaration + five-edge-triple encoding of one grounded edge."""
    graph = TripleGraph([
        triple(iri(NEW_GENE), SUBCLASS, iri(GENE_CLASS)),
        triple(iri(NEW_GENE), RDF_TYPE, OWL_CLASS),
    ])
    adder = add_edge_class_model if model == "class" else add_edge_instance_model
    adder(graph, NEW_GENE, CAUSES, SYNDROME, "toy")
    assert len(graph) == 7
    return graph


class TestPatternDecoding:
    def test_class_fragment_decodes_to_two_edges(self):
        hybrid, report = abstract(seven_triple_fragment("class"))
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (NEW_GENE, CAUSES, SYNDROME),
            (NEW_GENE, vocab.RDFS_SUBCLASSOF, GENE_CLASS),
        }
        assert report.decoded_edges[RESTRICTION] == 1
        assert report.decoded_edges[BACKBONE] == 1

    def test_instance_fragment_decodes_to_the_same_two_edges(self):
        hybrid, report = abstract(seven_triple_fragment("instance"))
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (NEW_GENE, CAUSES, SYNDROME),
            (NEW_GENE, vocab.RDFS_SUBCLASSOF, GENE_CLASS),
        }
        assert report.decoded_edges[INSTANCE] == 1

    def test_named_subject_restriction_decodes(self):
        graph = TripleGraph(parse_ntriples(f"""
<{NEW_GENE}> <{vocab.RDFS_SUBCLASSOF}> _:r .
_:r <{vocab.RDF_TYPE}> <{vocab.OWL_RESTRICTION}> .
_:r <{vocab.OWL_ON_PROPERTY}> <{CAUSES}> .
_:r <{vocab.OWL_SOME_VALUES_FROM}> <{SYNDROME}> .
"""))
        hybrid, report = abstract(graph)
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (NEW_GENE, CAUSES, SYNDROME)
        }
        assert report.consumed == 4

    def test_named_individual_typing_edges_are_kept(self):
        ind = "http://example.org/individual/I1"
        graph = TripleGraph(parse_ntriples(f"""
<{ind}> <{vocab.RDF_TYPE}> <{vocab.OWL_NAMED_INDIVIDUAL}> .
<{ind}> <{vocab.RDF_TYPE}> <{SYNDROME}> .
"""))
        hybrid, report = abstract(graph)
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (ind, vocab.RDF_TYPE, SYNDROME)
        }
        assert report.retained == 1

    def test_intersection_members_decode_as_direct_superclasses(self):
        graph = TripleGraph(parse_ntriples(f"""
<{NEW_GENE}> <{vocab.RDFS_SUBCLASSOF}> _:x .
_:x <{vocab.OWL_INTERSECTION_OF}> _:l1 .
_:l1 <{vocab.RDF_FIRST}> <{GENE_CLASS}> .
_:l1 <{vocab.RDF_REST}> _:l2 .
_:l2 <{vocab.RDF_FIRST}> _:r .
_:l2 <{vocab.RDF_REST}> <{vocab.RDF_NIL}> .
_:r <{vocab.RDF_TYPE}> <{vocab.OWL_RESTRICTION}> .
_:r <{vocab.OWL_ON_PROPERTY}> <{CAUSES}> .
_:r <{vocab.OWL_SOME_VALUES_FROM}> <{SYNDROME}> .
"""))
        hybrid, report = abstract(graph)
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (NEW_GENE, vocab.RDFS_SUBCLASSOF, GENE_CLASS),
            (NEW_GENE, CAUSES, SYNDROME),
        }
        assert report.dropped[UNDECODABLE] == 0

    def test_union_filler_yields_one_edge_per_member(self):
        graph = TripleGraph(parse_ntriples(f"""
<{NEW_GENE}> <{vocab.RDFS_SUBCLASSOF}> _:r .
_:r <{vocab.RDF_TYPE}> <{vocab.OWL_RESTRICTION}> .
_:r <{vocab.OWL_ON_PROPERTY}> <{CAUSES}> .
_:r <{vocab.OWL_SOME_VALUES_FROM}> _:u .
_:u <{vocab.OWL_UNION_OF}> _:l1 .
_:l1 <{vocab.RDF_FIRST}> <{SYNDROME}> .
_:l1 <{vocab.RDF_REST}> _:l2 .
_:l2 <{vocab.RDF_FIRST}> <{GENE_CLASS}> .
_:l2 <{vocab.RDF_REST}> <{vocab.RDF_NIL}> .
"""))
        hybrid, _ = abstract(graph)
        assert {(t.subject.value, t.predicate.value, t.object.value) for t in hybrid} == {
            (NEW_GENE, CAUSES, SYNDROME),
            (NEW_GENE, CAUSES, GENE_CLASS),
        }

    def test_cardinality_restriction_is_undecodable(self):
        graph = TripleGraph(parse_ntriples(f"""
<{NEW_GENE}> <{vocab.RDFS_SUBCLASSOF}> _:r .
_:r <{vocab.RDF_TYPE}> <{vocab.OWL_RESTRICTION}> .
_:r <{vocab.OWL_ON_PROPERTY}> <{CAUSES}> .
_:r <http://www.w3.org/2002/07/owl#minCardinality> "2"^^<http://www.w3.org/2001/XMLSchema#nonNegativeInteger> .
"""))
        hybrid, report = abstract(graph)
        assert len(hybrid) == 0
        assert report.dropped[UNDECODABLE] > 0
        assert report.undecodable_nodes == ["r"]

    def test_complement_is_undecodable(self):
        graph = TripleGraph(parse_ntriples(f"""
<{NEW_GENE}> <{vocab.RDFS_SUBCLASSOF}> _:c .
_:c <{vocab.OWL_COMPLEMENT_OF}> <{SYNDROME}> .
"""))
        hybrid, report = abstract(graph)
        assert len(hybrid) == 0
        assert report.undecodable_nodes == ["c"]

    def test_literals_and_annotations_dropped_with_reasons(self):
        graph = seven_triple_fragment("class")
        graph.add(triple(iri(NEW_GENE), iri(vocab.RDFS_LABEL), literal("a gene")))
        hybrid, report = abstract(graph)
        assert report.dropped["literal-annotation"] == 1
        assert all(not t.object.is_literal for t in hybrid)


class TestHybridPurity:
    def test_no_blanks_literals_or_owl_terms_in_hybrid(self):
        rng = random.Random(79)
        for _ in range(15):
            case = random_build_case(rng, max_edges=40)
            for model in ("class", "instance"):
                config = BuildConfig(model, "inverse", case.anchors, case.catalog)
                built, _ = build(case.core, case.edges, config)
                hybrid, report = abstract(built)
                for t in hybrid:
                    assert t.subject.is_iri and t.object.is_iri
                    assert not vocab.is_vocab_iri(t.subject.value)
                    assert not vocab.is_vocab_iri(t.object.value)
                report.validate()

    def test_accounting_identity_on_fragments(self):
        for model in ("class", "instance"):
            _, report = abstract(seven_triple_fragment(model))
            assert report.input_triples == 7
            assert report.retained + report.consumed + report.dropped_total() == 7


class TestRoundTrip:
    def test_decoded_edges_equal_strategy_expanded_input(self):
        rng = random.Random(83)
        for _ in range(40):
            case = random_build_case(rng, max_edges=40)
            for model in ("class", "instance"):
                for strategy in ("standard", "inverse"):
                    config = BuildConfig(model, strategy, case.anchors, case.catalog)
                    built, _ = build(case.core, case.edges, config)
                    hybrid, report = abstract(built)
                    report.validate()
                    decoded = {
                        (t.subject.value, t.predicate.value, t.object.value)
                        for t in hybrid
                        if t.predicate.value not in (vocab.RDFS_SUBCLASSOF, vocab.RDF_TYPE)
                    }
                    assert decoded == case.expected[strategy]

    def test_self_loops_only_from_self_pairs(self):
        rng = random.Random(89)
        for _ in range(15):
            case = random_build_case(rng, max_edges=40)
            config = BuildConfig("class", "standard", case.anchors, case.catalog)
            built, _ = build(case.core, case.edges, config)
            hybrid, _ = abstract(built)
            loops = {
                (t.subject.value, t.predicate.value)
                for t in hybrid if t.subject == t.object
            }
            expected_loops = {(s, p) for s, p, o in case.expected["standard"] if s == o}
            assert loops == expected_loops


class TestHarmonize:
    def test_class_model_rewrites_typing_to_subclass(self):
        graph = TripleGraph([triple(iri("http://a"), RDF_TYPE, iri("http://b"))])
        out = harmonize(graph, "class")
        assert set(out) == {triple(iri("http://a"), SUBCLASS, iri("http://b"))}

    def test_instance_model_rewrites_subclass_to_typing(self):
        graph = TripleGraph([triple(iri("http://a"), SUBCLASS, iri("http://b"))])
        out = harmonize(graph, "instance")
        assert set(out) == {triple(iri("http://a"), RDF_TYPE, iri("http://b"))}

    def test_coexisting_pair_collapses_by_dedup(self):
        graph = TripleGraph([
            triple(iri("http://a"), RDF_TYPE, iri("http://b")),
            triple(iri("http://a"), SUBCLASS, iri("http://b")),
        ])
        out = harmonize(graph, "class")
        assert len(out) == 1

    def test_relation_count_drops_by_one_when_both_present(self):
        graph = TripleGraph([
            triple(iri("http://a"), RDF_TYPE, iri("http://b")),
            triple(iri("http://c"), SUBCLASS, iri("http://d")),
            triple(iri("http://e"), iri(CAUSES), iri("http://f")),
        ])
        before = {t.predicate for t in graph}
        after = {t.predicate for t in harmonize(graph, "class")}
        assert len(after) == len(before) - 1

    def test_idempotent(self):
        rng = random.Random(97)
        for _ in range(20):
            case = random_build_case(rng, max_edges=25)
            config = BuildConfig("instance", "standard", case.anchors, case.catalog)
            built, _ = build(case.core, case.edges, config)
            hybrid, _ = abstract(built)
            once = harmonize(hybrid, "instance")
            twice = harmonize(once, "instance")
            assert set(twice) == set(once)


def test_hybrid_tsv_is_sorted_full_iris():
    hybrid, _ = abstract(seven_triple_fragment("class"))
    text = hybrid_edges_tsv(hybrid)
    lines = text.splitlines()
    assert lines == sorted(lines)
    assert all(len(line.split("\t")) == 3 for line in lines)
