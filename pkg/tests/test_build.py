"""Knowledge model insertion tests: grounding, edge encoding, strategies."""

from __future__ import annotations

import random

import pytest

from conftest import random_build_case, relabel_blanks_canonically
from kgforge import vocab
from kgforge.build import (
    AnchorMap,
    BuildConfig,
    CatalogEntry,
    RelationCatalog,
    add_edge_class_model,
    add_edge_instance_model,
    apply_relation_strategy,
    build,
    ensure_entity,
    fresh_node,
)
from kgforge.edges import EdgeList, EdgeListCollection, IngestStats
from kgforge.errors import BuildError, ConfigurationError
from kgforge.rdf import TripleGraph, iri, parse_ntriples, serialize_ntriples, triple

GENE_CLASS = "http://example.org/onto/Gene"
SYNDROME = "http://example.org/onto/AcousticSyndrome"
NEW_GENE = "http://example.org/gene/G77"
CAUSES = "http://example.org/rel/causes"


def small_core() -> TripleGraph:
    rdf_type, owl_class = iri(vocab.RDF_TYPE), iri(vocab.OWL_CLASS)
    return TripleGraph([
        triple(iri(GENE_CLASS), rdf_type, owl_class),
        triple(iri(SYNDROME), rdf_type, owl_class),
    ])


def catalog() -> RelationCatalog:
    return RelationCatalog([
        CatalogEntry(CAUSES, "causes", inverse="http://example.org/rel/causedBy"),
        CatalogEntry("http://example.org/rel/near", "near", symmetric=True),
        CatalogEntry("http://example.org/rel/solo", "solo"),
    ])


def single_edge_collection(relation: str = CAUSES, pre_symmetrized: bool = False) -> EdgeListCollection:
    collection = EdgeListCollection()
    collection.edge_lists["gene-syndrome"] = EdgeList(
        spec_name="gene-syndrome",
        relation=relation,
        pairs=((NEW_GENE, SYNDROME),),
        pre_symmetrized=pre_symmetrized,
        stats=IngestStats(rows_read=1),
    )
    return collection


class TestEnsureEntity:
    def test_grounding_adds_exactly_two_triples(self):
        graph = small_core()
        added = ensure_entity(graph, NEW_GENE, AnchorMap({NEW_GENE: GENE_CLASS}))
        assert added == 2
        assert triple(iri(NEW_GENE), iri(vocab.RDFS_SUBCLASSOF), iri(GENE_CLASS)) in graph
        assert triple(iri(NEW_GENE), iri(vocab.RDF_TYPE), iri(vocab.OWL_CLASS)) in graph

    def test_existing_class_is_a_no_op(self):
        graph = small_core()
        assert ensure_entity(graph, SYNDROME, AnchorMap({})) == 0

    def test_second_call_changes_nothing(self):
        graph = small_core()
        anchors = AnchorMap({NEW_GENE: GENE_CLASS})
        ensure_entity(graph, NEW_GENE, anchors)
        before = set(graph)
        assert ensure_entity(graph, NEW_GENE, anchors) == 0
        assert set(graph) == before

    def test_missing_anchor_names_entity_and_edge_type(self):
        graph = small_core()
        with pytest.raises(BuildError) as excinfo:
            ensure_entity(graph, NEW_GENE, AnchorMap({}), edge_type="gene-syndrome")
        assert NEW_GENE in str(excinfo.value)
        assert "gene-syndrome" in str(excinfo.value)


class TestEdgeEncoding:
    def expected_class_fragment(self) -> str:
        return (
            f"_:c0 <{vocab.RDFS_SUBCLASSOF}> <{NEW_GENE}> .\n"
            f"_:c0 <{vocab.RDFS_SUBCLASSOF}> _:c1 .\n"
            f"_:c1 <{vocab.RDF_TYPE}> <{vocab.OWL_RESTRICTION}> .\n"
            f"_:c1 <{vocab.OWL_SOME_VALUES_FROM}> <{SYNDROME}> .\n"
            f"_:c1 <{vocab.OWL_ON_PROPERTY}> <{CAUSES}> .\n"
        )

    def expected_instance_fragment(self) -> str:
        return (
            f"_:c0 <{vocab.RDF_TYPE}> <{NEW_GENE}> .\n"
            f"_:c0 <{vocab.RDF_TYPE}> <{vocab.OWL_NAMED_INDIVIDUAL}> .\n"
            f"_:c0 <{CAUSES}> _:c1 .\n"
            f"_:c1 <{vocab.RDF_TYPE}> <{SYNDROME}> .\n"
            f"_:c1 <{vocab.RDF_TYPE}> <{vocab.OWL_NAMED_INDIVIDUAL}> .\n"
        )

    @staticmethod
    def modulo_blanks(graph: TripleGraph) -> str:
        return serialize_ntriples(relabel_blanks_canonically(graph), canonical=True)

    def test_class_model_emits_the_five_restriction_triples(self):
        graph = TripleGraph()
        assert add_edge_class_model(graph, NEW_GENE, CAUSES, SYNDROME, "t") == 5
        expected = TripleGraph(parse_ntriples(self.expected_class_fragment()))
        assert self.modulo_blanks(graph) == self.modulo_blanks(expected)

    def test_instance_model_emits_the_five_individual_triples(self):
        graph = TripleGraph()
        assert add_edge_instance_model(graph, NEW_GENE, CAUSES, SYNDROME, "t") == 5
        expected = TripleGraph(parse_ntriples(self.expected_instance_fragment()))
        assert self.modulo_blanks(graph) == self.modulo_blanks(expected)

    @pytest.mark.parametrize("adder", [add_edge_class_model, add_edge_instance_model])
    def test_n_distinct_edges_add_5n_triples_and_2n_nodes(self, adder):
        rng = random.Random(61)
        for _ in range(20):
            graph = TripleGraph()
            edges = {
                (f"http://s/{rng.randrange(50)}", f"http://p/{rng.randrange(5)}",
                 f"http://o/{rng.randrange(50)}")
                for _ in range(rng.randint(1, 40))
            }
            for s, p, o in edges:
                adder(graph, s, p, o, "t")
            assert len(graph) == 5 * len(edges)
            blanks = {term for t in graph for term in t if term.is_blank}
            assert len(blanks) == 2 * len(edges)

    @pytest.mark.parametrize("adder", [add_edge_class_model, add_edge_instance_model])
    def test_reinsertion_is_a_no_op(self, adder):
        graph = TripleGraph()
        adder(graph, NEW_GENE, CAUSES, SYNDROME, "t")
        before = set(graph)
        assert adder(graph, NEW_GENE, CAUSES, SYNDROME, "t") == 0
        assert set(graph) == before

    def test_fresh_nodes_are_deterministic_and_slot_distinct(self):
        one = fresh_node("t", "http://s", "http://p", "http://o", 1)
        two = fresh_node("t", "http://s", "http://p", "http://o", 2)
        again = fresh_node("t", "http://s", "http://p", "http://o", 1)
        assert one == again and one != two
        assert fresh_node("other", "http://s", "http://p", "http://o", 1) != one


class TestRelationStrategy:
    def test_inverse_doubles_with_declared_inverse(self):
        pairs = [(f"http://s/{i}", f"http://o/{i}") for i in range(10)]
        out = apply_relation_strategy(pairs, CAUSES, catalog(), "inverse")
        assert len(out) == 20
        assert ("http://o/3", "http://example.org/rel/causedBy", "http://s/3") in out

    def test_standard_keeps_pairs(self):
        pairs = [("http://a", "http://b")]
        out = apply_relation_strategy(pairs, CAUSES, catalog(), "standard")
        assert out == [("http://a", CAUSES, "http://b")]

    def test_no_inverse_relation_unchanged_under_inverse(self):
        pairs = [(f"http://s/{i}", f"http://o/{i}") for i in range(7)]
        out = apply_relation_strategy(pairs, "http://example.org/rel/solo", catalog(), "inverse")
        assert len(out) == 7

    def test_symmetric_adds_reverse(self):
        out = apply_relation_strategy(
            [("http://a", "http://b")], "http://example.org/rel/near", catalog(), "inverse"
        )
        assert set(out) == {
            ("http://a", "http://example.org/rel/near", "http://b"),
            ("http://b", "http://example.org/rel/near", "http://a"),
        }

    def test_pre_symmetrized_unchanged(self):
        pairs = [("http://a", "http://b"), ("http://b", "http://a")]
        out = apply_relation_strategy(
            pairs, "http://example.org/rel/near", catalog(), "inverse", pre_symmetrized=True
        )
        assert len(out) == 2

    def test_symmetric_self_loop_not_doubled(self):
        out = apply_relation_strategy(
            [("http://a", "http://a")], "http://example.org/rel/near", catalog(), "inverse"
        )
        assert len(out) == 1

    def test_inverse_self_pair_still_doubles_by_predicate(self):
        out = apply_relation_strategy([("http://a", "http://a")], CAUSES, catalog(), "inverse")
        assert len(out) == 2

    def test_unknown_relation_aborts(self):
        with pytest.raises(BuildError):
            apply_relation_strategy([("http://a", "http://b")], "http://nope", catalog(), "standard")


class TestBuild:
    def config(self, model="class", strategy="standard") -> BuildConfig:
        return BuildConfig(
            knowledge_model=model,
            relation_strategy=strategy,
            anchors=AnchorMap({NEW_GENE: GENE_CLASS}),
            catalog=catalog(),
        )

    def test_empty_collection_is_identity(self):
        core = small_core()
        graph, stats = build(core, EdgeListCollection(), self.config())
        assert set(graph) == set(core)
        assert stats.triples_added == 0 and stats.directed_edges == 0

    def test_single_edge_hand_count(self):
        core = small_core()
        graph, stats = build(core, single_edge_collection(), self.config())
        # one new endpoint grounded (2 triples) + one encoded edge (5 triples)
        assert len(graph) == len(core) + 2 + 5
        assert stats.per_type[0].new_entities == 1
        assert stats.per_type[0].directed_edges == 1

    def test_inverse_strategy_doubles_directed_edges(self):
        core = small_core()
        graph, stats = build(core, single_edge_collection(), self.config(strategy="inverse"))
        assert stats.per_type[0].directed_edges == 2
        assert len(graph) == len(core) + 2 + 10

    def test_core_is_not_mutated(self):
        core = small_core()
        before = set(core)
        build(core, single_edge_collection(), self.config())
        assert set(core) == before

    def test_node_growth_identical_across_models(self):
        rng = random.Random(67)
        for _ in range(10):
            case = random_build_case(rng, max_edges=30)
            config_class = BuildConfig("class", "standard", case.anchors, case.catalog)
            config_instance = BuildConfig("instance", "standard", case.anchors, case.catalog)
            built_class, _ = build(case.core, case.edges, config_class)
            built_instance, _ = build(case.core, case.edges, config_instance)
            def node_count(graph):
                return len({term for t in graph for term in (t.subject, t.object)})
            assert node_count(built_class) == node_count(built_instance)
            assert len(built_class) == len(built_instance)

    def test_no_triple_level_self_loops_introduced(self):
        rng = random.Random(71)
        for _ in range(10):
            case = random_build_case(rng, max_edges=30)
            config = BuildConfig("class", "inverse", case.anchors, case.catalog)
            built, _ = build(case.core, case.edges, config)
            core_loops = sum(1 for t in case.core if t.subject == t.object)
            built_loops = sum(1 for t in built if t.subject == t.object)
            assert built_loops == core_loops

    def test_fresh_nodes_never_collide_with_core_blanks(self):
        core_text = "_:b1 <http://p> <http://o> .\n"
        core = TripleGraph(parse_ntriples(core_text))
        for t in small_core():
            core.add(t)
        graph, _ = build(core, single_edge_collection(), self.config())
        labels = [term.value for t in graph for term in t if term.is_blank]
        assert "b1" in labels
        assert all(label == "b1" or label.startswith("e") for label in labels)

    def test_determinism_byte_identical_canonical_output(self):
        rng = random.Random(73)
        case = random_build_case(rng, max_edges=60)
        config = BuildConfig("instance", "inverse", case.anchors, case.catalog)
        one, _ = build(case.core, case.edges, config)
        two, _ = build(case.core, case.edges, config)
        assert serialize_ntriples(one, canonical=True) == serialize_ntriples(two, canonical=True)

    def test_missing_anchor_aborts_build(self):
        config = BuildConfig("class", "standard", AnchorMap({}), catalog())
        with pytest.raises(BuildError):
            build(small_core(), single_edge_collection(), config)

    def test_unknown_model_rejected(self):
        with pytest.raises(ConfigurationError):
            BuildConfig("hybrid", "standard", AnchorMap({}), catalog())

    def test_catalog_entry_invariants(self):
        with pytest.raises(ConfigurationError):
            CatalogEntry("http://r", "r", inverse="http://r")
        with pytest.raises(ConfigurationError):
            CatalogEntry("http://r", "r", inverse="http://q", symmetric=True)
