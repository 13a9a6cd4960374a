"""Semantic abstraction: decode OWL-encoded statements back into plain edges.

Three decodable patterns produce the hybrid graph:

1. existential restrictions: an anonymous node typed ``owl:Restriction`` with
   ``owl:onProperty`` P and ``owl:someValuesFrom`` Y turns each subclass X of
   that node into an edge (X', P, Y), where X' is X itself when named or X's
   unique named superclass when X is anonymous;
2. individuals: a statement (i, P, j) between two ``owl:NamedIndividual``s
   becomes (X, P, Y) for every named class X of i and Y of j;
3. backbone: ``rdfs:subClassOf`` between two named classes is kept, as are
   ``rdf:type`` edges from named individuals to named classes.

``owl:intersectionOf`` and ``owl:unionOf`` members are traversed as if direct
superclasses; complements and cardinality restrictions are recorded as
undecodable and dropped. Everything else (literals, annotations, OWL
scaffolding) is dropped with a reason code, and the report's accounting
identity ``input = retained + consumed + dropped`` holds exactly.

The hybrid graph contains only IRI-to-IRI edges: no blank nodes, no literals,
and no OWL-namespace subjects or objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import vocab
from .errors import ConfigurationError
from .rdf import BLANK, IRI, LITERAL, Term, TripleGraph

RESTRICTION = "restriction"
INSTANCE = "instance"
BACKBONE = "backbone"
DECODED_KINDS = (RESTRICTION, INSTANCE, BACKBONE)

OWL_UTILITY = "owl-utility"
LITERAL_ANNOTATION = "literal-annotation"
UNDECODABLE = "undecodable"
DROP_REASONS = (OWL_UTILITY, LITERAL_ANNOTATION, UNDECODABLE)

_MAX_EXPR_DEPTH = 50

_Key = tuple[int, int, int]


@dataclass
class AbstractionReport:
    """Where every input triple went, and what the decoding produced."""

    input_triples: int = 0
    retained: int = 0
    consumed: int = 0
    decoded_edges: dict[str, int] = field(default_factory=lambda: {k: 0 for k in DECODED_KINDS})
    dropped: dict[str, int] = field(default_factory=lambda: {k: 0 for k in DROP_REASONS})
    undecodable_nodes: list[str] = field(default_factory=list)

    def dropped_total(self) -> int:
        return sum(self.dropped.values())

    def validate(self) -> None:
        """Assert the accounting identity over input triples."""
        total = self.retained + self.consumed + self.dropped_total()
        if total != self.input_triples:
            raise AssertionError(
                f"abstraction accounting broken: {self.retained} + {self.consumed} "
                f"+ {self.dropped_total()} != {self.input_triples}"
            )

    def as_dict(self) -> dict:
        return {
            "input_triples": self.input_triples,
            "retained": self.retained,
            "consumed": self.consumed,
            "decoded_edges": dict(self.decoded_edges),
            "dropped": dict(self.dropped),
            "undecodable_nodes": sorted(self.undecodable_nodes),
        }


@dataclass
class _Expansion:
    """Pure result of walking a class expression: nothing committed yet."""

    named: list[int] = field(default_factory=list)
    restrictions: list[int] = field(default_factory=list)
    keys: set[_Key] = field(default_factory=set)
    nodes: set[int] = field(default_factory=set)
    complete: bool = True


class _Decoder:
    """One abstraction pass over an interned graph."""

    def __init__(self, graph: TripleGraph) -> None:
        self.graph = graph
        self.terms = graph._terms

        def handle(value: str) -> Optional[int]:
            return graph._ids.get(Term(IRI, value))

        self.h_type = handle(vocab.RDF_TYPE)
        self.h_sub = handle(vocab.RDFS_SUBCLASSOF)
        self.h_restriction = handle(vocab.OWL_RESTRICTION)
        self.h_on_property = handle(vocab.OWL_ON_PROPERTY)
        self.h_some_values = handle(vocab.OWL_SOME_VALUES_FROM)
        self.h_individual = handle(vocab.OWL_NAMED_INDIVIDUAL)
        self.h_first = handle(vocab.RDF_FIRST)
        self.h_rest = handle(vocab.RDF_REST)
        self.h_nil = handle(vocab.RDF_NIL)
        h_intersection = handle(vocab.OWL_INTERSECTION_OF)
        h_union = handle(vocab.OWL_UNION_OF)

        self.types: dict[int, list[int]] = {}
        self.supers: dict[int, list[int]] = {}
        self.prop_of: dict[int, int] = {}
        self.filler_of: dict[int, int] = {}
        self.list_first: dict[int, int] = {}
        self.list_rest: dict[int, int] = {}
        self.expr_list: dict[int, tuple[int, int]] = {}
        self.restriction_nodes: set[int] = set()
        self.individuals: set[int] = set()

        for s, p, o in graph._spo:
            if p == self.h_type:
                self.types.setdefault(s, []).append(o)
                if o == self.h_restriction:
                    self.restriction_nodes.add(s)
                elif o == self.h_individual:
                    self.individuals.add(s)
            elif p == self.h_sub:
                self.supers.setdefault(s, []).append(o)
            elif p == self.h_on_property:
                self.prop_of[s] = o
            elif p == self.h_some_values:
                self.filler_of[s] = o
            elif p == self.h_first:
                self.list_first[s] = o
            elif p == self.h_rest:
                self.list_rest[s] = o
            elif p == h_intersection or p == h_union:
                self.expr_list[s] = (p, o)

        self.consumed: set[_Key] = set()
        self.retained: set[_Key] = set()
        self.decoded_nodes: set[int] = set()
        self.hybrid = TripleGraph()
        self.report = AbstractionReport(input_triples=len(graph))

    def is_named(self, h: int) -> bool:
        t = self.terms[h]
        return t.kind == IRI and not vocab.is_vocab_iri(t.value)

    def is_blank(self, h: int) -> bool:
        return self.terms[h].kind == BLANK

    def emit(self, s: int, p: int, o: int, kind: str) -> None:
        if self.hybrid.add_interned(
            self.hybrid.intern(self.terms[s]),
            self.hybrid.intern(self.terms[p]),
            self.hybrid.intern(self.terms[o]),
        ):
            self.report.decoded_edges[kind] += 1

    def named_types(self, i: int) -> list[int]:
        return [c for c in self.types.get(i, ()) if self.is_named(c)]

    def resolve_subject(self, x: int) -> Optional[int]:
        """X itself when named, else X's unique named superclass."""
        if self.is_named(x):
            return x
        if self.is_blank(x):
            named = [c for c in self.supers.get(x, ()) if self.is_named(c)]
            if len(named) == 1:
                return named[0]
        return None

    def expand_expression(self, node: int, depth: int = 0) -> _Expansion:
        """Walk a class expression without committing anything."""
        if depth > _MAX_EXPR_DEPTH:
            return _Expansion(complete=False)
        if self.is_named(node):
            return _Expansion(named=[node])
        if node in self.restriction_nodes:
            return _Expansion(restrictions=[node])
        linked = self.expr_list.get(node)
        if linked is None:
            return _Expansion(complete=False)
        pred, head = linked
        out = _Expansion()
        out.nodes.add(node)
        out.keys.add((node, pred, head))
        cell: Optional[int] = head
        visited: set[int] = set()
        while cell is not None and cell != self.h_nil and cell not in visited:
            visited.add(cell)
            member = self.list_first.get(cell)
            nxt = self.list_rest.get(cell)
            out.nodes.add(cell)
            if member is None:
                out.complete = False
            else:
                out.keys.add((cell, self.h_first, member))  # type: ignore[arg-type]
                inner = self.expand_expression(member, depth + 1)
                out.named.extend(inner.named)
                out.restrictions.extend(inner.restrictions)
                out.keys |= inner.keys
                out.nodes |= inner.nodes
                out.complete = out.complete and inner.complete
            if nxt is not None:
                out.keys.add((cell, self.h_rest, nxt))  # type: ignore[arg-type]
            cell = nxt
        return out

    def decode_restriction_for(self, subject: int, b: int) -> bool:
        """Emit (subject, P, filler) edges for restriction node b; commit only on success."""
        p = self.prop_of.get(b)
        y = self.filler_of.get(b)
        if p is None or y is None or self.terms[p].kind != IRI:
            return False
        if self.is_named(y):
            fillers = [y]
            expansion = None
        else:
            expansion = self.expand_expression(y)
            if expansion.restrictions or not expansion.complete or not expansion.named:
                return False
            fillers = expansion.named
        for filler in fillers:
            self.emit(subject, p, filler, RESTRICTION)
        if expansion is not None:
            self.consumed |= expansion.keys
            self.decoded_nodes |= expansion.nodes
        self.decoded_nodes.add(b)
        self.consumed.add((b, self.h_type, self.h_restriction))  # type: ignore[arg-type]
        self.consumed.add((b, self.h_on_property, p))  # type: ignore[arg-type]
        self.consumed.add((b, self.h_some_values, y))  # type: ignore[arg-type]
        return True

    def consume_resolution(self, x: int, resolved: int) -> None:
        """A blank subject's naming link (x subClassOf resolved) is consumed."""
        if x != resolved:
            self.consumed.add((x, self.h_sub, resolved))  # type: ignore[arg-type]
            self.decoded_nodes.add(x)

    def run(self) -> tuple[TripleGraph, AbstractionReport]:
        spo = self.graph._spo
        h_type, h_sub = self.h_type, self.h_sub

        # Pattern 1 and the backbone: walk every subclass link once.
        if h_sub is not None:
            for x, targets in self.supers.items():
                x_named = self.is_named(x)
                resolved = x if x_named else self.resolve_subject(x)
                for e in targets:
                    if x_named and self.is_named(e):
                        self.retained.add((x, h_sub, e))
                        self.emit(x, h_sub, e, BACKBONE)
                        continue
                    if not self.is_blank(e) or resolved is None:
                        continue  # leftover; classified at the end
                    if e in self.restriction_nodes:
                        if self.decode_restriction_for(resolved, e):
                            self.consumed.add((x, h_sub, e))
                            if not x_named:
                                self.consume_resolution(x, resolved)
                        continue
                    if e in self.expr_list:
                        expansion = self.expand_expression(e)
                        decoded_any = False
                        for member in expansion.named:
                            self.emit(resolved, h_sub, member, BACKBONE)
                            decoded_any = True
                        for member in expansion.restrictions:
                            if self.decode_restriction_for(resolved, member):
                                decoded_any = True
                        if decoded_any:
                            self.consumed |= expansion.keys
                            self.decoded_nodes |= expansion.nodes
                            self.consumed.add((x, h_sub, e))
                            if not x_named:
                                self.consume_resolution(x, resolved)

        # Pattern 2: statements between typed individuals.
        if h_type is not None:
            participating: set[int] = set()
            for s, p, o in spo:
                if (
                    s in self.individuals
                    and o in self.individuals
                    and self.terms[p].kind == IRI
                    and p != h_type
                    and p != h_sub
                    and not vocab.is_vocab_iri(self.terms[p].value)
                ):
                    subjects = self.named_types(s)
                    objects = self.named_types(o)
                    if subjects and objects:
                        for x in subjects:
                            for y in objects:
                                self.emit(x, p, y, INSTANCE)
                        self.consumed.add((s, p, o))
                        participating.update((s, o))
            # Typing statements: retained verbatim for named individuals,
            # consumed for blank ones that fed the decoding above.
            for i in self.individuals:
                named_i = self.is_named(i)
                blank_i = self.is_blank(i)
                for c in self.types.get(i, ()):
                    if c == self.h_individual:
                        if i in participating:
                            self.consumed.add((i, h_type, c))
                        continue
                    if named_i and self.is_named(c):
                        self.retained.add((i, h_type, c))
                        self.emit(i, h_type, c, INSTANCE)
                    elif blank_i and i in participating and self.is_named(c):
                        self.consumed.add((i, h_type, c))
                if i in participating and blank_i:
                    self.decoded_nodes.add(i)

        # Classify what is left and finish the report.
        report = self.report
        terms = self.terms
        leftover: list[_Key] = []
        blank_leftover: set[int] = set()
        for key in spo:
            if key in self.retained:
                report.retained += 1
            elif key in self.consumed:
                report.consumed += 1
            else:
                leftover.append(key)
                if terms[key[0]].kind == BLANK:
                    blank_leftover.add(key[0])
                if terms[key[2]].kind == BLANK:
                    blank_leftover.add(key[2])
        undecodable = blank_leftover - self.decoded_nodes
        report.undecodable_nodes = sorted(terms[h].value for h in undecodable)
        for s, p, o in leftover:
            if (terms[s].kind == BLANK and s in undecodable) or (
                terms[o].kind == BLANK and o in undecodable
            ):
                report.dropped[UNDECODABLE] += 1
            elif terms[o].kind == LITERAL:
                report.dropped[LITERAL_ANNOTATION] += 1
            elif (
                vocab.is_vocab_iri(terms[p].value)
                or (terms[s].kind == IRI and vocab.is_vocab_iri(terms[s].value))
                or (terms[o].kind == IRI and vocab.is_vocab_iri(terms[o].value))
                or terms[s].kind == BLANK
                or terms[o].kind == BLANK
            ):
                report.dropped[OWL_UTILITY] += 1
            else:
                report.dropped[LITERAL_ANNOTATION] += 1
        report.validate()
        return self.hybrid, report


def abstract(graph: TripleGraph) -> tuple[TripleGraph, AbstractionReport]:
    """Decode a complex graph into a hybrid graph of plain IRI-to-IRI edges."""
    return _Decoder(graph).run()


def harmonize(hybrid: TripleGraph, knowledge_model: str) -> TripleGraph:
    """Rewrite typing edges to match the knowledge model; idempotent.

    Class-based models rewrite ``rdf:type`` to ``rdfs:subClassOf``;
    instance-based models rewrite ``rdfs:subClassOf`` to ``rdf:type``. The
    result is deduplicated by set semantics.
    """
    from .build import CLASS_MODEL, KNOWLEDGE_MODELS

    if knowledge_model not in KNOWLEDGE_MODELS:
        raise ConfigurationError(f"unknown knowledge model {knowledge_model!r}")
    if knowledge_model == CLASS_MODEL:
        source, target = Term(IRI, vocab.RDF_TYPE), Term(IRI, vocab.RDFS_SUBCLASSOF)
    else:
        source, target = Term(IRI, vocab.RDFS_SUBCLASSOF), Term(IRI, vocab.RDF_TYPE)
    out = TripleGraph()
    for t in hybrid:
        if t.predicate == source:
            out.add(t._replace(predicate=target))
        else:
            out.add(t)
    return out


def hybrid_edges_tsv(hybrid: TripleGraph) -> str:
    """Render a hybrid graph as a sorted 3-column TSV of full IRIs."""
    rows = sorted(
        (t.subject.value, t.predicate.value, t.object.value) for t in hybrid
    )
    return "".join(f"{s}\t{p}\t{o}\n" for s, p, o in rows)
