"""Ontology quality control: defect detection and repair with before/after stats.

All ``detect_*`` functions are pure; ``clean_ontology`` returns a new graph and
a report, leaving its input untouched, so individual ontologies can be cleaned
in parallel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import vocab
from .rdf import IRI, LITERAL, Term, Triple, TripleGraph, iri, iri_is_valid
from .stats import connected_components

VALUE_ERROR = "value-error"
IDENTIFIER_ERROR = "identifier-error"
DEPRECATED = "deprecated"
OBSOLETE = "obsolete"
PUNNING = "punning"
FINDING_KINDS = (VALUE_ERROR, IDENTIFIER_ERROR, DEPRECATED, OBSOLETE, PUNNING)

_OBSOLETE_LABEL_RE = re.compile(r"^obsolete\b", re.IGNORECASE)
_OBO_LOCAL_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*_[A-Za-z0-9]+")

_RDF_TYPE = iri(vocab.RDF_TYPE)
_RDFS_SUBCLASSOF = iri(vocab.RDFS_SUBCLASSOF)
_RDFS_LABEL = iri(vocab.RDFS_LABEL)
_OWL_DEPRECATED = iri(vocab.OWL_DEPRECATED)
_OBSOLETE_CLASS = iri(vocab.OBOINOWL_OBSOLETE_CLASS)
_DECLARATION_TERMS = {kind: iri(kind) for kind in vocab.DECLARATION_KINDS}

# Lexical checks for common XSD datatypes; unknown datatypes are not checked.
_INTEGER_RE = re.compile(r"[+-]?[0-9]+")
_DECIMAL_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)")
_FLOAT_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?|[+-]?INF|NaN")
_BOOLEAN_RE = re.compile(r"true|false|0|1")
_INTEGER_TYPES = {
    vocab.XSD_NS + name
    for name in (
        "integer", "int", "long", "short", "byte",
        "nonNegativeInteger", "positiveInteger", "nonPositiveInteger",
        "negativeInteger", "unsignedLong", "unsignedInt", "unsignedShort",
        "unsignedByte",
    )
}
_DATATYPE_PATTERNS: list[tuple[frozenset[str], re.Pattern[str]]] = [
    (frozenset(_INTEGER_TYPES), _INTEGER_RE),
    (frozenset({vocab.XSD_NS + "decimal"}), _DECIMAL_RE),
    (frozenset({vocab.XSD_NS + "float", vocab.XSD_NS + "double"}), _FLOAT_RE),
    (frozenset({vocab.XSD_BOOLEAN}), _BOOLEAN_RE),
]


@dataclass(frozen=True)
class QCFinding:
    """One detected defect, attached to a term of the inspected graph."""

    kind: str
    entity: Term
    detail: str = ""


@dataclass(frozen=True)
class OntologyProfile:
    """Declaration and size statistics for one ontology graph."""

    triples: int
    classes: int
    individuals: int
    object_properties: int
    annotation_properties: int
    connected_components: int

    def as_dict(self) -> dict:
        return {
            "triples": self.triples,
            "classes": self.classes,
            "individuals": self.individuals,
            "object_properties": self.object_properties,
            "annotation_properties": self.annotation_properties,
            "connected_components": self.connected_components,
        }


@dataclass(frozen=True)
class CleaningPolicy:
    """Selects which finding kinds ``clean_ontology`` repairs."""

    deprecated: bool = True
    obsolete: bool = True
    punning: bool = True
    value_errors: bool = True
    identifier_errors: bool = True


@dataclass
class QCReport:
    """Before/after statistics plus findings and applied repairs."""

    ontology_name: str
    pre: OntologyProfile
    post: OntologyProfile
    findings: list[QCFinding] = field(default_factory=list)
    repairs_applied: dict[str, int] = field(default_factory=dict)
    removed_entities: int = 0
    removed_classes: int = 0
    triples_dropped: int = 0
    identifiers_rewritten: int = 0
    notes: list[str] = field(default_factory=list)

    def finding_counts(self) -> dict[str, int]:
        counts = {kind: 0 for kind in FINDING_KINDS}
        for f in self.findings:
            counts[f.kind] += 1
        return counts

    def validate(self) -> None:
        """Assert the class-count accounting identity."""
        if self.post.classes != self.pre.classes - self.removed_classes:
            raise AssertionError(
                f"class accounting broken for {self.ontology_name}: "
                f"{self.pre.classes} - {self.removed_classes} != {self.post.classes}"
            )

    def as_dict(self) -> dict:
        return {
            "ontology_name": self.ontology_name,
            "pre": self.pre.as_dict(),
            "post": self.post.as_dict(),
            "finding_counts": self.finding_counts(),
            "repairs_applied": dict(sorted(self.repairs_applied.items())),
            "removed_entities": self.removed_entities,
            "removed_classes": self.removed_classes,
            "triples_dropped": self.triples_dropped,
            "identifiers_rewritten": self.identifiers_rewritten,
            "notes": list(self.notes),
        }


def _declared(graph: TripleGraph, kind_iri: str) -> set[Term]:
    kind_term = _DECLARATION_TERMS.get(kind_iri) or iri(kind_iri)
    return {t.subject for t in graph.match(None, _RDF_TYPE, kind_term) if t.subject.kind == IRI}


def profile_ontology(graph: TripleGraph) -> OntologyProfile:
    """Count declarations, triples, and components the way the reports do."""
    return OntologyProfile(
        triples=len(graph),
        classes=len(_declared(graph, vocab.OWL_CLASS)),
        individuals=len(_declared(graph, vocab.OWL_NAMED_INDIVIDUAL)),
        object_properties=len(_declared(graph, vocab.OWL_OBJECT_PROPERTY)),
        annotation_properties=len(_declared(graph, vocab.OWL_ANNOTATION_PROPERTY)),
        connected_components=connected_components(graph),
    )


def detect_deprecated(graph: TripleGraph) -> set[Term]:
    """Entities asserted deprecated with lexical form "true"."""
    return {
        t.subject
        for t in graph.match(None, _OWL_DEPRECATED, None)
        if t.object.kind == LITERAL and t.object.value == "true"
    }


def detect_obsolete(graph: TripleGraph) -> set[Term]:
    """Entities labelled "obsolete ..." (word-anchored) or under ObsoleteClass."""
    found = {
        t.subject
        for t in graph.match(None, _RDFS_LABEL, None)
        if t.object.kind == LITERAL and _OBSOLETE_LABEL_RE.match(t.object.value)
    }
    found |= {t.subject for t in graph.match(None, _RDFS_SUBCLASSOF, _OBSOLETE_CLASS)}
    return found


def declaration_kinds(graph: TripleGraph) -> dict[Term, set[str]]:
    """Map each entity to the OWL declaration kinds it is typed with."""
    kinds: dict[Term, set[str]] = {}
    for kind_iri, kind_term in _DECLARATION_TERMS.items():
        for t in graph.match(None, _RDF_TYPE, kind_term):
            kinds.setdefault(t.subject, set()).add(kind_iri)
    return kinds


def detect_punning(graph: TripleGraph) -> set[Term]:
    """Entities declared with two or more distinct OWL kinds."""
    return {e for e, kinds in declaration_kinds(graph).items() if len(kinds) >= 2}


def detect_identifier_errors(graph: TripleGraph) -> list[QCFinding]:
    """IRIs breaking the term invariants, plus malformed OBO entity IRIs."""
    findings = []
    entity_iris = {e for e in declaration_kinds(graph) if e.kind == IRI}
    seen: set[Term] = set()
    for t in graph:
        for term in t:
            if term.kind != IRI or term in seen:
                continue
            seen.add(term)
            if not iri_is_valid(term.value):
                findings.append(QCFinding(IDENTIFIER_ERROR, term, "invalid IRI (whitespace or missing scheme)"))
            elif term in entity_iris and term.value.startswith(vocab.OBO_NS):
                local = term.value[len(vocab.OBO_NS):]
                if not _OBO_LOCAL_RE.fullmatch(local):
                    findings.append(QCFinding(IDENTIFIER_ERROR, term, f"OBO local id {local!r} not PREFIX_ID shaped"))
    findings.sort(key=lambda f: f.entity.value)
    return findings


def _lexical_ok(value: str, datatype: str) -> bool:
    for datatypes, pattern in _DATATYPE_PATTERNS:
        if datatype in datatypes:
            return pattern.fullmatch(value) is not None
    return True


def detect_value_errors(graph: TripleGraph) -> list[QCFinding]:
    """Literals whose lexical form fails their declared datatype."""
    findings = []
    seen: set[Term] = set()
    for t in graph:
        obj = t.object
        if obj.kind != LITERAL or obj.datatype is None or obj in seen:
            continue
        seen.add(obj)
        if not _lexical_ok(obj.value, obj.datatype):
            findings.append(QCFinding(VALUE_ERROR, obj, f"{obj.value!r} is not a valid {obj.datatype}"))
    findings.sort(key=lambda f: (f.entity.value, f.entity.datatype or ""))
    return findings


_PUNNING_TIE_ORDER = (
    vocab.OWL_CLASS,
    vocab.OWL_OBJECT_PROPERTY,
    vocab.OWL_ANNOTATION_PROPERTY,
    vocab.OWL_DATATYPE_PROPERTY,
    vocab.OWL_NAMED_INDIVIDUAL,
)


def _punning_winner(graph: TripleGraph, entity: Term, kinds: set[str]) -> str:
    """Pick the declaration kind with the most supporting axioms.

    Ties keep owl:Class when it is a candidate, then follow a fixed kind order.
    """
    subclass_of = _RDFS_SUBCLASSOF
    scores: dict[str, int] = {}
    for kind in kinds:
        if kind == vocab.OWL_CLASS:
            score = (
                len(graph.match(entity, subclass_of, None))
                + len(graph.match(None, subclass_of, entity))
                + len([t for t in graph.match(None, _RDF_TYPE, entity)])
            )
        elif kind == vocab.OWL_NAMED_INDIVIDUAL:
            score = len([
                t for t in graph.match(entity, _RDF_TYPE, None)
                if t.object.kind == IRI and t.object.value not in vocab.DECLARATION_KINDS
            ])
        else:
            score = (
                len(graph.match(None, entity, None))
                + len(graph.match(entity, iri(vocab.RDFS_SUBPROPERTYOF), None))
                + len(graph.match(entity, iri(vocab.RDFS_DOMAIN), None))
                + len(graph.match(entity, iri(vocab.RDFS_RANGE), None))
            )
        scores[kind] = score
    best = max(scores.values())
    for kind in _PUNNING_TIE_ORDER:
        if kind in kinds and scores[kind] == best:
            return kind
    raise AssertionError("unreachable: kinds is nonempty")


def _repair_identifier(value: str, is_obo_entity: bool) -> Optional[str]:
    """Whitespace-stripped IRI, if stripping yields a fully valid identifier."""
    fixed = re.sub(r"\s+", "", value)
    if not iri_is_valid(fixed):
        return None
    if is_obo_entity and fixed.startswith(vocab.OBO_NS):
        if not _OBO_LOCAL_RE.fullmatch(fixed[len(vocab.OBO_NS):]):
            return None
    return fixed if fixed != value else None


def clean_ontology(
    graph: TripleGraph,
    policy: CleaningPolicy = CleaningPolicy(),
    name: str = "ontology",
) -> tuple[TripleGraph, QCReport]:
    """Detect defects and build a repaired copy of the graph.

    Deprecated and obsolete entities are removed together with every triple
    mentioning them. Punning keeps the majority declaration and drops the
    minority type triples. Datatype-invalid literals drop their triples.
    Defective IRIs are rewritten when stripping whitespace yields a valid
    identifier, otherwise their triples are dropped. No triples are added.
    """
    pre = profile_ontology(graph)
    pre_classes = _declared(graph, vocab.OWL_CLASS)
    kinds_by_entity = declaration_kinds(graph)

    findings: list[QCFinding] = []
    deprecated = detect_deprecated(graph)
    obsolete = detect_obsolete(graph)
    punned = detect_punning(graph)
    id_findings = detect_identifier_errors(graph)
    value_findings = detect_value_errors(graph)
    findings.extend(QCFinding(DEPRECATED, e) for e in sorted(deprecated, key=lambda e: e.value))
    findings.extend(QCFinding(OBSOLETE, e) for e in sorted(obsolete, key=lambda e: e.value))
    findings.extend(QCFinding(PUNNING, e, ",".join(sorted(kinds_by_entity[e])))
                    for e in sorted(punned, key=lambda e: e.value))
    findings.extend(id_findings)
    findings.extend(value_findings)

    removed_entities: set[Term] = set()
    if policy.deprecated:
        removed_entities |= deprecated
    if policy.obsolete:
        removed_entities |= obsolete

    punning_drops: set[Triple] = set()
    if policy.punning:
        for entity in punned:
            if entity in removed_entities:
                continue
            winner = _punning_winner(graph, entity, kinds_by_entity[entity])
            for kind in kinds_by_entity[entity]:
                if kind != winner:
                    punning_drops.add(Triple(entity, _RDF_TYPE, _DECLARATION_TERMS[kind]))

    bad_literals: set[Term] = set()
    if policy.value_errors:
        bad_literals = {f.entity for f in value_findings}

    rewrites: dict[Term, Term] = {}
    dropped_iris: set[Term] = set()
    if policy.identifier_errors:
        for f in id_findings:
            fixed = _repair_identifier(f.entity.value, f.entity in kinds_by_entity)
            if fixed is not None:
                rewrites[f.entity] = Term(IRI, fixed)
            else:
                dropped_iris.add(f.entity)

    cleaned = TripleGraph()
    triples_dropped = 0
    identifiers_rewritten = 0
    for t in graph:
        s, p, o = t
        if s in removed_entities or p in removed_entities or o in removed_entities:
            triples_dropped += 1
            continue
        if t in punning_drops:
            triples_dropped += 1
            continue
        if o in bad_literals:
            triples_dropped += 1
            continue
        if s in dropped_iris or p in dropped_iris or o in dropped_iris:
            triples_dropped += 1
            continue
        if rewrites:
            ns, np_, no = rewrites.get(s, s), rewrites.get(p, p), rewrites.get(o, o)
            if ns is not s or np_ is not p or no is not o:
                identifiers_rewritten += sum(1 for a, b in ((ns, s), (np_, p), (no, o)) if a is not b)
                t = Triple(ns, np_, no)
        cleaned.add(t)

    post = profile_ontology(cleaned)
    post_classes = _declared(cleaned, vocab.OWL_CLASS)
    # A repaired identifier renames a class rather than removing it.
    renamed_pre_classes = {rewrites.get(e, e) for e in pre_classes}

    repairs = {
        DEPRECATED: len(deprecated & removed_entities),
        OBSOLETE: len(obsolete & removed_entities),
        PUNNING: len({t.subject for t in punning_drops}),
        VALUE_ERROR: len(bad_literals),
        IDENTIFIER_ERROR: len(rewrites) + len(dropped_iris),
    }
    report = QCReport(
        ontology_name=name,
        pre=pre,
        post=post,
        findings=findings,
        repairs_applied=repairs,
        removed_entities=len(removed_entities),
        removed_classes=len(renamed_pre_classes - post_classes),
        triples_dropped=triples_dropped,
        identifiers_rewritten=identifiers_rewritten,
    )
    report.validate()
    return cleaned, report


def format_reports(reports: list[QCReport]) -> str:
    """Line-oriented cleaning report: one section per ontology."""
    lines: list[str] = []
    for report in reports:
        lines.append(f"=== {report.ontology_name} ===")
        lines.append("Pre-Processed Statistics")
        for key, value in report.pre.as_dict().items():
            lines.append(f"{key}\t{value}")
        lines.append("Data Quality Check Errors")
        for kind, count in report.finding_counts().items():
            lines.append(f"{kind}\t{count}")
        lines.append("Repairs Applied")
        for kind, count in sorted(report.repairs_applied.items()):
            lines.append(f"{kind}\t{count}")
        lines.append(f"triples-dropped\t{report.triples_dropped}")
        lines.append(f"identifiers-rewritten\t{report.identifiers_rewritten}")
        lines.append("Post-Processed Statistics")
        for key, value in report.post.as_dict().items():
            lines.append(f"{key}\t{value}")
        for note in report.notes:
            lines.append(f"note\t{note}")
        lines.append("")
    return "\n".join(lines)
