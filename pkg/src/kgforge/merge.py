"""Merge cleaned ontologies into one core graph and run merged-level checks.

Blank nodes are renamed with a per-source prefix so labels from different
files never coalesce. Identifier alignment rewrites known aliases onto
canonical IRIs; alias chains are rejected rather than transitively closed.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import AlignmentError, ConfigurationError
from .qc import QCFinding, declaration_kinds
from .rdf import BLANK, IRI, Term, Triple, TripleGraph

_BLANK_SAFE_RE = re.compile(r"[^0-9A-Za-z_\-]")

NamedGraph = tuple[str, TripleGraph]


@dataclass(frozen=True)
class MergeManifest:
    """Ordered list of (ontology name, file path) pairs to merge."""

    sources: tuple[tuple[str, str], ...]
    alignment_map_path: str | None = None

    def validate(self) -> None:
        names = [name for name, _ in self.sources]
        if len(set(names)) != len(names):
            raise ConfigurationError("ontology names in the merge manifest must be unique")
        for name, path in self.sources:
            if not os.path.exists(path):
                raise ConfigurationError(f"ontology file for {name!r} does not exist: {path}")


def read_merge_manifest(path: str) -> MergeManifest:
    """Read a tab-separated ``name<TAB>path`` manifest ('#' comments allowed)."""
    sources = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected name<TAB>path, got {line!r}")
            name, rel = parts
            sources.append((name, os.path.join(base, rel)))
    return MergeManifest(tuple(sources))


def _relabel(source_tag: str, label: str) -> str:
    # The sanitized remainder contains no '.', so the text before the first
    # '.' always identifies the source and cross-source collisions are
    # impossible.
    return f"{source_tag}.{_BLANK_SAFE_RE.sub('-', label)}"


def merge(graphs: Sequence[Union[TripleGraph, NamedGraph]]) -> TripleGraph:
    """Set-union the input graphs after per-source blank node renaming."""
    merged = TripleGraph()
    for index, entry in enumerate(graphs):
        if isinstance(entry, tuple):
            name, graph = entry
            tag = _BLANK_SAFE_RE.sub("-", name) or f"g{index}"
        else:
            graph, tag = entry, f"g{index}"
        for t in graph:
            s, p, o = t
            if s.kind == BLANK:
                s = Term(BLANK, _relabel(tag, s.value))
            if o.kind == BLANK:
                o = Term(BLANK, _relabel(tag, o.value))
            merged.add(Triple(s, p, o) if (s is not t[0] or o is not t[2]) else t)
    return merged


def detect_semantic_heterogeneity(
    merged: TripleGraph, sources: Iterable[NamedGraph] = ()
) -> list[QCFinding]:
    """Entities whose OWL declarations conflict in the merged graph.

    The definition is punning evaluated post-merge; when the per-source graphs
    are supplied each finding names the sources contributing each kind.
    """
    kinds = declaration_kinds(merged)
    conflicted = sorted(
        (e for e, ks in kinds.items() if len(ks) >= 2), key=lambda e: e.value
    )
    if not conflicted:
        return []
    contributors: dict[Term, list[str]] = {e: [] for e in conflicted}
    for name, graph in sources:
        source_kinds = declaration_kinds(graph)
        for e in conflicted:
            for kind in sorted(source_kinds.get(e, ())):
                contributors[e].append(f"{name}:{kind.rsplit('#', 1)[-1]}")
    return [
        QCFinding("punning", e, "; ".join(contributors[e]) or ",".join(sorted(kinds[e])))
        for e in conflicted
    ]


class AlignmentMap:
    """Rewrites non-canonical IRIs onto canonical ones.

    Chains (a key whose target is itself a key) and cycles are configuration
    errors: maps must be stated in fully resolved form.
    """

    def __init__(self, mapping: dict[str, str]) -> None:
        for source, target in mapping.items():
            if source == target:
                raise AlignmentError(f"alignment maps {source!r} to itself")
            if target in mapping:
                raise AlignmentError(
                    f"alignment chain: {source!r} -> {target!r} -> {mapping[target]!r}; "
                    "state the map in resolved form"
                )
        self._mapping = dict(mapping)

    def __len__(self) -> int:
        return len(self._mapping)

    def items(self):
        return self._mapping.items()

    def target(self, value: str) -> str | None:
        return self._mapping.get(value)


def read_alignment_map(path: str) -> AlignmentMap:
    """Read a tab-separated ``from_iri<TAB>to_iri`` alignment file."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected from_iri<TAB>to_iri, got {line!r}")
            mapping[parts[0]] = parts[1]
    return AlignmentMap(mapping)


def align_identifiers(graph: TripleGraph, mapping: AlignmentMap) -> tuple[TripleGraph, int]:
    """Rewrite every occurrence of a mapped IRI; returns (graph, occurrences)."""
    if len(mapping) == 0:
        return graph.copy(), 0
    cache: dict[Term, Term] = {}

    def rewrite(term: Term) -> Term:
        if term.kind != IRI:
            return term
        hit = cache.get(term)
        if hit is not None:
            return hit
        target = mapping.target(term.value)
        out = term if target is None else Term(IRI, target)
        cache[term] = out
        return out

    aligned = TripleGraph()
    count = 0
    for t in graph:
        s, p, o = rewrite(t[0]), rewrite(t[1]), rewrite(t[2])
        count += sum(1 for a, b in ((s, t[0]), (p, t[1]), (o, t[2])) if a is not b)
        aligned.add(Triple(s, p, o) if (s is not t[0] or p is not t[1] or o is not t[2]) else t)
    return aligned, count
