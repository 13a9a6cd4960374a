"""Triple substrate: terms, an indexed triple set, and the N-Triples wire format.

Terms are plain tuples so construction stays cheap on multi-million-statement
inputs; the validating helpers (:func:`iri`, :func:`blank`, :func:`literal`)
are the supported way to build them by hand. ``TripleGraph`` interns terms to
integer handles internally and keeps subject/predicate/object indexes; all
public contracts are stated over logical terms. Graphs are safe for concurrent
readers once loading has finished; mutation is single-writer.
"""

from __future__ import annotations

import gzip
import io
import logging
import re
from typing import IO, Callable, Iterable, Iterator, NamedTuple, Optional, Union

from .errors import NTriplesParseError, UnknownPrefixError

logger = logging.getLogger(__name__)

IRI = "iri"
BLANK = "blank"
LITERAL = "literal"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z0-9](?:[A-Za-z0-9._\-]*[A-Za-z0-9_\-])?$")
_WHITESPACE_RE = re.compile(r"\s")


class Term(NamedTuple):
    """One RDF term: an IRI, a blank node, or a literal.

    ``datatype`` and ``language`` are only meaningful for literals and are
    mutually exclusive. Raw construction does not validate; quality control
    deliberately operates on graphs that may carry invalid IRIs (see
    :mod:`kgforge.qc`).
    """

    kind: str
    value: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_blank(self) -> bool:
        return self.kind == BLANK

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.kind == IRI:
            return f"<{self.value}>"
        if self.kind == BLANK:
            return f"_:{self.value}"
        if self.datatype:
            return f'"{self.value}"^^<{self.datatype}>'
        if self.language:
            return f'"{self.value}"@{self.language}'
        return f'"{self.value}"'


class Triple(NamedTuple):
    """One subject-predicate-object statement."""

    subject: Term
    predicate: Term
    object: Term


def iri_is_valid(value: str) -> bool:
    """Check the IRI invariants: a scheme, no whitespace, no angle brackets."""
    if not _SCHEME_RE.match(value):
        return False
    if _WHITESPACE_RE.search(value):
        return False
    return "<" not in value and ">" not in value


def iri(value: str) -> Term:
    """Build an IRI term, enforcing the term invariants.

    Raises:
        ValueError: If the value has no scheme or contains whitespace or
            angle brackets.
    """
    if not iri_is_valid(value):
        raise ValueError(f"invalid IRI: {value!r}")
    return Term(IRI, value)


def blank(label: str) -> Term:
    """Build a blank node term with a nonempty local label."""
    if not label:
        raise ValueError("blank node label must be nonempty")
    return Term(BLANK, label)


def literal(value: str, datatype: Optional[str] = None, language: Optional[str] = None) -> Term:
    """Build a literal term carrying at most one of datatype and language."""
    if datatype is not None and language is not None:
        raise ValueError("literal cannot carry both a datatype and a language tag")
    return Term(LITERAL, value, datatype, language)


def triple(subject: Term, predicate: Term, object: Term) -> Triple:
    """Build a statement, rejecting generalized triples.

    Raises:
        ValueError: If the subject is a literal or the predicate is not an IRI.
    """
    if subject.kind == LITERAL:
        raise ValueError("subject must not be a literal")
    if predicate.kind != IRI:
        raise ValueError("predicate must be an IRI")
    return Triple(subject, predicate, object)


class TripleGraph:
    """An indexed set of triples.

    Insertion has set semantics: adding a duplicate statement leaves the size
    unchanged. ``match`` returns exactly what a linear scan would. Terms are
    interned to integer handles; sibling modules in this package may use the
    ``_spo`` / ``_terms`` internals for read-only scans.
    """

    __slots__ = ("_terms", "_ids", "_spo", "_by_s", "_by_p", "_by_o")

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._spo: set[tuple[int, int, int]] = set()
        self._by_s: dict[int, set[tuple[int, int, int]]] = {}
        self._by_p: dict[int, set[tuple[int, int, int]]] = {}
        self._by_o: dict[int, set[tuple[int, int, int]]] = {}
        for t in triples:
            self.add(t)

    def _intern(self, term: Term) -> int:
        handle = self._ids.get(term)
        if handle is None:
            handle = len(self._terms)
            self._terms.append(term)
            self._ids[term] = handle
        return handle

    def _handle(self, term: Term) -> Optional[int]:
        return self._ids.get(term)

    def term(self, handle: int) -> Term:
        """Return the term behind an integer handle."""
        return self._terms[handle]

    def add(self, t: Triple) -> bool:
        """Insert a statement; returns True when the graph grew."""
        ids = self._ids
        s = ids.get(t[0])
        if s is None:
            s = self._intern(t[0])
        p = ids.get(t[1])
        if p is None:
            p = self._intern(t[1])
        o = ids.get(t[2])
        if o is None:
            o = self._intern(t[2])
        return self.add_interned(s, p, o)

    def add_interned(self, s: int, p: int, o: int) -> bool:
        """Insert by handles already obtained from this graph."""
        spo = self._spo
        before = len(spo)
        key = (s, p, o)
        spo.add(key)
        if len(spo) == before:
            return False
        by_s = self._by_s
        bucket = by_s.get(s)
        if bucket is None:
            by_s[s] = {key}
        else:
            bucket.add(key)
        by_p = self._by_p
        bucket = by_p.get(p)
        if bucket is None:
            by_p[p] = {key}
        else:
            bucket.add(key)
        by_o = self._by_o
        bucket = by_o.get(o)
        if bucket is None:
            by_o[o] = {key}
        else:
            bucket.add(key)
        return True

    def intern(self, term: Term) -> int:
        """Intern a term and return its handle (adds no triple)."""
        return self._intern(term)

    def discard(self, t: Triple) -> bool:
        """Remove a statement if present; returns True when removed."""
        ids = (self._ids.get(t[0]), self._ids.get(t[1]), self._ids.get(t[2]))
        if None in ids or ids not in self._spo:
            return False
        key = ids  # type: ignore[assignment]
        self._spo.discard(key)
        self._by_s[key[0]].discard(key)
        self._by_p[key[1]].discard(key)
        self._by_o[key[2]].discard(key)
        return True

    def __len__(self) -> int:
        return len(self._spo)

    def __contains__(self, t: Triple) -> bool:
        ids = (self._ids.get(t[0]), self._ids.get(t[1]), self._ids.get(t[2]))
        return None not in ids and ids in self._spo

    def __iter__(self) -> Iterator[Triple]:
        terms = self._terms
        for s, p, o in self._spo:
            yield Triple(terms[s], terms[p], terms[o])

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        object: Optional[Term] = None,
    ) -> set[Triple]:
        """Return all triples matching the bound slots (None is a wildcard)."""
        candidates: Optional[set[tuple[int, int, int]]] = None
        for term, index in (
            (subject, self._by_s),
            (predicate, self._by_p),
            (object, self._by_o),
        ):
            if term is None:
                continue
            handle = self._ids.get(term)
            if handle is None:
                return set()
            bucket = index.get(handle, set())
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            candidates = self._spo
        terms = self._terms
        out = set()
        want = (
            None if subject is None else self._ids[subject],
            None if predicate is None else self._ids[predicate],
            None if object is None else self._ids[object],
        )
        for key in candidates:
            if want[0] is not None and key[0] != want[0]:
                continue
            if want[1] is not None and key[1] != want[1]:
                continue
            if want[2] is not None and key[2] != want[2]:
                continue
            out.add(Triple(terms[key[0]], terms[key[1]], terms[key[2]]))
        return out

    def subjects(self, predicate: Optional[Term] = None, object: Optional[Term] = None) -> set[Term]:
        """Distinct subjects of the triples matching the bound slots."""
        return {t.subject for t in self.match(None, predicate, object)}

    def objects(self, subject: Optional[Term] = None, predicate: Optional[Term] = None) -> set[Term]:
        """Distinct objects of the triples matching the bound slots."""
        return {t.object for t in self.match(subject, predicate, None)}

    def copy(self) -> "TripleGraph":
        """An independent copy sharing no mutable state."""
        clone = TripleGraph.__new__(TripleGraph)
        clone._terms = list(self._terms)
        clone._ids = dict(self._ids)
        clone._spo = set(self._spo)
        clone._by_s = {k: set(v) for k, v in self._by_s.items()}
        clone._by_p = {k: set(v) for k, v in self._by_p.items()}
        clone._by_o = {k: set(v) for k, v in self._by_o.items()}
        return clone


class NamespaceTable:
    """Prefix to IRI-base mapping used for CURIE expansion and contraction."""

    def __init__(self, mapping: Optional[dict[str, str]] = None) -> None:
        self._bases: dict[str, str] = {}
        for prefix, base in (mapping or {}).items():
            self.bind(prefix, base)

    def bind(self, prefix: str, base: str) -> None:
        """Register a prefix; bases must end in '/' or '#'."""
        if not base.endswith(("/", "#")):
            raise ValueError(f"namespace base must end in '/' or '#': {base!r}")
        if prefix in self._bases and self._bases[prefix] != base:
            raise ValueError(f"prefix {prefix!r} already bound to {self._bases[prefix]!r}")
        self._bases[prefix] = base

    def __contains__(self, prefix: str) -> bool:
        return prefix in self._bases

    def base(self, prefix: str) -> str:
        if prefix not in self._bases:
            raise UnknownPrefixError(prefix)
        return self._bases[prefix]

    def items(self):
        return self._bases.items()

    def expand(self, curie: str) -> str:
        """Expand ``prefix:local`` to a full IRI.

        Raises:
            UnknownPrefixError: If the prefix is not registered.
        """
        prefix, sep, local = curie.partition(":")
        if not sep:
            raise UnknownPrefixError(curie)
        if prefix not in self._bases:
            raise UnknownPrefixError(prefix)
        return self._bases[prefix] + local

    def contract(self, value: str) -> str:
        """Contract an IRI against the unique longest matching base.

        IRIs matching no base are returned unchanged.
        """
        best_prefix = None
        best_len = -1
        for prefix, base in self._bases.items():
            if value.startswith(base) and len(base) > best_len:
                best_prefix, best_len = prefix, len(base)
        if best_prefix is None:
            return value
        return f"{best_prefix}:{value[best_len:]}"

    def to_iri(self, value: str) -> str:
        """Interpret a raw identifier column value as an IRI.

        Values containing '://' are taken to be IRIs already; otherwise the
        text before the first ':' must be a registered prefix.
        """
        if "://" in value:
            return value
        return self.expand(value)


def expand_curie(table: NamespaceTable, curie: str) -> str:
    return table.expand(curie)


def contract_iri(table: NamespaceTable, value: str) -> str:
    return table.contract(value)


# N-Triples grammar. Strict IRIs follow the W3C production (no raw spaces or
# control characters; \uXXXX escapes allowed); lenient additionally admits raw
# interior whitespace so that defective ontology dumps can be loaded and then
# repaired by quality control.
_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"
_IRI_STRICT = r'<((?:[^\x00-\x20<>"{}|^`\\]|' + _UCHAR + r")*)>"
_IRI_LENIENT = r"<([^<>]*)>"
_BLANK_RE = r"_:([A-Za-z0-9](?:[A-Za-z0-9._\-]*[A-Za-z0-9_\-])?)"
_STRING_RE = r'"((?:[^"\\\r\n]|\\.)*)"'
_LANG_RE = r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)"


def _line_re(iri_pattern: str) -> re.Pattern[str]:
    return re.compile(
        rf"[ \t]*(?:{iri_pattern}|{_BLANK_RE})"
        rf"[ \t]+{iri_pattern}"
        rf"[ \t]+(?:{iri_pattern}|{_BLANK_RE}|{_STRING_RE}(?:\^\^{iri_pattern}|{_LANG_RE})?)"
        rf"[ \t]*\.[ \t]*(?:#.*)?$"
    )


_STRICT_LINE = _line_re(_IRI_STRICT)
_LENIENT_LINE = _line_re(_IRI_LENIENT)
_ESCAPE_MAP = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_UNESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")


def _unescape(text: str) -> str:
    def repl(m: re.Match[str]) -> str:
        if m.group(1):
            return chr(int(m.group(1), 16))
        if m.group(2):
            return chr(int(m.group(2), 16))
        ch = m.group(3)
        try:
            return _ESCAPE_MAP[ch]
        except KeyError:
            raise ValueError(f"invalid escape sequence '\\{ch}'") from None

    return _UNESCAPE_RE.sub(repl, text)


LineSource = Union[str, IO[str], IO[bytes], Iterable[str]]


def _lines(source: LineSource) -> Iterator[str]:
    if isinstance(source, str):
        yield from io.StringIO(source)
    elif isinstance(source, io.TextIOBase) or hasattr(source, "encoding"):
        yield from source  # type: ignore[misc]
    elif hasattr(source, "read"):
        yield from io.TextIOWrapper(source, encoding="utf-8")  # type: ignore[arg-type]
    else:
        yield from source


def parse_ntriples(
    source: LineSource,
    strict: bool = True,
    on_error: Optional[Callable[[NTriplesParseError], None]] = None,
) -> Iterator[Triple]:
    """Stream triples out of N-Triples text.

    The source may be a string, a text or binary stream, or any iterable of
    lines; input is consumed lazily, one line at a time. Literal and IRI
    escapes (``\\t \\n \\" \\\\ \\uXXXX \\UXXXXXXXX`` ...) are decoded.

    Args:
        source: Line-oriented N-Triples input.
        strict: When True a malformed line aborts parsing; when False it is
            logged, handed to ``on_error`` if given, and skipped.
        on_error: Lenient-mode sink receiving one NTriplesParseError per bad
            line.

    Yields:
        One Triple per statement line.

    Raises:
        NTriplesParseError: On the first malformed line in strict mode.
    """
    pattern = _STRICT_LINE if strict else _LENIENT_LINE
    pattern_match = pattern.fullmatch
    cache: dict[str, Term] = {}
    number = 0
    for number, raw in enumerate(_lines(source), start=1):
        line = raw.rstrip("\r\n")
        stripped = line.lstrip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        m = pattern_match(line)
        if m is None:
            err = NTriplesParseError("malformed statement", number, line)
            if strict:
                raise err
            logger.warning("skipping %s", err)
            if on_error is not None:
                on_error(err)
            continue
        g = m.groups()
        try:
            # groups: 0 iri-subj, 1 blank-subj, 2 pred, 3 iri-obj, 4 blank-obj,
            #         5 literal, 6 datatype, 7 langtag
            if g[0] is not None:
                raw_s = g[0]
                subject = cache.get(raw_s)
                if subject is None:
                    subject = Term(IRI, _unescape(raw_s) if "\\" in raw_s else raw_s)
                    cache[raw_s] = subject
            else:
                subject = Term(BLANK, g[1])
            raw_p = g[2]
            predicate = cache.get(raw_p)
            if predicate is None:
                predicate = Term(IRI, _unescape(raw_p) if "\\" in raw_p else raw_p)
                cache[raw_p] = predicate
            if g[3] is not None:
                raw_o = g[3]
                object_ = cache.get(raw_o)
                if object_ is None:
                    object_ = Term(IRI, _unescape(raw_o) if "\\" in raw_o else raw_o)
                    cache[raw_o] = object_
            elif g[4] is not None:
                object_ = Term(BLANK, g[4])
            else:
                lex = _unescape(g[5]) if "\\" in g[5] else g[5]
                datatype = None
                if g[6] is not None:
                    datatype = _unescape(g[6]) if "\\" in g[6] else g[6]
                object_ = Term(LITERAL, lex, datatype, g[7])
        except ValueError as exc:
            err = NTriplesParseError(str(exc), number, line)
            if strict:
                raise err from None
            logger.warning("skipping %s", err)
            if on_error is not None:
                on_error(err)
            continue
        yield Triple(subject, predicate, object_)


def load_ntriples(path: str, strict: bool = True,
                  on_error: Optional[Callable[[NTriplesParseError], None]] = None) -> TripleGraph:
    """Parse an N-Triples file (``.gz`` transparently) into a graph."""
    opener = gzip.open if str(path).endswith(".gz") else open
    graph = TripleGraph()
    with opener(path, "rt", encoding="utf-8") as handle:  # type: ignore[operator]
        for t in parse_ntriples(handle, strict=strict, on_error=on_error):
            graph.add(t)
    return graph


_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_LITERAL_ESCAPE_RE = re.compile(r'[\\"\n\r\t\x00-\x08\x0b\x0c\x0e-\x1f\x7f]')
_IRI_ESCAPE_RE = re.compile(r'[\x00-\x20<>"{}|^`\\\x7f]')


def _escape_literal(text: str) -> str:
    def repl(m: re.Match[str]) -> str:
        ch = m.group(0)
        return _LITERAL_ESCAPES.get(ch) or f"\\u{ord(ch):04X}"

    return _LITERAL_ESCAPE_RE.sub(repl, text)


def _escape_iri(text: str) -> str:
    return _IRI_ESCAPE_RE.sub(lambda m: f"\\u{ord(m.group(0)):04X}", text)


def serialize_term(term: Term) -> str:
    """Render one term in N-Triples syntax."""
    kind = term.kind
    if kind == IRI:
        value = term.value
        return f"<{_escape_iri(value)}>" if _IRI_ESCAPE_RE.search(value) else f"<{value}>"
    if kind == BLANK:
        return f"_:{term.value}"
    lex = _escape_literal(term.value) if _LITERAL_ESCAPE_RE.search(term.value) else term.value
    if term.datatype is not None:
        return f'"{lex}"^^<{_escape_iri(term.datatype)}>'
    if term.language is not None:
        return f'"{lex}"@{term.language}'
    return f'"{lex}"'


def serialize_triple(t: Triple) -> str:
    return f"{serialize_term(t[0])} {serialize_term(t[1])} {serialize_term(t[2])} ."


def serialize_ntriples(graph: TripleGraph, out: Optional[IO[str]] = None,
                       canonical: bool = False) -> Optional[str]:
    """Write a graph as N-Triples.

    With ``canonical`` the statement lines are emitted in total lexicographic
    order, so equal graphs serialize byte-identically (modulo blank-node
    labels). Returns the text when ``out`` is None, else writes to ``out``.
    """
    lines = [serialize_triple(t) for t in graph]
    if canonical:
        lines.sort()
    text = "".join(line + "\n" for line in lines)
    if out is None:
        return text
    out.write(text)
    return None


def save_ntriples(graph: TripleGraph, path: str, canonical: bool = True) -> None:
    """Serialize a graph to a file (canonical by default)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        serialize_ntriples(graph, handle, canonical=canonical)
