"""Hypergraph store: edge multiset with containment indices, degree metrics,
implicit taxonomy and lemma lookup.

Top-level edges are kept with attributes (source text, occurrence counter,
free-form tags).  A containment index maps every edge present at any depth
to the set of edges that immediately contain it, which backs the degree,
neighborhood and deep-degree metrics as well as taxonomy queries.
"""

from __future__ import annotations

import urllib.parse
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from hedges.edges import (
    Atom,
    Edge,
    Hyperedge,
    NotationError,
    TypeViolation,
    infer_type,
    main_concept,
    parse_notation,
    to_string,
)

FORMAT_HEADER = "shg v1"

_LEMMA_ATOM = Atom("lemma", "J")


@dataclass
class EdgeAttributes:
    text: str | None = None
    count: int = 1
    tags: dict = field(default_factory=dict)

    def copy(self) -> "EdgeAttributes":
        return EdgeAttributes(self.text, self.count, dict(self.tags))


def _lemma_key(atom: Atom) -> tuple:
    return (atom.root, atom.type_code, atom.namespace)


class Store:
    """Multiset of top-level hyperedges with containment and lemma indices."""

    def __init__(self):
        self._edges: dict[Hyperedge, EdgeAttributes] = {}
        # child -> parent -> number of distinct top-level edges inducing the pair
        self._parents: dict[Hyperedge, dict[Hyperedge, int]] = {}
        # edge -> number of distinct top-level edges it occurs in (incl. itself)
        self._presence: dict[Hyperedge, int] = {}
        self._lemmas: dict[tuple, dict[Atom, int]] = {}

    # -- mutation -----------------------------------------------------------

    def add(self, edge: Hyperedge, text: str | None = None,
            tags: dict | None = None) -> EdgeAttributes:
        """Add one occurrence of a well-formed edge; indices cover all
        sub-edges."""
        infer_type(edge)  # raises TypeViolation on ill-formed input
        attrs = self._edges.get(edge)
        if attrs is None:
            attrs = EdgeAttributes(text=text, count=1,
                                   tags=dict(tags or {}))
            self._edges[edge] = attrs
            self._index(edge, +1)
        else:
            attrs.count += 1
            if attrs.text is None:
                attrs.text = text
            if tags:
                attrs.tags.update(tags)
        return attrs

    def remove(self, edge: Hyperedge) -> bool:
        """Remove one occurrence; returns False when the edge is absent."""
        attrs = self._edges.get(edge)
        if attrs is None:
            return False
        attrs.count -= 1
        if attrs.count <= 0:
            del self._edges[edge]
            self._index(edge, -1)
        return True

    def _index(self, top: Hyperedge, delta: int):
        pairs = set()
        nodes = set()

        def walk(e: Hyperedge):
            nodes.add(e)
            if isinstance(e, Edge):
                for el in e.elements:
                    pairs.add((el, e))
                    walk(el)

        walk(top)
        for node in nodes:
            n = self._presence.get(node, 0) + delta
            if n > 0:
                self._presence[node] = n
            else:
                self._presence.pop(node, None)
        for child, parent in pairs:
            per_child = self._parents.setdefault(child, {})
            n = per_child.get(parent, 0) + delta
            if n > 0:
                per_child[parent] = n
            else:
                per_child.pop(parent, None)
                if not per_child:
                    del self._parents[child]
        if isinstance(top, Edge) and top.elements[0] == _LEMMA_ATOM \
                and len(top.elements) == 3 \
                and all(isinstance(a, Atom) for a in top.args):
            word, lemma = top.args
            key = _lemma_key(word.without_roles())
            per_key = self._lemmas.setdefault(key, {})
            n = per_key.get(lemma, 0) + delta
            if n > 0:
                per_key[lemma] = n
            else:
                per_key.pop(lemma, None)
                if not per_key:
                    del self._lemmas[key]

    # -- queries ------------------------------------------------------------

    def __len__(self):
        return len(self._edges)

    def __iter__(self) -> Iterator[Hyperedge]:
        return iter(self._edges)

    def edges(self) -> Iterator[Hyperedge]:
        """Top-level edges, in insertion order."""
        return iter(self._edges)

    def attributes(self, edge: Hyperedge) -> EdgeAttributes | None:
        return self._edges.get(edge)

    def count(self, edge: Hyperedge) -> int:
        attrs = self._edges.get(edge)
        return attrs.count if attrs else 0

    def contains(self, edge: Hyperedge) -> bool:
        """Present at any depth."""
        return edge in self._presence

    def presence_count(self, edge: Hyperedge) -> int:
        """Number of distinct top-level edges in which the edge occurs
        (a top-level edge occurs in itself)."""
        return self._presence.get(edge, 0)

    def all_present(self) -> Iterator[Hyperedge]:
        """Every edge present at any depth, including sub-edges."""
        return iter(self._presence)

    def text_of(self, edge: Hyperedge) -> str | None:
        attrs = self._edges.get(edge)
        return attrs.text if attrs else None

    # -- metrics -------------------------------------------------------------

    def edges_containing(self, edge: Hyperedge) -> frozenset:
        """Edges that immediately contain the given edge, at any depth."""
        return frozenset(self._parents.get(edge, ()))

    def degree(self, edge: Hyperedge) -> int:
        return sum(len(p.elements) - 1
                   for p in self._parents.get(edge, ()))

    def neighborhood(self, edge: Hyperedge) -> frozenset:
        """Transitive containment neighborhood: the containing edges plus,
        recursively, everything containing those."""
        memo: dict[Hyperedge, frozenset] = {}

        def gen(e: Hyperedge) -> frozenset:
            cached = memo.get(e)
            if cached is not None:
                return cached
            memo[e] = frozenset()  # cycle guard; containment is acyclic
            out = set(self._parents.get(e, ()))
            for parent in self._parents.get(e, ()):
                out |= gen(parent)
            result = frozenset(out)
            memo[e] = result
            return result

        return gen(edge)

    def deep_degree(self, edge: Hyperedge) -> int:
        return sum(len(p.elements) - 1 for p in self.neighborhood(edge))

    # -- taxonomy and lemmas ---------------------------------------------------

    def hyponyms(self, concept: Hyperedge) -> list[Hyperedge]:
        """Concept edges in which the given concept is the main concept."""
        out = []
        for parent in self._parents.get(concept, ()):
            try:
                if infer_type(parent) == "C" and main_concept(parent) == concept:
                    out.append(parent)
            except TypeViolation:
                continue
        out.sort(key=to_string)
        return out

    def hypernym(self, concept: Hyperedge) -> Hyperedge | None:
        if isinstance(concept, Atom):
            return None
        try:
            return main_concept(concept)
        except TypeViolation:
            return None

    def lemma_of(self, atom: Atom) -> Atom | None:
        """Lemma atom recorded by an auxiliary lemma edge; role strings are
        ignored when comparing the word atom."""
        per_key = self._lemmas.get(_lemma_key(atom.without_roles()))
        if not per_key:
            return None
        return max(per_key, key=lambda a: (per_key[a], to_string(a)))

    # -- persistence -----------------------------------------------------------

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(FORMAT_HEADER + "\n")
            for edge, attrs in self._edges.items():
                fh.write(f"{to_string(edge)}\t{_encode_attrs(attrs)}\n")

    @classmethod
    def load(cls, path) -> "Store":
        store = cls()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != FORMAT_HEADER:
                raise NotationError(f"line 1: bad store header {header!r}")
            for lineno, line in enumerate(fh, 2):
                line = line.rstrip("\n")
                if not line:
                    continue
                notation, _, attr_text = line.partition("\t")
                try:
                    edge = parse_notation(notation)
                except NotationError as exc:
                    raise NotationError(f"line {lineno}: {exc}") from None
                attrs = _decode_attrs(attr_text, lineno)
                store._edges[edge] = attrs
                store._index(edge, +1)
        return store


def _encode_attrs(attrs: EdgeAttributes) -> str:
    quote = lambda s: urllib.parse.quote(s, safe="")
    parts = [f"count={attrs.count}"]
    if attrs.text is not None:
        parts.append(f"text={quote(attrs.text)}")
    for key in sorted(attrs.tags):
        parts.append(f"tag.{quote(key)}={quote(str(attrs.tags[key]))}")
    return ";".join(parts)


def _decode_attrs(text: str, lineno: int) -> EdgeAttributes:
    attrs = EdgeAttributes()
    if not text:
        return attrs
    for part in text.split(";"):
        key, eq, value = part.partition("=")
        if not eq:
            raise NotationError(f"line {lineno}: bad attribute {part!r}")
        if key == "count":
            attrs.count = int(value)
        elif key == "text":
            attrs.text = urllib.parse.unquote(value)
        elif key.startswith("tag."):
            attrs.tags[urllib.parse.unquote(key[4:])] = \
                urllib.parse.unquote(value)
        else:
            raise NotationError(f"line {lineno}: unknown attribute key "
                                f"{key!r}")
    return attrs


def add_edges(store: Store, edges: Iterable[Hyperedge]):
    for edge in edges:
        store.add(edge)
    return store
