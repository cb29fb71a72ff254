"""Typed recursive hyperedges: atoms, composite edges, notation, type inference.

An edge is either an atom (``berlin/C``) or an ordered sequence of at least
two edges whose first element acts as the connector, written in parenthesized
notation (``(is/P berlin/C nice/C)``).  Atoms carry a human-readable root, a
one-letter type code, an optional argument-role string and an optional
namespace, rendered as ``root/CODE[.roles][/namespace]``.

All values are immutable and hashable, so they can be shared freely and used
as index keys.
"""

from __future__ import annotations

from typing import Iterator

ATOM_TYPE_CODES = frozenset("CPMBTJ")
CONNECTOR_TYPES = frozenset("PMBTJ")
TYPE_CODES = frozenset("CPMBTJRS")

# Argument roles understood by the role assigner.  Parsing is deliberately
# looser (any lowercase letter or '?') so that hand-written edges using rarer
# grammatical roles still round-trip.
PREDICATE_ROLES = frozenset("spacoitjxr?")
BUILDER_ROLES = frozenset("ma?")

_ROOT_FORBIDDEN = set(" \t\r\n()/")


class NotationError(ValueError):
    """Raised when hyperedge text cannot be parsed."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class TypeViolation(ValueError):
    """Raised when a structurally valid edge breaks a type inference rule."""

    def __init__(self, message: str, offender: "Hyperedge | None" = None):
        self.offender = offender
        if offender is not None:
            message = f"{message}: {offender}"
        super().__init__(message)


class Hyperedge:
    """Base class for atoms and composite edges."""

    __slots__ = ()

    @property
    def is_atom(self) -> bool:
        return isinstance(self, Atom)

    def __str__(self) -> str:
        return to_string(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {to_string(self)}>"


class Atom(Hyperedge):
    """Leaf edge: root label, type code, optional roles and namespace."""

    __slots__ = ("root", "type_code", "roles", "namespace", "_hash")

    def __init__(self, root: str, type_code: str,
                 roles: str | None = None, namespace: str | None = None):
        if not root or _ROOT_FORBIDDEN & set(root):
            raise NotationError(f"bad atom root {root!r}")
        if type_code not in ATOM_TYPE_CODES:
            raise NotationError(f"bad atom type code {type_code!r} in {root!r}")
        if roles is not None:
            if type_code not in ("P", "B"):
                raise NotationError(
                    f"roles only allowed on P/B atoms, got {root}/{type_code}.{roles}")
            if not roles or any(not (c.islower() or c == "?") for c in roles):
                raise NotationError(f"bad role string {roles!r} on {root!r}")
        if namespace is not None and (not namespace or _ROOT_FORBIDDEN & set(namespace)):
            raise NotationError(f"bad namespace {namespace!r} on {root!r}")
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "type_code", type_code)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "namespace", namespace)
        object.__setattr__(self, "_hash",
                           hash((root, type_code, roles, namespace)))

    def __setattr__(self, name, value):
        raise AttributeError("Atom is immutable")

    def __eq__(self, other):
        return (isinstance(other, Atom)
                and self.root == other.root
                and self.type_code == other.type_code
                and self.roles == other.roles
                and self.namespace == other.namespace)

    def __hash__(self):
        return self._hash

    def with_roles(self, roles: str | None) -> "Atom":
        return Atom(self.root, self.type_code, roles, self.namespace)

    def without_roles(self) -> "Atom":
        if self.roles is None:
            return self
        return Atom(self.root, self.type_code, None, self.namespace)


class Edge(Hyperedge):
    """Composite edge: ordered elements, the first being the connector."""

    __slots__ = ("elements", "_hash", "_type")

    def __init__(self, elements):
        elements = tuple(elements)
        if len(elements) < 2:
            raise NotationError("a composite edge needs a connector and at "
                                "least one argument")
        for el in elements:
            if not isinstance(el, Hyperedge):
                raise TypeError(f"edge element is not a Hyperedge: {el!r}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_hash", hash(elements))
        object.__setattr__(self, "_type", None)

    def __setattr__(self, name, value):
        raise AttributeError("Edge is immutable")

    def __eq__(self, other):
        return isinstance(other, Edge) and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def connector(self) -> Hyperedge:
        return self.elements[0]

    @property
    def args(self) -> tuple:
        return self.elements[1:]


# ---------------------------------------------------------------------------
# Notation
# ---------------------------------------------------------------------------

def _parse_atom_text(text: str, position: int) -> Atom:
    parts = text.split("/")
    if len(parts) == 1:
        raise NotationError(f"atom {text!r} has no type code", position)
    if len(parts) > 3:
        raise NotationError(f"atom {text!r} has too many '/' parts", position)
    root = parts[0].lower()
    code_part = parts[1]
    namespace = parts[2] if len(parts) == 3 else None
    code, _, roles = code_part.partition(".")
    code = code.upper()
    try:
        return Atom(root, code, roles or None, namespace)
    except NotationError as exc:
        raise NotationError(str(exc), position) from None


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


def parse_notation(text: str) -> Hyperedge:
    """Parse one edge from notation text.

    A parenthesized single term denotes the term itself, so ``(apple/C)``
    parses to the atom ``apple/C``.  Raises :class:`NotationError` with the
    offending position for unbalanced parentheses, empty edges, malformed
    atoms and atom-typed concepts in connector position.
    """
    tokens = list(_tokenize(text))
    if not tokens:
        raise NotationError("empty input")
    edge, rest = _parse_term(tokens, 0)
    if rest != len(tokens):
        raise NotationError("trailing content after edge", tokens[rest][1])
    return edge


def _parse_term(tokens, i) -> tuple[Hyperedge, int]:
    tok, pos = tokens[i]
    if tok == ")":
        raise NotationError("unexpected ')'", pos)
    if tok != "(":
        return _parse_atom_text(tok, pos), i + 1
    i += 1
    elements = []
    while True:
        if i >= len(tokens):
            raise NotationError("unbalanced '(': missing ')'", pos)
        tok, tpos = tokens[i]
        if tok == ")":
            i += 1
            break
        element, i = _parse_term(tokens, i)
        elements.append(element)
    if not elements:
        raise NotationError("empty edge '()'", pos)
    if len(elements) == 1:
        return elements[0], i
    first = elements[0]
    if isinstance(first, Atom) and first.type_code not in CONNECTOR_TYPES:
        raise NotationError(
            f"atom {first} cannot occupy the connector position", pos)
    return Edge(elements), i


def to_string(edge: Hyperedge) -> str:
    """Canonical single-space rendering; inverse of :func:`parse_notation`."""
    if isinstance(edge, Atom):
        out = f"{edge.root}/{edge.type_code}"
        if edge.roles is not None:
            out += f".{edge.roles}"
        if edge.namespace is not None:
            out += f"/{edge.namespace}"
        return out
    return "(" + " ".join(to_string(el) for el in edge.elements) + ")"


# ---------------------------------------------------------------------------
# Type inference
# ---------------------------------------------------------------------------

def infer_type(edge: Hyperedge) -> str:
    """Return the type code of an edge.

    Atoms return their own code.  Composite edges follow the inference
    rules: a modifier passes through its single argument's type, a builder
    of two or more concepts yields a concept, a trigger of one concept or
    relation yields a specifier, a predicate over concepts/relations/
    specifiers yields a relation, and a conjunction takes the type of its
    first argument.  Raises :class:`TypeViolation` naming the offending
    sub-edge otherwise.
    """
    if isinstance(edge, Atom):
        return edge.type_code
    cached = edge._type
    if cached is not None:
        return cached
    conn_type = infer_type(edge.elements[0])
    args = edge.elements[1:]
    if conn_type == "M":
        if len(args) != 1:
            raise TypeViolation("modifier takes exactly one argument", edge)
        result = infer_type(args[0])
    elif conn_type == "B":
        if len(args) < 2:
            raise TypeViolation("builder needs at least two concepts", edge)
        for a in args:
            if infer_type(a) != "C":
                raise TypeViolation("builder argument is not a concept", a)
        result = "C"
    elif conn_type == "T":
        if len(args) != 1:
            raise TypeViolation("trigger takes exactly one argument", edge)
        if infer_type(args[0]) not in ("C", "R"):
            raise TypeViolation("trigger argument is not a concept or "
                                "relation", args[0])
        result = "S"
    elif conn_type == "P":
        if not args:
            raise TypeViolation("predicate needs at least one argument", edge)
        for a in args:
            if infer_type(a) not in ("C", "R", "S"):
                raise TypeViolation("predicate argument has invalid type", a)
        result = "R"
    elif conn_type == "J":
        if len(args) < 2:
            raise TypeViolation("conjunction needs at least two arguments",
                                edge)
        result = infer_type(args[0])
    else:
        raise TypeViolation(
            f"type {conn_type} cannot occupy the connector position", edge)
    object.__setattr__(edge, "_type", result)
    return result


def is_well_formed(edge: Hyperedge) -> bool:
    try:
        infer_type(edge)
        return True
    except (TypeViolation, NotationError):
        return False


# ---------------------------------------------------------------------------
# Structure helpers
# ---------------------------------------------------------------------------

def subedges(edge: Hyperedge) -> Iterator[Hyperedge]:
    """Yield the edge and every nested sub-edge, depth first."""
    yield edge
    if isinstance(edge, Edge):
        for el in edge.elements:
            yield from subedges(el)


def atoms_of(edge: Hyperedge) -> list[Atom]:
    """Distinct atoms at all depths, in first-appearance order."""
    seen: dict[Atom, None] = {}
    for sub in subedges(edge):
        if isinstance(sub, Atom):
            seen.setdefault(sub)
    return list(seen)


def size_of(edge: Hyperedge) -> int:
    """Total number of atoms at any depth, counting repeats."""
    if isinstance(edge, Atom):
        return 1
    return sum(size_of(el) for el in edge.elements)


def contains_subedge(edge: Hyperedge, target: Hyperedge) -> bool:
    return any(sub == target for sub in subedges(edge))


def innermost_atom(edge: Hyperedge) -> Atom:
    """Strip modifier wrappings and return the base atom.

    ``(not/M (has/M been/P))`` yields ``been/P``.  Raises
    :class:`TypeViolation` when the edge is not an atom or a chain of
    single-argument modifier applications.
    """
    while isinstance(edge, Edge):
        if len(edge.elements) != 2 or infer_type(edge.elements[0]) != "M":
            raise TypeViolation("not a modifier chain", edge)
        edge = edge.elements[1]
    return edge


def main_concept(edge: Hyperedge) -> Hyperedge:
    """Main concept (hypernym position) of a composite concept edge.

    Modifier-built concepts return their single argument.  Builder-built
    concepts return the argument in the ``m`` role; builders that are not
    the compound builder ``+`` fall back to the first argument when roles
    are missing or carry no usable ``m``.
    """
    if isinstance(edge, Atom):
        raise TypeViolation("atom has no main concept", edge)
    if infer_type(edge) != "C":
        raise TypeViolation("not a concept edge", edge)
    conn = edge.elements[0]
    conn_type = infer_type(conn)
    if conn_type == "M":
        return edge.elements[1]
    # conn_type == "B" is the only other way to build a concept edge
    base = innermost_atom(conn)
    roles = base.roles
    if roles is not None:
        positions = [i for i, c in enumerate(roles) if c == "m"]
        if len(positions) == 1 and positions[0] < len(edge.args):
            return edge.args[positions[0]]
    if base.root != "+":
        return edge.args[0]
    raise TypeViolation("ambiguous main concept", edge)
