"""Pattern language over hyperedges: variables, wildcards, role constraints,
sequence wildcards, rewrite rules.

Pattern notation extends edge notation:

* ``SUBJ`` / ``ARG1/C`` / ``CLAIM/[RS]`` — variables (all-uppercase roots)
  with optional type constraints, including alternatives between brackets.
* ``*`` / ``*/C`` / ``*/P.{sc}`` — wildcards, optionally typed and
  role-constrained.
* ``...`` — anonymous sequence wildcard; ``X...`` — named sequence wildcard
  binding the absorbed sub-sequence.
* ``[say,claim]/P`` — atom root alternatives.
* ``>PRED/P`` — nesting skip: unwrap modifier nesting on the target and
  match its innermost atom, ignoring role strings when checking against an
  earlier binding.
* ``@X/P`` — atoms only; ``(X/C ...)`` with only non-connector types —
  composite edges only.

Role constraints on a connector: a plain string (``sc``) requires those
roles in order, curly braces (``{sc}``) in any order, bracketed groups
(``[sp]``) one role out of the group, and a ``-`` suffix (``-sp`` or
``{sx}-oc``) forbids roles.  Commas inside braces are ignored.  Each
constraint component pairs with the pattern argument at the same position;
a component paired with a sequence wildcard is optional and absorbs every
argument carrying one of its roles.  When a connector carries role
constraints, additional arguments are permitted unless forbidden.

Rules are two patterns separated by `` |- ``; applying a rule to an edge
produces one rewritten copy per match of the left side against any sub-edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from hedges.edges import (
    Atom,
    Edge,
    Hyperedge,
    NotationError,
    TypeViolation,
    _tokenize,
    infer_type,
    innermost_atom,
    subedges,
    to_string,
)

Binding = dict


@dataclass(frozen=True)
class RoleSpec:
    """Parsed role constraint: ordered/unordered components plus forbidden
    roles.  Each component is a string of alternative role characters."""

    components: tuple[str, ...] = ()
    ordered: bool = True
    forbidden: str = ""

    def render(self) -> str:
        body = "".join(c if len(c) == 1 else f"[{c}]" for c in self.components)
        if not self.ordered:
            body = "{" + body + "}"
        if self.forbidden:
            body += "-" + self.forbidden
        return body


@dataclass(frozen=True)
class Leaf:
    """Pattern leaf: a variable, wildcard, atom alternative set or concrete
    atom, with optional type/role/arity constraints."""

    kind: str  # "var" | "wild" | "alts" | "atom"
    root: str | None = None
    alts: tuple[str, ...] = ()
    types: tuple[str, ...] | None = None
    rolespec: RoleSpec | None = None
    namespace: str | None = None
    arity: str | None = None  # "atom" | "edge" | None
    skip: bool = False

    def render(self) -> str:
        if self.kind == "atom":
            out = self.root
        elif self.kind == "var":
            out = self.root
        elif self.kind == "alts":
            out = "[" + ",".join(self.alts) + "]"
        else:
            out = "*"
        if self.types is not None:
            t = self.types[0] if len(self.types) == 1 else \
                "[" + "".join(self.types) + "]"
            out += "/" + t
            if self.rolespec is not None:
                out += "." + self.rolespec.render()
        if self.namespace is not None:
            out += "/" + self.namespace
        if self.skip:
            out = ">" + out
        if self.arity == "atom":
            out = "@" + out
        elif self.arity == "edge":
            out = f"({out} ...)"
        return out


@dataclass(frozen=True)
class SeqWildcard:
    """``...`` or ``X...``: absorbs a (possibly empty) argument sequence."""

    name: str | None = None

    def render(self) -> str:
        return (self.name or "") + "..."


@dataclass(frozen=True)
class PatternEdge:
    elements: tuple = ()

    def render(self) -> str:
        return "(" + " ".join(pattern_to_string(e) for e in self.elements) + ")"


Pattern = object  # PatternEdge | Leaf | SeqWildcard


def pattern_to_string(pattern) -> str:
    if isinstance(pattern, (PatternEdge, Leaf, SeqWildcard)):
        return pattern.render()
    return to_string(pattern)


@dataclass(frozen=True)
class Rule:
    lhs: Pattern
    rhs: Pattern

    def render(self) -> str:
        return f"{pattern_to_string(self.lhs)} |- {pattern_to_string(self.rhs)}"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _parse_rolespec(text: str, position: int) -> RoleSpec:
    forbidden = ""
    if text.startswith("{"):
        close = text.find("}")
        if close < 0:
            raise NotationError(f"unclosed '{{' in role constraint {text!r}",
                                position)
        body, rest = text[1:close], text[close + 1:]
        ordered = False
        if rest.startswith("-"):
            forbidden = rest[1:]
        elif rest:
            raise NotationError(f"bad role constraint {text!r}", position)
    elif text.startswith("-"):
        body, ordered = "", True
        forbidden = text[1:]
    else:
        ordered = True
        body, dash, forbidden = text.partition("-")
    components = []
    i = 0
    body = body.replace(",", "")
    while i < len(body):
        c = body[i]
        if c == "[":
            close = body.find("]", i)
            if close < 0:
                raise NotationError(f"unclosed '[' in role constraint "
                                    f"{text!r}", position)
            components.append(body[i + 1:close])
            i = close + 1
        else:
            components.append(c)
            i += 1
    for comp in components + [forbidden]:
        if any(not (ch.islower() or ch == "?") for ch in comp):
            raise NotationError(f"bad role characters in {text!r}", position)
    return RoleSpec(tuple(components), ordered, forbidden)


def _split_atom_parts(text: str, position: int):
    """Split ``root[/TYPES[.rolespec]][/namespace]`` taking bracketed roots
    into account."""
    if text.startswith("["):
        close = text.find("]")
        if close < 0:
            raise NotationError(f"unclosed '[' in {text!r}", position)
        root, rest = text[:close + 1], text[close + 1:]
        if rest.startswith("/"):
            rest = rest[1:]
        elif rest:
            raise NotationError(f"bad alternatives atom {text!r}", position)
    else:
        root, slash, rest = text.partition("/")
    if not rest:
        return root, None, None, None
    type_part, slash, namespace = rest.partition("/")
    code_text, dot, role_text = type_part.partition(".")
    return root, code_text or None, (role_text if dot else None), \
        (namespace if slash else None)


def _parse_types(text: str, position: int) -> tuple[str, ...]:
    if text.startswith("[") and text.endswith("]"):
        codes = tuple(text[1:-1])
    else:
        codes = (text,)
    for c in codes:
        if c not in set("CPMBTJRS"):
            raise NotationError(f"bad type constraint {text!r}", position)
    return codes


def _is_variable_root(root: str) -> bool:
    return any(c.isalpha() for c in root) and root == root.upper()


def parse_pattern_leaf(text: str, position: int = 0):
    skip = text.startswith(">")
    if skip:
        text = text[1:]
    atom_only = text.startswith("@")
    if atom_only:
        text = text[1:]
    if text == "...":
        if skip or atom_only:
            raise NotationError("'...' takes no prefixes", position)
        return SeqWildcard(None)
    if text.endswith("...") and _is_variable_root(text[:-3]):
        return SeqWildcard(text[:-3])
    root, code_text, role_text, namespace = _split_atom_parts(text, position)
    types = _parse_types(code_text, position) if code_text else None
    rolespec = _parse_rolespec(role_text, position) if role_text is not None \
        else None
    arity = "atom" if atom_only else None
    if root == "*":
        return Leaf("wild", None, (), types, rolespec, namespace, arity, skip)
    if root.startswith("["):
        alts = tuple(r.strip().lower() for r in root[1:-1].split(","))
        if not all(alts):
            raise NotationError(f"bad alternatives {text!r}", position)
        return Leaf("alts", None, alts, types, rolespec, namespace, arity,
                    skip)
    if _is_variable_root(root):
        return Leaf("var", root, (), types, rolespec, namespace, arity, skip)
    if types is None:
        raise NotationError(f"atom {text!r} has no type code", position)
    if len(types) != 1 or types[0] not in set("CPMBTJ"):
        raise NotationError(f"concrete atom {text!r} needs a single atom "
                            "type", position)
    return Leaf("atom", root.lower(), (), types, rolespec, namespace, arity,
                skip)


_NON_CONNECTOR_TYPES = frozenset("CRS")


def parse_pattern(text: str):
    """Parse pattern notation into a pattern term."""
    tokens = list(_tokenize(text))
    if not tokens:
        raise NotationError("empty pattern")
    term, rest = _parse_pattern_term(tokens, 0)
    if rest != len(tokens):
        raise NotationError("trailing content after pattern", tokens[rest][1])
    return term


def _parse_pattern_term(tokens, i):
    tok, pos = tokens[i]
    if tok == ")":
        raise NotationError("unexpected ')'", pos)
    if tok != "(":
        return parse_pattern_leaf(tok, pos), i + 1
    i += 1
    elements = []
    while True:
        if i >= len(tokens):
            raise NotationError("unbalanced '(': missing ')'", pos)
        tok, tpos = tokens[i]
        if tok == ")":
            i += 1
            break
        el, i = _parse_pattern_term(tokens, i)
        elements.append(el)
    if not elements:
        raise NotationError("empty pattern edge '()'", pos)
    if len(elements) == 1:
        return elements[0], i
    # "(X/C ...)" with only non-connector types: a composite edge bound whole
    if (len(elements) == 2 and isinstance(elements[0], Leaf)
            and elements[0].kind in ("var", "wild")
            and elements[0].types is not None
            and set(elements[0].types) <= _NON_CONNECTOR_TYPES
            and elements[1] == SeqWildcard(None)):
        leaf = elements[0]
        return Leaf(leaf.kind, leaf.root, leaf.alts, leaf.types,
                    leaf.rolespec, leaf.namespace, "edge", leaf.skip), i
    named_seqs = [e for e in elements[1:] if isinstance(e, SeqWildcard)
                  and e.name]
    if len(named_seqs) > 1:
        raise NotationError("at most one named sequence wildcard per edge",
                            pos)
    return PatternEdge(tuple(elements)), i


def parse_rule(text: str) -> Rule:
    if " |- " not in text:
        raise NotationError("rule must contain ' |- '")
    lhs_text, _, rhs_text = text.partition(" |- ")
    rule = Rule(parse_pattern(lhs_text.strip()), parse_pattern(rhs_text.strip()))
    _validate_rule(rule)
    return rule


def load_rules(path) -> list[Rule]:
    rules = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rules.append(parse_rule(line))
            except NotationError as exc:
                raise NotationError(f"line {lineno}: {exc}") from None
    return rules


def pattern_variables(pattern) -> set[str]:
    names = set()
    if isinstance(pattern, Leaf) and pattern.kind == "var":
        names.add(pattern.root)
    elif isinstance(pattern, SeqWildcard) and pattern.name:
        names.add(pattern.name)
    elif isinstance(pattern, PatternEdge):
        for el in pattern.elements:
            names |= pattern_variables(el)
    return names


def _validate_rule(rule: Rule):
    extra = pattern_variables(rule.rhs) - pattern_variables(rule.lhs)
    if extra:
        raise NotationError(f"rule right side uses unbound variables: "
                            f"{sorted(extra)}")
    for term in _walk(rule.rhs):
        if isinstance(term, Leaf) and term.kind == "wild":
            raise NotationError("rule right side may not contain wildcards")
        if isinstance(term, SeqWildcard) and term.name is None:
            raise NotationError("rule right side may not contain anonymous "
                                "'...'")


def _walk(pattern):
    yield pattern
    if isinstance(pattern, PatternEdge):
        for el in pattern.elements:
            yield from _walk(el)


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

def _target_rolestring(edge: Hyperedge) -> str:
    try:
        return innermost_atom(edge).roles or ""
    except TypeViolation:
        return ""


def _unwrap(edge: Hyperedge) -> Atom | None:
    try:
        return innermost_atom(edge)
    except TypeViolation:
        return None


def _edge_type(edge: Hyperedge) -> str | None:
    try:
        return infer_type(edge)
    except TypeViolation:
        return None


def _binding_consistent(old, new, skipped: bool) -> bool:
    if skipped:
        if isinstance(old, tuple) or isinstance(new, tuple):
            return False
        a, b = _unwrap(old), _unwrap(new)
        return (a is not None and b is not None
                and a.without_roles() == b.without_roles())
    return old == new


def _match_leaf(edge: Hyperedge, leaf: Leaf, binding: Binding,
                ignore_roles: bool = False) -> Iterator[Binding]:
    target = edge
    if leaf.skip:
        target = _unwrap(edge)
        if target is None:
            return
    if leaf.arity == "atom" and not isinstance(target, Atom):
        return
    if leaf.arity == "edge" and isinstance(target, Atom):
        return
    if leaf.types is not None:
        t = _edge_type(target)
        if t is None or t not in leaf.types:
            return
    if leaf.namespace is not None:
        if not (isinstance(target, Atom) and target.namespace == leaf.namespace):
            return
    if leaf.kind == "atom":
        if not isinstance(target, Atom):
            return
        if target.root != leaf.root or target.type_code != leaf.types[0]:
            return
        if not ignore_roles:
            want_roles = leaf.rolespec.render() if leaf.rolespec else None
            if (target.roles or None) != want_roles:
                return
        yield binding
        return
    if leaf.kind == "alts":
        atom = target if isinstance(target, Atom) else _unwrap(target)
        if atom is None or atom.root not in leaf.alts:
            return
        if leaf.types is not None and atom.type_code not in leaf.types:
            return
        yield binding
        return
    if leaf.rolespec is not None and not _rolespec_satisfied(
            leaf.rolespec, _target_rolestring(target)):
        return
    if leaf.kind == "wild":
        yield binding
        return
    # variable
    name = leaf.root
    if name in binding:
        if _binding_consistent(binding[name], target, leaf.skip):
            yield binding
        return
    new = dict(binding)
    new[name] = target
    yield new


def _rolespec_satisfied(spec: RoleSpec, roles: str) -> bool:
    """Check a role constraint against a bare role string (used for leaves
    outside connector position)."""
    if any(c in roles for c in spec.forbidden):
        return False
    pos = -1
    for comp in spec.components:
        indices = [i for i, c in enumerate(roles) if c in comp]
        if spec.ordered:
            indices = [i for i in indices if i > pos]
            if not indices:
                return False
            pos = indices[0]
        elif not indices:
            return False
    return True


def _match_term(edge: Hyperedge, pattern, binding: Binding
                ) -> Iterator[Binding]:
    if isinstance(pattern, Leaf):
        yield from _match_leaf(edge, pattern, binding)
    elif isinstance(pattern, PatternEdge):
        if isinstance(edge, Edge):
            yield from _match_pattern_edge(edge, pattern, binding)
    elif isinstance(pattern, SeqWildcard):
        raise NotationError("sequence wildcard outside an edge")
    elif isinstance(pattern, Hyperedge):
        if edge == pattern:
            yield binding
    else:
        raise TypeError(f"not a pattern: {pattern!r}")


def _connector_rolespec(conn_pattern) -> RoleSpec | None:
    if isinstance(conn_pattern, Leaf):
        return conn_pattern.rolespec
    return None


def _match_pattern_edge(edge: Edge, pattern: PatternEdge, binding: Binding
                        ) -> Iterator[Binding]:
    conn_pat = pattern.elements[0]
    arg_pats = pattern.elements[1:]
    rolespec = _connector_rolespec(conn_pat)
    if rolespec is None:
        for b in _match_term(edge.elements[0], conn_pat, binding):
            yield from _match_positional(list(edge.args), list(arg_pats), b)
        return
    # Connector constrains roles; its rolespec drives argument pairing.
    stripped = Leaf(conn_pat.kind, conn_pat.root, conn_pat.alts,
                    conn_pat.types, None, conn_pat.namespace,
                    conn_pat.arity, conn_pat.skip)
    roles = _target_rolestring(edge.elements[0])
    if any(c in roles for c in rolespec.forbidden):
        return
    for b in _match_leaf(edge.elements[0], stripped, binding,
                         ignore_roles=True):
        yield from _match_role_paired(edge.args, roles, arg_pats, rolespec, b)


def _match_positional(targets: list, pats: list, binding: Binding
                      ) -> Iterator[Binding]:
    if not pats:
        if not targets:
            yield binding
        return
    head, rest = pats[0], pats[1:]
    if isinstance(head, SeqWildcard):
        for k in range(len(targets) + 1):
            chunk = tuple(targets[:k])
            if head.name is not None:
                if head.name in binding:
                    if binding[head.name] != chunk:
                        continue
                    b = binding
                else:
                    b = dict(binding)
                    b[head.name] = chunk
            else:
                b = binding
            yield from _match_positional(targets[k:], rest, b)
        return
    if not targets:
        return
    for b in _match_term(targets[0], head, binding):
        yield from _match_positional(targets[1:], rest, b)


def _match_role_paired(args: tuple, roles: str, arg_pats: tuple,
                       spec: RoleSpec, binding: Binding
                       ) -> Iterator[Binding]:
    comps = spec.components
    paired = list(zip(comps, arg_pats))
    extra_comps = comps[len(arg_pats):]
    tail_pats = arg_pats[len(comps):]
    tail_name = None
    for p in tail_pats:
        if not isinstance(p, SeqWildcard):
            return  # unpaired positional arguments are not supported
        if p.name is not None:
            tail_name = p.name
    for comp in extra_comps:
        if not any(c in comp for c in roles):
            return

    def assign(idx: int, last: int, used: frozenset, b: Binding
               ) -> Iterator[Binding]:
        if idx == len(paired):
            if tail_name is not None:
                leftover = tuple(a for i, a in enumerate(args)
                                 if i not in used)
                if tail_name in b:
                    if b[tail_name] != leftover:
                        return
                    yield b
                else:
                    nb = dict(b)
                    nb[tail_name] = leftover
                    yield nb
            else:
                yield b
            return
        comp, pat = paired[idx]
        candidates = [i for i, a in enumerate(args)
                      if i not in used and i < len(roles) and roles[i] in comp]
        if spec.ordered:
            candidates = [i for i in candidates if i > last]
        if isinstance(pat, SeqWildcard):
            if spec.ordered:
                candidates = [i for i in candidates]
            chunk = tuple(args[i] for i in candidates)
            if pat.name is not None:
                if pat.name in b:
                    if b[pat.name] != chunk:
                        return
                    nb = b
                else:
                    nb = dict(b)
                    nb[pat.name] = chunk
            else:
                nb = b
            nlast = max(candidates, default=last) if spec.ordered else last
            yield from assign(idx + 1, nlast, used | frozenset(candidates), nb)
            return
        for i in candidates:
            for nb in _match_term(args[i], pat, b):
                yield from assign(idx + 1, i if spec.ordered else last,
                                  used | {i}, nb)

    yield from assign(0, -1, frozenset(), binding)


def _binding_key(binding: Binding) -> tuple:
    def render(v):
        if isinstance(v, tuple):
            return "[" + " ".join(to_string(x) for x in v) + "]"
        return to_string(v)
    return tuple(sorted((k, render(v)) for k, v in binding.items()))


def _dedup(bindings: Iterable[Binding]) -> list[Binding]:
    seen = set()
    out = []
    for b in bindings:
        key = _binding_key(b)
        if key not in seen:
            seen.add(key)
            out.append(b)
    return out


def match(edge: Hyperedge, pattern, binding: Binding | None = None
          ) -> list[Binding]:
    """All distinct variable bindings under which the pattern covers the
    edge.  An empty list means no match."""
    if isinstance(pattern, str):
        pattern = parse_pattern(pattern)
    return _dedup(_match_term(edge, pattern, dict(binding or {})))


def match_anywhere(edge: Hyperedge, pattern) -> list[tuple[Hyperedge, Binding]]:
    """Match the pattern against the edge and every sub-edge."""
    if isinstance(pattern, str):
        pattern = parse_pattern(pattern)
    out = []
    seen = set()
    for sub in subedges(edge):
        if sub in seen:
            continue
        seen.add(sub)
        for b in match(sub, pattern):
            out.append((sub, b))
    return out


def match_all(edge: Hyperedge, patterns, collection: Iterable[Hyperedge] = ()
              ) -> list[Binding]:
    """Bindings satisfying a conjunction of patterns.

    The first pattern is matched against the edge itself; each further
    pattern must match at least one edge from the supplied collection with
    a consistent binding.
    """
    patterns = [parse_pattern(p) if isinstance(p, str) else p
                for p in patterns]
    if not patterns:
        return []
    collection = list(collection)
    bindings = match(edge, patterns[0])
    for pat in patterns[1:]:
        extended = []
        for b in bindings:
            for aux in collection:
                extended.extend(_match_term(aux, pat, b))
        bindings = _dedup(extended)
    return bindings


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------

def substitute(pattern, binding: Binding) -> Hyperedge:
    """Instantiate a pattern with a binding, producing a concrete edge."""
    if isinstance(pattern, Hyperedge):
        return pattern
    if isinstance(pattern, Leaf):
        if pattern.kind == "var":
            if pattern.root not in binding:
                raise NotationError(f"unbound variable {pattern.root}")
            value = binding[pattern.root]
            if isinstance(value, tuple):
                raise NotationError(f"sequence variable {pattern.root} used "
                                    "in scalar position")
            return value
        if pattern.kind == "atom":
            roles = None
            if pattern.rolespec is not None:
                if not pattern.rolespec.ordered or pattern.rolespec.forbidden \
                        or any(len(c) != 1 for c in pattern.rolespec.components):
                    raise NotationError("cannot build an atom from a "
                                        "non-plain role constraint")
                roles = "".join(pattern.rolespec.components)
            return Atom(pattern.root, pattern.types[0], roles,
                        pattern.namespace)
        raise NotationError("cannot instantiate a wildcard")
    if isinstance(pattern, PatternEdge):
        elements = []
        for el in pattern.elements:
            if isinstance(el, SeqWildcard):
                value = binding.get(el.name)
                if value is None:
                    raise NotationError("unbound sequence wildcard in "
                                        "substitution")
                elements.extend(value)
            else:
                elements.append(substitute(el, binding))
        if len(elements) == 1:
            return elements[0]
        return Edge(elements)
    raise TypeError(f"not a pattern: {pattern!r}")


def _paths(edge: Hyperedge, prefix=()) -> Iterator[tuple]:
    yield prefix
    if isinstance(edge, Edge):
        for i, el in enumerate(edge.elements):
            yield from _paths(el, prefix + (i,))


def edge_at(edge: Hyperedge, path: tuple) -> Hyperedge:
    for i in path:
        edge = edge.elements[i]
    return edge


def replace_at(edge: Hyperedge, path: tuple, value: Hyperedge) -> Hyperedge:
    if not path:
        return value
    i = path[0]
    elements = list(edge.elements)
    elements[i] = replace_at(elements[i], path[1:], value)
    return Edge(elements)


def apply_rule(edge: Hyperedge, rule: Rule) -> list[Hyperedge]:
    """Rewritten copies of the edge, one per binding per matching sub-edge
    at any depth.  The original edge is never mutated."""
    if isinstance(rule, str):
        rule = parse_rule(rule)
    out = []
    seen = set()
    for path in _paths(edge):
        sub = edge_at(edge, path)
        for b in match(sub, rule.lhs):
            rewritten = replace_at(edge, path, substitute(rule.rhs, b))
            if rewritten not in seen:
                seen.add(rewritten)
                out.append(rewritten)
    return out
