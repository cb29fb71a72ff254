"""Pattern learning: corpus pattern mining, generalization of an edge under
human variable assignments, bounded refinement search against positive and
negative examples, and resumable learning sessions.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field

from hedges.edges import (
    Atom,
    Edge,
    Hyperedge,
    TypeViolation,
    contains_subedge,
    infer_type,
    innermost_atom,
    parse_notation,
    to_string,
)
from hedges.patterns import (
    Leaf,
    PatternEdge,
    RoleSpec,
    SeqWildcard,
    match,
    match_all,
    parse_pattern,
    pattern_to_string,
)


class RefinementError(ValueError):
    """No consistent specialization exists within the search bounds."""


# ---------------------------------------------------------------------------
# Mining
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizationConfig:
    max_depth: int = 2
    sizes: frozenset = frozenset({3, 4})
    exclude_connectors: frozenset = frozenset({"J", "M"})
    explicit_plus: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def _safe_innermost(edge: Hyperedge) -> Atom | None:
    try:
        return innermost_atom(edge)
    except TypeViolation:
        return None


def _connector_rolespec(conn: Hyperedge) -> RoleSpec | None:
    atom = _safe_innermost(conn)
    if atom is None or not atom.roles:
        return None
    return RoleSpec(tuple(atom.roles), ordered=True)


def _connector_choices(conn: Hyperedge, config: GeneralizationConfig) -> list:
    conn_type = infer_type(conn)
    rolespec = _connector_rolespec(conn)
    choices = [Leaf("wild", None, (), (conn_type,), rolespec, None, None,
                    False)]
    atom = _safe_innermost(conn)
    if config.explicit_plus and atom is not None and atom.root == "+":
        choices.append(Leaf("atom", "+", (), (conn_type,), rolespec, None,
                            None, False))
    return choices


def _argument_choices(arg: Hyperedge, depth: int,
                      config: GeneralizationConfig) -> list:
    arg_type = infer_type(arg)
    choices = [Leaf("wild", None, (), (arg_type,), None, None, None, False)]
    if depth < config.max_depth and isinstance(arg, Edge) \
            and infer_type(arg.elements[0]) not in config.exclude_connectors:
        choices.extend(_edge_generalizations(arg, depth + 1, config))
    return choices


def _edge_generalizations(edge: Edge, depth: int,
                          config: GeneralizationConfig) -> list:
    slots = [_connector_choices(edge.elements[0], config)]
    slots.extend(_argument_choices(a, depth, config) for a in edge.args)
    out = [PatternEdge(())]
    for choices in slots:
        out = [PatternEdge(p.elements + (c,)) for p in out for c in choices]
    return out


def mine_patterns(store, config: GeneralizationConfig | None = None) -> list:
    """Ranked (pattern, count) pairs from type-annotated generalizations of
    the store's edges at every depth, expanded recursively up to the
    configured depth.

    Modifier- and conjunction-built edges are skipped, relations are
    admitted only at the configured sizes, and every admitted edge counts
    once per top-level edge containing it.
    """
    config = config or GeneralizationConfig()
    counts: dict[str, list] = {}
    for edge in store.all_present():
        if not isinstance(edge, Edge):
            continue
        try:
            conn_type = infer_type(edge.elements[0])
            edge_type = infer_type(edge)
        except TypeViolation:
            continue
        if conn_type in config.exclude_connectors:
            continue
        if edge_type == "R" and len(edge.elements) not in config.sizes:
            continue
        weight = store.presence_count(edge)
        for pattern in _edge_generalizations(edge, 1, config):
            text = pattern_to_string(pattern)
            entry = counts.setdefault(text, [pattern, 0])
            entry[1] += weight
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1][1], kv[0]))
    return [(pattern, count) for _, (pattern, count) in ranked]


# ---------------------------------------------------------------------------
# Generalization from assignments
# ---------------------------------------------------------------------------

def generalize(edge: Hyperedge, assignments: dict) -> PatternEdge:
    """Most generic pattern honoring the variable assignments: assigned
    sub-edges become variables, other sub-edges become typed wildcards, the
    connector keeps its label with order-free roles."""
    by_value: dict[Hyperedge, str] = {}
    for name, value in assignments.items():
        if not contains_subedge(edge, value):
            raise ValueError(f"assignment {name} is not a sub-edge: {value}")
        by_value[value] = name

    def contains_assigned(sub: Hyperedge) -> bool:
        return any(contains_subedge(sub, v) for v in by_value)

    def concrete(sub: Hyperedge):
        """Connector internals kept literal; roles stay order-sensitive."""
        if isinstance(sub, Atom):
            rolespec = RoleSpec(tuple(sub.roles), ordered=True) \
                if sub.roles else None
            return Leaf("atom", sub.root, (), (sub.type_code,), rolespec,
                        sub.namespace, None, False)
        return PatternEdge(tuple(concrete(el) for el in sub.elements))

    def connector(sub: Hyperedge):
        name = by_value.get(sub)
        if name is not None:
            return Leaf("var", name, (), None, None, None, None, False)
        if isinstance(sub, Atom):
            rolespec = RoleSpec(tuple(sub.roles), ordered=False) \
                if sub.roles else None
            return Leaf("atom", sub.root, (), (sub.type_code,), rolespec,
                        sub.namespace, None, False)
        return concrete(sub)

    def walk(sub: Hyperedge):
        name = by_value.get(sub)
        if name is not None:
            return Leaf("var", name, (), None, None, None, None, False)
        if isinstance(sub, Edge) and contains_assigned(sub):
            return edge_pattern(sub)
        return Leaf("wild", None, (), (infer_type(sub),), None, None, None,
                    False)

    def edge_pattern(sub: Edge):
        elements = [connector(sub.elements[0])]
        elements.extend(walk(a) for a in sub.args)
        return PatternEdge(tuple(elements))

    name = by_value.get(edge)
    if name is not None:
        return Leaf("var", name, (), None, None, None, None, False)
    if isinstance(edge, Atom):
        return Leaf("wild", None, (), (edge.type_code,), None, None, None,
                    False)
    return edge_pattern(edge)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

def _conjunction_matches(patterns, edge: Hyperedge, store) -> bool:
    return bool(match_all(edge, patterns, list(store.edges())))


def _is_consistent(patterns, positives, negatives, store) -> bool:
    return (all(_conjunction_matches(patterns, p, store) for p in positives)
            and not any(_conjunction_matches(patterns, n, store)
                        for n in negatives))


def _store_match_count(patterns, store) -> int:
    return sum(1 for edge in store.edges()
               if _conjunction_matches(patterns, edge, store))


def _replace_element(pattern: PatternEdge, index: int, term) -> PatternEdge:
    elements = list(pattern.elements)
    elements[index] = term
    return PatternEdge(tuple(elements))


def _positive_bindings(primary, positives):
    out = []
    for p in positives:
        found = match(p, primary)
        if not found:
            return None
        out.append(found[0])
    return out


def _specializations(patterns, positives, negatives, store):
    """One-step specialization moves: restore the connector root, add a
    lemma constraint, extend role constraints, constrain argument types,
    and pin atom/composite arity."""
    primary = patterns[0]
    if not isinstance(primary, PatternEdge):
        return
    conn = primary.elements[0]
    pos_conns = []
    for p in positives:
        if isinstance(p, Edge):
            atom = _safe_innermost(p.elements[0])
            if atom is not None:
                pos_conns.append(atom)
    # 1. restore the connector root
    if isinstance(conn, Leaf) and conn.kind in ("wild", "var") and pos_conns:
        roots = {a.root for a in pos_conns}
        if len(roots) == 1:
            restored = Leaf("atom", roots.pop(), (), conn.types or ("P",),
                            conn.rolespec, None, None, False)
            yield patterns[:0] + (_replace_element(primary, 0, restored),) \
                + patterns[1:]
    # 2. conjoin a lemma constraint on the connector
    has_lemma_aux = any(
        isinstance(p, PatternEdge) and isinstance(p.elements[0], Leaf)
        and p.elements[0].kind == "atom" and p.elements[0].root == "lemma"
        for p in patterns[1:])
    if isinstance(conn, Leaf) and not has_lemma_aux and pos_conns:
        lemma_roots = set()
        for atom in pos_conns:
            lemma = store.lemma_of(atom)
            if lemma is None:
                lemma_roots = None
                break
            lemma_roots.add(lemma.root)
        if lemma_roots:
            if conn.kind == "var":
                name = conn.root
                new_primary = primary
            else:
                name = "PRED"
                promoted = Leaf("var", name, (), conn.types, conn.rolespec,
                                None, None, False)
                new_primary = _replace_element(primary, 0, promoted)
            aux = parse_pattern(
                f"(lemma/J >{name}/P [{','.join(sorted(lemma_roots))}]/P)")
            yield (new_primary,) + patterns[1:] + (aux,)
    # 3. role constraints
    if isinstance(conn, Leaf):
        pos_roles = [a.roles or "" for a in pos_conns]
        neg_roles = []
        for n in negatives:
            if isinstance(n, Edge):
                atom = _safe_innermost(n.elements[0])
                neg_roles.append(atom.roles or "" if atom else "")
        spec = conn.rolespec or RoleSpec((), ordered=False)
        required = set("".join(pos_roles)) if pos_roles else set()
        for char in sorted(required):
            if pos_roles and all(char in r for r in pos_roles) \
                    and not any(char in comp for comp in spec.components):
                new_spec = RoleSpec(spec.components + (char,), spec.ordered,
                                    spec.forbidden)
                new_conn = Leaf(conn.kind, conn.root, conn.alts, conn.types,
                                new_spec, conn.namespace, conn.arity,
                                conn.skip)
                yield (_replace_element(primary, 0, new_conn),) + patterns[1:]
        for char in sorted(set("".join(neg_roles)) - required):
            if char not in spec.forbidden:
                new_spec = RoleSpec(spec.components, spec.ordered,
                                    spec.forbidden + char)
                new_conn = Leaf(conn.kind, conn.root, conn.alts, conn.types,
                                new_spec, conn.namespace, conn.arity,
                                conn.skip)
                yield (_replace_element(primary, 0, new_conn),) + patterns[1:]
    # 4 & 5. argument types and arity
    bindings = _positive_bindings(primary, positives)
    if bindings is None:
        return
    for i, term in enumerate(primary.elements[1:], start=1):
        if not (isinstance(term, Leaf) and term.kind == "var"):
            continue
        values = [b.get(term.root) for b in bindings]
        if any(v is None or isinstance(v, tuple) for v in values):
            continue
        if term.types is None:
            try:
                types = tuple(sorted({infer_type(v) for v in values}))
            except TypeViolation:
                types = ()
            if types:
                typed = Leaf("var", term.root, (), types, term.rolespec,
                             term.namespace, term.arity, term.skip)
                yield (_replace_element(primary, i, typed),) + patterns[1:]
        if term.arity is None:
            if all(isinstance(v, Atom) for v in values):
                arity = "atom"
            elif all(isinstance(v, Edge) for v in values) and term.types:
                arity = "edge"  # composite marker needs a type to render
            else:
                continue
            pinned = Leaf("var", term.root, (), term.types, term.rolespec,
                          term.namespace, arity, term.skip)
            yield (_replace_element(primary, i, pinned),) + patterns[1:]


def _conjunction_text(patterns) -> str:
    return " & ".join(pattern_to_string(p) for p in patterns)


def refine(patterns, positives, negatives, store, max_depth: int = 4,
           budget: int = 500):
    """Most generic specialization of the pattern conjunction matching all
    positives and no negatives; the input is returned unchanged when
    already consistent."""
    patterns = tuple(patterns)
    if not positives:
        raise ValueError("refinement needs at least one positive example")
    contradictions = {to_string(p) for p in positives} & \
        {to_string(n) for n in negatives}
    if contradictions:
        raise RefinementError(
            f"edges labeled both positive and negative: "
            f"{sorted(contradictions)}")
    if _is_consistent(patterns, positives, negatives, store):
        return patterns
    frontier = [patterns]
    seen = {_conjunction_text(patterns)}
    consistent: list = []
    visited = 0
    for _ in range(max_depth):
        next_frontier = []
        for node in frontier:
            for candidate in _specializations(node, positives, negatives,
                                              store):
                text = _conjunction_text(candidate)
                if text in seen:
                    continue
                seen.add(text)
                visited += 1
                if visited > budget:
                    break
                if _is_consistent(candidate, positives, negatives, store):
                    consistent.append(candidate)
                else:
                    next_frontier.append(candidate)
            if visited > budget:
                break
        if consistent or visited > budget:
            break
        frontier = next_frontier
    if not consistent:
        raise RefinementError("no consistent specialization found")
    return min(consistent,
               key=lambda c: (-_store_match_count(c, store),
                              _conjunction_text(c)))


# ---------------------------------------------------------------------------
# Candidate selection and sessions
# ---------------------------------------------------------------------------

def select_candidate(store, criterion: str = "random",
                     seed: int | None = None) -> Hyperedge:
    """Pick a learning candidate: seeded-random, or the first edge headed by
    the most frequent predicate root."""
    edges = sorted(store.edges(), key=to_string)
    if not edges:
        raise ValueError("empty store")
    if criterion == "random":
        return random.Random(seed).choice(edges)
    if criterion == "predicate-frequency":
        freq: dict[str, int] = {}
        for edge in edges:
            root = _predicate_root(edge)
            if root is not None:
                freq[root] = freq.get(root, 0) + store.count(edge)
        if not freq:
            raise ValueError("store has no relations")
        best = min(freq, key=lambda r: (-freq[r], r))
        for edge in edges:
            if _predicate_root(edge) == best:
                return edge
    raise ValueError(f"unknown selection criterion {criterion!r}")


def _predicate_root(edge: Hyperedge) -> str | None:
    if not isinstance(edge, Edge):
        return None
    try:
        if infer_type(edge) != "R":
            return None
    except TypeViolation:
        return None
    atom = _safe_innermost(edge.elements[0])
    return atom.root if atom else None


@dataclass
class Session:
    id: str
    criterion: str
    candidate: Hyperedge
    assignments: dict = field(default_factory=dict)
    patterns: tuple = ()
    positives: list = field(default_factory=list)
    negatives: list = field(default_factory=list)
    history: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "criterion": self.criterion,
            "candidate": to_string(self.candidate),
            "assignments": {k: to_string(v)
                            for k, v in self.assignments.items()},
            "patterns": [pattern_to_string(p) for p in self.patterns],
            "positives": [to_string(e) for e in self.positives],
            "negatives": [to_string(e) for e in self.negatives],
            "history": list(self.history),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Session":
        return cls(
            id=obj["id"],
            criterion=obj["criterion"],
            candidate=parse_notation(obj["candidate"]),
            assignments={k: parse_notation(v)
                         for k, v in obj["assignments"].items()},
            patterns=tuple(parse_pattern(p) for p in obj["patterns"]),
            positives=[parse_notation(e) for e in obj["positives"]],
            negatives=[parse_notation(e) for e in obj["negatives"]],
            history=list(obj.get("history", [])),
        )


def new_session(store, criterion: str = "random",
                seed: int | None = None) -> Session:
    candidate = select_candidate(store, criterion, seed)
    session = Session(id=uuid.uuid4().hex[:12], criterion=criterion,
                      candidate=candidate, positives=[candidate])
    session.history.append({"step": "select",
                            "candidate": to_string(candidate)})
    return session


def assign_variable(session: Session, name: str, subedge: Hyperedge):
    """Bind a sub-edge of the candidate to a variable and regenerate the
    pattern."""
    if not name or name != name.upper():
        raise ValueError("variable names are uppercase")
    if not contains_subedge(session.candidate, subedge):
        raise ValueError(f"{to_string(subedge)} is not part of the candidate")
    session.assignments[name] = subedge
    session.patterns = (generalize(session.candidate, session.assignments),)
    session.history.append({"step": "assign", "variable": name,
                            "subedge": to_string(subedge)})
    return session.patterns


def session_matches(session: Session, store) -> list[tuple[Hyperedge, str]]:
    """Store edges matching the session's pattern, with review status."""
    if not session.patterns:
        return []
    out = []
    for edge in sorted(store.edges(), key=to_string):
        if _conjunction_matches(session.patterns, edge, store):
            if edge in session.negatives:
                status = "rejected"
            elif edge in session.positives:
                status = "accepted"
            else:
                status = "pending"
            out.append((edge, status))
    return out


def give_feedback(session: Session, store, edge: Hyperedge, verdict: str):
    """Record an accept/reject verdict; rejection refines the pattern so it
    no longer matches any rejected edge."""
    if verdict not in ("accept", "reject"):
        raise ValueError(f"unknown verdict {verdict!r}")
    if not session.patterns:
        raise ValueError("session has no pattern yet")
    if verdict == "accept":
        if edge in session.negatives:
            raise RefinementError("edge was already rejected")
        if edge not in session.positives:
            session.positives.append(edge)
    else:
        if edge in session.positives and edge != session.candidate:
            raise RefinementError("edge was already accepted")
        if edge == session.candidate:
            raise RefinementError("cannot reject the candidate itself")
        if edge not in session.negatives:
            session.negatives.append(edge)
        session.patterns = refine(session.patterns, session.positives,
                                  session.negatives, store)
    session.history.append({"step": "feedback", "edge": to_string(edge),
                            "verdict": verdict})
    for positive in session.positives:
        assert _conjunction_matches(session.patterns, positive, store)
    for negative in session.negatives:
        assert not _conjunction_matches(session.patterns, negative, store)
    return session.patterns


def export_rule(session: Session, rhs_text: str) -> str:
    """Learned pattern as a rule-file line, with a caller-supplied right
    side built from the session's variables."""
    if not session.patterns:
        raise ValueError("session has no pattern to export")
    rhs = parse_pattern(rhs_text)
    lhs = session.patterns[0]
    from hedges.patterns import Rule, _validate_rule, pattern_variables
    rule = Rule(lhs, rhs)
    _validate_rule(rule)
    line = rule.render()
    for aux in session.patterns[1:]:
        line += f"  # requires {pattern_to_string(aux)}"
    return line


class SessionStore:
    """Sessions persisted to a JSON sidecar so interrupted learning loops
    can resume."""

    def __init__(self, path=None):
        self.path = path
        self.sessions: dict[str, Session] = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    payload = json.load(fh)
                for obj in payload.get("sessions", []):
                    session = Session.from_json(obj)
                    self.sessions[session.id] = session
            except FileNotFoundError:
                pass

    def save(self):
        if self.path is None:
            return
        payload = {"sessions": [s.to_json()
                                for s in self.sessions.values()]}
        with open(self.path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)

    def add(self, session: Session):
        self.sessions[session.id] = session
        self.save()

    def get(self, session_id: str) -> Session | None:
        return self.sessions.get(session_id)
