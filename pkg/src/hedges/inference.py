"""Built-in knowledge extraction over hyperedges: conjunction decomposition,
relation tuples, claim and conflict detection, tense/negation inspection,
context peeling and conflict-network faction detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from hedges.edges import (
    Atom,
    Edge,
    Hyperedge,
    TypeViolation,
    atoms_of,
    infer_type,
    innermost_atom,
    subedges,
    to_string,
)
from hedges.patterns import edge_at, match, match_anywhere, replace_at, _paths

CLAIM_LEMMAS = frozenset({"say", "claim"})
CONFLICT_LEMMAS = frozenset({"accuse", "arrest", "clash", "condemn", "kill",
                             "slam", "warn"})
CONFLICT_TRIGGERS = frozenset({"against", "for", "of", "over"})
PRONOUN_CATEGORIES = {"he": "male", "it": "non-human", "she": "female",
                      "they": "group"}

_COLON_J = Atom(":", "J")


def _connector_type(edge: Hyperedge) -> str | None:
    if isinstance(edge, Atom):
        return None
    try:
        return infer_type(edge.elements[0])
    except TypeViolation:
        return None


def _safe_innermost(edge: Hyperedge) -> Atom | None:
    try:
        return innermost_atom(edge)
    except TypeViolation:
        return None


def _predicate_roles(rel: Edge) -> str:
    atom = _safe_innermost(rel.elements[0])
    return (atom.roles or "") if atom is not None else ""


def _role_args(rel: Edge, wanted: str) -> list[Hyperedge]:
    roles = _predicate_roles(rel)
    return [arg for role, arg in zip(roles, rel.args) if role in wanted]


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------

def edge_text(edge: Hyperedge, store=None) -> str:
    """Readable text for an edge: the recorded source span when available,
    otherwise a word-order-aware concatenation of atom roots."""
    if store is not None:
        recorded = store.text_of(edge)
        if recorded:
            return recorded
    return _render(edge, store)


def _render(edge: Hyperedge, store) -> str:
    if isinstance(edge, Atom):
        return "" if edge.root in ("+", ":") else edge.root
    conn = edge.elements[0]
    conn_type = _connector_type(edge)
    parts: list[str] = []
    if conn_type == "M":
        parts = [edge_text(conn, store), edge_text(edge.elements[1], store)]
    elif conn_type == "B":
        base = _safe_innermost(conn)
        args = [edge_text(a, store) for a in edge.args]
        if base is not None and base.root == "+":
            parts = args
        else:
            parts = [args[0], edge_text(conn, store)] + args[1:]
    elif conn_type == "T":
        parts = [edge_text(conn, store)] + \
            [edge_text(a, store) for a in edge.args]
    elif conn_type == "P":
        roles = _predicate_roles(edge)
        subjects, rest = [], []
        for i, arg in enumerate(edge.args):
            role = roles[i] if i < len(roles) else "?"
            (subjects if role in "sp" else rest).append(
                edge_text(arg, store))
        parts = subjects + [edge_text(conn, store)] + rest
    elif conn_type == "J":
        base = _safe_innermost(conn)
        root = base.root if base is not None else ""
        args = [edge_text(a, store) for a in edge.args]
        if root == ",":
            return ", ".join(a for a in args if a)
        if root in (":", ""):
            parts = args
        else:
            return f" {root} ".join(a for a in args if a)
    else:
        parts = [edge_text(el, store) for el in edge.elements]
    return " ".join(p for p in parts if p)


# ---------------------------------------------------------------------------
# Conjunction decomposition
# ---------------------------------------------------------------------------

def _conjunction_paths(edge: Hyperedge) -> list[tuple]:
    out = []
    for path in _paths(edge):
        sub = edge_at(edge, path)
        if not isinstance(sub, Edge) or _connector_type(sub) != "J":
            continue
        base = _safe_innermost(sub.elements[0])
        if base is not None and base.root == "lemma":
            continue  # auxiliary word-lemma links are not sequences
        out.append(path)
    return out


def _subject_repaired(member: Edge, subject: Hyperedge) -> Edge:
    conn = member.elements[0]
    atom = _safe_innermost(conn)
    new_atom = atom.with_roles("s" + (atom.roles or ""))
    if isinstance(conn, Atom):
        new_conn: Hyperedge = new_atom
    else:
        def rebuild(e: Hyperedge) -> Hyperedge:
            if isinstance(e, Atom):
                return new_atom
            return Edge(list(e.elements[:-1]) + [rebuild(e.elements[-1])])
        new_conn = rebuild(conn)
    return Edge([new_conn, subject] + list(member.args))


def _decompose_once(edge: Hyperedge) -> list[Hyperedge]:
    out = []
    for path in _conjunction_paths(edge):
        conj = edge_at(edge, path)
        replacements = []
        last_subject = None
        for member in conj.args:
            try:
                member_type = infer_type(member)
            except TypeViolation:
                continue
            if member_type == "C":
                replacements.append(member)
            elif member_type == "R" and isinstance(member, Edge):
                roles = _predicate_roles(member)
                subjects = [a for r, a in zip(roles, member.args)
                            if r in "sp"]
                if subjects:
                    replacements.append(member)
                    last_subject = subjects[0]
                elif last_subject is not None:
                    replacements.append(
                        _subject_repaired(member, last_subject))
        for replacement in replacements:
            out.append(replace_at(edge, path, replacement))
    return out


def decompose_conjunctions(edge: Hyperedge) -> list[Hyperedge]:
    """Inferred edges from the conjunction rules, applied recursively to a
    fixpoint.  The original edge is not included in the result."""
    seen = {edge}
    out = []
    frontier = [edge]
    while frontier:
        current = frontier.pop(0)
        for derived in _decompose_once(current):
            if derived not in seen:
                seen.add(derived)
                out.append(derived)
                frontier.append(derived)
    return out


def _conjunction_free(edge: Hyperedge) -> bool:
    return not _conjunction_paths(edge)


# ---------------------------------------------------------------------------
# Relation tuple extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OIETuple:
    rel: str
    args: tuple

    def render(self) -> str:
        return "\t".join((self.rel,) + self.args)


_TUPLE_PATTERNS = [
    # pattern, REL variable names in concatenation order, has optional tail
    ("(REL/P.{[sp][cora]x} ARG1/C ARG2 ARG3...)", ("REL",), True),
    None,  # compound-builder pattern, handled structurally below
    ("(REL1/P.{sx}-oc ARG1/C (REL2/T ARG2))", ("REL1", "REL2"), False),
    ("(REL1/P.{px} ARG1/C (REL2/T ARG2))", ("REL1", "REL2"), False),
    ("(REL1/P.{sc} ARG1/C (REL3/B REL2/C ARG2/C))",
     ("REL1", "REL2", "REL3"), False),
]


def _compound_tuples(edge: Hyperedge, store) -> list[OIETuple]:
    out = []
    seen = set()
    for sub in subedges(edge):
        if not isinstance(sub, Edge) or sub in seen:
            continue
        seen.add(sub)
        conn = sub.elements[0]
        if not (isinstance(conn, Atom) and conn.root == "+"
                and conn.type_code == "B"):
            continue
        roles = conn.roles or ""
        if len(sub.args) != 2 or len(roles) != 2 or roles[0] not in "ma" \
                or roles[1] not in "ma" or "m" not in roles:
            continue
        first, second = sub.args
        if roles == "mm":
            a, b = edge_text(first, store), edge_text(second, store)
            out.append(OIETuple("is", (a, b)))
            out.append(OIETuple("is", (b, a)))
        else:
            main = first if roles[0] == "m" else second
            aux = second if roles[0] == "m" else first
            if isinstance(main, Edge) and isinstance(aux, Edge):
                out.append(OIETuple("is", (edge_text(main, store),
                                           edge_text(aux, store))))
    return out


def extract_oie(edge: Hyperedge, store=None) -> list[OIETuple]:
    """Relation tuples from an edge.  Conjunctions are decomposed first and
    extraction runs on the conjunction-free results; relation-shaped
    patterns match at the top level, the compound-concept pattern at any
    depth."""
    working = [edge] + decompose_conjunctions(edge)
    working = [e for e in working if _conjunction_free(e)]
    out: list[OIETuple] = []
    for current in working:
        for spec in _TUPLE_PATTERNS:
            if spec is None:
                out.extend(_compound_tuples(current, store))
                continue
            pattern, rel_vars, has_tail = spec
            for binding in match(current, pattern):
                rel = " ".join(edge_text(binding[v], store)
                               for v in rel_vars) or "is"
                args = [edge_text(binding["ARG1"], store),
                        edge_text(binding["ARG2"], store)]
                if has_tail:
                    args.extend(edge_text(extra, store)
                                for extra in binding.get("ARG3", ()))
                out.append(OIETuple(rel, tuple(args)))
    deduped = []
    seen = set()
    for t in out:
        if t not in seen:
            seen.add(t)
            deduped.append(t)
    return deduped


# ---------------------------------------------------------------------------
# Claims and conflicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    actor: Hyperedge
    predicate: Hyperedge
    claim: Hyperedge
    contexts: tuple = ()
    specifications: tuple = ()
    tense: str = "present"
    negated: bool = False
    pronoun: str | None = None


@dataclass(frozen=True)
class Conflict:
    source: Hyperedge
    target: Hyperedge
    topic: Hyperedge
    trigger_root: str


def extract_claim_context(outer: Hyperedge) -> tuple:
    """Peel generic-sequence nestings into (relation, contexts,
    specifications).  Specifications are the x-role arguments of the
    relation and of relation-shaped contexts."""
    contexts: list[Hyperedge] = []
    edge = outer
    while isinstance(edge, Edge) and edge.elements[0] == _COLON_J:
        members = list(edge.args)

        def claim_score(m: Hyperedge) -> tuple:
            try:
                if infer_type(m) != "R" or not isinstance(m, Edge):
                    return (0, 0)
            except TypeViolation:
                return (0, 0)
            roles = _predicate_roles(m)
            return (1, int("s" in roles and "r" in roles))

        ranked = sorted(range(len(members)),
                        key=lambda i: claim_score(members[i]) + (-i,),
                        reverse=True)
        main_index = ranked[0]
        contexts.extend(m for i, m in enumerate(members) if i != main_index)
        edge = members[main_index]
    specifications: list[Hyperedge] = []
    for rel in [edge] + contexts:
        if isinstance(rel, Edge) and _connector_type(rel) == "P":
            specifications.extend(_role_args(rel, "x"))
    return edge, tuple(contexts), tuple(specifications)


def inspect_predicate(pred: Hyperedge) -> tuple[str, bool]:
    """(tense, negated) from the predicate's modifier nesting."""
    atoms = atoms_of(pred)
    negated = any(a.type_code == "M" and a.root in ("not", "n't")
                  for a in atoms)
    if any(a.type_code == "M" and a.root == "will" for a in atoms):
        tense = "future"
    elif any(a.type_code == "P" and a.root == "was" for a in atoms):
        tense = "past"
    else:
        tense = "present"
    return tense, negated


def resolve_anaphora(claim: Claim) -> Claim:
    """Replace a pronominal inner subject with the outer actor, recording
    the pronoun as category evidence."""
    inner = claim.claim
    if not isinstance(inner, Edge) or _connector_type(inner) != "P":
        return claim
    roles = _predicate_roles(inner)
    for i, (role, arg) in enumerate(zip(roles, inner.args)):
        if role == "s" and isinstance(arg, Atom) and arg.type_code == "C" \
                and arg.root in PRONOUN_CATEGORIES:
            elements = list(inner.elements)
            elements[i + 1] = claim.actor
            return Claim(claim.actor, claim.predicate, Edge(elements),
                         claim.contexts, claim.specifications, claim.tense,
                         claim.negated, arg.root)
    return claim


_CLAIM_PATTERN = "(PRED/P.{sr} ACTOR/C CLAIM/[RS])"
_CONFLICT_PATTERN = "(PRED/P.{sox} SOURCE/C TARGET/C (TRIGGER/T TOPIC/[RS]))"


def _lemma_matches(store, pred: Hyperedge, lemmas: frozenset) -> bool:
    atom = _safe_innermost(pred)
    if atom is None:
        return False
    lemma = store.lemma_of(atom)
    return lemma is not None and lemma.root in lemmas


def detect_claim(edge: Hyperedge, store,
                 lemmas: frozenset = CLAIM_LEMMAS) -> Claim | None:
    """Attributable claim in the edge, or None.  Requires a stored lemma
    edge mapping the predicate onto the claim lemma set."""
    rel, contexts, specifications = extract_claim_context(edge)
    if not isinstance(rel, Edge):
        return None
    for binding in match(rel, _CLAIM_PATTERN):
        pred = binding["PRED"]
        if not _lemma_matches(store, pred, lemmas):
            continue
        inner = binding["CLAIM"]
        if isinstance(inner, Edge) and _connector_type(inner) == "P":
            tense, negated = inspect_predicate(inner.elements[0])
        else:
            tense, negated = "present", False
        claim = Claim(binding["ACTOR"], pred, inner, contexts,
                      specifications, tense, negated)
        return resolve_anaphora(claim)
    return None


def detect_conflict(edge: Hyperedge, store,
                    lemmas: frozenset = CONFLICT_LEMMAS,
                    triggers: frozenset = CONFLICT_TRIGGERS
                    ) -> Conflict | None:
    """Expression of conflict in the edge, or None."""
    rel, _, _ = extract_claim_context(edge)
    if not isinstance(rel, Edge):
        return None
    for binding in match(rel, _CONFLICT_PATTERN):
        trigger = _safe_innermost(binding["TRIGGER"])
        if trigger is None or trigger.root not in triggers:
            continue
        if not _lemma_matches(store, binding["PRED"], lemmas):
            continue
        return Conflict(binding["SOURCE"], binding["TARGET"],
                        binding["TOPIC"], trigger.root)
    return None


def find_claims(store, lemmas: frozenset = CLAIM_LEMMAS) -> list[Claim]:
    out = []
    for edge in sorted(store.edges(), key=to_string):
        claim = detect_claim(edge, store, lemmas)
        if claim is not None:
            out.append(claim)
    return out


def find_conflicts(store, lemmas: frozenset = CONFLICT_LEMMAS
                   ) -> list[Conflict]:
    out = []
    for edge in sorted(store.edges(), key=to_string):
        conflict = detect_conflict(edge, store, lemmas)
        if conflict is not None:
            out.append(conflict)
    return out


def actor_category(evidence: dict) -> str:
    """Majority pronoun category for an actor; ties and no evidence give
    'unknown'."""
    totals: dict[str, int] = {}
    for pronoun, count in evidence.items():
        category = PRONOUN_CATEGORIES.get(pronoun)
        if category is not None and count > 0:
            totals[category] = totals.get(category, 0) + count
    if not totals:
        return "unknown"
    best = max(totals.values())
    winners = [c for c, n in totals.items() if n == best]
    return winners[0] if len(winners) == 1 else "unknown"


# ---------------------------------------------------------------------------
# Conflict network and factions
# ---------------------------------------------------------------------------

@dataclass
class ConflictNetwork:
    actors: dict = field(default_factory=dict)   # label -> actor edge
    links: list = field(default_factory=list)    # (source, target, topic)

    def add(self, conflict: Conflict):
        src = to_string(conflict.source)
        tgt = to_string(conflict.target)
        self.actors.setdefault(src, conflict.source)
        self.actors.setdefault(tgt, conflict.target)
        self.links.append((src, tgt, conflict.topic))

    def degree(self, label: str) -> int:
        return sum(1 for s, t, _ in self.links if label in (s, t))

    def in_conflict(self, a: str, b: str) -> bool:
        return any({s, t} == {a, b} for s, t, _ in self.links)


def build_conflict_network(conflicts: Iterable[Conflict]) -> ConflictNetwork:
    net = ConflictNetwork()
    for c in conflicts:
        net.add(c)
    return net


def detect_factions(net: ConflictNetwork) -> tuple[set, set, set]:
    """Two-faction split of a conflict network.

    Links are visited by descending minimum endpoint degree (ties by
    endpoint labels); the first link seeds the factions and every node
    thereafter joins a faction only when it conflicts with the other side
    and with nobody on its own.
    """
    if not net.links:
        raise ValueError("empty conflict network")
    degrees = {label: net.degree(label) for label in net.actors}
    ordered = sorted(
        net.links,
        key=lambda link: (-min(degrees[link[0]], degrees[link[1]]),
                          min(link[0], link[1]), max(link[0], link[1])))
    faction_a: set = set()
    faction_b: set = set()

    def try_assign(node: str):
        if node in faction_a or node in faction_b:
            return
        conf_a = any(net.in_conflict(node, m) for m in faction_a)
        conf_b = any(net.in_conflict(node, m) for m in faction_b)
        if not conf_a and conf_b:
            faction_a.add(node)
        elif not conf_b and conf_a:
            faction_b.add(node)

    first = ordered[0]
    seed_a, seed_b = sorted(first[:2],
                            key=lambda n: (-degrees[n], n))
    faction_a.add(seed_a)
    faction_b.add(seed_b)
    for link in ordered[1:]:
        for node in sorted(link[:2]):
            try_assign(node)
    unassigned = set(net.actors) - faction_a - faction_b
    return faction_a, faction_b, unassigned
