"""Sentence-folding stage: turns the typed atom sequence of a sentence into
a single well-formed hyperedge.

Works on a sequence of work items (each an edge under construction plus the
source-token indices it covers).  At every step all type-rule windows are
scored by a heuristic over the dependency tree — windows whose items are
grammatically connected win, then deeper windows, then higher-priority
rules — and the best window is folded.  When nothing matches, the two first
items are joined under the generic sequence connector ``:/J``.  Argument
roles are assigned afterwards from dependency labels, and auxiliary lemma
edges are emitted for tokens whose lemma differs from their surface form.
"""

from __future__ import annotations

from typing import Iterable

from hedges.alpha import (
    AnnotatedSentence,
    Forest,
    classify_tokens,
    sanitize_root,
)
from hedges.edges import Atom, Edge, Hyperedge

# Dependency label -> predicate argument role.  The mapping is configurable;
# unknown labels map to '?'.
DEP_TO_ROLE = {
    "nsubj": "s",
    "nsubjpass": "p",
    "agent": "a",
    "attr": "c",
    "acomp": "c",
    "dobj": "o",
    "dative": "i",
    "iobj": "i",
    "parataxis": "t",
    "intj": "j",
    "advcl": "x",
    "prep": "x",
    "npadvmod": "x",
    "ccomp": "r",
    "relcl": "r",
    "xcomp": "r",
}

_PLUS_B = Atom("+", "B")
_COLON_J = Atom(":", "J")

# Window patterns in priority order (lower rank wins ties).
PATTERN_NAMES = ("+/B", "M", "B", "T", "P", "J")


class WorkItem:
    """Edge under construction plus the token indices it covers."""

    __slots__ = ("atom", "children", "tokens", "type_code", "_edge")

    def __init__(self, atom: Atom | None = None, children: tuple = (),
                 tokens: frozenset = frozenset(),
                 type_code: str | None = None):
        self.atom = atom
        self.children = tuple(children)
        self.tokens = frozenset(tokens)
        if type_code is None:
            if atom is None:
                raise ValueError("composite work item needs a type code")
            type_code = atom.type_code
        self.type_code = type_code
        self._edge = None

    @classmethod
    def for_token(cls, atom: Atom, index: int) -> "WorkItem":
        return cls(atom=atom, tokens=frozenset({index}))

    @property
    def is_atom(self) -> bool:
        return self.atom is not None

    @property
    def edge(self) -> Hyperedge:
        if self._edge is None:
            if self.is_atom:
                self._edge = self.atom
            else:
                self._edge = Edge([c.edge for c in self.children])
        return self._edge

    def __repr__(self):
        return f"<WorkItem {self.edge} {sorted(self.tokens)}>"


def _combine(connector: WorkItem, args: list, type_code: str) -> WorkItem:
    tokens = connector.tokens
    for a in args:
        tokens |= a.tokens
    return WorkItem(children=(connector, *args), tokens=tokens,
                    type_code=type_code)


def apply_pattern(seq: list, pos: int, pattern: str,
                  sentence: AnnotatedSentence | None = None) -> list | None:
    """Fold the window at ``pos`` according to the named pattern, returning
    the new sequence, or None when the window does not match.

    The sentence, when given, bounds greedy predicate windows: an adjacent
    item that dependency-dominates the predicate stays outside the relation
    (the predicate's clause is subordinate to it, not the other way round).
    """
    n = len(seq)
    if pattern == "+/B":
        if pos + 2 > n:
            return None
        a, b = seq[pos], seq[pos + 1]
        if a.type_code == "C" and b.type_code == "C":
            conn = WorkItem(atom=_PLUS_B)
            merged = _combine(conn, [a, b], "C")
            return seq[:pos] + [merged] + seq[pos + 2:]
        return None
    if pattern == "M":
        if pos + 2 > n:
            return None
        window = seq[pos:pos + 2]
        for i, item in enumerate(window):
            if item.type_code == "M":
                arg = window[1 - i]
                merged = _combine(item, [arg], arg.type_code)
                return seq[:pos] + [merged] + seq[pos + 2:]
        return None
    if pattern == "B":
        if pos + 3 > n:
            return None
        window = seq[pos:pos + 3]
        builders = [i for i, it in enumerate(window) if it.type_code == "B"]
        if len(builders) != 1:
            return None
        rest = [it for i, it in enumerate(window) if i != builders[0]]
        if any(it.type_code != "C" for it in rest):
            return None
        merged = _combine(window[builders[0]], rest, "C")
        return seq[:pos] + [merged] + seq[pos + 3:]
    if pattern == "T":
        if pos + 2 > n:
            return None
        window = seq[pos:pos + 2]
        triggers = [i for i, it in enumerate(window) if it.type_code == "T"]
        if len(triggers) != 1:
            return None
        arg = window[1 - triggers[0]]
        if arg.type_code not in ("C", "R"):
            return None
        merged = _combine(window[triggers[0]], [arg], "S")
        return seq[:pos] + [merged] + seq[pos + 2:]
    if pattern == "P":
        window = _predicate_window(seq, pos, sentence)
        if window is None:
            return None
        k, start, end = window
        args = [seq[i] for i in range(start, end) if i != k]
        merged = _combine(seq[k], args, "R")
        return seq[:start] + [merged] + seq[end:]
    if pattern == "J":
        if pos + 3 > n:
            return None
        window = seq[pos:pos + 3]
        conjs = [i for i, it in enumerate(window) if it.type_code == "J"]
        if len(conjs) != 1:
            return None
        rest = [it for i, it in enumerate(window) if i != conjs[0]]
        # join only completed terms, not loose connector atoms
        if any(it.type_code not in ("C", "R", "S") for it in rest):
            return None
        merged = _combine(window[conjs[0]], rest, rest[0].type_code)
        return seq[:pos] + [merged] + seq[pos + 3:]
    raise ValueError(f"unknown pattern {pattern!r}")


def _ancestors(sentence: AnnotatedSentence, tokens: frozenset) -> frozenset:
    out = set()
    for t in tokens:
        i = t
        while sentence.tokens[i].head != i:
            i = sentence.tokens[i].head
            out.add(i)
    return frozenset(out - set(tokens))


def _predicate_window(seq: list, pos: int,
                      sentence: AnnotatedSentence | None) -> tuple | None:
    """Greedy predicate window anchored at ``pos``: the maximal run of
    absorbable concept/relation/specifier items around a single predicate
    item.  Items containing a dependency ancestor of the predicate are not
    absorbable and bound the run.  Only the run's start position yields a
    window."""
    n = len(seq)

    def absorbable(item: WorkItem, blocked: frozenset) -> bool:
        return item.type_code in ("C", "R", "S") and \
            not (item.tokens & blocked)

    k = None
    for i in range(pos, n):
        if seq[i].type_code == "P":
            k = i
            break
    if k is None:
        return None
    blocked = _ancestors(sentence, seq[k].tokens) if sentence is not None \
        else frozenset()
    for i in range(pos, k):
        if not absorbable(seq[i], blocked):
            return None
    start = k
    while start > 0 and absorbable(seq[start - 1], blocked):
        start -= 1
    if start != pos:
        return None
    end = k + 1
    while end < n and absorbable(seq[end], blocked):
        end += 1
    if end - start < 2:
        return None
    return k, start, end


def _window_span(seq: list, pos: int, pattern: str,
                 sentence: AnnotatedSentence | None) -> tuple | None:
    if pattern == "P":
        window = _predicate_window(seq, pos, sentence)
        if window is None:
            return None
        return window[1], window[2]
    width = 3 if pattern in ("B", "J") else 2
    if pos + width > len(seq):
        return None
    return pos, pos + width


def heuristic_h(seq: list, pos: int, pattern: str,
                sentence: AnnotatedSentence) -> tuple | None:
    """Lexicographic window score: dependency connectedness, maximum
    dependency depth of covered tokens, negated rule priority."""
    span = _window_span(seq, pos, pattern, sentence)
    if span is None:
        return None
    items = seq[span[0]:span[1]]
    rank = PATTERN_NAMES.index(pattern)
    return (_connected(items, sentence), _max_depth(items, sentence), -rank)


def _connected(items: list, sentence: AnnotatedSentence) -> int:
    if len(items) <= 1:
        return 1
    sets = [it.tokens for it in items]

    def linked(i: int, j: int) -> bool:
        for t in sets[i]:
            if sentence.tokens[t].head in sets[j]:
                return True
        for t in sets[j]:
            if sentence.tokens[t].head in sets[i]:
                return True
        return False

    reached = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(len(items)):
            if j not in reached and linked(i, j):
                reached.add(j)
                frontier.append(j)
    return 1 if len(reached) == len(items) else 0


def _max_depth(items: list, sentence: AnnotatedSentence) -> int:
    depth = 0
    for it in items:
        for t in it.tokens:
            depth = max(depth, sentence.depth(t))
    return depth


def beta_transform(seq: list, sentence: AnnotatedSentence) -> WorkItem:
    """Fold the work-item sequence into a single item.

    Repeatedly applies the best-scoring window; when no window matches,
    joins the two first items under ``:/J``.  Terminates in at most
    ``len(seq) - 1`` folds.
    """
    if not seq:
        raise ValueError("empty sequence")
    seq = list(seq)
    while len(seq) > 1:
        best_score = None
        best_seq = None
        for pos in range(len(seq)):
            for pattern in PATTERN_NAMES:
                score = heuristic_h(seq, pos, pattern, sentence)
                if score is None:
                    continue
                if best_score is not None and score <= best_score:
                    continue
                folded = apply_pattern(seq, pos, pattern, sentence)
                if folded is not None:
                    best_score = score
                    best_seq = folded
        if best_seq is not None:
            seq = best_seq
        else:
            first, second = seq[0], seq[1]
            conn = WorkItem(atom=_COLON_J)
            merged = _combine(conn, [first, second], first.type_code)
            seq = [merged] + seq[2:]
    return seq[0]


# ---------------------------------------------------------------------------
# Argument roles
# ---------------------------------------------------------------------------

def _head_token(item: WorkItem, sentence: AnnotatedSentence,
                within: frozenset) -> int | None:
    """Token of the item whose dependency head lies outside ``within``."""
    candidates = []
    for t in item.tokens:
        head = sentence.tokens[t].head
        if head == t or head not in within:
            candidates.append(t)
    if not candidates:
        return None
    return min(candidates, key=lambda t: (sentence.depth(t), t))


def _arg_role(arg: WorkItem, sentence: AnnotatedSentence,
              dep_to_role: dict) -> str:
    head = _head_token(arg, sentence, arg.tokens)
    if head is None:
        return "?"
    return dep_to_role.get(sentence.tokens[head].dep, "?")


def _with_connector_roles(conn: WorkItem, roles: str) -> WorkItem:
    """Attach a role string to the innermost atom of a connector item."""
    if conn.is_atom:
        return WorkItem(atom=conn.atom.with_roles(roles), tokens=conn.tokens)
    inner = _with_connector_roles(conn.children[-1], roles)
    return WorkItem(children=conn.children[:-1] + (inner,),
                    tokens=conn.tokens, type_code=conn.type_code)


def assign_arg_roles(item: WorkItem, sentence: AnnotatedSentence,
                     dep_to_role: dict | None = None) -> WorkItem:
    """Attach predicate and builder argument roles throughout the item."""
    dep_to_role = DEP_TO_ROLE if dep_to_role is None else dep_to_role
    if item.is_atom:
        return item
    children = tuple(assign_arg_roles(c, sentence, dep_to_role)
                     for c in item.children)
    conn, args = children[0], children[1:]
    if conn.type_code == "P":
        roles = "".join(_arg_role(a, sentence, dep_to_role) for a in args)
        conn = _with_connector_roles(conn, roles)
    elif conn.type_code == "B":
        base = conn.atom if conn.is_atom else None
        if base is not None and base.root == "+":
            external = [i for i, a in enumerate(args)
                        if _head_token(a, sentence, item.tokens) is not None]
            if len(external) == 1:
                roles = "".join("m" if i == external[0] else "a"
                                for i in range(len(args)))
            else:
                roles = "?" * len(args)
        else:
            roles = "m" + "a" * (len(args) - 1)
        conn = _with_connector_roles(conn, roles)
    return WorkItem(children=(conn, *args), tokens=item.tokens,
                    type_code=item.type_code)


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

_LEMMA_J = Atom("lemma", "J")


def lemma_edges(sentence: AnnotatedSentence, atoms: Iterable[Atom | None]
                ) -> list[Edge]:
    """One auxiliary lemma edge per kept token whose lemma differs from its
    surface form."""
    out = []
    for tok, atom in zip(sentence.tokens, atoms):
        if atom is None:
            continue
        surface = sanitize_root(tok.text)
        lemma = sanitize_root(tok.lemma)
        if surface != lemma:
            out.append(Edge([_LEMMA_J, Atom(surface, atom.type_code),
                             Atom(lemma, atom.type_code)]))
    return out


def parse_sentence(sentence: AnnotatedSentence, forest: Forest,
                   dep_to_role: dict | None = None
                   ) -> tuple[Hyperedge, list[Edge]]:
    """Full pipeline: classify tokens, fold, assign roles; returns the main
    edge plus auxiliary lemma edges."""
    atoms = classify_tokens(sentence, forest)
    seq = [WorkItem.for_token(atom, i)
           for i, atom in enumerate(atoms) if atom is not None]
    if not seq:
        raise ValueError("every token was discarded")
    folded = beta_transform(seq, sentence)
    rolled = assign_arg_roles(folded, sentence, dep_to_role)
    return rolled.edge, lemma_edges(sentence, atoms)


def items_for_labels(sentence: AnnotatedSentence, labels: Iterable[str]
                     ) -> list[WorkItem]:
    """Work items from gold labels, bypassing the classifier."""
    seq = []
    for i, (tok, label) in enumerate(zip(sentence.tokens, labels)):
        if label == "DISCARD":
            continue
        seq.append(WorkItem.for_token(
            Atom(sanitize_root(tok.text), label), i))
    return seq
