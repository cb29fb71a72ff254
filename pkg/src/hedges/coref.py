"""Coreference resolution over compound concepts.

For every seed concept (an atom serving as the main concept of at least one
``+``-built compound), the auxiliary concepts that co-occur with it form a
graph; compounds whose auxiliary concepts fall inside one maximal clique are
taken to name the same entity.  The bare seed is then probabilistically
assigned to its dominant coreference set when that set holds enough of the
total degree mass and the seed is used often enough on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from hedges.edges import (
    Atom,
    Edge,
    Hyperedge,
    TypeViolation,
    atoms_of,
    infer_type,
    main_concept,
    size_of,
    to_string,
)

DEFAULT_THETA = 0.7
DEFAULT_THETA_PRIME = 0.05
MAX_GRAPH_NODES = 64


def _is_compound(edge: Hyperedge) -> bool:
    return (isinstance(edge, Edge)
            and isinstance(edge.elements[0], Atom)
            and edge.elements[0].root == "+"
            and edge.elements[0].type_code == "B")


def _main_chain_atom(edge: Hyperedge) -> Atom | None:
    """Innermost main concept of a compound, when determinable."""
    current = edge
    while isinstance(current, Edge):
        try:
            current = main_concept(current)
        except TypeViolation:
            return None
    return current


def seed_concepts(store) -> list[Atom]:
    """Atoms serving as the main argument of at least one compound."""
    seeds: dict[Atom, None] = {}
    for edge in store.all_present():
        if not _is_compound(edge):
            continue
        try:
            main = main_concept(edge)
        except TypeViolation:
            continue
        if isinstance(main, Atom):
            seeds.setdefault(main)
    return sorted(seeds, key=to_string)


def compounds_of(store, seed: Atom) -> list[Hyperedge]:
    """Compound concepts whose main-concept chain terminates at the seed."""
    out = []
    for edge in store.all_present():
        if _is_compound(edge) and _main_chain_atom(edge) == seed:
            out.append(edge)
    return sorted(out, key=to_string)


def auxiliary_concepts(compound: Hyperedge, seed: Atom) -> frozenset:
    """Concept atoms, at any depth, that accompany the seed in a compound."""
    return frozenset(a for a in atoms_of(compound)
                     if a.type_code == "C" and a != seed)


def cooccurrence_graph(store, seed: Atom) -> dict:
    """Auxiliary-concept graph: two concepts are linked when they take part
    in at least one compound together."""
    graph: dict[Atom, set] = {}
    for compound in compounds_of(store, seed):
        aux = auxiliary_concepts(compound, seed)
        for a in aux:
            graph.setdefault(a, set())
            for b in aux:
                if a != b:
                    graph[a].add(b)
    return graph


def maximal_cliques(graph: dict, cap: int = MAX_GRAPH_NODES) -> list:
    """Exhaustive maximal-clique enumeration (the graphs here are tiny)."""
    if len(graph) > cap:
        raise ValueError(f"co-occurrence graph too large "
                         f"({len(graph)} > {cap} nodes)")
    cliques: list = []

    def expand(r: set, p: set, x: set):
        if not p and not x:
            cliques.append(frozenset(r))
            return
        for v in sorted(p, key=to_string):
            expand(r | {v}, p & graph[v], x & graph[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(graph), set())
    return sorted(cliques, key=lambda c: sorted(map(to_string, c)))


@dataclass(frozen=True)
class CorefSet:
    members: tuple
    total_degree: int
    p: float
    label: Hyperedge


@dataclass(frozen=True)
class SeedAssignment:
    seed: Atom
    assigned: CorefSet | None
    p: float
    ratio: float
    theta: float
    theta_prime: float


def coref_label(store, members: Iterable[Hyperedge]) -> Hyperedge:
    """Highest-degree member; ties prefer smaller then lexicographically
    earlier edges."""
    members = list(members)
    if not members:
        raise ValueError("empty coreference set")
    return min(members, key=lambda m: (-store.degree(m), size_of(m),
                                       to_string(m)))


def coref_sets(store, seed: Atom, cap: int = MAX_GRAPH_NODES
               ) -> list[CorefSet]:
    """Coreference sets of a seed: one per maximal clique, holding every
    compound whose auxiliary concepts lie inside that clique."""
    compounds = [c for c in compounds_of(store, seed)
                 if auxiliary_concepts(c, seed)]
    if not compounds:
        return []
    graph = cooccurrence_graph(store, seed)
    cliques = maximal_cliques(graph, cap)
    containing = {c: [k for k in cliques if auxiliary_concepts(c, seed) <= k]
                  for c in compounds}
    assignment: dict[Hyperedge, frozenset] = {}
    base_degree = {k: 0 for k in cliques}
    for compound, options in containing.items():
        if len(options) == 1:
            assignment[compound] = options[0]
            base_degree[options[0]] += store.degree(compound)
    for compound, options in containing.items():
        if len(options) > 1:
            best = max(options,
                       key=lambda k: (base_degree[k],
                                      [to_string(a) for a in sorted(
                                          k, key=to_string)]))
            assignment[compound] = best
    groups: dict[frozenset, list] = {}
    for compound, clique in assignment.items():
        groups.setdefault(clique, []).append(compound)
    totals = {clique: sum(store.degree(c) for c in members)
              for clique, members in groups.items()}
    denominator = sum(totals.values())
    sets = []
    for clique, members in groups.items():
        members = sorted(members, key=to_string)
        total = totals[clique]
        p = total / denominator if denominator else 0.0
        sets.append(CorefSet(tuple(members), total, p,
                             coref_label(store, members)))
    sets.sort(key=lambda s: (-s.p, to_string(s.label)))
    return sets


def assign_seed(store, seed: Atom, sets: list,
                theta: float = DEFAULT_THETA,
                theta_prime: float = DEFAULT_THETA_PRIME) -> SeedAssignment:
    """Assign the bare seed to its dominant coreference set when the set's
    probability share exceeds ``theta`` and the seed's degree over deep
    degree exceeds ``theta_prime``."""
    degree = store.degree(seed)
    deep = store.deep_degree(seed)
    ratio = degree / deep if deep else 0.0
    if not sets:
        return SeedAssignment(seed, None, 0.0, ratio, theta, theta_prime)
    best = sets[0]
    assigned = best if (best.p > theta and deep > 0
                        and ratio > theta_prime) else None
    return SeedAssignment(seed, assigned, best.p, ratio, theta, theta_prime)


def resolve_seeds(store, theta: float = DEFAULT_THETA,
                  theta_prime: float = DEFAULT_THETA_PRIME) -> list:
    """Per-seed coreference report: (seed, sets, assignment) triples."""
    out = []
    for seed in seed_concepts(store):
        sets = coref_sets(store, seed)
        out.append((seed, sets, assign_seed(store, seed, sets, theta,
                                            theta_prime)))
    return out
