"""Typed recursive hyperedge engine."""

from hedges.edges import (  # noqa: F401
    Atom,
    Edge,
    Hyperedge,
    NotationError,
    TypeViolation,
    atoms_of,
    infer_type,
    innermost_atom,
    main_concept,
    parse_notation,
    size_of,
    subedges,
    to_string,
)

__version__ = "0.1.0"
