"""Pocket-cube (2x2x2) planning and stochastic hand-execution toolkit."""

from .cube import (
    CANONICAL_SOLVED,
    GENERALIZED_MOVES,
    N_STATES,
    SOLVED,
    CanonicalState,
    Color,
    CubeletState,
    Move,
    apply,
    apply_generalized,
    apply_seq,
    canonicalize,
    format_moves,
    from_facelets,
    is_solved,
    parse_moves,
    rank,
    reduce_move,
    to_facelets,
    unrank,
)

__all__ = [
    "CANONICAL_SOLVED",
    "GENERALIZED_MOVES",
    "N_STATES",
    "SOLVED",
    "CanonicalState",
    "Color",
    "CubeletState",
    "Move",
    "apply",
    "apply_generalized",
    "apply_seq",
    "canonicalize",
    "format_moves",
    "from_facelets",
    "is_solved",
    "parse_moves",
    "rank",
    "reduce_move",
    "to_facelets",
    "unrank",
]
