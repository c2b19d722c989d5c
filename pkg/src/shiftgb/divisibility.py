"""Divisibility of monomials up to the shift action, with witnesses.

A monomial ``a`` shift-divides ``b`` when some strictly increasing column
map ``pi`` makes ``pi(a)`` an ordinary divisor of ``b``.  The decision
procedure matches the support columns of ``a`` greedily into those of
``b``; a match is only usable when the partial map still extends to a
strictly increasing self-map of the positive integers, which is exactly
the constructibility check of :class:`~shiftgb.core.ShiftMap`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Tuple, Union

from .core import Monomial, ShiftMap, monomial_key

__all__ = [
    "DivisibilityWitness",
    "FinalSegmentBasis",
    "pi_divides",
    "pi_divides_diagonal",
    "in_final_segment",
    "minimalize",
    "is_antichain",
]


@dataclass(frozen=True)
class DivisibilityWitness:
    """Certificate that ``cofactor * shift(a) == b`` for the queried pair."""

    shift: ShiftMap
    cofactor: Monomial


def _dominates(big: Tuple[Tuple[int, int], ...], small: Tuple[Tuple[int, int], ...]) -> bool:
    """Componentwise comparison of per-column (row, exp) profiles."""
    have = dict(big)
    return all(have.get(row, 0) >= e for row, e in small)


def pi_divides(a: Monomial, b: Monomial) -> Optional[DivisibilityWitness]:
    """Witness for shift-divisibility of ``a`` into ``b``, or ``None``.

    Greedy leftmost matching of ``a``'s support columns into ``b``'s: each
    column takes the earliest candidate that dominates its exponent profile
    and leaves room for the skipped columns in between.  If a successful
    matching exists at all, the greedy one succeeds (any match can be pushed
    left column by column), so ``None`` is a proof of non-divisibility.
    """
    blocks_a = a.column_blocks()
    blocks_b = b.column_blocks()
    matches: list[Tuple[int, int]] = []
    j = 0
    for col, profile in blocks_a:
        if matches:
            prev_c, prev_m = matches[-1]
            lower = prev_m + (col - prev_c)
        else:
            lower = col
        while j < len(blocks_b):
            cand, cand_profile = blocks_b[j]
            j += 1
            if cand < lower:
                continue
            if _dominates(cand_profile, profile):
                matches.append((col, cand))
                break
        else:
            return None
    shift = _tight_witness(matches)
    cofactor = b.div(a.apply(shift))
    return DivisibilityWitness(shift, cofactor)


def _tight_witness(matches: list[Tuple[int, int]]) -> ShiftMap:
    """Extend the matched columns over the full range ``1..c_max``.

    Unmatched columns are pinned as late as possible below the next matched
    image, so the witness moves the whole prefix along with its anchor
    instead of leaving low columns behind.
    """
    if not matches:
        return ShiftMap.identity()
    pairs: dict[int, int] = dict(matches)
    nxt_c, nxt_m = matches[-1]
    for col in range(matches[-1][0], 0, -1):
        if col in pairs:
            nxt_c, nxt_m = col, pairs[col]
        else:
            pairs[col] = nxt_m - (nxt_c - col)
    return ShiftMap.from_pairs(pairs)


def pi_divides_diagonal(a: Monomial, b: Monomial) -> Optional[DivisibilityWitness]:
    """Shift-divisibility with the map applied to both indices.

    Monomials are reinterpreted over the unbounded grid, and ``pi`` sends
    ``x[i,j]`` to ``x[pi(i), pi(j)]``.  Decided by enumerating increasing
    maps from ``a``'s index support into ``b``'s; returns the first witness
    in lexicographic order.
    """
    support_a = sorted(
        {row for (_, row), _ in a.exps} | {col for (col, _), _ in a.exps}
    )
    support_b = sorted(
        {row for (_, row), _ in b.exps} | {col for (col, _), _ in b.exps}
    )
    if not support_a:
        return DivisibilityWitness(ShiftMap.identity(), b)
    if len(support_a) > len(support_b):
        return None
    for image in combinations(support_b, len(support_a)):
        try:
            shift = ShiftMap.from_pairs(zip(support_a, image))
        except ValueError:
            continue
        shifted = a.apply_diagonal(shift)
        if shifted.divides(b):
            return DivisibilityWitness(shift, b.div(shifted))
    return None


@dataclass(frozen=True)
class FinalSegmentBasis:
    """Generators of an upward-closed set, pairwise incomparable."""

    generators: Tuple[Monomial, ...]


BasisLike = Union[FinalSegmentBasis, Iterable[Monomial]]


def _generators(basis: BasisLike) -> Tuple[Monomial, ...]:
    if isinstance(basis, FinalSegmentBasis):
        return basis.generators
    return tuple(basis)


def in_final_segment(m: Monomial, basis: BasisLike) -> bool:
    """True when some generator shift-divides ``m``."""
    return any(pi_divides(g, m) is not None for g in _generators(basis))


def minimalize(basis: Iterable[Monomial]) -> FinalSegmentBasis:
    """Smallest generating set of the same final segment.

    Divisibility coarsens the shift order, so scanning in increasing order
    lets every member be tested against the survivors only.
    """
    mons = sorted(set(basis), key=monomial_key)
    kept: list[Monomial] = []
    for m in mons:
        if not any(pi_divides(k, m) for k in kept):
            kept.append(m)
    return FinalSegmentBasis(tuple(kept))


def is_antichain(basis: Iterable[Monomial], diagonal: bool = False) -> bool:
    """No member shift-divides another (under the chosen action)."""
    mons = list(basis)
    divides = pi_divides_diagonal if diagonal else pi_divides
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            if i != j and divides(a, b) is not None:
                return False
    return True
