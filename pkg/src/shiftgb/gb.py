"""Equivariant reduction and truncated completion for shift-invariant ideals.

Reduction rewrites the leading term of a polynomial by shifted multiples of
generators found through :func:`~shiftgb.divisibility.pi_divides`; the
leading monomials strictly decrease, so it terminates.  Completion schedules
S-polynomials over all relative placements of two generators' column
supports (anchored translations) and runs until a pass adds nothing new or
an explicit resource cap is hit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, NamedTuple, Optional, Tuple

from .core import Monomial, Polynomial, ShiftMap, compress, monomial_key
from .divisibility import pi_divides

__all__ = [
    "GeneratorSet",
    "ReductionStep",
    "ReductionTrace",
    "CompletionLimits",
    "CompletionStatus",
    "GBResult",
    "reduce",
    "interleavings",
    "s_polynomial",
    "equivariant_buchberger",
    "is_member",
    "spolynomials_reduce_to_zero",
]


@dataclass(frozen=True)
class GeneratorSet:
    """Generators in canonical form: compressed columns, monic leading terms."""

    ring_width: int
    gens: Tuple[Polynomial, ...]

    @staticmethod
    def make(ring_width: int, polys: Iterable[Polynomial]) -> "GeneratorSet":
        if ring_width < 1:
            raise ValueError("ring width must be positive")
        seen = set()
        normalized = []
        for f in polys:
            if f.is_zero():
                raise ValueError("generators must be nonzero")
            if f.max_row() > ring_width:
                raise ValueError(
                    f"generator {f} uses row {f.max_row()} beyond ring width {ring_width}"
                )
            g = compress(f.monic())[0]
            if g not in seen:
                seen.add(g)
                normalized.append(g)
        normalized.sort(key=_poly_sort_key)
        return GeneratorSet(ring_width, tuple(normalized))


def _poly_sort_key(f: Polynomial):
    return tuple((monomial_key(m), c) for m, c in f.terms)


class ReductionStep(NamedTuple):
    coeff: Fraction
    cofactor: Monomial
    shift: ShiftMap
    gen_index: int


@dataclass(frozen=True)
class ReductionTrace:
    """Record of one division run: input = remainder + sum of the steps."""

    steps: Tuple[ReductionStep, ...]
    remainder: Polynomial

    def reconstruct(self, gens: GeneratorSet) -> Polynomial:
        total = self.remainder
        for step in self.steps:
            g = gens.gens[step.gen_index]
            total = total + g.apply(step.shift).mul_term(step.coeff, step.cofactor)
        return total


def reduce(f: Polynomial, gens: GeneratorSet, full: bool = True) -> ReductionTrace:
    """Divide ``f`` by shifted generator multiples until the head sticks.

    With ``full`` the irreducible head moves to the remainder and division
    continues below it, so every remainder monomial ends up outside the
    final segment of the generators' leading monomials.
    """
    steps: list[ReductionStep] = []
    rem_terms: list[Tuple[Monomial, Fraction]] = []
    work = f
    prev_key = None
    while not work.is_zero():
        lead_mono, lead_coeff = work.terms[0]
        key = monomial_key(lead_mono)
        assert prev_key is None or key < prev_key, "leading monomials must descend"
        prev_key = key
        hit = None
        for idx, g in enumerate(gens.gens):
            witness = pi_divides(g.terms[0][0], lead_mono)
            if witness is not None:
                hit = (idx, g, witness)
                break
        if hit is None:
            if not full:
                break
            rem_terms.append((lead_mono, lead_coeff))
            work = work.tail()
            continue
        idx, g, witness = hit
        coeff = lead_coeff / g.terms[0][1]
        steps.append(ReductionStep(coeff, witness.cofactor, witness.shift, idx))
        work = work - g.apply(witness.shift).mul_term(coeff, witness.cofactor)
    remainder = Polynomial.from_terms(rem_terms) + work
    return ReductionTrace(tuple(steps), remainder)


@lru_cache(maxsize=None)
def interleavings(wg: int, wh: int) -> Tuple[Tuple[ShiftMap, ShiftMap], ...]:
    """All relative placements of a ``wg``- and a ``wh``-column support.

    Pairs of strictly increasing maps into ``[wg+wh]``, deduplicated up to
    simultaneous translation by anchoring the union of the images at 1.
    """
    if wg < 0 or wh < 0:
        raise ValueError("widths must be nonnegative")
    total = wg + wh
    out = []
    for a in combinations(range(1, total + 1), wg):
        for b in combinations(range(1, total + 1), wh):
            union = set(a) | set(b)
            if union and min(union) != 1:
                continue
            out.append((ShiftMap.from_image(a), ShiftMap.from_image(b)))
    return tuple(out)


def s_polynomial(
    g: Polynomial, h: Polynomial, sigma: ShiftMap, tau: ShiftMap
) -> Polynomial:
    """Classical S-polynomial of the shifted copies; leading terms cancel."""
    if g.is_zero() or h.is_zero():
        raise ValueError("S-polynomials need nonzero inputs")
    sg = g.apply(sigma)
    th = h.apply(tau)
    a_mono, a_coeff = sg.terms[0]
    b_mono, b_coeff = th.terms[0]
    lcm = a_mono.lcm(b_mono)
    return sg.mul_term(1, lcm.div(a_mono)) - th.mul_term(
        a_coeff / b_coeff, lcm.div(b_mono)
    )


class CompletionStatus(Enum):
    COMPLETED = "Completed"
    LIMIT_EXCEEDED = "LimitExceeded"


@dataclass(frozen=True)
class CompletionLimits:
    """Explicit resource caps; hitting one is a status, not an exception."""

    max_width: int
    max_degree: int
    max_passes: int

    def __post_init__(self):
        if min(self.max_width, self.max_degree, self.max_passes) < 1:
            raise ValueError("completion limits must be positive")


@dataclass(frozen=True)
class GBResult:
    basis: GeneratorSet
    status: CompletionStatus
    certificate: Optional[dict] = field(default=None)


def _schedule_keys(widths: list[int]) -> list[Tuple[int, int, int]]:
    keys = []
    for i in range(len(widths)):
        for j in range(i, len(widths)):
            for ell in range(len(interleavings(widths[i], widths[j]))):
                keys.append((i, j, ell))
    return keys


def equivariant_buchberger(
    gens: GeneratorSet, limits: CompletionLimits
) -> GBResult:
    """Worklist completion over the interleaving schedule.

    Every unordered basis pair is combined under every anchored placement of
    the two column supports; nonzero fully reduced remainders join the basis
    at the end of the pass (compressed, monic, sorted).  Pairs with coprime
    shifted heads are skipped.  The final basis is head-minimalized and
    tail-reduced, then sorted by leading monomial.
    """
    if not gens.gens:
        raise ValueError("completion needs at least one generator")
    basis: list[Polynomial] = list(gens.gens)
    processed: set[Tuple[int, int, int]] = set()
    status: Optional[CompletionStatus] = None

    for _pass in range(limits.max_passes):
        widths = [g.max_col() for g in basis]
        todo = [k for k in _schedule_keys(widths) if k not in processed]
        if not todo:
            status = CompletionStatus.COMPLETED
            break
        snapshot = GeneratorSet(gens.ring_width, tuple(basis))
        candidates: list[Polynomial] = []
        seen = set(basis)
        limit_hit = False
        for key in todo:
            i, j, ell = key
            sigma, tau = interleavings(widths[i], widths[j])[ell]
            processed.add(key)
            if i == j and sigma.pairs >= tau.pairs:
                # for a self-pair the swapped placement differs by sign only
                continue
            gi, gj = basis[i], basis[j]
            head_i = gi.terms[0][0].apply(sigma)
            head_j = gj.terms[0][0].apply(tau)
            if head_i.coprime(head_j):
                continue
            spoly = s_polynomial(gi, gj, sigma, tau)
            if spoly.is_zero():
                continue
            remainder = reduce(spoly, snapshot, full=True).remainder
            if remainder.is_zero():
                continue
            cand = compress(remainder.monic())[0]
            if cand in seen:
                continue
            if cand.max_col() > limits.max_width or cand.degree() > limits.max_degree:
                limit_hit = True
                continue
            seen.add(cand)
            candidates.append(cand)
        candidates.sort(key=_poly_sort_key)
        basis.extend(candidates)
        if limit_hit:
            status = CompletionStatus.LIMIT_EXCEEDED
            break
        if not candidates:
            status = CompletionStatus.COMPLETED
            break

    if status is None:
        widths = [g.max_col() for g in basis]
        pending = [k for k in _schedule_keys(widths) if k not in processed]
        status = (
            CompletionStatus.COMPLETED if not pending else CompletionStatus.LIMIT_EXCEEDED
        )

    reduced = _autoreduce(gens.ring_width, basis)
    return GBResult(GeneratorSet.make(gens.ring_width, reduced), status)


def _autoreduce(ring_width: int, basis: list[Polynomial]) -> list[Polynomial]:
    """Drop head-redundant generators, then fully reduce every tail."""
    unique = sorted(set(basis), key=_poly_sort_key)
    kept: list[Polynomial] = []
    for g in unique:
        # heads arrive in increasing shift order, and divisibility coarsens
        # that order, so only already-kept heads can divide this one
        head = g.terms[0][0]
        if not any(pi_divides(h.terms[0][0], head) for h in kept):
            kept.append(g)
    final = []
    for idx, g in enumerate(kept):
        others = GeneratorSet(ring_width, tuple(kept[:idx] + kept[idx + 1 :]))
        if others.gens:
            reduced = reduce(g, others, full=True).remainder
        else:
            reduced = g
        if not reduced.is_zero():
            final.append(compress(reduced.monic())[0])
    final.sort(key=_poly_sort_key)
    return final


def is_member(f: Polynomial, result: GBResult) -> bool:
    """Ideal membership by full reduction; needs a completed basis."""
    if result.status is not CompletionStatus.COMPLETED:
        raise ValueError("membership requires a completed basis")
    return reduce(f, result.basis, full=True).remainder.is_zero()


def spolynomials_reduce_to_zero(gens: GeneratorSet) -> bool:
    """Re-run the schedule against the given basis; all remainders must vanish."""
    basis = list(gens.gens)
    widths = [g.max_col() for g in basis]
    for i, j, ell in _schedule_keys(widths):
        sigma, tau = interleavings(widths[i], widths[j])[ell]
        if i == j and sigma.pairs >= tau.pairs:
            continue
        head_i = basis[i].terms[0][0].apply(sigma)
        head_j = basis[j].terms[0][0].apply(tau)
        if head_i.coprime(head_j):
            continue
        spoly = s_polynomial(basis[i], basis[j], sigma, tau)
        if spoly.is_zero():
            continue
        if not reduce(spoly, gens, full=True).remainder.is_zero():
            return False
    return True
