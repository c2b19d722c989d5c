"""Classical finite-variable Groebner engine, truncations, and stabilization.

The classical engine is the independent check for the equivariant
completion: truncating an invariant ideal to columns ``<= n`` gives an
ordinary ideal in finitely many variables, where reduced Groebner bases are
unique and comparable.  The same engine accepts alternative monomial keys,
which the model layer uses for saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .core import Monomial, Polynomial, ShiftMap, compress, monomial_key
from .gb import GeneratorSet

__all__ = [
    "TruncatedIdeal",
    "Chain",
    "StabilizationReport",
    "classical_reduced_gb",
    "finite_buchberger",
    "shift_set",
    "orbit_generators",
    "ideal_equal",
    "detect_stabilization",
    "truncation_oracle_check",
]

MonomialKey = Callable[[Monomial], object]


@dataclass(frozen=True)
class TruncatedIdeal:
    """Generators in the subring of columns ``1..n`` with rows ``1..r``."""

    n: int
    ring_width: int
    gens: Tuple[Polynomial, ...]

    @staticmethod
    def make(n: int, ring_width: int, gens: Iterable[Polynomial]) -> "TruncatedIdeal":
        if n < 1 or ring_width < 1:
            raise ValueError("truncation level and ring width must be positive")
        kept = []
        for g in gens:
            if g.is_zero():
                continue
            if g.max_col() > n:
                raise ValueError(f"generator {g} exceeds column bound {n}")
            if g.max_row() > ring_width:
                raise ValueError(f"generator {g} exceeds ring width {ring_width}")
            kept.append(g)
        return TruncatedIdeal(n, ring_width, tuple(kept))


# ---------------------------------------------------------------------------
# Classical Buchberger on dict-backed polynomials with a pluggable key.
# ---------------------------------------------------------------------------


def _to_dict(f: Polynomial) -> Dict[Monomial, Fraction]:
    return dict(f.terms)


def _from_dict(d: Dict[Monomial, Fraction]) -> Polynomial:
    return Polynomial(tuple(sorted(d.items(), key=lambda t: monomial_key(t[0]), reverse=True)))


def _head(d: Dict[Monomial, Fraction], key: MonomialKey) -> Monomial:
    return max(d, key=key)


def _sub_scaled(
    d: Dict[Monomial, Fraction], e: Dict[Monomial, Fraction], coeff: Fraction, mono: Monomial
) -> None:
    """In place: ``d -= coeff * mono * e``."""
    for m, c in e.items():
        mm = m.mul(mono)
        nc = d.get(mm, Fraction(0)) - coeff * c
        if nc:
            d[mm] = nc
        else:
            d.pop(mm, None)


def _normal_form(
    d: Dict[Monomial, Fraction],
    gens: List[Tuple[Monomial, Dict[Monomial, Fraction]]],
    key: MonomialKey,
    full: bool = True,
) -> Dict[Monomial, Fraction]:
    work = dict(d)
    result: Dict[Monomial, Fraction] = {}
    while work:
        head = _head(work, key)
        coeff = work[head]
        hit = None
        for gh, gd in gens:
            if gh.divides(head):
                hit = (gh, gd)
                break
        if hit is None:
            if not full:
                result.update(work)
                return result
            result[head] = coeff
            del work[head]
            continue
        gh, gd = hit
        _sub_scaled(work, gd, coeff / gd[gh], head.div(gh))
    return result


def classical_reduced_gb(
    polys: Iterable[Polynomial], key: Optional[MonomialKey] = None
) -> Tuple[Polynomial, ...]:
    """Unique reduced Groebner basis under ``key`` (default: shift order).

    Monic, fully tail-reduced, sorted by leading monomial; independent of
    the generator order.
    """
    key = key or monomial_key
    gens: List[Tuple[Monomial, Dict[Monomial, Fraction]]] = []
    seeds = sorted(
        {f for f in polys if not f.is_zero()},
        key=lambda f: tuple((monomial_key(m), c) for m, c in f.terms),
    )
    for f in seeds:
        d = _to_dict(f)
        gens.append((_head(d, key), d))

    pairs = [(i, j) for i in range(len(gens)) for j in range(i + 1, len(gens))]
    while pairs:
        # normal selection: smallest lcm of the leading monomials first
        pairs.sort(key=lambda p: key(gens[p[0]][0].lcm(gens[p[1]][0])), reverse=True)
        i, j = pairs.pop()
        hi, di = gens[i]
        hj, dj = gens[j]
        if hi.coprime(hj):
            continue
        lcm = hi.lcm(hj)
        spoly: Dict[Monomial, Fraction] = {}
        _sub_scaled(spoly, di, Fraction(-1) / di[hi], lcm.div(hi))
        _sub_scaled(spoly, dj, Fraction(1) / dj[hj], lcm.div(hj))
        remainder = _normal_form(spoly, gens, key)
        if not remainder:
            continue
        head = _head(remainder, key)
        pairs.extend((k, len(gens)) for k in range(len(gens)))
        gens.append((head, remainder))

    # minimalize heads, then tail-reduce against the survivors
    kept: List[Tuple[Monomial, Dict[Monomial, Fraction]]] = []
    for h, d in sorted(gens, key=lambda g: key(g[0])):
        if not any(kh.divides(h) for kh, _ in kept):
            kept.append((h, d))
    out = []
    for idx, (h, d) in enumerate(kept):
        others = kept[:idx] + kept[idx + 1 :]
        nf = _normal_form(d, others, key) if others else dict(d)
        lead = nf[h]
        out.append(_from_dict({m: c / lead for m, c in nf.items()}))
    out.sort(key=lambda f: key(f.terms[0][0]))
    return tuple(out)


def finite_buchberger(ideal: TruncatedIdeal) -> TruncatedIdeal:
    """Reduced Groebner basis of the truncated ideal under the shift order."""
    return TruncatedIdeal(
        ideal.n, ideal.ring_width, classical_reduced_gb(ideal.gens)
    )


def shift_set(k: int, n: int) -> Tuple[ShiftMap, ...]:
    """All strictly increasing maps of ``[k]`` into ``[n]``; C(n, k) of them."""
    if k > n:
        raise ValueError(f"no increasing maps of [{k}] into [{n}]")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return tuple(
        ShiftMap.from_image(image) for image in combinations(range(1, n + 1), k)
    )


def orbit_generators(ideal: TruncatedIdeal, n: int) -> TruncatedIdeal:
    """All shifted copies of the generators landing in columns ``1..n``.

    Each generator is compressed to its support width ``w`` first, then
    moved by every increasing map of ``[w]`` into ``[n]``.  Symmetric-group
    invariant chains are covered by the same orbit: relabeling the columns
    of a fixed polynomial by a permutation realizes the same set of images.
    """
    if ideal.n > n:
        raise ValueError("orbit target must not shrink the truncation")
    out = []
    seen = set()
    for g in ideal.gens:
        gc, _ = compress(g)
        w = gc.max_col()
        if w > n:
            continue
        for pi in shift_set(w, n):
            img = gc.apply(pi)
            if img not in seen:
                seen.add(img)
                out.append(img)
    out.sort(key=lambda f: tuple((monomial_key(m), c) for m, c in f.terms))
    return TruncatedIdeal(n, ideal.ring_width, tuple(out))


def ideal_equal(a: TruncatedIdeal, b: TruncatedIdeal) -> bool:
    """Equality of ideals via their unique reduced bases."""
    if a.n != b.n or a.ring_width != b.ring_width:
        raise ValueError("ideals live in different truncated rings")
    return finite_buchberger(a).gens == finite_buchberger(b).gens


@dataclass(frozen=True)
class Chain:
    """Level-indexed family of truncated ideals, invariant under shifts."""

    provider: Callable[[int], TruncatedIdeal]
    invariance: str = "Pi"  # or "SymmetricGroup"
    name: str = ""


@dataclass(frozen=True)
class StabilizationReport:
    n0: Optional[int]
    verified_up_to: int
    levels: dict

    @property
    def stabilized(self) -> bool:
        return self.n0 is not None

    def to_json(self) -> dict:
        return {
            "stabilized": self.stabilized,
            "n0": self.n0,
            "verified_up_to": self.verified_up_to,
            "levels": self.levels,
        }


def detect_stabilization(chain: Chain, n_max: int) -> StabilizationReport:
    """Smallest level whose orbits already generate every later ideal.

    A candidate ``n0`` is accepted only when equality holds at every level in
    ``(n0, n_max]``, so at least one level beyond the candidate must lie
    inside the horizon; the report carries ``verified_up_to`` so callers can
    insist on a wider margin.
    """
    if n_max < 2:
        raise ValueError("need a horizon of at least 2 levels")
    levels = {n: chain.provider(n) for n in range(1, n_max + 1)}
    reduced = {n: finite_buchberger(levels[n]) for n in levels}

    # invariance spot-check: shifted generators of level n are members of n+1
    for n in range(1, n_max):
        lifted = orbit_generators(levels[n], n + 1)
        gb_next = [(g.terms[0][0], _to_dict(g)) for g in reduced[n + 1].gens]
        for g in lifted.gens:
            if _normal_form(_to_dict(g), gb_next, monomial_key):
                raise ValueError(
                    f"chain is not invariant: a shifted level-{n} generator "
                    f"is not a member of level {n + 1}"
                )

    def union_orbits(n0: int, n: int) -> TruncatedIdeal:
        gens: list[Polynomial] = []
        for k in range(1, n0 + 1):
            gens.extend(orbit_generators(levels[k], n).gens)
        return TruncatedIdeal(n, levels[n].ring_width, tuple(dict.fromkeys(gens)))

    def candidate_ok(n0: int) -> Tuple[bool, dict]:
        verdicts = {}
        ok = True
        for n in range(n0 + 1, n_max + 1):
            equal = finite_buchberger(union_orbits(n0, n)).gens == reduced[n].gens
            verdicts[n] = equal
            if not equal:
                ok = False
                break
        return ok, verdicts

    level_info = {
        n: {"generators": len(levels[n].gens), "reduced_basis": len(reduced[n].gens)}
        for n in levels
    }
    for n0 in range(1, n_max):
        ok, verdicts = candidate_ok(n0)
        if ok:
            if n0 + 1 <= n_max - 1:
                later_ok, _ = candidate_ok(n0 + 1)
                assert later_ok, "stabilization is monotone in the candidate level"
            return StabilizationReport(
                n0,
                n_max,
                {
                    "per_level": level_info,
                    "equal_at": {str(n): v for n, v in verdicts.items()},
                },
            )
    return StabilizationReport(None, n_max, {"per_level": level_info})


def truncation_oracle_check(
    eq_basis: GeneratorSet, input_gens: GeneratorSet, n: int
) -> bool:
    """Compare the truncations of two generating families at level ``n``.

    True when the reduced bases of the two orbit-generated ideals in columns
    ``1..n`` coincide; this certifies the equivariant completion against the
    classical engine on a finite window.
    """
    if eq_basis.ring_width != input_gens.ring_width:
        raise ValueError("generator sets live in different rings")
    r = eq_basis.ring_width

    def orbit(gs: GeneratorSet) -> TruncatedIdeal:
        # generators wider than the window contribute no shifted copies
        seed = TruncatedIdeal.make(
            n, r, [g for g in gs.gens if g.max_col() <= n]
        )
        return orbit_generators(seed, n)

    return finite_buchberger(orbit(eq_basis)).gens == finite_buchberger(orbit(input_gens)).gens
