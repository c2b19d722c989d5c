"""Seeded randomized checks of the order and divisibility laws.

These run the algebraic invariants on pseudorandom data: order axioms and
compatibility with the shift action, agreement of the greedy divisibility
decision with brute-force enumeration, and the good-sequence property of
long random monomial streams.  Each suite returns a list of violation
descriptions; empty means pass.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import List, Optional

from .core import Monomial, Ordering, ShiftMap, cmp_shift, compose_shifts
from .divisibility import pi_divides

__all__ = [
    "random_monomial",
    "random_shift",
    "brute_force_divides",
    "check_order_axioms",
    "check_divisibility_oracle",
    "check_good_sequences",
    "check_witness_composition",
]


def random_monomial(
    rng: random.Random,
    max_row: int = 3,
    max_col: int = 8,
    max_exp: int = 3,
    max_vars: int = 4,
) -> Monomial:
    count = rng.randint(0, max_vars)
    exps = {}
    for _ in range(count):
        row = rng.randint(1, max_row)
        col = rng.randint(1, max_col)
        exps[(row, col)] = rng.randint(1, max_exp)
    return Monomial.make(exps)


def random_shift(rng: random.Random, width: int = 4, spread: int = 4) -> ShiftMap:
    w = rng.randint(0, width)
    if w == 0:
        return ShiftMap.identity()
    image = sorted(rng.sample(range(1, w + spread + 1), w))
    # clamp so the fragment extends to an increasing self-map
    pairs = []
    prev_d = prev_i = 0
    for d, i in enumerate(image, start=1):
        i = max(i, d, prev_i + (d - prev_d))
        pairs.append((d, i))
        prev_d, prev_i = d, i
    return ShiftMap.from_pairs(pairs)


def brute_force_divides(a: Monomial, b: Monomial) -> bool:
    """Exhaustive search over increasing maps of a's support columns into b's.

    Independent of the greedy matcher: every placement is materialized as a
    shift (when one exists) and tested by plain monomial division.
    """
    cols_a = [col for col, _ in a.column_blocks()]
    cols_b = [col for col, _ in b.column_blocks()]
    if not cols_a:
        return True
    if len(cols_a) > len(cols_b):
        return False
    for image in combinations(cols_b, len(cols_a)):
        try:
            shift = ShiftMap.from_pairs(zip(cols_a, image))
        except ValueError:
            continue
        if a.apply(shift).divides(b):
            return True
    return False


def check_order_axioms(trials: int, seed: int, max_row: int = 3, max_col: int = 8) -> List[str]:
    """Total-order laws plus compatibility with multiplication and shifts."""
    rng = random.Random(seed)
    bad: List[str] = []
    one = Monomial.one()
    for t in range(trials):
        q = random_monomial(rng, max_row, max_col)
        q1 = random_monomial(rng, max_row, max_col)
        q2 = random_monomial(rng, max_row, max_col)
        pi = random_shift(rng)
        c12, c21 = cmp_shift(q1, q2), cmp_shift(q2, q1)
        if c12 != -c21:
            bad.append(f"trial {t}: comparison is not antisymmetric on {q1}, {q2}")
        if (c12 is Ordering.EQUAL) != (q1 == q2):
            bad.append(f"trial {t}: equality disagrees with comparison on {q1}, {q2}")
        a, b, c = sorted([q, q1, q2], key=lambda m: m.exps)
        if not (cmp_shift(a, b) <= 0 and cmp_shift(b, c) <= 0 and cmp_shift(a, c) <= 0):
            bad.append(f"trial {t}: transitivity broken on {a}, {b}, {c}")
        # products only grow, and 1 is the least monomial
        if cmp_shift(q2, q1.mul(q2)) is Ordering.GREATER:
            bad.append(f"trial {t}: {q2} exceeds its multiple {q1.mul(q2)}")
        if cmp_shift(one, q) is Ordering.GREATER:
            bad.append(f"trial {t}: 1 is not minimal against {q}")
        # shifts only grow
        if cmp_shift(q, q.apply(pi)) is Ordering.GREATER:
            bad.append(f"trial {t}: shift decreased {q}")
        # strict compatibility with the action and multiplication
        if q1 != q2:
            lo, hi = (q1, q2) if c12 is Ordering.LESS else (q2, q1)
            img_lo = q.mul(lo.apply(pi))
            img_hi = q.mul(hi.apply(pi))
            if cmp_shift(img_lo, img_hi) is not Ordering.LESS:
                bad.append(
                    f"trial {t}: action broke strict order on {lo} < {hi} via {pi}"
                )
        if len(bad) > 20:
            break
    return bad


def check_divisibility_oracle(
    trials: int, seed: int, max_row: int = 3, max_col: int = 8
) -> List[str]:
    """Greedy decision vs exhaustive enumeration, plus witness validity."""
    rng = random.Random(seed)
    bad: List[str] = []
    for t in range(trials):
        a = random_monomial(rng, max_row, max_col)
        b = random_monomial(rng, max_row, max_col, max_exp=4, max_vars=6)
        witness = pi_divides(a, b)
        expected = brute_force_divides(a, b)
        if (witness is not None) != expected:
            bad.append(f"trial {t}: greedy={witness is not None} brute={expected} on {a} | {b}")
            continue
        if witness is not None:
            if witness.cofactor.mul(a.apply(witness.shift)) != b:
                bad.append(f"trial {t}: witness identity fails on {a} | {b}")
        if len(bad) > 20:
            break
    return bad


def check_good_sequences(
    sequences: int,
    length: int,
    seed: int,
    max_row: int = 3,
    max_col: int = 5,
) -> List[str]:
    """Every long random sequence contains a pair m_i dividing m_j (i < j)."""
    rng = random.Random(seed)
    bad: List[str] = []
    for s in range(sequences):
        mons = [
            random_monomial(rng, max_row, max_col, max_exp=2, max_vars=3)
            for _ in range(length)
        ]
        found = False
        for i in range(length):
            for j in range(i + 1, length):
                if pi_divides(mons[i], mons[j]) is not None:
                    found = True
                    break
            if found:
                break
        if not found:
            bad.append(f"sequence {s}: no comparable pair in {length} monomials")
    return bad


def check_witness_composition(trials: int, seed: int) -> List[str]:
    """Transitivity with composed witnesses: a | b | c gives a | c."""
    rng = random.Random(seed)
    bad: List[str] = []
    for t in range(trials):
        a = random_monomial(rng, 2, 4, max_exp=2, max_vars=2)
        q1 = random_monomial(rng, 2, 4, max_exp=2, max_vars=2)
        q2 = random_monomial(rng, 2, 4, max_exp=2, max_vars=2)
        p1 = random_shift(rng, 3, 3)
        p2 = random_shift(rng, 3, 3)
        b = q1.mul(a.apply(p1))
        c = q2.mul(b.apply(p2))
        w1 = pi_divides(a, b)
        w2 = pi_divides(b, c)
        if w1 is None or w2 is None:
            bad.append(f"trial {t}: constructed divisibility not found")
            continue
        composed = compose_shifts(w2.shift, w1.shift)
        if not a.apply(composed).divides(c):
            bad.append(f"trial {t}: composed witness does not certify {a} | {c}")
        if len(bad) > 20:
            break
    return bad
