"""Brute-force oracles for best-ness and Witt arithmetic on small instances."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .bestform import _valuation_below_zero
from .errors import SearchSpaceTooLarge
from .scalars import _monomials
from .series import Series
from .witt import WittVec, frobenius, ghost, wadd, wneg, wsub

MAX_CANDIDATES = 10**6

WINDOW_NOTE = (
    "candidate b_i supported on exponents [ceil(v(a)/p^(i+1)), -1]: a b improving a "
    "has p*v(b) >= v(a), and nonnegative exponents only change b by W_s(O_L), "
    "which leaves the negative part of the valuation unchanged"
)


@dataclass(frozen=True)
class SearchBounds:
    """Window for candidate vectors b = (b_{s-1}, ..., b_0).

    Component b_i runs over sum_k c_k t^k with k in
    [ceil(min_valuation / p^(i+1)), max_exponent] and c_k polynomials over F_p
    of total degree <= ``degree`` in the p-basis.
    """

    p: int
    s: int
    r: int
    min_valuation: int
    max_exponent: int = -1
    degree: int = 2

    @classmethod
    def for_vector(cls, a, degree=2):
        v = _valuation_below_zero(a)
        return cls(a.p, a.s, a[0].field.r, v, -1, degree)

    def exponents(self, i):
        lo = -((-self.min_valuation) // self.p ** (i + 1))
        return range(lo, self.max_exponent + 1)

    def coefficient_count(self):
        return self.p ** len(_monomials(self.r, self.degree))

    def size(self):
        slots = sum(len(self.exponents(i)) for i in range(self.s))
        return self.coefficient_count() ** slots


@dataclass
class OracleResult:
    witness: WittVec | None
    improved_valuation: int | None
    original_valuation: int
    searched: int
    size: int
    note: str = WINDOW_NOTE

    @property
    def found(self):
        return self.witness is not None


def _coefficients(field, degree):
    """All F_p polynomials of total degree <= degree, in a fixed order."""
    mons = _monomials(field.r, degree)
    p = field.p
    out = []
    for digits in itertools.product(range(p), repeat=len(mons)):
        out.append(field.element({m: d for m, d in zip(mons, digits) if d}))
    return out


def brute_force_best(a, bounds=None):
    """First b (in lexicographic enumeration order) with v(a - (F-1)b) > v(a)."""
    if bounds is None:
        bounds = SearchBounds.for_vector(a)
    size = bounds.size()
    if size > MAX_CANDIDATES:
        raise SearchSpaceTooLarge(f"{size} candidates exceed the limit {MAX_CANDIDATES}")
    v = _valuation_below_zero(a)
    if v >= 0:
        return OracleResult(None, None, v, 0, size)
    field = a[0].field
    coeffs = _coefficients(field, bounds.degree)
    # slot order: position s-1 first, increasing exponent
    slots = [(i, k) for i in reversed(range(bounds.s)) for k in bounds.exponents(i)]
    searched = 0
    for choice in itertools.product(range(len(coeffs)), repeat=len(slots)):
        if not any(choice):
            continue
        searched += 1
        terms = [dict() for _ in range(bounds.s)]
        for (i, k), c in zip(slots, choice):
            if c:
                terms[i][k] = coeffs[c]
        b = WittVec(a.p, [Series.from_dict(field, terms[i]) for i in reversed(range(bounds.s))])
        w = _valuation_below_zero(wsub(a, wsub(frobenius(b), b)))
        if w > v:
            return OracleResult(b, w, v, searched, size)
    return OracleResult(None, None, v, searched, size)


@dataclass
class GhostReport:
    p: int
    s: int
    trials: int
    add_failures: int
    neg_failures: int

    @property
    def ok(self):
        return self.add_failures == 0 and self.neg_failures == 0


def ghost_check(trials, p, s, bound=10**6, seed=0):
    """Ghost additivity and negation over integer vectors with entries in [-bound, bound]."""
    rng = random.Random(f"ghost-{p}-{s}-{seed}")
    add_bad = neg_bad = 0
    for _ in range(trials):
        x = WittVec.from_standard(p, [rng.randint(-bound, bound) for _ in range(s)])
        y = WittVec.from_standard(p, [rng.randint(-bound, bound) for _ in range(s)])
        gx, gy = ghost(x), ghost(y)
        if ghost(wadd(x, y)) != tuple(u + w for u, w in zip(gx, gy)):
            add_bad += 1
        if ghost(wneg(x)) != tuple(-u for u in gx):
            neg_bad += 1
    return GhostReport(p, s, trials, add_bad, neg_bad)


def search_size_estimate(bounds):
    """log10 of the candidate count, for reporting."""
    return math.log10(max(bounds.size(), 1))
