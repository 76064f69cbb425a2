"""Brylinski valuation, best representatives and Swan conductors.

For ``a = (a_{s-1}, ..., a_0)`` in W_s(L) the Brylinski valuation is
``v(a) = min_i p^i v(a_i)``.  A vector is *best* when no Artin-Schreier-Witt
equivalent vector has larger valuation; this holds exactly when
``v(a) = v_log(da)``, and the Swan conductor of the class of a best vector
is ``max(0, -v(a))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoConvergence, PrecisionExhausted
from .forms import LogForm, vlog_clipped, witt_d
from .scalars import pth_root
from .series import INF, Series
from .witt import WittVec, frobenius, wadd, wsub


@dataclass(frozen=True)
class RelevanceReport:
    relevant_positions: frozenset
    relevance_length: int
    witt_valuation: int


@dataclass
class BestReduction:
    best: WittVec
    cofactor: WittVec
    steps: int
    trace: list = field(default_factory=list)  # (valuation, relevance length) per step


def _component_vals(a, bound=None):
    vals = []
    for i in range(a.s):
        c = a[i]
        if bound is None:
            vals.append(c.valuation())
        else:
            # p^i v(a_i) matters only when below ``bound``
            vals.append(c.valuation_clipped(-(-bound // a.p**i)))
    return vals


def witt_valuation(a):
    """min_i p^i v(a_i); +inf for the zero vector."""
    return min(a.p**i * v for i, v in enumerate(_component_vals(a)))


def _valuation_below_zero(a):
    """min(witt_valuation(a), 0), requiring components only to precision 0."""
    return min(a.p**i * v for i, v in enumerate(_component_vals(a, bound=0)))


def in_filtration(a, n):
    """Membership in F_n W_s(L) = {a : v(a) >= -n}."""
    return _valuation_below_zero(a) >= -n if n >= 0 else witt_valuation(a) >= -n


def relevance(a):
    """Positions i with v(a) = p^i v(a_i), and the relevance length."""
    v = witt_valuation(a)
    if v == INF:
        raise ValueError("relevance is undefined for the zero vector")
    return _relevance_from(a, v, _component_vals(a))


def _relevance_from(a, v, vals):
    pos = frozenset(i for i, vi in enumerate(vals) if vi != INF and a.p**i * vi == v)
    return RelevanceReport(pos, max(pos) + 1, v)


def is_best_length_one(x):
    """Best-ness of a single series: integral, or p does not divide v(x), or
    the leading coefficient is not a p-th power in l."""
    v = x.valuation_clipped(0)
    if v >= 0:
        return True
    if v % x.field.p:
        return True
    return pth_root(x.leading_coefficient()) is None


def is_best(a):
    """v(a) >= 0, or v(a) = v_log(da)."""
    v = _valuation_below_zero(a)
    if v >= 0:
        return True
    return vlog_clipped(witt_d(a), v + 1) == v


def is_best_by_positions(a):
    """Some relevant position holds a best length-one component."""
    v = _valuation_below_zero(a)
    if v >= 0:
        return True
    vals = _component_vals(a, bound=0)
    rel = _relevance_from(a, v, vals)
    return any(is_best_length_one(a[i]) for i in rel.relevant_positions)


def _single(a, j, value):
    field = value.field
    comps = [Series.zero(field)] * a.s
    comps[a.s - 1 - j] = value
    return WittVec(a.p, comps)


def iteration_cap(a):
    v = _valuation_below_zero(a)
    return 10 * a.s * abs(v) + 100


def reduce_to_best(a, max_steps=None):
    """Subtract (F-1)b steps until the vector is best.

    Each step picks the largest relevant position j, where the leading term
    c*t^v of a_j has p | v and c in l^p, and subtracts (F-1) of the vector
    carrying c^(1/p) t^(v/p) at position j.  Returns the best vector and the
    accumulated b with ``a = best + (F-1) b``.
    """
    field = a[0].field
    zero = WittVec(a.p, [Series.zero(field)] * a.s)
    cofactor = zero
    cap = iteration_cap(a) if max_steps is None else max_steps
    steps = 0
    trace = []
    while True:
        v = _valuation_below_zero(a)
        if v >= 0 or is_best(a):
            break
        if steps >= cap:
            raise NoConvergence(f"no best representative after {steps} steps")
        vals = _component_vals(a, bound=0)
        rel = _relevance_from(a, v, vals)
        trace.append((v, rel.relevance_length))
        j = max(rel.relevant_positions)
        aj = a[j]
        vj = vals[j]
        root = pth_root(aj.leading_coefficient())
        if vj % a.p or root is None:
            # contradicts the characterisation of non-best vectors
            raise PrecisionExhausted(
                f"position {j} is not reducible (v={vj}); precision too low to trust the test"
            )
        b = _single(a, j, Series.monomial(field, root, vj // a.p))
        a = wsub(a, wsub(frobenius(b), b))
        cofactor = wadd(cofactor, b)
        steps += 1
    return BestReduction(a, cofactor, steps, trace)


def swan_conductor(a):
    """Swan conductor of the Artin-Schreier-Witt class of a."""
    best = reduce_to_best(a).best
    return -_valuation_below_zero(best)


@dataclass(frozen=True)
class RefinedSwan:
    form: LogForm
    n: int
    m: int
    best: WittVec


def refined_swan(a):
    """d of a best representative, meaningful in F_n / F_{n//p} of forms."""
    best = reduce_to_best(a).best
    n = -_valuation_below_zero(best)
    if n < 1:
        raise ValueError("refined Swan conductor needs Swan conductor >= 1")
    return RefinedSwan(witt_d(best), n, n // a.p, best)
