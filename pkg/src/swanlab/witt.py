"""Witt vectors of finite length via universal sum and negation polynomials.

The polynomials are generated over the integers from the ghost recursion
``w_n(Z) = sum_{i<=n} p^i Z_i^(p^(n-i))`` and evaluated on components.
Storage uses standard coordinates ``x_0, ..., x_{s-1}``; the descending
ordering ``a = (a_{s-1}, ..., a_0)`` used elsewhere in the package is the
same tuple, indexed from the right: ``a_i = x_{s-1-i}``.  Over rings of
characteristic p the polynomial coefficients are reduced mod p.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from functools import reduce

from .errors import CapExceeded

MAX_LENGTH = int(os.environ.get("SWANLAB_MAX_S", 4))
MAX_P = 7

_TABLES = {}
_LOCK = threading.Lock()


# -- integer polynomials as {exponent tuple: int} -------------------------------


def _iadd(P, Q, sign=1):
    R = dict(P)
    for e, c in Q.items():
        v = R.get(e, 0) + sign * c
        if v:
            R[e] = v
        else:
            R.pop(e, None)
    return R


def _imul(P, Q):
    R = {}
    for e1, c1 in P.items():
        for e2, c2 in Q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            R[e] = R.get(e, 0) + c1 * c2
    return {e: c for e, c in R.items() if c}


def _ipow(P, k, nvars):
    result = {(0,) * nvars: 1}
    base = P
    while k:
        if k & 1:
            result = _imul(result, base)
        k >>= 1
        if k:
            base = _imul(base, base)
    return result


def _var(i, nvars):
    return {tuple(1 if j == i else 0 for j in range(nvars)): 1}


@dataclass(frozen=True)
class WittPolyTable:
    """Universal Witt polynomials for one (p, s).

    ``sum_polys[n]`` lives in X_0..X_{s-1}, Y_0..Y_{s-1} (exponent tuples of
    length 2s); ``neg_polys[n]`` in X_0..X_{s-1}.
    """

    p: int
    s: int
    sum_polys: tuple
    neg_polys: tuple

    def reduced(self):
        """Coefficient lists reduced mod p, cached on first use."""
        cached = getattr(self, "_reduced", None)
        if cached is None:
            p = self.p
            red = lambda P: tuple((c % p, e) for e, c in sorted(P.items()) if c % p)
            cached = (tuple(red(P) for P in self.sum_polys), tuple(red(P) for P in self.neg_polys))
            object.__setattr__(self, "_reduced", cached)
        return cached


def _ghost_poly(Z, n, p, nvars):
    acc = {}
    for i in range(n + 1):
        acc = _iadd(acc, {e: c * p**i for e, c in _ipow(Z[i], p ** (n - i), nvars).items()})
    return acc


def _solve_recursion(target, n, p, known, nvars):
    # known = [Z_0..Z_{n-1}]; returns Z_n with w_n(Z) = target
    acc = dict(target)
    for i in range(n):
        acc = _iadd(acc, {e: c * p**i for e, c in _ipow(known[i], p ** (n - i), nvars).items()}, -1)
    q = p**n
    if any(c % q for c in acc.values()):
        raise ArithmeticError(f"non-integral Witt polynomial at p={p}, n={n}")
    return {e: c // q for e, c in acc.items()}


def gen_witt_polys(p, s):
    """Build (or fetch the cached) universal polynomial table for (p, s)."""
    if s < 1:
        raise ValueError("Witt length must be at least 1")
    if s > MAX_LENGTH:
        raise CapExceeded(f"Witt length {s} exceeds the configured cap {MAX_LENGTH}")
    if p > MAX_P:
        raise CapExceeded(f"p = {p} exceeds the configured cap {MAX_P}")
    key = (p, s)
    with _LOCK:
        if key in _TABLES:
            return _TABLES[key]
    nv = 2 * s
    X = [_var(i, nv) for i in range(s)]
    Y = [_var(s + i, nv) for i in range(s)]
    S = []
    for n in range(s):
        target = _iadd(_ghost_poly(X, n, p, nv), _ghost_poly(Y, n, p, nv))
        S.append(_solve_recursion(target, n, p, S, nv))
    Xn = [_var(i, s) for i in range(s)]
    N = []
    for n in range(s):
        target = {e: -c for e, c in _ghost_poly(Xn, n, p, s).items()}
        N.append(_solve_recursion(target, n, p, N, s))
    table = WittPolyTable(p, s, tuple(S), tuple(N))
    with _LOCK:
        _TABLES.setdefault(key, table)
        return _TABLES[key]


# -- vectors -------------------------------------------------------------------


class WittVec:
    """A length-s Witt vector, built from components a_{s-1}, ..., a_0.

    ``WittVec(p, [a_{s-1}, ..., a_0])``.  Components may be Series,
    ResidueElem or (for ghost checks over Z) plain integers.
    """

    __slots__ = ("p", "x")

    def __init__(self, p, components):
        self.p = p
        self.x = tuple(components)

    @classmethod
    def from_standard(cls, p, xs):
        v = cls.__new__(cls)
        v.p = p
        v.x = tuple(xs)
        return v

    @property
    def s(self):
        return len(self.x)

    @property
    def components(self):
        """Descending order (a_{s-1}, ..., a_0)."""
        return self.x

    def __getitem__(self, i):
        """Component a_i (= x_{s-1-i})."""
        if not 0 <= i < len(self.x):
            raise IndexError(i)
        return self.x[len(self.x) - 1 - i]

    def __add__(self, other):
        return wadd(self, other)

    def __sub__(self, other):
        return wsub(self, other)

    def __neg__(self):
        return wneg(self)

    def __repr__(self):
        return "WittVec(" + ", ".join(str(c) for c in self.components) + ")"

    def agrees_with(self, other):
        """Componentwise equality to common precision (exact for ints)."""
        if self.s != other.s:
            return False
        for a, b in zip(self.x, other.x):
            if hasattr(a, "agrees_with"):
                if not a.agrees_with(b):
                    return False
            elif a != b:
                return False
        return True


def _is_integer_vector(v):
    return all(isinstance(c, int) for c in v.x)


def _is_zero(c):
    if hasattr(c, "exact_zero"):
        return c.exact_zero
    return not c


class _Powers:
    """Lazily cached powers of one ring element."""

    def __init__(self, value, one):
        self.cache = {0: one, 1: value}
        self.value = value

    def __getitem__(self, k):
        c = self.cache
        if k not in c:
            top = max(j for j in c if j < k)
            acc = c[top]
            for j in range(top + 1, k + 1):
                acc = acc * self.value
                c[j] = acc
        return c[k]


def _one_like(c):
    if isinstance(c, int):
        return 1
    if hasattr(c, "coeffs"):
        from .series import Series

        return Series.one(c.field)
    return c.field.one


def _evaluate(terms, values, nx):
    """Evaluate polynomials given as (coeff, exponents) lists.

    The first ``nx`` variables form the "X part"; products of X powers are
    cached across terms, the remaining variables are typically sparse.
    """
    one = _one_like(values[0])
    live = [not _is_zero(v) for v in values]
    powers = [_Powers(v, one) for v in values]
    xpart = {}
    out = []
    for poly in terms:
        acc = None
        for coeff, e in poly:
            if any(k and not live[i] for i, k in enumerate(e)):
                continue
            ex = e[:nx]
            if ex not in xpart:
                xpart[ex] = reduce(
                    lambda a, b: a * b, (powers[i][k] for i, k in enumerate(ex) if k), one
                )
            term = xpart[ex]
            for i, k in enumerate(e[nx:], start=nx):
                if k:
                    term = term * powers[i][k]
            if coeff != 1:
                term = coeff * term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = 0 * one
        out.append(acc)
    return out


def _terms(p, s, which, integer):
    table = gen_witt_polys(p, s)
    if integer:
        polys = table.sum_polys if which == "sum" else table.neg_polys
        return [tuple((c, e) for e, c in sorted(P.items())) for P in polys]
    red = table.reduced()
    return red[0] if which == "sum" else red[1]


def wadd(a, b):
    if a.p != b.p or a.s != b.s:
        raise ValueError("Witt vectors of different type")
    integer = _is_integer_vector(a) and _is_integer_vector(b)
    terms = _terms(a.p, a.s, "sum", integer)
    return WittVec.from_standard(a.p, _evaluate(terms, a.x + b.x, a.s))


def wneg(a):
    integer = _is_integer_vector(a)
    terms = _terms(a.p, a.s, "neg", integer)
    return WittVec.from_standard(a.p, _evaluate(terms, a.x, a.s))


def wsub(a, b):
    return wadd(a, wneg(b))


def frobenius(a):
    """Componentwise p-th power; valid over rings of characteristic p."""
    out = []
    for c in a.x:
        if hasattr(c, "frobenius"):
            out.append(c.frobenius())
        else:
            out.append(c ** a.p)
    return WittVec.from_standard(a.p, out)


def witt_zero_like(a):
    return WittVec.from_standard(a.p, tuple(0 * c for c in a.x))


def ghost(a):
    """Ghost components w_n = sum_i p^i x_i^(p^(n-i)) of an integer vector."""
    p = a.p
    return tuple(sum(p**i * a.x[i] ** (p ** (n - i)) for i in range(n + 1)) for n in range(a.s))
