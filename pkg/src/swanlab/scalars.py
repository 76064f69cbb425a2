"""Exact arithmetic in the residue fields F_p(b_1, ..., b_r).

Elements are reduced rational functions.  Polynomials are stored as dicts
mapping exponent tuples to coefficients in ``1..p-1``; the denominator is
made monic with respect to the graded lexicographic order, so equal
elements have identical representations.  ``r = 0`` gives the prime field
F_p itself, which is perfect; for ``r >= 1`` the variables form a p-basis.
"""

from __future__ import annotations

import heapq
import os
from functools import reduce

from .errors import CapExceeded, DivisionByZero

try:  # fast multivariate gcd and division; pure Python is the fallback
    import flint
except ImportError:  # pragma: no cover
    flint = None

MAX_P = int(os.environ.get("SWANLAB_MAX_P", 7))
MAX_R = 2
MAX_DEGREE = 64

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


def _is_prime(n):
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n**0.5) + 1))


# -- polynomial helpers on {exponent tuple: coefficient} dicts -------------


def _grlex(e):
    return (sum(e), e)


def _lead(P):
    return max(P, key=_grlex)


def _padd(P, Q, p):
    if len(P) < len(Q):
        P, Q = Q, P
    R = dict(P)
    for e, c in Q.items():
        v = (R.get(e, 0) + c) % p
        if v:
            R[e] = v
        else:
            R.pop(e, None)
    return R


def _pneg(P, p):
    return {e: p - c for e, c in P.items()}


def _psub(P, Q, p):
    return _padd(P, _pneg(Q, p), p)


def _pscale(P, c, p):
    c %= p
    if not c:
        return {}
    if c == 1:
        return P
    return {e: (v * c) % p for e, v in P.items()}


def _pmul(P, Q, p):
    if not P or not Q:
        return {}
    if len(P) == 1:
        (e0, c0), = P.items()
        if not any(e0):
            return _pscale(Q, c0, p)
    if len(Q) == 1:
        (e0, c0), = Q.items()
        if not any(e0):
            return _pscale(P, c0, p)
    if len(P) * len(Q) > _KRONECKER_TERMS:
        r = len(next(iter(P)))
        if flint is not None and r:
            return _from_flint(_to_flint(P, p, r) * _to_flint(Q, p, r))
        return _pmul_kronecker(P, Q, p)
    R = {}
    for e1, c1 in P.items():
        for e2, c2 in Q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            R[e] = R.get(e, 0) + c1 * c2
    return {e: c % p for e, c in R.items() if c % p}


_KRONECKER_TERMS = 400


def _pmul_kronecker(P, Q, p):
    # pack both into big integers, one byte-aligned slot per monomial
    r = len(next(iter(P)))
    dims = [max(e[v] for e in P) + max(e[v] for e in Q) + 1 for v in range(r)]
    strides = [1] * r
    for v in range(r - 2, -1, -1):
        strides[v] = strides[v + 1] * dims[v + 1]
    nslots = strides[0] * dims[0] if r else 1
    width = ((min(len(P), len(Q)) * (p - 1) ** 2).bit_length() + 7) // 8

    def pack(D):
        buf = bytearray(nslots * width)
        for e, c in D.items():
            buf[sum(x * st for x, st in zip(e, strides)) * width] = c
        return int.from_bytes(buf, "little")

    raw = (pack(P) * pack(Q)).to_bytes(nslots * width, "little")
    out = {}
    for k in range(nslots):
        c = int.from_bytes(raw[k * width:(k + 1) * width], "little") % p
        if c:
            e = []
            rem = k
            for st in strides:
                e.append(rem // st)
                rem %= st
            out[tuple(e)] = c
    return out


def _pdivexact(P, Q, p):
    """Quotient of P by Q; Q must divide P exactly."""
    if len(Q) == 1:
        (eq, cq), = Q.items()
        inv = pow(cq, -1, p)
        out = {}
        for e, c in P.items():
            d = tuple(x - y for x, y in zip(e, eq))
            if min(d, default=0) < 0:
                raise ArithmeticError("inexact polynomial division")
            out[d] = (c * inv) % p
        return out
    r = len(next(iter(Q)))
    if r == 1:
        return _udivexact(P, Q, p)
    if flint is not None and P:
        q, rem = divmod(_to_flint(P, p, r), _to_flint(Q, p, r))
        if rem != 0:
            raise ArithmeticError("inexact polynomial division")
        return _from_flint(q)
    lq = _lead(Q)
    inv = pow(Q[lq], -1, p)
    rest = [(e, c) for e, c in Q.items() if e != lq]
    R = dict(P)
    heap = [(-sum(e), tuple(-x for x in e)) for e in R]
    heapq.heapify(heap)
    out = {}
    while R:
        # leading remaining term in grlex order (heap keys may be stale)
        while True:
            _, neg = heapq.heappop(heap)
            lr = tuple(-x for x in neg)
            if lr in R:
                break
        d = tuple(x - y for x, y in zip(lr, lq))
        if min(d, default=0) < 0:
            raise ArithmeticError("inexact polynomial division")
        c = (R.pop(lr) * inv) % p
        out[d] = c
        for e2, c2 in rest:
            e = tuple(x + y for x, y in zip(d, e2))
            v = (R.get(e, 0) - c * c2) % p
            if v:
                if e not in R:
                    heapq.heappush(heap, (-sum(e), tuple(-x for x in e)))
                R[e] = v
            else:
                R.pop(e, None)
    return out


def _udivexact(P, Q, p):
    # dense long division for one variable
    if not P:
        return {}
    a = _to_dense(P)
    b = _to_dense(Q)
    m = len(b) - 1
    inv = pow(b[m], -1, p)
    q = [0] * max(len(a) - m, 0)
    for k in range(len(a) - 1 - m, -1, -1):
        c = (a[k + m] * inv) % p
        if c:
            q[k] = c
            for j in range(m + 1):
                a[k + j] = (a[k + j] - c * b[j]) % p
    if any(a[:m]):
        raise ArithmeticError("inexact polynomial division")
    return {(k,): c for k, c in enumerate(q) if c}


def _monic(P, p):
    if not P:
        return P
    return _pscale(P, pow(P[_lead(P)], -1, p), p)


def _ugcd(A, B, p):
    # dense univariate lists, low degree first
    def trim(a):
        while a and not a[-1]:
            a.pop()
        return a

    a, b = trim(list(A)), trim(list(B))
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = (a[-1] * inv) % p
            shift = len(a) - len(b)
            for i, v in enumerate(b):
                a[shift + i] = (a[shift + i] - c * v) % p
            trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _to_dense(P):
    n = max(e[0] for e in P) + 1
    out = [0] * n
    for (k,), c in P.items():
        out[k] = c
    return out


def _split_last(P):
    out = {}
    for e, c in P.items():
        out.setdefault(e[-1], {})[e[:-1]] = c
    return out


def _join_last(S):
    return {e + (k,): c for k, poly in S.items() for e, c in poly.items()}


_FLINT_CTX = {}


def _flint_ctx(p, r):
    key = (p, r)
    if key not in _FLINT_CTX:
        _FLINT_CTX[key] = flint.nmod_mpoly_ctx.get(tuple(f"x{i}" for i in range(r)), modulus=p)
    return _FLINT_CTX[key]


def _to_flint(P, p, r):
    return _flint_ctx(p, r).from_dict(P)


def _from_flint(F):
    return {tuple(int(x) for x in e): int(c) for e, c in F.to_dict().items()}


def _pgcd(P, Q, p, r):
    """Monic gcd of two polynomials in r variables over F_p."""
    if not P:
        return _monic(Q, p)
    if not Q:
        return _monic(P, p)
    if r == 0:
        return {(): 1}
    if r == 1:
        g = _ugcd(_to_dense(P), _to_dense(Q), p)
        return _monic({(k,): c for k, c in enumerate(g) if c}, p)
    if flint is not None:
        return _monic(_from_flint(_to_flint(P, p, r).gcd(_to_flint(Q, p, r))), p)
    return _pgcd_prs(P, Q, p, r)


def _pgcd_prs(P, Q, p, r):
    """Pure-Python gcd by primitive remainder sequences in the last variable."""
    return _monic(_join_last(_rgcd(_split_last(P), _split_last(Q), p, r - 1)), p)


def _content(S, p, r):
    return reduce(lambda g, c: _pgcd(g, c, p, r), S.values(), {})


def _primitive(S, p, r):
    c = _content(S, p, r)
    return {k: _pdivexact(v, c, p) for k, v in S.items()}


def _rgcd(A, B, p, r):
    # A, B: {degree in last variable: polynomial in r variables}
    c = _pgcd(_content(A, p, r), _content(B, p, r), p, r)
    A, B = _primitive(A, p, r), _primitive(B, p, r)
    if max(A) < max(B):
        A, B = B, A
    while B:
        db = max(B)
        lb = B[db]
        R = A
        while R and max(R) >= db:
            dr = max(R)
            lr = R[dr]
            R = {k: _pmul(lb, v, p) for k, v in R.items()}
            for k, v in B.items():
                t = _pmul(lr, v, p)
                key = k + dr - db
                R[key] = _psub(R.get(key, {}), t, p)
            R = {k: v for k, v in R.items() if v}
        A, B = B, (_primitive(R, p, r) if R else {})
    g = _primitive(A, p, r)
    return {k: _pmul(v, c, p) for k, v in g.items()}


# -- fields and elements ------------------------------------------------------


class ResidueField:
    """The field F_p(b_1, ..., b_r) with p-basis b_1, ..., b_r."""

    def __init__(self, p, names=()):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p > MAX_P:
            raise CapExceeded(f"p = {p} exceeds the configured cap {MAX_P}")
        names = tuple(names)
        if len(names) > MAX_R:
            raise CapExceeded(f"p-basis size {len(names)} exceeds {MAX_R}")
        self.p = p
        self.names = names
        self.r = len(names)
        self._unit = (0,) * self.r
        self.zero = ResidueElem(self, {}, None)
        self.one = ResidueElem(self, {self._unit: 1}, None)
        self._consts = [self.zero] + [
            ResidueElem(self, {self._unit: c}, None) for c in range(1, p)
        ]

    def __eq__(self, other):
        return isinstance(other, ResidueField) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self):
        return hash((self.p, self.r))

    def __repr__(self):
        if not self.r:
            return f"GF({self.p})"
        return f"GF({self.p})({', '.join(self.names)})"

    def gen(self, i=1):
        """The p-basis element b_i (1-based)."""
        if not 1 <= i <= self.r:
            raise IndexError(f"no p-basis element {i} in {self!r}")
        e = tuple(1 if j == i - 1 else 0 for j in range(self.r))
        return ResidueElem(self, {e: 1}, None)

    def gens(self):
        return tuple(self.gen(i) for i in range(1, self.r + 1))

    def const(self, c):
        return self._consts[c % self.p]

    def __call__(self, x):
        if isinstance(x, ResidueElem):
            if x.field != self:
                raise TypeError(f"{x!r} is not in {self!r}")
            return x
        return self.const(int(x))

    def element(self, num, den=None):
        """Build (and reduce) num/den from exponent-tuple dicts."""
        p = self.p
        num = {e: c % p for e, c in num.items() if c % p}
        if den is not None:
            den = {e: c % p for e, c in den.items() if c % p}
        return _normalize(self, num, den)

    def random_element(self, rng, degree=2, rational=False):
        num = _random_poly(self, rng, degree)
        if not rational:
            return ResidueElem(self, num, None) if num else self.zero
        den = _random_poly(self, rng, degree) or {self._unit: 1}
        return self.element(num, den)


PrimeField = ResidueField


def _random_poly(field, rng, degree):
    p, r = field.p, field.r
    out = {}
    for e in _monomials(r, degree):
        c = rng.randrange(p)
        if c:
            out[e] = c
    return out


def _monomials(r, degree):
    if r == 0:
        return [()]
    if r == 1:
        return [(k,) for k in range(degree + 1)]
    return [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]


def _normalize(field, num, den):
    p = field.p
    if den is not None and not den:
        raise DivisionByZero("zero denominator")
    if not num:
        return field.zero
    if den is None:
        return ResidueElem(field, num, None)
    if len(den) == 1:
        (e, c), = den.items()
        if not any(e):
            return ResidueElem(field, _pscale(num, pow(c, -1, p), p), None)
    g = _pgcd(num, den, p, field.r)
    if len(g) > 1 or any(next(iter(g))):
        num = _pdivexact(num, g, p)
        den = _pdivexact(den, g, p)
    inv = pow(den[_lead(den)], -1, p)
    num, den = _pscale(num, inv, p), _pscale(den, inv, p)
    if len(den) == 1 and not any(next(iter(den))):
        den = None
    return ResidueElem(field, num, den)


class ResidueElem:
    """A reduced element num/den of F_p(b_1, ..., b_r).

    ``den is None`` encodes the denominator 1.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den):
        self.field = field
        self.num = num
        self.den = den

    # -- predicates -----------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self):
        return self.den is None

    def is_constant(self):
        return self.den is None and (not self.num or (len(self.num) == 1 and not any(next(iter(self.num)))))

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.get(self.field._unit, 0)

    def degree(self):
        """Total degree of numerator and denominator, whichever is larger."""
        d = max((sum(e) for e in self.num), default=0)
        if self.den:
            d = max(d, max(sum(e) for e in self.den))
        return d

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ResidueElem):
            return other
        if isinstance(other, int):
            return self.field.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F, p = self.field, self.field.p
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den is None and other.den is None:
            num = _padd(self.num, other.num, p)
            return ResidueElem(F, num, None) if num else F.zero
        if self.den == other.den:
            return _normalize(F, _padd(self.num, other.num, p), self.den)
        d1 = self.den or {F._unit: 1}
        d2 = other.den or {F._unit: 1}
        num = _padd(_pmul(self.num, d2, p), _pmul(other.num, d1, p), p)
        return _normalize(F, num, _pmul(d1, d2, p))

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        return ResidueElem(self.field, _pneg(self.num, self.field.p), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F, p = self.field, self.field.p
        if not self.num or not other.num:
            return F.zero
        if self.den is None and other.den is None:
            return ResidueElem(F, _pmul(self.num, other.num, p), None)
        d1 = self.den or {F._unit: 1}
        d2 = other.den or {F._unit: 1}
        return _normalize(F, _pmul(self.num, other.num, p), _pmul(d1, d2, p))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return _normalize(self.field, self.den or {self.field._unit: 1}, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.field.one
        p = self.field.p
        if self.den is None and len(self.num) == 1:
            (e, c), = self.num.items()
            return ResidueElem(self.field, {tuple(x * n for x in e): pow(c, n, p)}, None)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self):
        """x^p, computed by scaling exponents (coefficients lie in F_p)."""
        p = self.field.p
        num = {tuple(x * p for x in e): c for e, c in self.num.items()}
        den = None if self.den is None else {tuple(x * p for x in e): c for e, c in self.den.items()}
        return ResidueElem(self.field, num, den)

    # -- comparison and display -----------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.const(other)
        if not isinstance(other, ResidueElem):
            return NotImplemented
        return self.num == other.num and self.den == other.den and self.field == other.field

    def __hash__(self):
        den = None if self.den is None else frozenset(self.den.items())
        return hash((frozenset(self.num.items()), den))

    def __repr__(self):
        return f"ResidueElem({self})"

    def __str__(self):
        names = self.field.names
        num = _poly_str(self.num, names)
        if self.den is None:
            return num
        if len(self.num) > 1:
            num = f"({num})"
        den = _poly_str(self.den, names)
        if len(self.den) > 1 or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def term_count(self):
        return len(self.num)


def _poly_str(P, names):
    if not P:
        return "0"
    terms = []
    for e in sorted(P, key=_grlex, reverse=True):
        c = P[e]
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        if not factors:
            terms.append(str(c))
        elif c == 1:
            terms.append("*".join(factors))
        else:
            terms.append(f"{c}*" + "*".join(factors))
    return "+".join(terms)


# -- p-th roots and derivatives --------------------------------------------------


def pth_root(x):
    """Return y with y^p = x if x lies in l^p, else None.

    In reduced form x is a p-th power exactly when every exponent of the
    numerator and denominator is divisible by p.
    """
    p = x.field.p
    if not x.num:
        return x
    polys = [x.num] if x.den is None else [x.num, x.den]
    if any(k % p for P in polys for e in P for k in e):
        return None
    num = {tuple(k // p for k in e): c for e, c in x.num.items()}
    den = None if x.den is None else {tuple(k // p for k in e): c for e, c in x.den.items()}
    return ResidueElem(x.field, num, den)


def is_pth_power(x):
    return pth_root(x) is not None


def _pderiv(P, i, p):
    out = {}
    for e, c in P.items():
        k = e[i]
        v = (k * c) % p
        if v:
            out[e[:i] + (k - 1,) + e[i + 1:]] = v
    return out


def partial_derivative(x, var):
    """d x / d b_var for the 1-based p-basis index ``var``."""
    F, p = x.field, x.field.p
    if not 1 <= var <= F.r:
        raise IndexError(f"p-basis index {var} out of range 1..{F.r}")
    i = var - 1
    if x.den is None:
        num = _pderiv(x.num, i, p)
        return ResidueElem(F, num, None) if num else F.zero
    n, d = x.num, x.den
    num = _psub(_pmul(_pderiv(n, i, p), d, p), _pmul(n, _pderiv(d, i, p), p), p)
    return _normalize(F, num, _pmul(d, d, p))


def check_degree(x, cap=MAX_DEGREE):
    if x.degree() > cap:
        raise CapExceeded(f"degree {x.degree()} of {x} exceeds the cap {cap}")
    return x


def default_names(r):
    """Conventional p-basis names: b for r = 1, b1 and b2 for r = 2."""
    return ((), ("b",), ("b1", "b2"))[r]
