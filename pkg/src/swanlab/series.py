"""Truncated Laurent series over a residue field, with precision tracking.

A :class:`Series` stores coefficients for exponents ``start, start + 1, ...``
and an absolute precision ``prec``: coefficients at exponents ``>= prec`` are
unknown.  ``prec is None`` marks an exact Laurent polynomial; the exact zero
is the exact series with no coefficients.  A series whose known coefficients
all vanish but whose precision is finite has no determined valuation.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from contextvars import ContextVar

import numpy as np

from .errors import DivisionByZero, InvalidEmbedding, PrecisionExhausted
from .scalars import ResidueElem, ResidueField, _lead, _padd, _pdivexact, _pgcd, _pmul, _pneg, _pscale

INF = math.inf

DEFAULT_MIN_PRECISION = 8


def _env_precision():
    n = int(os.environ.get("SWANLAB_PRECISION", 64))
    if n < DEFAULT_MIN_PRECISION:
        raise ValueError(f"SWANLAB_PRECISION must be at least {DEFAULT_MIN_PRECISION}")
    return n


_PRECISION = ContextVar("swanlab_precision", default=_env_precision())


def default_precision():
    """Relative precision used when an exact series must be truncated."""
    return _PRECISION.get()


def set_default_precision(n):
    if n < DEFAULT_MIN_PRECISION:
        raise ValueError(f"precision must be at least {DEFAULT_MIN_PRECISION}")
    _PRECISION.set(n)


@contextmanager
def precision(n):
    """Temporarily use ``n`` as the default precision in this context."""
    if n < DEFAULT_MIN_PRECISION:
        raise ValueError(f"precision must be at least {DEFAULT_MIN_PRECISION}")
    token = _PRECISION.set(n)
    try:
        yield
    finally:
        _PRECISION.reset(token)


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Series:
    __slots__ = ("field", "start", "coeffs", "prec")

    def __init__(self, field, coeffs=(), start=0, prec=None):
        coeffs = list(coeffs)
        if prec is not None:
            del coeffs[max(prec - start, 0):]
        lo = 0
        while lo < len(coeffs) and not coeffs[lo]:
            lo += 1
        hi = len(coeffs)
        while hi > lo and not coeffs[hi - 1]:
            hi -= 1
        self.field = field
        self.coeffs = tuple(coeffs[lo:hi])
        if self.coeffs:
            self.start = start + lo
        else:
            self.start = prec if prec is not None else 0
        self.prec = prec

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_dict(cls, field, terms, prec=None):
        terms = {k: field(c) for k, c in terms.items() if field(c)}
        if not terms:
            return cls(field, (), 0, prec)
        lo, hi = min(terms), max(terms)
        return cls(field, [terms.get(k, field.zero) for k in range(lo, hi + 1)], lo, prec)

    @classmethod
    def monomial(cls, field, coeff, exponent, prec=None):
        return cls(field, (field(coeff),), exponent, prec)

    @classmethod
    def zero(cls, field, prec=None):
        return cls(field, (), 0, prec)

    @classmethod
    def one(cls, field):
        return cls(field, (field.one,), 0, None)

    @classmethod
    def gen(cls, field):
        """The uniformizer t."""
        return cls(field, (field.one,), 1, None)

    @classmethod
    def constant(cls, field, c):
        return cls(field, (field(c),), 0, None)

    # -- queries --------------------------------------------------------------

    @property
    def exact_zero(self):
        return not self.coeffs and self.prec is None

    @property
    def is_exact(self):
        return self.prec is None

    @property
    def low(self):
        """Smallest exponent that may carry a nonzero coefficient."""
        return self.start

    def valuation(self):
        if self.coeffs:
            return self.start
        if self.prec is None:
            return INF
        raise PrecisionExhausted(f"series vanishes to precision {self.prec}; valuation unknown")

    def valuation_clipped(self, bound):
        """min(valuation, bound), which needs precision only up to ``bound``."""
        if self.coeffs and self.start < bound:
            return self.start
        if self.coeffs or self.prec is None or self.prec >= bound:
            return bound
        raise PrecisionExhausted(f"valuation below {bound} undetermined at precision {self.prec}")

    def coefficient(self, k):
        if self.prec is not None and k >= self.prec:
            raise PrecisionExhausted(f"coefficient of t^{k} is beyond precision {self.prec}")
        i = k - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def leading_coefficient(self):
        self.valuation()
        return self.coeffs[0] if self.coeffs else self.field.zero

    def terms(self):
        """Nonzero (exponent, coefficient) pairs in increasing order."""
        return [(self.start + i, c) for i, c in enumerate(self.coeffs) if c]

    def is_polynomial_coefficients(self):
        return all(c.den is None for c in self.coeffs)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other):
        if isinstance(other, Series):
            if other.field != self.field:
                raise TypeError(f"cannot combine series over {self.field!r} and {other.field!r}")
            return other
        if isinstance(other, (int, ResidueElem)):
            return Series.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        prec = _pmin(self.prec, other.prec)
        if not other.coeffs:
            return self if prec == self.prec else self.truncate(prec)
        if not self.coeffs:
            return other if prec == other.prec else other.truncate(prec)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec)
        if hi <= lo:
            return Series(self.field, (), 0, prec)
        zero = self.field.zero
        out = [zero] * (hi - lo)
        for src in (self, other):
            off = src.start - lo
            for i, c in enumerate(src.coeffs):
                k = off + i
                if k >= len(out):
                    break
                if c:
                    out[k] = out[k] + c if out[k] else c
        return Series(self.field, out, lo, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.field, [-c for c in self.coeffs], self.start, self.prec)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        if self.exact_zero or other.exact_zero:
            return Series.zero(self.field)
        prec = _pmin(
            None if self.prec is None else self.prec + other.start,
            None if other.prec is None else other.prec + self.start,
        )
        start = self.start + other.start
        if not self.coeffs or not other.coeffs:
            return Series(self.field, (), start, prec)
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            n = min(n, prec - start)
        if n <= 0:
            return Series(self.field, (), start, prec)
        if len(other.coeffs) > len(self.coeffs):
            xs, ys = other.coeffs, self.coeffs
        else:
            xs, ys = self.coeffs, other.coeffs
        if sum(1 for c in ys if c) <= 2:
            return Series(self.field, _mul_sparse(self.field, xs, ys, n), start, prec)
        return Series(self.field, _mul_coeffs(self.field, xs, ys, n), start, prec)

    __rmul__ = __mul__

    def scale(self, c):
        """Multiply every coefficient by the residue element ``c``."""
        c = self.field(c)
        if not c:
            return Series.zero(self.field) if self.prec is None else Series(self.field, (), self.start, self.prec)
        return Series(self.field, [a * c for a in self.coeffs], self.start, self.prec)

    def shift(self, k):
        """Multiply by t^k."""
        return Series(self.field, self.coeffs, self.start + k, None if self.prec is None else self.prec + k)

    def truncate(self, prec):
        if prec is None or (self.prec is not None and self.prec <= prec):
            return self
        return Series(self.field, self.coeffs, self.start, prec)

    def inverse(self, prec=None):
        """Multiplicative inverse.

        A finite-precision input with valuation v and precision P gives
        precision P - 2v.  The inverse of an exact monomial is exact (cut at
        ``prec`` if given); other exact inputs are cut at ``prec`` when given,
        otherwise ``default_precision()`` slots above the valuation.
        """
        if self.exact_zero:
            raise DivisionByZero("inverse of the zero series")
        v = self.valuation()
        if self.prec is None and len(self.coeffs) == 1:
            return Series(self.field, (self.coeffs[0].inverse(),), -v, prec)
        out_prec = None if self.prec is None else self.prec - 2 * v
        if prec is not None:
            out_prec = _pmin(out_prec, prec)
        if out_prec is None:
            out_prec = -v + default_precision()
        n = out_prec + v
        if n <= 0:
            return Series(self.field, (), -v, out_prec)
        u = self.coeffs
        if len(u) == 1:
            return Series(self.field, (u[0].inverse(),), -v, out_prec)
        if self.field.r and not u[0].is_constant():
            return Series(self.field, _inverse_fraction_free(self.field, u, n), -v, out_prec)
        inv0 = u[0].inverse()
        w = [inv0]
        neg_inv0 = -inv0
        for k in range(1, n):
            acc = None
            for i in range(1, min(k, len(u) - 1) + 1):
                if u[i]:
                    term = u[i] * w[k - i]
                    acc = term if acc is None else acc + term
            w.append(acc * neg_inv0 if acc is not None else self.field.zero)
        return Series(self.field, w, -v, out_prec)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        vy = other.valuation()
        if other.prec is not None:
            return self * other.inverse()
        if self.prec is not None:
            return self * other.inverse(prec=self.prec - vy - self.start)
        vx = self.valuation() if not self.exact_zero else vy
        return self * other.inverse(prec=vx - vy + default_precision() - self.start)

    def __rtruediv__(self, other):
        return Series.constant(self.field, other) / self

    def frobenius(self):
        """x^p; precision scales by p since (x + e)^p = x^p + e^p."""
        p = self.field.p
        out = []
        zero = self.field.zero
        for i, c in enumerate(self.coeffs):
            if i:
                out.extend([zero] * (p - 1))
            out.append(c.frobenius())
        return Series(self.field, out, p * self.start, None if self.prec is None else p * self.prec)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            if self.exact_zero:
                return Series.one(self.field)
            return Series.one(self.field).truncate(None if self.prec is None else self.prec - self.start)
        p = self.field.p
        result = None
        base = self
        while n:
            d = n % p
            if d:
                piece = base
                for _ in range(d - 1):
                    piece = piece * base
                result = piece if result is None else result * piece
            n //= p
            if n:
                base = base.frobenius()
        return result

    def derivative_pieces(self):
        """Coefficientwise data for d: (partials per p-basis index, i*c_i series)."""
        from .scalars import partial_derivative

        F = self.field
        partials = [
            Series(F, [partial_derivative(c, lam) for c in self.coeffs], self.start, self.prec)
            for lam in range(1, F.r + 1)
        ]
        log_part = Series(F, [c * (self.start + i) for i, c in enumerate(self.coeffs)], self.start, self.prec)
        return partials, log_part

    # -- comparison and display ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self.field == other.field and self.start == other.start
                and self.coeffs == other.coeffs and self.prec == other.prec)

    def __hash__(self):
        return hash((self.start, self.coeffs, self.prec))

    def agrees_with(self, other):
        """True if the two series coincide up to their common precision."""
        d = self - other
        return not d.coeffs

    def to_expr(self, var="t"):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in self.terms():
            mono = "1" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if k == 0:
                s = str(c)
                parts.append(f"({s})" if c.term_count() > 1 and c.den is not None else s)
            elif c == 1:
                parts.append(mono)
            elif c.den is None and c.term_count() == 1:
                parts.append(f"{c}*{mono}")
            else:
                s = str(c)
                if c.den is None:
                    s = f"({s})"
                parts.append(f"{s}*{mono}")
        return "+".join(parts)

    def __str__(self):
        body = self.to_expr()
        if self.prec is None:
            return body
        if body == "0":
            return f"O(t^{self.prec})"
        return f"{body}+O(t^{self.prec})"

    def __repr__(self):
        return f"Series({self})"


def _mul_coeffs(field, xs, ys, n):
    if field.r <= 2 and all(c.den is None for c in xs) and all(c.den is None for c in ys):
        return _mul_kronecker(field, xs, ys, n)
    if field.r and len(xs) * len(ys) > 16:
        return _mul_rational(field, xs, ys, n)
    zero = field.zero
    out = [None] * n
    ny = len(ys)
    for i, a in enumerate(xs):
        if i >= n:
            break
        if not a:
            continue
        for j in range(min(ny, n - i)):
            b = ys[j]
            if b:
                t = a * b
                k = i + j
                out[k] = t if out[k] is None else out[k] + t
    return [zero if c is None else c for c in out]


def _common_denominator(field, coeffs):
    # lcm D of the denominators and the polynomial numerators c*D
    p, r = field.p, field.r
    D = {(0,) * r: 1}
    for c in coeffs:
        if c.den is not None:
            g = _pgcd(D, c.den, p, r)
            D = _pmul(D, _pdivexact(c.den, g, p), p)
    nums = []
    for c in coeffs:
        if not c:
            nums.append(field.zero)
        elif c.den is None:
            nums.append(ResidueElem(field, _pmul(c.num, D, p), None))
        else:
            nums.append(ResidueElem(field, _pmul(c.num, _pdivexact(D, c.den, p), p), None))
    return D, nums


def _mul_rational(field, xs, ys, n):
    # clear denominators, multiply polynomials, normalize each output once
    dx, px = _common_denominator(field, xs)
    dy, py = _common_denominator(field, ys)
    den = _pmul(dx, dy, field.p)
    return [field.element(c.num, den) if c else c for c in _mul_kronecker(field, px, py, n)]


def _inverse_fraction_free(field, u, n):
    # 1/u with w_k = W_k / u_0^(k+1) for polynomial W_k; each coefficient is
    # reduced once, and only against u_0 (gcd(W, u_0) = 1 means W/u_0^m is reduced)
    p, r = field.p, field.r
    unit = (0,) * r
    D, nums = _common_denominator(field, u[:n])
    u = [c.num for c in nums]
    u0 = u[0]
    pows = [{unit: 1}]
    W = [{unit: 1}]
    for k in range(1, n):
        while len(pows) < min(k, len(u) - 1):
            pows.append(_pmul(pows[-1], u0, p))
        acc = {}
        for i in range(1, min(k, len(u) - 1) + 1):
            if u[i]:
                acc = _padd(acc, _pmul(_pmul(u[i], W[k - i], p), pows[i - 1], p), p)
        W.append(_pneg(acc, p))
    out = []
    den = {unit: 1}
    for k in range(n):
        den = _pmul(den, u0, p)
        num = _pmul(W[k], D, p)
        if not num:
            out.append(field.zero)
        elif _pgcd(num, u0, p, r) == {unit: 1}:
            lead = pow(den[_lead(den)], -1, p)
            out.append(ResidueElem(field, _pscale(num, lead, p), _pscale(den, lead, p)))
        else:
            out.append(field.element(num, den))
    return out


def _mul_sparse(field, xs, ys, n):
    # ys has at most two nonzero coefficients: shift, scale and add
    out = [field.zero] * n
    for j, b in enumerate(ys):
        if not b:
            continue
        for i in range(min(len(xs), n - j)):
            a = xs[i]
            if a:
                k = i + j
                out[k] = out[k] + a * b if out[k] else a * b
    return out


def _degree_bounds(coeffs, r):
    bounds = [0] * r
    for c in coeffs:
        for e in c.num:
            for v in range(r):
                if e[v] > bounds[v]:
                    bounds[v] = e[v]
    return bounds


def _slots(coeffs, dims, stride):
    idx, vals = [], []
    r = len(dims)
    for i, c in enumerate(coeffs):
        base = i * stride
        for e, v in c.num.items():
            k = 0
            for a in range(r):
                k = k * dims[a] + e[a]
            idx.append(base + k)
            vals.append(v)
    return idx, vals


def _pack(coeffs, dims, stride, dtype):
    idx, vals = _slots(coeffs, dims, stride)
    arr = np.zeros(len(coeffs) * stride, dtype=dtype)
    arr[idx] = vals
    return int.from_bytes(arr.tobytes(), "little"), len(idx)


def _dense(coeffs, dims, stride):
    idx, vals = _slots(coeffs, dims, stride)
    arr = np.zeros(len(coeffs) * stride, dtype=np.float64)
    arr[idx] = vals
    return arr


# above this many slots a float FFT beats CPython's Karatsuba multiply
_FFT_SLOTS = 1 << 15


def _convolve_fft(x, y, p):
    """Linear convolution of small nonnegative integer vectors, reduced mod p."""
    n = len(x) + len(y) - 1
    size = 1 << (n - 1).bit_length()
    z = np.fft.irfft(np.fft.rfft(x, size) * np.fft.rfft(y, size), size)[:n]
    r = np.rint(z)
    if np.abs(z - r).max(initial=0.0) > 0.25:
        raise ArithmeticError("FFT convolution lost exactness")
    return r.astype(np.int64) % p


def _mul_kronecker(field, xs, ys, n):
    """Product of polynomial-coefficient sequences by Kronecker substitution.

    Each (t-index, b-exponent) pair becomes one fixed-width slot of a big
    integer; a single integer product then carries out the whole bivariate
    convolution, and slots are reduced mod p afterwards.
    """
    p, r = field.p, field.r
    xs, ys = xs[:n], ys[:n]
    bx, by = _degree_bounds(xs, r), _degree_bounds(ys, r)
    dims = [a + b + 1 for a, b in zip(bx, by)]
    stride = 1
    for d in dims:
        stride *= d
    if len(xs) * stride + len(ys) * stride > _FFT_SLOTS:
        arr = _convolve_fft(_dense(xs, dims, stride), _dense(ys, dims, stride), p)[: n * stride]
    else:
        X, tx = _pack(xs, dims, stride, np.uint32)
        Y, ty = _pack(ys, dims, stride, np.uint32)
        if min(tx, ty) * (p - 1) ** 2 >= 2**32:
            dtype, width = np.uint64, 8
            X, _ = _pack(xs, dims, stride, np.uint64)
            Y, _ = _pack(ys, dims, stride, np.uint64)
        else:
            dtype, width = np.uint32, 4
        Z = X * Y
        nslots = (len(xs) + len(ys)) * stride
        arr = np.frombuffer(Z.to_bytes(nslots * width, "little"), dtype=dtype)[: n * stride] % p
    nz = np.flatnonzero(arr)
    vals = arr[nz].tolist()
    tidx = (nz // stride).tolist()
    rem = nz % stride
    if r == 0:
        exps = [()] * len(vals)
    elif r == 1:
        exps = [(k,) for k in rem.tolist()]
    else:
        exps = list(zip((rem // dims[1]).tolist(), (rem % dims[1]).tolist()))
    polys = [None] * n
    for ti, e, v in zip(tidx, exps, vals):
        d = polys[ti]
        if d is None:
            polys[ti] = {e: v}
        else:
            d[e] = v
    zero = field.zero
    return [zero if d is None else ResidueElem(field, d, None) for d in polys]


def substitute(x, f, prec=None):
    """Image of ``x`` (a series in pi_K with F_p coefficients) under pi_K -> f.

    ``prec`` caps the absolute precision of the result; when x and f are
    exact and no cap is given, ``default_precision()`` slots above the image
    valuation are kept.
    """
    L = f.field
    if x.field.r != 0 or x.field.p != L.p:
        raise TypeError("substitute expects x over F_p((pi_K)) of the same characteristic as f")
    e = f.valuation()
    if e < 1:
        raise InvalidEmbedding(f"image of pi_K must have positive valuation, got {e}")
    target = None if x.prec is None else e * x.prec
    if prec is not None:
        target = _pmin(target, prec)
    if x.exact_zero:
        return Series.zero(L)
    if target is None and f.prec is None and x.coeffs and x.start >= 0:
        # a polynomial in pi_K composed with an exact f has an exact image
        total = Series.zero(L)
        for k, c in x.terms():
            total = total + (f**k).scale(L.const(c.constant_value()))
        return total
    if target is None:
        base = e * x.start if x.coeffs else 0
        target = base + default_precision()
    if not x.coeffs:
        return Series(L, (), target, target)
    terms = x.terms()
    lo = terms[0][0]
    hi = terms[-1][0]
    total = Series.zero(L, target)
    if lo < 0:
        g = f.inverse(prec=target + (-lo - 1) * e)
        power = Series.one(L)
        negs = {}
        for m in range(1, -lo + 1):
            power = power * g
            negs[-m] = power
    else:
        negs = {}
    pos = Series.one(L)
    positives = {0: pos}
    for m in range(1, hi + 1):
        pos = (pos * f).truncate(target)
        positives[m] = pos
    for k, c in terms:
        piece = negs[k] if k < 0 else positives[k]
        total = total + piece.scale(L.const(c.constant_value()))
    return total.truncate(target)
