"""Logarithmic 1-forms sum_l c_l db_l + c dlog(t) over l((t)).

Forms are always written in the log basis {db_1, ..., db_r, dlog t}; the
log valuation of a form is the smallest valuation among its coefficients.
"""

from __future__ import annotations

from .errors import InvalidEmbedding, PrecisionExhausted
from .series import INF, Series, substitute


class LogForm:
    __slots__ = ("field", "db", "dlog")

    def __init__(self, field, db, dlog):
        db = tuple(db)
        if len(db) != field.r:
            raise ValueError(f"expected {field.r} db-coefficients, got {len(db)}")
        self.field = field
        self.db = db
        self.dlog = dlog

    @classmethod
    def zero(cls, field):
        z = Series.zero(field)
        return cls(field, (z,) * field.r, z)

    @property
    def coefficients(self):
        """Coefficients in the fixed basis order (db_1, ..., db_r, dlog t)."""
        return self.db + (self.dlog,)

    @property
    def exact_zero(self):
        return all(c.exact_zero for c in self.coefficients)

    def __add__(self, other):
        return LogForm(self.field, [a + b for a, b in zip(self.db, other.db)], self.dlog + other.dlog)

    def __neg__(self):
        return LogForm(self.field, [-a for a in self.db], -self.dlog)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, x):
        """Multiply by the function x (a Series)."""
        return LogForm(self.field, [a * x for a in self.db], self.dlog * x)

    __mul__ = scale

    def agrees_with(self, other):
        return all(a.agrees_with(b) for a, b in zip(self.coefficients, other.coefficients))

    def __repr__(self):
        return f"LogForm({self})"

    def __str__(self):
        names = [f"d{n}" for n in self.field.names] + ["dlog t"]
        parts = [f"({c})*{n}" for c, n in zip(self.coefficients, names) if not c.exact_zero]
        return " + ".join(parts) if parts else "0"


def d_series(x):
    """d of a series: db-coefficients are coefficientwise partials, the
    dlog-coefficient is sum i*c_i*t^i with i read mod p."""
    partials, log_part = x.derivative_pieces()
    return LogForm(x.field, partials, log_part)


def witt_d(a):
    """sum_i a_i^(p^i - 1) d(a_i) with a_i = a[i]."""
    field = None
    total = None
    p = a.p
    for i in range(a.s):
        ai = a[i]
        field = ai.field
        if ai.exact_zero:
            continue
        term = d_series(ai)
        if i:
            term = term.scale(ai ** (p**i - 1))
        total = term if total is None else total + term
    return total if total is not None else LogForm.zero(field)


def vlog(omega):
    """Log valuation: the minimum coefficient valuation (+inf for 0)."""
    best = INF
    undetermined = False
    for c in omega.coefficients:
        if c.coeffs:
            best = min(best, c.start)
        elif c.prec is not None:
            undetermined = True
    if undetermined:
        # a coefficient known only to vanish below its precision decides
        # nothing unless a smaller valuation is already certain
        for c in omega.coefficients:
            if not c.coeffs and c.prec is not None and c.prec < best:
                raise PrecisionExhausted("log valuation undetermined within precision")
    return best


def vlog_clipped(omega, bound):
    """min(vlog(omega), bound), needing precision only up to ``bound``."""
    return min(c.valuation_clipped(bound) for c in omega.coefficients)


def dlog(f):
    """df / f as a LogForm over the field of f."""
    v = f.valuation()
    if v == INF:
        raise InvalidEmbedding("dlog of zero")
    return d_series(f).scale(f.inverse())


def pullback(omega, emb):
    """Image of gamma*dlog(pi_K) under the embedding pi_K -> emb.f."""
    if omega.field.r != 0:
        raise ValueError("pullback expects a form over a perfect residue field")
    gamma = omega.dlog
    if gamma.exact_zero:
        return LogForm.zero(emb.field)
    return emb.dlog_image().scale(substitute(gamma, emb.f, prec=emb.image_precision(gamma)))
