"""Shared hypothesis strategies and small constructors for the test suite."""

from hypothesis import strategies as st

from swanlab.scalars import ResidueField, _monomials, default_names
from swanlab.series import Series
from swanlab.witt import WittVec

PRIMES = (2, 3, 5)


def field(p, r=0):
    return ResidueField(p, default_names(r))


@st.composite
def fields(draw, primes=PRIMES, max_r=2):
    return field(draw(st.sampled_from(primes)), draw(st.integers(0, max_r)))


@st.composite
def polys(draw, F, degree=3):
    mons = _monomials(F.r, degree)
    coeffs = draw(st.lists(st.integers(0, F.p - 1), min_size=len(mons), max_size=len(mons)))
    return F.element({m: c for m, c in zip(mons, coeffs) if c})


@st.composite
def elems(draw, F, degree=3, rational=True):
    num = draw(polys(F, degree))
    if rational and F.r and draw(st.booleans()):
        den = draw(polys(F, 2))
        if den:
            return num / den
    return num


@st.composite
def nonzero_elems(draw, F, degree=3, rational=True):
    x = draw(elems(F, degree, rational))
    return x if x else F.one


@st.composite
def laurent(draw, F, lo=-6, hi=6, degree=2, prec=None):
    """Laurent polynomial with support in [lo, hi]; truncated at ``prec`` if given."""
    terms = {}
    for k in range(lo, hi + 1):
        if draw(st.booleans()):
            terms[k] = draw(elems(F, degree, rational=False))
    return Series.from_dict(F, terms, prec)


@st.composite
def nonzero_laurent(draw, F, lo=-6, hi=6, degree=2):
    x = draw(laurent(F, lo, hi, degree))
    if x.exact_zero:
        return Series.monomial(F, 1, draw(st.integers(lo, hi)))
    return x


@st.composite
def witt_vectors(draw, F, s, bound=8, degree=2):
    """Vectors (a_{s-1}, ..., a_0) with p^i v(a_i) >= -bound."""
    comps = []
    for k in range(s):
        i = s - 1 - k
        lo = -(bound // F.p**i)
        comps.append(draw(laurent(F, lo, 2, degree)))
    return WittVec(F.p, comps)


def mono(F, c, k, prec=None):
    return Series.monomial(F, c, k, prec)
