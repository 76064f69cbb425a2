"""Extensions L/K given by the image f of pi_K, base change of characters,
the main conductor formula Sw(chi_L) = e*Sw(chi) - delta_tor, and psi-functions.

K = F_p((pi_K)) throughout; L = l((t)) with l = F_p(b_1, ..., b_r).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import bestform
from .errors import BelowThreshold, InvalidBreaks, InvalidEmbedding, PrecisionExhausted
from .forms import d_series, dlog, vlog
from .scalars import ResidueField, default_names
from .series import INF, Series, substitute
from .witt import WittVec

DEFAULT_MARGIN = 8
MAX_PRECISION_RETRIES = 4


# -- embeddings and characters ------------------------------------------------


class EmbeddingSpec:
    """pi_K -> f in L.  The ramification index e = v_L(f) is derived.

    Precision policy: characters are base changed to absolute precision
    ``e*N + margin`` (N the Swan bound of the character over K); ``margin``
    doubles on each retry after a PrecisionExhausted, up to ``retries`` times.
    """

    def __init__(self, f, margin=DEFAULT_MARGIN, retries=MAX_PRECISION_RETRIES):
        if not isinstance(f, Series):
            raise TypeError("embedding image must be a Series")
        v = f.valuation()
        if v < 1:
            raise InvalidEmbedding(f"image of pi_K must have positive valuation, got {v}")
        self.f = f
        self.e = v
        self.margin = margin
        self.retries = retries
        self._dlog = None
        self._delta = None

    @property
    def field(self):
        return self.f.field

    @property
    def p(self):
        return self.f.field.p

    @property
    def r(self):
        return self.f.field.r

    def dlog_image(self):
        """dlog(pi_K) pulled back: df/f in L's log basis."""
        if self._dlog is None:
            df = d_series(self.f)
            if df.exact_zero:
                raise InvalidEmbedding("df = 0: the extension is inseparable")
            self._dlog = dlog(self.f)
        return self._dlog

    def delta_tor(self):
        if self._delta is None:
            self._delta = vlog(self.dlog_image())
        return self._delta

    def image_precision(self, gamma):
        """Absolute precision for the image of a coefficient series gamma."""
        return self.e * gamma.valuation() + self.delta_tor() + self.margin

    def __repr__(self):
        return f"EmbeddingSpec(f={self.f}, e={self.e})"


def delta_tor(emb):
    """v_log(d pi_K / pi_K) measured in L."""
    return emb.delta_tor()


@dataclass(frozen=True)
class CharacterSpec:
    """The Artin-Schreier-Witt class of a vector over K."""

    components: WittVec

    def __post_init__(self):
        for c in self.components.components:
            if not isinstance(c, Series) or c.field.r != 0 or c.field.p != self.components.p:
                raise ValueError("character components must be series over F_p((pi_K))")

    @property
    def s(self):
        return self.components.s

    @property
    def p(self):
        return self.components.p

    def swan_bound(self):
        """N with chi in F_N, i.e. max(0, -v_K(a)) before reduction."""
        return -bestform._valuation_below_zero(self.components)

    def swan(self):
        return bestform.swan_conductor(self.components)


def base_change_char(chi, emb, prec=None):
    """Componentwise image of the character vector in W_s(L)."""
    if chi.p != emb.p:
        raise ValueError(f"character over p={chi.p} cannot be base changed along p={emb.p}")
    if prec is None:
        prec = emb.e * chi.swan_bound() + emb.margin
    return WittVec(chi.p, [substitute(c, emb.f, prec=prec) for c in chi.components.components])


# -- the conductor formula --------------------------------------------------------


def swan_threshold(e, delta, p):
    """p/(p-1) * delta/e, as an exact fraction."""
    return Fraction(p, p - 1) * Fraction(delta, e)


def predicted_swan(e, delta, sw_k, p):
    """(e*Sw_K - delta, Sw_K > p/(p-1)*delta/e)."""
    return e * sw_k - delta, sw_k > swan_threshold(e, delta, p)


@dataclass
class VerifyReport:
    e: int
    delta_tor: int
    sw_k: int
    predicted: int
    computed: int
    threshold: Fraction
    in_hypothesis: bool
    passed: bool
    steps: int = 0
    precision: int = 0
    attempts: int = 1

    @property
    def boundary(self):
        return self.sw_k == self.threshold

    @property
    def equal(self):
        return self.predicted == self.computed

    def as_dict(self):
        return {
            "e": self.e,
            "delta_tor": self.delta_tor,
            "sw_k": self.sw_k,
            "predicted": self.predicted,
            "computed": self.computed,
            "threshold": str(self.threshold),
            "in_hypothesis": self.in_hypothesis,
            "boundary": self.boundary,
            "equal": self.equal,
            "pass": self.passed,
            "steps": self.steps,
            "precision": self.precision,
            "attempts": self.attempts,
        }


def swan_over_l(chi, emb):
    """(Sw(chi_L), reduction steps, precision used, attempts)."""
    margin = emb.margin
    for attempt in range(1, emb.retries + 2):
        prec = emb.e * chi.swan_bound() + margin
        try:
            image = base_change_char(chi, emb, prec=prec)
            red = bestform.reduce_to_best(image)
            return -bestform._valuation_below_zero(red.best), red.steps, prec, attempt
        except PrecisionExhausted:
            if attempt > emb.retries:
                raise
            margin *= 2


def verify_main_theorem(chi, emb):
    """Compare e*Sw_K - delta_tor with the conductor computed over L.

    Out-of-hypothesis cases are still computed; they never count as passes.
    """
    sw_k = chi.swan()
    delta = emb.delta_tor()
    predicted, ok = predicted_swan(emb.e, delta, sw_k, emb.p)
    computed, steps, prec, attempts = swan_over_l(chi, emb)
    return VerifyReport(
        e=emb.e,
        delta_tor=delta,
        sw_k=sw_k,
        predicted=predicted,
        computed=computed,
        threshold=swan_threshold(emb.e, delta, emb.p),
        in_hypothesis=ok,
        passed=ok and predicted == computed,
        steps=steps,
        precision=prec,
        attempts=attempts,
    )


# -- psi ---------------------------------------------------------------------------


def psi_ab_threshold(e, delta, p, e_k=None):
    """(threshold, strict) for the closed form of psi^ab.

    Equal characteristic (``e_k`` None): t > p/(p-1) * delta/e.
    Mixed characteristic: t >= 2 e_K/(p-1) + 1/e + ceil(delta/e).
    """
    if e_k is None:
        return swan_threshold(e, delta, p), True
    return Fraction(2 * e_k, p - 1) + Fraction(1, e) + math.ceil(Fraction(delta, e)), False


def psi_ab_asymptotic(t, e, delta, p, e_k=None):
    """e*t - delta_tor for t beyond the validity threshold."""
    t = Fraction(t)
    thr, strict = psi_ab_threshold(e, delta, p, e_k)
    if (t <= thr) if strict else (t < thr):
        raise BelowThreshold(t, thr, strict)
    return e * t - delta


@dataclass(frozen=True)
class PsiBreaks:
    """Lower ramification data of a totally ramified Galois extension.

    ``orders[0]`` = |G_0| = e; for u in (u_{i-1}, u_i] (u_0 = 0) the group
    G_u has order ``orders[i]``; G_u is trivial for u > u_k.
    """

    breaks: tuple
    orders: tuple

    def __post_init__(self):
        u = tuple(Fraction(x) for x in self.breaks)
        g = tuple(int(x) for x in self.orders)
        object.__setattr__(self, "breaks", u)
        object.__setattr__(self, "orders", g)
        if len(g) != len(u) + 1:
            raise InvalidBreaks("need one order for G_0 and one per break")
        if any(x < 1 for x in g):
            raise InvalidBreaks("group orders must be positive")
        if u and u[0] <= 0:
            raise InvalidBreaks("lower breaks must be positive")
        if any(b <= a for a, b in zip(u, u[1:])):
            raise InvalidBreaks("breaks must be strictly increasing")
        if any(prev % nxt for prev, nxt in zip(g, g[1:])):
            raise InvalidBreaks("each order must divide its predecessor")
        if u and g[-1] == 1:
            raise InvalidBreaks("the group at the last break must be nontrivial")

    @property
    def e(self):
        return self.orders[0]

    def segments(self):
        """(left end, right end, |G_u|) for the ramified stretch u > 0."""
        out = []
        prev = Fraction(0)
        for u, g in zip(self.breaks, self.orders[1:]):
            out.append((prev, u, g))
            prev = u
        return out

    def last_upper(self):
        return phi(self, self.breaks[-1]) if self.breaks else Fraction(0)


def parse_breaks(text, e=None):
    """Parse ``"u1:g1,u2:g2"``; G_0 defaults to the first order unless ``e`` is given."""
    pairs = []
    text = text.strip()
    if text:
        for item in text.split(","):
            try:
                u, g = item.split(":")
                pairs.append((Fraction(u.strip()), int(g)))
            except ValueError:
                raise InvalidBreaks(f"malformed break {item!r}; expected u:g") from None
    orders = [e if e is not None else (pairs[0][1] if pairs else 1)] + [g for _, g in pairs]
    return PsiBreaks(tuple(u for u, _ in pairs), tuple(orders))


def phi(br, u):
    """Herbrand phi(u) = int_0^u |G_s|/|G_0| ds, for u >= 0."""
    u = Fraction(u)
    acc = Fraction(0)
    for lo, hi, g in br.segments():
        if u <= lo:
            return acc
        acc += Fraction(g, br.e) * (min(u, hi) - lo)
    if br.breaks and u > br.breaks[-1]:
        acc += Fraction(1, br.e) * (u - br.breaks[-1])
    elif not br.breaks:
        acc = u / br.e
    return acc


def classical_psi(br, t):
    """Inverse of phi: piecewise linear with slopes |G_0|/|G_u|."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("psi is only tabulated for t >= 0")
    acc_u = Fraction(0)
    acc_t = Fraction(0)
    for lo, hi, g in br.segments():
        width = Fraction(g, br.e) * (hi - lo)
        if t <= acc_t + width:
            return acc_u + (t - acc_t) * Fraction(br.e, g)
        acc_u, acc_t = hi, acc_t + width
    return acc_u + (t - acc_t) * br.e


def dlog_different(br):
    """sum over the ramified stretch of (|G_u| - 1) du; for integer breaks
    this is sum_{i>=1} (|G_i| - 1)."""
    total = sum(((g - 1) * (hi - lo) for lo, hi, g in br.segments()), Fraction(0))
    return int(total) if total.denominator == 1 else total


def scale_breaks(br, c):
    """Breaks multiplied by c, same groups (lower numbering after a tame base change)."""
    return PsiBreaks(tuple(Fraction(c) * u for u in br.breaks), br.orders)


# -- Artin-Schreier extensions -------------------------------------------------------


def artin_schreier_embedding(p, n, prec=64):
    """Embedding for x^p - x = pi_K^(-n), p not dividing n.

    With t a uniformizer of L and y = 1/x one has y = t^n w^beta and
    pi_K = t^p w^alpha, where w = (1 - y^(p-1))^(-1) and n*alpha - p*beta = 1.
    """
    if n < 1 or n % p == 0:
        raise InvalidEmbedding("Artin-Schreier break n must be positive and prime to p")
    alpha = pow(n, -1, p) if p > 1 else 1
    beta = (n * alpha - 1) // p
    F = ResidueField(p)
    one = Series.one(F)
    tn = Series.monomial(F, 1, n)
    y = tn
    for _ in range(prec + 2):
        w = (one - (y ** (p - 1)).truncate(prec)).inverse(prec=prec)
        y_new = (tn * w**beta).truncate(prec) if beta else tn
        if y_new.agrees_with(y) and y_new.prec == y.prec:
            break
        y = y_new
    w = (one - (y ** (p - 1)).truncate(prec)).inverse(prec=prec)
    f = (Series.monomial(F, 1, p) * w**alpha).truncate(prec + p)
    return EmbeddingSpec(f)


# -- random cases ---------------------------------------------------------------------


@dataclass
class CaseLimits:
    primes: tuple = (2, 3, 5)
    max_s: int = 3
    max_r: int = 2
    max_e: int = 6
    max_delta: int = 6
    # cap on e * N_K per p-basis size r: coefficient degrees grow with the
    # t-exponent, so the work is roughly (e * N_K)^(r + 1)
    max_image_swan: tuple = (60, 36, 20)
    coefficient_degree: int = 1


def random_unit(L, rng, length, degree):
    coeffs = [L.one] + [L.random_element(rng, degree=degree) for _ in range(length)]
    return Series(L, coeffs, 0)


def random_embedding(rng, p, limits=CaseLimits(), r=None):
    """Random f = t^e * u(t) with e <= max_e and 0 <= delta_tor <= max_delta."""
    for _ in range(200):
        rr = rng.randint(0, limits.max_r) if r is None else r
        L = ResidueField(p, default_names(rr))
        e = rng.randint(1, limits.max_e)
        u = random_unit(L, rng, rng.randint(0, 4), limits.coefficient_degree)
        f = Series.monomial(L, 1, e) * u
        try:
            emb = EmbeddingSpec(f)
            d = emb.delta_tor()
        except InvalidEmbedding:
            continue
        if d <= limits.max_delta:
            return emb
    raise RuntimeError("no admissible embedding found")


def random_character(rng, p, s, n_max):
    """Random vector over K with Swan bound at most n_max (order a_{s-1}, ..., a_0)."""
    F = ResidueField(p)
    comps = []
    for k in range(s):
        i = s - 1 - k
        lo = -(n_max // p**i)
        terms = {}
        for j in range(lo, 2):
            if rng.random() < 0.5:
                terms[j] = rng.randrange(1, p)
        comps.append(Series.from_dict(F, terms))
    return CharacterSpec(WittVec(p, comps))


def random_case(rng, limits=CaseLimits(), in_hypothesis=True):
    """A (character, embedding) pair; by default Sw_K exceeds the threshold."""
    for _ in range(500):
        p = rng.choice(limits.primes)
        s = rng.randint(1, limits.max_s)
        emb = random_embedding(rng, p, limits)
        cap = limits.max_image_swan[emb.r] // emb.e
        thr = swan_threshold(emb.e, emb.delta_tor(), p)
        lo = math.floor(thr) + 1 if in_hypothesis else 1
        if lo > cap:
            continue
        chi = random_character(rng, p, s, rng.randint(lo, cap))
        sw = chi.swan()
        if in_hypothesis and not sw > thr:
            continue
        return chi, emb
    raise RuntimeError("no admissible case found")


def case_rng(seed, index):
    return random.Random(f"{seed}-{index}")
