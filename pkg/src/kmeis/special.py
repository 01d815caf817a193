"""
High-precision special functions on the real axis: Gamma_R, zeta, the
completed zeta xi, the ratio xi(s)/xi(s+1) and c_infinity(s).

Each PrecisionContext owns a private mpmath context, so evaluations at
different precisions never touch the global ``mpmath.mp`` state.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Optional, Tuple

import mpmath
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from kmeis.errors import DomainError, PrecisionExhausted

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 30
GUARD_DIGITS = 10
LOST_DIGITS = 5


class PrecisionContext(BaseModel):
    """Working precision plus the number of digits certified on output."""

    model_config = ConfigDict(frozen=True)

    digits: int = Field(DEFAULT_DIGITS, ge=10, description="Working decimal digits")

    _mp: Any = PrivateAttr()

    def model_post_init(self, __context) -> None:
        ctx = mpmath.MPContext()
        ctx.dps = self.digits + GUARD_DIGITS
        self._mp = ctx

    @property
    def guaranteed_digits(self) -> int:
        return self.digits - LOST_DIGITS

    @property
    def mp(self):
        return self._mp

    @property
    def tolerance(self):
        """10^(-guaranteed_digits) as a context number."""
        return self._mp.mpf(10) ** (-self.guaranteed_digits)

    def mpf(self, value):
        """Exact conversion of ints, Fractions and "p/q" strings; mpf values pass through."""
        if isinstance(value, str) and "/" in value:
            value = Fraction(value)
        if isinstance(value, Fraction):
            return self._mp.mpf(value.numerator) / value.denominator
        if hasattr(value, "_mpf_"):
            return self._mp.make_mpf(value._mpf_)
        return self._mp.mpf(value)


@lru_cache(maxsize=16)
def precision(digits: int = DEFAULT_DIGITS) -> PrecisionContext:
    return PrecisionContext(digits=digits)


def _ctx(ctx: Optional[PrecisionContext]) -> PrecisionContext:
    return ctx if ctx is not None else precision()


# ============================================================================
# Gamma factors
# ============================================================================

def gamma_r(s, ctx: Optional[PrecisionContext] = None):
    """Gamma_R(s) = pi^(-s/2) Gamma(s/2) for real s > 0."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    x = ctx.mpf(s)
    if x <= 0:
        raise DomainError("gamma_r", s, "s > 0")
    return mp.pi ** (-x / 2) * mp.gamma(x / 2)


def c_infinity(s, ctx: Optional[PrecisionContext] = None):
    """c_inf(s) = Gamma_R(s) / Gamma_R(s+1) = sqrt(pi) Gamma(s/2) / Gamma((s+1)/2).

    Evaluated as one gamma ratio so that large s keeps full relative accuracy.
    """
    ctx = _ctx(ctx)
    mp = ctx.mp
    x = ctx.mpf(s)
    if x <= 0:
        raise DomainError("c_infinity", s, "s > 0")
    return mp.sqrt(mp.pi) * mp.gammaprod([x / 2], [(x + 1) / 2])


def rank1_constant(epsilon, ctx: Optional[PrecisionContext] = None):
    """M = max(2, c_inf(epsilon)), the rank-one constant for pairings >= epsilon."""
    ctx = _ctx(ctx)
    return max(ctx.mp.mpf(2), c_infinity(epsilon, ctx))


# ============================================================================
# Zeta
# ============================================================================

def zeta_with_bound(s, ctx: Optional[PrecisionContext] = None) -> Tuple[Any, Any]:
    """zeta(s) for real s > 1 by Euler-Maclaurin, with its remainder bound.

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{k=1..p} B_2k/(2k)! s(s+1)...(s+2k-2) N^(-s-2k+1) + R,

    and for real s, |R| is at most the first omitted correction term.
    """
    ctx = _ctx(ctx)
    mp = ctx.mp
    x = ctx.mpf(s)
    if x <= 1:
        raise DomainError("zeta", s, "s > 1")
    target = mp.mpf(10) ** (-(ctx.digits + 3))
    n_terms = ctx.digits + 10
    while n_terms <= 64 * (ctx.digits + 10):
        big_n = mp.mpf(n_terms)
        head = mp.fsum(mp.mpf(n) ** (-x) for n in range(1, n_terms))
        head += big_n ** (1 - x) / (x - 1) + big_n ** (-x) / 2
        corrections = []
        for k in range(1, 4 * n_terms):
            term = mp.bernoulli(2 * k) / mp.factorial(2 * k) * mp.rf(x, 2 * k - 1) * big_n ** (-x - 2 * k + 1)
            corrections.append(term)
            bound = abs(
                mp.bernoulli(2 * k + 2) / mp.factorial(2 * k + 2)
                * mp.rf(x, 2 * k + 1) * big_n ** (-x - 2 * k - 1)
            )
            if bound < target * abs(head):
                return head + mp.fsum(corrections), bound
            if k > 1 and bound > abs(term):
                # asymptotic terms started growing; use more direct terms
                break
        n_terms *= 2
    raise PrecisionExhausted(f"zeta({s}) did not reach {ctx.digits} digits")


def zeta(s, ctx: Optional[PrecisionContext] = None):
    return zeta_with_bound(s, ctx)[0]


def xi(s, ctx: Optional[PrecisionContext] = None):
    """Completed zeta Gamma_R(s) zeta(s), s > 1."""
    ctx = _ctx(ctx)
    if ctx.mpf(s) <= 1:
        raise DomainError("xi", s, "s > 1")
    return gamma_r(s, ctx) * zeta(s, ctx)


def xi_ratio(s, ctx: Optional[PrecisionContext] = None):
    """xi(s) / xi(s+1) = c_inf(s) zeta(s) / zeta(s+1), s > 1."""
    ctx = _ctx(ctx)
    x = ctx.mpf(s)
    if x <= 1:
        raise DomainError("xi_ratio", s, "s > 1")
    return c_infinity(x, ctx) * zeta(x, ctx) / zeta(x + 1, ctx)


class ThresholdReport(BaseModel):
    threshold: Any = Field(..., description="s* with xi(s*)/xi(s*+1) = 1")
    sweep_points: int
    sweep_max: Any = Field(..., description="Largest ratio seen on the grid above s*")
    holds_on_sweep: bool

    model_config = ConfigDict(arbitrary_types_allowed=True)


def xi_ratio_threshold(ctx: Optional[PrecisionContext] = None, lo=Fraction(3, 2), hi=100) -> ThresholdReport:
    """Empirical real-axis point above which xi(s)/xi(s+1) <= 1.

    The crossing is bracketed in [lo, hi]; the ratio is then sampled at every
    integer in [ceil(s*), hi] to confirm it stays at most 1.
    """
    ctx = _ctx(ctx)
    mp = ctx.mp
    a, b = ctx.mpf(lo), ctx.mpf(hi)

    def excess(s):
        return xi_ratio(s, ctx) - 1

    if excess(a) * excess(b) > 0:
        raise DomainError("xi_ratio_threshold", (lo, hi), "a sign change of xi(s)/xi(s+1) - 1")
    root = mp.findroot(excess, (a, b), solver="anderson", maxsteps=200, verify=False)
    grid = [mp.mpf(n) for n in range(int(mp.ceil(root)), int(b) + 1)]
    values: List[Any] = [xi_ratio(s, ctx) for s in grid]
    sweep_max = max(values) if values else mp.mpf(0)
    logger.info("xi ratio crosses 1 at s* = %s", mp.nstr(root, 15))
    return ThresholdReport(
        threshold=root, sweep_points=len(grid), sweep_max=sweep_max, holds_on_sweep=sweep_max <= 1
    )


# ============================================================================
# Rank-one bound
# ============================================================================

class Rank1Bound(BaseModel):
    """lhs estimates the bilateral sum; lhs_upper is a certified upper bound for it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    lhs: Any
    lhs_upper: Any
    rhs: Any
    truncation: int = Field(..., description="Terms |m| <= truncation are summed directly")
    holds: bool


def rank1_sum_bound(s, a_alpha, x0, ctx: Optional[PrecisionContext] = None) -> Rank1Bound:
    """sum_{m in Z} (1 + a^-2 (x0+m)^2)^(-(s+1)/2)  <=  2 + a c_inf(s).

    Terms |m| <= M0 are summed directly. Each tail is bounded by the exact
    integral a/2 * B(y; s/2, 1/2) with y = 1/(1+T^2), T = (M0 +- x0)/a, which
    gives ``lhs_upper``; ``lhs`` subtracts the first Euler-Maclaurin
    corrections from that integral. ``holds`` compares ``lhs_upper``.
    """
    ctx = _ctx(ctx)
    mp = ctx.mp
    sv, av, xv = ctx.mpf(s), ctx.mpf(a_alpha), ctx.mpf(x0)
    if sv <= 0:
        raise DomainError("rank1_sum_bound", s, "s > 0")
    if av <= 0:
        raise DomainError("rank1_sum_bound", a_alpha, "a_alpha > 0")
    k = (sv + 1) / 2

    def f(u):
        return (1 + (u / av) ** 2) ** (-k)

    def df(u):
        return -2 * k * u / av ** 2 * (1 + (u / av) ** 2) ** (-k - 1)

    m0 = int(mp.ceil(abs(xv))) + 400 * int(mp.ceil(max(av, 1)))
    partial = mp.fsum(f(xv + m) for m in range(-m0, m0 + 1))

    tails, corrections = [], []
    for shift in (xv, -xv):
        start = m0 + shift
        t = start / av
        y = 1 / (1 + t ** 2)
        integral = av / 2 * mp.betainc(sv / 2, mp.mpf(1) / 2, 0, y)
        tails.append(integral)
        corrections.append(-f(start) / 2 - df(start) / 12)

    lhs_upper = partial + mp.fsum(tails)
    lhs = lhs_upper + mp.fsum(corrections)
    rhs = 2 + av * c_infinity(sv, ctx)
    return Rank1Bound(lhs=lhs, lhs_upper=lhs_upper, rhs=rhs, truncation=m0, holds=bool(lhs_upper <= rhs))
