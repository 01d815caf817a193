"""
Weyl-group series attached to the Borel Eisenstein series:

* the constant term  sum_w a^{w lambda + rho} c(lambda, w),
  c(lambda, w) = prod_{alpha in Phi_w} xi(<lambda, alpha^vee>) / xi(1 + <lambda, alpha^vee>);
* the dominating series  sum_w M^{l(w)} a^{w lambda};
* the majorant  sum_w (2M)^{l(w)} a^{w^{-1} lambda + rho}  of the full series;
* orbit counts  #{w mu : <w mu, H> >= -N};
* the rank-one sum bound (re-exported from ``kmeis.special``).

Exponents stay exact rationals until the final exponentiation. The exact
part of each shell may run on worker threads; all mpmath evaluation happens
on the calling thread in shortlex order, so results are reproducible.
"""
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Any, Dict, List, Optional, Sequence, Tuple

from kmeis.cartan import CartanMatrix
from kmeis.errors import (
    InvalidArgument,
    NotDominant,
    NotGodement,
    NotInTitsCone,
    OutOfRange,
    PrecisionExhausted,
)
from kmeis.lattice import PointH, RootSystem, WeightVector
from kmeis.special import PrecisionContext, precision, rank1_constant, rank1_sum_bound, xi_ratio
from kmeis.utils import format_decimal, format_rational
from kmeis.weyl import INTERIOR, TitsReduction, WeylElement, WeylGroup

logger = logging.getLogger(__name__)

__all__ = [
    "SpectralParameter",
    "ShellRow",
    "ShellTable",
    "LooijengaCount",
    "CBoundScan",
    "EisensteinEvaluator",
    "c_lambda_w",
    "constant_term",
    "dominating_series",
    "godement_majorant",
    "looijenga_count",
    "rank1_sum_bound",
]


@dataclass(frozen=True)
class SpectralParameter:
    """A real spectral parameter lambda given by its coroot pairings."""

    weight: WeightVector

    def __post_init__(self):
        object.__setattr__(self, "weight", WeightVector(self.weight))

    @property
    def godement(self) -> bool:
        return all(c > 1 for c in self.weight)

    @property
    def in_open_chamber(self) -> bool:
        return all(c > 0 for c in self.weight)


SHELL_TABLE_HEADER = ("length", "count", "shell_abs_sum", "partial_sum", "ratio")


@dataclass
class ShellRow:
    length: int
    count: int
    shell_abs_sum: Any
    partial_sum: Any
    ratio: Optional[Any] = None


@dataclass
class ShellTable:
    kind: str
    max_length: int
    digits: int
    rows: List[ShellRow] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    @property
    def total(self):
        return self.rows[-1].partial_sum if self.rows else None

    def shell_sum(self, length: int):
        return self.rows[length].shell_abs_sum

    def csv_rows(self) -> List[List[str]]:
        out = []
        for row in self.rows:
            out.append([
                str(row.length),
                str(row.count),
                format_decimal(row.shell_abs_sum, self.digits),
                format_decimal(row.partial_sum, self.digits),
                "" if row.ratio is None else format_decimal(row.ratio, self.digits),
            ])
        return out

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "max_length": self.max_length,
            "precision_digits": self.digits,
            "comments": list(self.comments),
            "rows": [
                dict(zip(SHELL_TABLE_HEADER, row))
                for row in self.csv_rows()
            ],
        }


@dataclass(frozen=True)
class LooijengaCount:
    count: int
    max_length_reached: int
    exhausted: bool

    def to_dict(self) -> Dict:
        return {
            "count": self.count,
            "max_length_reached": self.max_length_reached,
            "exhausted": self.exhausted,
        }


@dataclass(frozen=True)
class CBoundScan:
    max_c: Any
    argmax_word: Tuple[int, ...]
    max_weighted: Any
    weight_base: Any


# ============================================================================
# Evaluator
# ============================================================================

class EisensteinEvaluator:
    """Weyl-series evaluation for one Cartan matrix at one precision."""

    def __init__(
        self,
        cm: CartanMatrix,
        ctx: Optional[PrecisionContext] = None,
        threads: int = 1,
        tits_cap: int = 10000,
    ):
        self.cm = cm
        self.ctx = ctx or precision()
        self.threads = threads
        self.tits_cap = tits_cap
        self.weyl = WeylGroup(cm)
        self.roots: RootSystem = self.weyl.roots
        self._xi_cache: Dict[Fraction, Any] = {}
        self._rho = WeightVector.rho(cm.rank)

    # ------------------------------------------------------------------
    # Exact pieces
    # ------------------------------------------------------------------

    def exponent(self, weight: Sequence, point: Sequence) -> Fraction:
        """<mu, H> for mu in coroot-pairing coordinates."""
        return self.roots.weight_at(weight, point)

    def pairings(self, lam: SpectralParameter, w: WeylElement) -> List[Tuple[Tuple[int, ...], Fraction]]:
        """(alpha, <lambda, alpha^vee>) for alpha in Phi_w."""
        return [(tuple(alpha), self.roots.pair_coroot(lam.weight, alpha)) for alpha in self.weyl.phi_w(w)]

    def exp_rational(self, q: Fraction):
        """exp(q) at context precision; the integer part is exact while |q| < 10^digits."""
        mp = self.ctx.mp
        q = Fraction(q)
        if abs(q) >= Fraction(10) ** self.ctx.digits:
            raise PrecisionExhausted(
                f"|exponent| >= 10^{self.ctx.digits} cannot be exponentiated at this precision"
            )
        whole = floor(q)
        return mp.exp(mp.mpf(whole)) * mp.exp(self.ctx.mpf(q - whole))

    def _xi(self, s: Fraction):
        value = self._xi_cache.get(s)
        if value is None:
            value = xi_ratio(s, self.ctx)
            self._xi_cache[s] = value
        return value

    # ------------------------------------------------------------------
    # Gindikin-Karpelevich factor
    # ------------------------------------------------------------------

    def c_lambda_w(self, lam: SpectralParameter, w: WeylElement):
        """Product of xi(s)/xi(s+1) over s = <lambda, alpha^vee>, alpha in Phi_w.

        Raises:
            OutOfRange: for the first alpha with <lambda, alpha^vee> <= 1.
        """
        return self._c_from_pairings(self.pairings(lam, w))

    def _c_from_pairings(self, pairings):
        mp = self.ctx.mp
        value = mp.mpf(1)
        for alpha, s in pairings:
            if s <= 1:
                raise OutOfRange(alpha, format_rational(s))
            value *= self._xi(s)
        return value

    # ------------------------------------------------------------------
    # Preconditions
    # ------------------------------------------------------------------

    def classify_point(self, point: Sequence, force: bool, comments: List[str]) -> TitsReduction:
        reduction = self.weyl.tits_reduce(point, self.tits_cap)
        comments.append(f"tits={reduction.classification}")
        if reduction.classification != INTERIOR:
            if not force:
                raise NotInTitsCone(
                    f"point {[format_rational(x) for x in point]} is {reduction.classification}"
                )
            logger.warning("evaluating at a %s point because force was requested", reduction.classification)
            comments.append(
                f"WARNING: point is {reduction.classification}; the series may diverge"
            )
        return reduction

    # ------------------------------------------------------------------
    # Shell tables
    # ------------------------------------------------------------------

    def _map(self, fn, items):
        if self.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def _table(self, kind: str, max_length: int, exact_term, numeric_term, comments: List[str]) -> ShellTable:
        mp = self.ctx.mp
        table = ShellTable(kind=kind, max_length=max_length, digits=self.ctx.digits, comments=comments)
        partial = mp.mpf(0)
        previous = None
        for shell in self.weyl.enumerate_shells(max_length, self.threads):
            exact = self._map(exact_term, list(shell.elements))
            terms = [numeric_term(w, data) for w, data in zip(shell.elements, exact)]
            shell_sum = mp.fsum(terms)
            partial += shell_sum
            ratio = shell_sum / previous if previous else None
            table.rows.append(ShellRow(shell.length, shell.count, shell_sum, partial, ratio))
            previous = shell_sum
            logger.info("%s shell %d: count=%d T=%s", kind, shell.length, shell.count, mp.nstr(shell_sum, 8))
        return table

    def _header(self, kind: str, lam: SpectralParameter, point: Sequence) -> List[str]:
        return [
            f"kind={kind}",
            f"matrix={self.cm.to_list()}",
            "lambda=" + ",".join(format_rational(c) for c in lam.weight),
            "point=" + ",".join(format_rational(x) for x in point),
            f"precision_digits={self.ctx.digits}",
        ]

    def constant_term(self, lam: SpectralParameter, point: Sequence, max_length: int,
                      force: bool = False) -> ShellTable:
        """Shell sums T_l = sum_{l(w)=l} exp(<w lambda + rho, H>) c(lambda, w).

        Raises:
            NotGodement, NotInTitsCone (unless ``force``), OutOfRange, PrecisionExhausted
        """
        if not lam.godement:
            raise NotGodement(
                "constant term needs <lambda, alpha_i^vee> > 1 for all i, got "
                + ",".join(format_rational(c) for c in lam.weight)
            )
        point = PointH(point)
        comments = self._header("constant_term", lam, point)
        self.classify_point(point, force, comments)
        rho = self._rho

        def exact(w: WeylElement):
            shifted = self.weyl.act_on_weight(w, lam.weight) + rho
            return self.exponent(shifted, point), self.pairings(lam, w)

        def numeric(w: WeylElement, data):
            exponent, pairings = data
            return self.exp_rational(exponent) * self._c_from_pairings(pairings)

        return self._table("constant_term", max_length, exact, numeric, comments)

    def dominating_series(self, lam: SpectralParameter, point: Sequence, m, max_length: int,
                          force: bool = False) -> ShellTable:
        """Shell sums of M^l exp(<w lambda, H>); lambda only needs to be strictly dominant."""
        if not lam.in_open_chamber:
            raise NotDominant("dominating series needs <lambda, alpha_i^vee> > 0 for all i")
        mp = self.ctx.mp
        m_value = self.ctx.mpf(m)
        if m_value <= 0:
            raise NotDominant("M must be positive")
        point = PointH(point)
        comments = self._header("dominating", lam, point) + [f"M={m}"]
        self.classify_point(point, force, comments)

        def exact(w: WeylElement):
            return self.exponent(self.weyl.act_on_weight(w, lam.weight), point)

        def numeric(w: WeylElement, exponent):
            return m_value ** w.length * self.exp_rational(exponent)

        return self._table("dominating", max_length, exact, numeric, comments)

    def godement_majorant(self, lam: SpectralParameter, point: Sequence, max_length: int,
                          force: bool = False) -> ShellTable:
        """Shell sums of (2M)^l a^{w^{-1} lambda + rho}, M = max(2, c_inf(min_i c_i))."""
        if not lam.godement:
            raise NotGodement("majorant needs <lambda, alpha_i^vee> > 1 for all i")
        point = PointH(point)
        m_value = rank1_constant(min(lam.weight), self.ctx)
        comments = self._header("majorant", lam, point) + [
            "M=" + format_decimal(m_value, self.ctx.digits)
        ]
        self.classify_point(point, force, comments)
        rho = self._rho

        def exact(w: WeylElement):
            inverse_word = tuple(reversed(w.word))
            return self.exponent(self.weyl.act_on_weight(inverse_word, lam.weight) + rho, point)

        def numeric(w: WeylElement, exponent):
            return (2 * m_value) ** w.length * self.exp_rational(exponent)

        return self._table("majorant", max_length, exact, numeric, comments)

    def admissible_term_bound(self, lam: SpectralParameter, point: Sequence, word: Sequence[int], m):
        """M^l a^{w^{-1}(lambda+rho)} prod_{alpha in Phi_w} (1 + a^alpha)."""
        point = PointH(point)
        shifted = lam.weight + self._rho
        phi = self.weyl.phi_word(word)
        exponent = self.exponent(self.weyl.act_on_weight(tuple(reversed(word)), shifted), point)
        value = self.ctx.mpf(m) ** len(word) * self.exp_rational(exponent)
        for alpha in phi:
            value *= 1 + self.exp_rational(self.roots.evaluate(alpha, point))
        return value

    def c_bound_scan(self, lam: SpectralParameter, max_length: int, m=2) -> CBoundScan:
        """max c(lambda, w) and max M^l c(lambda, w) over l(w) <= max_length."""
        mp = self.ctx.mp
        m_value = self.ctx.mpf(m)
        best, best_word, best_weighted = mp.mpf(0), (), mp.mpf(0)
        for w in self.weyl.elements(max_length, self.threads):
            c = self.c_lambda_w(lam, w)
            if c > best:
                best, best_word = c, w.word
            best_weighted = max(best_weighted, m_value ** w.length * c)
        return CBoundScan(max_c=best, argmax_word=best_word, max_weighted=best_weighted, weight_base=m_value)

    # ------------------------------------------------------------------
    # Orbit counting
    # ------------------------------------------------------------------

    def looijenga_count(self, mu: Sequence, points: Sequence[Sequence], n_bound,
                        cap_length: Optional[int] = None) -> LooijengaCount:
        """Count orbit elements w mu whose maximum over ``points`` is >= -N.

        Breadth-first from mu, stepping nu -> w_i nu only when
        <nu, alpha_i^vee> > 0; each step lowers every value by c_i x_i >= 0, so
        branches below -N are pruned. A single point is first moved to the
        dominant chamber and may lie on a wall there, provided it is interior
        to the Tits cone; several points must all be strictly dominant.
        ``exhausted`` means the frontier emptied and the count is exact.
        """
        mu = WeightVector(mu)
        if not (mu.is_dominant() and mu.is_integral()):
            raise NotDominant("mu must have nonnegative integer coroot pairings")
        sample = [PointH(p) for p in points]
        if len(sample) == 1 and not sample[0].is_strictly_dominant():
            reduction = self.weyl.tits_reduce(sample[0], self.tits_cap)
            if reduction.classification != INTERIOR:
                raise NotInTitsCone(f"sample point is {reduction.classification}")
            sample = [reduction.dominant]
        else:
            for p in sample:
                if not p.is_strictly_dominant():
                    raise NotDominant(f"sample point {[format_rational(x) for x in p]} is not strictly dominant")
        n_bound = Fraction(n_bound)
        if n_bound <= 0:
            raise InvalidArgument("N must be positive")

        values = tuple(self.exponent(mu, p) for p in sample)
        seen = {tuple(mu)}
        frontier = deque([(tuple(mu), values)])
        count = 0
        depth = 0
        while frontier:
            if cap_length is not None and depth > cap_length:
                break
            next_frontier = deque()
            for nu, vals in frontier:
                if max(vals) < -n_bound:
                    continue
                count += 1
                for i, c in enumerate(nu):
                    if c <= 0:
                        continue
                    child = tuple(self.roots.reflect_weight(nu, i + 1))
                    if child in seen:
                        continue
                    seen.add(child)
                    next_frontier.append((child, tuple(v - c * p[i] for v, p in zip(vals, sample))))
            frontier = next_frontier
            depth += 1
        reached = depth - 1
        exhausted = not frontier
        logger.info("orbit count %d through length %d (exhausted=%s)", count, reached, exhausted)
        return LooijengaCount(count=count, max_length_reached=reached, exhausted=exhausted)


# ============================================================================
# Module-level operations
# ============================================================================

def c_lambda_w(cm: CartanMatrix, lam, w: WeylElement, ctx: Optional[PrecisionContext] = None):
    lam = lam if isinstance(lam, SpectralParameter) else SpectralParameter(lam)
    return EisensteinEvaluator(cm, ctx).c_lambda_w(lam, w)


def constant_term(cm: CartanMatrix, lam, point, max_length: int,
                  ctx: Optional[PrecisionContext] = None, force: bool = False, threads: int = 1) -> ShellTable:
    lam = lam if isinstance(lam, SpectralParameter) else SpectralParameter(lam)
    return EisensteinEvaluator(cm, ctx, threads).constant_term(lam, point, max_length, force)


def dominating_series(cm: CartanMatrix, lam, point, m, max_length: int,
                      ctx: Optional[PrecisionContext] = None, force: bool = False, threads: int = 1) -> ShellTable:
    lam = lam if isinstance(lam, SpectralParameter) else SpectralParameter(lam)
    return EisensteinEvaluator(cm, ctx, threads).dominating_series(lam, point, m, max_length, force)


def godement_majorant(cm: CartanMatrix, lam, point, max_length: int,
                      ctx: Optional[PrecisionContext] = None, force: bool = False, threads: int = 1) -> ShellTable:
    lam = lam if isinstance(lam, SpectralParameter) else SpectralParameter(lam)
    return EisensteinEvaluator(cm, ctx, threads).godement_majorant(lam, point, max_length, force)


def looijenga_count(cm: CartanMatrix, mu, points, n_bound, cap_length: Optional[int] = None) -> LooijengaCount:
    return EisensteinEvaluator(cm).looijenga_count(mu, points, n_bound, cap_length)
