"""
Property 1 and admissible words.

An element w satisfies the property when it decomposes as w = v w_beta with
beta simple, l(v) < l(w), and alpha - beta never a root for alpha in Phi_v.
Everything here is exact; the checks only use lattice and Weyl primitives.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from kmeis.cartan import CartanMatrix, validate_gcm
from kmeis.errors import CertificateError, HypothesisViolated, InvalidArgument, NoAdmissibleWord
from kmeis.lattice import DEFAULT_STRING_CAP, RootSystem, RootVector, WeightVector
from kmeis.weyl import WeylElement, WeylGroup

logger = logging.getLogger(__name__)

HOLDS_UP_TO = "holds_up_to"
FAILS_AT = "fails_at"

SUBSET_CAP = 12


# ============================================================================
# Report models
# ============================================================================

class Decomposition(BaseModel):
    v: List[int] = Field(..., description="Canonical reduced word of v = w w_beta")
    beta: int = Field(..., description="1-based index of the simple root beta")


class Violation(BaseModel):
    decomposition: Decomposition
    alpha: List[int] = Field(..., description="alpha in Phi_v, simple-root coordinates")
    alpha_minus_beta: List[int] = Field(..., description="alpha - beta, which is a root")


class ElementCheck(BaseModel):
    word: List[int]
    admissible_via: Optional[Decomposition] = None
    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.admissible_via is not None


class PropertyReport(BaseModel):
    """Certificate for a bounded Property 1 check.

    ``holds_up_to``: every element of length <= ``length`` is admissible.
    ``fails_at``: ``word`` is the shortlex-least failing element and
    ``violations`` covers every one of its decompositions.
    """

    matrix: List[List[int]]
    status: str = Field(..., description="holds_up_to or fails_at")
    length: int
    word: Optional[List[int]] = None
    violations: List[Violation] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS_UP_TO


class AdmissibleWord(BaseModel):
    word: List[int] = Field(..., description="Reduced word satisfying the chain condition")

    @property
    def length(self) -> int:
        return len(self.word)


class Prop42Report(BaseModel):
    matrix: List[List[int]]
    max_length: int
    words_checked: int
    dominance_failures: List[List[int]] = Field(default_factory=list)
    pairing_failures: List[List[int]] = Field(default_factory=list)
    norm_failures: List[List[int]] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not (self.dominance_failures or self.pairing_failures or self.norm_failures)


class Prop43Report(BaseModel):
    a: int
    b: int
    n_max: int
    norm_bound: int = Field(..., description="max(2a, 2b)")
    norm_failures: List[Dict] = Field(default_factory=list)
    root_failures: List[Dict] = Field(default_factory=list)
    recurrence_failures: List[Dict] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not (self.norm_failures or self.root_failures or self.recurrence_failures)


class SubsetInequalityReport(BaseModel):
    word: List[int]
    bound: str = Field(..., description="Exact lower bound that every pairing must exceed")
    minimum: Optional[str] = Field(None, description="Smallest pairing found, p/q")
    subsets_checked: int = 0
    failures: List[Dict] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.failures


# ============================================================================
# Property 1
# ============================================================================

class PropertyChecker:
    """Property 1 machinery bound to one Cartan matrix."""

    def __init__(self, cm: CartanMatrix, weyl: Optional[WeylGroup] = None):
        self.cm = cm
        self.weyl = weyl or WeylGroup(cm)
        self.roots: RootSystem = self.weyl.roots
        self._admissible_cache: Dict[tuple, Optional[Tuple[int, ...]]] = {}

    def decompositions(self, w: WeylElement) -> List[Tuple[WeylElement, int]]:
        """All (v, beta) with v = w w_beta and l(v) = l(w) - 1, beta ascending."""
        out = []
        for beta in self.weyl.right_descents(w):
            v = self.weyl.multiply(w, self.weyl.from_word((beta,)))
            out.append((v, beta))
        return out

    def _violations(self, v: WeylElement, beta: int) -> List[Violation]:
        simple = RootVector.simple(self.cm.rank, beta)
        found = []
        for alpha in self.weyl.phi_w(v):
            diff = alpha - simple
            if self.roots.is_root(diff):
                found.append(
                    Violation(
                        decomposition=Decomposition(v=list(v.word), beta=beta),
                        alpha=list(alpha),
                        alpha_minus_beta=list(diff),
                    )
                )
        return found

    def check_element(self, w: WeylElement) -> ElementCheck:
        """First violation-free decomposition, or the violations of all of them."""
        collected: List[Violation] = []
        for v, beta in self.decompositions(w):
            violations = self._violations(v, beta)
            if not violations:
                return ElementCheck(word=list(w.word), admissible_via=Decomposition(v=list(v.word), beta=beta))
            collected.extend(violations)
        return ElementCheck(word=list(w.word), violations=collected)

    def check_property(self, max_length: int, threads: int = 1) -> PropertyReport:
        if max_length < 1:
            raise InvalidArgument("max_length must be >= 1")
        pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        try:
            for shell in self.weyl.enumerate_shells(max_length, threads):
                if shell.length == 0:
                    continue
                if pool is None:
                    results = map(self.check_element, shell.elements)
                else:
                    results = pool.map(self.check_element, shell.elements)
                for result in results:
                    if not result.ok:
                        logger.info("property fails at %s", result.word)
                        return PropertyReport(
                            matrix=self.cm.to_list(),
                            status=FAILS_AT,
                            length=shell.length,
                            word=result.word,
                            violations=result.violations,
                        )
                logger.info("property holds through length %d", shell.length)
        finally:
            if pool is not None:
                pool.shutdown()
        return PropertyReport(matrix=self.cm.to_list(), status=HOLDS_UP_TO, length=max_length)

    # ------------------------------------------------------------------
    # Admissible words
    # ------------------------------------------------------------------

    def _search(self, w: WeylElement) -> Optional[Tuple[int, ...]]:
        if w.is_identity():
            return ()
        if w.action in self._admissible_cache:
            return self._admissible_cache[w.action]
        found = None
        for v, beta in self.decompositions(w):
            if self._violations(v, beta):
                continue
            prefix = self._search(v)
            if prefix is not None:
                found = prefix + (beta,)
                break
        self._admissible_cache[w.action] = found
        return found

    def is_admissible(self, word: Sequence[int]) -> bool:
        """Reduced, and alpha - beta_{i+1} is never a root for alpha in Phi_{v_i}."""
        word = tuple(word)
        if not self.weyl.is_reduced(word):
            return False
        for i in range(1, len(word)):
            simple = RootVector.simple(self.cm.rank, word[i])
            for alpha in self.weyl.phi_word(word[:i]):
                if self.roots.is_root(alpha - simple):
                    return False
        return True

    def admissible_word(self, w: WeylElement) -> AdmissibleWord:
        """Depth-first search over descents, building the word from the right.

        Raises:
            NoAdmissibleWord: if every branch meets a violation.
        """
        word = self._search(w)
        if word is None or not self.is_admissible(word):
            raise NoAdmissibleWord(w.word)
        if self.weyl.action_of(word) != w.action:
            raise NoAdmissibleWord(w.word)
        return AdmissibleWord(word=list(word))

    # ------------------------------------------------------------------
    # Consequences for admissible words
    # ------------------------------------------------------------------

    def verify_commutation_condition(self, word: Sequence[int]) -> bool:
        """nu_i + nu_j is not a root for all i < j, nu_i = w_{beta_l}...w_{beta_{i+1}} beta_i."""
        nus = self.weyl.inversion_roots(word)
        for x, y in combinations(nus, 2):
            if self.roots.is_root(x + y):
                return False
        return True

    def _prefix_pairings(self, word: Sequence[int], weight: WeightVector):
        """For each prefix v_i: (i, <v_i^{-1}(lambda+rho), beta_{i+1}^vee>, Phi_{v_i} pairings)."""
        rank = self.cm.rank
        shifted = weight + WeightVector.rho(rank)
        for i in range(1, len(word)):
            beta = word[i]
            prefix = tuple(word[:i])
            base = self.weyl.act_on_weight(tuple(reversed(prefix)), shifted)[beta - 1]
            phi = self.weyl.phi_word(prefix)
            pairings = [self.roots.coroot_pairings(alpha)[beta - 1] for alpha in phi]
            yield i, base, phi, pairings

    def _subset_check(self, word: Sequence[int], weight: WeightVector, bound: Fraction,
                      strict: bool) -> SubsetInequalityReport:
        report = SubsetInequalityReport(word=list(word), bound=str(bound))
        minimum = None
        for i, base, phi, pairings in self._prefix_pairings(word, weight):
            beta = word[i]
            simple = RootVector.simple(self.cm.rank, beta)
            for alpha, pairing in zip(phi, pairings):
                # <alpha, beta^vee> = -max{m : alpha + m beta is a root}; long strings are skipped
                if -pairing > self.roots.string_cap:
                    continue
                if pairing != -self.roots.root_string_max(alpha, simple):
                    report.failures.append({"prefix": i, "alpha": list(alpha), "reason": "root string"})
            if len(phi) <= SUBSET_CAP:
                subsets = (
                    subset
                    for size in range(len(phi) + 1)
                    for subset in combinations(range(len(phi)), size)
                )
            else:
                logger.info("prefix %d has |Phi| = %d > %d; checking the extremal subset only",
                            i, len(phi), SUBSET_CAP)
                subsets = iter([tuple(k for k, p in enumerate(pairings) if p < 0)])
            for subset in subsets:
                value = base + sum(pairings[k] for k in subset)
                report.subsets_checked += 1
                if minimum is None or value < minimum:
                    minimum = value
                if (value <= bound) if strict else (value < bound):
                    report.failures.append(
                        {"prefix": i, "subset": [list(phi[k]) for k in subset], "value": str(value)}
                    )
        report.minimum = None if minimum is None else str(minimum)
        return report

    def verify_subset_inequality(self, word: Sequence[int], weight: WeightVector) -> SubsetInequalityReport:
        """<v_i^{-1}(lambda+rho) + sum_S alpha, beta_{i+1}^vee> > 1 for every S in Phi_{v_i}.

        Raises:
            HypothesisViolated: if lambda has a nonpositive coroot pairing.
        """
        weight = WeightVector(weight)
        if not all(c > 0 for c in weight):
            raise HypothesisViolated("lambda must satisfy <lambda, alpha_i^vee> > 0 for all i")
        return self._subset_check(word, weight, Fraction(1), strict=True)

    def verify_rank1_building_block(self, word: Sequence[int], weight: WeightVector) -> SubsetInequalityReport:
        """Same pairings, checked against 1 + epsilon with epsilon = min_i <lambda, alpha_i^vee>."""
        weight = WeightVector(weight)
        if not all(c > 0 for c in weight):
            raise HypothesisViolated("lambda must satisfy <lambda, alpha_i^vee> > 0 for all i")
        return self._subset_check(word, weight, 1 + min(weight), strict=False)

    # ------------------------------------------------------------------
    # Certificates
    # ------------------------------------------------------------------

    def verify_certificate(self, certificate) -> bool:
        """Re-check a PropertyReport (model or dict).

        Raises:
            CertificateError: on the first mismatch.
        """
        report = certificate if isinstance(certificate, PropertyReport) else PropertyReport.model_validate(certificate)
        if report.matrix != self.cm.to_list():
            raise CertificateError("certificate matrix does not match")
        if report.status == HOLDS_UP_TO:
            for w in self.weyl.elements(report.length):
                if w.length and not self.check_element(w).ok:
                    raise CertificateError(f"element {list(w.word)} has no admissible decomposition")
            return True
        if report.status != FAILS_AT:
            raise CertificateError(f"unknown status {report.status!r}")
        if report.word is None or not self.weyl.is_reduced(report.word):
            raise CertificateError("failing word missing or not reduced")
        if len(report.word) != report.length:
            raise CertificateError("length does not match the failing word")
        w = self.weyl.from_word(report.word)
        expected = {beta: v for v, beta in self.decompositions(w)}
        covered = set()
        for violation in report.violations:
            beta = violation.decomposition.beta
            if beta not in expected:
                raise CertificateError(f"beta = {beta} is not a right descent")
            v = expected[beta]
            if self.weyl.action_of(violation.decomposition.v) != v.action:
                raise CertificateError(f"v = {violation.decomposition.v} is not w w_{beta}")
            alpha = RootVector(violation.alpha)
            if alpha not in self.weyl.phi_w(v):
                raise CertificateError(f"alpha = {violation.alpha} is not in Phi_v")
            diff = alpha - RootVector.simple(self.cm.rank, beta)
            if list(diff) != violation.alpha_minus_beta or not self.roots.is_root(diff):
                raise CertificateError(f"alpha - beta = {violation.alpha_minus_beta} is not a root")
            covered.add(beta)
        if covered != set(expected):
            raise CertificateError("some decomposition has no recorded violation")
        return True


# ============================================================================
# Module-level operations
# ============================================================================

def decompositions(cm: CartanMatrix, w: WeylElement) -> List[Tuple[WeylElement, int]]:
    return PropertyChecker(cm).decompositions(w)


def check_element(cm: CartanMatrix, w: WeylElement) -> ElementCheck:
    return PropertyChecker(cm).check_element(w)


def check_property(cm: CartanMatrix, max_length: int, threads: int = 1) -> PropertyReport:
    return PropertyChecker(cm).check_property(max_length, threads)


def admissible_word(cm: CartanMatrix, word: Sequence[int]) -> AdmissibleWord:
    checker = PropertyChecker(cm)
    return checker.admissible_word(checker.weyl.from_word(word))


def verify_commutation_condition(cm: CartanMatrix, word: Sequence[int]) -> bool:
    return PropertyChecker(cm).verify_commutation_condition(word)


def verify_certificate(cm: CartanMatrix, certificate) -> bool:
    return PropertyChecker(cm).verify_certificate(certificate)


def _check_prop42_hypotheses(cm: CartanMatrix) -> None:
    if not cm.is_symmetric():
        raise HypothesisViolated("the Cartan matrix must be symmetric")
    for i in range(cm.rank):
        for j in range(cm.rank):
            if i != j and abs(cm.entries[i][j]) < 2:
                raise HypothesisViolated(f"|a_{i + 1}{j + 1}| = {abs(cm.entries[i][j])} < 2")


def verify_prop42_claims(cm: CartanMatrix, max_length: int, string_cap: int = DEFAULT_STRING_CAP) -> Prop42Report:
    """Exact checks behind the symmetric |a_ij| >= 2 family, for every element up to max_length.

    1. For a reduced word i1..ik (k >= 2), w_{ik}...w_{i2} alpha_{i1} has its
       largest coefficient strictly at i_k.
    2. <alpha, alpha_{il}^vee> < 0 for every alpha in Phi_v, v = w_{i1}...w_{i(l-1)}.
    3. (alpha - alpha_{il} | alpha - alpha_{il}) > 4 for the same alpha.

    Reduced words are unique in these groups, so the canonical word covers each element.
    """
    _check_prop42_hypotheses(cm)
    weyl = WeylGroup(cm, RootSystem(cm, string_cap=string_cap))
    roots = weyl.roots
    report = Prop42Report(matrix=cm.to_list(), max_length=max_length, words_checked=0)
    for w in weyl.elements(max_length):
        if w.length < 2:
            continue
        word = w.word
        report.words_checked += 1
        top = word[-1] - 1
        m = weyl.inversion_roots(word)[-1]
        if any(m[j] >= m[top] for j in range(cm.rank) if j != top):
            report.dominance_failures.append(list(word))
        last = word[-1]
        simple = RootVector.simple(cm.rank, last)
        for alpha in weyl.phi_word(word[:-1]):
            if roots.coroot_pairings(alpha)[last - 1] >= 0:
                report.pairing_failures.append(list(word))
                break
        for alpha in weyl.phi_word(word[:-1]):
            if roots.norm(alpha - simple) <= 4:
                report.norm_failures.append(list(word))
                break
    return report


def verify_prop43_claims(a: int, b: int, n_max: int) -> Prop43Report:
    """Rank-2 family [[2,-b],[-a,2]] with a, b >= 2 and ab >= 5.

    For 0 <= n <= n_max, (w1 w2)^n alpha_1 - alpha_2 and
    (w1 w2)^n w1 alpha_2 - alpha_2 must have norm > max(2a, 2b) under the
    form diag(a, b) A, must not be roots, and both coordinate sequences must
    follow x_{n+1} = (ab - 2) x_n - x_{n-1}.
    """
    if a < 2 or b < 2 or a * b < 5:
        raise HypothesisViolated(f"need a, b >= 2 and ab >= 5, got a={a}, b={b}")
    cm = validate_gcm([[2, -b], [-a, 2]])
    roots = RootSystem(cm)
    scale = (a, b)
    bound = max(2 * a, 2 * b)

    def scaled_norm(v: Sequence[int]) -> int:
        return sum(v[i] * v[j] * scale[i] * cm.entries[i][j] for i in range(2) for j in range(2))

    def step(v):
        return roots.reflect_root(roots.reflect_root(v, 2), 1)

    alpha2 = RootVector((0, 1))
    first = [RootVector((1, 0))]
    second = [roots.reflect_root(alpha2, 1)]
    for _ in range(n_max):
        first.append(step(first[-1]))
        second.append(step(second[-1]))

    report = Prop43Report(a=a, b=b, n_max=n_max, norm_bound=bound)
    for label, sequence in (("alpha_1", first), ("w1 alpha_2", second)):
        for n, root in enumerate(sequence):
            diff = root - alpha2
            value = scaled_norm(diff)
            if value <= bound:
                report.norm_failures.append({"sequence": label, "n": n, "norm": value})
            if roots.is_root(diff):
                report.root_failures.append({"sequence": label, "n": n, "difference": list(diff)})
            if n >= 2:
                predicted = (a * b - 2) * sequence[n - 1] - sequence[n - 2]
                if predicted != root:
                    report.recurrence_failures.append({"sequence": label, "n": n})
    return report
