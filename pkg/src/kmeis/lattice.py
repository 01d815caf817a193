"""
Exact arithmetic on the root lattice, the weight space and the Cartan
subalgebra of a Kac-Moody root system.

Three coordinate systems are used throughout:

* ``RootVector``  -- integer coordinates m_i in the simple-root basis;
* ``WeightVector`` -- rational coroot pairings c_i = <lambda, alpha_i^vee>;
* ``PointH``      -- rational simple-root evaluations x_i = <alpha_i, H>.

Generator indices are 1-based in every public signature. No floating point is
used in this module.
"""
import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from kmeis.cartan import CartanMatrix
from kmeis.errors import CapExceeded, NotRealRoot

logger = logging.getLogger(__name__)

DEFAULT_STRING_CAP = 64


# ============================================================================
# Coordinate types
# ============================================================================

class RootVector(tuple):
    """Element sum m_i alpha_i of the root lattice."""

    __slots__ = ()

    def __new__(cls, coords: Iterable[int]):
        return super().__new__(cls, (int(c) for c in coords))

    @classmethod
    def simple(cls, rank: int, i: int) -> "RootVector":
        return cls(1 if j == i - 1 else 0 for j in range(rank))

    @classmethod
    def zero(cls, rank: int) -> "RootVector":
        return cls([0] * rank)

    @property
    def height(self) -> int:
        return sum(self)

    def is_zero(self) -> bool:
        return not any(self)

    def is_positive(self) -> bool:
        return any(self) and all(m >= 0 for m in self)

    def support(self) -> Tuple[int, ...]:
        """1-based indices of the nonzero coordinates."""
        return tuple(i + 1 for i, m in enumerate(self) if m)

    def __add__(self, other):
        return RootVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return RootVector(a - b for a, b in zip(self, other))

    def __neg__(self):
        return RootVector(-a for a in self)

    def __rmul__(self, k: int):
        return RootVector(k * a for a in self)

    def __repr__(self) -> str:
        return f"RootVector({list(self)})"


class WeightVector(tuple):
    """A weight lambda stored by its coroot pairings c_i = <lambda, alpha_i^vee>."""

    __slots__ = ()

    def __new__(cls, pairings: Iterable):
        return super().__new__(cls, (Fraction(c) for c in pairings))

    @classmethod
    def rho(cls, rank: int) -> "WeightVector":
        return cls([1] * rank)

    def __add__(self, other):
        return WeightVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return WeightVector(a - b for a, b in zip(self, other))

    def __rmul__(self, k):
        return WeightVector(Fraction(k) * a for a in self)

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self)

    def __repr__(self) -> str:
        return f"WeightVector({[str(c) for c in self]})"


class PointH(tuple):
    """A point H of the Cartan subalgebra stored by x_i = <alpha_i, H>; a = exp(H)."""

    __slots__ = ()

    def __new__(cls, values: Iterable):
        return super().__new__(cls, (Fraction(x) for x in values))

    def is_dominant(self) -> bool:
        return all(x >= 0 for x in self)

    def is_strictly_dominant(self) -> bool:
        return all(x > 0 for x in self)

    def __repr__(self) -> str:
        return f"PointH({[str(x) for x in self]})"


# ============================================================================
# Root system
# ============================================================================

class RootSystem:
    """Root-lattice arithmetic for a validated Cartan matrix.

    Root membership answers are memoised per instance. Concurrent readers may race on a cache
    miss; both store the same answer.
    """

    def __init__(self, cm: CartanMatrix, string_cap: int = DEFAULT_STRING_CAP):
        self.cm = cm
        self.rank = cm.rank
        self.string_cap = string_cap
        self._a = cm.entries
        self._d = cm.symmetrizer
        self._root_cache: Dict[Tuple[int, ...], bool] = {}
        self._real_cache: Dict[Tuple[int, ...], bool] = {}

    # ------------------------------------------------------------------
    # Pairings and the invariant form
    # ------------------------------------------------------------------

    def coroot_pairings(self, v: Sequence[int]) -> Tuple[int, ...]:
        """(<v, alpha_i^vee>)_i = (sum_j a_ij m_j)_i."""
        a = self._a
        return tuple(sum(a[i][j] * v[j] for j in range(self.rank)) for i in range(self.rank))

    def weight_of(self, v: Sequence[int]) -> WeightVector:
        """The element v of the root lattice viewed as a weight."""
        return WeightVector(self.coroot_pairings(v))

    def norm(self, v: Sequence[int]) -> Fraction:
        """(v|v) = sum_ij m_i m_j d_i a_ij."""
        a, d, r = self._a, self._d, self.rank
        return Fraction(sum(v[i] * v[j] * d[i] * a[i][j] for i in range(r) for j in range(r)))

    def form_with_weight(self, weight: Sequence, v: Sequence[int]) -> Fraction:
        """(lambda|v) = sum_i m_i d_i c_i."""
        return Fraction(sum(v[i] * self._d[i] * Fraction(weight[i]) for i in range(self.rank)))

    def pair_coroot(self, weight: Sequence, alpha: Sequence[int]) -> Fraction:
        """<lambda, alpha^vee> = 2(lambda|alpha)/(alpha|alpha) for a real root alpha.

        Raises:
            NotRealRoot: if (alpha|alpha) <= 0.
        """
        n = self.norm(alpha)
        if n <= 0:
            raise NotRealRoot(alpha)
        return 2 * self.form_with_weight(weight, alpha) / n

    def to_root_coords(self, weight: Sequence) -> Tuple[Fraction, ...]:
        """Exact m = A^{-1} c."""
        inv = self.cm.inverse
        return tuple(
            sum((inv[i][j] * Fraction(weight[j]) for j in range(self.rank)), Fraction(0))
            for i in range(self.rank)
        )

    @staticmethod
    def evaluate(root_coords: Sequence, point: Sequence) -> Fraction:
        """<mu, H> = sum_i m_i x_i."""
        return sum((Fraction(m) * Fraction(x) for m, x in zip(root_coords, point)), Fraction(0))

    def weight_at(self, weight: Sequence, point: Sequence) -> Fraction:
        """<lambda, H> for lambda given by coroot pairings."""
        return self.evaluate(self.to_root_coords(weight), point)

    # ------------------------------------------------------------------
    # Simple reflections
    # ------------------------------------------------------------------

    def reflect_root(self, v: Sequence[int], i: int) -> RootVector:
        """w_i v: m_i' = m_i - sum_j a_ij m_j."""
        k = i - 1
        row = self._a[k]
        pairing = sum(row[j] * v[j] for j in range(self.rank))
        out = list(v)
        out[k] -= pairing
        return RootVector(out)

    def reflect_weight(self, weight: Sequence, i: int) -> WeightVector:
        """w_i lambda: c_k' = c_k - c_i a_ki."""
        k = i - 1
        ci = Fraction(weight[k])
        return WeightVector(Fraction(weight[j]) - ci * self._a[j][k] for j in range(self.rank))

    def reflect_point(self, point: Sequence, i: int) -> PointH:
        """w_i H: x_j' = x_j - x_i a_ij."""
        k = i - 1
        xi = Fraction(point[k])
        row = self._a[k]
        return PointH(Fraction(point[j]) - xi * row[j] for j in range(self.rank))

    # ------------------------------------------------------------------
    # Root membership
    # ------------------------------------------------------------------

    def _is_simple(self, v: Sequence[int]) -> bool:
        return sum(v) == 1 and all(m in (0, 1) for m in v)

    def _reduce(self, v: Sequence[int]) -> Tuple[str, Tuple[int, ...]]:
        """Height-reduce a nonzero same-sign vector.

        Returns ("simple", v'), ("stalled", v') when every coroot pairing is
        <= 0, or ("rejected", v') when a reflection produced a negative entry.
        """
        current = tuple(abs(m) for m in v)
        cap = 10 * max(sum(current), 1)
        for _ in range(cap):
            if self._is_simple(current):
                return "simple", current
            pairings = self.coroot_pairings(current)
            step = next((i for i, p in enumerate(pairings) if p > 0), None)
            if step is None:
                return "stalled", current
            reduced = list(current)
            reduced[step] -= pairings[step]
            if reduced[step] < 0:
                return "rejected", tuple(reduced)
            current = tuple(reduced)
        raise CapExceeded("height reduction", cap)

    @staticmethod
    def _same_sign(v: Sequence[int]) -> bool:
        return any(v) and (all(m >= 0 for m in v) or all(m <= 0 for m in v))

    def is_real_root(self, v: Sequence[int]) -> bool:
        """True iff v is a real root (Weyl-conjugate to a simple root)."""
        key = tuple(v)
        cached = self._real_cache.get(key)
        if cached is not None:
            return cached
        result = self._same_sign(key) and self._reduce(key)[0] == "simple"
        self._real_cache[key] = result
        return result

    def support_connected(self, v: Sequence[int]) -> bool:
        """Connectivity of supp(v) in the Dynkin graph (edges a_ij != 0)."""
        support = {i for i, m in enumerate(v) if m}
        if not support:
            return False
        start = next(iter(support))
        seen, stack = {start}, [start]
        while stack:
            i = stack.pop()
            for j in self.cm.neighbours[i]:
                if j in support and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen == support

    def in_fundamental_imaginary_cone(self, v: Sequence[int]) -> bool:
        """Positive, connected support, and every <v, alpha_i^vee> <= 0."""
        return (
            RootVector(v).is_positive()
            and all(p <= 0 for p in self.coroot_pairings(v))
            and self.support_connected(v)
        )

    def is_root(self, v: Sequence[int]) -> bool:
        """True iff v is a (real or imaginary) root.

        Imaginary roots are recognised by reduction into the fundamental
        imaginary cone; this characterisation is used for symmetrizable
        matrices only.
        """
        key = tuple(v)
        cached = self._root_cache.get(key)
        if cached is not None:
            return cached
        if not self._same_sign(key):
            result = False
        else:
            outcome, final = self._reduce(key)
            if outcome == "simple":
                result = True
            elif outcome == "stalled":
                result = self.in_fundamental_imaginary_cone(final)
            else:
                result = False
        self._root_cache[key] = result
        return result

    def root_string_max(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        """max{m >= 0 : alpha + m beta is a root}.

        Raises:
            CapExceeded: if the string is still going after ``string_cap`` steps.
        """
        alpha, beta = RootVector(alpha), RootVector(beta)
        current = alpha
        for m in range(self.string_cap + 1):
            candidate = current + beta
            if not self.is_root(candidate):
                return m
            current = candidate
        raise CapExceeded(f"root string {list(alpha)} + m*{list(beta)}", self.string_cap)

    def positive_roots(self, max_height: int) -> Iterator[RootVector]:
        """All positive roots of height <= max_height, by height then lexicographically."""
        for h in range(1, max_height + 1):
            for coords in sorted(compositions(h, self.rank)):
                if self.is_root(coords):
                    yield RootVector(coords)

    def max_simple_norm(self) -> Fraction:
        return Fraction(max(2 * d for d in self._d))


def compositions(total: int, parts: int) -> List[Tuple[int, ...]]:
    """Nonnegative integer vectors of length ``parts`` summing to ``total``."""
    out = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        previous = -1
        coords = []
        for b in bars:
            coords.append(b - previous - 1)
            previous = b
        coords.append(total + parts - 1 - previous - 1)
        out.append(tuple(coords))
    return out
