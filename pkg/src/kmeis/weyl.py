"""
Weyl group of a Kac-Moody root system.

Elements are keyed by their integer action matrix on simple-root coordinates
(faithful because the Cartan matrix is nonsingular) and carry the
shortlex-minimal reduced word. Words are tuples of 1-based generator indices;
the word (i1, ..., il) denotes w_{i1} ... w_{il}, acting right to left.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from kmeis.cartan import CartanMatrix, is_finite_type
from kmeis.errors import InvalidArgument, NotReduced
from kmeis.lattice import PointH, RootSystem, RootVector, WeightVector

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]
Word = Tuple[int, ...]

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE_PRESUMED = "outside_presumed"


@dataclass(frozen=True)
class WeylElement:
    """A group element; equality and hashing use the action matrix only."""

    action: Matrix
    word: Word = field(compare=False)
    length: int = field(compare=False)

    def column(self, j: int) -> RootVector:
        """w alpha_j for a 1-based generator index j."""
        return RootVector(row[j - 1] for row in self.action)

    def is_identity(self) -> bool:
        return self.length == 0

    def to_dict(self) -> Dict:
        return {"word": list(self.word), "length": self.length}


@dataclass(frozen=True)
class Shell:
    length: int
    elements: Tuple[WeylElement, ...]

    @property
    def count(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class TitsReduction:
    """``dominant == act_on_point(word, x)`` with ``steps`` reflections used."""

    dominant: PointH
    word: Word
    classification: str
    steps: int

    def to_dict(self) -> Dict:
        return {
            "dominant": [str(x) for x in self.dominant],
            "word": list(self.word),
            "classification": self.classification,
            "steps": self.steps,
        }


# ============================================================================
# Matrix helpers (root coordinates)
# ============================================================================

def _identity(rank: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank))


def _times_generator(action: Matrix, a: Matrix, i: int) -> Matrix:
    """action . S_i: column k becomes col_k - a_ik col_i (0-based i)."""
    row_i = a[i]
    return tuple(
        tuple(row[k] - row_i[k] * row[i] for k in range(len(row))) for row in action
    )


def _column_positive(action: Matrix, j: int) -> bool:
    """True iff w alpha_j is a positive root (0-based j)."""
    return any(row[j] > 0 for row in action)


# ============================================================================
# Weyl group
# ============================================================================

class WeylGroup:
    def __init__(self, cm: CartanMatrix, roots: Optional[RootSystem] = None):
        self.cm = cm
        self.rank = cm.rank
        self.roots = roots or RootSystem(cm)
        self._a = cm.entries

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def identity(self) -> WeylElement:
        return WeylElement(_identity(self.rank), (), 0)

    def action_of(self, word: Sequence[int]) -> Matrix:
        self._check_letters(word)
        action = _identity(self.rank)
        for i in word:
            action = _times_generator(action, self._a, i - 1)
        return action

    def from_action(self, action: Matrix) -> WeylElement:
        """Element with the given action matrix and its shortlex-minimal reduced word."""
        # any reduced word first, from right descents
        letters: List[int] = []
        current = action
        while current != _identity(self.rank):
            j = next(j for j in range(self.rank) if not _column_positive(current, j))
            current = _times_generator(current, self._a, j)
            letters.append(j + 1)
        # inverse of w is the reversed word
        inverse = _identity(self.rank)
        for i in letters:
            inverse = _times_generator(inverse, self._a, i - 1)
        # greedy smallest left descent
        word: List[int] = []
        for _ in range(len(letters)):
            i = next(i for i in range(self.rank) if not _column_positive(inverse, i))
            word.append(i + 1)
            inverse = _times_generator(inverse, self._a, i)
        return WeylElement(action, tuple(word), len(word))

    def from_word(self, word: Sequence[int]) -> WeylElement:
        """The element represented by ``word`` (reduced or not), in canonical form."""
        return self.from_action(self.action_of(word))

    def multiply(self, u: WeylElement, v: WeylElement) -> WeylElement:
        action = u.action
        for i in v.word:
            action = _times_generator(action, self._a, i - 1)
        return self.from_action(action)

    def inverse(self, w: WeylElement) -> WeylElement:
        return self.from_word(tuple(reversed(w.word)))

    def _check_letters(self, word: Sequence[int]) -> None:
        for i in word:
            if not 1 <= i <= self.rank:
                raise InvalidArgument(f"generator index {i} out of range 1..{self.rank}")

    # ------------------------------------------------------------------
    # Descents, reducedness, inversion sets
    # ------------------------------------------------------------------

    def right_descents(self, w: WeylElement) -> Tuple[int, ...]:
        """Indices i (ascending) with l(w w_i) < l(w), i.e. w alpha_i < 0."""
        return tuple(i + 1 for i in range(self.rank) if not _column_positive(w.action, i))

    def left_descents(self, w: WeylElement) -> Tuple[int, ...]:
        """Indices i (ascending) with l(w_i w) < l(w)."""
        return self.right_descents(self.inverse(w))

    def inversion_roots(self, word: Sequence[int]) -> List[RootVector]:
        """[alpha_{il}, w_{il} alpha_{il-1}, ..., w_{il}...w_{i2} alpha_{i1}] for any word."""
        self._check_letters(word)
        out = []
        for k in range(len(word) - 1, -1, -1):
            root = RootVector.simple(self.rank, word[k])
            for j in word[k + 1:]:
                root = self.roots.reflect_root(root, j)
            out.append(root)
        return out

    def is_reduced(self, word: Sequence[int]) -> bool:
        return all(root.is_positive() for root in self.inversion_roots(word))

    def phi_word(self, word: Sequence[int]) -> List[RootVector]:
        """Phi_w for a specific reduced word.

        Raises:
            NotReduced: if some listed root is negative.
        """
        roots = self.inversion_roots(word)
        if not all(root.is_positive() for root in roots):
            raise NotReduced(word)
        return roots

    def phi_w(self, w: WeylElement) -> List[RootVector]:
        return self.phi_word(w.word)

    def rho_minus_w_rho(self, w: WeylElement) -> RootVector:
        """Sum of Phi_{w^{-1}}, which equals rho - w rho."""
        total = RootVector.zero(self.rank)
        for root in self.phi_word(tuple(reversed(w.word))):
            total = total + root
        return total

    # ------------------------------------------------------------------
    # Actions
    # ------------------------------------------------------------------

    def act_on_root(self, w: WeylElement, v: Sequence[int]) -> RootVector:
        return RootVector(sum(row[j] * v[j] for j in range(self.rank)) for row in w.action)

    def act_on_weight(self, w, weight: Sequence) -> WeightVector:
        """Apply the stored word right to left; ``w`` may also be a bare word."""
        out = WeightVector(weight)
        for i in reversed(_word_of(w)):
            out = self.roots.reflect_weight(out, i)
        return out

    def act_on_point(self, w, point: Sequence) -> PointH:
        out = PointH(point)
        for i in reversed(_word_of(w)):
            out = self.roots.reflect_point(out, i)
        return out

    # ------------------------------------------------------------------
    # Enumeration by length
    # ------------------------------------------------------------------

    def _successors(self, chunk: Sequence[WeylElement]) -> List[Tuple[Word, Matrix]]:
        out = []
        for w in chunk:
            for i in range(self.rank):
                if _column_positive(w.action, i):
                    out.append((w.word + (i + 1,), _times_generator(w.action, self._a, i)))
        return out

    def _next_shell(self, shell: Shell, pool: Optional[ThreadPoolExecutor], threads: int) -> Shell:
        elements = shell.elements
        if pool is None or len(elements) < 2 * threads:
            batches = [self._successors(elements)]
        else:
            size = -(-len(elements) // threads)
            chunks = [elements[k:k + size] for k in range(0, len(elements), size)]
            batches = list(pool.map(self._successors, chunks))
        seen: Dict[Matrix, WeylElement] = {}
        for batch in batches:
            for word, action in batch:
                if action not in seen:
                    seen[action] = WeylElement(action, word, shell.length + 1)
        return Shell(shell.length + 1, tuple(seen.values()))

    def enumerate_shells(self, max_length: int, threads: int = 1) -> Iterator[Shell]:
        """Yield the shells of length 0..max_length in order.

        Shell l+1 is built from shell l by right multiplication with the
        generators that increase length, in ascending order; the first word
        reaching an action matrix is kept. Because shell l is itself in
        lexicographic order of canonical words, so is shell l+1, and every
        stored word is shortlex-minimal. Finite groups stop at their longest
        element.
        """
        if max_length < 0:
            raise InvalidArgument("max_length must be >= 0")
        shell = Shell(0, (self.identity(),))
        pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        try:
            yield shell
            for _ in range(max_length):
                shell = self._next_shell(shell, pool, threads)
                if not shell.elements:
                    return
                logger.info("shell %d: %d elements", shell.length, shell.count)
                yield shell
        finally:
            if pool is not None:
                pool.shutdown()

    def elements(self, max_length: int, threads: int = 1) -> Iterator[WeylElement]:
        for shell in self.enumerate_shells(max_length, threads):
            yield from shell.elements

    def shell_counts(self, max_length: int, threads: int = 1) -> List[int]:
        return [shell.count for shell in self.enumerate_shells(max_length, threads)]

    # ------------------------------------------------------------------
    # Tits cone
    # ------------------------------------------------------------------

    def tits_reduce(self, point: Sequence, cap: int = 10000) -> TitsReduction:
        """Reflect ``point`` into the closed dominant chamber.

        Each step reflects in the smallest i with x_i < 0. A dominant result is
        ``interior`` when its zero set spans a finite-type submatrix and
        ``boundary`` otherwise. Reaching ``cap`` gives ``outside_presumed``:
        the reduction terminates exactly on the Tits cone, but no a-priori
        step bound is known.
        """
        if cap < 1:
            raise InvalidArgument("cap must be >= 1")
        current = PointH(point)
        letters: List[int] = []
        for _ in range(cap + 1):
            step = next((i for i, x in enumerate(current) if x < 0), None)
            if step is None:
                zeros = [i + 1 for i, x in enumerate(current) if x == 0]
                kind = INTERIOR if is_finite_type(self.cm, zeros) else BOUNDARY
                return TitsReduction(current, tuple(reversed(letters)), kind, len(letters))
            if len(letters) == cap:
                break
            current = self.roots.reflect_point(current, step + 1)
            letters.append(step + 1)
        logger.warning("Tits reduction hit cap=%d; point presumed outside the Tits cone", cap)
        return TitsReduction(current, tuple(reversed(letters)), OUTSIDE_PRESUMED, len(letters))


def _word_of(w) -> Word:
    return w.word if isinstance(w, WeylElement) else tuple(w)
