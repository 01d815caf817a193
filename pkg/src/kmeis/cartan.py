"""
Generalized Cartan matrices: validation, symmetrizers, the invariant bilinear
form and finite-type detection of principal submatrices.
"""
import logging
from collections import deque
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, List, Sequence, Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from kmeis.errors import InvalidGCM, NotSymmetrizable, SingularMatrix

logger = logging.getLogger(__name__)

IntMatrix = Tuple[Tuple[int, ...], ...]
RationalMatrix = Tuple[Tuple[Fraction, ...], ...]


class CartanMatrix(BaseModel):
    """A validated symmetrizable, nonsingular generalized Cartan matrix.

    Build instances with :func:`validate_gcm`; the constructor itself does not
    re-check the GCM axioms.
    """

    model_config = ConfigDict(frozen=True)

    rank: int = Field(..., ge=1, description="Number of simple roots r")
    entries: IntMatrix = Field(..., description="a_ij = <alpha_j, alpha_i^vee>, row-major")
    symmetrizer: Tuple[int, ...] = Field(
        ..., description="Minimal positive integers d_i with d_i a_ij = d_j a_ji"
    )
    determinant: int = Field(..., description="det(a_ij), never zero")
    det_nonzero: bool = Field(True, description="Always true after validation")

    _inverse: RationalMatrix = PrivateAttr()
    _edges: Tuple[Tuple[int, ...], ...] = PrivateAttr()

    def model_post_init(self, __context) -> None:
        inverse = sympy.Matrix(self.entries).inv()
        self._inverse = tuple(
            tuple(Fraction(int(inverse[i, j].p), int(inverse[i, j].q)) for j in range(self.rank))
            for i in range(self.rank)
        )
        self._edges = tuple(
            tuple(j for j in range(self.rank) if j != i and self.entries[i][j] != 0)
            for i in range(self.rank)
        )

    @property
    def inverse(self) -> RationalMatrix:
        """Exact A^{-1}; converts coroot pairings into simple-root coordinates."""
        return self._inverse

    @property
    def neighbours(self) -> Tuple[Tuple[int, ...], ...]:
        """Dynkin-graph adjacency (0-based): j is adjacent to i iff a_ij != 0."""
        return self._edges

    def a(self, i: int, j: int) -> int:
        return self.entries[i][j]

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i] for i in range(self.rank) for j in range(i))

    def to_list(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def __str__(self) -> str:
        return str(self.to_list())


# ============================================================================
# Validation
# ============================================================================

def _is_sequence(value) -> bool:
    return isinstance(value, (list, tuple))


def _check_shape(matrix: Sequence[Sequence[int]]) -> IntMatrix:
    if not _is_sequence(matrix) or not all(_is_sequence(row) for row in matrix):
        raise InvalidGCM("matrix must be a list of integer rows")
    rows = [list(row) for row in matrix]
    r = len(rows)
    if r == 0:
        raise InvalidGCM("matrix must have rank >= 1")
    for row in rows:
        if len(row) != r:
            raise InvalidGCM(f"matrix is not square: row of length {len(row)} in a {r}-row matrix")
        for entry in row:
            if isinstance(entry, bool) or not isinstance(entry, int):
                raise InvalidGCM(f"entry {entry!r} is not an integer")
    return tuple(tuple(row) for row in rows)


def _check_gcm_axioms(entries: IntMatrix) -> None:
    r = len(entries)
    for i in range(r):
        if entries[i][i] != 2:
            raise InvalidGCM(f"a_{i + 1}{i + 1} = {entries[i][i]}, expected 2")
        for j in range(r):
            if i == j:
                continue
            if entries[i][j] > 0:
                raise InvalidGCM(f"a_{i + 1}{j + 1} = {entries[i][j]} is positive")
            if (entries[i][j] == 0) != (entries[j][i] == 0):
                raise InvalidGCM(
                    f"a_{i + 1}{j + 1} = {entries[i][j]} but a_{j + 1}{i + 1} = {entries[j][i]}"
                )


def _components(entries: IntMatrix) -> List[List[int]]:
    r = len(entries)
    seen = [False] * r
    blocks = []
    for start in range(r):
        if seen[start]:
            continue
        block, queue = [], deque([start])
        seen[start] = True
        while queue:
            i = queue.popleft()
            block.append(i)
            for j in range(r):
                if j != i and entries[i][j] != 0 and not seen[j]:
                    seen[j] = True
                    queue.append(j)
        blocks.append(sorted(block))
    return blocks


def compute_symmetrizer(entries: IntMatrix) -> Tuple[int, ...]:
    """Minimal positive integer d with d_i a_ij = d_j a_ji, block by block.

    Ratios d_j / d_i = a_ij / a_ji are propagated along a BFS spanning tree of
    each indecomposable block; every edge is then checked for consistency.
    """
    r = len(entries)
    d: List[Fraction] = [Fraction(0)] * r
    for block in _components(entries):
        root = block[0]
        d[root] = Fraction(1)
        queue = deque([root])
        assigned = {root}
        while queue:
            i = queue.popleft()
            for j in range(r):
                if j == i or entries[i][j] == 0 or j in assigned:
                    continue
                d[j] = d[i] * Fraction(entries[i][j], entries[j][i])
                assigned.add(j)
                queue.append(j)
        for i in block:
            for j in block:
                if d[i] * entries[i][j] != d[j] * entries[j][i]:
                    raise NotSymmetrizable(
                        f"inconsistent ratio on edge ({i + 1},{j + 1}): "
                        f"d_{i + 1} a_{i + 1}{j + 1} != d_{j + 1} a_{j + 1}{i + 1}"
                    )
        scale = reduce(lcm, (d[i].denominator for i in block), 1)
        scaled = [int(d[i] * scale) for i in block]
        common = reduce(gcd, scaled)
        for i, value in zip(block, scaled):
            d[i] = Fraction(value // common)
    return tuple(int(x) for x in d)


def validate_gcm(matrix: Sequence[Sequence[int]]) -> CartanMatrix:
    """Validate an integer matrix as a symmetrizable nonsingular GCM.

    Args:
        matrix: r x r integer matrix, row-major.

    Returns:
        CartanMatrix with its minimal symmetrizer.

    Raises:
        InvalidGCM, NotSymmetrizable, SingularMatrix
    """
    entries = _check_shape(matrix)
    _check_gcm_axioms(entries)
    symmetrizer = compute_symmetrizer(entries)
    determinant = int(sympy.Matrix(entries).det())
    if determinant == 0:
        raise SingularMatrix(
            "determinant is 0; only nonsingular Cartan matrices are supported "
            "(affine and other singular types are excluded)"
        )
    logger.debug("validated GCM %s: d=%s det=%s", entries, symmetrizer, determinant)
    return CartanMatrix(
        rank=len(entries), entries=entries, symmetrizer=symmetrizer, determinant=determinant
    )


# ============================================================================
# Bilinear form
# ============================================================================

def bilinear_gram(cm: CartanMatrix) -> RationalMatrix:
    """G_ij = (alpha_i | alpha_j) = d_i a_ij; symmetric with G_ii = 2 d_i."""
    d = cm.symmetrizer
    return tuple(
        tuple(Fraction(d[i] * cm.entries[i][j]) for j in range(cm.rank)) for i in range(cm.rank)
    )


def is_finite_type(cm: CartanMatrix, index_subset: Iterable[int]) -> bool:
    """True iff the symmetrized principal submatrix on ``index_subset`` is positive definite.

    Indices are 1-based. The empty subset is of finite type. Checked exactly by
    leading principal minors.
    """
    indices = sorted({int(i) - 1 for i in index_subset})
    if not indices:
        return True
    for i in indices:
        if not 0 <= i < cm.rank:
            raise IndexError(f"index {i + 1} out of range 1..{cm.rank}")
    d = cm.symmetrizer
    gram = sympy.Matrix([[d[i] * cm.entries[i][j] for j in indices] for i in indices])
    return all(gram[:k, :k].det() > 0 for k in range(1, len(indices) + 1))
