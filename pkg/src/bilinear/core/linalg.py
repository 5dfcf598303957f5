"""Dense exact linear algebra over ``Fraction``.

Matrices are row-major tuples of tuples and vectors are tuples, so every value
is immutable and safe to share. Rank and square solves run fraction-free
(Bareiss) elimination on integer rows: each row is first scaled by the lcm of
its denominators, which changes neither the rank nor the solution set.
"""

import logging
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

from bilinear.core.rational import RatMatrix, RatVector, parse_rational
from bilinear.errors import DimensionMismatch, RankExceeded

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


# ============================================================================
# CONSTRUCTION
# ============================================================================


def as_vector(values: Iterable[Any]) -> RatVector:
    """Coerce an iterable of ints / Fractions / "p/q" strings into a vector."""
    return tuple(parse_rational(v) for v in values)


def as_matrix(rows: Iterable[Iterable[Any]], cols: int | None = None) -> RatMatrix:
    """Coerce nested iterables into a rectangular matrix.

    Args:
        rows: Row-major entries.
        cols: Expected column count; required to be consistent when given.

    Raises:
        DimensionMismatch: If the rows have different lengths.
    """
    matrix = tuple(as_vector(row) for row in rows)
    widths = {len(row) for row in matrix}
    if cols is not None:
        widths.add(cols)
    if len(widths) > 1:
        raise DimensionMismatch(f"Ragged matrix: row lengths {sorted(widths)}")
    return matrix


def zeros(rows: int, cols: int) -> RatMatrix:
    return tuple((ZERO,) * cols for _ in range(rows))


def zero_vector(n: int) -> RatVector:
    return (ZERO,) * n


def ones_vector(n: int) -> RatVector:
    return (ONE,) * n


def identity(n: int) -> RatMatrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def unit_vector(n: int, i: int) -> RatVector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def shape(m: RatMatrix, cols: int = 0) -> tuple[int, int]:
    """(rows, cols); ``cols`` is the fallback width of a matrix with no rows."""
    return len(m), (len(m[0]) if m else cols)


# ============================================================================
# ARITHMETIC
# ============================================================================


def transpose(m: RatMatrix, cols: int = 0) -> RatMatrix:
    _, width = shape(m, cols)
    return tuple(tuple(row[j] for row in m) for j in range(width))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def matvec(m: RatMatrix, v: Sequence[Fraction]) -> RatVector:
    """m · v."""
    return tuple(dot(row, v) for row in m)


def vecmat(v: Sequence[Fraction], m: RatMatrix, cols: int = 0) -> RatVector:
    """vᵀ · m as a vector."""
    if len(v) != len(m):
        raise DimensionMismatch(f"vecmat of length {len(v)} with {len(m)} rows")
    _, width = shape(m, cols)
    return tuple(
        sum((v[i] * m[i][j] for i in range(len(m)) if v[i] and m[i][j]), ZERO)
        for j in range(width)
    )


def bilinear_form(x: Sequence[Fraction], m: RatMatrix, y: Sequence[Fraction]) -> Fraction:
    """xᵀ · m · y."""
    return dot(x, matvec(m, y))


def matmul(a: RatMatrix, b: RatMatrix, cols: int = 0) -> RatMatrix:
    bt = transpose(b, cols)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def add_matrices(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    if shape(a) != shape(b):
        raise DimensionMismatch(f"Cannot add {shape(a)} and {shape(b)}")
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def add_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatVector:
    if len(u) != len(v):
        raise DimensionMismatch(f"Cannot add lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatVector:
    if len(u) != len(v):
        raise DimensionMismatch(f"Cannot subtract lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def scale_vector(c: Fraction, v: Sequence[Fraction]) -> RatVector:
    return tuple(c * a for a in v)


def scale_matrix(c: Fraction, m: RatMatrix) -> RatMatrix:
    return tuple(tuple(c * a for a in row) for row in m)


def negate(m: RatMatrix) -> RatMatrix:
    return scale_matrix(Fraction(-1), m)


def outer(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatMatrix:
    return tuple(tuple(a * b for b in v) for a in u)


def hstack(*blocks: RatMatrix) -> RatMatrix:
    """Concatenate matrices with equal row counts side by side."""
    heights = {len(b) for b in blocks}
    if len(heights) != 1:
        raise DimensionMismatch(f"hstack of heights {sorted(heights)}")
    return tuple(sum((tuple(b[i]) for b in blocks), ()) for i in range(heights.pop()))


def vstack(*blocks: RatMatrix) -> RatMatrix:
    """Stack matrices with equal column counts (empty blocks are skipped)."""
    rows = tuple(row for b in blocks for row in b)
    if len({len(r) for r in rows}) > 1:
        raise DimensionMismatch("vstack of matrices with different widths")
    return rows


def block_matrix(grid: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
    """Assemble a block matrix from a grid of equally-aligned blocks."""
    return vstack(*(hstack(*row) for row in grid))


def block_diagonal(blocks: Sequence[RatMatrix], widths: Sequence[int]) -> RatMatrix:
    """Block-diagonal matrix; ``widths`` gives each block's column count."""
    total = sum(widths)
    rows: list[RatVector] = []
    offset = 0
    for block, width in zip(blocks, widths):
        for row in block:
            rows.append((ZERO,) * offset + tuple(row) + (ZERO,) * (total - offset - width))
        offset += width
    return tuple(rows)


def max_abs_entry(*arrays: RatMatrix | RatVector) -> Fraction:
    """|X| = max absolute entry over all given matrices/vectors (0 if all empty)."""
    best = ZERO
    for array in arrays:
        for item in array:
            if isinstance(item, tuple):
                for value in item:
                    best = max(best, abs(value))
            else:
                best = max(best, abs(item))
    return best


def is_zero_matrix(m: RatMatrix) -> bool:
    return all(value == 0 for row in m for value in row)


# ============================================================================
# FRACTION-FREE ELIMINATION
# ============================================================================


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    result = []
    for row in rows:
        scale = 1
        for value in row:
            scale = math.lcm(scale, value.denominator)
        result.append([int(value * scale) for value in row])
    return result


def _bareiss_forward(a: list[list[int]], pivot_cols: int) -> tuple[int, list[int]]:
    """In-place fraction-free forward elimination.

    Pivots are searched in the first ``pivot_cols`` columns; later columns
    (e.g. an augmented right-hand side) are carried along. All divisions by the
    previous pivot are exact.

    Returns:
        (rank, list of pivot column indices)
    """
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    rank = 0
    previous = 1
    pivots: list[int] = []
    for col in range(pivot_cols):
        if rank == nrows:
            break
        pivot_row = next((r for r in range(rank, nrows) if a[r][col] != 0), None)
        if pivot_row is None:
            continue
        a[rank], a[pivot_row] = a[pivot_row], a[rank]
        pivot = a[rank][col]
        for r in range(rank + 1, nrows):
            factor = a[r][col]
            row = a[r]
            top = a[rank]
            for c in range(col + 1, ncols):
                row[c] = (pivot * row[c] - factor * top[c]) // previous
            row[col] = 0
        # Rows above the current pivot keep their (scaled) values; only the
        # trailing block is reduced, which is all rank and back-substitution need.
        previous = pivot
        pivots.append(col)
        rank += 1
    return rank, pivots


def matrix_rank(m: RatMatrix) -> int:
    """Exact rank via Bareiss elimination; 0 for empty or zero matrices."""
    if not m or not m[0]:
        return 0
    rows = _integer_rows(m)
    rank, _ = _bareiss_forward(rows, len(rows[0]))
    return rank


def solve_square(m: RatMatrix, b: Sequence[Fraction]) -> RatVector | None:
    """Solve m·z = b for a square m exactly; None when m is singular."""
    n = len(m)
    if n == 0:
        return ()
    if any(len(row) != n for row in m) or len(b) != n:
        raise DimensionMismatch(f"solve_square needs n x n and length n, got {shape(m)}, {len(b)}")
    augmented = _integer_rows([tuple(row) + (rhs,) for row, rhs in zip(m, b)])
    rank, pivots = _bareiss_forward(augmented, n)
    if rank < n:
        return None
    solution = [ZERO] * n
    for i in range(n - 1, -1, -1):
        col = pivots[i]
        acc = Fraction(augmented[i][n])
        for j in range(col + 1, n):
            if augmented[i][j]:
                acc -= augmented[i][j] * solution[j]
        solution[col] = acc / augmented[i][col]
    return tuple(solution)


def independent_rows(
    m: RatMatrix, rhs: Sequence[Fraction] | None = None
) -> tuple[list[int], bool]:
    """Greedy first-found maximal set of linearly independent rows.

    Rows are reduced one at a time against the echelon form of the rows kept
    so far, so the whole pass costs a single elimination.

    Args:
        m: The coefficient matrix.
        rhs: Optional right-hand side; when given, dropped rows are checked for
            consistency (rank of [m | rhs] equals rank of m).

    Returns:
        (indices of kept rows in increasing order, consistent flag)
    """
    kept: list[int] = []
    echelon: list[tuple[int, list[Fraction]]] = []
    consistent = True
    for i, row in enumerate(m):
        reduced = [Fraction(v) for v in row] + [Fraction(rhs[i]) if rhs is not None else ZERO]
        for col, basis_row in echelon:
            factor = reduced[col]
            if factor:
                reduced = [a - factor * b if b else a for a, b in zip(reduced, basis_row)]
        col = next((j for j, v in enumerate(reduced[:-1]) if v != 0), None)
        if col is None:
            if reduced[-1] != 0:
                consistent = False
            continue
        pivot = reduced[col]
        echelon.append((col, [v / pivot for v in reduced]))
        kept.append(i)
    return kept, consistent


def rank_factorize(m: RatMatrix, k: int) -> list[tuple[RatVector, RatVector]]:
    """Exact factorization m = Σ α(i)·β(i)ᵀ with rank(m) pairs.

    The β(i) are the first rank(m) linearly independent rows of m (lowest
    index first); α(i) holds each row's coordinates in that row basis, found
    on the first independent columns of the basis rows.

    Raises:
        RankExceeded: If rank(m) > k.
    """
    rank = matrix_rank(m)
    if rank > k:
        raise RankExceeded(f"Matrix has rank {rank} > {k}")
    if rank == 0:
        return []

    basis_idx, _ = independent_rows(m)
    basis = tuple(m[i] for i in basis_idx)
    column_idx, _ = independent_rows(transpose(basis))
    # square nonsingular block of the basis rows
    square_t = tuple(tuple(basis[r][c] for r in range(rank)) for c in column_idx)

    coefficients: list[RatVector] = []
    for row in m:
        target = tuple(row[c] for c in column_idx)
        coeff = solve_square(square_t, target)
        if coeff is None:  # pragma: no cover - square block is nonsingular by construction
            raise RankExceeded("Basis block became singular")
        coefficients.append(coeff)

    pairs = []
    for i in range(rank):
        alpha = tuple(coeff[i] for coeff in coefficients)
        pairs.append((alpha, basis[i]))
    logger.debug(f"rank_factorize: rank {rank}, basis rows {basis_idx}, columns {column_idx}")
    return pairs


def reconstruct(pairs: Sequence[tuple[RatVector, RatVector]], rows: int, cols: int) -> RatMatrix:
    """Σ α(i)·β(i)ᵀ (the zero matrix for no pairs)."""
    result = [[ZERO] * cols for _ in range(rows)]
    for alpha, beta in pairs:
        for i, a in enumerate(alpha):
            if a:
                for j, b in enumerate(beta):
                    result[i][j] += a * b
    return tuple(tuple(row) for row in result)


def denominator_bound(z: int, l: int) -> int:
    """Δ = l!·Zˡ, the bound on vertex denominators of the path polytope."""
    if z < 1 or l < 1:
        raise ValueError(f"denominator_bound needs Z >= 1 and l >= 1, got Z={z}, l={l}")
    return math.factorial(l) * z**l
