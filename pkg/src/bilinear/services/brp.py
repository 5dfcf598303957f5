"""Best response polytopes, labels and exhaustive vertex enumeration.

P lives over (y, p):   A_i·y - (Eᵀp)_i <= 0   label i        (i = 1..M)
                       -y_j <= 0              label M + j    (j = 1..N)
                       Fy = f
Q lives over (x, q):   -x_i <= 0              label i
                       (xᵀB)_j - (qᵀF)_j <= 0 label M + j
                       Ex = e
Q′ lives over (x, λ, q) and replaces (xᵀB)_j by -(xᵀA)_j + λ·β_j.

A pair of points is an equilibrium iff the union of their labels is 1..M+N.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from bilinear.core.linalg import ZERO, dot, matrix_rank, solve_square, transpose
from bilinear.core.lp import LinearProgram
from bilinear.core.rational import RatVector
from bilinear.errors import PointNotInPolytope, TooLarge
from bilinear.models.game import BilinearGame, BrpKind, BrpPolytope

logger = logging.getLogger(__name__)

_MINUS_ONE = Fraction(-1)


def _neg_unit(n: int, i: int) -> RatVector:
    return tuple(_MINUS_ONE if j == i else ZERO for j in range(n))


def build_brp_P(g: BilinearGame) -> BrpPolytope:
    """Best response polytope of the row player, over (y, p)."""
    M, N, k1 = g.M, g.N, g.k1
    Et = transpose(g.E, M)
    rows = [tuple(g.A[i]) + tuple(-a for a in Et[i]) for i in range(M)]
    rows += [_neg_unit(N, j) + (ZERO,) * k1 for j in range(N)]
    return BrpPolytope(
        kind=BrpKind.P,
        M=M,
        N=N,
        strategy_dim=N,
        dual_dim=k1,
        ineq_matrix=tuple(rows),
        ineq_rhs=(ZERO,) * (M + N),
        labels=tuple(range(1, M + N + 1)),
        eq_matrix=tuple(tuple(row) + (ZERO,) * k1 for row in g.F),
        eq_rhs=g.f,
    )


def build_brp_Q(g: BilinearGame) -> BrpPolytope:
    """Best response polytope of the column player, over (x, q)."""
    M, N, k2 = g.M, g.N, g.k2
    Bt = transpose(g.B, N)
    Ft = transpose(g.F, N)
    rows = [_neg_unit(M, i) + (ZERO,) * k2 for i in range(M)]
    rows += [tuple(Bt[j]) + tuple(-a for a in Ft[j]) for j in range(N)]
    return BrpPolytope(
        kind=BrpKind.Q,
        M=M,
        N=N,
        strategy_dim=M,
        dual_dim=k2,
        ineq_matrix=tuple(rows),
        ineq_rhs=(ZERO,) * (M + N),
        labels=tuple(range(1, M + N + 1)),
        eq_matrix=tuple(tuple(row) + (ZERO,) * k2 for row in g.E),
        eq_rhs=g.e,
    )


def build_brp_Q_prime(g: BilinearGame, beta: Sequence[Fraction]) -> BrpPolytope:
    """The lifted column-player polytope over (x, λ, q) for A + B = γβᵀ."""
    M, N, k2 = g.M, g.N, g.k2
    At = transpose(g.A, N)
    Ft = transpose(g.F, N)
    rows = [_neg_unit(M, i) + (ZERO,) + (ZERO,) * k2 for i in range(M)]
    rows += [tuple(-a for a in At[j]) + (beta[j],) + tuple(-a for a in Ft[j]) for j in range(N)]
    return BrpPolytope(
        kind=BrpKind.Q_PRIME,
        M=M,
        N=N,
        strategy_dim=M,
        dual_dim=k2,
        extra_dim=1,
        ineq_matrix=tuple(rows),
        ineq_rhs=(ZERO,) * (M + N),
        labels=tuple(range(1, M + N + 1)),
        eq_matrix=tuple(tuple(row) + (ZERO,) * (1 + k2) for row in g.E),
        eq_rhs=g.e,
    )


def to_lp(
    brp: BrpPolytope,
    objective: Sequence[Fraction] | None = None,
    maximize: bool = True,
    extra_eq: Sequence[tuple[RatVector, Fraction]] = (),
) -> LinearProgram:
    """The polytope as a linear program (all variables free)."""
    objective = tuple(objective) if objective is not None else (ZERO,) * brp.num_vars
    return LinearProgram(
        objective=objective,
        maximize=maximize,
        eq_matrix=brp.eq_matrix + tuple(row for row, _ in extra_eq),
        eq_rhs=brp.eq_rhs + tuple(rhs for _, rhs in extra_eq),
        ineq_matrix=brp.ineq_matrix,
        ineq_rhs=brp.ineq_rhs,
        nonneg=(False,) * brp.num_vars,
    )


def contains(brp: BrpPolytope, point: Sequence[Fraction]) -> bool:
    if len(point) != brp.num_vars:
        return False
    if any(dot(row, point) != rhs for row, rhs in zip(brp.eq_matrix, brp.eq_rhs)):
        return False
    return all(dot(row, point) <= rhs for row, rhs in zip(brp.ineq_matrix, brp.ineq_rhs))


def labels_at(brp: BrpPolytope, point: Sequence[Fraction]) -> frozenset[int]:
    """Labels of the inequalities tight at ``point``.

    Raises:
        PointNotInPolytope: If the point violates a constraint.
    """
    if not contains(brp, point):
        raise PointNotInPolytope(f"point is not in {brp.kind.value}")
    return frozenset(
        label
        for label, row, rhs in zip(brp.labels, brp.ineq_matrix, brp.ineq_rhs)
        if dot(row, point) == rhs
    )


def is_fully_labeled(v_labels: frozenset[int] | set[int], w_labels: frozenset[int] | set[int], M: int, N: int) -> bool:
    return set(v_labels) | set(w_labels) >= set(range(1, M + N + 1))


def brp_dimension(brp: BrpPolytope) -> int:
    return brp.num_vars - matrix_rank(brp.eq_matrix)


def degeneracy_probe(brp: BrpPolytope, point: Sequence[Fraction]) -> bool:
    """True when more labels are tight at ``point`` than the polytope's dimension.

    This only inspects the given point; it does not certify global
    non-degeneracy.
    """
    return len(labels_at(brp, point)) > brp_dimension(brp)


def exhaustive_vertices(brp: BrpPolytope, max_subsets: int | None = None) -> list[RatVector]:
    """All vertices, by solving every square tight system.

    Each subset of ``dim`` inequality rows is combined with the equalities;
    nonsingular systems with feasible solutions are vertices. Duplicates from
    degenerate vertices are merged. Order follows the lexicographic order of
    the first subset that produced each vertex.

    Raises:
        TooLarge: If the number of subsets exceeds ``max_subsets``.
    """
    dim = brp_dimension(brp)
    rows = len(brp.ineq_matrix)
    if dim < 0 or dim > rows:
        return []
    subsets = comb(rows, dim)
    if max_subsets is not None and subsets > max_subsets:
        raise TooLarge(f"{subsets} tight subsets exceed the limit of {max_subsets}")

    eq_rows = brp.eq_matrix
    seen: set[RatVector] = set()
    vertices: list[RatVector] = []
    for subset in combinations(range(rows), dim):
        system = eq_rows + tuple(brp.ineq_matrix[i] for i in subset)
        rhs = brp.eq_rhs + tuple(brp.ineq_rhs[i] for i in subset)
        point = solve_square(system, rhs)
        if point is None or point in seen or not contains(brp, point):
            continue
        seen.add(point)
        vertices.append(point)
    logger.debug(f"{brp.kind.value}: {len(vertices)} vertices from {subsets} tight subsets")
    return vertices
