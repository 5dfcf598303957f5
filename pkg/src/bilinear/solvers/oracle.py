"""Brute-force equilibrium finders used to cross-check the solvers.

Both are exponential and refuse inputs above the configured size limits.
"""

import logging
from fractions import Fraction
from itertools import combinations

from bilinear.core.linalg import ZERO, as_matrix, matvec, solve_square, transpose, vecmat
from bilinear.core.rational import RatMatrix, RatVector
from bilinear.errors import DimensionMismatch, TooLarge
from bilinear.models.config import get_config
from bilinear.models.game import BilinearGame, EquilibriumCertificate, StrategyProfile
from bilinear.services.brp import (
    build_brp_P,
    build_brp_Q,
    degeneracy_probe,
    exhaustive_vertices,
    is_fully_labeled,
    labels_at,
)
from bilinear.services.game import verify

logger = logging.getLogger(__name__)


def brute_force_equilibria(g: BilinearGame, max_constraints: int | None = None) -> list[EquilibriumCertificate]:
    """Every fully labelled vertex pair of P × Q, deduplicated by (x, y).

    Raises:
        TooLarge: If M + N + k1 + k2 exceeds ``max_constraints``
            (default from the ``oracle`` config section).
    """
    if max_constraints is None:
        max_constraints = get_config().oracle.max_constraints
    if g.total_constraints > max_constraints:
        raise TooLarge(f"M + N + k1 + k2 = {g.total_constraints} exceeds the oracle limit {max_constraints}")

    P, Q = build_brp_P(g), build_brp_Q(g)
    p_vertices = [(v, labels_at(P, v)) for v in exhaustive_vertices(P)]
    q_vertices = [(w, labels_at(Q, w)) for w in exhaustive_vertices(Q)]
    logger.debug(f"oracle: {len(p_vertices)} x {len(q_vertices)} vertex pairs")
    degenerate = sum(degeneracy_probe(P, v) for v, _ in p_vertices)
    degenerate += sum(degeneracy_probe(Q, w) for w, _ in q_vertices)
    if degenerate:
        logger.warning(f"oracle: {degenerate} degenerate vertices, extreme equilibria may repeat across pairs")

    seen: set[tuple[RatVector, RatVector]] = set()
    found: list[EquilibriumCertificate] = []
    for v, v_labels in p_vertices:
        for w, w_labels in q_vertices:
            if not is_fully_labeled(v_labels, w_labels, g.M, g.N):
                continue
            x, y = w[: g.M], v[: g.N]
            if (x, y) in seen:
                continue
            seen.add((x, y))
            found.append(verify(g, StrategyProfile(x=x, y=y), algorithm="oracle"))
    return found


def _support_strategy(payoff: RatMatrix, support: tuple[int, ...], rows: tuple[int, ...], size: int) -> RatVector | None:
    """Mixed strategy on ``support`` equalising ``payoff`` over ``rows``.

    Solves payoff[i]·s = u for i in rows, Σ s = 1; None unless the system has
    a unique solution that is strictly positive on the support.
    """
    k = len(support)
    system = [tuple(payoff[i][j] for j in support) + (Fraction(-1),) for i in rows]
    system.append((Fraction(1),) * k + (ZERO,))
    solution = solve_square(tuple(system), (ZERO,) * k + (Fraction(1),))
    if solution is None or any(s <= 0 for s in solution[:k]):
        return None
    strategy = [ZERO] * size
    for j, s in zip(support, solution):
        strategy[j] = s
    return tuple(strategy)


def bimatrix_support_enumeration(A, B, max_dim: int | None = None) -> list[tuple[RatVector, RatVector]]:
    """Equilibria (x, y) of the bimatrix game (A, B) by equal-size support pairs.

    Only support pairs whose indifference systems have unique solutions are
    kept, so degenerate games may lose equilibria.

    Raises:
        DimensionMismatch: If A and B differ in shape.
        TooLarge: If either dimension exceeds ``max_dim``.
    """
    A, B = as_matrix(A), as_matrix(B)
    m, n = len(A), len(A[0]) if A else 0
    if len(B) != m or any(len(row) != n for row in B):
        raise DimensionMismatch("A and B differ in shape")
    if max_dim is None:
        max_dim = get_config().oracle.max_support_dim
    if max(m, n) > max_dim:
        raise TooLarge(f"{m} x {n} exceeds the support enumeration limit {max_dim}")

    Bt = transpose(B, n)
    found: list[tuple[RatVector, RatVector]] = []
    for size in range(1, min(m, n) + 1):
        for I in combinations(range(m), size):
            for J in combinations(range(n), size):
                y = _support_strategy(A, J, I, n)
                x = _support_strategy(Bt, I, J, m)
                if x is None or y is None:
                    continue
                row_values, col_values = matvec(A, y), vecmat(x, B, n)
                if max(row_values) != row_values[I[0]] or max(col_values) != col_values[J[0]]:
                    continue
                if (x, y) not in found:
                    found.append((x, y))
    logger.debug(f"support enumeration: {len(found)} equilibria")
    return found


def profile_set(certificates: list[EquilibriumCertificate]) -> set[tuple[RatVector, RatVector]]:
    return {(c.x, c.y) for c in certificates}

