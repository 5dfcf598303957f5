"""Zero-sum (rank 0) games by one linear program."""

import logging
from fractions import Fraction

from bilinear.core.linalg import ZERO, hstack, is_zero_matrix, negate, transpose
from bilinear.core.lp import LinearProgram, LpOutcome, solve_lp
from bilinear.errors import NotOptimal, NotZeroSum
from bilinear.models.game import BilinearGame, EquilibriumCertificate, StrategyProfile
from bilinear.services.game import in_strategy_set, verify

logger = logging.getLogger(__name__)


def _column_program(g: BilinearGame) -> LinearProgram:
    """min eᵀp over (y, p) s.t. Ay - Eᵀp <= 0, Fy = f, y >= 0."""
    M, N, k1 = g.M, g.N, g.k1
    return LinearProgram(
        objective=(ZERO,) * N + tuple(g.e),
        maximize=False,
        ineq_matrix=hstack(g.A, negate(transpose(g.E, M))),
        ineq_rhs=(ZERO,) * M,
        eq_matrix=tuple(tuple(row) + (ZERO,) * k1 for row in g.F),
        eq_rhs=g.f,
        nonneg=(True,) * N + (False,) * k1,
    )


def _row_program(g: BilinearGame) -> LinearProgram:
    """max fᵀq over (x, q) s.t. Fᵀq - Aᵀx <= 0, Ex = e, x >= 0."""
    M, N, k2 = g.M, g.N, g.k2
    return LinearProgram(
        objective=(ZERO,) * M + tuple(g.f),
        ineq_matrix=hstack(negate(transpose(g.A, N)), transpose(g.F, N)),
        ineq_rhs=(ZERO,) * N,
        eq_matrix=tuple(tuple(row) + (ZERO,) * k2 for row in g.E),
        eq_rhs=g.e,
        nonneg=(True,) * M + (False,) * k2,
    )


def _solve(program: LinearProgram, what: str) -> LpOutcome:
    outcome = solve_lp(program)
    if not outcome.is_optimal:  # pragma: no cover - compact strategy sets
        raise NotOptimal(f"{what}: {outcome.status.value}")
    return outcome


def minimax_values(g: BilinearGame) -> tuple[Fraction, Fraction]:
    """(max_x min_y xᵀAy, min_y max_x xᵀAy) from two independent programs."""
    lower = _solve(_row_program(g), "maximin program").value
    upper = _solve(_column_program(g), "minimax program").value
    return lower, upper


def solve_zero_sum(g: BilinearGame) -> EquilibriumCertificate:
    """Exact equilibrium of a game with A + B = 0.

    y and the value come from the minimax program; x is read off the
    multipliers of its Ay <= Eᵀp rows. If those multipliers are not a
    strategy, x is recomputed from the maximin program.

    Raises:
        NotZeroSum: If A + B is not the zero matrix.
    """
    if not is_zero_matrix(g.sum_matrix):
        raise NotZeroSum("A + B must be zero")

    outcome = _solve(_column_program(g), "minimax program")
    y = outcome.point[: g.N]
    x = tuple(-d for d in outcome.ineq_duals)
    if not in_strategy_set(g.E, g.e, x):
        logger.warning("minimax multipliers are not a strategy; solving the maximin program")
        x = _solve(_row_program(g), "maximin program").point[: g.M]
    logger.info(f"zero-sum value {outcome.value}")
    return verify(g, StrategyProfile(x=x, y=y), algorithm="zero-sum")
