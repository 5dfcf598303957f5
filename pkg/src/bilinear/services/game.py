"""Game validation, best responses, verification and symmetrization."""

import logging
from fractions import Fraction
from typing import Sequence

from bilinear.core.linalg import (
    ZERO,
    add_matrices,
    bilinear_form,
    block_diagonal,
    block_matrix,
    dot,
    independent_rows,
    matrix_rank,
    matvec,
    max_abs_entry,
    ones_vector,
    scale_matrix,
    transpose,
    vecmat,
    zeros,
)
from bilinear.core.lp import LinearProgram, PolytopeStatus, maximize_over, polytope_status, solve_lp
from bilinear.core.rational import RatMatrix, RatVector, integer_scale
from bilinear.errors import (
    EmptyStrategySet,
    InfeasibleStrategy,
    NonCompactStrategySet,
    NotOptimal,
    NotSymmetric,
    PointNotInPolytope,
)
from bilinear.models.game import (
    BilinearGame,
    CertificateFlag,
    EquilibriumCertificate,
    GameData,
    StrategyProfile,
)
from bilinear.services.brp import build_brp_P, build_brp_Q, contains

logger = logging.getLogger(__name__)


# ============================================================================
# VALIDATION
# ============================================================================


def _integer_rows(E: RatMatrix, e: RatVector) -> tuple[RatMatrix, RatVector]:
    """Scale every row of [E | e] to integers."""
    rows, rhs = [], []
    for row, value in zip(E, e):
        s = integer_scale(tuple(row) + (value,))
        rows.append(tuple(a * s for a in row))
        rhs.append(value * s)
    return tuple(rows), tuple(rhs)


def _strategy_set(name: str, E: RatMatrix, e: RatVector, n: int) -> tuple[RatMatrix, RatVector]:
    E, e = _integer_rows(E, e)
    kept, consistent = independent_rows(E, e)
    if not consistent:
        raise EmptyStrategySet(f"{name}: equality constraints are inconsistent")
    if len(kept) < len(E):
        logger.info(f"{name}: dropped {len(E) - len(kept)} dependent equality rows")
    E = tuple(E[i] for i in kept)
    e = tuple(e[i] for i in kept)
    status = polytope_status(E, e, n)
    if status == PolytopeStatus.EMPTY:
        raise EmptyStrategySet(f"{name} = {{Ex = e, x >= 0}} is empty")
    if status == PolytopeStatus.UNBOUNDED:
        raise NonCompactStrategySet(f"{name} = {{Ex = e, x >= 0}} is unbounded")
    return E, e


def _bit_length(*arrays: RatMatrix | RatVector) -> int:
    total = 0
    for array in arrays:
        for item in array:
            values = item if isinstance(item, tuple) else (item,)
            total += sum(abs(v.numerator).bit_length() + 1 for v in values)
    return total


def validate(raw: GameData) -> BilinearGame:
    """Turn raw game data into a validated game with integer entries.

    Raises:
        DimensionMismatch: If the shapes disagree.
        EmptyStrategySet: If X or Y is empty.
        NonCompactStrategySet: If X or Y is unbounded.
    """
    M, N = raw.shape
    scale = integer_scale(v for m in (raw.A, raw.B) for row in m for v in row)
    A = scale_matrix(Fraction(scale), raw.A)
    B = scale_matrix(Fraction(scale), raw.B)
    E, e = _strategy_set("X", raw.E, raw.e, M)
    F, f = _strategy_set("Y", raw.F, raw.f, N)
    x_max, _ = maximize_over(E, e, ones_vector(M))
    y_max, _ = maximize_over(F, f, ones_vector(N))

    previous = raw.payoff_scale if isinstance(raw, BilinearGame) else Fraction(1)
    game = BilinearGame(
        A=A,
        B=B,
        E=E,
        F=F,
        e=e,
        f=f,
        payoff_scale=previous * scale,
        x_max=x_max,
        y_max=y_max,
        bit_length=_bit_length(A, B, E, F, e, f),
    )
    logger.debug(f"validated {M}x{N} game, k1={game.k1}, k2={game.k2}, scale={game.payoff_scale}")
    return game


def game_rank(g: GameData) -> int:
    """rank(A + B); zero-sum games have rank 0."""
    return matrix_rank(add_matrices(g.A, g.B))


def transpose_game(g: BilinearGame) -> BilinearGame:
    """The same game with the players' roles swapped: (Bᵀ, Aᵀ, F, E, f, e)."""
    return BilinearGame(
        A=transpose(g.B),
        B=transpose(g.A),
        E=g.F,
        F=g.E,
        e=g.f,
        f=g.e,
        payoff_scale=g.payoff_scale,
        x_max=g.y_max,
        y_max=g.x_max,
        bit_length=g.bit_length,
    )


# ============================================================================
# STRATEGIES AND BEST RESPONSES
# ============================================================================


def in_strategy_set(E: RatMatrix, e: RatVector, x: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in x):
        return False
    return matvec(E, x) == tuple(e)


def check_profile(g: BilinearGame, x: Sequence[Fraction], y: Sequence[Fraction]) -> None:
    """Raises InfeasibleStrategy unless x ∈ X and y ∈ Y."""
    if len(x) != g.M or not in_strategy_set(g.E, g.e, x):
        raise InfeasibleStrategy(f"x is not in X: {tuple(str(v) for v in x)}")
    if len(y) != g.N or not in_strategy_set(g.F, g.f, y):
        raise InfeasibleStrategy(f"y is not in Y: {tuple(str(v) for v in y)}")


def payoffs(g: BilinearGame, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """(xᵀAy, xᵀBy) in the units of the original (unscaled) data."""
    return (
        bilinear_form(x, g.A, y) / g.payoff_scale,
        bilinear_form(x, g.B, y) / g.payoff_scale,
    )


def best_response_row(g: BilinearGame, y: Sequence[Fraction]) -> tuple[Fraction, RatVector, RatVector]:
    """(u, x*, p): u = max over X of xᵀAy = eᵀp, attained at x*.

    Raises:
        InfeasibleStrategy: If y is not in Y.
    """
    if len(y) != g.N or not in_strategy_set(g.F, g.f, y):
        raise InfeasibleStrategy("y is not in Y")
    outcome = solve_lp(LinearProgram(objective=matvec(g.A, y), eq_matrix=g.E, eq_rhs=g.e))
    if not outcome.is_optimal:  # pragma: no cover - X is compact and nonempty
        raise NotOptimal(f"row best response: {outcome.status.value}")
    return outcome.value, outcome.point, outcome.eq_duals


def best_response_col(g: BilinearGame, x: Sequence[Fraction]) -> tuple[Fraction, RatVector, RatVector]:
    """(v, y*, q): v = max over Y of xᵀBy = fᵀq, attained at y*.

    Raises:
        InfeasibleStrategy: If x is not in X.
    """
    if len(x) != g.M or not in_strategy_set(g.E, g.e, x):
        raise InfeasibleStrategy("x is not in X")
    outcome = solve_lp(LinearProgram(objective=vecmat(x, g.B), eq_matrix=g.F, eq_rhs=g.f))
    if not outcome.is_optimal:  # pragma: no cover
        raise NotOptimal(f"column best response: {outcome.status.value}")
    return outcome.value, outcome.point, outcome.eq_duals


# ============================================================================
# VERIFICATION
# ============================================================================


def verify(
    g: BilinearGame,
    profile: StrategyProfile,
    algorithm: str = "verify",
    iterations: int = 0,
) -> EquilibriumCertificate:
    """Exact error measures of a profile.

    abs_eps = (u + v - xᵀ(A+B)y) / (x_max·D·y_max), D = |A+B|. When the
    normaliser is zero (zero-sum games) the raw regret is reported and the
    certificate carries DEGENERATE_SCALE. rel_eps divides by u + v and is
    None (REL_UNDEFINED) when u + v <= 0 and the regret is nonzero.

    Raises:
        InfeasibleStrategy: If the profile is outside X × Y.
    """
    x, y = profile.x, profile.y
    check_profile(g, x, y)
    u, _, p = best_response_row(g, y)
    v, _, q = best_response_col(g, x)
    joint = bilinear_form(x, g.sum_matrix, y)
    regret = u + v - joint

    flags: list[CertificateFlag] = []
    normaliser = g.x_max * max_abs_entry(g.sum_matrix) * g.y_max
    if normaliser == 0:
        flags.append(CertificateFlag.DEGENERATE_SCALE)
        normaliser = Fraction(1)
    abs_eps = regret / normaliser

    total = u + v
    if regret == 0:
        rel_eps: Fraction | None = ZERO
    elif total > 0:
        rel_eps = regret / total
    else:
        rel_eps = None
        flags.append(CertificateFlag.REL_UNDEFINED)

    return EquilibriumCertificate(
        algorithm=algorithm,
        iterations=iterations,
        x=tuple(x),
        y=tuple(y),
        p=p,
        q=q,
        abs_eps=abs_eps,
        rel_eps=rel_eps,
        qp_residual=dot(g.e, p) + dot(g.f, q) - joint,
        flags=tuple(flags),
    )


def qp_objective(
    g: BilinearGame,
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    p: Sequence[Fraction],
    q: Sequence[Fraction],
) -> Fraction:
    """xᵀ(A+B)y - eᵀp - fᵀq; never positive on P × Q, zero exactly at equilibria.

    Raises:
        PointNotInPolytope: If ((y, p), (x, q)) is not in P × Q.
    """
    if not contains(build_brp_P(g), tuple(y) + tuple(p)):
        raise PointNotInPolytope("(y, p) is not in P")
    if not contains(build_brp_Q(g), tuple(x) + tuple(q)):
        raise PointNotInPolytope("(x, q) is not in Q")
    return bilinear_form(x, g.sum_matrix, y) - dot(g.e, p) - dot(g.f, q)


# ============================================================================
# SYMMETRIC GAMES
# ============================================================================


def is_symmetric(g: GameData) -> bool:
    return g.B == transpose(g.A) and g.E == g.F and g.e == g.f


def symmetric_qp_objective(g: BilinearGame, x: Sequence[Fraction], p: Sequence[Fraction]) -> Fraction:
    """xᵀAx - eᵀp over {Ax <= Eᵀp, Ex = e, x >= 0}; zero exactly at symmetric equilibria.

    Raises:
        NotSymmetric: If the game is not symmetric.
        PointNotInPolytope: If (x, p) violates the constraints.
    """
    if not is_symmetric(g):
        raise NotSymmetric("symmetric_qp_objective needs B = Aᵀ, E = F, e = f")
    if not in_strategy_set(g.E, g.e, x):
        raise PointNotInPolytope("x is not in X")
    Ax = matvec(g.A, x)
    Etp = vecmat(p, g.E, g.M)
    if any(a > b for a, b in zip(Ax, Etp)):
        raise PointNotInPolytope("Ax <= Eᵀp fails")
    return dot(x, Ax) - dot(g.e, p)


def symmetrize(g: BilinearGame) -> BilinearGame:
    """Symmetric game (A', A'ᵀ, E', E', e', e') with A' = [[0, A], [Bᵀ, 0]].

    Symmetric equilibria (z, z) with z = (x, y) correspond to equilibria
    (x, y) of ``g``.
    """
    M, N = g.M, g.N
    A_prime = block_matrix([[zeros(M, M), g.A], [transpose(g.B, N), zeros(N, N)]])
    E_prime = block_diagonal([g.E, g.F], [M, N])
    e_prime = tuple(g.e) + tuple(g.f)
    raw = GameData(A=A_prime, B=transpose(A_prime), E=E_prime, F=E_prime, e=e_prime, f=e_prime)
    symmetric = validate(raw)
    return symmetric.model_copy(update={"payoff_scale": symmetric.payoff_scale * g.payoff_scale})


def split_symmetric_profile(g: BilinearGame, z: Sequence[Fraction]) -> StrategyProfile:
    """(x, y) of ``g`` from a strategy z = (x, y) of ``symmetrize(g)``."""
    if len(z) != g.M + g.N:
        raise InfeasibleStrategy(f"expected {g.M + g.N} coordinates, got {len(z)}")
    return StrategyProfile(x=tuple(z[: g.M]), y=tuple(z[g.M :]))


def lemke_terminates(g: BilinearGame) -> bool:
    """Whether Lemke's method is guaranteed to end in a solution of the game's LCP.

    Holds when both payoff matrices are non-positive and X, Y have trivial
    recession cones (always true after validation). No pivoting solver is built
    on this; it is a predicate only.
    """
    nonpositive = all(v <= 0 for m in (g.A, g.B) for row in m for v in row)
    return nonpositive and polytope_status(g.E, g.e, g.M) == PolytopeStatus.COMPACT and (
        polytope_status(g.F, g.f, g.N) == PolytopeStatus.COMPACT
    )
