"""Exact equilibria of rank-1 games by binary search along the fully-labelled path.

For A + B = γβᵀ the row player's best response polytope P does not depend on
γ, and the column player's polytope is a section λ = γᵀx of the lifted
polytope Q′ over (x, λ, q). The fully-labelled pairs of P × Q′ form a path on
which λ is monotone, and LP(a)

    max  a·βᵀy - eᵀp - fᵀq   over P × Q′ with λ = a

has optimal value 0 and optimal set equal to the path's points at λ = a.
The search keeps a bracket [a1, a2] with the path below the hyperplane
H_γ: λ = γᵀx at a1 and above it at a2, and stops when the face of P × Q′
containing the optimal set of LP(a) meets H_γ. Every point of that face is
fully labelled, so any point of the intersection is an equilibrium.

Combined variable layout: (y[N], p[k1], x[M], λ, q[k2]).
"""

import logging
import math
from fractions import Fraction

from pydantic import BaseModel, ConfigDict

from bilinear.core.linalg import (
    ZERO,
    denominator_bound,
    dot,
    matrix_rank,
    max_abs_entry,
    rank_factorize,
)
from bilinear.core.lp import LinearProgram, LpOutcome, LpStatus, maximize_over, minimize_over, optimal_face, solve_lp
from bilinear.core.rational import RatMatrix, RatVector, Rational
from bilinear.errors import DegenerateFace, DegenerateGame, NotRankOne
from bilinear.models.game import BilinearGame, EquilibriumCertificate, StrategyProfile
from bilinear.services.brp import build_brp_P, build_brp_Q_prime
from bilinear.services.game import game_rank, verify
from bilinear.solvers.zerosum import solve_zero_sum

logger = logging.getLogger(__name__)


class PathPoint(BaseModel):
    """A point of the path with the face of P × Q′ that contains it."""

    model_config = ConfigDict(frozen=True)

    a: Rational
    y: RatVector
    p: RatVector
    x: RatVector
    lam: Rational
    q: RatVector
    tight_rows: frozenset[int]
    dimension: int
    lambda_lo: Rational | None
    lambda_hi: Rational | None


class Rank1Result(BaseModel):
    """Equilibrium plus the trace of the search."""

    model_config = ConfigDict(frozen=True)

    certificate: EquilibriumCertificate
    gamma: RatVector
    beta: RatVector
    gamma_min: Rational
    gamma_max: Rational
    iterations: int
    iteration_bound: int
    brackets: tuple[tuple[Rational, Rational], ...] = ()
    visited: tuple[tuple[Rational | None, Rational | None], ...] = ()


def decompose_rank1(g: BilinearGame) -> tuple[RatVector, RatVector]:
    """(γ, β) with A + B = γβᵀ, β a primitive integer vector whose first nonzero entry is positive.

    Raises:
        NotRankOne: If rank(A + B) != 1.
    """
    rank = game_rank(g)
    if rank != 1:
        raise NotRankOne(f"rank(A + B) = {rank}")
    [(alpha, beta)] = rank_factorize(g.sum_matrix, 1)
    denominators = math.lcm(*(b.denominator for b in beta))
    numerators = [int(b * denominators) for b in beta]
    scale = Fraction(denominators, math.gcd(*numerators))
    if next(b for b in beta if b != 0) < 0:
        scale = -scale
    beta = tuple(b * scale for b in beta)
    gamma = tuple(a / scale for a in alpha)
    return gamma, beta


def gamma_bounds(g: BilinearGame, gamma: RatVector) -> tuple[Fraction, Fraction]:
    """(min, max) of γᵀx over X."""
    low, _ = minimize_over(g.E, g.e, gamma)
    high, _ = maximize_over(g.E, g.e, gamma)
    return low, high


def path_objective(beta: RatVector, g: BilinearGame, point: RatVector) -> Fraction:
    """λ·βᵀy - eᵀp - fᵀq at a combined point; never positive on P × Q′."""
    y, p, _, lam, q = _split(g, point)
    return lam * dot(beta, y) - dot(g.e, p) - dot(g.f, q)


def path_complementarity(beta: RatVector, g: BilinearGame, point: RatVector) -> tuple[Fraction, Fraction]:
    """(xᵀ(Ay - Eᵀp), (-xᵀA + λβᵀ - qᵀF)·y); both vanish exactly on the path."""
    y, p, x, lam, q = _split(g, point)
    row_slack = [dot(g.A[i], y) - sum((g.E[r][i] * p[r] for r in range(g.k1)), ZERO) for i in range(g.M)]
    col_slack = [
        -sum((x[i] * g.A[i][j] for i in range(g.M)), ZERO)
        + lam * beta[j]
        - sum((q[r] * g.F[r][j] for r in range(g.k2)), ZERO)
        for j in range(g.N)
    ]
    return dot(x, row_slack), dot(col_slack, y)


def _split(g: BilinearGame, point: RatVector) -> tuple[RatVector, RatVector, RatVector, Fraction, RatVector]:
    N, k1, M = g.N, g.k1, g.M
    y = point[:N]
    p = point[N : N + k1]
    x = point[N + k1 : N + k1 + M]
    lam = point[N + k1 + M]
    q = point[N + k1 + M + 1 :]
    return y, p, x, lam, q


class Rank1Solver:
    """Binary search for one rank-1 game.

    Args:
        g: A validated game with rank(A + B) = 1.
        strict: Raise DegenerateFace on faces of dimension > 1 instead of
            intersecting the whole face with H_γ.
    """

    def __init__(self, g: BilinearGame, strict: bool = False):
        self.g = g
        self.strict = strict
        self.gamma, self.beta = decompose_rank1(g)
        self.gamma_min, self.gamma_max = gamma_bounds(g, self.gamma)

        P = build_brp_P(g)
        Qp = build_brp_Q_prime(g, self.beta)
        nP, nQ = P.num_vars, Qp.num_vars
        self.num_vars = nP + nQ
        self.rows: RatMatrix = tuple(tuple(r) + (ZERO,) * nQ for r in P.ineq_matrix) + tuple(
            (ZERO,) * nP + tuple(r) for r in Qp.ineq_matrix
        )
        self.rhs: RatVector = P.ineq_rhs + Qp.ineq_rhs
        self.eq_rows: RatMatrix = tuple(tuple(r) + (ZERO,) * nQ for r in P.eq_matrix) + tuple(
            (ZERO,) * nP + tuple(r) for r in Qp.eq_matrix
        )
        self.eq_rhs: RatVector = P.eq_rhs + Qp.eq_rhs
        self.lambda_index = g.N + g.k1 + g.M

        # LPs carry the best-response rows only; y >= 0 and x >= 0 are sign constraints
        M, N = g.M, g.N
        self.lp_row_index: tuple[int, ...] = tuple(range(M)) + tuple(M + N + M + j for j in range(N))
        self.nonneg: tuple[bool, ...] = tuple(
            j < N or g.N + g.k1 <= j < self.lambda_index for j in range(self.num_vars)
        )
        self.sign_row_index: dict[int, int] = {j: M + j for j in range(N)}
        self.sign_row_index.update({g.N + g.k1 + i: M + N + i for i in range(M)})
        self.lp_rows: RatMatrix = tuple(self.rows[i] for i in self.lp_row_index)
        self.lp_rhs: RatVector = tuple(self.rhs[i] for i in self.lp_row_index)

        Z = int(max(max_abs_entry(g.A, g.E, g.F, g.e, g.f, self.gamma, self.beta), Fraction(1)))
        self.l = g.M + g.N + g.k1 + g.k2 + 1
        self.delta = denominator_bound(Z, self.l)

    # ----- programs -----

    def _unit(self, index: int) -> RatVector:
        return tuple(Fraction(1) if j == index else ZERO for j in range(self.num_vars))

    def _hplane_row(self) -> RatVector:
        """Coefficients of λ - γᵀx."""
        row = [ZERO] * self.num_vars
        row[self.lambda_index] = Fraction(1)
        offset = self.g.N + self.g.k1
        for i, c in enumerate(self.gamma):
            row[offset + i] = -c
        return tuple(row)

    def _program(
        self,
        objective: RatVector,
        extra_eq: tuple[tuple[RatVector, Fraction], ...] = (),
        tight: frozenset[int] = frozenset(),
        maximize: bool = True,
    ) -> LinearProgram:
        eq = self.eq_rows + tuple(self.rows[i] for i in sorted(tight)) + tuple(r for r, _ in extra_eq)
        eq_rhs = self.eq_rhs + tuple(self.rhs[i] for i in sorted(tight)) + tuple(b for _, b in extra_eq)
        return LinearProgram(
            objective=objective,
            maximize=maximize,
            eq_matrix=eq,
            eq_rhs=eq_rhs,
            ineq_matrix=self.lp_rows,
            ineq_rhs=self.lp_rhs,
            nonneg=self.nonneg,
        )

    def _rows_of(self, lp_tight: frozenset[int]) -> frozenset[int]:
        """Translate LP tight-set indices into rows of P × Q′."""
        m = len(self.lp_row_index)
        return frozenset(self.lp_row_index[t] if t < m else self.sign_row_index[t - m] for t in lp_tight)

    def parametric_program(self, a: Fraction) -> LinearProgram:
        g = self.g
        objective = (
            tuple(a * b for b in self.beta)
            + tuple(-v for v in g.e)
            + (ZERO,) * (g.M + 1)
            + tuple(-v for v in g.f)
        )
        return self._program(objective, extra_eq=((self._unit(self.lambda_index), a),))

    def parametric_lp(self, a: Fraction) -> LpOutcome:
        """Solve LP(a); its optimal value is 0."""
        return solve_lp(self.parametric_program(a))

    # ----- faces -----

    def edge_at(self, a: Fraction, allow_degenerate: bool = False) -> PathPoint:
        """The face of P × Q′ containing the optimal set of LP(a), with its λ-range.

        Raises:
            DegenerateFace: If the face has dimension > 1 and ``allow_degenerate`` is False.
        """
        face = optimal_face(self.parametric_program(a))
        tight = self._rows_of(face.tight_set)
        dimension = self.num_vars - matrix_rank(self.eq_rows + tuple(self.rows[i] for i in sorted(tight)))

        lam = self._unit(self.lambda_index)
        lo = solve_lp(self._program(lam, tight=tight, maximize=False))
        hi = solve_lp(self._program(lam, tight=tight))
        y, p, x, lam_value, q = _split(self.g, face.point)
        point = PathPoint(
            a=a,
            y=y,
            p=p,
            x=x,
            lam=lam_value,
            q=q,
            tight_rows=tight,
            dimension=dimension,
            lambda_lo=lo.value if lo.status == LpStatus.OPTIMAL else None,
            lambda_hi=hi.value if hi.status == LpStatus.OPTIMAL else None,
        )
        if dimension > 1 and not allow_degenerate:
            raise DegenerateFace(f"face at a = {a} has dimension {dimension}", face=point)
        return point

    def intersect_with_hplane(self, edge: PathPoint) -> PathPoint | None:
        """A point of the face on H_γ: λ = γᵀx, or None when they do not meet."""
        outcome = solve_lp(
            self._program((ZERO,) * self.num_vars, extra_eq=((self._hplane_row(), ZERO),), tight=edge.tight_rows)
        )
        if not outcome.is_optimal:
            return None
        y, p, x, lam, q = _split(self.g, outcome.point)
        return edge.model_copy(update={"y": y, "p": p, "x": x, "lam": lam, "q": q})

    def side(self, edge: PathPoint) -> int:
        """Sign of λ - γᵀx on a face that misses H_γ."""
        value = edge.lam - dot(self.gamma, edge.x)
        return (value > 0) - (value < 0)

    def iteration_bound(self) -> int:
        """⌊log(γ_max - γ_min) + 2·log Δ + 1⌋ (base 2)."""
        width = self.gamma_max - self.gamma_min
        if width <= 0:
            return 1
        bound = math.log2(width.numerator) - math.log2(width.denominator) + 2 * math.log2(self.delta) + 1
        return max(1, math.floor(bound))

    # ----- search -----

    def _visit(self, a: Fraction, visited: list) -> tuple[PathPoint, PathPoint | None]:
        edge = self.edge_at(a, allow_degenerate=not self.strict)
        if edge.dimension > 1:
            logger.warning(f"degenerate face of dimension {edge.dimension} at a = {a}")
        visited.append((edge.lambda_lo, edge.lambda_hi))
        return edge, self.intersect_with_hplane(edge)

    def solve(self) -> Rank1Result:
        """Run the search.

        Raises:
            DegenerateGame: If the bracket shrinks below 1/Δ² without meeting H_γ.
        """
        a1, a2 = self.gamma_min, self.gamma_max
        guard = Fraction(1, self.delta * self.delta)
        brackets: list[tuple[Fraction, Fraction]] = [(a1, a2)]
        visited: list = []
        iterations = 0
        logger.info(f"rank-1 search on [{a1}, {a2}], bound {self.iteration_bound()} rounds")

        hit = None
        for end in (a1, a2):
            edge, hit = self._visit(end, visited)
            if hit is not None:
                break

        while hit is None:
            if a2 - a1 < guard:
                raise DegenerateGame(f"bracket [{a1}, {a2}] narrower than 1/Δ² without an intersection")
            a = (a1 + a2) / 2
            iterations += 1
            edge, hit = self._visit(a, visited)
            if hit is not None:
                break
            if self.side(edge) < 0:
                a1 = a
                jump = edge.lambda_hi
                if jump is not None and a1 < jump < a2:
                    a1 = jump
                    edge, hit = self._visit(jump, visited)
            else:
                a2 = a
                jump = edge.lambda_lo
                if jump is not None and a1 < jump < a2:
                    a2 = jump
                    edge, hit = self._visit(jump, visited)
            brackets.append((a1, a2))
            logger.debug(f"round {iterations}: bracket [{a1}, {a2}]")

        certificate = verify(self.g, StrategyProfile(x=hit.x, y=hit.y), algorithm="rank1", iterations=iterations)
        if not certificate.is_exact:
            raise DegenerateGame("intersection point is not an exact equilibrium")
        return Rank1Result(
            certificate=certificate,
            gamma=self.gamma,
            beta=self.beta,
            gamma_min=self.gamma_min,
            gamma_max=self.gamma_max,
            iterations=iterations,
            iteration_bound=self.iteration_bound(),
            brackets=tuple(brackets),
            visited=tuple(visited),
        )


def solve_rank1(g: BilinearGame, strict: bool = False) -> EquilibriumCertificate:
    """Exact equilibrium of a game with rank(A + B) <= 1.

    Rank-0 games go to the zero-sum solver.

    Raises:
        NotRankOne: If rank(A + B) > 1.
        DegenerateGame: If the search stalls (see ``Rank1Solver.solve``).
    """
    rank = game_rank(g)
    if rank == 0:
        return solve_zero_sum(g)
    if rank > 1:
        raise NotRankOne(f"rank(A + B) = {rank}")
    return Rank1Solver(g, strict=strict).solve().certificate
