"""Exact two-phase simplex over rationals.

Programs have the general shape::

    max|min  c·x
    s.t.     G x <= g        (inequalities, one slack each)
             E x  = e        (equalities, dependent rows dropped first)
             x_j >= 0        for every j flagged in ``nonneg``

Free variables are split into two nonnegative parts internally; the split is
not visible in the outcome. Pivoting follows Bland's rule (lowest-index
entering column, ratio ties broken by the lowest basic index), which
terminates under degeneracy and makes every outcome, including tight sets,
deterministic.

Tight-set indices: inequality ``i`` is reported as ``i``; the sign constraint
of variable ``j`` as ``len(ineq_rhs) + j``.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from bilinear.core.linalg import ZERO, dot, independent_rows, matrix_rank, ones_vector
from bilinear.core.rational import RatMatrix, RatVector, Rational
from bilinear.errors import MalformedProgram, NotOptimal

logger = logging.getLogger(__name__)


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class PolytopeStatus(str, Enum):
    COMPACT = "compact"
    UNBOUNDED = "unbounded"
    EMPTY = "empty"


class LinearProgram(BaseModel):
    """A linear program over exact rationals (see module docstring)."""

    model_config = ConfigDict(frozen=True)

    objective: RatVector
    maximize: bool = True
    eq_matrix: RatMatrix = ()
    eq_rhs: RatVector = ()
    ineq_matrix: RatMatrix = ()
    ineq_rhs: RatVector = ()
    nonneg: tuple[bool, ...] | None = None

    @model_validator(mode="after")
    def check_dimensions(self) -> "LinearProgram":
        n = len(self.objective)
        if len(self.eq_matrix) != len(self.eq_rhs):
            raise MalformedProgram(
                f"{len(self.eq_matrix)} equality rows but {len(self.eq_rhs)} right-hand sides"
            )
        if len(self.ineq_matrix) != len(self.ineq_rhs):
            raise MalformedProgram(
                f"{len(self.ineq_matrix)} inequality rows but {len(self.ineq_rhs)} right-hand sides"
            )
        for name, rows in (("equality", self.eq_matrix), ("inequality", self.ineq_matrix)):
            for i, row in enumerate(rows):
                if len(row) != n:
                    raise MalformedProgram(f"{name} row {i} has {len(row)} entries, expected {n}")
        if self.nonneg is not None and len(self.nonneg) != n:
            raise MalformedProgram(f"nonneg mask has {len(self.nonneg)} flags, expected {n}")
        return self

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def nonneg_mask(self) -> tuple[bool, ...]:
        return self.nonneg if self.nonneg is not None else (True,) * self.num_vars

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        """Exact membership test for the feasible region."""
        if len(x) != self.num_vars:
            return False
        if any(flag and value < 0 for flag, value in zip(self.nonneg_mask, x)):
            return False
        if any(dot(row, x) != rhs for row, rhs in zip(self.eq_matrix, self.eq_rhs)):
            return False
        return all(dot(row, x) <= rhs for row, rhs in zip(self.ineq_matrix, self.ineq_rhs))

    def tight_at(self, x: Sequence[Fraction]) -> frozenset[int]:
        """Indices of inequality rows and sign constraints holding with equality at x."""
        m = len(self.ineq_rhs)
        tight = {i for i, (row, rhs) in enumerate(zip(self.ineq_matrix, self.ineq_rhs)) if dot(row, x) == rhs}
        tight.update(m + j for j, flag in enumerate(self.nonneg_mask) if flag and x[j] == 0)
        return frozenset(tight)


class LpOutcome(BaseModel):
    """Result of ``solve_lp``.

    On OPTIMAL, ``value == ineq_rhs·ineq_duals + eq_rhs·eq_duals``; inequality
    duals are >= 0 for maximisation and <= 0 for minimisation.
    """

    model_config = ConfigDict(frozen=True)

    status: LpStatus
    point: RatVector | None = None
    value: Rational | None = None
    tight_set: frozenset[int] = frozenset()
    eq_duals: RatVector | None = None
    ineq_duals: RatVector | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


class OptimalFace(BaseModel):
    """The face of optimal solutions of a program."""

    model_config = ConfigDict(frozen=True)

    point: RatVector
    value: Rational
    tight_set: frozenset[int]
    dimension: int
    is_unique_vertex: bool


# ============================================================================
# TABLEAU
# ============================================================================


def _pivot(
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    basis: list[int],
    r: int,
    j: int,
    reduced: list[Fraction] | None = None,
) -> None:
    pivot = rows[r][j]
    if pivot != 1:
        rows[r] = [value / pivot for value in rows[r]]
        rhs[r] /= pivot
    top = rows[r]
    for i, row in enumerate(rows):
        if i == r:
            continue
        factor = row[j]
        if factor:
            rows[i] = [a - factor * b if b else a for a, b in zip(row, top)]
            rhs[i] -= factor * rhs[r]
    if reduced is not None:
        factor = reduced[j]
        if factor:
            reduced[:] = [a - factor * b if b else a for a, b in zip(reduced, top)]
    basis[r] = j


def _simplex(
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    basis: list[int],
    cost: list[Fraction],
    allowed: int,
) -> LpStatus:
    """Maximise cost·z from a feasible basis; only columns < ``allowed`` may enter.

    The reduced-cost row is priced once and then updated with every pivot.
    """
    reduced = list(cost)
    for c, row in zip((cost[b] for b in basis), rows):
        if c:
            reduced = [a - c * b if b else a for a, b in zip(reduced, row)]
    iterations = 0
    while True:
        entering = next((j for j in range(allowed) if reduced[j] > 0), None)
        if entering is None:
            logger.debug(f"simplex optimal after {iterations} pivots")
            return LpStatus.OPTIMAL

        leaving = None
        best_ratio = None
        for r, row in enumerate(rows):
            coeff = row[entering]
            if coeff <= 0:
                continue
            ratio = rhs[r] / coeff
            if best_ratio is None or ratio < best_ratio or (
                ratio == best_ratio and basis[r] < basis[leaving]
            ):
                best_ratio = ratio
                leaving = r
        if leaving is None:
            return LpStatus.UNBOUNDED

        _pivot(rows, rhs, basis, leaving, entering, reduced)
        iterations += 1


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly.

    Inequality rows with a nonnegative right-hand side start with their slack
    in the basis; only equalities and the remaining inequalities get a phase-1
    artificial. Infeasible and unbounded programs are reported through
    ``LpOutcome.status``. Strong duality is checked on every optimal outcome.
    """
    n = lp.num_vars
    mask = lp.nonneg_mask
    sign = Fraction(1) if lp.maximize else Fraction(-1)

    kept, consistent = independent_rows(lp.eq_matrix, lp.eq_rhs)
    if not consistent:
        logger.debug("equality system is inconsistent")
        return LpOutcome(status=LpStatus.INFEASIBLE)
    if len(kept) < len(lp.eq_matrix):
        dropped = sorted(set(range(len(lp.eq_matrix))) - set(kept))
        logger.debug(f"dropped dependent equality rows {dropped}")

    # structural columns: one per nonneg variable, two per free variable
    columns: list[tuple[int, int]] = []
    for j in range(n):
        columns.append((j, 1))
        if not mask[j]:
            columns.append((j, -1))
    n_struct = len(columns)
    m_ineq = len(lp.ineq_rhs)
    n_std = n_struct + m_ineq

    source_rows: list[tuple[RatVector, Fraction, int | None]] = []
    for i in kept:
        source_rows.append((lp.eq_matrix[i], lp.eq_rhs[i], None))
    for i in range(m_ineq):
        source_rows.append((lp.ineq_matrix[i], lp.ineq_rhs[i], i))
    m = len(source_rows)

    flips = [Fraction(-1) if b < 0 else Fraction(1) for _, b, _ in source_rows]
    needs_artificial = [slack is None or flip < 0 for (_, _, slack), flip in zip(source_rows, flips)]
    artificial_of: dict[int, int] = {}
    for r, needed in enumerate(needs_artificial):
        if needed:
            artificial_of[r] = n_std + len(artificial_of)
    width = n_std + len(artificial_of)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    # column holding B⁻¹e_r: the slack of an unflipped inequality, otherwise the artificial
    unit_column: list[int] = []
    for r, (coeffs, b, slack) in enumerate(source_rows):
        row = [coeffs[j] * s for j, s in columns] + [ZERO] * (width - n_struct)
        if slack is not None:
            row[n_struct + slack] = Fraction(1)
        if flips[r] < 0:
            row = [-value for value in row]
        if r in artificial_of:
            row[artificial_of[r]] = Fraction(1)
            unit_column.append(artificial_of[r])
        else:
            unit_column.append(n_struct + slack)
        rows.append(row)
        rhs.append(b * flips[r])
        basis.append(unit_column[r])

    # phase 1
    if artificial_of:
        phase1_cost = [ZERO] * n_std + [Fraction(-1)] * len(artificial_of)
        _simplex(rows, rhs, basis, phase1_cost, width)
        if any(b >= n_std and rhs[r] != 0 for r, b in enumerate(basis)):
            return LpOutcome(status=LpStatus.INFEASIBLE)
        for r, b in enumerate(basis):
            if b >= n_std:
                j = next((j for j in range(n_std) if rows[r][j] != 0), None)
                if j is not None:
                    _pivot(rows, rhs, basis, r, j)

    # phase 2
    cost = [sign * lp.objective[j] * s for j, s in columns] + [ZERO] * (width - n_struct)
    status = _simplex(rows, rhs, basis, cost, n_std)
    if status == LpStatus.UNBOUNDED:
        return LpOutcome(status=LpStatus.UNBOUNDED)

    z = [ZERO] * n_std
    for r, b in enumerate(basis):
        if b < n_std:
            z[b] = rhs[r]
    x = [ZERO] * n
    for k, (j, s) in enumerate(columns):
        if z[k]:
            x[j] += s * z[k]
    point = tuple(x)
    value = dot(lp.objective, point)

    basic_cost = [cost[b] for b in basis]
    std_duals = [
        sum((c * row[unit_column[i]] for c, row in zip(basic_cost, rows) if c), ZERO) for i in range(m)
    ]
    dual_value = sum((b * f * y for (_, b, _), f, y in zip(source_rows, flips, std_duals)), ZERO)
    if dual_value != sign * value:
        raise ArithmeticError(f"strong duality violated: primal {sign * value}, dual {dual_value}")

    eq_duals = [ZERO] * len(lp.eq_rhs)
    ineq_duals = [ZERO] * m_ineq
    for r, (_, _, slack) in enumerate(source_rows):
        y = sign * flips[r] * std_duals[r]
        if slack is None:
            eq_duals[kept[r]] = y
        else:
            ineq_duals[slack] = y

    return LpOutcome(
        status=LpStatus.OPTIMAL,
        point=point,
        value=value,
        tight_set=lp.tight_at(point),
        eq_duals=tuple(eq_duals),
        ineq_duals=tuple(ineq_duals),
    )


# ============================================================================
# FACES AND POLYTOPES
# ============================================================================


def optimal_face(lp: LinearProgram) -> OptimalFace:
    """Constraints tight at every optimal point, and the dimension of that face.

    Starting from the constraints tight at the first optimal vertex, the total
    slack of the remaining candidates is maximised over the optimal set;
    candidates slack at that maximiser drop out, and once the maximum is zero
    the rest are tight on the whole face.

    Raises:
        NotOptimal: If the program is infeasible or unbounded.
    """
    outcome = solve_lp(lp)
    if not outcome.is_optimal:
        raise NotOptimal(f"optimal_face needs an optimal program, got {outcome.status.value}")

    m_ineq = len(lp.ineq_rhs)
    n = lp.num_vars

    def constraint_row(index: int) -> RatVector:
        if index < m_ineq:
            return lp.ineq_matrix[index]
        return tuple(Fraction(-1) if j == index - m_ineq else ZERO for j in range(n))

    def constraint_rhs(index: int) -> Fraction:
        return lp.ineq_rhs[index] if index < m_ineq else ZERO

    face_eq = lp.eq_matrix + (lp.objective,)
    face_rhs = lp.eq_rhs + (outcome.value,)
    candidates = sorted(outcome.tight_set)
    while candidates:
        # slack of each candidate is rhs - row·x; maximise their sum, capped at 1
        slack_objective = [ZERO] * n
        for index in candidates:
            for j, a in enumerate(constraint_row(index)):
                if a:
                    slack_objective[j] -= a
        cap = 1 - sum((constraint_rhs(i) for i in candidates), ZERO)
        trial = solve_lp(
            LinearProgram(
                objective=tuple(slack_objective),
                eq_matrix=face_eq,
                eq_rhs=face_rhs,
                ineq_matrix=lp.ineq_matrix + (tuple(slack_objective),),
                ineq_rhs=lp.ineq_rhs + (cap,),
                nonneg=lp.nonneg,
            )
        )
        still_tight = [i for i in candidates if dot(constraint_row(i), trial.point) == constraint_rhs(i)]
        if len(still_tight) == len(candidates):
            break
        candidates = still_tight
    always_tight = frozenset(candidates)

    description = list(lp.eq_matrix) + [constraint_row(i) for i in sorted(always_tight)]
    dimension = n - matrix_rank(tuple(description))
    return OptimalFace(
        point=outcome.point,
        value=outcome.value,
        tight_set=always_tight,
        dimension=dimension,
        is_unique_vertex=dimension == 0,
    )


def polytope_status(E: RatMatrix, e: RatVector, num_vars: int | None = None) -> PolytopeStatus:
    """Classify {x : Ex = e, x >= 0} as compact, unbounded or empty.

    Boundedness is decided on the recession cone {Ex = 0, x >= 0, Σx <= 1}:
    the set is bounded iff the cone's maximum of Σx is zero.
    """
    n = num_vars if num_vars is not None else (len(E[0]) if E else 0)
    feasibility = solve_lp(LinearProgram(objective=(ZERO,) * n, eq_matrix=E, eq_rhs=e))
    if not feasibility.is_optimal:
        return PolytopeStatus.EMPTY
    recession = solve_lp(
        LinearProgram(
            objective=ones_vector(n),
            eq_matrix=E,
            eq_rhs=(ZERO,) * len(e),
            ineq_matrix=(ones_vector(n),),
            ineq_rhs=(Fraction(1),),
        )
    )
    if recession.value > 0:
        return PolytopeStatus.UNBOUNDED
    return PolytopeStatus.COMPACT


def is_polytope_compact(E: RatMatrix, e: RatVector, num_vars: int | None = None) -> bool:
    return polytope_status(E, e, num_vars) == PolytopeStatus.COMPACT


def maximize_over(E: RatMatrix, e: RatVector, c: RatVector) -> tuple[Fraction, RatVector]:
    """max c·x over {Ex = e, x >= 0}; returns (value, maximiser).

    Raises:
        NotOptimal: If the set is empty or c is unbounded on it.
    """
    outcome = solve_lp(LinearProgram(objective=c, eq_matrix=E, eq_rhs=e))
    if not outcome.is_optimal:
        raise NotOptimal(f"maximize_over: {outcome.status.value}")
    return outcome.value, outcome.point


def minimize_over(E: RatMatrix, e: RatVector, c: RatVector) -> tuple[Fraction, RatVector]:
    """min c·x over {Ex = e, x >= 0}; returns (value, minimiser)."""
    outcome = solve_lp(LinearProgram(objective=c, maximize=False, eq_matrix=E, eq_rhs=e))
    if not outcome.is_optimal:
        raise NotOptimal(f"minimize_over: {outcome.status.value}")
    return outcome.value, outcome.point
