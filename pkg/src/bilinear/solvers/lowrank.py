"""Exact equilibria by enumerating vertices of P when rank(A) is small.

Every game has an equilibrium at a vertex pair of P × Q. A vertex (y, p) of P
is fixed by Fy = f together with N + k1 - k2 tight inequalities: a set D of
rows of [A | -Eᵀ] and a set J of coordinates with y_j = 0. The D rows must be
linearly independent, so |D| <= rank(A) + k1 and the number of vertices is
polynomial in N for constant rank(A) + k1.

For each vertex, the points of Q completing it to a fully labelled pair form
a face of Q (the complementary face); it is nonempty exactly when the vertex
belongs to an equilibrium.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Iterator, Literal

from bilinear.core.linalg import ZERO, dot, independent_rows, matrix_rank, solve_square
from bilinear.core.lp import LinearProgram, solve_lp
from bilinear.core.rational import RatVector
from bilinear.errors import PointNotInPolytope
from bilinear.models.config import get_config
from bilinear.models.game import BilinearGame, BrpPolytope, EquilibriumCertificate, StrategyProfile
from bilinear.services.brp import build_brp_P, build_brp_Q, contains, exhaustive_vertices
from bilinear.services.game import transpose_game, verify

logger = logging.getLogger(__name__)

Side = Literal["auto", "row", "col"]


def vertex_bound(g: BilinearGame) -> int:
    """2^(l+k)·N^(l+k) with l = rank(A), k = k1."""
    exponent = matrix_rank(g.A) + g.k1
    return 2**exponent * g.N**exponent


def _p_dimension(g: BilinearGame) -> int:
    return g.N + g.k1 - g.k2


def _iter_P_vertices(g: BilinearGame, l_bound: int) -> Iterator[RatVector]:
    P = build_brp_P(g)
    M, N = g.M, g.N
    dim = _p_dimension(g)
    row_block = P.ineq_matrix[:M]
    seen: set[RatVector] = set()
    for size in range(min(M, l_bound + g.k1, dim) + 1):
        if dim - size > N:
            continue
        for D in combinations(range(M), size):
            if size and matrix_rank(tuple(row_block[i] for i in D)) < size:
                continue
            for J in combinations(range(N), dim - size):
                rows = tuple(P.ineq_matrix[i] for i in D) + tuple(P.ineq_matrix[M + j] for j in J)
                point = solve_square(P.eq_matrix + rows, P.eq_rhs + (ZERO,) * len(rows))
                if point is None or point in seen or not contains(P, point):
                    continue
                seen.add(point)
                yield point


def enumerate_P_vertices(g: BilinearGame, l_bound: int | None = None) -> list[RatVector]:
    """All vertices (y, p) of P.

    Args:
        g: Validated game.
        l_bound: Upper bound on rank(A); defaults to rank(A).

    Raises:
        ValueError: If ``l_bound`` is below rank(A).
    """
    rank = matrix_rank(g.A)
    if l_bound is None:
        l_bound = rank
    elif l_bound < rank:
        raise ValueError(f"l_bound {l_bound} is below rank(A) = {rank}")
    vertices = list(_iter_P_vertices(g, l_bound))
    logger.debug(f"P: {len(vertices)} vertices (bound {vertex_bound(g)})")
    return vertices


# ============================================================================
# COMPLEMENTARY FACE
# ============================================================================


def complementary_face(g: BilinearGame, v: RatVector) -> BrpPolytope | None:
    """The face of Q whose points form a fully labelled pair with v.

    x_i = 0 wherever row i of P is slack at v, and the column-player row j
    of Q is tight wherever y_j > 0. Returns None when these equalities
    contradict Ex = e, i.e. the face is empty.

    Raises:
        PointNotInPolytope: If v is not in P.
    """
    P, Q = build_brp_P(g), build_brp_Q(g)
    if not contains(P, v):
        raise PointNotInPolytope("v is not in P")
    M, N = g.M, g.N
    y = v[:N]
    extra = [Q.ineq_matrix[i] for i in range(M) if dot(P.ineq_matrix[i], v) != 0]
    extra += [Q.ineq_matrix[M + j] for j in range(N) if y[j] > 0]
    eq_matrix = Q.eq_matrix + tuple(extra)
    eq_rhs = Q.eq_rhs + (ZERO,) * len(extra)
    kept, consistent = independent_rows(eq_matrix, eq_rhs)
    if not consistent:
        return None
    return Q.model_copy(
        update={
            "eq_matrix": tuple(eq_matrix[i] for i in kept),
            "eq_rhs": tuple(eq_rhs[i] for i in kept),
        }
    )


def complementary_check(g: BilinearGame, v: RatVector) -> tuple[RatVector, RatVector] | None:
    """(x, q) completing v to an equilibrium, or None when no such point exists."""
    face = complementary_face(g, v)
    if face is None:
        return None
    outcome = solve_lp(
        LinearProgram(
            objective=(ZERO,) * face.num_vars,
            eq_matrix=face.eq_matrix,
            eq_rhs=face.eq_rhs,
            ineq_matrix=face.ineq_matrix,
            ineq_rhs=face.ineq_rhs,
            nonneg=(False,) * face.num_vars,
        )
    )
    if not outcome.is_optimal:
        return None
    return outcome.point[: g.M], outcome.point[g.M :]


# ============================================================================
# SOLVERS
# ============================================================================


def _solve_row_side(g: BilinearGame) -> EquilibriumCertificate:
    checked = 0
    for v in _iter_P_vertices(g, matrix_rank(g.A)):
        checked += 1
        found = complementary_check(g, v)
        if found is not None:
            logger.info(f"low-rank: equilibrium at P vertex #{checked}")
            return verify(g, StrategyProfile(x=found[0], y=v[: g.N]), algorithm="low-rank", iterations=checked)
    raise AssertionError("no vertex of P completes to an equilibrium")  # pragma: no cover


def solve_low_rank(g: BilinearGame, side: Side = "auto") -> EquilibriumCertificate:
    """Exact equilibrium from the first vertex of P (or of the column player's
    polytope) that passes the complementary check.

    ``side="auto"`` enumerates on the side of the smaller of rank(A), rank(B).
    """
    if side == "auto":
        side = "row" if matrix_rank(g.A) <= matrix_rank(g.B) else "col"
    if side == "row":
        return _solve_row_side(g)
    swapped = _solve_row_side(transpose_game(g))
    return verify(g, StrategyProfile(x=swapped.y, y=swapped.x), algorithm="low-rank", iterations=swapped.iterations)


def _extreme_pairs(job: tuple[BilinearGame, RatVector]) -> list[tuple[RatVector, RatVector]]:
    g, v = job
    face = complementary_face(g, v)
    if face is None:
        return []
    return [(w[: g.M], v[: g.N]) for w in exhaustive_vertices(face)]


def enumerate_extreme_equilibria(g: BilinearGame, jobs: int | None = None) -> list[EquilibriumCertificate]:
    """Every equilibrium at a vertex pair of P × Q, deduplicated by (x, y).

    Order follows the vertex order of P, then of each complementary face.
    """
    if jobs is None:
        jobs = get_config().solver.jobs
    vertices = enumerate_P_vertices(g)
    work = [(g, v) for v in vertices]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_extreme_pairs, work))
    else:
        batches = [_extreme_pairs(job) for job in work]

    seen: set[tuple[RatVector, RatVector]] = set()
    certificates: list[EquilibriumCertificate] = []
    for pairs in batches:
        for x, y in pairs:
            if (x, y) in seen:
                continue
            seen.add((x, y))
            certificates.append(verify(g, StrategyProfile(x=x, y=y), algorithm="low-rank"))
    logger.info(f"{len(certificates)} extreme equilibria from {len(vertices)} vertices of P")
    return certificates
