"""Algorithm selection for ``bilinear solve``."""

import logging
from fractions import Fraction
from typing import Literal, Sequence

from bilinear.core.linalg import matrix_rank
from bilinear.errors import DegenerateFace, DegenerateGame, NoApplicableAlgorithm, NonPositiveDecomposition
from bilinear.models.config import ProjectConfig, get_config
from bilinear.models.game import BilinearGame, EquilibriumCertificate
from bilinear.services.game import game_rank
from bilinear.solvers.fptas import decompose, fptas_absolute, fptas_relative
from bilinear.solvers.lowrank import solve_low_rank
from bilinear.solvers.oracle import brute_force_equilibria
from bilinear.solvers.rank1 import solve_rank1
from bilinear.solvers.zerosum import solve_zero_sum

logger = logging.getLogger(__name__)

Algorithm = Literal["auto", "zero-sum", "rank1", "fptas-abs", "fptas-rel", "low-rank", "oracle"]
ALGORITHMS: tuple[str, ...] = ("auto", "zero-sum", "rank1", "fptas-abs", "fptas-rel", "low-rank", "oracle")


def _positive_decomposition(g: BilinearGame, pairs: Sequence[tuple[Sequence, Sequence]] | None = None) -> bool:
    dec = decompose(g, pairs)
    return dec.k > 0 and dec.is_positive() and all(v > 0 for v in dec.w + dec.z)


def choose_algorithm(
    g: BilinearGame,
    eps: Fraction | None = None,
    config: ProjectConfig | None = None,
    pairs: Sequence[tuple[Sequence, Sequence]] | None = None,
) -> str:
    """The algorithm the automatic route would run on g.

    The relative scheme is only chosen when the factors of A + B (``pairs``, or
    the default rank factorisation) are entrywise positive.

    Raises:
        NoApplicableAlgorithm: If no route applies.
    """
    config = config or get_config()
    rank = game_rank(g)
    if rank == 0:
        return "zero-sum"
    if rank == 1:
        return "rank1"
    if min(matrix_rank(g.A), matrix_rank(g.B)) + g.k1 + g.k2 <= config.solver.lowrank_threshold:
        return "low-rank"
    if eps is not None and _positive_decomposition(g, pairs):
        return "fptas-rel"
    if g.total_constraints <= config.solver.oracle_auto_limit:
        return "oracle"
    raise NoApplicableAlgorithm(
        f"rank {rank} game with {g.total_constraints} constraints: pass --eps for a positive "
        "decomposition or pick an algorithm explicitly"
    )


def _oracle(g: BilinearGame, config: ProjectConfig) -> EquilibriumCertificate:
    return brute_force_equilibria(g, config.oracle.max_constraints)[0]


def solve(
    g: BilinearGame,
    algorithm: Algorithm = "auto",
    eps: Fraction | None = None,
    jobs: int | None = None,
    config: ProjectConfig | None = None,
    pairs: Sequence[tuple[Sequence, Sequence]] | None = None,
) -> EquilibriumCertificate:
    """Run one algorithm, or the automatic route.

    The automatic route falls back to the low-rank enumerator when the rank-1
    search meets a degenerate face (unless ``rank1.strict`` is set).
    ``pairs`` is an optional rank factorisation of A + B in source units, used
    by both approximation schemes.

    Raises:
        ValueError: If an approximation scheme is requested without ``eps``.
        NoApplicableAlgorithm: If the automatic route finds nothing suitable.
    """
    config = config or get_config()
    if algorithm in ("fptas-abs", "fptas-rel") and eps is None:
        raise ValueError(f"{algorithm} needs eps")

    if algorithm == "auto":
        algorithm = choose_algorithm(g, eps, config, pairs)
        logger.info(f"auto route: {algorithm}")
        if algorithm == "rank1":
            try:
                return solve_rank1(g, strict=config.rank1.strict)
            except (DegenerateGame, DegenerateFace) as exc:
                if config.rank1.strict:
                    raise
                logger.warning(f"rank-1 search failed ({exc}); falling back to low-rank enumeration")
                return solve_low_rank(g)
        if algorithm == "fptas-rel":
            try:
                return fptas_relative(g, eps, pairs=pairs, jobs=jobs, max_cells=config.fptas.max_cells)
            except NonPositiveDecomposition as exc:  # pragma: no cover - checked by choose_algorithm
                raise NoApplicableAlgorithm(str(exc)) from exc

    match algorithm:
        case "zero-sum":
            return solve_zero_sum(g)
        case "rank1":
            return solve_rank1(g, strict=config.rank1.strict)
        case "low-rank":
            return solve_low_rank(g)
        case "fptas-rel":
            return fptas_relative(g, eps, pairs=pairs, jobs=jobs, max_cells=config.fptas.max_cells)
        case "fptas-abs":
            return fptas_absolute(
                g, eps, pairs=pairs, jobs=jobs, max_cells=config.fptas.max_cells, box_duals=config.fptas.box_duals
            )
        case "oracle":
            return _oracle(g, config)
    raise ValueError(f"unknown algorithm {algorithm!r}")
