"""Grid approximation schemes for games of fixed rank k.

With A + B = Σᵢ α(i)β(i)ᵀ the joint payoff xᵀ(A+B)y depends on (x, y) only
through the 2k numbers xᵀα(i) and β(i)ᵀy. Both schemes cut the box of those
numbers into cells and solve one LP over P × Q per cell; the best candidate
over all cells is returned.

- Relative scheme: multiplicative cells [u, (1+ε)u] on all 2k axes; needs
  entrywise positive factors. Guarantees rel_eps <= 1 - 1/(1+ε)².
- Absolute scheme: additive cells on the k x-side axes only, with the cell's
  lower x-band entering the objective. Guarantees abs_eps <= ε for
  factors of any sign.

Cells are visited in lexicographic order; ties keep the first candidate.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

from pydantic import BaseModel, ConfigDict

from bilinear.core.linalg import (
    ZERO,
    denominator_bound,
    dot,
    is_zero_matrix,
    matrix_rank,
    max_abs_entry,
    rank_factorize,
    reconstruct,
)
from bilinear.core.lp import LinearProgram, LpOutcome, maximize_over, minimize_over, solve_lp
from bilinear.core.rational import RatVector, Rational
from bilinear.errors import DecompositionMismatch, NonPositiveDecomposition, TooLarge
from bilinear.models.config import get_config
from bilinear.models.game import BilinearGame, EquilibriumCertificate, StrategyProfile
from bilinear.services.brp import build_brp_P, build_brp_Q
from bilinear.services.game import verify
from bilinear.solvers.zerosum import solve_zero_sum

logger = logging.getLogger(__name__)

Band = tuple[Rational, Rational]


class RankDecomposition(BaseModel):
    """A + B = Σᵢ α(i)β(i)ᵀ with the ranges of xᵀα(i) over X and β(i)ᵀy over Y."""

    model_config = ConfigDict(frozen=True)

    alphas: tuple[RatVector, ...]
    betas: tuple[RatVector, ...]
    w: RatVector
    w_max: RatVector
    z: RatVector
    z_max: RatVector

    @property
    def k(self) -> int:
        return len(self.alphas)

    def is_positive(self) -> bool:
        return all(v > 0 for vec in self.alphas + self.betas for v in vec)


class GridCell(BaseModel):
    """Bands on xᵀα(i) and (optionally) β(i)ᵀy, plus the shift used by the absolute scheme."""

    model_config = ConfigDict(frozen=True)

    index: tuple[int, ...]
    x_bands: tuple[Band, ...]
    y_bands: tuple[Band, ...] | None = None
    shift: RatVector | None = None


def decompose(g: BilinearGame, pairs: Sequence[tuple[Sequence, Sequence]] | None = None) -> RankDecomposition:
    """Rank factors of A + B with their box bounds.

    Args:
        g: Validated game.
        pairs: Optional (α, β) pairs for the original (unscaled) payoffs; they
            must reconstruct A + B exactly.

    Raises:
        DecompositionMismatch: If ``pairs`` do not reconstruct A + B.
    """
    target = g.sum_matrix
    if pairs is None:
        factors = []
        for alpha, beta in rank_factorize(target, matrix_rank(target)):
            if all(a <= 0 for a in alpha) and all(b <= 0 for b in beta):
                alpha, beta = tuple(-a for a in alpha), tuple(-b for b in beta)
            factors.append((alpha, beta))
    else:
        factors = [
            (tuple(Fraction(a) * g.payoff_scale for a in alpha), tuple(Fraction(b) for b in beta))
            for alpha, beta in pairs
        ]
        if reconstruct(factors, g.M, g.N) != target:
            raise DecompositionMismatch("Σ α(i)β(i)ᵀ does not equal A + B")

    w, w_max, z, z_max = [], [], [], []
    for alpha, beta in factors:
        w.append(minimize_over(g.E, g.e, alpha)[0])
        w_max.append(maximize_over(g.E, g.e, alpha)[0])
        z.append(minimize_over(g.F, g.f, beta)[0])
        z_max.append(maximize_over(g.F, g.f, beta)[0])
    return RankDecomposition(
        alphas=tuple(a for a, _ in factors),
        betas=tuple(b for _, b in factors),
        w=tuple(w),
        w_max=tuple(w_max),
        z=tuple(z),
        z_max=tuple(z_max),
    )


# ============================================================================
# CELL PROGRAM
# ============================================================================


class CellBase(BaseModel):
    """The part of every cell program that depends on the game only.

    Variables are (y, p, x, q); y and x carry sign constraints, so only the
    best-response rows of P and Q are listed.
    """

    model_config = ConfigDict(frozen=True)

    num_vars: int
    rows: tuple[RatVector, ...]
    rhs: RatVector
    eq_matrix: tuple[RatVector, ...]
    eq_rhs: RatVector
    nonneg: tuple[bool, ...]
    objective: RatVector


def cell_base(g: BilinearGame) -> CellBase:
    P, Q = build_brp_P(g), build_brp_Q(g)
    nP, nQ = P.num_vars, Q.num_vars
    M, N, k1 = g.M, g.N, g.k1
    best_response = [tuple(r) + (ZERO,) * nQ for r in P.ineq_matrix[:M]]
    best_response += [(ZERO,) * nP + tuple(r) for r in Q.ineq_matrix[M:]]
    return CellBase(
        num_vars=nP + nQ,
        rows=tuple(best_response),
        rhs=P.ineq_rhs[:M] + Q.ineq_rhs[M:],
        eq_matrix=tuple(tuple(r) + (ZERO,) * nQ for r in P.eq_matrix)
        + tuple((ZERO,) * nP + tuple(r) for r in Q.eq_matrix),
        eq_rhs=P.eq_rhs + Q.eq_rhs,
        nonneg=(True,) * N + (False,) * k1 + (True,) * M + (False,) * g.k2,
        objective=(ZERO,) * N + tuple(g.e) + (ZERO,) * M + tuple(g.f),
    )


def cell_lp(
    g: BilinearGame,
    dec: RankDecomposition,
    cell: GridCell,
    dual_box: int | None = None,
    base: CellBase | None = None,
) -> LpOutcome:
    """min eᵀp + fᵀq - Σᵢ shiftᵢ·β(i)ᵀy over P × Q inside the cell's bands.

    Variables are (y, p, x, q). ``base`` is built from g when not given.
    """
    if base is None:
        base = cell_base(g)
    n = base.num_vars
    M, N, k1 = g.M, g.N, g.k1
    nP = N + k1

    def y_row(coeffs: Sequence[Fraction]) -> RatVector:
        return tuple(coeffs) + (ZERO,) * (n - N)

    def x_row(coeffs: Sequence[Fraction]) -> RatVector:
        return (ZERO,) * nP + tuple(coeffs) + (ZERO,) * (n - nP - M)

    rows = list(base.rows)
    rhs = list(base.rhs)
    for alpha, (lo, hi) in zip(dec.alphas, cell.x_bands):
        rows += [x_row(alpha), x_row(tuple(-a for a in alpha))]
        rhs += [hi, -lo]
    if cell.y_bands is not None:
        for beta, (lo, hi) in zip(dec.betas, cell.y_bands):
            rows += [y_row(beta), y_row(tuple(-b for b in beta))]
            rhs += [hi, -lo]
    if dual_box is not None:
        bound = Fraction(dual_box)
        for j in list(range(N, nP)) + list(range(nP + M, n)):
            unit = tuple(Fraction(1) if c == j else ZERO for c in range(n))
            rows += [unit, tuple(-u for u in unit)]
            rhs += [bound, bound]

    objective = list(base.objective)
    if cell.shift is not None:
        for a, beta in zip(cell.shift, dec.betas):
            for j, b in enumerate(beta):
                objective[j] -= a * b

    return solve_lp(
        LinearProgram(
            objective=tuple(objective),
            maximize=False,
            eq_matrix=base.eq_matrix,
            eq_rhs=base.eq_rhs,
            ineq_matrix=tuple(rows),
            ineq_rhs=tuple(rhs),
            nonneg=base.nonneg,
        )
    )


def _candidate(job: tuple) -> EquilibriumCertificate | None:
    """Solve one cell and verify its profile (top level so worker processes can run it)."""
    g, dec, cell, dual_box, algorithm, base = job
    outcome = cell_lp(g, dec, cell, dual_box, base)
    if not outcome.is_optimal:
        return None
    y = outcome.point[: g.N]
    x = outcome.point[g.N + g.k1 : g.N + g.k1 + g.M]
    return verify(g, StrategyProfile(x=x, y=y), algorithm=algorithm)


# ============================================================================
# GRIDS
# ============================================================================


def multiplicative_bands(low: Fraction, high: Fraction, eps: Fraction) -> list[Band]:
    """[low(1+ε)^t, low(1+ε)^(t+1)] clipped to high; at least one band."""
    ratio = 1 + eps
    bands, lo = [], low
    while True:
        hi = lo * ratio
        bands.append((lo, min(hi, high)))
        if hi >= high:
            return bands
        lo = hi


def additive_bands(low: Fraction, high: Fraction, count: int) -> list[Band]:
    step = (high - low) / count
    return [(low + t * step, low + (t + 1) * step) for t in range(count)]


def _reduce(
    candidates: Iterable[EquilibriumCertificate | None], key
) -> tuple[EquilibriumCertificate | None, int]:
    best, solved = None, 0
    for cert in candidates:
        solved += 1
        if cert is None:
            continue
        if best is None or key(cert) < key(best):
            best = cert
        if cert.qp_residual == 0:
            break
    return best, solved


def _run(jobs_list: Iterator[tuple], key, jobs: int) -> tuple[EquilibriumCertificate | None, int]:
    if jobs <= 1:
        return _reduce((_candidate(job) for job in jobs_list), key)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = pool.map(_candidate, jobs_list, chunksize=4)
        best = _reduce(results, key)
        pool.shutdown(wait=False, cancel_futures=True)
        return best


def _settings(jobs: int | None, max_cells: int | None) -> tuple[int, int]:
    config = get_config()
    return (
        jobs if jobs is not None else config.solver.jobs,
        max_cells if max_cells is not None else config.fptas.max_cells,
    )


def realisable_bands(
    E: Sequence[RatVector], e: RatVector, vectors: Sequence[RatVector], axes: Sequence[Sequence[Band]]
) -> list[tuple[int, ...]]:
    """Band combinations (lexicographic) met by some point of {Ex = e, x >= 0}."""
    found = []
    for index in product(*(range(len(a)) for a in axes)):
        rows, rhs = [], []
        for vector, (lo, hi) in zip(vectors, (axes[d][t] for d, t in enumerate(index))):
            rows += [tuple(vector), tuple(-v for v in vector)]
            rhs += [hi, -lo]
        outcome = solve_lp(
            LinearProgram(
                objective=(ZERO,) * len(E[0]),
                eq_matrix=tuple(E),
                eq_rhs=e,
                ineq_matrix=tuple(rows),
                ineq_rhs=tuple(rhs),
            )
        )
        if outcome.is_optimal:
            found.append(index)
    return found


def fptas_relative(
    g: BilinearGame,
    eps: Fraction,
    pairs: Sequence[tuple[Sequence, Sequence]] | None = None,
    jobs: int | None = None,
    max_cells: int | None = None,
) -> EquilibriumCertificate:
    """Relative ε-approximate equilibrium with rel_eps <= 1 - 1/(1+ε)².

    Raises:
        NonPositiveDecomposition: If some α(i), β(i) is not entrywise positive
            or some w_i, z_i is zero.
        TooLarge: If the grid has more than ``max_cells`` cells.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    jobs, max_cells = _settings(jobs, max_cells)
    dec = decompose(g, pairs)
    if dec.k == 0 or not dec.is_positive():
        raise NonPositiveDecomposition("relative scheme needs entrywise positive rank factors")
    if any(v <= 0 for v in dec.w + dec.z):
        raise NonPositiveDecomposition("relative scheme needs min xᵀα(i) > 0 and min β(i)ᵀy > 0")

    x_axes = [multiplicative_bands(lo, hi, eps) for lo, hi in zip(dec.w, dec.w_max)]
    y_axes = [multiplicative_bands(lo, hi, eps) for lo, hi in zip(dec.z, dec.z_max)]
    axes = x_axes + y_axes
    cells = math.prod(len(a) for a in axes)
    if cells > max_cells:
        raise TooLarge(f"relative grid has {cells} cells (limit {max_cells})")
    x_cells = realisable_bands(g.E, g.e, dec.alphas, x_axes)
    y_cells = realisable_bands(g.F, g.f, dec.betas, y_axes)
    logger.info(
        f"relative grid: k={dec.k}, {cells} cells, {len(x_cells) * len(y_cells)} realisable, eps={eps}"
    )
    base = cell_base(g)

    def job_stream() -> Iterator[tuple]:
        for x_index, y_index in product(x_cells, y_cells):
            index = x_index + y_index
            bands = [axes[d][t] for d, t in enumerate(index)]
            cell = GridCell(index=index, x_bands=tuple(bands[: dec.k]), y_bands=tuple(bands[dec.k :]))
            yield g, dec, cell, None, "fptas-rel", base

    best, solved = _run(job_stream(), lambda c: c.rel_eps, jobs)
    if best is None:  # pragma: no cover - some cell holds an equilibrium
        raise TooLarge("no feasible cell")
    logger.info(f"relative scheme: rel_eps {best.rel_eps} after {solved} cells")
    return best.relabel("fptas-rel", solved)


def absolute_cells_per_axis(g: BilinearGame, dec: RankDecomposition, eps: Fraction) -> int:
    """Smallest n with 2·Σᵢ ((w′ᵢ - wᵢ)/n)·Tᵢ <= ε·x_max·D·y_max, Tᵢ = max |β(i)ᵀy|."""
    D = max_abs_entry(g.sum_matrix)
    normaliser = eps * g.x_max * D * g.y_max
    spread = sum(
        ((hi - lo) * max(abs(zl), abs(zh)) for lo, hi, zl, zh in zip(dec.w, dec.w_max, dec.z, dec.z_max)),
        ZERO,
    )
    if spread == 0:
        return 1
    return max(1, math.ceil(2 * spread / normaliser))


def fptas_absolute(
    g: BilinearGame,
    eps: Fraction,
    pairs: Sequence[tuple[Sequence, Sequence]] | None = None,
    jobs: int | None = None,
    max_cells: int | None = None,
    box_duals: bool | None = None,
) -> EquilibriumCertificate:
    """Absolute ε-approximate equilibrium with abs_eps <= ε.

    The grid covers only the k x-side axes xᵀα(i), with n = absolute_cells_per_axis
    bands each, so at most nᵏ cell LPs are solved; n grows like 1/ε and k is
    fixed, which keeps the scheme polynomial. The y side needs no bands: fixing
    xᵀα(i) to the cell's lower end turns the joint payoff into the linear term
    Σᵢ aᵢ·β(i)ᵀy, and the band width bounds the error that substitution makes.
    Band combinations X cannot realise are skipped before any cell LP runs.

    Zero-sum games are solved exactly instead.

    Raises:
        TooLarge: If the grid has more than ``max_cells`` cells.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if is_zero_matrix(g.sum_matrix):
        return solve_zero_sum(g).relabel("fptas-abs")
    jobs, max_cells = _settings(jobs, max_cells)
    if box_duals is None:
        box_duals = get_config().fptas.box_duals
    dec = decompose(g, pairs)

    per_axis = absolute_cells_per_axis(g, dec, eps)
    cells = per_axis**dec.k
    if cells > max_cells:
        raise TooLarge(f"absolute grid has {cells} cells (limit {max_cells})")
    dual_box = None
    if box_duals:
        Z = int(max(max_abs_entry(g.A, g.B, g.E, g.F, g.e, g.f), Fraction(1)))
        dual_box = denominator_bound(Z, g.M + g.N + g.k1 + g.k2 + 1)
    logger.info(f"absolute grid: k={dec.k}, {per_axis} cells per axis, eps={eps}")

    axes = [additive_bands(lo, hi, per_axis) for lo, hi in zip(dec.w, dec.w_max)]
    base = cell_base(g)

    def job_stream() -> Iterator[tuple]:
        for index in realisable_bands(g.E, g.e, dec.alphas, axes):
            bands = tuple(axes[d][t] for d, t in enumerate(index))
            cell = GridCell(index=index, x_bands=bands, shift=tuple(lo for lo, _ in bands))
            yield g, dec, cell, dual_box, "fptas-abs", base

    best, solved = _run(job_stream(), lambda c: c.abs_eps, jobs)
    if best is None:  # pragma: no cover
        raise TooLarge("no feasible cell")
    logger.info(f"absolute scheme: abs_eps {best.abs_eps} after {solved} cells")
    return best.relabel("fptas-abs", solved)


def sandwich_bounds(dec: RankDecomposition, cell: GridCell, eps: Fraction) -> tuple[Fraction, Fraction]:
    """(Σ uᵢvᵢ, (1+ε)²·Σ uᵢvᵢ) for a multiplicative cell with lower ends uᵢ, vᵢ."""
    low = sum((xb[0] * yb[0] for xb, yb in zip(cell.x_bands, cell.y_bands or ())), ZERO)
    return low, (1 + eps) ** 2 * low


def joint_payoff(dec: RankDecomposition, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    """Σᵢ (xᵀα(i))(β(i)ᵀy) = xᵀ(A+B)y."""
    return sum((dot(x, a) * dot(b, y) for a, b in zip(dec.alphas, dec.betas)), ZERO)
