"""Deterministic random game generators for tests, benchmarks and ``bilinear gen``.

Every generator draws integers from ``numpy.random.default_rng(seed)`` and
returns raw ``GameData``; the same seed always yields the same game.
"""

import logging
from fractions import Fraction
from typing import Literal

import numpy as np

from bilinear.core.linalg import ones_vector
from bilinear.core.rational import RatMatrix
from bilinear.models.game import GameData
from bilinear.services.converters import ranking_duel_polytope

logger = logging.getLogger(__name__)

GameKind = Literal["bimatrix", "zero-sum", "rank1", "positive-rank", "birkhoff-rank1"]
GAME_KINDS: tuple[str, ...] = ("bimatrix", "zero-sum", "rank1", "positive-rank", "birkhoff-rank1")


def _to_matrix(array: np.ndarray) -> RatMatrix:
    return tuple(tuple(Fraction(int(v)) for v in row) for row in array)


def _integers(rng: np.random.Generator, low: int, high: int, shape: tuple[int, ...]) -> np.ndarray:
    return rng.integers(low, high, size=shape, endpoint=True, dtype=np.int64)


def _simplex_game(A: np.ndarray, B: np.ndarray) -> GameData:
    m, n = A.shape
    return GameData(
        A=_to_matrix(A),
        B=_to_matrix(B),
        E=(ones_vector(m),),
        F=(ones_vector(n),),
        e=(Fraction(1),),
        f=(Fraction(1),),
    )


def random_bimatrix(rows: int, cols: int, seed: int | None = None, low: int = -5, high: int = 5) -> GameData:
    rng = np.random.default_rng(seed)
    return _simplex_game(_integers(rng, low, high, (rows, cols)), _integers(rng, low, high, (rows, cols)))


def random_zero_sum(rows: int, cols: int, seed: int | None = None, low: int = -5, high: int = 5) -> GameData:
    rng = np.random.default_rng(seed)
    A = _integers(rng, low, high, (rows, cols))
    return _simplex_game(A, -A)


def _nonzero(rng: np.random.Generator, low: int, high: int, size: int) -> np.ndarray:
    values = _integers(rng, low, high, (size,))
    values[values == 0] = 1
    return values


def random_rank1(rows: int, cols: int, seed: int | None = None, low: int = -5, high: int = 5) -> GameData:
    """A random, B = γβᵀ - A with nonzero integer γ, β."""
    rng = np.random.default_rng(seed)
    A = _integers(rng, low, high, (rows, cols))
    gamma = _nonzero(rng, low, high, rows)
    beta = _nonzero(rng, low, high, cols)
    return _simplex_game(A, np.outer(gamma, beta) - A)


def planted_positive_rank(
    rows: int, cols: int, rank: int = 2, seed: int | None = None, low: int = -5, high: int = 5
) -> tuple[GameData, list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]]:
    """A random, B = Σ α(i)β(i)ᵀ - A with α(i), β(i) entrywise in [1, max(high, 1)].

    Returns the game and the planted (α(i), β(i)) pairs.
    """
    rng = np.random.default_rng(seed)
    A = _integers(rng, low, high, (rows, cols))
    top = max(high, 1)
    alphas = _integers(rng, 1, top, (rank, rows))
    betas = _integers(rng, 1, top, (rank, cols))
    pairs = [(_to_matrix(alphas)[i], _to_matrix(betas)[i]) for i in range(rank)]
    return _simplex_game(A, alphas.T @ betas - A), pairs


def random_positive_rank(
    rows: int, cols: int, rank: int = 2, seed: int | None = None, low: int = -5, high: int = 5
) -> GameData:
    return planted_positive_rank(rows, cols, rank, seed, low, high)[0]


def random_birkhoff_rank1(m: int, seed: int | None = None, low: int = -3, high: int = 3) -> GameData:
    """Rank-1 game over two m x m Birkhoff polytopes."""
    rng = np.random.default_rng(seed)
    size = m * m
    A = _integers(rng, low, high, (size, size))
    gamma = _nonzero(rng, low, high, size)
    beta = _nonzero(rng, low, high, size)
    E, e = ranking_duel_polytope(m)
    return GameData(A=_to_matrix(A), B=_to_matrix(np.outer(gamma, beta) - A), E=E, F=E, e=e, f=e)


def generate(
    kind: GameKind,
    rows: int,
    cols: int,
    rank: int = 2,
    seed: int | None = None,
    low: int = -5,
    high: int = 5,
) -> GameData:
    """Dispatch on ``kind``; ``birkhoff-rank1`` uses ``rows`` as m and ignores ``cols``."""
    if low > high:
        raise ValueError(f"low {low} exceeds high {high}")
    logger.debug(f"generating {kind} {rows}x{cols} (seed={seed})")
    match kind:
        case "bimatrix":
            return random_bimatrix(rows, cols, seed, low, high)
        case "zero-sum":
            return random_zero_sum(rows, cols, seed, low, high)
        case "rank1":
            return random_rank1(rows, cols, seed, low, high)
        case "positive-rank":
            return random_positive_rank(rows, cols, rank, seed, low, high)
        case "birkhoff-rank1":
            return random_birkhoff_rank1(rows, seed, low, high)
    raise ValueError(f"unknown game kind {kind!r}")
