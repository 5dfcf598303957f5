"""Tests for the zero-sum linear program solver."""

import sys
from fractions import Fraction
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from bilinear.errors import NotZeroSum
from bilinear.models.specs import RankingDuelSpec
from bilinear.services.converters import from_bimatrix, from_ranking_duel
from bilinear.services.game import validate
from bilinear.services.generators import generate
from bilinear.solvers.zerosum import minimax_values, solve_zero_sum

F = Fraction


@pytest.mark.unit
class TestZeroSum:
    def test_matching_pennies(self):
        g = from_bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
        cert = solve_zero_sum(g)
        assert cert.algorithm == "zero-sum"
        assert cert.x == (F(1, 2), F(1, 2))
        assert cert.y == (F(1, 2), F(1, 2))
        assert cert.abs_eps == 0
        assert minimax_values(g) == (0, 0)

    def test_unique_mixed_solution(self):
        g = from_bimatrix([[3, -1], [-2, 1]], [[-3, 1], [2, -1]])
        cert = solve_zero_sum(g)
        assert cert.x == (F(3, 7), F(4, 7))
        assert cert.y == (F(2, 7), F(5, 7))
        assert minimax_values(g) == (F(1, 7), F(1, 7))

    def test_saddle_point(self):
        g = from_bimatrix([[2, 3], [1, 0]], [[-2, -3], [-1, 0]])
        cert = solve_zero_sum(g)
        assert cert.x == (F(1), F(0))
        assert cert.y == (F(1), F(0))

    def test_rejects_nonzero_sum(self):
        with pytest.raises(NotZeroSum):
            solve_zero_sum(from_bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]]))

    def test_ranking_duel(self):
        spec = RankingDuelSpec(m=2, A=[[1, 0, 0, 2], [0, 1, 3, 0], [0, 0, 1, 0], [1, 0, 0, 1]])
        cert = solve_zero_sum(from_ranking_duel(spec))
        assert cert.is_exact


@pytest.mark.integration
class TestRandomZeroSum:
    """Seeded random games: minimax theorem and exact certificates."""

    @pytest.mark.parametrize("seed", range(8))
    def test_random_games(self, seed):
        g = validate(generate("zero-sum", 4, 3, seed=seed))
        cert = solve_zero_sum(g)
        lower, upper = minimax_values(g)
        assert lower == upper
        assert cert.abs_eps == 0
        assert cert.qp_residual == 0
