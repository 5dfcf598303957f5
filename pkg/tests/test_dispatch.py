"""Tests for algorithm selection."""

import sys
from fractions import Fraction
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

import bilinear.solvers.dispatch as dispatch
from bilinear.errors import DegenerateGame, NoApplicableAlgorithm
from bilinear.models.config import OracleConfig, ProjectConfig, Rank1Config, SolverConfig
from bilinear.services.converters import from_bimatrix
from bilinear.solvers.dispatch import choose_algorithm, solve

F = Fraction

PENNIES = ([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
CHASE = ([[1, 0], [0, 1]], [[0, 1], [1, 0]])
BATTLE = ([[2, 0], [0, 1]], [[1, 0], [0, 2]])
# A + B = (1, 2)ᵀ(1, 1) + (2, 1)ᵀ(1, 3), entrywise positive factors
POSITIVE = ([[1, 0], [0, 1]], [[2, 7], [3, 4]])
POSITIVE_PAIRS = [((1, 2), (1, 1)), ((2, 1), (1, 3))]


def no_lowrank(**solver) -> ProjectConfig:
    return ProjectConfig(solver=SolverConfig(lowrank_threshold=0, **solver))


@pytest.mark.unit
class TestChooseAlgorithm:
    def test_route_by_rank(self):
        assert choose_algorithm(from_bimatrix(*PENNIES)) == "zero-sum"
        assert choose_algorithm(from_bimatrix(*CHASE)) == "rank1"
        assert choose_algorithm(from_bimatrix(*BATTLE)) == "low-rank"

    def test_oracle_for_small_games(self):
        assert choose_algorithm(from_bimatrix(*BATTLE), config=no_lowrank()) == "oracle"

    def test_relative_scheme_needs_eps_and_positive_factors(self):
        g = from_bimatrix(*POSITIVE)
        config = no_lowrank()
        assert choose_algorithm(g, eps=F(1, 2), config=config, pairs=POSITIVE_PAIRS) == "fptas-rel"
        assert choose_algorithm(g, config=config, pairs=POSITIVE_PAIRS) == "oracle"
        assert choose_algorithm(g, eps=F(1, 2), config=config) == "oracle"

    def test_nothing_applies(self):
        config = no_lowrank(oracle_auto_limit=4)
        with pytest.raises(NoApplicableAlgorithm):
            choose_algorithm(from_bimatrix(*BATTLE), config=config)


@pytest.mark.unit
class TestSolve:
    def test_auto(self):
        assert solve(from_bimatrix(*PENNIES)).algorithm == "zero-sum"
        cert = solve(from_bimatrix(*CHASE))
        assert cert.algorithm == "rank1"
        assert cert.abs_eps == 0

    @pytest.mark.parametrize("algorithm", ["low-rank", "oracle", "rank1"])
    def test_explicit_exact_algorithms(self, algorithm):
        cert = solve(from_bimatrix(*CHASE), algorithm)
        assert cert.algorithm == algorithm
        assert cert.x == (F(1, 2), F(1, 2))

    def test_approximation_needs_eps(self):
        with pytest.raises(ValueError):
            solve(from_bimatrix(*CHASE), "fptas-abs")

    def test_relative_scheme_with_pairs(self):
        cert = solve(from_bimatrix(*POSITIVE), "auto", eps=F(1, 2), config=no_lowrank(), pairs=POSITIVE_PAIRS)
        assert cert.algorithm == "fptas-rel"
        assert cert.rel_eps <= 1 - 1 / F(9, 4)

    def test_absolute_scheme(self):
        cert = solve(from_bimatrix(*BATTLE), "fptas-abs", eps=F(1, 2), jobs=1)
        assert cert.abs_eps <= F(1, 2)

    def test_rank1_falls_back(self, monkeypatch):
        def stall(g, strict=False):
            raise DegenerateGame("stalled")

        monkeypatch.setattr(dispatch, "solve_rank1", stall)
        cert = solve(from_bimatrix(*CHASE))
        assert cert.algorithm == "low-rank"
        assert cert.abs_eps == 0

    def test_strict_rank1_raises(self, monkeypatch):
        def stall(g, strict=False):
            raise DegenerateGame("stalled")

        monkeypatch.setattr(dispatch, "solve_rank1", stall)
        with pytest.raises(DegenerateGame):
            solve(from_bimatrix(*CHASE), config=ProjectConfig(rank1=Rank1Config(strict=True)))

    def test_oracle_limit_from_config(self):
        config = ProjectConfig(oracle=OracleConfig(max_constraints=17), solver=SolverConfig(oracle_auto_limit=4))
        assert solve(from_bimatrix(*BATTLE), "oracle", config=config).algorithm == "oracle"
