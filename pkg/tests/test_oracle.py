"""Tests for the brute-force oracles and the fully-labelled characterisation."""

import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from bilinear.errors import DimensionMismatch, TooLarge
from bilinear.models.game import StrategyProfile
from bilinear.services.brp import build_brp_P, build_brp_Q, exhaustive_vertices, is_fully_labeled, labels_at
from bilinear.services.converters import from_bimatrix
from bilinear.services.game import symmetrize, validate, verify
from bilinear.services.generators import generate
from bilinear.solvers.oracle import bimatrix_support_enumeration, brute_force_equilibria, profile_set

F = Fraction
THIRD = F(1, 3)

RPS_A = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]
RPS_B = [[0, 1, -1], [-1, 0, 1], [1, -1, 0]]


@pytest.mark.unit
class TestBruteForce:
    def test_coordination(self):
        g = from_bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]])
        certs = brute_force_equilibria(g)
        assert len(certs) == 3
        assert all(c.algorithm == "oracle" and c.abs_eps == 0 for c in certs)

    def test_rock_paper_scissors(self):
        g = from_bimatrix(RPS_A, RPS_B)
        assert profile_set(brute_force_equilibria(g)) == {((THIRD,) * 3, (THIRD,) * 3)}

    def test_size_guard(self):
        g = from_bimatrix(RPS_A, RPS_B)
        with pytest.raises(TooLarge):
            brute_force_equilibria(g, max_constraints=5)

    def test_symmetrized_game_projects(self):
        g = from_bimatrix([[2, 0], [0, 1]], [[1, 0], [0, 2]])
        s = symmetrize(g)
        symmetric = [c for c in brute_force_equilibria(s) if c.x == c.y]
        assert symmetric
        for cert in symmetric:
            x, y = cert.x[: g.M], cert.x[g.M :]
            assert verify(g, StrategyProfile(x=x, y=y)).abs_eps == 0


@pytest.mark.unit
class TestSupportEnumeration:
    def test_battle_of_the_sexes(self):
        found = bimatrix_support_enumeration([[2, 0], [0, 1]], [[1, 0], [0, 2]])
        assert set(found) == {
            ((F(1), F(0)), (F(1), F(0))),
            ((F(0), F(1)), (F(0), F(1))),
            ((F(2, 3), F(1, 3)), (F(1, 3), F(2, 3))),
        }

    @pytest.mark.parametrize(
        "A, B",
        [
            (RPS_A, RPS_B),
            ([[2, 0], [0, 1]], [[1, 0], [0, 2]]),
            ([[3, 0], [5, 1]], [[3, 5], [0, 1]]),
        ],
    )
    def test_agrees_with_vertex_pairs(self, A, B):
        assert set(bimatrix_support_enumeration(A, B)) == profile_set(brute_force_equilibria(from_bimatrix(A, B)))

    def test_shape_and_size_guards(self):
        with pytest.raises(DimensionMismatch):
            bimatrix_support_enumeration([[1, 2]], [[1]])
        with pytest.raises(TooLarge):
            bimatrix_support_enumeration(RPS_A, RPS_B, max_dim=2)


@pytest.mark.integration
class TestFullyLabelledPairs:
    """A vertex pair is an equilibrium exactly when it is fully labelled."""

    @pytest.mark.parametrize("seed", range(5))
    def test_random_games(self, seed):
        g = validate(generate("bimatrix", 2, 3, seed=seed, low=-3, high=3))
        P, Q = build_brp_P(g), build_brp_Q(g)
        for v, w in product(exhaustive_vertices(P), exhaustive_vertices(Q)):
            labelled = is_fully_labeled(labels_at(P, v), labels_at(Q, w), g.M, g.N)
            exact = verify(g, StrategyProfile(x=w[: g.M], y=v[: g.N])).abs_eps == 0
            assert labelled == exact

    @pytest.mark.parametrize("seed", range(5))
    def test_every_equilibrium_has_a_labelled_pair(self, seed):
        g = validate(generate("bimatrix", 3, 3, seed=seed, low=-3, high=3))
        P, Q = build_brp_P(g), build_brp_Q(g)
        labelled = {
            (w[: g.M], v[: g.N])
            for v, w in product(exhaustive_vertices(P), exhaustive_vertices(Q))
            if is_fully_labeled(labels_at(P, v), labels_at(Q, w), g.M, g.N)
        }
        # support enumeration never looks at labels
        found = bimatrix_support_enumeration(g.A, g.B)
        assert found
        assert set(found) <= labelled
