"""Tests for the game-class reductions and the random generators."""

import sys
from fractions import Fraction
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest

from bilinear.errors import (
    DimensionMismatch,
    InvalidPrior,
    MalformedTree,
    NotPerfectRecall,
    NotSymmetric,
)
from bilinear.models.specs import (
    BayesianSpec,
    ExtensiveFormTree,
    InequalityFormSpec,
    PolymatrixSpec,
    RankingDuelSpec,
)
from bilinear.services.converters import (
    bayesian_expected_payoffs,
    behavior_to_realization,
    extract_polymatrix_ne,
    from_bayesian,
    from_extensive_form,
    from_inequality_form,
    from_polymatrix,
    from_ranking_duel,
    polymatrix_is_equilibrium,
    polymatrix_payoffs,
    ranking_duel_polytope,
    realization_to_behavior,
    tree_expected_payoffs,
)
from bilinear.services.game import game_rank, in_strategy_set, is_symmetric, payoffs, validate
from bilinear.services.generators import generate, planted_positive_rank
from bilinear.solvers.oracle import brute_force_equilibria, profile_set

F = Fraction
HALF = F(1, 2)


def leaf(u, v):
    return {"kind": "leaf", "payoff": [u, v]}


@pytest.fixture
def pennies_tree():
    """Matching pennies where player 2 moves without seeing player 1's coin."""
    return ExtensiveFormTree.model_validate(
        {
            "nodes": [
                {"kind": "decision", "player": 1, "infoset": "I", "actions": ["H", "T"], "children": [1, 2]},
                {"kind": "decision", "player": 2, "infoset": "J", "actions": ["h", "t"], "children": [3, 4]},
                {"kind": "decision", "player": 2, "infoset": "J", "actions": ["h", "t"], "children": [5, 6]},
                leaf(1, -1),
                leaf(-1, 1),
                leaf(-1, 1),
                leaf(1, -1),
            ]
        }
    )


@pytest.fixture
def chance_tree():
    """Chance picks a state player 1 observes; player 2 moves blind."""
    blind = {"kind": "decision", "player": 2, "infoset": "J", "actions": ["h", "t"]}
    return ExtensiveFormTree.model_validate(
        {
            "nodes": [
                {"kind": "chance", "children": [1, 2], "probabilities": ["1/3", "2/3"]},
                {"kind": "decision", "player": 1, "infoset": "I1", "actions": ["a", "b"], "children": [3, 4]},
                {"kind": "decision", "player": 1, "infoset": "I2", "actions": ["c", "d"], "children": [5, 6]},
                {**blind, "children": [7, 8]},
                {**blind, "children": [9, 10]},
                {**blind, "children": [11, 12]},
                {**blind, "children": [13, 14]},
                leaf(3, 0),
                leaf(-1, 2),
                leaf(0, 1),
                leaf(2, -2),
                leaf(-3, 1),
                leaf(1, 0),
                leaf(4, -1),
                leaf(0, 3),
            ]
        }
    )


@pytest.fixture
def bayesian_spec():
    return BayesianSpec.model_validate(
        {
            "prior": [["1/2", "1/2"]],
            "A": [[[[1, 0], [0, 1]], [[0, 1], [1, 0]]]],
            "B": [[[[0, 1], [1, 0]], [[1, 0], [0, 1]]]],
        }
    )


@pytest.mark.unit
class TestBayesian:
    def test_dimensions(self, bayesian_spec):
        g = from_bayesian(bayesian_spec)
        assert (g.M, g.N, g.k1, g.k2) == (2, 4, 1, 2)
        assert g.payoff_scale == 2

    def test_payoffs_match_direct_evaluation(self, bayesian_spec):
        g = from_bayesian(bayesian_spec)
        x = (F(1, 3), F(2, 3))
        y1, y2 = (F(1, 4), F(3, 4)), (F(1), F(0))
        assert payoffs(g, x, y1 + y2) == bayesian_expected_payoffs(bayesian_spec, [x], [y1, y2])

    def test_prior_must_be_distribution(self):
        with pytest.raises(InvalidPrior):
            BayesianSpec.model_validate(
                {"prior": [["1/2", 1]], "A": [[[[1]], [[1]]]], "B": [[[[1]], [[1]]]]}
            )
        with pytest.raises(InvalidPrior):
            BayesianSpec.model_validate(
                {"prior": [[-1, 2]], "A": [[[[1]], [[1]]]], "B": [[[[1]], [[1]]]]}
            )

    def test_grid_shape(self):
        with pytest.raises(DimensionMismatch):
            BayesianSpec.model_validate({"prior": [[1]], "A": [[[[1]], [[1]]]], "B": [[[[1]]]]})


@pytest.mark.unit
class TestPolymatrix:
    @pytest.fixture
    def spec(self):
        return PolymatrixSpec.model_validate(
            {
                "strategies": [2, 2],
                "blocks": [
                    {"row": 0, "col": 1, "matrix": [[1, 0], [0, 1]]},
                    {"row": 1, "col": 0, "matrix": [[1, 0], [0, 1]]},
                ],
            }
        )

    def test_induced_game_is_symmetric(self, spec):
        g = from_polymatrix(spec)
        assert is_symmetric(g)
        assert (g.M, g.k1) == (4, 2)

    def test_symmetric_equilibrium_extracts(self, spec):
        g = from_polymatrix(spec)
        z = (F(1), F(0), F(1), F(0))
        assert (z, z) in profile_set(brute_force_equilibria(g))
        strategies = extract_polymatrix_ne(spec, z, z)
        assert strategies == ((F(1), F(0)), (F(1), F(0)))
        assert polymatrix_is_equilibrium(spec, strategies)
        assert polymatrix_payoffs(spec, strategies) == (F(1), F(1))

    def test_three_players_through_the_oracle(self):
        rng = np.random.default_rng(4)
        blocks = [
            {"row": i, "col": j, "matrix": rng.integers(-3, 4, (2, 2)).tolist()}
            for i in range(3)
            for j in range(3)
            if i != j
        ]
        spec = PolymatrixSpec.model_validate({"strategies": [2, 2, 2], "blocks": blocks})
        g = from_polymatrix(spec)
        assert (g.M, g.k1) == (6, 3)
        for cert in brute_force_equilibria(g):
            if cert.x == cert.y:
                assert polymatrix_is_equilibrium(spec, extract_polymatrix_ne(spec, cert.x, cert.y))

    def test_three_player_coordination(self):
        identity = [[1, 0], [0, 1]]
        blocks = [{"row": i, "col": j, "matrix": identity} for i in range(3) for j in range(3) if i != j]
        spec = PolymatrixSpec.model_validate({"strategies": [2, 2, 2], "blocks": blocks})
        symmetric = [c for c in brute_force_equilibria(from_polymatrix(spec)) if c.x == c.y]
        extracted = {extract_polymatrix_ne(spec, c.x, c.y) for c in symmetric}
        assert ((F(1), F(0)),) * 3 in extracted
        assert ((F(0), F(1)),) * 3 in extracted
        assert all(polymatrix_is_equilibrium(spec, s) for s in extracted)

    def test_miscoordination_is_not_equilibrium(self, spec):
        assert not polymatrix_is_equilibrium(spec, [(F(1), F(0)), (F(0), F(1))])

    def test_asymmetric_profile_rejected(self, spec):
        with pytest.raises(NotSymmetric):
            extract_polymatrix_ne(spec, (F(1), F(0), F(1), F(0)), (F(0), F(1), F(1), F(0)))

    def test_block_validation(self):
        with pytest.raises(DimensionMismatch):
            PolymatrixSpec.model_validate(
                {"strategies": [2, 2], "blocks": [{"row": 0, "col": 1, "matrix": [[1, 0]]}]}
            )
        with pytest.raises(DimensionMismatch):
            PolymatrixSpec.model_validate(
                {"strategies": [1, 1], "blocks": [{"row": 0, "col": 0, "matrix": [[1]]}]}
            )


@pytest.mark.unit
class TestRankingDuel:
    def test_birkhoff_rows(self):
        E, e = ranking_duel_polytope(2)
        assert len(E) == 3 and len(E[0]) == 4
        assert in_strategy_set(E, e, (HALF, HALF, HALF, HALF))
        assert in_strategy_set(E, e, (F(1), F(0), F(0), F(1)))
        assert not in_strategy_set(E, e, (F(1), F(0), F(1), F(0)))

    def test_duel_is_zero_sum(self):
        spec = RankingDuelSpec(m=2, A=[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        g = from_ranking_duel(spec)
        assert game_rank(g) == 0
        assert (g.M, g.k1) == (4, 3)

    def test_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            RankingDuelSpec(m=2, A=[[1, 0], [0, 1]])
        with pytest.raises(ValueError):
            ranking_duel_polytope(0)


@pytest.mark.unit
class TestInequalityForm:
    def test_slacks_added(self):
        spec = InequalityFormSpec(A=[[1]], B=[[2]], G=[[1]], g=[1], H=[[1]], h=[2])
        g = from_inequality_form(spec)
        assert (g.M, g.N) == (2, 2)
        assert g.A == ((F(1), F(0)), (F(0), F(0)))
        assert g.E == ((F(1), F(1)),)
        assert g.f == (F(2),)

    def test_column_count_checked(self):
        with pytest.raises(DimensionMismatch):
            InequalityFormSpec(A=[[1]], B=[[2]], G=[[1, 1]], g=[1], H=[[1]], h=[2])


@pytest.mark.unit
class TestExtensiveForm:
    def test_sequence_form_layout(self, pennies_tree):
        g = from_extensive_form(pennies_tree)
        assert (g.M, g.N, g.k1, g.k2) == (3, 3, 2, 2)
        assert g.A[1][1] == 1 and g.A[1][2] == -1
        assert game_rank(g) == 0

    def test_realization_round_trip(self, pennies_tree):
        plan = behavior_to_realization(pennies_tree, 1, {"I": (F(1, 3), F(2, 3))})
        assert plan == (F(1), F(1, 3), F(2, 3))
        assert realization_to_behavior(pennies_tree, 1, plan) == {"I": (F(1, 3), F(2, 3))}

    def test_payoffs_match_tree_walk(self, pennies_tree):
        g = from_extensive_form(pennies_tree)
        b1, b2 = {"I": (F(1, 3), F(2, 3))}, {"J": (F(1, 4), F(3, 4))}
        x = behavior_to_realization(pennies_tree, 1, b1)
        y = behavior_to_realization(pennies_tree, 2, b2)
        assert payoffs(g, x, y) == tree_expected_payoffs(pennies_tree, b1, b2)

    def test_payoffs_with_chance_over_random_behaviours(self, chance_tree):
        g = from_extensive_form(chance_tree)
        assert (g.M, g.N, g.k1, g.k2) == (5, 3, 3, 2)
        rng = np.random.default_rng(17)

        def mixed():
            a, b = (int(v) for v in rng.integers(0, 5, 2))
            return (F(a, a + b), F(b, a + b)) if a + b else (HALF, HALF)

        for _ in range(100):
            b1, b2 = {"I1": mixed(), "I2": mixed()}, {"J": mixed()}
            x = behavior_to_realization(chance_tree, 1, b1)
            y = behavior_to_realization(chance_tree, 2, b2)
            assert in_strategy_set(g.E, g.e, x) and in_strategy_set(g.F, g.f, y)
            assert payoffs(g, x, y) == tree_expected_payoffs(chance_tree, b1, b2)

    def test_equilibrium_in_realization_plans(self, pennies_tree):
        g = from_extensive_form(pennies_tree)
        plan = (F(1), HALF, HALF)
        assert profile_set(brute_force_equilibria(g)) == {(plan, plan)}

    def test_imperfect_recall_rejected(self):
        tree = ExtensiveFormTree.model_validate(
            {
                "nodes": [
                    {"kind": "decision", "player": 1, "infoset": "I", "actions": ["a", "b"], "children": [1, 2]},
                    {"kind": "decision", "player": 1, "infoset": "K", "actions": ["c", "d"], "children": [3, 4]},
                    {"kind": "decision", "player": 1, "infoset": "K", "actions": ["c", "d"], "children": [5, 6]},
                    leaf(1, 0),
                    leaf(0, 0),
                    leaf(0, 0),
                    leaf(0, 1),
                ]
            }
        )
        with pytest.raises(NotPerfectRecall):
            from_extensive_form(tree)

    def test_malformed_trees(self):
        with pytest.raises(MalformedTree):
            ExtensiveFormTree.model_validate({"nodes": [{"kind": "leaf"}]})
        with pytest.raises(MalformedTree):
            ExtensiveFormTree.model_validate(
                {"nodes": [{"kind": "chance", "children": [1, 2], "probabilities": ["1/2", "1/3"]}, leaf(0, 0), leaf(0, 0)]}
            )
        with pytest.raises(MalformedTree):
            ExtensiveFormTree.model_validate({"nodes": [leaf(0, 0), leaf(1, 1)]})


@pytest.mark.unit
class TestGenerators:
    """Seeded generators are deterministic and produce the advertised structure."""

    def test_same_seed_same_game(self):
        assert generate("bimatrix", 3, 4, seed=5) == generate("bimatrix", 3, 4, seed=5)
        assert generate("bimatrix", 3, 4, seed=5) != generate("bimatrix", 3, 4, seed=6)

    @pytest.mark.parametrize("kind, rank", [("zero-sum", 0), ("rank1", 1)])
    def test_rank_of_generated_games(self, kind, rank):
        for seed in range(5):
            g = validate(generate(kind, 3, 3, seed=seed))
            assert game_rank(g) <= rank

    def test_planted_pairs_reconstruct(self):
        raw, pairs = planted_positive_rank(3, 4, rank=2, seed=1)
        assert len(pairs) == 2
        for i in range(3):
            for j in range(4):
                assert raw.A[i][j] + raw.B[i][j] == sum(a[i] * b[j] for a, b in pairs)
        assert all(v >= 1 for a, b in pairs for v in a + b)

    def test_birkhoff_game(self):
        g = validate(generate("birkhoff-rank1", 2, 0, seed=3))
        assert (g.M, g.N, g.k1) == (4, 4, 3)
        assert game_rank(g) <= 1

    def test_bounds_checked(self):
        with pytest.raises(ValueError):
            generate("bimatrix", 2, 2, low=3, high=1)
