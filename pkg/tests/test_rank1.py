"""Tests for the rank-1 binary search."""

import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

from bilinear.core.linalg import dot
from bilinear.errors import DegenerateFace, NotRankOne
from bilinear.models.game import StrategyProfile
from bilinear.services.brp import (
    build_brp_P,
    build_brp_Q,
    build_brp_Q_prime,
    exhaustive_vertices,
    is_fully_labeled,
    labels_at,
)
from bilinear.services.converters import from_bimatrix
from bilinear.services.game import validate, verify
from bilinear.services.generators import generate
from bilinear.solvers.oracle import brute_force_equilibria, profile_set
from bilinear.solvers.rank1 import (
    Rank1Solver,
    decompose_rank1,
    gamma_bounds,
    path_complementarity,
    path_objective,
    solve_rank1,
)

F = Fraction


@pytest.fixture
def skewed():
    """A + B = (1, 2)ᵀ(1, 1); unique equilibrium x = y = (2/3, 1/3)."""
    return from_bimatrix([[1, 0], [0, 2]], [[0, 1], [2, 0]])


@pytest.mark.unit
class TestDecomposition:
    def test_primitive_beta(self, skewed):
        gamma, beta = decompose_rank1(skewed)
        assert beta == (F(1), F(1))
        assert gamma == (F(1), F(2))

    def test_sign_normalised(self):
        g = from_bimatrix([[0, 0], [0, 0]], [[-2, -4], [-1, -2]])
        gamma, beta = decompose_rank1(g)
        assert beta == (F(1), F(2))
        assert gamma == (F(-2), F(-1))

    def test_gamma_bounds(self, skewed):
        gamma, _ = decompose_rank1(skewed)
        assert gamma_bounds(skewed, gamma) == (F(1), F(2))

    def test_wrong_rank(self):
        with pytest.raises(NotRankOne):
            decompose_rank1(from_bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]]))


@pytest.mark.unit
class TestSearch:
    def test_unique_equilibrium(self, skewed):
        cert = solve_rank1(skewed)
        assert cert.algorithm == "rank1"
        assert cert.x == (F(2, 3), F(1, 3))
        assert cert.y == (F(2, 3), F(1, 3))
        assert cert.abs_eps == 0

    def test_constant_gamma(self):
        cert = solve_rank1(from_bimatrix([[1, 0], [0, 1]], [[0, 1], [1, 0]]))
        assert cert.x == (F(1, 2), F(1, 2))
        assert cert.y == (F(1, 2), F(1, 2))

    def test_trace(self, skewed):
        result = Rank1Solver(skewed).solve()
        assert result.iterations <= result.iteration_bound
        for (lo, hi), (inner_lo, inner_hi) in zip(result.brackets, result.brackets[1:]):
            assert lo <= inner_lo <= inner_hi <= hi
        assert result.visited

    def test_path_point_is_complementary(self, skewed):
        result = Rank1Solver(skewed).solve()
        cert = result.certificate
        lam = dot(result.gamma, cert.x)
        point = cert.y + cert.p + cert.x + (lam,) + cert.q
        assert path_objective(result.beta, skewed, point) == 0
        assert path_complementarity(result.beta, skewed, point) == (0, 0)

    def test_rank_zero_goes_to_zero_sum(self):
        cert = solve_rank1(from_bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]]))
        assert cert.algorithm == "zero-sum"

    def test_rank_two_rejected(self):
        with pytest.raises(NotRankOne):
            solve_rank1(from_bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]]))

    def test_agrees_with_oracle(self, skewed):
        cert = solve_rank1(skewed)
        assert (cert.x, cert.y) in profile_set(brute_force_equilibria(skewed))


@pytest.mark.unit
class TestPathPrograms:
    """LP(a), its optimal face and the face's meeting point with H_γ."""

    def test_parametric_lp_value_is_zero(self, skewed):
        solver = Rank1Solver(skewed)
        outcome = solver.parametric_lp(F(3, 2))
        assert outcome.is_optimal
        assert outcome.value == 0

    def test_edge_contains_lambda(self, skewed):
        solver = Rank1Solver(skewed)
        edge = solver.edge_at(F(3, 2), allow_degenerate=True)
        assert edge.lam == F(3, 2)
        assert edge.lambda_lo is None or edge.lambda_lo <= F(3, 2)
        assert edge.lambda_hi is None or edge.lambda_hi >= F(3, 2)

    def test_edge_at_equilibrium_meets_hyperplane(self, skewed):
        solver = Rank1Solver(skewed)
        # γᵀx at x = (2/3, 1/3)
        edge = solver.edge_at(F(4, 3), allow_degenerate=True)
        hit = solver.intersect_with_hplane(edge)
        assert hit is not None
        assert hit.lam == dot(solver.gamma, hit.x)
        assert hit.x == (F(2, 3), F(1, 3))


@pytest.mark.integration
class TestLiftedPolytope:
    """On λ = γᵀx a vertex pair of P × Q′ is fully labelled exactly when it is an equilibrium."""

    @pytest.mark.parametrize("seed", range(6))
    def test_labels_match_equilibria(self, seed):
        g = validate(generate("rank1", 2, 3, seed=seed, low=-3, high=3))
        gamma, beta = decompose_rank1(g)
        P, Q, Qp = build_brp_P(g), build_brp_Q(g), build_brp_Q_prime(g, beta)
        equilibria = 0
        for v, w in product(exhaustive_vertices(P), exhaustive_vertices(Q)):
            x, q = w[: g.M], w[g.M :]
            lifted = tuple(x) + (dot(gamma, x),) + tuple(q)
            labels = labels_at(Qp, lifted)
            assert labels == labels_at(Q, w)
            exact = verify(g, StrategyProfile(x=x, y=v[: g.N])).abs_eps == 0
            assert is_fully_labeled(labels_at(P, v), labels, g.M, g.N) == exact
            equilibria += exact
        assert equilibria > 0

    def test_path_points_are_fully_labelled(self, skewed):
        solver = Rank1Solver(skewed)
        gamma_min, gamma_max = solver.gamma_min, solver.gamma_max
        P, Qp = build_brp_P(skewed), build_brp_Q_prime(skewed, solver.beta)
        for step in range(5):
            a = gamma_min + (gamma_max - gamma_min) * F(step, 4)
            edge = solver.edge_at(a, allow_degenerate=True)
            v = edge.y + edge.p
            w = edge.x + (edge.lam,) + edge.q
            assert is_fully_labeled(labels_at(P, v), labels_at(Qp, w), skewed.M, skewed.N)


@pytest.mark.slow
class TestRandomRankOne:
    """Seeded random games; every one of them solves exactly."""

    @pytest.mark.parametrize("kind, rows", [("rank1", 3), ("rank1", 4), ("birkhoff-rank1", 2)])
    def test_certificates_are_exact(self, kind, rows):
        for seed in range(6):
            g = validate(generate(kind, rows, rows, seed=seed))
            result = Rank1Solver(g).solve()
            assert result.certificate.abs_eps == 0
            assert result.iterations <= result.iteration_bound

    def test_strict_mode_solves_or_names_the_face(self):
        for seed in range(6):
            g = validate(generate("rank1", 3, 3, seed=seed))
            try:
                cert = Rank1Solver(g, strict=True).solve().certificate
            except DegenerateFace as exc:
                assert exc.face.dimension > 1
            else:
                assert cert.is_exact

    @pytest.mark.parametrize("seed", range(4))
    def test_vertex_denominators_within_bound(self, seed):
        g = validate(generate("rank1", 3, 3, seed=seed, low=-3, high=3))
        solver = Rank1Solver(g)
        _, beta = decompose_rank1(g)
        for brp in (build_brp_P(g), build_brp_Q_prime(g, beta)):
            for vertex in exhaustive_vertices(brp):
                assert all(c.denominator <= solver.delta for c in vertex)

    def test_fifty_games(self):
        cases = [("rank1", n, seed) for n in range(2, 7) for seed in range(8)]
        cases += [("birkhoff-rank1", 2, seed) for seed in range(10)]
        assert len(cases) == 50
        for kind, n, seed in cases:
            g = validate(generate(kind, n, n, seed=seed))
            cert = solve_rank1(g)
            assert cert.is_exact, (kind, n, seed)
