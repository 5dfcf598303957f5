"""Reductions from classical game classes to bilinear games.

Every ``from_*`` function returns a validated ``BilinearGame``. The helper
evaluators (``bayesian_expected_payoffs``, ``polymatrix_payoffs``,
``tree_expected_payoffs``) compute payoffs directly in the source game and
serve as independent checks of the reductions.
"""

import logging
import math
from fractions import Fraction
from typing import Mapping, Sequence

from bilinear.core.linalg import (
    ZERO,
    bilinear_form,
    block_diagonal,
    block_matrix,
    hstack,
    identity,
    matvec,
    ones_vector,
    scale_matrix,
    transpose,
    zeros,
)
from bilinear.core.rational import RatMatrix, RatVector
from bilinear.errors import InfeasibleStrategy, NotPerfectRecall, NotSymmetric
from bilinear.models.game import BilinearGame, GameData
from bilinear.models.specs import (
    BayesianSpec,
    ExtensiveFormTree,
    InequalityFormSpec,
    PolymatrixSpec,
    RankingDuelSpec,
)
from bilinear.services.game import validate

logger = logging.getLogger(__name__)

ONE = Fraction(1)


def _simplex_rows(n: int) -> tuple[RatMatrix, RatVector]:
    return (ones_vector(n),), (ONE,)


# ===== BIMATRIX =====


def from_bimatrix(A: RatMatrix, B: RatMatrix) -> BilinearGame:
    """Embed (A, B) with X and Y the probability simplices (E = 1ᵀ, e = 1)."""
    M = len(A)
    N = len(A[0]) if A else 0
    E, e = _simplex_rows(M)
    F, f = _simplex_rows(N)
    return validate(GameData(A=A, B=B, E=E, F=F, e=e, f=f))


# ===== BAYESIAN =====


def from_bayesian(spec: BayesianSpec) -> BilinearGame:
    """Stack per-type strategies; block (t, s) of A is prior[t][s]·A[t][s]."""
    t1, t2 = spec.types
    m1, m2 = spec.actions
    A = block_matrix([[scale_matrix(spec.prior[t][s], spec.A[t][s]) for s in range(t2)] for t in range(t1)])
    B = block_matrix([[scale_matrix(spec.prior[t][s], spec.B[t][s]) for s in range(t2)] for t in range(t1)])
    E = block_diagonal([(ones_vector(m1),)] * t1, [m1] * t1)
    F = block_diagonal([(ones_vector(m2),)] * t2, [m2] * t2)
    logger.debug(f"bayesian: {t1}x{t2} types, {m1}x{m2} actions -> {t1 * m1}x{t2 * m2}")
    return validate(GameData(A=A, B=B, E=E, F=F, e=ones_vector(t1), f=ones_vector(t2)))


def bayesian_expected_payoffs(
    spec: BayesianSpec,
    x_by_type: Sequence[Sequence[Fraction]],
    y_by_type: Sequence[Sequence[Fraction]],
) -> tuple[Fraction, Fraction]:
    """Σ_{t,s} prior[t][s]·(xᵗ)ᵀ A[t][s] yˢ for both players."""
    t1, t2 = spec.types
    u = v = ZERO
    for t in range(t1):
        for s in range(t2):
            weight = spec.prior[t][s]
            if weight:
                u += weight * bilinear_form(x_by_type[t], spec.A[t][s], y_by_type[s])
                v += weight * bilinear_form(x_by_type[t], spec.B[t][s], y_by_type[s])
    return u, v


# ===== POLYMATRIX =====


def _polymatrix_matrix(spec: PolymatrixSpec) -> RatMatrix:
    n = spec.players
    sizes = spec.strategies
    grid = []
    for i in range(n):
        row = []
        for j in range(n):
            block = spec.block(i, j) if i != j else None
            row.append(block if block is not None else zeros(sizes[i], sizes[j]))
        grid.append(row)
    return block_matrix(grid)


def from_polymatrix(spec: PolymatrixSpec) -> BilinearGame:
    """The induced symmetric game (A, Aᵀ, E, E, e, e)."""
    A = _polymatrix_matrix(spec)
    sizes = spec.strategies
    E = block_diagonal([(ones_vector(s),) for s in sizes], list(sizes))
    e = ones_vector(spec.players)
    return validate(GameData(A=A, B=transpose(A), E=E, F=E, e=e, f=e))


def split_polymatrix_strategy(spec: PolymatrixSpec, z: Sequence[Fraction]) -> tuple[RatVector, ...]:
    """Cut a stacked strategy into the players' mixed strategies."""
    parts, offset = [], 0
    for size in spec.strategies:
        parts.append(tuple(z[offset : offset + size]))
        offset += size
    if offset != len(z):
        raise InfeasibleStrategy(f"expected {offset} coordinates, got {len(z)}")
    return tuple(parts)


def extract_polymatrix_ne(
    spec: PolymatrixSpec, x: Sequence[Fraction], y: Sequence[Fraction]
) -> tuple[RatVector, ...]:
    """Per-player strategies from a symmetric equilibrium (z, z) of the induced game.

    Raises:
        NotSymmetric: If x != y; asymmetric equilibria carry no polymatrix meaning.
    """
    if tuple(x) != tuple(y):
        raise NotSymmetric("polymatrix strategies come only from symmetric profiles")
    return split_polymatrix_strategy(spec, x)


def polymatrix_payoffs(spec: PolymatrixSpec, strategies: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    """Each player's payoff Σ_j (xⁱ)ᵀ A^{ij} xʲ."""
    result = []
    for i in range(spec.players):
        total = ZERO
        for j in range(spec.players):
            block = spec.block(i, j) if i != j else None
            if block is not None:
                total += bilinear_form(strategies[i], block, strategies[j])
        result.append(total)
    return tuple(result)


def polymatrix_is_equilibrium(spec: PolymatrixSpec, strategies: Sequence[Sequence[Fraction]]) -> bool:
    """Every player's payoff equals the best pure deviation payoff."""
    current = polymatrix_payoffs(spec, strategies)
    for i, size in enumerate(spec.strategies):
        incentives = [ZERO] * size
        for j in range(spec.players):
            block = spec.block(i, j) if i != j else None
            if block is not None:
                incentives = [a + b for a, b in zip(incentives, matvec(block, strategies[j]))]
        if max(incentives) > current[i]:
            return False
    return True


# ===== RANKING DUELS =====


def ranking_duel_polytope(m: int) -> tuple[RatMatrix, RatVector]:
    """(E, e) of the Birkhoff polytope over x_{ij} (index i·m + j).

    All m row sums and the first m - 1 column sums; the last column sum is
    implied and left out.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    rows = []
    for i in range(m):
        rows.append(tuple(ONE if k // m == i else ZERO for k in range(m * m)))
    for j in range(m - 1):
        rows.append(tuple(ONE if k % m == j else ZERO for k in range(m * m)))
    return tuple(rows), ones_vector(len(rows))


def ranking_duel_game(A: RatMatrix, m: int | None = None) -> BilinearGame:
    """Zero-sum game (A, -A) over two Birkhoff polytopes."""
    if m is None:
        m = math.isqrt(len(A))
    spec = RankingDuelSpec(m=m, A=A)
    E, e = ranking_duel_polytope(spec.m)
    B = scale_matrix(Fraction(-1), spec.A)
    return validate(GameData(A=spec.A, B=B, E=E, F=E, e=e, f=e))


def from_ranking_duel(spec: RankingDuelSpec) -> BilinearGame:
    return ranking_duel_game(spec.A, spec.m)


# ===== INEQUALITY FORM =====


def from_inequality_form(spec: InequalityFormSpec) -> BilinearGame:
    """Add one slack per inequality and pad the payoffs with zero blocks."""
    M, N = len(spec.A), len(spec.A[0])
    r1, r2 = len(spec.G), len(spec.H)
    A = block_matrix([[spec.A, zeros(M, r2)], [zeros(r1, N), zeros(r1, r2)]])
    B = block_matrix([[spec.B, zeros(M, r2)], [zeros(r1, N), zeros(r1, r2)]])
    E = hstack(spec.G, identity(r1)) if r1 else ()
    F = hstack(spec.H, identity(r2)) if r2 else ()
    return validate(GameData(A=A, B=B, E=E, F=F, e=spec.g, f=spec.h))


# ===== EXTENSIVE FORM =====


class SequenceForm:
    """Sequence layout of a perfect-recall tree.

    Sequences of each player are numbered from 0 (the empty sequence); the
    actions of an information set get consecutive numbers when the set is
    first met in depth-first order.
    """

    def __init__(self, tree: ExtensiveFormTree):
        self.tree = tree
        self.sequences: dict[int, list[tuple[str, str] | None]] = {1: [None], 2: [None]}
        self.infosets: dict[int, dict[str, tuple[int, tuple[int, ...]]]] = {1: {}, 2: {}}
        self.leaves: list[tuple[int, int, Fraction, int]] = []
        self._history: dict[str, tuple[tuple[str, str], ...]] = {}
        self._walk(tree.root, {1: (), 2: ()}, {1: 0, 2: 0}, ONE)

    def _register(self, node_index: int, player: int, history: tuple, parent_seq: int) -> tuple[int, ...]:
        node = self.tree.nodes[node_index]
        name = node.infoset
        if name in self._history:
            if self._history[name] != history:
                raise NotPerfectRecall(
                    f"infoset {name!r}: player {player} reaches it with different own histories"
                )
            return self.infosets[player][name][1]
        self._history[name] = history
        start = len(self.sequences[player])
        for action in node.actions:
            self.sequences[player].append((name, action))
        seqs = tuple(range(start, start + len(node.actions)))
        self.infosets[player][name] = (parent_seq, seqs)
        return seqs

    def _walk(self, index: int, history: dict, last: dict, prob: Fraction) -> None:
        node = self.tree.nodes[index]
        if node.kind == "leaf":
            self.leaves.append((last[1], last[2], prob, index))
        elif node.kind == "chance":
            for child, p in zip(node.children, node.probabilities):
                self._walk(child, history, last, prob * p)
        else:
            player = node.player
            seqs = self._register(index, player, history[player], last[player])
            for action, child, seq in zip(node.actions, node.children, seqs):
                next_history = dict(history)
                next_history[player] = history[player] + ((node.infoset, action),)
                next_last = dict(last)
                next_last[player] = seq
                self._walk(child, next_history, next_last, prob)

    def size(self, player: int) -> int:
        return len(self.sequences[player])

    def constraints(self, player: int) -> tuple[RatMatrix, RatVector]:
        """x(∅) = 1 and Σ_a x(σa) - x(σ) = 0 per information set."""
        n = self.size(player)
        rows = [tuple(ONE if k == 0 else ZERO for k in range(n))]
        for parent, seqs in self.infosets[player].values():
            row = [ZERO] * n
            for s in seqs:
                row[s] += ONE
            row[parent] -= ONE
            rows.append(tuple(row))
        rhs = (ONE,) + (ZERO,) * (len(rows) - 1)
        return tuple(rows), rhs


def from_extensive_form(tree: ExtensiveFormTree) -> BilinearGame:
    """Sequence form: A[σ][τ] sums chance-weighted leaf payoffs reached by (σ, τ).

    Raises:
        NotPerfectRecall: If an information set is reached with different own histories.
    """
    layout = SequenceForm(tree)
    M, N = layout.size(1), layout.size(2)
    A = [[ZERO] * N for _ in range(M)]
    B = [[ZERO] * N for _ in range(M)]
    for s1, s2, prob, leaf in layout.leaves:
        u, v = tree.nodes[leaf].payoff
        A[s1][s2] += prob * u
        B[s1][s2] += prob * v
    E, e = layout.constraints(1)
    F, f = layout.constraints(2)
    logger.debug(f"sequence form: {M} x {N} sequences, {len(E) - 1} + {len(F) - 1} infosets")
    return validate(
        GameData(A=tuple(map(tuple, A)), B=tuple(map(tuple, B)), E=E, F=F, e=e, f=f)
    )


def behavior_to_realization(
    tree: ExtensiveFormTree, player: int, behavior: Mapping[str, Sequence[Fraction]]
) -> RatVector:
    """Realization plan of a behavior strategy (action probabilities per infoset)."""
    layout = SequenceForm(tree)
    plan = [ZERO] * layout.size(player)
    plan[0] = ONE
    for name, (parent, seqs) in layout.infosets[player].items():
        for seq, prob in zip(seqs, behavior[name]):
            plan[seq] = plan[parent] * prob
    return tuple(plan)


def realization_to_behavior(
    tree: ExtensiveFormTree, player: int, plan: Sequence[Fraction]
) -> dict[str, RatVector]:
    """Behavior strategy of a realization plan; uniform at unreached infosets."""
    layout = SequenceForm(tree)
    behavior = {}
    for name, (parent, seqs) in layout.infosets[player].items():
        reach = plan[parent]
        if reach:
            behavior[name] = tuple(plan[s] / reach for s in seqs)
        else:
            behavior[name] = tuple(Fraction(1, len(seqs)) for _ in seqs)
    return behavior


def tree_expected_payoffs(
    tree: ExtensiveFormTree,
    behavior1: Mapping[str, Sequence[Fraction]],
    behavior2: Mapping[str, Sequence[Fraction]],
) -> tuple[Fraction, Fraction]:
    """Expected leaf payoffs by walking the tree."""
    behaviors = {1: behavior1, 2: behavior2}

    def walk(index: int) -> tuple[Fraction, Fraction]:
        node = tree.nodes[index]
        if node.kind == "leaf":
            return node.payoff
        if node.kind == "chance":
            weights = node.probabilities
        else:
            weights = behaviors[node.player][node.infoset]
        u = v = ZERO
        for child, weight in zip(node.children, weights):
            if weight:
                cu, cv = walk(child)
                u += weight * cu
                v += weight * cv
        return u, v

    return walk(tree.root)

