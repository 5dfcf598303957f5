"""Input specifications for the game-class converters.

Each spec is the JSON schema accepted by ``bilinear convert --kind ...``.
Shape problems raise ``DimensionMismatch``; spec-specific problems raise the
dedicated validation errors (``InvalidPrior``, ``MalformedTree``).
"""

from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bilinear.core.rational import RatMatrix, RatVector, Rational
from bilinear.errors import DimensionMismatch, InvalidPrior, MalformedTree


def _shape(matrix: RatMatrix) -> tuple[int, int]:
    rows = len(matrix)
    widths = {len(row) for row in matrix}
    if rows == 0 or len(widths) != 1 or 0 in widths:
        raise DimensionMismatch(f"expected a nonempty rectangular matrix, got widths {sorted(widths)}")
    return rows, widths.pop()


class BimatrixSpec(BaseModel):
    """A classical bimatrix game (A, B)."""

    model_config = ConfigDict(frozen=True)

    A: RatMatrix
    B: RatMatrix

    @model_validator(mode="after")
    def check_shapes(self) -> "BimatrixSpec":
        if _shape(self.A) != _shape(self.B):
            raise DimensionMismatch(f"A is {_shape(self.A)} but B is {_shape(self.B)}")
        return self


class BayesianSpec(BaseModel):
    """Two-player Bayesian game with a common prior over type pairs.

    ``A[t][s]`` and ``B[t][s]`` are the m1 x m2 payoff matrices when the row
    player has type t and the column player type s.
    """

    model_config = ConfigDict(frozen=True)

    prior: RatMatrix = Field(..., description="t1 x t2 joint type distribution")
    A: tuple[tuple[RatMatrix, ...], ...]
    B: tuple[tuple[RatMatrix, ...], ...]

    @model_validator(mode="after")
    def check_spec(self) -> "BayesianSpec":
        t1, t2 = _shape(self.prior)
        for name, grid in (("A", self.A), ("B", self.B)):
            if len(grid) != t1 or any(len(row) != t2 for row in grid):
                raise DimensionMismatch(f"{name} must be a {t1} x {t2} grid of matrices")
        shapes = {_shape(m) for grid in (self.A, self.B) for row in grid for m in row}
        if len(shapes) != 1:
            raise DimensionMismatch(f"type payoff matrices differ in shape: {sorted(shapes)}")
        if any(p < 0 for row in self.prior for p in row):
            raise InvalidPrior("prior has negative entries")
        if sum((p for row in self.prior for p in row), Fraction(0)) != 1:
            raise InvalidPrior("prior does not sum to 1")
        return self

    @property
    def types(self) -> tuple[int, int]:
        return _shape(self.prior)

    @property
    def actions(self) -> tuple[int, int]:
        return _shape(self.A[0][0])


class PolymatrixBlock(BaseModel):
    """Payoff of player ``row`` against player ``col`` (players are 0-based)."""

    model_config = ConfigDict(frozen=True)

    row: int = Field(..., ge=0)
    col: int = Field(..., ge=0)
    matrix: RatMatrix


class PolymatrixSpec(BaseModel):
    """n-player polymatrix game; missing blocks are zero."""

    model_config = ConfigDict(frozen=True)

    strategies: tuple[int, ...] = Field(..., description="|S_i| per player")
    blocks: tuple[PolymatrixBlock, ...] = ()

    @model_validator(mode="after")
    def check_blocks(self) -> "PolymatrixSpec":
        n = len(self.strategies)
        if n < 2 or any(s < 1 for s in self.strategies):
            raise DimensionMismatch("need at least two players with at least one strategy each")
        seen = set()
        for block in self.blocks:
            if block.row >= n or block.col >= n or block.row == block.col:
                raise DimensionMismatch(f"invalid block ({block.row}, {block.col}) for {n} players")
            if (block.row, block.col) in seen:
                raise DimensionMismatch(f"duplicate block ({block.row}, {block.col})")
            seen.add((block.row, block.col))
            expected = (self.strategies[block.row], self.strategies[block.col])
            if _shape(block.matrix) != expected:
                raise DimensionMismatch(
                    f"block ({block.row}, {block.col}) must be {expected}, got {_shape(block.matrix)}"
                )
        return self

    @property
    def players(self) -> int:
        return len(self.strategies)

    def block(self, i: int, j: int) -> RatMatrix | None:
        for block in self.blocks:
            if block.row == i and block.col == j:
                return block.matrix
        return None


class RankingDuelSpec(BaseModel):
    """Zero-sum ranking duel: payoff A over pairs of m x m doubly-stochastic matrices."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    A: RatMatrix = Field(..., description="m^2 x m^2 payoff of the row player")

    @model_validator(mode="after")
    def check_shape(self) -> "RankingDuelSpec":
        if _shape(self.A) != (self.m * self.m, self.m * self.m):
            raise DimensionMismatch(f"A must be {self.m**2} x {self.m**2}")
        return self


class InequalityFormSpec(BaseModel):
    """Game with strategy sets {x >= 0 : Gx <= g} and {y >= 0 : Hy <= h}."""

    model_config = ConfigDict(frozen=True)

    A: RatMatrix
    B: RatMatrix
    G: RatMatrix
    g: RatVector
    H: RatMatrix
    h: RatVector

    @model_validator(mode="after")
    def check_shapes(self) -> "InequalityFormSpec":
        m, n = _shape(self.A)
        if _shape(self.B) != (m, n):
            raise DimensionMismatch("A and B differ in shape")
        if len(self.G) != len(self.g) or any(len(row) != m for row in self.G):
            raise DimensionMismatch(f"G must have {m} columns and one row per entry of g")
        if len(self.H) != len(self.h) or any(len(row) != n for row in self.H):
            raise DimensionMismatch(f"H must have {n} columns and one row per entry of h")
        return self


# ===== EXTENSIVE FORM =====


class TreeNode(BaseModel):
    """One node of a two-player extensive-form tree.

    Decision nodes name their player, information set and actions (one child
    per action). Chance nodes list child probabilities. Leaves carry the two
    players' payoffs.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["decision", "chance", "leaf"]
    player: Literal[1, 2] | None = None
    infoset: str | None = None
    actions: tuple[str, ...] = ()
    children: tuple[int, ...] = ()
    probabilities: RatVector = ()
    payoff: tuple[Rational, Rational] | None = None


class ExtensiveFormTree(BaseModel):
    """A game tree stored as a node list; ``root`` indexes the first node played."""

    model_config = ConfigDict(frozen=True)

    nodes: tuple[TreeNode, ...]
    root: int = 0

    @model_validator(mode="after")
    def check_structure(self) -> "ExtensiveFormTree":
        count = len(self.nodes)
        if not 0 <= self.root < count:
            raise MalformedTree(f"root {self.root} is not a node index")

        infosets: dict[str, tuple[int, tuple[str, ...]]] = {}
        parents: dict[int, int] = {}
        for index, node in enumerate(self.nodes):
            for child in node.children:
                if not 0 <= child < count or child == self.root:
                    raise MalformedTree(f"node {index} has invalid child {child}")
                if child in parents:
                    raise MalformedTree(f"node {child} has two parents")
                parents[child] = index
            if node.kind == "leaf":
                if node.children or node.payoff is None:
                    raise MalformedTree(f"leaf {index} needs a payoff and no children")
            elif node.kind == "chance":
                if not node.children or len(node.probabilities) != len(node.children):
                    raise MalformedTree(f"chance node {index} needs one probability per child")
                if any(p < 0 for p in node.probabilities) or sum(node.probabilities, Fraction(0)) != 1:
                    raise MalformedTree(f"chance node {index} probabilities are not a distribution")
            else:
                if node.player is None or node.infoset is None:
                    raise MalformedTree(f"decision node {index} needs a player and an infoset")
                if not node.actions or len(node.actions) != len(node.children):
                    raise MalformedTree(f"decision node {index} needs one child per action")
                if len(set(node.actions)) != len(node.actions):
                    raise MalformedTree(f"decision node {index} repeats an action name")
                signature = (node.player, node.actions)
                if infosets.setdefault(node.infoset, signature) != signature:
                    raise MalformedTree(
                        f"infoset {node.infoset!r} mixes players or action lists (node {index})"
                    )

        if len(parents) != count - 1:
            raise MalformedTree("every node except the root must have exactly one parent")
        reached, stack = {self.root}, [self.root]
        while stack:
            for child in self.nodes[stack.pop()].children:
                if child not in reached:
                    reached.add(child)
                    stack.append(child)
        if len(reached) != count:
            raise MalformedTree(f"{count - len(reached)} nodes are not reachable from the root")
        return self
