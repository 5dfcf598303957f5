"""Game, profile, certificate and best-response polytope models.

Design
------

A bilinear game is the six-tuple (A, B, E, F, e, f): the row player picks
x in X = {x : Ex = e, x >= 0}, the column player y in Y = {y : Fy = f, y >= 0},
and they receive xᵀAy and xᵀBy.

Two records describe a game:

- ``GameData`` is the raw six-tuple as read from a file or built by a
  converter. Only shapes are checked.
- ``BilinearGame`` is what ``bilinear.services.game.validate`` returns: A and B
  multiplied by a common positive integer (``payoff_scale``), each row of
  [E | e] and [F | f] scaled to integers, dependent rows dropped, both strategy
  sets confirmed nonempty and bounded. x_max, y_max and the bit length are
  cached at that point. Scaling payoffs by a positive number changes no
  equilibrium, and row scaling leaves X and Y untouched, so strategies of the
  validated game are strategies of the raw one.

Best-response polytopes keep every variable free and list sign constraints as
labelled inequality rows, so one ``BrpPolytope`` shape covers P, Q and the
parametrised Q′ used by the rank-1 solver.
"""

from enum import Enum
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bilinear.core.rational import RatMatrix, RatVector, Rational
from bilinear.errors import DimensionMismatch


def _check_shape(name: str, matrix: RatMatrix, rows: int, cols: int) -> None:
    if len(matrix) != rows or any(len(row) != cols for row in matrix):
        widths = sorted({len(row) for row in matrix})
        raise DimensionMismatch(f"{name} must be {rows}x{cols}, got {len(matrix)} rows of widths {widths}")


# ===== GAMES =====


class GameData(BaseModel):
    """Raw (unvalidated) bilinear game data."""

    model_config = ConfigDict(frozen=True)

    A: RatMatrix
    B: RatMatrix
    E: RatMatrix
    F: RatMatrix
    e: RatVector
    f: RatVector

    @model_validator(mode="after")
    def check_dimensions(self) -> "GameData":
        if not self.A or not self.A[0]:
            raise DimensionMismatch("A must have at least one row and one column")
        m, n = len(self.A), len(self.A[0])
        _check_shape("A", self.A, m, n)
        _check_shape("B", self.B, m, n)
        _check_shape("E", self.E, len(self.e), m)
        _check_shape("F", self.F, len(self.f), n)
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.A), len(self.A[0])


class BilinearGame(GameData):
    """A validated bilinear game with integer data (see module docstring)."""

    payoff_scale: Rational = Fraction(1)
    x_max: Rational
    y_max: Rational
    bit_length: int = Field(ge=0)

    @property
    def M(self) -> int:
        return len(self.A)

    @property
    def N(self) -> int:
        return len(self.A[0])

    @property
    def k1(self) -> int:
        return len(self.E)

    @property
    def k2(self) -> int:
        return len(self.F)

    @property
    def sum_matrix(self) -> RatMatrix:
        """A + B."""
        return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.A, self.B))

    @property
    def total_constraints(self) -> int:
        return self.M + self.N + self.k1 + self.k2


# ===== PROFILES AND CERTIFICATES =====


class StrategyProfile(BaseModel):
    """A pair of strategies (x, y)."""

    model_config = ConfigDict(frozen=True)

    x: RatVector
    y: RatVector


class CertificateFlag(str, Enum):
    DEGENERATE_SCALE = "degenerate_scale"  # D = |A+B| = 0, abs_eps not normalised
    REL_UNDEFINED = "rel_undefined"  # u + v <= 0 with nonzero regret


class EquilibriumCertificate(BaseModel):
    """A profile with best-response duals and its exact error measures.

    ``abs_eps`` and ``rel_eps`` are zero exactly when the profile is a Nash
    equilibrium; ``rel_eps`` is None when it is undefined.
    """

    model_config = ConfigDict(frozen=True)

    algorithm: str = "verify"
    iterations: int = 0
    x: RatVector
    y: RatVector
    p: RatVector
    q: RatVector
    abs_eps: Rational
    rel_eps: Rational | None
    qp_residual: Rational
    flags: tuple[CertificateFlag, ...] = ()

    @property
    def profile(self) -> StrategyProfile:
        return StrategyProfile(x=self.x, y=self.y)

    @property
    def is_exact(self) -> bool:
        return self.qp_residual == 0

    def relabel(self, algorithm: str, iterations: int = 0) -> "EquilibriumCertificate":
        """Copy tagged with the producing algorithm."""
        return self.model_copy(update={"algorithm": algorithm, "iterations": iterations})


# ===== BEST RESPONSE POLYTOPES =====


class BrpKind(str, Enum):
    P = "P"  # over (y, p)
    Q = "Q"  # over (x, q)
    Q_PRIME = "Q'"  # over (x, lambda, q)


class BrpPolytope(BaseModel):
    """H-description of a best response polytope with labelled inequalities.

    All variables are free. ``ineq_matrix`` rows carry the labels in
    ``labels`` (1..M for the row-player block, M+1..M+N for the column-player
    block, in that order). Equalities are never labelled.
    """

    model_config = ConfigDict(frozen=True)

    kind: BrpKind
    M: int
    N: int
    strategy_dim: int
    dual_dim: int
    extra_dim: int = 0
    ineq_matrix: RatMatrix
    ineq_rhs: RatVector
    labels: tuple[int, ...]
    eq_matrix: RatMatrix
    eq_rhs: RatVector

    @model_validator(mode="after")
    def check_labels(self) -> "BrpPolytope":
        if sorted(self.labels) != list(range(1, self.M + self.N + 1)):
            raise DimensionMismatch(f"labels must be 1..{self.M + self.N}, got {self.labels}")
        if len(self.ineq_matrix) != len(self.labels) or len(self.ineq_rhs) != len(self.labels):
            raise DimensionMismatch("one inequality row per label required")
        return self

    @property
    def num_vars(self) -> int:
        return self.strategy_dim + self.extra_dim + self.dual_dim

    def split(self, point: RatVector) -> tuple[RatVector, RatVector, RatVector]:
        """(strategy part, extra part, dual part) of a point."""
        s, x = self.strategy_dim, self.extra_dim
        return point[:s], point[s : s + x], point[s + x :]
