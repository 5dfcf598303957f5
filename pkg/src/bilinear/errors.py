"""Exception hierarchy for the bilinear games package.

All errors raised on purpose derive from ``BilinearError``. The CLI maps the
three families below to exit codes:

- ``GameFileError``: unreadable or schema-violating input (exit 1)
- ``GameValidationError``: data that parses but is not a valid game (exit 2)
- ``NoApplicableAlgorithm``: no solver route fits the game (exit 3)

LP infeasibility and unboundedness are reported as outcome tags by
``bilinear.core.lp`` and are never raised.
"""


class BilinearError(Exception):
    """Base class for all package errors."""


# ===== INPUT FILES =====


class GameFileError(BilinearError):
    """Raised when a game, profile or spec file cannot be parsed."""


# ===== GAME VALIDATION =====


class GameValidationError(BilinearError):
    """Raised when game data parses but does not describe a valid bilinear game."""


class DimensionMismatch(GameValidationError):
    """Matrix and vector shapes are inconsistent."""


class NonCompactStrategySet(GameValidationError):
    """A strategy polytope {x : Ex = e, x >= 0} is unbounded."""


class EmptyStrategySet(GameValidationError):
    """A strategy polytope {x : Ex = e, x >= 0} has no points."""


class InvalidPrior(GameValidationError):
    """A Bayesian prior has negative entries or does not sum to one."""


class NotPerfectRecall(GameValidationError):
    """An extensive-form tree violates perfect recall."""


class MalformedTree(GameValidationError):
    """An extensive-form tree is structurally invalid."""


# ===== LINEAR ALGEBRA / LP =====


class RankExceeded(BilinearError):
    """A matrix has larger rank than the requested factorization size."""


class MalformedProgram(BilinearError):
    """A linear program has inconsistent dimensions."""


class NotOptimal(BilinearError):
    """An operation needed an optimal LP outcome but got infeasible/unbounded."""


# ===== GAME OPERATIONS =====


class InfeasibleStrategy(BilinearError):
    """A strategy vector lies outside its strategy polytope."""


class PointNotInPolytope(BilinearError):
    """A point lies outside the best response polytope it was checked against."""


class NotSymmetric(BilinearError):
    """A profile or game was required to be symmetric but is not."""


# ===== SOLVERS =====


class NotZeroSum(BilinearError):
    """The zero-sum solver was given a game with A + B != 0."""


class NotRankOne(BilinearError):
    """The rank-1 solver was given a game with rank(A + B) > 1."""


class DegenerateFace(BilinearError):
    """The optimal face of a parametric LP has dimension greater than one."""

    def __init__(self, message: str, face=None):
        super().__init__(message)
        self.face = face


class DegenerateGame(BilinearError):
    """The rank-1 binary search exhausted its bracket without meeting H_gamma."""


class NonPositiveDecomposition(BilinearError):
    """The relative FPTAS needs entrywise positive rank factors."""


class TooLarge(BilinearError):
    """A brute-force routine was asked to handle an instance above its size guard."""


class NoApplicableAlgorithm(BilinearError):
    """Automatic routing found no algorithm suitable for the game."""


class DecompositionMismatch(BilinearError):
    """User-supplied rank factors do not reconstruct A + B."""
