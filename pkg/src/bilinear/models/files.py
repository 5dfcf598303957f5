"""On-disk JSON formats: game files, profile files and certificate output.

Rationals are written canonically (integers bare, others as "p/q" in lowest
terms) with a fixed key order, so writing the same object twice gives the
same bytes.
"""

import json
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from bilinear.core.rational import RatVector
from bilinear.errors import GameFileError
from bilinear.models.game import EquilibriumCertificate, GameData, StrategyProfile

ModelT = TypeVar("ModelT", bound=BaseModel)

GAME_KEYS = ("A", "B", "E", "F", "e", "f")
CERTIFICATE_KEYS = ("algorithm", "iterations", "x", "y", "p", "q", "abs_eps", "rel_eps", "qp_residual", "flags")


class GameFile(GameData):
    """A game document: keys "A", "B", "E", "F", "e", "f"."""


class ProfileFile(StrategyProfile):
    """A profile document: keys "x", "y"."""


class FactorPair(BaseModel):
    alpha: RatVector
    beta: RatVector


class FactorsFile(BaseModel):
    """Rank factors of A + B in the units of the game file: {"factors": [{"alpha": [...], "beta": [...]}, ...]}."""

    factors: tuple[FactorPair, ...]

    def pairs(self) -> list[tuple[RatVector, RatVector]]:
        return [(f.alpha, f.beta) for f in self.factors]


def parse_document(model: type[ModelT], text: str, source: str = "<string>") -> ModelT:
    """Validate JSON text against ``model``.

    Raises:
        GameFileError: On malformed JSON or schema violations.
        DimensionMismatch: When the document parses but shapes disagree
            (raised by the model validators, never wrapped).
    """
    try:
        return model.model_validate_json(text)
    except ValidationError as exc:
        raise GameFileError(f"{source}: {exc.error_count()} schema error(s)\n{exc}") from exc


def read_document(model: type[ModelT], path: Path | str) -> ModelT:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GameFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_document(model, text, str(path))


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def game_to_json(g: GameData) -> str:
    data = g.model_dump(mode="json")
    return dumps({key: data[key] for key in GAME_KEYS})


def certificate_payload(cert: EquilibriumCertificate) -> dict[str, Any]:
    data = cert.model_dump(mode="json")
    return {key: data[key] for key in CERTIFICATE_KEYS}


def certificate_to_json(cert: EquilibriumCertificate) -> str:
    return dumps(certificate_payload(cert))


def profile_to_json(profile: StrategyProfile) -> str:
    data = profile.model_dump(mode="json")
    return dumps({"x": data["x"], "y": data["y"]})


def read_game(path: Path | str) -> GameFile:
    return read_document(GameFile, path)


def read_profile(path: Path | str) -> ProfileFile:
    return read_document(ProfileFile, path)


def read_factors(path: Path | str) -> FactorsFile:
    return read_document(FactorsFile, path)


def write_game(g: GameData, path: Path | str) -> None:
    Path(path).write_text(game_to_json(g))
