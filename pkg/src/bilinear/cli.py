"""The ``bilinear`` command line tool.

Usage:
    bilinear solve game.json --algo auto [--eps 1/10] [--jobs 4] [--factors factors.json]
    bilinear convert --kind polymatrix spec.json game.json
    bilinear verify game.json profile.json
    bilinear rank game.json
    bilinear enumerate game.json
    bilinear gen --kind rank1 --rows 4 --cols 4 --seed 7

stdout carries JSON only; logs and errors go to stderr through rich.
Exit codes: 0 success, 1 unreadable input, 2 invalid game, 3 no applicable
algorithm.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler

from bilinear import __version__
from bilinear.core.rational import parse_rational
from bilinear.errors import BilinearError, GameFileError, GameValidationError, InfeasibleStrategy
from bilinear.models.config import get_config, load_config, set_config
from bilinear.models.files import (
    certificate_payload,
    certificate_to_json,
    dumps,
    game_to_json,
    read_document,
    read_factors,
    read_game,
    read_profile,
)
from bilinear.models.game import BilinearGame, StrategyProfile
from bilinear.models.specs import (
    BayesianSpec,
    BimatrixSpec,
    ExtensiveFormTree,
    InequalityFormSpec,
    PolymatrixSpec,
    RankingDuelSpec,
)
from bilinear.services import converters
from bilinear.services.game import game_rank, validate, verify
from bilinear.services.generators import GAME_KINDS, generate
from bilinear.solvers.dispatch import ALGORITHMS, solve
from bilinear.solvers.lowrank import enumerate_extreme_equilibria

logger = logging.getLogger("bilinear")

EXIT_OK = 0
EXIT_FILE = 1
EXIT_INVALID = 2
EXIT_NO_ALGORITHM = 3

stderr = Console(stderr=True)

CONVERTERS: dict[str, tuple[type[BaseModel], Callable[..., BilinearGame]]] = {
    "bimatrix": (BimatrixSpec, lambda spec: converters.from_bimatrix(spec.A, spec.B)),
    "bayesian": (BayesianSpec, converters.from_bayesian),
    "polymatrix": (PolymatrixSpec, converters.from_polymatrix),
    "ranking-duel": (RankingDuelSpec, converters.from_ranking_duel),
    "extensive": (ExtensiveFormTree, converters.from_extensive_form),
    "inequality": (InequalityFormSpec, converters.from_inequality_form),
}


def setup_logging(verbose: int, quiet: bool) -> None:
    """Route package logs to a rich handler on stderr."""
    config = get_config()
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, config.logging.level)
    handler = RichHandler(console=stderr, show_path=False, rich_tracebacks=config.logging.rich_tracebacks)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_game(path: str) -> BilinearGame:
    return validate(read_game(path))


def _emit(text: str, out: str | None = None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        logger.info(f"wrote {out}")


# ============================================================================
# COMMANDS
# ============================================================================


def cmd_solve(args: argparse.Namespace) -> int:
    g = _load_game(args.game)
    pairs = read_factors(args.factors).pairs() if args.factors else None
    cert = solve(g, args.algo, eps=args.eps, jobs=args.jobs, pairs=pairs)
    _emit(certificate_to_json(cert))
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    spec_model, convert = CONVERTERS[args.kind]
    spec = read_document(spec_model, args.input)
    _emit(game_to_json(convert(spec)), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = _load_game(args.game)
    profile = read_profile(args.profile)
    cert = verify(g, StrategyProfile(x=profile.x, y=profile.y))
    _emit(certificate_to_json(cert))
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    _emit(dumps(game_rank(_load_game(args.game))))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    g = _load_game(args.game)
    certs = enumerate_extreme_equilibria(g, jobs=args.jobs)
    _emit(dumps([certificate_payload(c) for c in certs]))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    g = generate(args.kind, args.rows, args.cols, rank=args.rank, seed=args.seed, low=args.low, high=args.high)
    _emit(game_to_json(g), args.out)
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilinear", description="Nash equilibria of bilinear games")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, default=None, help="Alternative config.yaml")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="Errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Compute an equilibrium certificate")
    p.add_argument("game")
    p.add_argument("--algo", choices=ALGORITHMS, default="auto")
    p.add_argument("--eps", type=_rational, default=None, help="Approximation parameter, e.g. 1/10")
    p.add_argument("--jobs", type=int, default=None, help="Worker processes for grid search")
    p.add_argument("--factors", default=None, help="Rank factors of A + B for the approximation schemes")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("convert", help="Convert a game-class spec into a game file")
    p.add_argument("--kind", choices=sorted(CONVERTERS), required=True)
    p.add_argument("input")
    p.add_argument("output", nargs="?", default="-")
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("verify", help="Exact error measures of a profile")
    p.add_argument("game")
    p.add_argument("profile")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("rank", help="rank(A + B)")
    p.add_argument("game")
    p.set_defaults(handler=cmd_rank)

    p = sub.add_parser("enumerate", help="All extreme equilibria")
    p.add_argument("game")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("gen", help="Write a random game file")
    p.add_argument("--kind", choices=GAME_KINDS, required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, default=None, help="Defaults to --rows")
    p.add_argument("--rank", type=int, default=2, help="Rank of A + B for positive-rank")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--low", type=int, default=-5)
    p.add_argument("--high", type=int, default=5)
    p.add_argument("--out", default=None, help="Output path (stdout if omitted)")
    p.set_defaults(handler=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve" and args.algo in ("fptas-abs", "fptas-rel") and args.eps is None:
        parser.error(f"--algo {args.algo} needs --eps")
    if args.command == "gen" and args.cols is None:
        args.cols = args.rows

    try:
        if args.config is not None:
            set_config(load_config(args.config))
        setup_logging(args.verbose, args.quiet)
        return args.handler(args)
    except GameFileError as exc:
        stderr.print(f"[red]input error:[/red] {exc}")
        return EXIT_FILE
    except (GameValidationError, InfeasibleStrategy) as exc:
        stderr.print(f"[red]invalid game:[/red] {exc}")
        return EXIT_INVALID
    except BilinearError as exc:
        stderr.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        return EXIT_NO_ALGORITHM
    except FileNotFoundError as exc:
        stderr.print(f"[red]input error:[/red] {exc}")
        return EXIT_FILE


if __name__ == "__main__":
    sys.exit(main())
