"""Tests for the bilinear command line tool."""

import json
import sys
from pathlib import Path

# Add src to path for tests
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest

import bilinear.models.config as config_module
from bilinear.cli import EXIT_FILE, EXIT_INVALID, EXIT_NO_ALGORITHM, EXIT_OK, main
from bilinear.models.config import set_config
from bilinear.models.files import read_game, write_game
from bilinear.services.converters import from_bimatrix


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """--config replaces the process-wide config; undo it after each test."""
    monkeypatch.setattr(config_module, "_config", None)
    yield
    set_config(None)


@pytest.fixture
def pennies_file(tmp_path):
    path = tmp_path / "pennies.json"
    write_game(from_bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]]), path)
    return path


@pytest.fixture
def battle_file(tmp_path):
    path = tmp_path / "battle.json"
    write_game(from_bimatrix([[2, 0], [0, 1]], [[1, 0], [0, 2]]), path)
    return path


def run(capsys, *argv) -> tuple[int, str]:
    code = main(["-q", *map(str, argv)])
    return code, capsys.readouterr().out


@pytest.mark.integration
class TestSolve:
    def test_auto_zero_sum(self, capsys, pennies_file):
        code, out = run(capsys, "solve", pennies_file)
        assert code == EXIT_OK
        cert = json.loads(out)
        assert cert["algorithm"] == "zero-sum"
        assert cert["abs_eps"] == 0
        assert cert["x"] == ["1/2", "1/2"]
        assert list(cert) == ["algorithm", "iterations", "x", "y", "p", "q", "abs_eps", "rel_eps", "qp_residual", "flags"]

    def test_output_is_deterministic(self, capsys, battle_file):
        first = run(capsys, "solve", battle_file)
        second = run(capsys, "solve", battle_file)
        assert first == second

    def test_eps_required(self, battle_file):
        with pytest.raises(SystemExit) as exc:
            main(["solve", str(battle_file), "--algo", "fptas-abs"])
        assert exc.value.code == 2

    def test_factors_file(self, capsys, tmp_path):
        game = tmp_path / "positive.json"
        write_game(from_bimatrix([[1, 0], [0, 1]], [[2, 7], [3, 4]]), game)
        factors = tmp_path / "factors.json"
        factors.write_text(json.dumps({"factors": [{"alpha": [1, 2], "beta": [1, 1]}, {"alpha": [2, 1], "beta": [1, 3]}]}))
        code, out = run(capsys, "solve", game, "--algo", "fptas-rel", "--eps", "1/2", "--factors", factors, "--jobs", 1)
        assert code == EXIT_OK
        assert json.loads(out)["algorithm"] == "fptas-rel"

    def test_no_applicable_algorithm(self, capsys, tmp_path, battle_file):
        config = tmp_path / "config.yaml"
        config.write_text("solver:\n  lowrank_threshold: 0\n  oracle_auto_limit: 4\n")
        code, out = run(capsys, "--config", config, "solve", battle_file)
        assert code == EXIT_NO_ALGORITHM
        assert out == ""


@pytest.mark.integration
class TestInputErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _ = run(capsys, "solve", tmp_path / "absent.json")
        assert code == EXIT_FILE

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run(capsys, "rank", path)[0] == EXIT_FILE

    def test_float_entries_rejected(self, capsys, tmp_path):
        path = tmp_path / "float.json"
        path.write_text(json.dumps({"A": [[0.5]], "B": [[1]], "E": [[1]], "F": [[1]], "e": [1], "f": [1]}))
        assert run(capsys, "rank", path)[0] == EXIT_FILE

    def test_shape_mismatch(self, capsys, tmp_path):
        path = tmp_path / "shape.json"
        path.write_text(json.dumps({"A": [[1, 2]], "B": [[1]], "E": [[1]], "F": [[1, 1]], "e": [1], "f": [1]}))
        assert run(capsys, "rank", path)[0] == EXIT_INVALID

    def test_unbounded_strategy_set(self, capsys, tmp_path):
        path = tmp_path / "open.json"
        path.write_text(json.dumps({"A": [[1, 2]], "B": [[0, 0]], "E": [[1]], "F": [[1, -1]], "e": [1], "f": [0]}))
        assert run(capsys, "solve", path)[0] == EXIT_INVALID


@pytest.mark.integration
class TestOtherCommands:
    def test_rank(self, capsys, pennies_file, battle_file):
        assert run(capsys, "rank", pennies_file) == (EXIT_OK, "0\n")
        assert run(capsys, "rank", battle_file) == (EXIT_OK, "2\n")

    def test_verify(self, capsys, tmp_path, pennies_file):
        profile = tmp_path / "profile.json"
        profile.write_text(json.dumps({"x": ["1/2", "1/2"], "y": ["1/2", "1/2"]}))
        code, out = run(capsys, "verify", pennies_file, profile)
        assert code == EXIT_OK
        assert json.loads(out)["abs_eps"] == 0

    def test_verify_infeasible_profile(self, capsys, tmp_path, pennies_file):
        profile = tmp_path / "profile.json"
        profile.write_text(json.dumps({"x": [1, 1], "y": [1, 0]}))
        assert run(capsys, "verify", pennies_file, profile)[0] == EXIT_INVALID

    def test_enumerate(self, capsys, battle_file):
        code, out = run(capsys, "enumerate", battle_file, "--jobs", 1)
        assert code == EXIT_OK
        assert len(json.loads(out)) == 3

    def test_enumerate_trivial_game(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        write_game(from_bimatrix([[4]], [[2]]), path)
        code, out = run(capsys, "enumerate", path)
        assert [c["x"] for c in json.loads(out)] == [[1]]

    def test_gen_is_deterministic(self, capsys, tmp_path):
        first = run(capsys, "gen", "--kind", "rank1", "--rows", 3, "--seed", 7)
        second = run(capsys, "gen", "--kind", "rank1", "--rows", 3, "--seed", 7)
        assert first == second
        out = tmp_path / "game.json"
        assert run(capsys, "gen", "--kind", "rank1", "--rows", 3, "--seed", 7, "--out", out)[0] == EXIT_OK
        assert out.read_text() == first[1]
        assert read_game(out).shape == (3, 3)

    def test_game_file_round_trip(self, capsys, tmp_path):
        out = tmp_path / "game.json"
        run(capsys, "gen", "--kind", "positive-rank", "--rows", 3, "--cols", 4, "--seed", 2, "--out", out)
        again = tmp_path / "again.json"
        write_game(read_game(out), again)
        assert again.read_bytes() == out.read_bytes()


@pytest.mark.integration
class TestConvert:
    def test_bimatrix(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"A": [["1/2", 0], [0, 1]], "B": [[0, 1], [1, 0]]}))
        code, out = run(capsys, "convert", "--kind", "bimatrix", spec)
        assert code == EXIT_OK
        game = json.loads(out)
        assert game["E"] == [[1, 1]]
        assert game["A"] == [[1, 0], [0, 2]]

    def test_written_file_is_stable(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"m": 2, "A": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}))
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "convert", "--kind", "ranking-duel", spec, first)
        run(capsys, "convert", "--kind", "ranking-duel", spec, second)
        assert first.read_bytes() == second.read_bytes()
        rewritten = tmp_path / "c.json"
        write_game(read_game(first), rewritten)
        assert rewritten.read_bytes() == first.read_bytes()

    def test_malformed_tree(self, capsys, tmp_path):
        spec = tmp_path / "tree.json"
        spec.write_text(json.dumps({"nodes": [{"kind": "leaf"}]}))
        assert run(capsys, "convert", "--kind", "extensive", spec)[0] == EXIT_INVALID
