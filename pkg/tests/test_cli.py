"""Command-line client: output formats and exit codes."""
import json

import pytest
from click.testing import CliRunner

from robusthedge.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _write_fixture(runner, name, path, param=None):
    args = ["fixture", "--name", name, "--output", path]
    if param is not None:
        args += ["--param", str(param)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return path


def test_fixture_then_price(runner, tmp_path):
    market = _write_fixture(runner, "FIX-B", str(tmp_path / "m.json"), param=2)
    result = runner.invoke(main, ["price", "--input", market])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["price"] == "2/5"


def test_validate(runner, tmp_path):
    market = _write_fixture(runner, "FIX-A", str(tmp_path / "m.json"))
    result = runner.invoke(main, ["validate", "--input", market])
    assert result.exit_code == 0
    assert json.loads(result.output)["valid"] is True


def test_table_format(runner, tmp_path):
    market = _write_fixture(runner, "FIX-A", str(tmp_path / "m.json"))
    result = runner.invoke(main, ["price", "--input", market,
                                  "--format", "table"])
    assert result.exit_code == 0
    assert "price" in result.output and "1/2" in result.output


def test_na_exit_codes(runner, tmp_path):
    good = _write_fixture(runner, "FIX-A", str(tmp_path / "good.json"))
    bad = _write_fixture(runner, "FIX-C", str(tmp_path / "bad.json"))
    assert runner.invoke(main, ["na", "--input", good]).exit_code == 0
    result = runner.invoke(main, ["na", "--input", bad])
    assert result.exit_code == 3
    assert json.loads(result.output)["certificate"] == ["1"]


def test_price_arbitrage_exit_code(runner, tmp_path):
    bad = _write_fixture(runner, "FIX-C", str(tmp_path / "bad.json"))
    assert runner.invoke(main, ["price", "--input", bad]).exit_code == 3


def test_dual(runner, tmp_path):
    market = _write_fixture(runner, "FIX-B", str(tmp_path / "m.json"), param=2)
    result = runner.invoke(main, ["dual", "--input", market, "--n", "10"])
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert body["value"] == "2/5" and body["gaps"] == {"10": "1/275"}


def test_supports(runner, tmp_path):
    market = _write_fixture(runner, "FIX-B", str(tmp_path / "m.json"), param=2)
    result = runner.invoke(main, ["supports", "--input", market])
    assert result.exit_code == 0
    assert json.loads(result.output)["supports"][""] == [["-1"], ["3/2"], ["2"]]


def test_construct(runner, tmp_path):
    market = _write_fixture(runner, "FIX-B", str(tmp_path / "m.json"), param=2)
    result = runner.invoke(main, ["construct", "--input", market,
                                  "--what", "ptilde"])
    assert result.exit_code == 0
    assert json.loads(result.output)["prior"]["root_mixture"] == ["5/7", "2/7"]
    result = runner.invoke(main, ["construct", "--input", market,
                                  "--what", "family", "--lam", "2"])
    assert result.exit_code == 2


def test_verify_chain_exit_codes(runner, tmp_path):
    good = _write_fixture(runner, "FIX-A", str(tmp_path / "good.json"))
    bad = _write_fixture(runner, "FIX-C", str(tmp_path / "bad.json"))
    result = runner.invoke(main, ["verify-chain", "--input", good,
                                  "--format", "table"])
    assert result.exit_code == 0 and "overall: PASS" in result.output
    assert runner.invoke(main,
                         ["verify-chain", "--input", bad]).exit_code == 3


def test_verify_random(runner):
    result = runner.invoke(main, ["verify-random", "--count", "2",
                                  "--seed", "5"])
    assert result.exit_code == 0
    assert json.loads(result.output)["passed"] == 2


def test_usage_errors(runner, tmp_path):
    assert runner.invoke(main, ["price"]).exit_code == 2  # missing --input
    missing = str(tmp_path / "missing.json")
    result = runner.invoke(main, ["price", "--input", missing])
    assert result.exit_code != 0
    assert runner.invoke(main, ["fixture", "--name", "FIX-E"]).exit_code == 2


def test_output_to_file(runner, tmp_path):
    market = _write_fixture(runner, "FIX-A", str(tmp_path / "m.json"))
    out = tmp_path / "price.json"
    result = runner.invoke(main, ["price", "--input", market,
                                  "--output", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text())["price"] == "1/2"
