import json

import pandas as pd
import pytest

from src import __version__
from src.cli.main import build_parser, run
from src.core.exceptions import UsageError
from src.nn.checkpoint import MAGIC

TINY_TRAIN = ["--epochs", "2", "--workers", "1", "--set", "train.actions_per_epoch=3"]


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


@pytest.fixture
def trained(tmp_path):
    """Checkpoint of a two-epoch E1-A run."""
    path = tmp_path / "trained"
    assert run(["train", "--preset", "E1-A", "--out", str(path), *TINY_TRAIN]) == 0
    return path / "checkpoint.ckpt"


def error_line(capsys) -> str:
    lines = capsys.readouterr().err.strip().splitlines()
    return lines[-1]


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["compare", "--seeds", "3", "--set", "doca.speed=10"])
        assert args.command == "compare"
        assert args.seeds == 3
        assert args.assignments == ["doca.speed=10"]
        assert parser.parse_args(["train", "--async"]).sync is False
        assert parser.parse_args(["train"]).sync is None

    def test_errors_raise_usage_error(self):
        with pytest.raises(UsageError):
            build_parser().parse_args(["train", "--sync", "--async"])
        with pytest.raises(UsageError):
            build_parser().parse_args(["deploy"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestExitCodes:
    def test_missing_command(self, capsys):
        assert run([]) == 2
        assert error_line(capsys).startswith("error=UsageError code=2 detail=")

    def test_unknown_override_key(self, capsys, out):
        assert run(["eval", "--out", str(out), "--set", "channel.gain=3"]) == 2
        line = error_line(capsys)
        assert line.startswith("error=InvalidOverrideError code=2")
        assert "channel.gain" in line

    def test_invalid_value(self, capsys, out):
        assert run(["eval", "--out", str(out), "--set", "doca.speed=-3"]) == 2
        assert "error=ConfigError" in error_line(capsys)

    def test_unknown_scheduler(self, out):
        assert run(["eval", "--out", str(out), "--scheduler", "greedy"]) == 2

    def test_rl_needs_checkpoint(self, capsys, out):
        assert run(["eval", "--out", str(out), "--scheduler", "rl"]) == 2
        assert "--checkpoint" in error_line(capsys)
        assert run(["compare", "--out", str(out), "--scheduler", "random,rl"]) == 2

    def test_checkpoint_with_heuristic(self, tmp_path, out):
        assert run(["eval", "--out", str(out), "--checkpoint", str(tmp_path / "x.ckpt")]) == 2

    def test_eval_takes_one_scheduler(self, out):
        assert run(["eval", "--out", str(out), "--scheduler", "random,mode4"]) == 2

    def test_compare_needs_two(self, out):
        assert run(["compare", "--out", str(out), "--scheduler", "mode4"]) == 2

    def test_non_positive_counts(self, out):
        assert run(["eval", "--out", str(out), "--actions", "0"]) == 2
        assert run(["compare", "--out", str(out), "--seeds", "0"]) == 2

    def test_unreadable_checkpoint(self, tmp_path, capsys, out):
        bogus = tmp_path / "bogus.ckpt"
        bogus.write_bytes(b"not a checkpoint")
        assert run(["inspect-checkpoint", "--checkpoint", str(bogus)]) == 3
        assert error_line(capsys).startswith("error=CheckpointError code=3")
        missing = tmp_path / "missing.ckpt"
        argv = ["eval", "--out", str(out), "--scheduler", "rl", "--checkpoint", str(missing)]
        assert run(argv) == 3

    def test_inspect_needs_checkpoint(self):
        assert run(["inspect-checkpoint"]) == 2

    def test_error_detail_is_quoted_on_one_line(self, capsys):
        assert run(["eval", "--preset", 'bad"name']) == 2
        line = error_line(capsys)
        assert line.count('"') == 2
        assert line.endswith('"')


class TestEval:
    def test_writes_summary_and_transmissions(self, out):
        argv = ["eval", "--out", str(out), "--scheduler", "round-robin", "--actions", "10"]
        assert run(argv) == 0
        summary = pd.read_csv(out / "summary.csv")
        assert list(summary["scheduler"]) == ["round_robin"]
        assert summary.loc[0, "mean"] == pytest.approx(1.0)
        transmissions = pd.read_csv(out / "transmissions.csv")
        assert list(transmissions.columns) == ["time_ms", "tx_id", "tb", "prr"]
        assert len(transmissions) == summary.loc[0, "count"]

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "eval"
        assert manifest["scenario"]["name"] == "E1-A"
        assert manifest["extra"]["scheduler"] == "round_robin"

    def test_same_seed_same_output(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        for path in (first, second):
            assert run(["eval", "--out", str(path), "--seed", "11", "--actions", "10"]) == 0
        csv = "transmissions.csv"
        assert (first / csv).read_text() == (second / csv).read_text()


class TestCompare:
    def test_one_row_per_scheduler(self, out):
        argv = ["compare", "--out", str(out), "--actions", "10", "--seeds", "2"]
        assert run(argv) == 0
        table = pd.read_csv(out / "compare.csv")
        assert list(table["scheduler"]) == ["random", "round_robin", "mode4"]
        assert list(table.columns) == [
            "scheduler", "mean", "median", "p1", "p25", "p75", "p99", "count"
        ]
        assert (table["p1"] <= table["p99"]).all()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["extra"]["seeds"] == 2


class TestTrain:
    def test_writes_artifacts(self, out):
        assert run(["train", "--out", str(out), *TINY_TRAIN]) == 0
        assert (out / "checkpoint.ckpt").read_bytes().startswith(MAGIC)
        curve = pd.read_csv(out / "learning_curve.csv")
        assert list(curve["epoch"]) == [0, 1]
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["workers"] == 1
        assert manifest["scenario"]["train"]["actions_per_epoch"] == 3
        assert manifest["extra"]["epochs"] == 2

    def test_inspect_and_evaluate_trained(self, trained, capsys, out):
        assert run(["inspect-checkpoint", "--checkpoint", str(trained)]) == 0
        descriptor = json.loads(capsys.readouterr().out)
        assert descriptor["metadata"]["scenario"] == "E1-A"
        assert descriptor["metadata"]["epochs"] == 2
        assert descriptor["networks"]["actor"]["role"] == "actor"

        argv = ["eval", "--out", str(out), "--scheduler", "rl", "--checkpoint", str(trained)]
        assert run([*argv, "--actions", "10"]) == 0
        assert pd.read_csv(out / "summary.csv").loc[0, "scheduler"] == "rl"

    def test_continue_training(self, trained, tmp_path):
        more = tmp_path / "more"
        argv = ["train", "--out", str(more), "--checkpoint", str(trained), *TINY_TRAIN]
        assert run(argv) == 0
        manifest = json.loads((more / "manifest.json").read_text())
        assert manifest["extra"]["initial"] == str(trained)

    def test_architecture_mismatch(self, trained, capsys, out):
        argv = ["eval", "--preset", "E1-B", "--out", str(out), "--scheduler", "rl"]
        assert run([*argv, "--checkpoint", str(trained)]) == 3
        assert error_line(capsys).startswith("error=CheckpointMismatchError code=3")
