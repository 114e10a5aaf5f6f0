"""
Tests for the command-line interface.
"""
import io

import numpy as np
import pandas as pd
import pytest

from app.harness.cli import cli, read_symbols, write_symbols
from app.harness.instances import gen_source
from app.harness.rng import rng_from_seed
from app.models import BinarySeq


def _pairs(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines() if "=" in line)


def _write_source(path, p=0.8, M=60, seed=1):
    y = gen_source(p, M, rng_from_seed(seed))
    write_symbols(str(path), y, "bits")
    return y


def test_rdcurve_csv(capsys):
    assert cli(["rdcurve", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "D,R"
    assert len(lines) == 513
    frame = pd.read_csv(io.StringIO(out))
    assert frame["D"].iloc[0] == 0.0
    assert frame["R"].iloc[0] == pytest.approx(1.0)


def test_compress_then_decompress_reports_same_distortion(tmp_path, capsys):
    source = tmp_path / "y.txt"
    _write_source(source)
    container = tmp_path / "y.plc"
    assert cli(["compress", "--input", str(source), "--output", str(container),
                "--rate", "0.5", "--iters", "10", "--seed", "3"]) == 0
    compressed = _pairs(capsys.readouterr().out)
    assert compressed["M"] == "60" and compressed["N"] == "30"

    restored = tmp_path / "y_hat.txt"
    assert cli(["decompress", "--input", str(container), "--output", str(restored),
                "--original", str(source)]) == 0
    decompressed = _pairs(capsys.readouterr().out)
    assert decompressed["distortion_bits"] == compressed["distortion_bits"]
    assert read_symbols(str(restored), "bits").length == 60


def test_compress_is_reproducible(tmp_path, capsys):
    source = tmp_path / "y.txt"
    _write_source(source, p=0.5, M=40)
    for name in ("a.plc", "b.plc"):
        assert cli(["compress", "--input", str(source), "--output", str(tmp_path / name),
                    "--rate", "0.3", "--iters", "5", "--seed", "11"]) == 0
    capsys.readouterr()
    assert (tmp_path / "a.plc").read_bytes() == (tmp_path / "b.plc").read_bytes()


def test_bytes_format_round_trip(tmp_path):
    path = tmp_path / "y.bin"
    seq = BinarySeq([1, -1, -1, 1, 1, 1, -1, 1])
    write_symbols(str(path), seq, "bytes")
    assert path.read_bytes() == bytes([0b10011101])
    assert read_symbols(str(path), "bytes") == seq


def test_bits_file_rejects_other_characters(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0102\n")
    assert cli(["compress", "--input", str(path), "--output", str(tmp_path / "o.plc"), "--rate", "0.5"]) == 1


def test_usage_errors_exit_2(capsys):
    assert cli([]) == 2
    assert cli(["compress"]) == 2
    assert cli(["rdcurve", "--p", "1.5"]) == 2
    assert cli(["rdcurve", "--p", "abc"]) == 2
    assert cli(["compress", "--input", "x", "--output", "y", "--rate", "0"]) == 2
    assert cli(["experiment", "--p", "0.5", "--rates", "0.5", "--gamma", "1.0"]) == 2
    assert "usage" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert cli(["--help"]) == 0


@pytest.mark.parametrize("command", ["compress", "experiment", "sweep"])
def test_help_marks_default_parameters_as_heuristic(command, capsys):
    assert cli([command, "--help"]) == 0
    text = " ".join(capsys.readouterr().out.split())
    for flag in ("--k", "--beta", "--gamma"):
        assert flag in text
    assert text.count("heuristic") == 3
    assert text.count("heuristic placeholder") == 2


def test_runtime_errors_exit_1(tmp_path, capsys):
    assert cli(["decompress", "--input", str(tmp_path / "missing.plc")]) == 1
    corrupt = tmp_path / "corrupt.plc"
    corrupt.write_bytes(b"XXXX")
    assert cli(["decompress", "--input", str(corrupt)]) == 1


def test_experiment_from_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "study.cfg"
    config.write_text(
        "# small study\n"
        "p = 0.5\n"
        "rates = 0.4, 0.6\n"
        "N = 16\n"
        "trials = 2\n"
        "master-seed = 5\n"
        "iters = 5\n"
    )
    assert cli(["experiment", "--config", str(config), "--trials", "3"]) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert frame["R"].tolist() == [0.4, 0.6]
    assert frame["trials"].tolist() == [3, 3]


def test_experiment_without_required_values_is_runtime_error(capsys):
    assert cli(["experiment", "--rates", "0.5"]) == 1


def test_sweep_prints_aggregate_and_best(tmp_path, capsys):
    assert cli(["sweep", "--p", "0.5", "--rates", "0.5", "--N", "12", "--trials", "2", "--iters", "5",
                "--axis", "gamma", "--grid", "0.2,0.6"]) == 0
    out = capsys.readouterr().out
    aggregate, best = out.strip().split("\n\n")
    assert aggregate.splitlines()[0].startswith("sweep_gamma,p,R")
    assert best.splitlines()[0] == "p,R,axis,best_value,mean_D"


def test_exponent_csv(capsys):
    assert cli(["exponent", "--p", "0.5", "--rate", "0.5", "--distortion", "0.3",
                "--m-list", "8,12", "--trials", "20", "--seed", "4"]) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert frame["M"].tolist() == [8, 12]
    assert set(frame["regime"]) == {"failure"}
    assert np.all((frame["p_hat"] >= 0) & (frame["p_hat"] <= 1))
