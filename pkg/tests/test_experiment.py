"""
Tests for the experiment runner, sweeps and CSV emission.
"""
import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from app.encoding.bp_encoder import encode_bp
from app.exceptions import InvalidParameterError
from app.harness.experiment import (
    AGGREGATE_COLUMNS,
    DETAIL_COLUMNS,
    ExperimentConfig,
    TrialJob,
    build_jobs,
    read_table,
    run_experiment,
    run_trial,
    schema_line,
    sweep,
)
from app.harness.instances import gen_instance
from app.harness.rng import rng_from_seed
from app.models import CodecParams
from app.reference.rate_distortion import default_threshold, rdf_inverse


def _cfg(**overrides):
    values = dict(p=0.5, rates=[0.5], N=20, trials=3, max_iters=10, master_seed=42)
    values.update(overrides)
    return ExperimentConfig(**values)


def test_single_trial_single_rate_gives_one_row_each():
    result = run_experiment(_cfg(trials=1))
    assert len(result.detail) == 1
    assert len(result.aggregate) == 1
    assert list(result.detail.columns) == DETAIL_COLUMNS
    assert list(result.aggregate.columns) == AGGREGATE_COLUMNS


def test_aggregate_mean_is_mean_of_detail_rows():
    result = run_experiment(_cfg(rates=[0.4, 0.6], trials=4))
    for _, agg in result.aggregate.iterrows():
        rows = result.detail[result.detail["R"] == agg["R"]]
        assert agg["mean_D"] == pytest.approx(rows["distortion_per_bit"].mean(), rel=1e-12)
        assert agg["stderr_D"] == pytest.approx(rows["distortion_per_bit"].std(ddof=1) / 2.0, rel=1e-12)
        assert agg["trials"] == 4
        assert agg["failed"] == 0


def test_aggregate_carries_reference_and_parameters():
    result = run_experiment(_cfg())
    agg = result.aggregate.iloc[0]
    assert agg["rdf_D"] == pytest.approx(rdf_inverse(0.5, 0.5))
    assert agg["k"] == pytest.approx(default_threshold(0.5))
    assert agg["beta"] == 5.0 and agg["gamma"] == 0.4


def test_data_length_rounds_half_up():
    cfg = _cfg(N=3, rates=[0.4])
    assert cfg.m_for_rate(0.4) == 8
    assert _cfg(N=10, rates=[0.3]).m_for_rate(0.3) == 33


def test_small_rate_n_applies_at_or_below_cutoff():
    cfg = _cfg(N=100, small_rate_n=50, rates=[0.1, 0.2, 0.3])
    assert [cfg.n_for_rate(r) for r in cfg.rates] == [50, 50, 100]
    assert cfg.m_for_rate(0.2) == 250


def test_child_seeds_are_distinct_and_recorded():
    jobs = build_jobs(_cfg(rates=[0.3, 0.5], trials=10))
    seeds = [job.seed for job in jobs]
    assert len(set(seeds)) == len(seeds)
    master = rng_from_seed(42)
    assert seeds[:3] == [master.next_u64() for _ in range(3)]
    assert [(job.R, job.trial) for job in jobs[:2]] == [(0.3, 0), (0.3, 1)]


def test_trial_regenerates_from_its_seed():
    """A detail row can be reproduced from (p, M, N, seed) alone."""
    cfg = _cfg(trials=2)
    result = run_experiment(cfg)
    row = result.detail.iloc[1]
    rng = rng_from_seed(int(row["seed"]))
    y, cb = gen_instance(0.5, int(row["M"]), int(row["N"]), rng)
    encoding = encode_bp(y, cb, cfg.codec_params(), rng)
    assert encoding.distortion == row["distortion_bits"]


def test_failed_trial_is_recorded_not_raised():
    job = TrialJob(p=0.5, R=0.5, N=0, M=4, trial=0, seed=1, params=CodecParams(k=0.5))
    row = run_trial(job)
    assert row["error"].startswith("InvalidParameterError")
    assert np.isnan(row["distortion_per_bit"])


def test_csv_files_have_schema_line_and_are_reproducible(tmp_path):
    stem = tmp_path / "run"
    run_experiment(_cfg(output=str(stem)))
    first_detail = (tmp_path / "run_detail.csv").read_bytes()
    first_agg = (tmp_path / "run_aggregate.csv").read_bytes()
    assert first_detail.startswith(b"# schema: detail/v1; extra: error\n")
    assert first_agg.startswith(b"# schema: aggregate/v1; extra: failed\n")
    assert first_detail.splitlines()[1].decode() == ",".join(DETAIL_COLUMNS)

    run_experiment(_cfg(output=str(stem)))
    assert (tmp_path / "run_detail.csv").read_bytes() == first_detail
    assert (tmp_path / "run_aggregate.csv").read_bytes() == first_agg

    table = read_table(tmp_path / "run_detail.csv")
    assert len(table) == 3
    assert (table["error"] == "").all()


def test_output_independent_of_worker_count(tmp_path):
    run_experiment(_cfg(rates=[0.4, 0.5], output=str(tmp_path / "serial")))
    run_experiment(_cfg(rates=[0.4, 0.5], output=str(tmp_path / "pooled"), workers=2))
    for suffix in ("_detail.csv", "_aggregate.csv"):
        assert (tmp_path / f"serial{suffix}").read_bytes() == (tmp_path / f"pooled{suffix}").read_bytes()


@pytest.mark.parametrize("bad", [
    {"rates": []},
    {"rates": [0.0]},
    {"rates": [1.5]},
    {"trials": 0},
    {"p": 1.0},
    {"gamma": 1.0},
    {"unknown_key": 3},
])
def test_config_validation(bad):
    with pytest.raises(ValidationError):
        _cfg(**bad)


def test_single_point_sweep_equals_experiment_plus_key():
    cfg = _cfg()
    plain = run_experiment(cfg)
    swept = sweep(cfg, "gamma", [0.4])
    assert list(swept.aggregate.columns) == ["sweep_gamma"] + AGGREGATE_COLUMNS
    pd.testing.assert_frame_equal(swept.aggregate.drop(columns="sweep_gamma"), plain.aggregate)
    pd.testing.assert_frame_equal(swept.detail.drop(columns="sweep_gamma"), plain.detail)


def test_sweep_best_table_and_reproducibility():
    cfg = _cfg(rates=[0.3, 0.5], trials=2)
    first = sweep(cfg, "beta", [1.0, 5.0])
    second = sweep(cfg, "beta", [1.0, 5.0])
    pd.testing.assert_frame_equal(first.aggregate, second.aggregate)
    assert list(first.best.columns) == ["p", "R", "axis", "best_value", "mean_D"]
    assert len(first.best) == 2
    for _, best in first.best.iterrows():
        rows = first.aggregate[first.aggregate["R"] == best["R"]]
        assert best["mean_D"] == rows["mean_D"].min()
        assert best["best_value"] in (1.0, 5.0)


def test_sweep_uses_common_seeds_across_grid():
    swept = sweep(_cfg(), "k", [0.5, 0.9])
    a = swept.detail[swept.detail["sweep_k"] == 0.5]["seed"].to_list()
    b = swept.detail[swept.detail["sweep_k"] == 0.9]["seed"].to_list()
    assert a == b


def test_sweep_writes_tables(tmp_path):
    sweep(_cfg(output=str(tmp_path / "s")), "gamma", [0.2])
    first_lines = {
        name: (tmp_path / f"s_{name}.csv").read_text().splitlines()[0]
        for name in ("sweep_aggregate", "sweep_detail", "sweep_best")
    }
    assert first_lines == {
        "sweep_aggregate": "# schema: sweep_aggregate/v1; extra: sweep_gamma,failed",
        "sweep_detail": "# schema: sweep_detail/v1; extra: sweep_gamma,error",
        "sweep_best": "# schema: sweep_best/v1",
    }


def test_schema_line_names_columns_outside_the_base_set():
    base = pd.DataFrame(columns=DETAIL_COLUMNS[:-1])
    assert schema_line(base, "detail") == "# schema: detail/v1"
    assert schema_line(pd.DataFrame(columns=DETAIL_COLUMNS), "detail") == "# schema: detail/v1; extra: error"
    assert schema_line(pd.DataFrame(columns=["check", "passed"]), "checks") == "# schema: checks/v1"


def test_sweep_rejects_bad_axis_and_empty_grid():
    with pytest.raises(InvalidParameterError):
        sweep(_cfg(), "delta", [0.1])
    with pytest.raises(InvalidParameterError):
        sweep(_cfg(), "gamma", [])


@pytest.mark.slow
def test_full_determinism_at_n200(tmp_path):
    cfg = dict(p=0.5, rates=[0.3, 0.5], N=200, trials=5, master_seed=9)
    run_experiment(ExperimentConfig(**cfg, output=str(tmp_path / "a")))
    run_experiment(ExperimentConfig(**cfg, output=str(tmp_path / "b"), workers=3))
    for suffix in ("_detail.csv", "_aggregate.csv"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_plot_is_byte_identical_for_identical_tables(tmp_path):
    from app.harness.plotting import plot_distortion_curve

    aggregate = run_experiment(_cfg(rates=[0.3, 0.6])).aggregate
    first = plot_distortion_curve(aggregate, tmp_path / "a.svg")
    second = plot_distortion_curve(aggregate, tmp_path / "b.svg")
    assert first.read_bytes() == second.read_bytes()
    assert b"<svg" in first.read_bytes()


def test_plot_rejects_empty_table(tmp_path):
    from app.harness.plotting import plot_distortion_curve

    with pytest.raises(ValueError):
        plot_distortion_curve(pd.DataFrame(columns=AGGREGATE_COLUMNS), tmp_path / "x.svg")
