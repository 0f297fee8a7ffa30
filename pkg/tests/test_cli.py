"""
Tests for the command-line front end and its file formats.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from hocov.cli import io
from hocov.cli.main import main
from hocov.core.errors import ConfigError, DataError
from hocov.schemas.config import ModelRecord, RunConfig
from hocov.schemas.models import ModelFamily

POINTS = "x,y,value\n0,0,1.5\n1,0,2.5\n0,1,0.5\n2,2,1.0\n3,1,2.0\n"


@pytest.fixture(autouse=True)
def restore_root_logging():
    """Undo the handlers installed by main()."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def simulated_file(tmp_path, simulated_dataset) -> Path:
    """The simulated dataset as a comma-separated file."""
    coords = simulated_dataset.coordinates
    frame = pd.DataFrame(
        {"x": coords[:, 0], "y": coords[:, 1], "value": simulated_dataset.observations}
    )
    path = tmp_path / "field.csv"
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def run(*argv) -> int:
    return main([str(a) for a in argv])


class TestIngest:
    """Test reading point datasets."""

    def test_comma_separated(self, write_points):
        """Test a comma-separated file with a header."""
        data = io.ingest(write_points(POINTS))
        assert data.n == 5
        assert data.locations[1] == (1.0, 0.0)
        assert data.values[0] == 1.5

    def test_whitespace_separated(self, write_points):
        """Test a whitespace-separated file with custom column names."""
        text = "east  north rainfall\n0 0 10\n5 0 12\n0   5 9\n"
        data = io.ingest(write_points(text, "points.txt"), columns=("east", "north"), value_column="rainfall")
        assert data.n == 3
        assert data.values == [10.0, 12.0, 9.0]

    def test_one_dimensional(self, write_points):
        """Test that dim selects the leading coordinate columns."""
        data = io.ingest(write_points("x,y,value\n0,0,1.5\n1,0,2.5\n4,1,0.5\n"), dim=1)
        assert data.locations == [(0.0,), (1.0,), (4.0,)]
        assert data.dim == 1

    def test_blank_value(self, write_points):
        """Test that a blank entry names its row and line."""
        path = write_points("x,y,value\n0,0,1\n1,0,\n2,0,3\n")
        with pytest.raises(DataError, match="row 2 \\(line 3\\)"):
            io.ingest(path)

    def test_non_numeric_value(self, write_points):
        """Test that text in a numeric column is rejected."""
        with pytest.raises(DataError, match="row 1"):
            io.ingest(write_points("x,y,value\n0,0,abc\n1,0,2\n"))

    def test_missing_column(self, write_points):
        """Test that the value column must exist."""
        with pytest.raises(DataError, match="missing columns"):
            io.ingest(write_points(POINTS), value_column="rain")

    def test_duplicate_locations(self, write_points):
        """Test that duplicated locations are data errors."""
        with pytest.raises(DataError, match="duplicate"):
            io.ingest(write_points("x,y,value\n0,0,1\n1,1,2\n0,0,3\n"))

    def test_too_few_rows(self, write_points):
        """Test that a single data row is rejected."""
        with pytest.raises(DataError):
            io.ingest(write_points("x,y,value\n0,0,1\n"))

    def test_missing_file(self, tmp_path):
        """Test that a missing input is a data error."""
        with pytest.raises(DataError):
            io.ingest(tmp_path / "absent.csv")


class TestConfigFiles:
    """Test config layering and model records."""

    def test_layers_override(self):
        """Test that later layers win and None leaves values alone."""
        config = io.build_config({"n_bins": "7", "seed": "3"}, {"n_bins": "9", "seed": None})
        assert config.n_bins == 9
        assert config.seed == 3

    def test_invalid_layer(self):
        """Test that validation errors become config errors."""
        with pytest.raises(ConfigError, match="n_bins"):
            io.build_config({"n_bins": "0"})

    def test_save_and_load(self, tmp_path):
        """Test that a saved config loads back equal."""
        config = RunConfig(input="data.csv", free=["sill", "range"], sill_bounds=(0.5, 3.0), seed=9)
        path = io.save_config(config, tmp_path / "run.env")
        assert io.build_config(io.load_config(path)) == config

    def test_missing_config_file(self, tmp_path):
        """Test that an absent config file is a config error."""
        with pytest.raises(ConfigError):
            io.load_config(tmp_path / "none.env")


class TestCommands:
    """Test the commands end to end."""

    def test_empvario(self, tmp_path, write_points):
        """Test the empirical variogram output."""
        out = tmp_path / "out"
        code = run("empvario", "--input", write_points(POINTS), "--n-bins", 3, "--output-dir", out)
        assert code == 0

        frame = pd.read_csv(out / "empirical_variogram.csv")
        assert list(frame.columns) == ["bin_center", "gamma_hat", "count"]
        assert (frame["count"] > 0).all()

    def test_fit_all_fixed(self, tmp_path, write_points):
        """Test that fit with nothing free echoes the parameters and Q."""
        out = tmp_path / "out"
        code = run(
            "fit", "--input", write_points(POINTS), "--family", "hole_effect",
            "--nugget", "0.1", "--sill", "0.5", "--range", "1.5", "--n-bins", 3,
            "--output-dir", out,
        )
        assert code == 0

        record = io.read_model_record(out / "model.txt")
        assert (record.nugget, record.sill, record.range) == (0.1, 0.5, 1.5)
        assert record.evaluations == 1
        report = (out / "fit_report.txt").read_text()
        assert f"Q: {record.Q!r}" in report
        assert "fixed" in report

    def test_fit_then_eval_reproduces_objective(self, tmp_path, simulated_file):
        """Test that evaluating a written model recovers its Q."""
        out = tmp_path / "out"
        code = run(
            "fit", "--input", simulated_file, "--free", "sill,range", "--n-bins", 10,
            "--global-budget", 200, "--local-max-evals", 100, "--output-dir", out,
        )
        assert code == 0
        record = io.read_model_record(out / "model.txt")
        assert record.family.value == "sine_cosine"

        code = run(
            "eval", "--model", out / "model.txt", "--input", simulated_file,
            "--output-dir", tmp_path / "eval",
        )
        assert code == 0
        lines = (tmp_path / "eval" / "eval_report.txt").read_text().splitlines()
        q = float(lines[0].split("=", 1)[1])
        assert q == pytest.approx(record.Q, abs=1e-12)

    def test_eval_curves(self, tmp_path):
        """Test the sine-cosine semivariogram on [0, 20]."""
        out = tmp_path / "out"
        code = run("eval", "--family", "sine_cosine", "--range", 3, "--output-dir", out)
        assert code == 0

        frame = pd.read_csv(out / "eval.csv")
        gamma = frame["semivariogram"].to_numpy()
        assert gamma[0] == 0.0
        assert gamma.max() > 1.0
        assert abs(gamma[-1] - 1.0) < 0.1
        assert frame["h"].iloc[-1] == 20.0
        assert (out / "eval.svg").is_file()

    def test_eval_orders(self, tmp_path):
        """Test one covariance column per requested order."""
        out = tmp_path / "out"
        code = run("eval", "--family", "gaussian_ho", "--orders", "1,2,4", "--output-dir", out)
        assert code == 0

        frame = pd.read_csv(out / "eval.csv")
        assert {"covariance_r1", "covariance_r2", "covariance_r4"} <= set(frame.columns)
        assert frame["covariance_r4"].iloc[0] == 1.0

    def test_eval_orders_need_kernel_family(self, tmp_path):
        """Test that orders are refused for families without r."""
        code = run("eval", "--family", "hole_effect", "--orders", "2", "--output-dir", tmp_path)
        assert code == 2

    def test_spacetime_surface_symmetric(self, tmp_path):
        """Test symmetry of the space-time surface under (h, t) -> (-h, -t)."""
        out = tmp_path / "out"
        code = run(
            "eval", "--family", "hole_effect", "--h-max", 5, "--n-lags", 41,
            "--t-max", 5, "--n-times", 21, "--output-dir", out,
        )
        assert code == 0

        frame = pd.read_csv(out / "eval_spacetime.csv")
        surface = frame["covariance"].to_numpy().reshape(41, 21)
        np.testing.assert_allclose(surface, surface[::-1, ::-1], atol=1e-12)
        assert surface.max() == 1.0

    def test_spacetime_uses_recorded_beta(self, tmp_path):
        """Test that the surface of a model file is evaluated at |h + beta t| with its beta."""
        record = ModelRecord(family=ModelFamily.HOLE_EFFECT, sill=1.0, range=1.0, beta=2.0)
        model_file = io.write_model_record(record, tmp_path / "model.txt")
        out = tmp_path / "out"
        code = run(
            "eval", "--model", model_file, "--h-max", 2, "--n-lags", 5,
            "--t-max", 1, "--n-times", 3, "--output-dir", out,
        )
        assert code == 0

        frame = pd.read_csv(out / "eval_spacetime.csv")
        lag = np.abs(frame["h"].to_numpy() + 2.0 * frame["t"].to_numpy())
        expected = np.where(lag == 0.0, 1.0, np.sin(lag) / np.where(lag == 0.0, 1.0, lag))
        np.testing.assert_allclose(frame["covariance"], expected, rtol=1e-12, atol=1e-15)
        assert frame.loc[(frame["h"] == 2.0) & (frame["t"] == -1.0), "covariance"].item() == 1.0

    def test_simulate(self, tmp_path, write_points):
        """Test that replicates are written with the input's columns."""
        out = tmp_path / "out"
        code = run(
            "simulate", "--input", write_points(POINTS), "--n-replicates", 2,
            "--seed", 4, "--output-dir", out,
        )
        assert code == 0

        first = pd.read_csv(out / "simulation_000.csv")
        second = pd.read_csv(out / "simulation_001.csv")
        assert list(first.columns) == ["x", "y", "value"]
        assert len(first) == 5
        assert not np.array_equal(first["value"], second["value"])

    def test_envelope(self, tmp_path, simulated_file):
        """Test the envelope table and figure for the generating model."""
        out = tmp_path / "out"
        code = run(
            "envelope", "--input", simulated_file, "--family", "sine_cosine",
            "--range", 2, "--n-bins", 8, "--output-dir", out,
        )
        assert code == 0

        frame = pd.read_csv(out / "envelope.csv")
        assert list(frame.columns) == ["bin_center", "observed", "lower", "upper", "contained"]
        assert (frame["lower"] <= frame["upper"]).all()
        assert frame["contained"].mean() >= 0.5
        assert (out / "envelope.svg").read_text().lstrip().startswith("<?xml")

    def test_pdcheck(self, tmp_path):
        """Test the positive-definiteness report."""
        out = tmp_path / "out"
        code = run("pdcheck", "--family", "hole_effect", "--pd-n", 30, "--output-dir", out)
        assert code == 0

        lines = (out / "pdcheck_report.txt").read_text().splitlines()
        seeds = [line for line in lines if line.startswith("seed=")]
        assert len(seeds) == 5
        assert all(line.endswith(" ok") for line in seeds)
        assert lines[-1].startswith("overall: ok")

    def test_config_file_with_override(self, tmp_path, write_points):
        """Test that flags override the config file and the result can be saved."""
        config = tmp_path / "run.env"
        config.write_text(f"input={write_points(POINTS)}\nn_bins=7\nseed=5\n", encoding="utf-8")
        saved = tmp_path / "effective.env"
        code = run(
            "empvario", "--config", config, "--n-bins", 2,
            "--output-dir", tmp_path / "out", "--save-config", saved,
        )
        assert code == 0

        effective = io.build_config(io.load_config(saved))
        assert effective.n_bins == 2
        assert effective.seed == 5


class TestExitCodes:
    """Test error categories at the process boundary."""

    def test_config_error(self, tmp_path, capsys):
        """Test an invalid value."""
        code = run("empvario", "--n-bins", 0, "--output-dir", tmp_path)
        assert code == 2
        err = capsys.readouterr().err.strip().splitlines()
        assert err[-1].startswith("error category=config_error")

    def test_missing_input_setting(self, tmp_path, capsys):
        """Test a command that needs an input without one."""
        assert run("empvario", "--output-dir", tmp_path) == 2
        assert "category=config_error" in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path, capsys):
        """Test a configured input that does not exist."""
        code = run("empvario", "--input", tmp_path / "nope.csv", "--output-dir", tmp_path)
        assert code == 3
        assert "category=data_error" in capsys.readouterr().err

    def test_undefined_objective(self, tmp_path, write_points, capsys):
        """Test that constant data with every parameter fixed is a numerical error."""
        path = write_points("x,y,value\n0,0,1\n1,0,1\n0,1,1\n2,2,1\n")
        code = run(
            "fit", "--input", path, "--family", "hole_effect", "--n-bins", 2,
            "--output-dir", tmp_path,
        )
        assert code == 4
        assert "category=numerical_error" in capsys.readouterr().err

    def test_unknown_family(self, tmp_path):
        """Test that an unknown family is a config error."""
        assert run("eval", "--family", "spherical", "--output-dir", tmp_path) == 2
