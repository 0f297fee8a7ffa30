"""
Command-line front end.

    hocov <command> [--config FILE] [--<field> VALUE ...]

Commands: empvario, fit, eval, simulate, envelope, pdcheck. Every RunConfig
field is also a flag (``n_bins`` becomes ``--n-bins``); flags override the
config file. Exit status is 0 on success, 2 for configuration errors, 3 for
data errors and 4 for numerical errors, with a one-line
``error category=... type=... message=...`` on stderr.
"""

import argparse
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from hocov import __version__
from hocov.core.errors import ConfigError, ErrorCategory, HocovError, report_error
from hocov.core.logging import setup_logging
from hocov.schemas.config import ModelRecord, RunConfig
from hocov.schemas.models import CovarianceModel, ModelFamily, SpatioTemporalModel
from hocov.services.covmodels import (
    covariance,
    pd_diagnostic,
    semivariogram_of,
    spacetime_eval,
)
from hocov.services.fit import (
    default_bounds,
    fit,
    make_problem,
    problem_model,
    wls_objective,
)
from hocov.services.simulate import FieldSampler, envelope_test
from hocov.services.variogram import empirical_variogram
from hocov.cli import io
from hocov.cli.plots import plot_curves, plot_envelope

logger = logging.getLogger(__name__)

PD_TOLERANCE = -1e-8


class Command(str, Enum):
    """Commands of the front end."""
    EMPVARIO = "empvario"
    FIT = "fit"
    EVAL = "eval"
    SIMULATE = "simulate"
    ENVELOPE = "envelope"
    PDCHECK = "pdcheck"


def _output_dir(config: RunConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_model(config: RunConfig) -> Tuple[SpatioTemporalModel, Optional[ModelRecord]]:
    """Model from a record file when one is configured, else from the config values."""
    if config.model:
        record = io.read_model_record(config.model)
        return record.spacetime_model(), record
    return SpatioTemporalModel(spatial=config.covariance_model(), beta=config.beta), None


def _coordinate_names(config: RunConfig) -> List[str]:
    return [config.x_column, config.y_column, config.z_column][: config.dim]


def run_empvario(config: RunConfig) -> List[Path]:
    data = io.ingest_for(config)
    result = empirical_variogram(data, config.n_bins, config.max_lag)
    path = io.write_csv(
        _output_dir(config) / "empirical_variogram.csv",
        {"bin_center": result.bin_centers, "gamma_hat": result.estimates, "count": result.counts},
    )
    return [path]


def run_fit(config: RunConfig) -> List[Path]:
    data = io.ingest_for(config)
    empirical = empirical_variogram(data, config.n_bins, config.max_lag)

    bounds: Dict[str, Tuple[float, float]] = {}
    if config.free:
        bounds = default_bounds(data, config.family, config.free)
        bounds.update(config.bound_overrides())
    problem = make_problem(
        config.family, empirical, config.free, config.fixed_params(), bounds,
        r=config.r, s=config.s,
    )
    result = fit(problem, config.global_budget, config.local_tol, config.local_max_evals)
    model = problem_model(problem, result.theta_hat)

    record = ModelRecord.from_model(
        model,
        beta=config.beta,
        Q=result.objective,
        evaluations=result.evaluations,
        n_bins=config.n_bins,
        max_lag=empirical.max_lag,
    )

    lines = [
        f"family: {config.family.value} (r={config.r}, s={config.s})",
        f"data: {config.input} (n={data.n}, dim={data.dim})",
        f"bins: {len(empirical.counts)} of {config.n_bins} retained, max_lag={empirical.max_lag!r}",
        "",
        f"{'parameter':<10} {'value':>24}  status",
    ]
    for name, value in model.parameters().items():
        if name in config.free:
            low, high = bounds[name]
            status = f"free [{low!r}, {high!r}]"
        else:
            status = "fixed"
        lines.append(f"{name:<10} {value!r:>24}  {status}")
    lines += [
        f"{'sigma':<10} {result.sigma!r:>24}  sqrt(sill)",
        "",
        f"Q: {result.objective!r}",
        f"global stage Q: {result.global_stage_value!r}",
        f"evaluations: {result.evaluations} "
        f"(global {result.global_evaluations}, local {result.local_evaluations})",
        f"excluded bins: {result.excluded_bins}",
    ]

    out = _output_dir(config)
    return [
        io.write_text(out / "fit_report.txt", lines),
        io.write_model_record(record, out / "model.txt"),
    ]


def _order_model(model: CovarianceModel, order: int) -> CovarianceModel:
    return CovarianceModel(family=model.family, r=order, s=model.s, theta=model.theta)


def run_eval(config: RunConfig) -> List[Path]:
    spacetime, record = _resolve_model(config)
    model = spacetime.spatial
    out = _output_dir(config)
    lags = np.linspace(0.0, config.h_max, config.n_lags)

    columns: Dict[str, Sequence[float]] = {
        "h": lags,
        "covariance": covariance(model, lags),
        "semivariogram": semivariogram_of(model, lags),
    }
    curves = {model.family.value: columns["covariance"]}
    if config.orders:
        if model.family not in (ModelFamily.GAUSSIAN_HO, ModelFamily.MULLER_C2):
            raise ConfigError(f"orders do not apply to {model.family.value}")
        for order in config.orders:
            values = covariance(_order_model(model, order), lags)
            columns[f"covariance_r{order}"] = values
            curves[f"r={order}"] = values
        curves.pop(model.family.value)

    paths = [
        io.write_csv(out / "eval.csv", columns),
        plot_curves(lags, curves, out / "eval.svg", "covariance"),
    ]

    if config.t_max is not None:
        h_grid, t_grid = np.meshgrid(
            np.linspace(-config.h_max, config.h_max, config.n_lags),
            np.linspace(-config.t_max, config.t_max, config.n_times),
            indexing="ij",
        )
        surface = spacetime_eval(spacetime, h_grid, t_grid)
        paths.append(
            io.write_csv(
                out / "eval_spacetime.csv",
                {"h": h_grid.ravel(), "t": t_grid.ravel(), "covariance": np.ravel(surface)},
            )
        )

    if record is not None and config.input:
        data = io.ingest_for(config)
        empirical = empirical_variogram(
            data, record.n_bins or config.n_bins, record.max_lag or config.max_lag
        )
        problem = make_problem(model.family, empirical, [], model.parameters(), {}, model.r, model.s)
        q = wls_objective(problem, model.theta)
        logger.info("Q at the recorded model: %r (recorded %r)", q, record.Q)
        paths.append(io.write_text(out / "eval_report.txt", [f"Q={q!r}", f"recorded_Q={record.Q!r}"]))

    return paths


def run_simulate(config: RunConfig) -> List[Path]:
    data = io.ingest_for(config)
    model = _resolve_model(config)[0].spatial
    mean = config.mean if config.mean is not None else float(np.mean(data.observations))
    sampler = FieldSampler(model, data.coordinates)
    out = _output_dir(config)

    paths = []
    coordinates = data.coordinates
    for k in range(config.n_replicates):
        values = sampler.draw(mean, config.seed + k)
        columns: Dict[str, Sequence[float]] = {
            name: coordinates[:, axis] for axis, name in enumerate(_coordinate_names(config))
        }
        columns[config.value_column] = values
        paths.append(io.write_csv(out / f"simulation_{k:03d}.csv", columns))
    logger.info("Wrote %d simulated fields (jitter %.3g)", len(paths), sampler.jitter)
    return paths


def run_envelope(config: RunConfig) -> List[Path]:
    data = io.ingest_for(config)
    model = _resolve_model(config)[0].spatial
    result = envelope_test(model, data, config.n_bins, config.max_lag, config.n_sim, config.seed)
    out = _output_dir(config)
    return [
        io.write_csv(
            out / "envelope.csv",
            {
                "bin_center": result.bin_centers,
                "observed": result.observed,
                "lower": result.lower,
                "upper": result.upper,
                "contained": result.contained,
            },
        ),
        plot_envelope(result, model, out / "envelope.svg"),
    ]


def run_pdcheck(config: RunConfig) -> List[Path]:
    model = _resolve_model(config)[0].spatial
    lines = [
        f"family: {model.family.value} (r={model.r}, s={model.s})",
        f"points: {config.pd_n} uniform in [0, 10]^{config.pd_dim}",
        "",
    ]
    worst = np.inf
    for seed in range(config.pd_seeds):
        value = pd_diagnostic(model, config.pd_dim, config.pd_n, seed)
        worst = min(worst, value)
        status = "ok" if value >= PD_TOLERANCE else "negative"
        lines.append(f"seed={seed} min_eigenvalue={value!r} {status}")
    lines += ["", f"overall: {'ok' if worst >= PD_TOLERANCE else 'negative'} (min {worst!r})"]
    return [io.write_text(_output_dir(config) / "pdcheck_report.txt", lines)]


HANDLERS: Dict[Command, Callable[[RunConfig], List[Path]]] = {
    Command.EMPVARIO: run_empvario,
    Command.FIT: run_fit,
    Command.EVAL: run_eval,
    Command.SIMULATE: run_simulate,
    Command.ENVELOPE: run_envelope,
    Command.PDCHECK: run_pdcheck,
}


def _fail(error: Exception, category: Optional[ErrorCategory] = None) -> int:
    event = report_error(error, category)
    print(event.to_line(), file=sys.stderr)
    return event.category.exit_code


def run_command(config: RunConfig, command: Command) -> int:
    """Run one command; returns the process exit status."""
    command = Command(command)
    try:
        paths = HANDLERS[command](config)
    except HocovError as exc:
        return _fail(exc)
    except ValidationError as exc:
        return _fail(exc, ErrorCategory.CONFIG_ERROR)
    except OSError as exc:
        return _fail(exc, ErrorCategory.DATA_ERROR)
    for path in paths:
        logger.info("Wrote %s", path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hocov",
        description="Covariance models from higher-order kernels: variograms, fitting, simulation",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=str, help="key=value configuration file")
    parser.add_argument("--save-config", type=str, help="Write the effective configuration here")
    parser.add_argument("--log-level", type=str, default="", help="Override HOCOV_LOG_LEVEL")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    fields = parser.add_argument_group("run configuration")
    for name, info in RunConfig.model_fields.items():
        fields.add_argument(
            f"--{name.replace('_', '-')}", dest=name, type=str, default=None,
            help=info.description,
        )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        file_values = io.load_config(args.config) if args.config else {}
        flag_values = {name: getattr(args, name) for name in RunConfig.model_fields}
        config = io.build_config(file_values, flag_values)
        if args.save_config:
            io.save_config(config, args.save_config)
    except HocovError as exc:
        return _fail(exc)

    return run_command(config, Command(args.command))


if __name__ == "__main__":
    sys.exit(main())
