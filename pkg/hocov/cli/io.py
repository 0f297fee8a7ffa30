"""
File input and output for the command-line front end.

Data files are delimited text with a header row: comma-separated when the
header contains a comma, whitespace-separated otherwise. CSV outputs carry a
header and use 17 significant digits, so every float round-trips exactly.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from hocov.core.errors import ConfigError, DataError
from hocov.schemas.config import ModelRecord, RunConfig
from hocov.schemas.data import Dataset

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.17g"


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in item['loc']) or 'value'}: {item['msg']}"
        for item in error.errors()
    )


def _separator(path: Path) -> str:
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline()
    return "," if "," in header else r"\s+"


def ingest(
    path: PathLike,
    dim: int = 2,
    columns: Sequence[str] = ("x", "y", "z"),
    value_column: str = "value",
) -> Dataset:
    """
    Read a point dataset from a delimited text file.

    Args:
        path: Input file with a header row
        dim: Number of coordinate columns to use
        columns: Coordinate column names, first ``dim`` are used
        value_column: Name of the observation column

    Raises:
        DataError: unreadable file, missing columns, a non-finite entry,
            fewer than 2 rows or duplicate locations
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")

    try:
        frame = pd.read_csv(
            path, sep=_separator(path), dtype=str, keep_default_na=False, engine="python"
        )
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc
    frame.columns = [str(c).strip() for c in frame.columns]

    wanted = list(columns[:dim]) + [value_column]
    missing = [c for c in wanted if c not in frame.columns]
    if missing:
        raise DataError(
            f"{path} is missing columns {missing}",
            context={"columns": list(frame.columns)},
        )

    numeric = frame[wanted].apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    values = numeric.to_numpy(dtype=float)
    bad = ~np.isfinite(values).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        # file line number: header is line 1
        raise DataError(
            f"{path} row {row + 1} (line {row + 2}) has a missing or non-finite entry",
            context={"row": row + 1, "line": row + 2, "bad_rows": int(bad.sum())},
        )
    if len(values) < 2:
        raise DataError(f"{path} has {len(values)} data rows; at least 2 are required")

    try:
        data = Dataset(
            dim=dim,
            locations=[tuple(row) for row in values[:, :dim]],
            values=values[:, dim].tolist(),
        )
    except ValidationError as exc:
        raise DataError(f"{path}: {_validation_message(exc)}") from exc

    logger.info("Read %d points (dim=%d) from %s", data.n, dim, path)
    return data


def ingest_for(config: RunConfig) -> Dataset:
    """Ingest the configured input file with the configured column mapping."""
    if not config.input:
        raise ConfigError("this command needs an input file (input=...)")
    return ingest(
        config.input,
        config.dim,
        (config.x_column, config.y_column, config.z_column),
        config.value_column,
    )


def write_csv(path: PathLike, columns: Dict[str, Sequence]) -> Path:
    """Write named columns to CSV at full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug("Wrote %s", path)
    return path


def write_text(path: PathLike, lines: List[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return path


def _read_flat(path: PathLike) -> Dict[str, object]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"file not found: {path}")
    return dict(dotenv_values(path, interpolate=False))


def load_config(path: PathLike) -> Dict[str, object]:
    """Raw key=value pairs of a config file."""
    return _read_flat(path)


def save_config(config: RunConfig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.to_text(), encoding="utf-8")
    return path


def build_config(*layers: Dict[str, object]) -> RunConfig:
    """
    RunConfig from key=value layers; later layers override earlier ones.

    Raises:
        ConfigError: unknown keys or invalid values
    """
    merged: Dict[str, object] = {}
    for layer in layers:
        merged.update({key: value for key, value in layer.items() if value is not None})
    try:
        return RunConfig.from_mapping(merged)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {_validation_message(exc)}") from exc


def write_model_record(record: ModelRecord, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record.to_text(), encoding="utf-8")
    return path


def read_model_record(path: PathLike) -> ModelRecord:
    """Read a model record written by ``write_model_record``."""
    try:
        return ModelRecord.from_mapping(_read_flat(path))
    except ValidationError as exc:
        raise ConfigError(f"invalid model record {path}: {_validation_message(exc)}") from exc
