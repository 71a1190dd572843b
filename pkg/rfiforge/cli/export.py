"""
Writers for the files a run leaves behind: CSV tables, maps and the run manifest.

Every writer returns the path it wrote and raises `OutputError` when the file system
refuses it.
"""

from __future__ import annotations

import hashlib
import json
import logging
from functools import wraps
from pathlib import Path
from typing import Callable, ParamSpec, Sequence, TypeVar

import numpy as np
import pandas as pd

from rfiforge.exceptions import OutputError
from rfiforge.models.config import MapFormat
from rfiforge.models.imaging import SkyMap
from rfiforge.models.manifest import RunManifest
from rfiforge.types.imaging import MapScalingDict

T = TypeVar("T")
P = ParamSpec("P")

logger = logging.getLogger(__name__)

PGM_MAX_PIXEL = 65535


def io_errors(f: Callable[P, T]) -> Callable[P, T]:
    """
    Wrapper for writers. Re-raises `OSError` as an `OutputError`.
    """

    @wraps(f)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
        try:
            return f(*args, **kwargs)
        except OSError as e:
            raise OutputError(f"cannot write {e.filename or 'output'}: {e.strerror or e}") from e

    return wrapper


@io_errors
def prepare_out_dir(out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


@io_errors
def write_frame(path: Path, frame: pd.DataFrame) -> Path:
    """
    Write a frame as a UTF-8 CSV with a header row and `.` as decimal separator.
    """
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.debug("Wrote %d rows to %s", len(frame), path)
    return path


def write_table(path: Path, rows: Sequence[dict], columns: Sequence[str] | None = None) -> Path:
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns is not None else None)
    return write_frame(path, frame)


def write_matrix(path: Path, matrix: np.ndarray) -> Path:
    """
    Write a complex matrix as `row,col,real,imag`, one entry per line in row-major order.
    """
    rows, cols = np.indices(matrix.shape)
    return write_frame(
        path,
        pd.DataFrame(
            {
                "row": rows.ravel(),
                "col": cols.ravel(),
                "real": matrix.real.ravel(),
                "imag": matrix.imag.ravel(),
            }
        ),
    )


def write_snapshots(path: Path, data: np.ndarray) -> Path:
    """
    Write snapshots as `antenna,sample,real,imag`.
    """
    antennas, samples = np.indices(data.shape)
    return write_frame(
        path,
        pd.DataFrame(
            {
                "antenna": antennas.ravel(),
                "sample": samples.ravel(),
                "real": data.real.ravel(),
                "imag": data.imag.ravel(),
            }
        ),
    )


def write_map_csv(path: Path, sky_map: SkyMap) -> Path:
    """
    Write a map as `l,m,value`; masked points have an empty value.
    """
    l, m = sky_map.grid.mesh()
    return write_frame(
        path,
        pd.DataFrame(
            {"l": l.ravel(), "m": m.ravel(), "value": sky_map.values.ravel()}
        ),
    )


def map_scaling(sky_map: SkyMap) -> MapScalingDict:
    values = sky_map.values[np.isfinite(sky_map.values)]
    minimum = float(values.min()) if values.size else 0.0
    maximum = float(values.max()) if values.size else 0.0
    return MapScalingDict(
        minimum=minimum,
        maximum=maximum,
        max_pixel=PGM_MAX_PIXEL,
        width=sky_map.grid.l_axis.size,
        height=sky_map.grid.m_axis.size,
        l_axis=sky_map.grid.l_axis.tolist(),
        m_axis=sky_map.grid.m_axis.tolist(),
        description=sky_map.description,
    )


def pgm_pixels(sky_map: SkyMap, scaling: MapScalingDict) -> np.ndarray:
    """
    16-bit pixels of a map, top row at the largest `m`. Masked points are 0.
    """
    span = scaling["maximum"] - scaling["minimum"]
    finite = np.isfinite(sky_map.values)
    scaled = np.zeros(sky_map.values.shape)
    if span > 0:
        scaled[finite] = (sky_map.values[finite] - scaling["minimum"]) / span
    pixels = np.where(finite, np.rint(scaled * PGM_MAX_PIXEL), 0).astype(">u2")
    return np.flipud(pixels)


@io_errors
def write_map_pgm(path: Path, sky_map: SkyMap) -> tuple[Path, Path]:
    """
    Write a binary 16-bit PGM and a JSON sidecar holding the value scaling and axes.

    Returns
    -------
    tuple[Path, Path]
        The image and sidecar paths
    """
    scaling = map_scaling(sky_map)
    pixels = pgm_pixels(sky_map, scaling)
    header = f"P5\n{scaling['width']} {scaling['height']}\n{PGM_MAX_PIXEL}\n".encode("ascii")
    path.write_bytes(header + pixels.tobytes())
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(scaling, indent=2), encoding="utf-8")
    return path, sidecar


def write_map(out_dir: Path, name: str, sky_map: SkyMap, fmt: MapFormat) -> list[Path]:
    paths = []
    if fmt in (MapFormat.CSV, MapFormat.BOTH):
        paths.append(write_map_csv(out_dir / f"{name}.csv", sky_map))
    if fmt in (MapFormat.PGM, MapFormat.BOTH):
        paths.extend(write_map_pgm(out_dir / f"{name}.pgm", sky_map))
    return paths


@io_errors
def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


@io_errors
def write_manifest(out_dir: Path, manifest: RunManifest, paths: Sequence[Path]) -> Path:
    """
    Checksum every emitted file into the manifest and write it as `manifest.json`.
    """
    files = {path.name: sha256_file(path) for path in sorted(paths)}
    manifest = manifest.model_copy(update={"files": files})
    path = out_dir / "manifest.json"
    document = json.dumps(manifest.dump_json(), indent=2, sort_keys=True)
    path.write_text(document, encoding="utf-8")
    logger.info("Wrote %d files and %s", len(files), path)
    return path
