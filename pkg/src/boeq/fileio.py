"""Stable on-disk formats: coefficient JSON, sample/spectrum CSV, manifests.

All writers are deterministic (sorted keys, repr floats, no timestamps in
payload files) so identical configurations reproduce identical bytes; the
run manifest carries wall time and checksums of everything else.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import IngestionError
from .spectral import TorusField

__all__ = [
    "write_field_json",
    "read_field_json",
    "write_coeff_csv",
    "write_solution_json",
    "write_samples_csv",
    "read_samples_csv",
    "write_spectrum_csv",
    "write_scan_csv",
    "write_matrix_csv",
    "write_trajectory",
    "write_json",
    "sha256_of",
    "write_manifest",
]


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, complex)]


def write_json(path: Path, payload: dict[str, Any]):
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_field_json(path: Path, field: TorusField):
    """{"max_mode": N, "coeffs": [[re, im], ...]} for k = -N..N in order."""
    write_json(Path(path), {"max_mode": field.max_mode, "coeffs": _pairs(field.coeffs)})


def read_field_json(path: Path) -> TorusField:
    data = json.loads(Path(path).read_text())
    try:
        n = int(data["max_mode"])
        pairs = data["coeffs"]
        coeffs = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed coefficient file {path}") from exc
    return TorusField(n, coeffs)


def write_coeff_csv(path: Path, coeffs: np.ndarray, start_k: int = 0):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "re", "im"])
        for i, c in enumerate(np.asarray(coeffs, complex)):
            w.writerow([start_k + i, repr(float(c.real)), repr(float(c.imag))])


def write_solution_json(path: Path, t: float, coeffs: np.ndarray, mean: float):
    write_json(Path(path), {"t": t, "coeffs": _pairs(coeffs), "mean": mean})


def write_samples_csv(path: Path, x: np.ndarray, u: np.ndarray):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u"])
        for xi, ui in zip(x, u):
            w.writerow([repr(float(xi)), repr(float(ui))])


def read_samples_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    xs: list[float] = []
    us: list[float] = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["x", "u"]:
            raise IngestionError(f"{path}: expected 'x,u' header")
        for row in reader:
            if not row:
                continue
            try:
                xs.append(float(row[0]))
                us.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise IngestionError(f"{path}: malformed row {row!r}") from exc
    return np.asarray(xs), np.asarray(us)


def write_spectrum_csv(path: Path, xi: np.ndarray, values: np.ndarray):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "re", "im"])
        for x, v in zip(xi, np.asarray(values, complex)):
            w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])


def write_scan_csv(path: Path, rows: Iterable):
    """Rows of (z, value-or-None, error-or-None) as re_z,im_z,re_val,im_val."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_z", "im_z", "re_val", "im_val"])
        for row in rows:
            z = complex(row.z)
            if row.value is None:
                w.writerow([repr(z.real), repr(z.imag), "nan", "nan"])
            else:
                v = complex(row.value)
                w.writerow([repr(z.real), repr(z.imag), repr(v.real), repr(v.imag)])


def write_matrix_csv(path: Path, matrix: np.ndarray):
    """Row-major re,im pairs, one matrix row per CSV row."""
    m = np.asarray(matrix, complex)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in m:
            flat: list[str] = []
            for v in row:
                flat.append(repr(float(v.real)))
                flat.append(repr(float(v.imag)))
            w.writerow(flat)


def write_trajectory(outdir: Path, times: Sequence[float], sample_sets: Sequence[np.ndarray], x: np.ndarray) -> list[str]:
    """One samples CSV per snapshot plus an index JSON naming them."""
    outdir = Path(outdir)
    files = []
    for i, (t, u) in enumerate(zip(times, sample_sets)):
        name = f"snapshot_{i:04d}.csv"
        write_samples_csv(outdir / name, x, u)
        files.append(name)
    write_json(outdir / "trajectory.json", {"times": [float(t) for t in times], "files": files})
    return files + ["trajectory.json"]


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def write_manifest(
    outdir: Path,
    command: str,
    config: dict[str, Any],
    wall_time_s: float,
    warnings_seen: Sequence[str],
    version: str,
):
    """manifest.json naming and checksumming every other file in outdir."""
    outdir = Path(outdir)
    outputs = {}
    for p in sorted(outdir.iterdir()):
        if p.name == "manifest.json" or not p.is_file():
            continue
        outputs[p.name] = sha256_of(p)
    write_json(outdir / "manifest.json", {
        "command": command,
        "config": config,
        "version": version,
        "wall_time_s": wall_time_s,
        "outputs": outputs,
        "warnings": list(warnings_seen),
        "schema": 1,
    })
