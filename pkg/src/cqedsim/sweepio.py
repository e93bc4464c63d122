"""CSV and metadata output for sweep results.

One CSV per run (RFC-4180 quoting, '.' decimal separator, units in the
column names) plus a JSON metadata sidecar. Floats are written with
repr(), the shortest round-trip representation, so the same result always
serializes to byte-identical CSV on one platform.
"""

import csv
import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__


def _fmt(value):
    value = float(value)
    if math.isnan(value):
        return "NaN"
    return repr(value)


def write_sweep_csv(result, path):
    """Write one row per grid cell: axis values, observables, error note."""
    axis_names = list(result.axes)
    column_names = list(result.columns)
    shape = result.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(axis_names + column_names + ["error"])
        for flat, idx in enumerate(np.ndindex(*shape)):
            row = [_fmt(result.axes[name][k])
                   for name, k in zip(axis_names, idx)]
            row += [_fmt(result.columns[name][flat]) for name in column_names]
            row.append(result.errors[flat])
            writer.writerow(row)


def read_sweep_csv(path):
    """Parse a sweep CSV back into {column: array} plus the error column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    data = {name: [] for name in header}
    for row in rows:
        for name, cell in zip(header, row):
            data[name].append(cell)
    out = {}
    for name in header:
        if name == "error":
            out[name] = np.array(data[name], dtype=object)
        else:
            out[name] = np.array(
                [float("nan") if c == "NaN" else float(c) for c in data[name]])
    return out


def write_meta_json(result, path):
    """JSON sidecar: kind, axes, column names, and the run metadata
    (config echo, runtime, solver statistics)."""
    doc = {
        "kind": result.kind,
        "axes": {name: [float(v) for v in vals]
                 for name, vals in result.axes.items()},
        "columns": list(result.columns),
        "metadata": result.metadata,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written atomically after a successful run."""

    command: str
    config_path: str
    config_sha256: str
    tool_version: str
    started_at: str
    finished_at: str
    outputs: tuple

    def to_dict(self):
        return {
            "command": self.command,
            "config_path": self.config_path,
            "config_sha256": self.config_sha256,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
        }


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(manifest, path):
    """Atomic write: the manifest appears complete or not at all."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(manifest.to_dict(), fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest_for(command, config_path, outputs, started_at, finished_at):
    return RunManifest(
        command=command,
        config_path=config_path,
        config_sha256=sha256_file(config_path),
        tool_version=__version__,
        started_at=started_at,
        finished_at=finished_at,
        outputs=tuple(outputs),
    )
