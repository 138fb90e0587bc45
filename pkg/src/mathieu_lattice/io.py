"""Writers for the CSV, PGM and JSON artifacts.

Numbers are written with ``repr``: the shortest decimal string that round-trips
to the same double, so repeated runs produce byte-identical files.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np


def fmt(x):
    return repr(float(x))


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def write_chart_csv(chart, path):
    """``q,m,E`` rows, one per (q, m)."""
    _write_lines(path, ["q,m,E"] + [f"{fmt(q)},{m},{fmt(e)}" for q, m, e in chart.rows()])


def read_chart_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1].astype(int), data[:, 2]


def write_intensity_csv(z_grid, intensities, path, axis_name="z"):
    """First column the distance, then ``|c_j|^2`` for ``j = -J..J``."""
    intensities = np.asarray(intensities)
    J = (intensities.shape[1] - 1) // 2
    header = ",".join([axis_name] + [f"j={j}" for j in range(-J, J + 1)])
    rows = (",".join([fmt(z)] + [fmt(v) for v in row]) for z, row in zip(z_grid, intensities))
    _write_lines(path, [header, *rows])


def read_intensity_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    sites = np.array([int(h.split("=")[1]) for h in header[1:]])
    return data[:, 0], sites, data[:, 1:]


def write_pgm(intensities, path):
    """Binary 16-bit PGM (P5): rows are z samples, columns are sites, linear in ``[0, max]``."""
    img = np.asarray(intensities, dtype=float)
    top = img.max()
    scaled = np.zeros(img.shape) if top <= 0 else np.clip(img / top, 0.0, 1.0)
    pixels = np.rint(scaled * 65535).astype(">u2")
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, dims, maxval, body = raw.split(b"\n", 3)
    if magic != b"P5":
        raise ValueError("not a binary PGM")
    w, h = (int(v) for v in dims.split())
    dtype = ">u2" if int(maxval) > 255 else "u1"
    return np.frombuffer(body, dtype=dtype).reshape(h, w), int(maxval)


def write_function_table(x, values, path):
    """``x,re,im`` rows for a complex function sampled at ``x``."""
    values = np.asarray(values, dtype=complex)
    _write_lines(path, ["x,re,im"] + [f"{fmt(a)},{fmt(v.real)},{fmt(v.imag)}" for a, v in zip(x, values)])


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What is needed to regenerate every output of one CLI run."""

    subcommand: str
    parameters: dict
    version: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def add_output(self, path):
        self.outputs[os.path.basename(path)] = {"path": os.path.abspath(path), "sha256": sha256(path)}

    def write(self, path):
        doc = asdict(self)
        doc["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        write_json(doc, path)
