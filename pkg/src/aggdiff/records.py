"""Simulation record files: CSV (text) and binary layouts.

Both layouts carry the same content: a header echoing the run configuration
(code version, seed, grid), the recorded frames, and the diagnostics series.

CSV layout (one file, UTF-8)
----------------------------
Header lines are prefixed with ``#``::

    # aggdiff-record v1
    # version=<package version>
    # seed=<int or none>
    # M=<int>
    # L=<17 significant digits>
    # N=<int>
    # config=<single-line JSON echo of the run configuration, optional>
    # diag-columns=t,mass_0,...,l2_0,...,min_value,steady_metric
    # diag=<comma-separated row, 17 significant digits each>   (repeated)
    t,x,species_index,value
    <data rows, 17 significant digits for t, x, value>

Data rows are ordered frame by frame (strictly increasing t); within a
frame, species-major then grid-index. 17 significant digits round-trip an
IEEE double exactly, so re-read values differ by at most 1 ulp (in practice
0).

Binary layout (little-endian throughout)
----------------------------------------
::

    magic   4 bytes  b"AGDR"
    version u32      1
    hlen    u32      header length in bytes
    header  hlen     UTF-8 JSON: {"version", "seed", "M", "L", "N", "config"}
    dcols   u32      number of diagnostics columns (0 when absent)
    drows   u64      number of diagnostics rows
    diag    f64[.]   diagnostics, row-major
    nframes u64
    frames  nframes * (f64 t + N*M f64 values)

Binary round trips are bitwise exact. A wrong magic or version, or a short
read anywhere, raises RecordFormatError.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .errors import RecordFormatError

MAGIC = b"AGDR"
BINARY_VERSION = 1
CSV_SENTINEL = "# aggdiff-record v1"

_DIG = "{:.17g}"


@dataclass
class SimulationRecord:
    """In-memory form of a record file."""

    M: int
    L: float
    N: int
    times: np.ndarray                 # (n_frames,)
    frames: np.ndarray                # (n_frames, N, M)
    seed: int | None = None
    config: dict = field(default_factory=dict)
    diag_columns: list = field(default_factory=list)
    diagnostics: np.ndarray = None    # (n_rows, n_cols) or None
    version: str = __version__

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 3 or self.frames.shape[1:] != (self.N, self.M):
            raise ValueError(
                f"frames must be (n, {self.N}, {self.M}), got {self.frames.shape}"
            )
        if self.times.shape != (self.frames.shape[0],):
            raise ValueError("one timestamp per frame required")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("frame times must be strictly increasing")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("frames contain non-finite values")
        if self.diagnostics is not None:
            self.diagnostics = np.asarray(self.diagnostics, dtype=np.float64)


def record_from_run(result, cfg_echo: dict | None = None,
                    seed: int | None = None) -> SimulationRecord:
    """Package a RunResult (see integrator) into a record."""
    d = result.diagnostics
    n_species = result.final_state.N
    cols = (["t"] + [f"mass_{i}" for i in range(n_species)]
            + [f"l2_{i}" for i in range(n_species)] + ["min_value", "steady_metric"])
    diag = np.column_stack([d.t, d.masses, d.l2_norms, d.min_value, d.steady_metric]) \
        if len(d.t) else np.empty((0, len(cols)))
    return SimulationRecord(
        M=result.final_state.grid.M,
        L=result.final_state.grid.L,
        N=n_species,
        times=result.snapshot_t,
        frames=result.snapshots,
        seed=seed,
        config=dict(cfg_echo or {}),
        diag_columns=cols,
        diagnostics=diag,
    )


def write_record(record: SimulationRecord, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        _write_csv(record, path)
    elif fmt == "binary":
        _write_binary(record, path)
    else:
        raise ValueError(f"unknown record format {fmt!r}; expected csv or binary")


def read_record(path) -> SimulationRecord:
    """Read either layout; binary is detected by its magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return _read_binary(path)
    return _read_csv(path)


def _write_csv(record: SimulationRecord, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_SENTINEL + "\n")
        fh.write(f"# version={record.version}\n")
        fh.write(f"# seed={'none' if record.seed is None else record.seed}\n")
        fh.write(f"# M={record.M}\n")
        fh.write(f"# L={_DIG.format(record.L)}\n")
        fh.write(f"# N={record.N}\n")
        if record.config:
            fh.write(f"# config={json.dumps(record.config, sort_keys=True)}\n")
        if record.diagnostics is not None and record.diag_columns:
            fh.write(f"# diag-columns={','.join(record.diag_columns)}\n")
            for row in record.diagnostics:
                fh.write("# diag=" + ",".join(_DIG.format(v) for v in row) + "\n")
        fh.write("t,x,species_index,value\n")
        dx = record.L / record.M
        for t, frame in zip(record.times, record.frames):
            t_str = _DIG.format(t)
            for s in range(record.N):
                for m in range(record.M):
                    fh.write(f"{t_str},{_DIG.format(m * dx)},{s},"
                             f"{_DIG.format(frame[s, m])}\n")


def _read_csv(path) -> SimulationRecord:
    meta = {}
    diag_columns: list = []
    diag_rows: list = []
    data_started = False
    times: list = []
    frames: list = []
    current_t = None
    current = None

    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_SENTINEL:
            raise RecordFormatError(
                f"not an aggdiff record (expected {CSV_SENTINEL!r}, got {first!r})"
            )
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    continue
                key, value = body.split("=", 1)
                if key == "diag-columns":
                    diag_columns = value.split(",")
                elif key == "diag":
                    diag_rows.append([float(v) for v in value.split(",")])
                else:
                    meta[key] = value
                continue
            if line == "t,x,species_index,value":
                data_started = True
                continue
            if not data_started:
                raise RecordFormatError(f"unexpected line before column header: {line!r}")
            parts = line.split(",")
            if len(parts) != 4:
                raise RecordFormatError(f"malformed data row: {line!r}")
            t, _x, s, v = float(parts[0]), parts[1], int(parts[2]), float(parts[3])
            if current_t is None or t != current_t:
                if current is not None:
                    frames.append(current)
                current_t = t
                times.append(t)
                current = []
            current.append((s, v))
        if current is not None:
            frames.append(current)

    for key in ("M", "L", "N"):
        if key not in meta:
            raise RecordFormatError(f"record header missing {key}")
    M, L, N = int(meta["M"]), float(meta["L"]), int(meta["N"])
    n_frames = len(frames)
    values = np.empty((n_frames, N, M))
    for fi, rows in enumerate(frames):
        if len(rows) != N * M:
            raise RecordFormatError(
                f"frame {fi} has {len(rows)} rows, expected {N * M} (truncated file?)"
            )
        for idx, (s, v) in enumerate(rows):
            if s != idx // M:
                raise RecordFormatError(
                    f"frame {fi}: species index {s} out of order at row {idx}"
                )
            values[fi, s, idx % M] = v

    seed_raw = meta.get("seed", "none")
    config = json.loads(meta["config"]) if "config" in meta else {}
    diag = np.asarray(diag_rows, dtype=np.float64) if diag_rows else (
        np.empty((0, len(diag_columns))) if diag_columns else None)
    return SimulationRecord(
        M=M, L=L, N=N,
        times=np.asarray(times), frames=values,
        seed=None if seed_raw == "none" else int(seed_raw),
        config=config,
        diag_columns=diag_columns,
        diagnostics=diag,
        version=meta.get("version", "unknown"),
    )


def _write_binary(record: SimulationRecord, path) -> None:
    header = json.dumps({
        "version": record.version,
        "seed": record.seed,
        "M": record.M,
        "L": record.L,
        "N": record.N,
        "config": record.config,
        "diag_columns": record.diag_columns,
    }, sort_keys=True).encode("utf-8")
    diag = record.diagnostics if record.diagnostics is not None else np.empty((0, 0))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", BINARY_VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(struct.pack("<I", diag.shape[1]))
        fh.write(struct.pack("<Q", diag.shape[0]))
        fh.write(diag.astype("<f8").tobytes())
        fh.write(struct.pack("<Q", len(record.times)))
        for t, frame in zip(record.times, record.frames):
            fh.write(struct.pack("<d", t))
            fh.write(frame.astype("<f8").tobytes())


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise RecordFormatError(f"truncated record: wanted {n} bytes, got {len(data)}")
    return data


def _read_binary(path) -> SimulationRecord:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise RecordFormatError("bad magic bytes; not a binary aggdiff record")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != BINARY_VERSION:
            raise RecordFormatError(
                f"unsupported binary record version {version} (expected {BINARY_VERSION})"
            )
        (hlen,) = struct.unpack("<I", _read_exact(fh, 4))
        header = json.loads(_read_exact(fh, hlen).decode("utf-8"))
        (dcols,) = struct.unpack("<I", _read_exact(fh, 4))
        (drows,) = struct.unpack("<Q", _read_exact(fh, 8))
        diag = np.frombuffer(_read_exact(fh, 8 * dcols * drows), dtype="<f8")
        diag = diag.reshape(drows, dcols).copy() if dcols else None
        (nframes,) = struct.unpack("<Q", _read_exact(fh, 8))
        M, N = header["M"], header["N"]
        times = np.empty(nframes)
        frames = np.empty((nframes, N, M))
        for fi in range(nframes):
            (times[fi],) = struct.unpack("<d", _read_exact(fh, 8))
            raw = np.frombuffer(_read_exact(fh, 8 * N * M), dtype="<f8")
            frames[fi] = raw.reshape(N, M)
    return SimulationRecord(
        M=M, L=header["L"], N=N,
        times=times, frames=frames,
        seed=header.get("seed"),
        config=header.get("config") or {},
        diag_columns=header.get("diag_columns") or [],
        diagnostics=diag,
        version=header.get("version", "unknown"),
    )
