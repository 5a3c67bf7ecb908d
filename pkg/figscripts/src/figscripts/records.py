"""Reader for the solver's CSV record format.

The format (text, UTF-8): a sentinel first line ``# aggdiff-record v1``,
then ``# key=value`` header lines (keys: version, seed, M, L, N, optional
config as single-line JSON, optional diag-columns / diag rows), then the
column header ``t,x,species_index,value`` and data rows ordered frame by
frame with strictly increasing t, species-major then grid-index inside a
frame. Values carry 17 significant digits and round-trip doubles exactly.

This module is intentionally independent of the solver package: it parses
the documented file layout and nothing else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SENTINEL = "# aggdiff-record v1"


class RecordError(ValueError):
    """Malformed or truncated record file."""


@dataclass
class Record:
    M: int
    L: float
    N: int
    times: np.ndarray            # (n_frames,)
    frames: np.ndarray           # (n_frames, N, M)
    meta: dict = field(default_factory=dict)
    diag_columns: list = field(default_factory=list)
    diagnostics: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.M) * (self.L / self.M)

    def final_profile(self, species: int) -> np.ndarray:
        if not len(self.times):
            raise RecordError("record has no frames")
        return self.frames[-1, species]


def read_record(path) -> Record:
    meta: dict = {}
    diag_columns: list = []
    diag_rows: list = []
    rows: list = []
    times: list = []
    frame_sizes: list = []
    data_started = False
    current_t = None
    count = 0

    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SENTINEL:
            raise RecordError(f"not a solver record: first line {first!r}")
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
                raise RecordError(f"unexpected line before column header: {line!r}")
            parts = line.split(",")
            if len(parts) != 4:
                raise RecordError(f"malformed data row: {line!r}")
            t = float(parts[0])
            if current_t is None or t != current_t:
                if current_t is not None:
                    frame_sizes.append(count)
                current_t = t
                times.append(t)
                count = 0
            rows.append(float(parts[3]))
            count += 1
        if current_t is not None:
            frame_sizes.append(count)

    for key in ("M", "L", "N"):
        if key not in meta:
            raise RecordError(f"record header missing {key}")
    M, L, N = int(meta["M"]), float(meta["L"]), int(meta["N"])
    for i, size in enumerate(frame_sizes):
        if size != N * M:
            raise RecordError(f"frame {i} has {size} rows, expected {N * M}")
    frames = np.asarray(rows, dtype=np.float64).reshape(len(times), N, M)
    t_arr = np.asarray(times, dtype=np.float64)
    if len(t_arr) > 1 and not np.all(np.diff(t_arr) > 0):
        raise RecordError("frame times are not strictly increasing")

    if "config" in meta:
        try:
            meta["config"] = json.loads(meta["config"])
        except json.JSONDecodeError:
            pass
    diagnostics = np.asarray(diag_rows, dtype=np.float64) if diag_rows else None
    return Record(M=M, L=L, N=N, times=t_arr, frames=frames, meta=meta,
                  diag_columns=diag_columns, diagnostics=diagnostics)
