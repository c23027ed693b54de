"""Path serialisation: CSV for single paths, a compact binary format for batches.

Binary layout (all little-endian)::

    magic        8 bytes  b"SKEWPTH1"
    n_paths      uint64
    n_times      uint64
    dt_policy    uint8    0 = uniform grid, 1 = irregular grid
    scheme       uint8    index into SCHEMES
    padding      6 bytes
    seed         uint64
    first_index  uint64
    origin       float64
    times        n_times float64
    positions    n_paths * n_times float64, row-major (one path per row)
"""

import csv
import struct

import numpy as np

from .paths import Path, PathBatch, Scheme

__all__ = ["MAGIC", "SCHEMES", "FormatError", "write_path_csv", "read_path_csv",
           "write_batch", "read_batch"]

MAGIC = b"SKEWPTH1"
SCHEMES = (Scheme.EXCURSION_FLIP, Scheme.SKEW_WALK, Scheme.EXACT_STEP, Scheme.BROWNIAN)
_HEADER = struct.Struct("<8sQQBB6xQQd")
UNIFORM, IRREGULAR = 0, 1


class FormatError(ValueError):
    """Malformed or truncated path file."""


def write_path_csv(fileobj, path):
    w = csv.writer(fileobj, lineterminator="\n")
    w.writerow(["t", "x"])
    for t, x in zip(path.times, path.positions):
        w.writerow([repr(float(t)), repr(float(x))])


def read_path_csv(fileobj, seed=0, scheme=Scheme.EXACT_STEP):
    """Inverse of :func:`write_path_csv`; seed and scheme are not stored in CSV."""
    rows = list(csv.reader(fileobj))
    if not rows or rows[0] != ["t", "x"]:
        raise FormatError("expected header t,x")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, 2)
    return Path(data[:, 0], data[:, 1], float(data[0, 1]) if len(data) else 0.0, seed, scheme)


def _policy(times):
    h = np.diff(times)
    if h.size == 0 or np.ptp(h) <= 1e-12 * h.max():
        return UNIFORM
    return IRREGULAR


def write_batch(fileobj, batch):
    """Write a :class:`PathBatch` to a binary file object."""
    times = np.ascontiguousarray(batch.times, dtype="<f8")
    pos = np.ascontiguousarray(batch.positions, dtype="<f8")
    fileobj.write(_HEADER.pack(MAGIC, pos.shape[0], pos.shape[1], _policy(times),
                               SCHEMES.index(Scheme(batch.scheme)), int(batch.seed),
                               int(batch.first_index), float(batch.origin)))
    fileobj.write(times.tobytes())
    fileobj.write(pos.tobytes())


def read_batch(fileobj):
    head = fileobj.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise FormatError("truncated header")
    magic, n_paths, n_times, policy, scheme, seed, first, origin = _HEADER.unpack(head)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if policy not in (UNIFORM, IRREGULAR) or scheme >= len(SCHEMES):
        raise FormatError("bad header fields")
    body = fileobj.read(8 * n_times * (n_paths + 1))
    if len(body) != 8 * n_times * (n_paths + 1):
        raise FormatError("truncated body")
    arr = np.frombuffer(body, dtype="<f8").astype(float)
    times, pos = arr[:n_times], arr[n_times:].reshape(n_paths, n_times)
    if _policy(times) != policy:
        raise FormatError("time grid does not match its declared dt policy")
    return PathBatch(times, pos, origin, seed, SCHEMES[scheme], first)
