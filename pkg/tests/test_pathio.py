import io

import numpy as np
import pytest

from skewdiff.pathio import (MAGIC, FormatError, read_batch, read_path_csv, write_batch,
                             write_path_csv)
from skewdiff.paths import Path, PathBatch, Scheme


def _batch(times):
    rng = np.random.default_rng(0)
    pos = np.cumsum(rng.standard_normal((3, len(times))), axis=1)
    return PathBatch(np.asarray(times, float), pos, 0.25, 2**63 + 5, Scheme.SKEW_WALK, 17)


@pytest.mark.parametrize("times", [np.linspace(0, 1, 11), np.array([0.0, 0.1, 0.5, 0.55, 2.0])])
def test_batch_round_trip(times):
    b = _batch(times)
    buf = io.BytesIO()
    write_batch(buf, b)
    assert buf.getvalue()[:8] == MAGIC
    buf.seek(0)
    r = read_batch(buf)
    assert np.array_equal(r.times, b.times) and np.array_equal(r.positions, b.positions)
    assert (r.origin, r.seed, r.scheme, r.first_index) == (0.25, 2**63 + 5, Scheme.SKEW_WALK, 17)


def test_batch_bad_magic_and_truncation():
    buf = io.BytesIO()
    write_batch(buf, _batch(np.linspace(0, 1, 5)))
    data = buf.getvalue()
    with pytest.raises(FormatError):
        read_batch(io.BytesIO(b"NOTAPATH" + data[8:]))
    with pytest.raises(FormatError):
        read_batch(io.BytesIO(data[:-8]))
    with pytest.raises(FormatError):
        read_batch(io.BytesIO(data[:20]))


def test_csv_round_trip():
    p = Path(np.array([0.0, 0.1, 0.2]), np.array([0.3, -1e-17, 2.5]), 0.3, 4, Scheme.EXACT_STEP)
    buf = io.StringIO()
    write_path_csv(buf, p)
    assert buf.getvalue().splitlines()[0] == "t,x"
    buf.seek(0)
    r = read_path_csv(buf, seed=4)
    assert np.array_equal(r.times, p.times) and np.array_equal(r.positions, p.positions)
    assert r.origin == 0.3


def test_csv_bad_header():
    with pytest.raises(FormatError):
        read_path_csv(io.StringIO("time,pos\n0,0\n"))
