"""Counter-based random numbers for reproducible parallel Monte Carlo.

Every random draw is a pure function of ``(seed, path, step, tag)``: the
64-bit master seed is the Philox4x32-10 key and the remaining coordinates
form the 128-bit counter. A path therefore produces the same values no
matter which worker generates it or in what order paths are visited.

Normals use a 128-layer ziggurat whose value and layer index come from
separate Philox words; the rare wedge/tail fallbacks draw extra words by
bumping the last counter slot.
"""

import math

import numpy as np
from numba import njit

__all__ = [
    "TAG_BM",
    "TAG_EXACT",
    "TAG_WALK",
    "TAG_WALK_ZERO",
    "TAG_EXCURSION_WALK",
    "TAG_EXCURSION_SIGN",
    "split_seed",
    "philox4x32",
    "uniforms",
    "normals",
]

# stream tags, one per consumer so samplers never share draws
TAG_BM = 1
TAG_EXACT = 2
TAG_WALK = 3
TAG_WALK_ZERO = 4
TAG_EXCURSION_WALK = 5
TAG_EXCURSION_SIGN = 6

INV_2_32 = 2.0**-32


def split_seed(seed):
    """Return the Philox key words for a 64-bit master seed."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32)


@njit(inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    # uint64 lanes carrying 32-bit values; avoids numba's uint32 promotion
    for _ in range(10):
        p0 = c0 * np.uint64(0xD2511F53)
        p1 = c2 * np.uint64(0xCD9E8D57)
        n0 = (p1 >> np.uint64(32)) ^ c1 ^ k0
        n2 = (p0 >> np.uint64(32)) ^ c3 ^ k1
        c1 = p1 & np.uint64(0xFFFFFFFF)
        c3 = p0 & np.uint64(0xFFFFFFFF)
        c0 = n0
        c2 = n2
        k0 = (k0 + np.uint64(0x9E3779B9)) & np.uint64(0xFFFFFFFF)
        k1 = (k1 + np.uint64(0xBB67AE85)) & np.uint64(0xFFFFFFFF)
    return c0, c1, c2, c3


@njit(inline="always")
def draw(k0, k1, step, path, tag, attempt):
    return philox4x32(
        np.uint64(step), np.uint64(path), np.uint64(tag), np.uint64(attempt), k0, k1
    )


@njit(inline="always")
def to_unit(w):
    """Map a 32-bit word to the open interval (0, 1)."""
    return (float(w) + 0.5) * INV_2_32


@njit(inline="always")
def _signed(w):
    v = np.int64(w)
    if v >= 2147483648:
        v -= 4294967296
    return v


def _ziggurat_tables():
    # Marsaglia & Tsang (2000), 128 layers
    m1 = 2147483648.0
    dn = 3.442619855899
    tn = dn
    vn = 9.91256303526217e-3
    kn = np.zeros(128)
    wn = np.zeros(128)
    fn = np.zeros(128)
    q = vn / math.exp(-0.5 * dn * dn)
    kn[0] = (dn / q) * m1
    kn[1] = 0.0
    wn[0] = q / m1
    wn[127] = dn / m1
    fn[0] = 1.0
    fn[127] = math.exp(-0.5 * dn * dn)
    for i in range(126, 0, -1):
        dn = math.sqrt(-2.0 * math.log(vn / dn + math.exp(-0.5 * dn * dn)))
        kn[i + 1] = (dn / tn) * m1
        tn = dn
        fn[i] = math.exp(-0.5 * dn * dn)
        wn[i] = dn / m1
    return kn, wn, fn


_KN, _WN, _FN = _ziggurat_tables()
_ZIG_R = 3.442619855899


@njit
def _normal_slow(k0, k1, step, path, tag, hz, iz):
    attempt = 1
    while True:
        x = hz * _WN[iz]
        if iz == 0:
            while True:
                a, b, _, _ = draw(k0, k1, step, path, tag, attempt)
                attempt += 1
                x = -math.log(to_unit(a)) / _ZIG_R
                y = -math.log(to_unit(b))
                if y + y >= x * x:
                    break
            return _ZIG_R + x if hz > 0 else -_ZIG_R - x
        a, b, c, _ = draw(k0, k1, step, path, tag, attempt)
        attempt += 1
        if _FN[iz] + to_unit(a) * (_FN[iz - 1] - _FN[iz]) < math.exp(-0.5 * x * x):
            return x
        hz = _signed(b)
        iz = np.int64(c & np.uint64(127))
        if abs(hz) < _KN[iz]:
            return hz * _WN[iz]


@njit(inline="always")
def normal_and_word(k0, k1, step, path, tag):
    """Standard normal for this counter plus one spare uniform word."""
    w0, w1, w2, _ = draw(k0, k1, step, path, tag, 0)
    hz = _signed(w0)
    iz = np.int64(w1 & np.uint64(127))
    if abs(hz) < _KN[iz]:
        return hz * _WN[iz], w2
    return _normal_slow(k0, k1, step, path, tag, hz, iz), w2


@njit(cache=True)
def _uniforms(k0, k1, path, tag, n):
    out = np.empty(n)
    for i in range(n):
        w, _, _, _ = draw(k0, k1, i, path, tag, 0)
        out[i] = to_unit(w)
    return out


@njit(cache=True)
def _normals(k0, k1, path, tag, n):
    out = np.empty(n)
    for i in range(n):
        z, _ = normal_and_word(k0, k1, i, path, tag)
        out[i] = z
    return out


def uniforms(seed, path, tag, n):
    """``n`` uniforms on (0, 1) at steps ``0..n-1`` of one stream."""
    k0, k1 = split_seed(seed)
    return _uniforms(k0, k1, path, tag, n)


def normals(seed, path, tag, n):
    """``n`` standard normals at steps ``0..n-1`` of one stream."""
    k0, k1 = split_seed(seed)
    return _normals(k0, k1, path, tag, n)
