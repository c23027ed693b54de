"""Sample paths of Brownian motion, skew Brownian motion and the natural diffusion.

Three skew-BM generators are provided and agree in law:

* ``SKEW_WALK``: the lattice walk that steps up from 0 with probability
  ``alpha`` and is symmetric elsewhere, rescaled so that time step = eps**2.
* ``EXCURSION_FLIP``: a reflected simple walk whose excursions away from 0
  receive independent signs, +1 with probability ``alpha``.
* ``EXACT_STEP``: one-step sampling from the exact skew-BM transition law,
  valid at any step size.

Every path is addressed by ``(seed, path_index)``; its draws come from the
counter-based generator in :mod:`skewdiff.rng`, so batches can be split
across any number of workers without changing a single bit.
"""

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng
from .model import InterfaceModel, SkewParam, sigma_inverse

__all__ = [
    "Scheme",
    "Path",
    "PathBatch",
    "WalkConfig",
    "LatticeAlignmentError",
    "WorkerError",
    "BMSampler",
    "SkewBMSampler",
    "NaturalSampler",
    "simulate_bm",
    "simulate_skew_walk",
    "simulate_excursion_flip",
    "simulate_skew_bm_exact",
    "simulate_natural_diffusion",
    "walk_transition",
    "excursion_intervals",
    "uniform_grid",
    "check_time_grid",
    "resolve_workers",
    "map_blocks",
    "map_paths",
]

WORKERS_ENV = "SKEWDIFF_WORKERS"


class Scheme(str, enum.Enum):
    EXCURSION_FLIP = "excursion-flip"
    SKEW_WALK = "skew-walk"
    EXACT_STEP = "exact-step"
    BROWNIAN = "brownian"

    @property
    def on_lattice(self):
        return self in (Scheme.EXCURSION_FLIP, Scheme.SKEW_WALK)


class LatticeAlignmentError(ValueError):
    """A position or grid is not aligned with the walk lattice."""


class WorkerError(RuntimeError):
    """A block of paths failed; no partial result is returned."""


@dataclass(frozen=True, eq=False)
class Path:
    times: np.ndarray
    positions: np.ndarray
    origin: float
    seed: int
    scheme: Scheme
    path_index: int = 0

    def __post_init__(self):
        if len(self.times) != len(self.positions) or len(self.times) < 1:
            raise ValueError("times and positions must have the same nonzero length")
        if self.times[0] != 0.0:
            raise ValueError("paths start at time 0")

    @property
    def horizon(self):
        return float(self.times[-1])

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True, eq=False)
class PathBatch:
    """Paths ``first_index .. first_index + n_paths - 1`` on a shared grid."""

    times: np.ndarray
    positions: np.ndarray
    origin: float
    seed: int
    scheme: Scheme
    first_index: int = 0

    def __post_init__(self):
        if self.positions.ndim != 2 or self.positions.shape[1] != len(self.times):
            raise ValueError("positions must be (n_paths, n_times)")

    @property
    def n_paths(self):
        return self.positions.shape[0]

    @property
    def horizon(self):
        return float(self.times[-1])

    def path(self, i):
        return Path(
            self.times, self.positions[i], self.origin, self.seed, self.scheme,
            self.first_index + i,
        )

    def __iter__(self):
        return (self.path(i) for i in range(self.n_paths))


@dataclass(frozen=True)
class WalkConfig:
    epsilon: float
    n_steps: int

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.n_steps) < 0:
            raise ValueError("n_steps must be non-negative")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def time_step(self):
        return self.epsilon**2

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.time_step

    @classmethod
    def for_horizon(cls, epsilon, t):
        return cls(epsilon, int(round(t / epsilon**2)))


def check_time_grid(t_grid):
    t = np.ascontiguousarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 1:
        raise ValueError("time grid must be a non-empty 1-D array")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("time grid must be strictly increasing")
    return t


def uniform_grid(t, dt):
    """``[0, dt, ..., t]`` with the step adjusted so the horizon is hit exactly."""
    if t == 0:
        return np.zeros(1)
    n = max(1, int(round(t / dt)))
    return np.linspace(0.0, t, n + 1)


def walk_transition(position, alpha):
    """``(P(up), P(down))`` for the skew random walk at a lattice site."""
    alpha = SkewParam(float(alpha)).alpha
    if position == 0:
        return alpha, 1.0 - alpha
    return 0.5, 0.5


# ---------------------------------------------------------------- kernels


@njit(inline="always")
def skew_step(x, z, u, alpha, h):
    """Advance skew BM by ``h`` given a normal ``z`` and a uniform ``u``.

    Works on the positive side (mirroring for x <= 0): the free Gaussian
    endpoint is kept unless the path crossed zero, visibly or with the
    reflection-principle probability exp(-2 x y / h); after a crossing the
    sign is redrawn, positive with probability alpha.
    """
    if x > 0.0:
        a = alpha
        s = 1.0
    else:
        a = 1.0 - alpha
        s = -1.0
        x = -x
    y = x + math.sqrt(h) * z
    if y > 0.0:
        e = 2.0 * x * y / h
        if e > 40.0:
            return s * y
        p = math.exp(-e)
        if u >= p:
            return s * y
        u = u / p
    m = abs(y)
    if u < a:
        return s * m
    return -s * m


@njit(nogil=True, cache=True)
def _fill_exact(out, times, x0, alpha, k0, k1, first):
    nb, nt = out.shape
    for r in range(nb):
        p = first + r
        x = x0
        out[r, 0] = x
        for k in range(nt - 1):
            z, w = rng.normal_and_word(k0, k1, k, p, rng.TAG_EXACT)
            x = skew_step(x, z, rng.to_unit(w), alpha, times[k + 1] - times[k])
            out[r, k + 1] = x


@njit(nogil=True, cache=True)
def _fill_bm(out, times, x0, d, k0, k1, first):
    nb, nt = out.shape
    for r in range(nb):
        p = first + r
        x = x0
        out[r, 0] = x
        for k in range(nt - 1):
            z, _ = rng.normal_and_word(k0, k1, k, p, rng.TAG_BM)
            x += math.sqrt(d * (times[k + 1] - times[k])) * z
            out[r, k + 1] = x


@njit(inline="always")
def _coin(words, k):
    slot = (k % 128) // 32
    if slot == 0:
        w = words[0]
    elif slot == 1:
        w = words[1]
    elif slot == 2:
        w = words[2]
    else:
        w = words[3]
    return (w >> np.uint64(k % 32)) & np.uint64(1)


@njit(nogil=True, cache=True)
def _fill_skew_walk(out, j0, alpha, k0, k1, first):
    nb, nt = out.shape
    for r in range(nb):
        p = first + r
        j = j0
        out[r, 0] = j
        words = rng.draw(k0, k1, 0, p, rng.TAG_WALK, 0)
        for k in range(nt - 1):
            if k % 128 == 0:
                words = rng.draw(k0, k1, k // 128, p, rng.TAG_WALK, 0)
            if j == 0:
                w, _, _, _ = rng.draw(k0, k1, k, p, rng.TAG_WALK_ZERO, 0)
                j = 1 if rng.to_unit(w) < alpha else -1
            elif _coin(words, k):
                j += 1
            else:
                j -= 1
            out[r, k + 1] = j


@njit(nogil=True, cache=True)
def _fill_excursion_flip(out, j0, alpha, k0, k1, first):
    nb, nt = out.shape
    for r in range(nb):
        p = first + r
        # reflected simple walk |W|
        m = abs(j0)
        out[r, 0] = m
        words = rng.draw(k0, k1, 0, p, rng.TAG_EXCURSION_WALK, 0)
        for k in range(nt - 1):
            if k % 128 == 0:
                words = rng.draw(k0, k1, k // 128, p, rng.TAG_EXCURSION_WALK, 0)
            if m == 0:
                m = 1
            elif _coin(words, k):
                m += 1
            else:
                m -= 1
            out[r, k + 1] = m
        # excursion J_n starts where |W| leaves 0; the n-th one gets sign A_n
        sign = 1 if j0 > 0 else -1
        n_exc = 0
        for k in range(nt):
            if out[r, k] == 0:
                continue
            if k > 0 and out[r, k - 1] == 0:
                w, _, _, _ = rng.draw(k0, k1, n_exc, p, rng.TAG_EXCURSION_SIGN, 0)
                sign = 1 if rng.to_unit(w) < alpha else -1
                n_exc += 1
            out[r, k] *= sign


def excursion_intervals(reflected):
    """Maximal index runs ``[start, stop)`` where a lattice path is nonzero."""
    nz = np.asarray(reflected) != 0
    edges = np.diff(np.concatenate(([0], nz.astype(np.int8), [0])))
    return list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))


# --------------------------------------------------------------- samplers


def _lattice_origin(x0, eps):
    j0 = x0 / eps
    j = int(round(j0))
    if abs(j0 - j) > 1e-9 * max(1.0, abs(j0)):
        raise LatticeAlignmentError(f"origin {x0} is not a multiple of the lattice spacing {eps}")
    return j


def _lattice_step(times):
    if len(times) < 2:
        return 1.0
    h = times[1] - times[0]
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=0.0):
        raise LatticeAlignmentError("lattice schemes need a uniform time grid")
    return h


@dataclass(frozen=True, eq=False)
class BMSampler:
    """Brownian motion with diffusivity ``d`` (zero drift)."""

    d: float
    t_grid: np.ndarray
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t_grid", check_time_grid(self.t_grid))
        if not self.d > 0:
            raise ValueError("diffusivity must be positive")

    @property
    def n_times(self):
        return len(self.t_grid)

    def batch(self, seed, start, stop):
        k0, k1 = rng.split_seed(seed)
        out = np.empty((stop - start, self.n_times))
        _fill_bm(out, self.t_grid, float(self.x0), float(self.d), k0, k1, start)
        return PathBatch(self.t_grid, out, float(self.x0), int(seed), Scheme.BROWNIAN, start)


@dataclass(frozen=True, eq=False)
class SkewBMSampler:
    """Skew BM with transmission probability ``alpha`` started at ``x0``.

    Lattice schemes take ``eps = sqrt(dt)`` from the (uniform) grid.
    """

    alpha: float
    t_grid: np.ndarray
    x0: float = 0.0
    scheme: Scheme = Scheme.EXACT_STEP

    def __post_init__(self):
        object.__setattr__(self, "alpha", SkewParam(float(self.alpha)).alpha)
        object.__setattr__(self, "t_grid", check_time_grid(self.t_grid))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.BROWNIAN:
            raise ValueError("use BMSampler for plain Brownian motion")
        if self.scheme.on_lattice:
            eps = math.sqrt(_lattice_step(self.t_grid))
            object.__setattr__(self, "_eps", eps)
            object.__setattr__(self, "_j0", _lattice_origin(float(self.x0), eps))

    @property
    def n_times(self):
        return len(self.t_grid)

    @property
    def epsilon(self):
        return getattr(self, "_eps", None)

    def lattice_batch(self, seed, start, stop):
        """Integer lattice positions (lattice schemes only)."""
        k0, k1 = rng.split_seed(seed)
        out = np.empty((stop - start, self.n_times), dtype=np.int64)
        fill = _fill_skew_walk if self.scheme is Scheme.SKEW_WALK else _fill_excursion_flip
        fill(out, self._j0, self.alpha, k0, k1, start)
        return out

    def batch(self, seed, start, stop):
        if self.scheme.on_lattice:
            pos = self.lattice_batch(seed, start, stop) * self._eps
        else:
            k0, k1 = rng.split_seed(seed)
            pos = np.empty((stop - start, self.n_times))
            _fill_exact(pos, self.t_grid, float(self.x0), self.alpha, k0, k1, start)
        return PathBatch(self.t_grid, pos, float(self.x0), int(seed), self.scheme, start)


@dataclass(frozen=True, eq=False)
class NaturalSampler:
    """Natural diffusion ``sigma(B_alpha)`` started at ``y0``."""

    model: InterfaceModel
    t_grid: np.ndarray
    y0: float = 0.0
    scheme: Scheme = Scheme.EXACT_STEP
    alpha: float = None

    def __post_init__(self):
        # alpha may be decoupled from the model (martingale iff test)
        alpha = self.model.alpha if self.alpha is None else self.alpha
        base = SkewBMSampler(alpha, self.t_grid, float(sigma_inverse(self.model.medium, self.y0)),
                             self.scheme)
        object.__setattr__(self, "alpha", base.alpha)
        object.__setattr__(self, "t_grid", base.t_grid)
        object.__setattr__(self, "scheme", base.scheme)
        object.__setattr__(self, "base", base)

    @property
    def n_times(self):
        return len(self.t_grid)

    def batch(self, seed, start, stop):
        b = self.base.batch(seed, start, stop)
        m = self.model.medium
        y = b.positions
        y *= np.where(y > 0.0, m.sqrt_plus, m.sqrt_minus)  # sigma, in place
        return PathBatch(self.t_grid, y, float(self.y0), int(seed), self.scheme, start)


# ------------------------------------------------------------ single paths


def simulate_bm(d, t_grid, x0=0.0, seed=0, path_index=0):
    return BMSampler(d, t_grid, x0).batch(seed, path_index, path_index + 1).path(0)


def _walk_grid(cfg):
    return cfg.times


def simulate_skew_walk(alpha, cfg, seed=0, path_index=0, origin=0.0):
    s = SkewBMSampler(float(alpha), _walk_grid(cfg), origin, Scheme.SKEW_WALK)
    return s.batch(seed, path_index, path_index + 1).path(0)


def simulate_excursion_flip(alpha, cfg, seed=0, path_index=0, origin=0.0):
    s = SkewBMSampler(float(alpha), _walk_grid(cfg), origin, Scheme.EXCURSION_FLIP)
    return s.batch(seed, path_index, path_index + 1).path(0)


def simulate_skew_bm_exact(alpha, t_grid, x0=0.0, seed=0, path_index=0):
    s = SkewBMSampler(float(alpha), t_grid, x0, Scheme.EXACT_STEP)
    return s.batch(seed, path_index, path_index + 1).path(0)


def simulate_natural_diffusion(model, t_grid, y0=0.0, seed=0, scheme=Scheme.EXACT_STEP,
                               path_index=0):
    s = NaturalSampler(model, t_grid, y0, scheme)
    return s.batch(seed, path_index, path_index + 1).path(0)


# ---------------------------------------------------------------- parallel


def resolve_workers(workers=None):
    if workers is None:
        workers = os.environ.get(WORKERS_ENV, 1)
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


def default_block_size(n_times):
    # ~16 MB of float64 per block; a function of the grid only, never of workers
    return int(min(1024, max(1, 2**21 // max(1, n_times))))


def map_blocks(job, n_paths, workers=None, block_size=1024):
    """Run ``job(start, stop)`` over a fixed partition of path indices.

    Results are concatenated in path order, so the output is independent of
    the worker count.
    """
    n_paths = int(n_paths)
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    bounds = [(s, min(s + block_size, n_paths)) for s in range(0, n_paths, block_size)]

    def run(b):
        try:
            return np.asarray(job(*b))
        except Exception as exc:
            raise WorkerError(f"paths {b[0]}..{b[1] - 1} failed: {exc}") from exc

    workers = resolve_workers(workers)
    if workers == 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    out = np.concatenate(parts, axis=0)
    if out.shape[0] != n_paths:
        raise WorkerError(f"expected {n_paths} results, got {out.shape[0]}")
    return out


def map_paths(fold, sampler, n_paths, seed, workers=None, block_size=None):
    """Apply a per-path ``fold(PathBatch) -> array`` to ``n_paths`` paths."""
    bs = block_size or default_block_size(sampler.n_times)
    return map_blocks(lambda s, e: fold(sampler.batch(seed, s, e)), n_paths, workers, bs)
