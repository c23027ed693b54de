"""Window estimators of local time and occupation along sampled paths.

All estimators are left-endpoint Riemann sums over the path's time grid.
Windows are half-open ``(lo, hi]`` so that a position sitting exactly on a
level is counted on its minus side, the same convention used for ``sigma``
and ``D(x)``.

Functions accept either a single :class:`~skewdiff.paths.Path` (returning
plain numbers) or a :class:`~skewdiff.paths.PathBatch` (returning one value
per path, or across-path estimates with standard errors).
"""

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import MediumSpec, diffusivity
from .paths import NaturalSampler, PathBatch, Scheme, map_paths, uniform_grid
from .stats import EstimateWithError, ratio_of_means

__all__ = [
    "Weight",
    "Kind",
    "LocalTimePair",
    "StepFunction",
    "occupation_measure",
    "mathematical_local_time",
    "natural_local_time",
    "local_time_profile",
    "occupation_localtime_consistency",
    "quadratic_variation",
    "integrated_diffusivity",
    "local_time_monte_carlo",
    "local_time_continuity_gap",
    "expected_natural_ratio",
    "write_local_time_csv",
    "interface_local_times",
]


class Weight(str, enum.Enum):
    TIME = "time"
    QUADRATIC_VARIATION = "quadratic-variation"


class Kind(str, enum.Enum):
    MATHEMATICAL = "mathematical"
    NATURAL = "natural"


_UNIT_MEDIUM = MediumSpec(1.0, 1.0)


def _grid(path):
    pos = np.asarray(path.positions, dtype=float)
    batch = pos.ndim == 2
    return np.asarray(path.times, dtype=float), (pos if batch else pos[None, :]), batch


def _unwrap(values, batch):
    return values if batch else float(values[0])


def _step_weights(times, pos, weight, medium):
    h = np.diff(times)
    if Weight(weight) is Weight.TIME:
        return np.broadcast_to(h, (pos.shape[0], h.size))
    medium = medium or _UNIT_MEDIUM
    return diffusivity(medium, pos[:, :-1]) * h


def occupation_measure(path, window, weight=Weight.TIME, medium=None):
    """Time (or quadratic variation) spent in ``(lo, hi]`` up to the horizon."""
    lo, hi = window
    times, pos, batch = _grid(path)
    if not hi > lo or len(times) < 2:
        return _unwrap(np.zeros(pos.shape[0]), batch)
    left = pos[:, :-1]
    inside = (left > lo) & (left <= hi)
    w = _step_weights(times, pos, weight, medium)
    return _unwrap((inside * w).sum(axis=1), batch)


def _resolution(times, medium):
    if len(times) < 2:
        return 0.0
    medium = medium or _UNIT_MEDIUM
    return math.sqrt(max(medium.d_minus, medium.d_plus) * float(np.max(np.diff(times))))


@dataclass(frozen=True)
class LocalTimePair:
    plus: EstimateWithError
    minus: EstimateWithError
    kind: Kind
    plus_samples: np.ndarray = field(default=None, repr=False, compare=False)
    minus_samples: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.plus.window != self.minus.window:
            raise ValueError("one-sided estimates must share a window")

    @property
    def window(self):
        return self.plus.window

    @property
    def value(self):
        """Two-sided local time, the mean of the one-sided ones."""
        if self.plus_samples is not None:
            return EstimateWithError.from_samples(
                0.5 * (self.plus_samples + self.minus_samples), self.window)
        return EstimateWithError.exact(0.5 * (self.plus.value + self.minus.value), self.window)

    def ratio(self):
        """plus / minus as a ratio of across-path means."""
        if self.plus_samples is None:
            return EstimateWithError.exact(self.plus.value / self.minus.value, self.window)
        return ratio_of_means(self.plus_samples, self.minus_samples, self.window)

    def gap(self):
        """``(plus - minus) / ((plus + minus) / 2)``; zero iff continuous."""
        if self.plus_samples is None:
            p, m = self.plus.value, self.minus.value
            return EstimateWithError.exact(2.0 * (p - m) / (p + m), self.window)
        p, m = self.plus_samples, self.minus_samples
        return ratio_of_means(2.0 * (p - m), p + m, self.window)


def _pair(plus, minus, eps, kind, warn, batch):
    if batch:
        return LocalTimePair(
            EstimateWithError.from_samples(plus, eps, warn),
            EstimateWithError.from_samples(minus, eps, warn),
            kind, np.asarray(plus), np.asarray(minus))
    return LocalTimePair(EstimateWithError(float(plus), 0.0, 1, eps, warn),
                         EstimateWithError(float(minus), 0.0, 1, eps, warn), kind)


def _one_sided(path, a, eps, weight, medium):
    if not eps > 0:
        raise ValueError("window_eps must be positive")
    plus = occupation_measure(path, (a, a + eps), weight, medium)
    minus = occupation_measure(path, (a - eps, a), weight, medium)
    return np.divide(plus, eps), np.divide(minus, eps)


def mathematical_local_time(path, a=0.0, window_eps=0.01, medium=None):
    """One-sided local times weighted by quadratic variation ``D(X) ds``.

    ``medium=None`` means unit diffusivity (standard or skew BM).
    """
    plus, minus = _one_sided(path, a, window_eps, Weight.QUADRATIC_VARIATION, medium)
    warn = window_eps < _resolution(path.times, medium)
    return _pair(plus, minus, window_eps, Kind.MATHEMATICAL, warn, isinstance(path, PathBatch))


def natural_local_time(path, a=0.0, window_eps=0.01, medium=None):
    """One-sided local times weighted by elapsed time (units T/L).

    ``medium`` only feeds the resolution check.
    """
    plus, minus = _one_sided(path, a, window_eps, Weight.TIME, None)
    warn = window_eps < _resolution(path.times, medium)
    return _pair(plus, minus, window_eps, Kind.NATURAL, warn, isinstance(path, PathBatch))


def local_time_profile(path, window_eps, medium=None):
    """Mathematical local-time density on bins ``(k eps, (k+1) eps]``.

    Returns bin midpoints and the estimate on each bin (single path).
    """
    times, pos, _ = _grid(path)
    x = pos[0, :-1]
    k = np.ceil(x / window_eps).astype(np.int64) - 1
    w = _step_weights(times, pos, Weight.QUADRATIC_VARIATION, medium)[0]
    k_min = int(k.min())
    occ = np.bincount(k - k_min, weights=w)
    mids = (np.arange(occ.size) + k_min + 0.5) * window_eps
    return mids, occ / window_eps


@dataclass(frozen=True)
class StepFunction:
    """``values[i]`` on ``(breaks[i-1], breaks[i]]`` with open ends at +-inf."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need one more value than breakpoints")
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breakpoints must increase")

    def __call__(self, x):
        idx = np.searchsorted(np.asarray(self.breaks, dtype=float), x, side="left")
        return np.asarray(self.values, dtype=float)[idx]

    @classmethod
    def constant(cls, c=1.0):
        return cls((), (c,))

    @classmethod
    def indicator_positive(cls):
        return cls((0.0,), (0.0, 1.0))


def occupation_localtime_consistency(path, g, medium=None, window_eps=0.01):
    """Both sides of the occupation-time formula for a step function ``g``.

    Left: ``sum g(X) D(X) dt`` along the path. Right: ``sum g(a) * l(a) * eps``
    over the local-time profile on an eps-grid anchored at 0.
    """
    times, pos, _ = _grid(path)
    w = _step_weights(times, pos, Weight.QUADRATIC_VARIATION, medium)[0]
    left = float(np.sum(g(pos[0, :-1]) * w))
    mids, prof = local_time_profile(path, window_eps, medium)
    right = float(np.sum(g(mids) * prof * window_eps))
    return left, right


def quadratic_variation(path):
    """Realised quadratic variation ``sum (dX)^2``."""
    _, pos, batch = _grid(path)
    return _unwrap(np.sum(np.diff(pos, axis=1) ** 2, axis=1), batch)


def integrated_diffusivity(path, medium):
    """``int D(X_s) ds``, the predicted quadratic variation."""
    times, pos, batch = _grid(path)
    w = _step_weights(times, pos, Weight.QUADRATIC_VARIATION, medium)
    return _unwrap(w.sum(axis=1), batch)


def local_time_monte_carlo(sampler, a=0.0, window_eps=0.01, kind=Kind.NATURAL, medium=None,
                           n_paths=10_000, seed=0, workers=None):
    """Across-path one-sided local times for any sampler."""
    kind = Kind(kind)
    weight = Weight.TIME if kind is Kind.NATURAL else Weight.QUADRATIC_VARIATION
    qv_medium = None if kind is Kind.NATURAL else medium

    def fold(b):
        plus, minus = _one_sided(b, a, window_eps, weight, qv_medium)
        return np.column_stack([plus, minus])

    res = map_paths(fold, sampler, n_paths, seed, workers)
    warn = window_eps < _resolution(sampler.t_grid, medium)
    return _pair(res[:, 0], res[:, 1], window_eps, kind, warn, True)


def expected_natural_ratio(model, alpha=None):
    """Limit of natural plus/minus local time at 0 for ``sigma(B_alpha)``."""
    a = model.alpha if alpha is None else alpha
    m = model.medium
    return a / (1.0 - a) * m.sqrt_minus / m.sqrt_plus


def local_time_continuity_gap(model, t, window_eps, n_paths, seed, dt=1e-4,
                              scheme=Scheme.EXACT_STEP, workers=None):
    """Relative jump of natural local time at the interface, started at 0."""
    sampler = NaturalSampler(model, uniform_grid(t, dt), 0.0, scheme)
    pair = local_time_monte_carlo(sampler, 0.0, window_eps, Kind.NATURAL, model.medium,
                                  n_paths, seed, workers)
    return pair.gap()


def write_local_time_csv(fileobj, rows):
    """Rows of ``(quantity, a, eps, EstimateWithError)``."""
    w = csv.writer(fileobj, lineterminator="\n")
    w.writerow(["quantity", "a", "eps", "value", "std_error", "n"])
    for quantity, a, eps, est in rows:
        w.writerow([quantity, repr(float(a)), repr(float(eps)), repr(est.value),
                    repr(est.std_error), est.n_replicates])


def interface_local_times(model, t, dt, window_eps, n_paths, seed, workers=None):
    """Mathematical local time of ``B_alpha`` and natural local time of
    ``Y = sigma(B_alpha)`` at 0, both from the same paths started at 0.

    Returns ``(mathematical_pair, natural_pair)``. The natural windows
    ``(0, eps]`` and ``(-eps, 0]`` for ``Y`` are the ``B`` windows
    ``(0, eps/sqrt(D+)]`` and ``(-eps/sqrt(D-), 0]``.
    """
    if not window_eps > 0:
        raise ValueError("window_eps must be positive")
    m = model.medium
    sampler = NaturalSampler(model, uniform_grid(t, dt), 0.0).base
    e = float(window_eps)

    def fold(b):
        return np.column_stack([
            occupation_measure(b, (0.0, e)) / e,
            occupation_measure(b, (-e, 0.0)) / e,
            occupation_measure(b, (0.0, e / m.sqrt_plus)) / e,
            occupation_measure(b, (-e / m.sqrt_minus, 0.0)) / e,
        ])

    res = map_paths(fold, sampler, n_paths, seed, workers)
    grid = sampler.t_grid
    math_pair = _pair(res[:, 0], res[:, 1], e, Kind.MATHEMATICAL,
                      e < _resolution(grid, None), True)
    nat_pair = _pair(res[:, 2], res[:, 3], e, Kind.NATURAL, e < _resolution(grid, m), True)
    return math_pair, nat_pair
