"""Natural occupation time of the two sides of the interface."""

import csv
from dataclasses import dataclass

import numpy as np

from .model import InterfaceModel, SkewParam, alpha_of_lambda, residence_threshold
from .paths import NaturalSampler, Scheme, SkewBMSampler, map_paths, uniform_grid
from .stats import (CONSISTENCY_SE, FAIL, PASS, EstimateWithError,
                    verdict_separated)

__all__ = [
    "OccupationReport",
    "ResidenceRow",
    "natural_occupation",
    "mean_occupation_closed_form",
    "sign_probability",
    "occupation_report",
    "residence_threshold_test",
    "write_residence_csv",
]

POSITIVE_HALF_LINE = ((0.0, np.inf),)


def natural_occupation(path, G=POSITIVE_HALF_LINE):
    """Time spent in ``G``, a union of disjoint half-open intervals ``(lo, hi]``.

    ``G = ((-inf, inf),)`` gives the horizon; an empty ``G`` gives 0.
    """
    pos = np.asarray(path.positions, dtype=float)
    batch = pos.ndim == 2
    pos = pos if batch else pos[None, :]
    h = np.diff(np.asarray(path.times, dtype=float))
    left = pos[:, :-1]
    inside = np.zeros(left.shape, dtype=bool)
    for lo, hi in G:
        inside |= (left > lo) & (left <= hi)
    out = inside @ h if h.size else np.zeros(pos.shape[0])
    return out if batch else float(out[0])


def mean_occupation_closed_form(model, t):
    """Expected time above and below the interface, started at 0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return t * model.alpha, t * (1.0 - model.alpha)


@dataclass(frozen=True)
class OccupationReport:
    t_horizon: float
    gamma_plus: EstimateWithError
    gamma_minus: EstimateWithError
    alpha_used: SkewParam


def sign_probability(alpha, t, n_paths, seed, scheme=Scheme.EXACT_STEP, dt=None, workers=None):
    """Monte Carlo estimate of ``P(B_alpha(t) > 0)`` from ``B_alpha(0) = 0``.

    With the exact scheme and no ``dt`` a single exact step is taken.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    scheme = Scheme(scheme)
    if dt is None:
        if scheme.on_lattice:
            raise ValueError("lattice schemes need dt (= eps**2)")
        grid = np.array([0.0, float(t)])
    else:
        grid = uniform_grid(t, dt)
    sampler = SkewBMSampler(alpha, grid, 0.0, scheme)
    hits = map_paths(lambda b: b.positions[:, -1] > 0.0, sampler, n_paths, seed, workers)
    return EstimateWithError.from_samples(hits.astype(float))


def occupation_report(model, t, dt, n_paths, seed, scheme=Scheme.EXACT_STEP, workers=None,
                      samples=False):
    """Across-path natural occupation of ``(0, inf)`` and its complement.

    Each path's minus-side time is ``t`` minus its plus-side time.
    """
    sampler = NaturalSampler(model, uniform_grid(t, dt), 0.0, scheme)
    gp = map_paths(natural_occupation, sampler, n_paths, seed, workers)
    gm = t - gp
    rep = OccupationReport(float(t), EstimateWithError.from_samples(gp),
                           EstimateWithError.from_samples(gm), model.skew)
    return (rep, gp) if samples else rep


@dataclass(frozen=True)
class ResidenceRow:
    lam: float
    alpha: float
    gamma_plus: EstimateWithError
    gamma_minus: EstimateWithError
    gap: EstimateWithError
    expected_sign: int
    verdict: str


def residence_threshold_test(medium, lambda_grid, t, n_paths, seed, dt=1e-4,
                             scheme=Scheme.EXACT_STEP, workers=None, rtol=1e-9):
    """Sign of ``E[plus time] - E[minus time]`` across a grid of ``lam``.

    Above the threshold ``sqrt(D+)/(sqrt(D+)+sqrt(D-))`` the plus side wins,
    below it the minus side; at the threshold the means are equal.
    Returns ``(threshold, rows)``.
    """
    lam_c = residence_threshold(medium)
    rows = []
    for i, lam in enumerate(lambda_grid):
        model = InterfaceModel(medium, lam)
        # distinct seed per grid point keeps the rows independent
        rep, gp = occupation_report(model, t, dt, n_paths, seed + i, scheme, workers, True)
        gap = EstimateWithError.from_samples(2.0 * gp - t)
        if abs(lam - lam_c) <= rtol * max(1.0, lam_c):
            expected = 0
            verdict = PASS if gap.within(0.0, CONSISTENCY_SE) else FAIL
        else:
            expected = 1 if lam > lam_c else -1
            verdict = verdict_separated(gap, expected)
        rows.append(ResidenceRow(float(lam), alpha_of_lambda(medium, lam).alpha,
                                 rep.gamma_plus, rep.gamma_minus, gap, expected, verdict))
    return lam_c, rows


def write_residence_csv(fileobj, rows):
    w = csv.writer(fileobj, lineterminator="\n")
    w.writerow(["lambda", "alpha", "gamma_plus", "se", "gamma_minus", "se", "verdict"])
    for r in rows:
        w.writerow([repr(r.lam), repr(r.alpha), repr(r.gamma_plus.value),
                    repr(r.gamma_plus.std_error), repr(r.gamma_minus.value),
                    repr(r.gamma_minus.std_error), r.verdict])
