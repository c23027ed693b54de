"""Point estimates with across-path standard errors."""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["EstimateWithError", "ratio_of_means", "difference", "verdict_consistent",
           "verdict_separated", "PASS", "FAIL", "INCONCLUSIVE"]

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

# pre-registered multipliers: consistency within 3 SE, separation beyond 5 SE
CONSISTENCY_SE = 3.0
SEPARATION_SE = 5.0


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    n_replicates: int
    window: float = None
    resolution_warning: bool = False

    def __post_init__(self):
        if not math.isfinite(self.std_error) or self.std_error < 0:
            raise ValueError(f"std_error must be finite and >= 0, got {self.std_error}")
        if self.std_error > 0 and self.n_replicates < 2:
            raise ValueError("a nonzero std_error needs at least two replicates")

    @classmethod
    def from_samples(cls, samples, window=None, resolution_warning=False):
        x = np.asarray(samples, dtype=float).ravel()
        n = x.size
        se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(float(x.mean()), se, n, window, resolution_warning)

    @classmethod
    def exact(cls, value, window=None):
        return cls(float(value), 0.0, 1, window)

    def z_score(self, target):
        if self.std_error == 0:
            return 0.0 if self.value == target else math.copysign(math.inf, self.value - target)
        return (self.value - target) / self.std_error

    def within(self, target, k=CONSISTENCY_SE):
        return abs(self.value - target) <= k * self.std_error

    def __iter__(self):
        yield self.value
        yield self.std_error


def ratio_of_means(num, den, window=None, resolution_warning=False):
    """``mean(num) / mean(den)`` with a delta-method standard error."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    n = num.size
    m_den = den.mean()
    r = num.mean() / m_den
    infl = (num - r * den) / m_den
    se = float(infl.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EstimateWithError(float(r), se, n, window, resolution_warning)


def difference(a, b):
    """Difference of two independent estimates."""
    return EstimateWithError(a.value - b.value, math.hypot(a.std_error, b.std_error),
                             min(a.n_replicates, b.n_replicates))


def verdict_consistent(est, target, k=CONSISTENCY_SE):
    return PASS if est.within(target, k) else FAIL


def verdict_separated(est, expected_sign, k=SEPARATION_SE):
    """PASS when ``est`` has the expected sign beyond ``k`` SE, FAIL when it is
    significantly of the wrong sign, INCONCLUSIVE otherwise."""
    z = est.z_score(0.0) * expected_sign
    if z > k:
        return PASS
    if z < -CONSISTENCY_SE:
        return FAIL
    return INCONCLUSIVE
