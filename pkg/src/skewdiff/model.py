"""Parameter algebra for a single diffusivity jump at the origin.

A medium is the pair ``(d_minus, d_plus)``. The interface parameter
``lam`` weights the derivative matching condition
``lam * f'(0+) = (1 - lam) * f'(0-)`` and determines the transmission
probability ``alpha`` of the skew Brownian motion that drives the natural
diffusion ``Y = sigma(B_alpha)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterDomainError",
    "MediumSpec",
    "SkewParam",
    "InterfaceModel",
    "alpha_of_lambda",
    "lambda_of_alpha",
    "physical_alpha",
    "physical_lambda",
    "stroock_varadhan_alpha",
    "residence_threshold",
    "sigma_map",
    "sigma_inverse",
    "diffusivity",
    "classify",
]


class ParameterDomainError(ValueError):
    """A parameter lies outside the open interval or positive range required."""


def _check_open_unit(name, value):
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ParameterDomainError(f"{name} must lie in (0, 1), got {value!r}")
    return value


@dataclass(frozen=True)
class MediumSpec:
    d_minus: float
    d_plus: float

    def __post_init__(self):
        for name in ("d_minus", "d_plus"):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterDomainError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def sqrt_minus(self):
        return math.sqrt(self.d_minus)

    @property
    def sqrt_plus(self):
        return math.sqrt(self.d_plus)

    def mirrored(self):
        """The same medium seen with the axis reversed."""
        return MediumSpec(self.d_plus, self.d_minus)


@dataclass(frozen=True)
class SkewParam:
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_open_unit("alpha", self.alpha))

    def __float__(self):
        return self.alpha


def _alpha_value(alpha):
    if isinstance(alpha, SkewParam):
        return alpha.alpha
    return _check_open_unit("alpha", alpha)


def alpha_of_lambda(medium, lam):
    """Transmission probability making the natural diffusion a martingale
    solution for the class ``D_lam``."""
    lam = _check_open_unit("lambda", lam)
    num = lam * medium.sqrt_minus
    return SkewParam(num / (num + (1.0 - lam) * medium.sqrt_plus))


def lambda_of_alpha(medium, alpha):
    a = _alpha_value(alpha)
    num = a * medium.sqrt_plus
    return num / (num + (1.0 - a) * medium.sqrt_minus)


def physical_alpha(medium):
    """Flux-continuity (mass conserving) transmission probability."""
    return SkewParam(medium.sqrt_plus / (medium.sqrt_plus + medium.sqrt_minus))


def physical_lambda(medium):
    return medium.d_plus / (medium.d_plus + medium.d_minus)


def stroock_varadhan_alpha(medium):
    """Transmission probability at ``lam = 1/2`` (derivative continuity)."""
    return SkewParam(medium.sqrt_minus / (medium.sqrt_plus + medium.sqrt_minus))


def residence_threshold(medium):
    """Interface parameter at which mean occupation of both sides is equal."""
    return medium.sqrt_plus / (medium.sqrt_plus + medium.sqrt_minus)


@dataclass(frozen=True)
class InterfaceModel:
    """Medium plus interface parameter; ``alpha`` is always derived."""

    medium: MediumSpec
    lam: float
    alpha: float = field(init=False)

    def __post_init__(self):
        lam = _check_open_unit("lambda", self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", alpha_of_lambda(self.medium, lam).alpha)

    @classmethod
    def physical(cls, medium):
        return cls(medium, physical_lambda(medium))

    @classmethod
    def stroock_varadhan(cls, medium):
        return cls(medium, 0.5)

    @classmethod
    def from_alpha(cls, medium, alpha):
        return cls(medium, lambda_of_alpha(medium, alpha))

    @property
    def skew(self):
        return SkewParam(self.alpha)

    def sigma(self, x):
        return sigma_map(self.medium, x)

    def sigma_inverse(self, y):
        return sigma_inverse(self.medium, y)


def sigma_map(medium, x):
    """Piecewise-linear change of scale taking skew BM to the natural diffusion.

    The origin belongs to the minus branch; both branches give 0 there.
    """
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, medium.sqrt_plus * x, medium.sqrt_minus * x)
    return out[()] if out.ndim == 0 else out


def sigma_inverse(medium, y):
    y = np.asarray(y, dtype=float)
    out = np.where(y > 0.0, y / medium.sqrt_plus, y / medium.sqrt_minus)
    return out[()] if out.ndim == 0 else out


def diffusivity(medium, x):
    """``D(x)`` with the origin assigned to the minus side."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, medium.d_plus, medium.d_minus)
    return out[()] if out.ndim == 0 else out


def classify(medium, lam, rtol=1e-9):
    """Name the natural diffusion selected by ``lam``, if it has one."""
    names = []
    if math.isclose(lam, physical_lambda(medium), rel_tol=rtol, abs_tol=rtol):
        names.append("physical")
    if math.isclose(lam, 0.5, rel_tol=rtol, abs_tol=rtol):
        names.append("Stroock–Varadhan")
    if not names:
        return "natural (unnamed special case: none)"
    return "/".join(names)
