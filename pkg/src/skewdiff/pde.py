"""Finite differences for ``c_t = D(x) c_xx / 2`` with a lambda interface at 0,
and the Monte Carlo side of the Feynman-Kac duality.

The interface node carries no PDE; its row is the algebraic condition
``lam * c_x(0+) = (1 - lam) * c_x(0-)`` with second-order one-sided
three-point derivatives on each side.
"""

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .model import InterfaceModel, MediumSpec, SkewParam, diffusivity
from .paths import NaturalSampler, Scheme, map_paths, uniform_grid
from .stats import EstimateWithError

__all__ = [
    "DomainClassError",
    "GridError",
    "Boundary",
    "Grid1D",
    "TestFunction",
    "ConcentrationField",
    "solve_interface_pde",
    "feynman_kac_estimate",
    "martingale_drift_test",
    "martingale_drift_sweep",
    "martingale_residual_coefficient",
    "predicted_drift",
    "drift_zero_crossing",
]


class DomainClassError(ValueError):
    """A function does not satisfy the derivative matching condition."""


class GridError(ValueError):
    """Malformed spatial grid."""


class Boundary(str, enum.Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Nodes with one exactly at 0, uniform spacing on each side."""

    x_nodes: np.ndarray
    dt: float

    def __post_init__(self):
        x = np.asarray(self.x_nodes, dtype=float)
        if x.ndim != 1 or x.size < 5 or np.any(np.diff(x) <= 0):
            raise GridError("x_nodes must be strictly increasing with at least 5 nodes")
        hits = np.flatnonzero(x == 0.0)
        if hits.size != 1:
            raise GridError("grid needs a node exactly at 0")
        i0 = int(hits[0])
        if i0 < 2 or i0 > x.size - 3:
            raise GridError("need at least two nodes on each side of 0")
        if not self.dt > 0:
            raise GridError("dt must be positive")
        for side in (x[: i0 + 1], x[i0:]):
            d = np.diff(side)
            if np.ptp(d) > 1e-9 * d[0]:
                raise GridError("spacing must be uniform on each side of 0")
        object.__setattr__(self, "x_nodes", x)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "i0", i0)

    @property
    def dx_left(self):
        return float(-self.x_nodes[self.i0 - 1])

    @property
    def dx_right(self):
        return float(self.x_nodes[self.i0 + 1])

    @property
    def domain(self):
        return float(self.x_nodes[0]), float(self.x_nodes[-1])

    @classmethod
    def uniform(cls, x_min, x_max, dx, dt, dx_right=None):
        """Nodes ``-n dx, ..., 0, ..., m dx_right`` covering ``[x_min, x_max]``."""
        if not (x_min < 0 < x_max and dx > 0):
            raise GridError("need x_min < 0 < x_max and dx > 0")
        dr = dx if dx_right is None else dx_right
        n = int(math.ceil(-x_min / dx - 1e-9))
        m = int(math.ceil(x_max / dr - 1e-9))
        x = np.concatenate([-dx * np.arange(n, 0, -1), [0.0], dr * np.arange(1, m + 1)])
        return cls(x, dt)

    @classmethod
    def for_medium(cls, medium, t, dx, dt, radius_factor=6.0):
        """Symmetric domain of half-width ``radius_factor * sqrt(max(D) t)``."""
        r = radius_factor * math.sqrt(max(medium.d_minus, medium.d_plus) * t)
        return cls.uniform(-r, r, dx, dt)

    def resolution_ratio(self, medium):
        """``max(D) dt / (2 dx^2)``; the scheme is implicit, this is only logged."""
        dx = min(self.dx_left, self.dx_right)
        return max(medium.d_minus, medium.d_plus) * self.dt / (2.0 * dx * dx)


def _const(v):
    # a scalar broadcasts through np.where without allocating a full array
    return lambda x: float(v)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Continuous function, C^2 off 0, given by its two branches.

    ``minus`` applies on ``(-inf, 0]`` and ``plus`` on ``(0, inf)``;
    ``second`` takes the minus branch at 0.
    """

    __test__ = False  # not a pytest class

    minus: object
    plus: object
    slope_minus: float
    slope_plus: float
    second_minus: object
    second_plus: object
    name: str = "f"

    def __post_init__(self):
        a, b = float(self.minus(0.0)), float(self.plus(0.0))
        if abs(a - b) > 1e-12 * max(1.0, abs(a)):
            raise DomainClassError(f"{self.name} is discontinuous at 0: {a} vs {b}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0.0, self.plus(x), self.minus(x))
        return out[()] if out.ndim == 0 else out

    def second(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0.0, self.second_plus(x), self.second_minus(x))
        return out[()] if out.ndim == 0 else out

    def class_residual(self, lam):
        return lam * self.slope_plus - (1.0 - lam) * self.slope_minus

    def in_class(self, lam, tol=1e-12):
        scale = max(1.0, abs(self.slope_plus), abs(self.slope_minus))
        return abs(self.class_residual(lam)) <= tol * scale

    def require_class(self, lam):
        if not self.in_class(lam):
            raise DomainClassError(
                f"{self.name}: lam*f'(0+) - (1-lam)*f'(0-) = {self.class_residual(lam):.3g} != 0")

    @classmethod
    def constant(cls, c=1.0):
        return cls(_const(c), _const(c), 0.0, 0.0, _const(0.0), _const(0.0), f"const({c})")

    @classmethod
    def piecewise_linear(cls, lam, slope_minus=1.0):
        """Slopes chosen so the function lies in the class for ``lam``."""
        sm = float(slope_minus)
        sp = (1.0 - lam) * sm / lam
        return cls(lambda x: sm * x, lambda x: sp * x, sm, sp, _const(0.0), _const(0.0),
                   "piecewise-linear")

    @classmethod
    def piecewise_quadratic(cls, lam, slope_minus=1.0, curv_minus=-1.0, curv_plus=0.5):
        """``s x + c x^2`` on each side, with matched slopes and different curvatures."""
        sm = float(slope_minus)
        sp = (1.0 - lam) * sm / lam
        cm, cp = float(curv_minus), float(curv_plus)
        return cls(lambda x: sm * x + cm * x * x, lambda x: sp * x + cp * x * x, sm, sp,
                   _const(2.0 * cm), _const(2.0 * cp), "piecewise-quadratic")

    @classmethod
    def kinked_gaussian(cls, lam, amplitude=1.0, width=0.5, kink=1.0):
        """Non-negative bump ``A exp(-x^2/2w^2) (1 + s x)^2`` with a side-dependent ``s``."""
        A, w = float(amplitude), float(width)
        s_plus, s_minus = kink * (1.0 - lam), kink * lam

        def branch(s):
            def f(x):
                return A * np.exp(-0.5 * x * x / (w * w)) * (1.0 + s * x) ** 2

            def f2(x):
                g = np.exp(-0.5 * x * x / (w * w))
                g1 = -x / (w * w) * g
                g2 = (x * x / w**4 - 1.0 / (w * w)) * g
                p = (1.0 + s * x) ** 2
                p1 = 2.0 * s * (1.0 + s * x)
                return A * (g2 * p + 2.0 * g1 * p1 + g * 2.0 * s * s)
            return f, f2

        fm, fm2 = branch(s_minus)
        fp, fp2 = branch(s_plus)
        return cls(fm, fp, 2.0 * A * s_minus, 2.0 * A * s_plus, fm2, fp2, "kinked-gaussian")

    @classmethod
    def gaussian(cls, amplitude=1.0, width=0.5, center=0.0):
        """Smooth bump; in the class for ``lam = 1/2`` (and for every ``lam`` if centred)."""
        A, w, m = float(amplitude), float(width), float(center)

        def f(x):
            return A * np.exp(-0.5 * (x - m) ** 2 / (w * w))

        def f2(x):
            return ((x - m) ** 2 / w**4 - 1.0 / (w * w)) * f(x)

        s = A * m / (w * w) * math.exp(-0.5 * m * m / (w * w))
        return cls(f, f, s, s, f2, f2, "gaussian")


@dataclass(frozen=True, eq=False)
class ConcentrationField:
    """Snapshots ``values[k]`` of ``c(times[k], x_nodes)``."""

    grid: Grid1D
    times: np.ndarray
    values: np.ndarray
    boundary: Boundary
    medium: MediumSpec = None
    lam: float = None
    masses: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("non-finite values in concentration field")

    def snapshot(self, t=None):
        k = -1 if t is None else int(np.argmin(np.abs(self.times - t)))
        return self.values[k]

    def interp(self, x, t=None):
        """Linear interpolation in ``x`` of the snapshot nearest ``t`` (last by default)."""
        return np.interp(x, self.grid.x_nodes, self.snapshot(t))

    def one_sided_derivatives(self, t=None):
        """Three-point ``(c_x(0-), c_x(0+))``."""
        return _one_sided(self.snapshot(t), self.grid)

    def mass(self, t=None):
        """Discrete mass that the scheme conserves exactly for flux continuity.

        The interface node has weight 0 and its neighbours ``1.5 dx``;
        elsewhere the trapezoid weights apply.
        """
        return float(_mass_weights(self.grid) @ self.snapshot(t))

    def to_csv(self, fileobj):
        w = csv.writer(fileobj, lineterminator="\n")
        w.writerow(["t", "x", "c"])
        for t, row in zip(self.times, self.values):
            for x, c in zip(self.grid.x_nodes, row):
                w.writerow([repr(float(t)), repr(float(x)), repr(float(c))])


def _one_sided(c, grid):
    i, hl, hr = grid.i0, grid.dx_left, grid.dx_right
    left = (3.0 * c[i] - 4.0 * c[i - 1] + c[i - 2]) / (2.0 * hl)
    right = (-3.0 * c[i] + 4.0 * c[i + 1] - c[i + 2]) / (2.0 * hr)
    return float(left), float(right)


def _mass_weights(grid):
    x, i = grid.x_nodes, grid.i0
    w = np.zeros(x.size)
    w[1:] += 0.5 * np.diff(x)
    w[:-1] += 0.5 * np.diff(x)
    w[i] = 0.0
    w[i - 1] = 1.5 * grid.dx_left
    w[i + 1] = 1.5 * grid.dx_right
    return w


def _interface_row(grid, lam):
    """Coefficients on nodes i0-2 .. i0+2 of ``lam c_x(0+) - (1-lam) c_x(0-)``."""
    hl, hr = grid.dx_left, grid.dx_right
    a, b = lam / (2.0 * hr), (1.0 - lam) / (2.0 * hl)
    return np.array([-b, 4.0 * b, -3.0 * a - 3.0 * b, 4.0 * a, -a])


def _project(c, grid, lam):
    """Reset the interface value so the data satisfies the discrete condition."""
    c = c.copy()
    i = grid.i0
    row = _interface_row(grid, lam)
    rest = row[0] * c[i - 2] + row[1] * c[i - 1] + row[3] * c[i + 1] + row[4] * c[i + 2]
    c[i] = -rest / row[2]
    return c


def _operator(grid, medium, boundary):
    """``D(x) c_xx / 2`` on every node except the interface (its row stays empty)."""
    x, n, i0 = grid.x_nodes, grid.x_nodes.size, grid.i0
    d = diffusivity(medium, x)
    rows, cols, vals = [], [], []
    for i in range(n):
        if i == i0:
            continue
        if i == 0 or i == n - 1:
            if boundary is Boundary.DIRICHLET:
                continue
            j = 1 if i == 0 else n - 2
            h = x[1] - x[0] if i == 0 else x[-1] - x[-2]
            k = 0.5 * d[i] / (h * h)
            rows += [i, i]
            cols += [i, j]
            vals += [-2.0 * k, 2.0 * k]  # mirror ghost node
            continue
        h = x[i + 1] - x[i]
        k = 0.5 * d[i] / (h * h)
        rows += [i, i, i]
        cols += [i - 1, i, i + 1]
        vals += [k, -2.0 * k, k]
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def solve_interface_pde(c0, medium, lam, grid, T, boundary=Boundary.NEUMANN, snapshots=None):
    """Crank-Nicolson solution up to ``T``.

    ``c0`` must be a :class:`TestFunction` in the class for ``lam``. The
    sampled initial data is projected onto the discrete interface
    condition before the first step. ``snapshots`` lists times to keep
    (rounded to the step); ``0`` and ``T`` are always kept.
    """
    if not isinstance(c0, TestFunction):
        raise TypeError("c0 must be a TestFunction")
    lam = SkewParam(float(lam)).alpha  # same open-interval check
    c0.require_class(lam)
    boundary = Boundary(boundary)
    if not T >= 0:
        raise ValueError("T must be non-negative")
    n_steps = int(math.ceil(T / grid.dt - 1e-9)) if T > 0 else 0
    dt = T / n_steps if n_steps else grid.dt
    keep = {0, n_steps}
    for s in (() if snapshots is None else snapshots):
        keep.add(int(round(s / dt)) if n_steps else 0)

    n, i0 = grid.x_nodes.size, grid.i0
    L = _operator(grid, medium, boundary)
    eye = sparse.identity(n, format="lil")
    A = (eye - 0.5 * dt * L).tolil()
    B = (eye + 0.5 * dt * L).tolil()
    A[i0, :] = 0.0
    B[i0, :] = 0.0
    A[i0, i0 - 2:i0 + 3] = _interface_row(grid, lam)
    if boundary is Boundary.DIRICHLET:
        for i in (0, n - 1):
            A[i, :] = 0.0
            B[i, :] = 0.0
            A[i, i] = 1.0
    lu = splu(A.tocsc())
    B = B.tocsr()

    c = _project(np.asarray(c0(grid.x_nodes), dtype=float), grid, lam)
    if boundary is Boundary.DIRICHLET:
        c[0] = c[-1] = 0.0
    w = _mass_weights(grid)
    times, values, masses = [], [], []
    for k in range(n_steps + 1):
        if k:
            c = lu.solve(B @ c)
        if k in keep:
            times.append(k * dt)
            values.append(c.copy())
            masses.append(float(w @ c))
    return ConcentrationField(grid, np.array(times), np.array(values), boundary, medium, lam,
                              np.array(masses))


# ------------------------------------------------------------ Monte Carlo side


def feynman_kac_estimate(c0, model, x, t, n_paths, seed, dt=None, scheme=Scheme.EXACT_STEP,
                         workers=None):
    """``E_x c0(Y_t)`` over natural-diffusion endpoints.

    With the exact sampler and no ``dt`` each path is a single exact step.
    """
    if t == 0:
        return EstimateWithError.exact(float(c0(x)))
    grid = np.array([0.0, float(t)]) if dt is None else uniform_grid(t, dt)
    sampler = NaturalSampler(model, grid, float(x), scheme)
    vals = map_paths(lambda b: c0(b.positions[:, -1]), sampler, n_paths, seed, workers)
    return EstimateWithError.from_samples(vals)


def _martingale_increments(fs, medium, y0):
    def fold(b):
        y = b.positions
        h = np.diff(b.times)
        trap = np.zeros(y.shape[1])
        trap[:-1] += 0.5 * h
        trap[1:] += 0.5 * h
        out = np.empty((y.shape[0], len(fs)))
        plus = y > 0.0
        for j, f in enumerate(fs):
            g = np.where(plus, medium.d_plus * f.second_plus(y), medium.d_minus * f.second_minus(y))
            integral = g @ trap
            out[:, j] = f(y[:, -1]) - float(f(y0)) - 0.5 * integral
        return out
    return fold


def martingale_drift_sweep(medium, lam, alphas, fs, t, dt, n_paths, seed, y0=0.0,
                           workers=None):
    """``E[M(t) - M(0)]`` for each ``alpha`` (rows) and test function (columns).

    All test functions at one ``alpha`` share the same paths; each
    ``alpha`` reuses ``seed``, so neighbouring drifts are positively
    correlated.
    """
    for f in fs:
        f.require_class(lam)
    grid = uniform_grid(t, dt)
    model = InterfaceModel(medium, lam)
    out = []
    for a in alphas:
        sampler = NaturalSampler(model, grid, y0, Scheme.EXACT_STEP, alpha=float(a))
        inc = map_paths(_martingale_increments(fs, medium, y0), sampler, n_paths, seed, workers)
        out.append([EstimateWithError.from_samples(inc[:, j]) for j in range(len(fs))])
    return out


def martingale_drift_test(d_minus, d_plus, lam, alpha, f, t, dt, n_paths, seed, y0=0.0,
                          workers=None):
    """Drift of ``f(Y) - (1/2) int D(Y) f''(Y) du`` when ``Y`` uses the given ``alpha``.

    ``alpha`` is deliberately independent of ``lam``; the drift vanishes
    only for ``alpha = alpha(lam)``. The time integral is a trapezoid sum.
    """
    medium = MediumSpec(d_minus, d_plus)
    return martingale_drift_sweep(medium, lam, [alpha], [f], t, dt, n_paths, seed, y0,
                                  workers)[0][0]


def martingale_residual_coefficient(medium, alpha, f):
    """Coefficient of the plus-side local time of ``B_alpha`` in the drift."""
    a = SkewParam(float(alpha)).alpha
    return 0.5 * medium.sqrt_plus * f.slope_plus - (1.0 - a) / (2.0 * a) * medium.sqrt_minus \
        * f.slope_minus


def predicted_drift(medium, alpha, f, t):
    """Expected drift from 0: coefficient times ``E l+ = 2 alpha sqrt(2t/pi)``."""
    a = SkewParam(float(alpha)).alpha
    return martingale_residual_coefficient(medium, a, f) * 2.0 * a * math.sqrt(2.0 * t / math.pi)


def drift_zero_crossing(alphas, drifts):
    """Bracket and linearly interpolated root of the first sign change.

    Returns ``(lo, hi, root)`` or None when the drifts do not change sign.
    """
    a = np.asarray(alphas, dtype=float)
    d = np.asarray(drifts, dtype=float)
    for i in range(a.size - 1):
        if d[i] == 0.0:
            return float(a[i]), float(a[i]), float(a[i])
        if d[i] * d[i + 1] < 0:
            root = a[i] - d[i] * (a[i + 1] - a[i]) / (d[i + 1] - d[i])
            return float(a[i]), float(a[i + 1]), float(root)
    if d[-1] == 0.0:
        return float(a[-1]), float(a[-1]), float(a[-1])
    return None
