import io
import math

import numpy as np
import pytest
from scipy import stats

from skewdiff.localtime import (Kind, StepFunction, Weight, expected_natural_ratio,
                                integrated_diffusivity, interface_local_times,
                                local_time_continuity_gap, local_time_monte_carlo,
                                mathematical_local_time, natural_local_time,
                                occupation_localtime_consistency, occupation_measure,
                                write_local_time_csv)
from skewdiff.model import InterfaceModel, MediumSpec
from skewdiff.paths import (BMSampler, NaturalSampler, Path, Scheme, SkewBMSampler, map_paths,
                            simulate_bm, simulate_natural_diffusion, uniform_grid)
from skewdiff.stats import SEPARATION_SE, EstimateWithError

GRID = uniform_grid(2.0, 0.5)


def _const_path(value):
    return Path(GRID, np.full(GRID.size, value), value, 0, Scheme.BROWNIAN)


def test_occupation_of_constant_path():
    p = _const_path(5.0)
    assert occupation_measure(p, (4.0, 6.0)) == 2.0
    assert occupation_measure(p, (4.0, 6.0), Weight.QUADRATIC_VARIATION,
                              MediumSpec(1.0, 3.0)) == 6.0


def test_degenerate_window_is_zero():
    assert occupation_measure(_const_path(5.0), (6.0, 6.0)) == 0.0


def test_full_line_occupation_is_horizon():
    p = simulate_bm(1.0, uniform_grid(1.5, 0.01), seed=1)
    assert occupation_measure(p, (-np.inf, np.inf)) == pytest.approx(1.5, abs=1e-12)


def test_level_counts_on_minus_side():
    p = _const_path(0.0)
    pair = natural_local_time(p, 0.0, 0.5)
    assert pair.plus.value == 0.0 and pair.minus.value == 2.0 / 0.5


def test_far_path_has_zero_local_time():
    pair = mathematical_local_time(_const_path(5.0), 0.0, 0.1)
    assert pair.plus.value == 0.0 and pair.minus.value == 0.0


def test_natural_equals_mathematical_for_unit_diffusivity():
    p = simulate_natural_diffusion(InterfaceModel(MediumSpec(1, 1), 0.3),
                                   uniform_grid(1.0, 1e-3), 0.0, seed=4)
    m = mathematical_local_time(p, 0.0, 0.05, MediumSpec(1, 1))
    n = natural_local_time(p, 0.0, 0.05)
    assert (m.plus.value, m.minus.value) == (n.plus.value, n.minus.value)


def test_resolution_warning():
    p = simulate_bm(1.0, uniform_grid(1.0, 1e-2), seed=2)
    assert mathematical_local_time(p, 0.0, 0.01).plus.resolution_warning
    assert not mathematical_local_time(p, 0.0, 0.5).plus.resolution_warning


def test_additivity_in_time():
    p = simulate_natural_diffusion(InterfaceModel(MediumSpec(1, 4), 0.5),
                                   uniform_grid(2.0, 1e-3), 0.0, seed=5)
    k = 700
    head = Path(p.times[:k + 1], p.positions[:k + 1], 0.0, 5, p.scheme)
    tail = Path(p.times[k:] - p.times[k], p.positions[k:], p.positions[k], 5, p.scheme)
    for w in ((0.0, 0.05), (-0.05, 0.0), (-np.inf, 0.0)):
        whole = occupation_measure(p, w)
        assert occupation_measure(head, w) + occupation_measure(tail, w) == pytest.approx(
            whole, rel=1e-12, abs=1e-15)


def test_occupation_formula_constant_weight():
    m = MediumSpec(1.0, 4.0)
    p = simulate_natural_diffusion(InterfaceModel(m, 0.5), uniform_grid(1.0, 1e-4), 0.0, 3)
    left, right = occupation_localtime_consistency(p, StepFunction.constant(), m, 0.01)
    assert left == pytest.approx(integrated_diffusivity(p, m), rel=1e-12)
    assert right == pytest.approx(left, rel=1e-12)


@pytest.mark.parametrize("natural", [False, True])
def test_occupation_formula_positive_indicator(natural):
    m = MediumSpec(1.0, 4.0) if natural else MediumSpec(1.0, 1.0)
    p = simulate_natural_diffusion(InterfaceModel(m, 0.5), uniform_grid(1.0, 1e-4), 0.2, 6)
    left, right = occupation_localtime_consistency(p, StepFunction.indicator_positive(), m, 0.01)
    assert right == pytest.approx(left, rel=0.02)


def test_natural_local_time_scales_diffusively():
    c, t, eps = 4.0, 0.5, 0.02
    model = InterfaceModel(MediumSpec(1.0, 4.0), 0.6)

    def values(horizon, e, seed):
        s = NaturalSampler(model, uniform_grid(horizon, horizon / 1000), 0.0)
        return map_paths(lambda b: occupation_measure(b, (-e, e)) / (2 * e), s, 20_000, seed)

    small = values(t, eps, 1)
    large = values(c * t, math.sqrt(c) * eps, 2) / math.sqrt(c)
    assert stats.ks_2samp(small, large).pvalue > 0.05


def test_csv_columns():
    buf = io.StringIO()
    write_local_time_csv(buf, [("natural_plus", 0.0, 0.01, EstimateWithError(1.0, 0.1, 10))])
    assert buf.getvalue().splitlines()[0] == "quantity,a,eps,value,std_error,n"


@pytest.mark.parametrize("alpha", [1 / 3, 2 / 3])
def test_skew_bm_mathematical_ratio(alpha):
    s = SkewBMSampler(alpha, uniform_grid(0.25, 1e-5), 0.0)
    pair = local_time_monte_carlo(s, 0.0, 0.01, Kind.MATHEMATICAL, None, 4000, 9)
    assert not pair.plus.resolution_warning
    assert pair.ratio().within(alpha / (1 - alpha), 4)


def test_natural_ratio_against_lattice_walk():
    # the lattice walk is a second, independent construction of the same process
    m = MediumSpec(1.0, 4.0)
    model = InterfaceModel(m, 0.5)
    s = NaturalSampler(model, uniform_grid(1.0, 1e-4), 0.0, Scheme.SKEW_WALK)
    pair = local_time_monte_carlo(s, 0.0, 0.04, Kind.NATURAL, m, 4000, 3)
    assert abs(pair.ratio().value / expected_natural_ratio(model) - 1) < 0.10


# Window estimators carry O(eps) and O(dt/eps) biases; the zero-gap checks
# run where both are well below the Monte Carlo error.
def test_continuity_gap_physical():
    m = MediumSpec(1.0, 4.0)
    gap = local_time_continuity_gap(InterfaceModel.physical(m), 0.25, 0.01, 10_000, 4, dt=1e-5)
    assert gap.within(0.0)


def test_continuity_gap_stroock_varadhan_separated():
    m = MediumSpec(1.0, 4.0)
    sv = local_time_continuity_gap(InterfaceModel.stroock_varadhan(m), 0.25, 0.02, 100_000, 5)
    assert abs(sv.z_score(0.0)) > SEPARATION_SE


def test_continuity_gap_homogeneous_medium():
    m = MediumSpec(1.0, 1.0)
    half = local_time_continuity_gap(InterfaceModel(m, 0.5), 0.25, 0.01, 10_000, 6, dt=1e-5)
    assert half.within(0.0)
    skewed = local_time_continuity_gap(InterfaceModel(m, 0.7), 0.25, 0.02, 20_000, 7)
    assert skewed.z_score(0.0) > SEPARATION_SE


def test_interface_local_times_shares_paths():
    model = InterfaceModel(MediumSpec(1.0, 1.0), 0.4)
    mp, nat = interface_local_times(model, 0.2, 1e-3, 0.05, 500, 1)
    # unit diffusivity: both windows coincide
    np.testing.assert_array_equal(mp.plus_samples, nat.plus_samples)


# ---------------------------------------------------------- window schedule

EPS_SCHEDULE = (0.04, 0.02, 0.01, 0.005)


@pytest.fixture(scope="module")
def bm_local_times():
    s = BMSampler(1.0, uniform_grid(1.0, 1e-4), 0.0)

    def fold(b):
        x = b.positions[:, :-1]
        h = np.diff(b.times)
        # (l+ + l-)/2 over the window (-eps, eps]
        return np.column_stack([((x > -e) & (x <= e)) @ h / (2 * e) for e in EPS_SCHEDULE])

    return map_paths(fold, s, 100_000, 13)


def test_brownian_local_time_mean(bm_local_times):
    est = EstimateWithError.from_samples(bm_local_times[:, EPS_SCHEDULE.index(0.01)])
    assert est.within(math.sqrt(2 / math.pi))


def test_window_limit_stability(bm_local_times):
    # successive estimates along the halving schedule within 2 SE of each other
    for j in range(len(EPS_SCHEDULE) - 1):
        a = EstimateWithError.from_samples(bm_local_times[:, j])
        b = EstimateWithError.from_samples(bm_local_times[:, j + 1])
        assert abs(a.value - b.value) < 2 * max(a.std_error, b.std_error), \
            f"eps {EPS_SCHEDULE[j]} -> {EPS_SCHEDULE[j + 1]}: {a.value:.5f} vs {b.value:.5f}"
