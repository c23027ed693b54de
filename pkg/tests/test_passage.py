import io

import numpy as np
import pytest

from skewdiff.model import InterfaceModel, MediumSpec
from skewdiff.passage import (NOT_APPLICABLE, PassageConfigError, breakthrough_experiment,
                              exit_probability, first_passage_times,
                              hitting_probability_closed_form, hitting_probability_lattice,
                              hitting_probability_oracle, write_breakthrough_csv)
from skewdiff.paths import LatticeAlignmentError
from skewdiff.stats import PASS, EstimateWithError

M = MediumSpec(1.0, 4.0)


def test_survival_curve_shape():
    c = first_passage_times(InterfaceModel(M, 0.8), -0.5, 0.5, 1.0, 1e-4, 2000, 1)
    assert np.all(np.diff(c.survival) <= 0)
    assert np.all((c.survival >= 0) & (c.survival <= 1))
    assert c.censored_fraction + c.arrived_fraction == 1.0
    assert c.survival[-1] == pytest.approx(c.censored_fraction)
    assert c.mean() is None  # heavily censored
    assert c.restricted_mean().value <= 1.0


def test_coarse_step_rejected():
    with pytest.raises(PassageConfigError):
        first_passage_times(InterfaceModel(M, 0.8), -0.1, 0.1, 1.0, 1e-3, 10, 1)


def test_symmetric_medium_curves_equal():
    rep = breakthrough_experiment(MediumSpec(2.0, 2.0), 0.5, 0.5, 2.0, 1e-4, 3000, 2)
    assert rep.curves_equal_verdict == PASS
    assert rep.ordering_verdict == PASS
    assert rep.bound_verdict != NOT_APPLICABLE  # 1/2 is also the physical choice here


def test_mean_ordering_reverses_between_physical_and_stroock_varadhan():
    phys = breakthrough_experiment(M, 0.8, 0.5, 2.0, 1e-4, 2000, 3)
    sv = breakthrough_experiment(M, 0.5, 0.5, 2.0, 1e-4, 2000, 4)
    assert phys.rmst_gap.z_score(0.0) < -5 and phys.ordering_verdict == PASS
    assert sv.rmst_gap.z_score(0.0) > 5 and sv.ordering_verdict == PASS
    assert sv.bound_verdict == NOT_APPLICABLE


def test_dt_refinement():
    model = InterfaceModel(M, 0.8)
    a = first_passage_times(model, -0.5, 0.5, 2.0, 2e-4, 10_000, 5)
    b = first_passage_times(model, -0.5, 0.5, 2.0, 1e-4, 10_000, 6)
    se = np.hypot(a.std_error, b.std_error)
    assert np.all(np.abs(a.survival - b.survival) < 2 * se + 1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_hitting_oracle_equal_levels(alpha):
    closed, lattice = hitting_probability_oracle(alpha, 1.0, 1.0, 0.1)
    assert closed == pytest.approx(alpha)
    assert abs(lattice - closed) < 1e-10


@pytest.mark.parametrize("a,b", [(1.0, 3.0), (0.5, 0.2), (2.0, 1.0)])
def test_hitting_oracle_gamblers_ruin(a, b):
    assert hitting_probability_closed_form(0.5, a, b) == pytest.approx(b / (a + b))
    assert abs(hitting_probability_lattice(0.5, a, b, 0.1) - b / (a + b)) < 1e-10


def test_hitting_oracle_worked_example():
    closed, lattice = hitting_probability_oracle(2 / 3, 1.0, 2.0, 0.05)
    assert closed == pytest.approx(0.8)
    assert abs(lattice - 0.8) < 1e-10


def test_hitting_oracle_alignment():
    with pytest.raises(LatticeAlignmentError):
        hitting_probability_lattice(0.5, 1.05, 1.0, 0.1)


@pytest.mark.parametrize("alpha,a,b", [(0.3, 1.0, 1.0), (2 / 3, 1.0, 2.0), (0.5, 0.5, 1.5),
                                       (0.8, 1.5, 0.5), (0.25, 0.4, 0.8)])
def test_exit_probability_matches_oracle(alpha, a, b):
    est = exit_probability(alpha, a, b, 1e-4, 4000, 7)
    assert est.within(hitting_probability_closed_form(alpha, a, b))


def test_breakthrough_csv_columns():
    rep = breakthrough_experiment(M, 0.8, 0.5, 0.5, 1e-4, 200, 1, np.linspace(0.1, 0.5, 5))
    buf = io.StringIO()
    write_breakthrough_csv(buf, rep)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ("t,survival_minus_to_plus,se,survival_plus_to_minus,se,bound_rhs,"
                        "verdict")
    assert len(lines) == 6


def test_restricted_mean_is_integral_of_survival():
    c = first_passage_times(InterfaceModel(M, 0.8), -0.3, 0.3, 1.0, 1e-4, 500, 9,
                            t_grid=np.linspace(0, 1, 2001))
    integral = np.trapezoid(c.survival, c.t_grid) if hasattr(np, "trapezoid") else \
        np.trapz(c.survival, c.t_grid)
    assert integral == pytest.approx(c.restricted_mean().value, abs=2e-3)
    assert isinstance(c.restricted_mean(), EstimateWithError)
