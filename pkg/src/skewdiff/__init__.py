"""Diffusion across a sharp interface: skew Brownian motion samplers, local
time and occupation estimators, passage times and an interface PDE solver."""

from .model import (InterfaceModel, MediumSpec, ParameterDomainError, SkewParam,
                    alpha_of_lambda, classify, diffusivity, lambda_of_alpha, physical_alpha,
                    physical_lambda, residence_threshold, sigma_inverse, sigma_map,
                    stroock_varadhan_alpha)
from .paths import (NaturalSampler, Path, PathBatch, Scheme, SkewBMSampler, WalkConfig,
                    simulate_bm, simulate_excursion_flip, simulate_natural_diffusion,
                    simulate_skew_bm_exact, simulate_skew_walk, uniform_grid)
from .stats import FAIL, INCONCLUSIVE, PASS, EstimateWithError
from .localtime import (interface_local_times, local_time_continuity_gap,
                        mathematical_local_time, natural_local_time, occupation_measure)
from .occupation import (natural_occupation, occupation_report, residence_threshold_test,
                         sign_probability)
from .passage import (breakthrough_experiment, exit_probability, first_passage_times,
                      hitting_probability_oracle)
from .pde import (ConcentrationField, Grid1D, TestFunction, feynman_kac_estimate,
                  martingale_drift_test, solve_interface_pde)
from .experiments import ExperimentConfig, RunManifest, derive_parameters, run

__version__ = "0.1.0"
