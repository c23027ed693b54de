"""Config-driven experiments: JSON in, CSV data and a JSON manifest out.

Every experiment returns named verdicts. A run passes when all of them
are PASS; checks that do not apply to a configuration are left out rather
than reported.
"""

import csv
import enum
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from importlib import metadata

import numpy as np
from scipy import stats as sps

from .density import feynman_kac_quadrature
from .localtime import expected_natural_ratio, interface_local_times, write_local_time_csv
from .model import (InterfaceModel, MediumSpec, ParameterDomainError, SkewParam,
                    alpha_of_lambda, classify, lambda_of_alpha, physical_alpha,
                    physical_lambda, residence_threshold, stroock_varadhan_alpha)
from .occupation import occupation_report, residence_threshold_test, sign_probability, \
    write_residence_csv
from .passage import (NOT_APPLICABLE, breakthrough_experiment, exit_probability,
                      hitting_probability_oracle, write_breakthrough_csv)
from .paths import Scheme, SkewBMSampler, map_paths, resolve_workers, uniform_grid
from .pde import (Grid1D, TestFunction, drift_zero_crossing, feynman_kac_estimate,
                  martingale_drift_sweep, martingale_residual_coefficient, predicted_drift,
                  solve_interface_pde)
from .stats import (CONSISTENCY_SE, FAIL, PASS, SEPARATION_SE, verdict_consistent,
                    verdict_separated)

__all__ = [
    "Experiment",
    "ConfigError",
    "ExperimentConfig",
    "RunManifest",
    "derive_parameters",
    "run",
]


class Experiment(str, enum.Enum):
    SIGN_PROB = "sign-prob"
    OCCUPATION = "occupation"
    RESIDENCE_THRESHOLD = "residence-threshold"
    BREAKTHROUGH = "breakthrough"
    LOCAL_TIME_RATIO = "local-time-ratio"
    CONTINUITY_GAP = "continuity-gap"
    MARTINGALE = "martingale"
    PDE_VALIDATE = "pde-validate"
    SAMPLER_EQUIVALENCE = "sampler-equivalence"
    HITTING_PROBABILITY = "hitting-probability"


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _version():
    try:
        return metadata.version("skewdiff")
    except metadata.PackageNotFoundError:
        return "unknown"


def _positive(d, key, path, required=True, integer=False, default=None):
    if key not in d:
        if required:
            raise ConfigError(path, "missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"must be a number, got {v!r}")
    if integer and (not float(v).is_integer()):
        raise ConfigError(path, f"must be an integer, got {v!r}")
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(path, f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment. Exactly one of ``lam`` and ``alpha`` is given; the
    other is derived from the medium and reported in the manifest."""

    experiment: Experiment
    d_minus: float
    d_plus: float
    t: float
    n_paths: int
    seed: int
    lam: float = None
    alpha: float = None
    dt: float = None
    scheme: Scheme = Scheme.EXACT_STEP
    output: str = "out"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.lam is None) == (self.alpha is None):
            raise ConfigError("lambda", "give exactly one of 'lambda' and 'alpha'")
        try:
            MediumSpec(self.d_minus, self.d_plus)
            if self.lam is not None:
                SkewParam(self.lam)
            else:
                SkewParam(self.alpha)
        except ParameterDomainError as exc:
            key = "lambda" if self.lam is not None else "alpha"
            name = str(exc).split()[0]
            raise ConfigError(f"medium.{name}" if name.startswith("d_") else key, str(exc))

    @property
    def medium(self):
        return MediumSpec(self.d_minus, self.d_plus)

    @property
    def lam_value(self):
        return self.lam if self.lam is not None else lambda_of_alpha(self.medium, self.alpha)

    @property
    def model(self):
        return InterfaceModel(self.medium, self.lam_value)

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        if "experiment" not in d:
            raise ConfigError("experiment", "missing")
        try:
            exp = Experiment(d["experiment"])
        except ValueError:
            choices = ", ".join(e.value for e in Experiment)
            raise ConfigError("experiment", f"unknown {d['experiment']!r} (one of {choices})")
        med = d.get("medium")
        if not isinstance(med, dict):
            raise ConfigError("medium", "missing or not an object")
        d_minus = _positive(med, "d_minus", "medium.d_minus")
        d_plus = _positive(med, "d_plus", "medium.d_plus")
        lam = _positive(d, "lambda", "lambda", required=False)
        alpha = _positive(d, "alpha", "alpha", required=False)
        t = _positive(d, "t", "t")
        dt = _positive(d, "dt", "dt", required=False)
        n_paths = _positive(d, "n_paths", "n_paths", integer=True)
        seed = d.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed", f"must be an integer in [0, 2**64), got {seed!r}")
        try:
            scheme = Scheme(d.get("scheme", Scheme.EXACT_STEP.value))
        except ValueError:
            raise ConfigError("scheme", f"unknown scheme {d.get('scheme')!r}")
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params", "must be an object")
        for key in ("drift", "v"):
            if key in d or key in params:
                raise ConfigError(key, "drifted media are not supported")
        return cls(exp, d_minus, d_plus, t, n_paths, seed, lam, alpha, dt, scheme,
                   str(d.get("output", "out")), dict(params))

    def to_dict(self):
        out = {"experiment": self.experiment.value,
               "medium": {"d_minus": self.d_minus, "d_plus": self.d_plus}}
        if self.lam is not None:
            out["lambda"] = self.lam
        else:
            out["alpha"] = self.alpha
        out["t"] = self.t
        if self.dt is not None:
            out["dt"] = self.dt
        out.update(n_paths=self.n_paths, seed=self.seed, scheme=self.scheme.value,
                   output=self.output, params=self.params)
        return out

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}")
        return cls.from_dict(d)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def replace(self, **changes):
        d = asdict(self)
        d.update(changes)
        return ExperimentConfig(**d)

    def param(self, key, default):
        return self.params.get(key, default)


@dataclass
class RunManifest:
    config: dict
    derived: dict
    wall_clock_s: float
    workers: int
    version: str
    verdicts: dict
    files: list
    se_multipliers: dict = field(default_factory=lambda: {
        "consistency": CONSISTENCY_SE, "separation": SEPARATION_SE})

    @property
    def passed(self):
        return bool(self.verdicts) and all(v == PASS for v in self.verdicts.values())

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def derive_parameters(config_or_medium, lam=None):
    """Derived transmission probabilities, the residence threshold and the
    name of the diffusion a configuration instantiates."""
    if isinstance(config_or_medium, ExperimentConfig):
        medium, lam = config_or_medium.medium, config_or_medium.lam_value
    else:
        medium = config_or_medium
    return {
        "lambda": float(lam),
        "alpha": alpha_of_lambda(medium, lam).alpha,
        "alpha_physical": physical_alpha(medium).alpha,
        "alpha_stroock_varadhan": stroock_varadhan_alpha(medium).alpha,
        "lambda_physical": physical_lambda(medium),
        "lambda_c": residence_threshold(medium),
        "named": classify(medium, lam),
    }


# ---------------------------------------------------------------- helpers


def _r(x):
    return repr(float(x))


def _csv(out_dir, name, header, rows):
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return name


def _dt(cfg, default):
    return cfg.dt if cfg.dt is not None else default


def _rel_verdict(est, target, rtol):
    return PASS if abs(est.value - target) <= rtol * abs(target) else FAIL


# ------------------------------------------------------------- experiments


def _sign_prob(cfg, workers, out):
    a = cfg.model.alpha
    dt = cfg.dt if cfg.scheme.on_lattice else None
    verdicts, rows = {}, []
    for i, t in enumerate(cfg.param("times", [cfg.t])):
        est = sign_probability(a, t, cfg.n_paths, cfg.seed + i, cfg.scheme, dt, workers)
        bound = CONSISTENCY_SE * math.sqrt(a * (1.0 - a) / cfg.n_paths)
        v = PASS if abs(est.value - a) <= bound else FAIL
        verdicts[f"sign_prob[t={t:g}]"] = v
        rows.append([_r(t), _r(a), _r(est.value), _r(est.std_error), _r(bound), v])
    f = _csv(out, "sign_prob.csv", ["t", "alpha", "estimate", "se", "tolerance", "verdict"],
             rows)
    return verdicts, [f]


def _occupation(cfg, workers, out):
    m = cfg.model
    rep = occupation_report(m, cfg.t, _dt(cfg, 1e-4), cfg.n_paths, cfg.seed, cfg.scheme,
                            workers)
    expected = cfg.t * m.alpha
    v = verdict_consistent(rep.gamma_plus, expected)
    f = _csv(out, "occupation.csv",
             ["t", "lambda", "alpha", "gamma_plus", "se", "gamma_minus", "se",
              "expected_plus", "verdict"],
             [[_r(cfg.t), _r(m.lam), _r(m.alpha), _r(rep.gamma_plus.value),
               _r(rep.gamma_plus.std_error), _r(rep.gamma_minus.value),
               _r(rep.gamma_minus.std_error), _r(expected), v]])
    return {"occupation_mean": v}, [f]


def _residence(cfg, workers, out):
    med = cfg.medium
    lam_c = residence_threshold(med)
    default = sorted({round(x, 12) for x in (lam_c - 0.2, lam_c - 0.1, lam_c, lam_c + 0.1,
                                             lam_c + 0.2, cfg.lam_value) if 0 < x < 1})
    grid = [float(x) for x in cfg.param("lambda_grid", default)]
    _, rows = residence_threshold_test(med, grid, cfg.t, cfg.n_paths, cfg.seed,
                                       _dt(cfg, 1e-4), cfg.scheme, workers)
    verdicts = {f"residence[lambda={r.lam:.6g}]": r.verdict for r in rows}
    with open(os.path.join(out, "residence.csv"), "w", newline="", encoding="utf-8") as fh:
        write_residence_csv(fh, rows)
    return verdicts, ["residence.csv"]


def _breakthrough(cfg, workers, out):
    n_grid = int(cfg.param("n_grid", 40))
    t_grid = np.linspace(cfg.t / n_grid, cfg.t, n_grid)
    rep = breakthrough_experiment(cfg.medium, cfg.lam_value, float(cfg.param("y", 1.0)),
                                  cfg.t, _dt(cfg, 1e-4), cfg.n_paths, cfg.seed, t_grid,
                                  workers)
    verdicts = {}
    for name, v in (("pointwise_bound", rep.bound_verdict),
                    ("rmst_ordering", rep.ordering_verdict),
                    ("curves_equal", rep.curves_equal_verdict)):
        if v != NOT_APPLICABLE:
            verdicts[name] = v
    with open(os.path.join(out, "breakthrough.csv"), "w", newline="", encoding="utf-8") as fh:
        write_breakthrough_csv(fh, rep)
    f2 = _csv(out, "breakthrough_summary.csv",
              ["quantity", "value", "std_error"],
              [["rmst_minus_to_plus", _r(rep.rmst_forward.value),
                _r(rep.rmst_forward.std_error)],
               ["rmst_plus_to_minus", _r(rep.rmst_backward.value),
                _r(rep.rmst_backward.std_error)],
               ["rmst_gap", _r(rep.rmst_gap.value), _r(rep.rmst_gap.std_error)],
               ["censored_minus_to_plus", _r(rep.forward.censored_fraction), "0.0"],
               ["censored_plus_to_minus", _r(rep.backward.censored_fraction), "0.0"]])
    return verdicts, ["breakthrough.csv", f2]


def _local_time_ratio(cfg, workers, out):
    m = cfg.model
    eps = float(cfg.param("eps", 0.01))
    mp, nat = interface_local_times(m, cfg.t, _dt(cfg, 1e-5), eps, cfg.n_paths, cfg.seed,
                                    workers)
    r_math, r_nat = mp.ratio(), nat.ratio()
    target_math = m.alpha / (1.0 - m.alpha)
    target_nat = expected_natural_ratio(m)
    verdicts = {
        "mathematical_ratio": _rel_verdict(r_math, target_math,
                                           float(cfg.param("rtol_mathematical", 0.05))),
        "natural_ratio": _rel_verdict(r_nat, target_nat, float(cfg.param("rtol_natural", 0.10))),
    }
    with open(os.path.join(out, "local_time.csv"), "w", newline="", encoding="utf-8") as fh:
        write_local_time_csv(fh, [
            ("mathematical_plus", 0.0, eps, mp.plus), ("mathematical_minus", 0.0, eps, mp.minus),
            ("mathematical_ratio", 0.0, eps, r_math), ("natural_plus", 0.0, eps, nat.plus),
            ("natural_minus", 0.0, eps, nat.minus), ("natural_ratio", 0.0, eps, r_nat)])
    f2 = _csv(out, "local_time_targets.csv", ["quantity", "target", "verdict"],
              [["mathematical_ratio", _r(target_math), verdicts["mathematical_ratio"]],
               ["natural_ratio", _r(target_nat), verdicts["natural_ratio"]]])
    return verdicts, ["local_time.csv", f2]


def _continuity_gap(cfg, workers, out):
    m = cfg.model
    eps = float(cfg.param("eps", 0.01))
    _, nat = interface_local_times(m, cfg.t, _dt(cfg, 1e-5), eps, cfg.n_paths, cfg.seed,
                                   workers)
    gap = nat.gap()
    if math.isclose(m.lam, physical_lambda(m.medium), rel_tol=1e-9):
        v = verdict_consistent(gap, 0.0)
    else:
        v = verdict_separated(gap, 1 if expected_natural_ratio(m) > 1 else -1)
    with open(os.path.join(out, "continuity_gap.csv"), "w", newline="",
              encoding="utf-8") as fh:
        write_local_time_csv(fh, [("natural_plus", 0.0, eps, nat.plus),
                                  ("natural_minus", 0.0, eps, nat.minus),
                                  ("relative_gap", 0.0, eps, gap)])
    return {"continuity_gap": v}, ["continuity_gap.csv"]


_TEST_FUNCTIONS = {
    "piecewise-linear": TestFunction.piecewise_linear,
    "piecewise-quadratic": TestFunction.piecewise_quadratic,
    "kinked-gaussian": TestFunction.kinked_gaussian,
}


def _function(name, lam, path):
    if name not in _TEST_FUNCTIONS:
        raise ConfigError(path, f"unknown test function {name!r}")
    return _TEST_FUNCTIONS[name](lam)


def _martingale(cfg, workers, out):
    med, lam = cfg.medium, cfg.lam_value
    a_star = alpha_of_lambda(med, lam).alpha
    names = cfg.param("functions", ["piecewise-linear", "piecewise-quadratic"])
    fs = [_function(n, lam, "params.functions") for n in names]
    default = [min(0.99, max(0.01, a_star + 0.05 * k)) for k in range(-3, 4)]
    alphas = sorted(float(a) for a in cfg.param("alphas", default))
    n_grid = int(cfg.param("n_paths_grid", cfg.n_paths))
    dt = _dt(cfg, 1e-4)
    # the alpha(lam) run gets its own seed so it is independent of the sweep
    at_star = martingale_drift_sweep(med, lam, [a_star], fs, cfg.t, dt, cfg.n_paths,
                                     cfg.seed, 0.0, workers)[0]
    sweep = martingale_drift_sweep(med, lam, alphas, fs, cfg.t, dt, n_grid, cfg.seed + 1, 0.0,
                                   workers)
    tol = float(cfg.param("root_tolerance", 0.05))
    verdicts, rows = {}, []
    for j, (name, f) in enumerate(zip(names, fs)):
        v0 = verdict_consistent(at_star[j], 0.0)
        verdicts[f"drift_at_alpha_lambda[{name}]"] = v0
        rows.append([name, _r(a_star), str(cfg.n_paths), _r(at_star[j].value),
                     _r(at_star[j].std_error), _r(predicted_drift(med, a_star, f, cfg.t)), v0])
        drifts = [row[j] for row in sweep]
        for a, est in zip(alphas, drifts):
            v = ""
            if a in (alphas[0], alphas[-1]):
                sign = np.sign(martingale_residual_coefficient(med, a, f))
                v = verdict_separated(est, int(sign)) if sign else verdict_consistent(est, 0.0)
                verdicts[f"drift_separated[{name},alpha={a:g}]"] = v
            rows.append([name, _r(a), str(n_grid), _r(est.value), _r(est.std_error),
                         _r(predicted_drift(med, a, f, cfg.t)), v])
        cross = drift_zero_crossing(alphas, [e.value for e in drifts])
        ok = cross is not None and abs(cross[2] - a_star) <= tol
        verdicts[f"zero_crossing[{name}]"] = PASS if ok else FAIL
        rows.append([name, _r(cross[2]) if cross else "nan", "", "", "", "",
                     f"root{'' if ok else ' outside tolerance'}"])
    f1 = _csv(out, "martingale.csv",
              ["function", "alpha", "n_paths", "drift", "se", "predicted", "verdict"], rows)
    return verdicts, [f1]


def _pde_validate(cfg, workers, out):
    med, lam = cfg.medium, cfg.lam_value
    model = cfg.model
    c0 = _function(cfg.param("c0", "kinked-gaussian"), lam, "params.c0")
    dx = float(cfg.param("dx", 0.01))
    dt = _dt(cfg, 1e-4)
    probes = [float(x) for x in cfg.param("probes", [-1.0, -0.1, 0.0, 0.1, 1.0])]
    grid = Grid1D.for_medium(med, cfg.t, dx, dt)
    fine = solve_interface_pde(c0, med, lam, grid, cfg.t)
    coarse = solve_interface_pde(c0, med, lam, Grid1D.for_medium(med, cfg.t, 2 * dx, 2 * dt),
                                 cfg.t)
    verdicts, rows = {}, []
    worst = 0.0
    for i, x in enumerate(probes):
        mc = feynman_kac_estimate(c0, model, x, cfg.t, cfg.n_paths, cfg.seed + i,
                                  workers=workers)
        fd = float(fine.interp(x))
        ok = abs(fd - mc.value) < max(0.02, CONSISTENCY_SE * mc.std_error)
        worst = max(worst, abs(fd - mc.value))
        rows.append([_r(x), _r(fd), _r(mc.value), _r(mc.std_error),
                     _r(feynman_kac_quadrature(c0, model, x, cfg.t)), PASS if ok else FAIL])
        verdicts[f"duality[x={x:g}]"] = PASS if ok else FAIL

    # convergence against the quadrature reference on nodes shared by both grids
    ref_x = np.arange(-20, 21) * 0.1
    ref = np.array([feynman_kac_quadrature(c0, model, x, cfg.t) for x in ref_x])
    e_coarse = float(np.max(np.abs(coarse.interp(ref_x) - ref)))
    e_fine = float(np.max(np.abs(fine.interp(ref_x) - ref)))
    factor = e_coarse / e_fine if e_fine > 0 else math.inf
    verdicts["grid_convergence"] = PASS if factor >= 3.0 else FAIL

    left, right = fine.one_sided_derivatives()
    flux_res = lam * right - (1.0 - lam) * left
    scale = max(abs(left), abs(right), 1e-300)
    verdicts["interface_condition"] = PASS if abs(flux_res) <= 1e-8 * max(1.0, scale) else FAIL
    verdicts["positivity"] = PASS if float(np.min(fine.values)) >= -1e-12 else FAIL
    mass_drift = float(np.max(np.abs(fine.masses - fine.masses[0])))
    if math.isclose(lam, physical_lambda(med), rel_tol=1e-9):
        verdicts["mass_conservation"] = PASS if mass_drift <= 1e-8 else FAIL

    f1 = _csv(out, "pde_probes.csv", ["x", "fd", "mc", "se", "quadrature", "verdict"], rows)
    f2 = _csv(out, "pde_summary.csv", ["quantity", "value"],
              [["sup_abs_fd_minus_mc", _r(worst)], ["error_coarse", _r(e_coarse)],
               ["error_fine", _r(e_fine)], ["convergence_factor", _r(factor)],
               ["cx_minus", _r(left)], ["cx_plus", _r(right)],
               ["flux_plus_minus_flux_minus", _r(med.d_plus * right - med.d_minus * left)],
               ["mass_drift", _r(mass_drift)], ["min_value", _r(np.min(fine.values))],
               ["resolution_ratio", _r(grid.resolution_ratio(med))]])
    with open(os.path.join(out, "pde_field.csv"), "w", newline="", encoding="utf-8") as fh:
        fine.to_csv(fh)
    return verdicts, [f1, f2, "pde_field.csv"]


def _sampler_equivalence(cfg, workers, out):
    a = cfg.model.alpha
    eps = float(cfg.param("epsilon", 0.005))
    n_steps = int(round(cfg.t / eps**2))
    walk_grid = uniform_grid(n_steps * eps**2, eps**2)

    def last(b):
        return b.positions[:, -1].copy()

    exact = map_paths(last, SkewBMSampler(a, np.array([0.0, walk_grid[-1]])), cfg.n_paths,
                      cfg.seed, workers)
    walk = map_paths(last, SkewBMSampler(a, walk_grid, 0.0, cfg.scheme if cfg.scheme.on_lattice
                                         else Scheme.SKEW_WALK), cfg.n_paths, cfg.seed + 1,
                     workers)
    res = sps.ks_2samp(exact, walk)
    level = float(cfg.param("level", 0.01))
    v = PASS if res.pvalue > level else FAIL
    f = _csv(out, "sampler_equivalence.csv",
             ["alpha", "epsilon", "n_paths", "ks_statistic", "p_value", "exact_mean_sign",
              "walk_mean_sign", "verdict"],
             [[_r(a), _r(eps), str(cfg.n_paths), _r(res.statistic), _r(res.pvalue),
               _r(np.mean(exact > 0)), _r(np.mean(walk > 0)), v]])
    return {"ks_two_sample": v}, [f]


def _hitting(cfg, workers, out):
    a = cfg.model.alpha
    eps = float(cfg.param("epsilon", 0.01))
    triples = cfg.param("levels", [[1.0, 1.0], [1.0, 2.0], [0.5, 1.5]])
    verdicts, rows = {}, []
    for i, (up, down) in enumerate(triples):
        closed, lattice = hitting_probability_oracle(a, up, down, eps)
        mc = exit_probability(a, up, down, _dt(cfg, 1e-4), cfg.n_paths, cfg.seed + i,
                              workers=workers)
        v_mc = verdict_consistent(mc, closed)
        v_lat = PASS if abs(lattice - closed) <= 1e-10 else FAIL
        verdicts[f"mc[a={up:g},b={down:g}]"] = v_mc
        verdicts[f"lattice[a={up:g},b={down:g}]"] = v_lat
        rows.append([_r(a), _r(up), _r(down), _r(mc.value), _r(mc.std_error), _r(closed),
                     _r(lattice), v_mc, v_lat])
    f = _csv(out, "hitting.csv", ["alpha", "a", "b", "mc", "se", "closed_form", "lattice",
                                  "verdict_mc", "verdict_lattice"], rows)
    return verdicts, [f]


_RUNNERS = {
    Experiment.SIGN_PROB: _sign_prob,
    Experiment.OCCUPATION: _occupation,
    Experiment.RESIDENCE_THRESHOLD: _residence,
    Experiment.BREAKTHROUGH: _breakthrough,
    Experiment.LOCAL_TIME_RATIO: _local_time_ratio,
    Experiment.CONTINUITY_GAP: _continuity_gap,
    Experiment.MARTINGALE: _martingale,
    Experiment.PDE_VALIDATE: _pde_validate,
    Experiment.SAMPLER_EQUIVALENCE: _sampler_equivalence,
    Experiment.HITTING_PROBABILITY: _hitting,
}


def run(config, workers=None, out_dir=None):
    """Run one experiment, write its CSV files and ``manifest.json``.

    Returns the :class:`RunManifest`. Data files depend only on the
    config (including its seed), never on ``workers``.
    """
    workers = resolve_workers(workers)
    out = out_dir or config.output
    os.makedirs(out, exist_ok=True)
    start = time.perf_counter()
    verdicts, files = _RUNNERS[config.experiment](config, workers, out)
    manifest = RunManifest(config.to_dict(), derive_parameters(config),
                           time.perf_counter() - start, workers, _version(), verdicts, files)
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json() + "\n")
    return manifest
