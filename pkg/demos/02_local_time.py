# %% [markdown]
# # Local time at the interface
#
# Window estimates of local time on each side of 0. The mathematical local
# time of skew Brownian motion splits in ratio alpha : (1 - alpha); the
# natural local time of the mapped diffusion is continuous only for the
# flux-conserving choice of lam.

# %%
from skewdiff import InterfaceModel, MediumSpec, interface_local_times
from skewdiff.localtime import expected_natural_ratio

medium = MediumSpec(1.0, 4.0)
for lam in (0.8, 0.5):
    model = InterfaceModel(medium, lam)
    math_pair, natural_pair = interface_local_times(model, t=0.25, dt=1e-5, window_eps=0.01,
                                                    n_paths=2_000, seed=4)
    print(f"lam={lam}: mathematical ratio {math_pair.ratio().value:.3f}"
          f" (limit {model.alpha / (1 - model.alpha):.3f}),"
          f" natural ratio {natural_pair.ratio().value:.3f}"
          f" (limit {expected_natural_ratio(model):.3f})")
