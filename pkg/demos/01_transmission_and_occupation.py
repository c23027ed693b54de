# %% [markdown]
# # Transmission probability and residence time
#
# A medium with diffusivity 1 left of the interface and 4 right of it.
# The interface parameter `lam` fixes which matching condition holds at 0
# and, through it, how often an excursion leaves into the fast side.

# %%
import numpy as np

from skewdiff import (InterfaceModel, MediumSpec, derive_parameters, occupation_report,
                      residence_threshold_test, sign_probability)

medium = MediumSpec(d_minus=1.0, d_plus=4.0)
for lam in (0.5, 2 / 3, 0.8):
    p = derive_parameters(medium, lam)
    print(f"lam={lam:.3f}  alpha={p['alpha']:.4f}  named={p['named']}")

# %% [markdown]
# The sign of the underlying skew Brownian motion is positive with
# probability alpha at every time, so a single exact step is enough.

# %%
for alpha in (0.25, 2 / 3):
    for t in (0.5, 1.0):
        est = sign_probability(alpha, t, n_paths=50_000, seed=1)
        print(f"alpha={alpha:.3f} t={t}: {est.value:.4f} +/- {est.std_error:.4f}")

# %% [markdown]
# Expected time spent on the fast side up to t is t * alpha.

# %%
model = InterfaceModel(medium, 0.8)
rep = occupation_report(model, t=1.0, dt=1e-3, n_paths=20_000, seed=2)
print("plus side:", rep.gamma_plus.value, "expected", model.alpha)

# %% [markdown]
# Residence is longer on the fast side exactly when lam exceeds
# sqrt(D+)/(sqrt(D+)+sqrt(D-)) = 2/3 here.

# %%
lam_c, rows = residence_threshold_test(medium, [0.5, 2 / 3, 0.8], t=1.0, n_paths=20_000,
                                       seed=3, dt=1e-3)
for r in rows:
    print(f"lam={r.lam:.3f} gap={r.gap.value:+.4f} (se {r.gap.std_error:.4f}) {r.verdict}")
