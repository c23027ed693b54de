# %% [markdown]
# # Concentration equation with an interface condition
#
# Crank-Nicolson on a grid with a node at 0, compared against the
# Feynman-Kac expectation over the natural diffusion.

# %%
from skewdiff import (Grid1D, InterfaceModel, MediumSpec, TestFunction, feynman_kac_estimate,
                      solve_interface_pde)
from skewdiff.pde import martingale_drift_sweep, predicted_drift

medium = MediumSpec(1.0, 4.0)
for lam in (0.8, 0.5):
    c0 = TestFunction.kinked_gaussian(lam)
    grid = Grid1D.for_medium(medium, 0.5, dx=0.01, dt=1e-4)
    field = solve_interface_pde(c0, medium, lam, grid, 0.5)
    left, right = field.one_sided_derivatives()
    print(f"lam={lam}: c_x(0-)={left:.4f} c_x(0+)={right:.4f}"
          f" mass {field.masses[0]:.6f} -> {field.masses[-1]:.6f}")
    model = InterfaceModel(medium, lam)
    for x in (-1.0, 0.0, 1.0):
        mc = feynman_kac_estimate(c0, model, x, 0.5, n_paths=20_000, seed=7)
        print(f"   x={x:+.1f}  FD {float(field.interp(x)):.4f}  MC {mc.value:.4f}"
              f" +/- {mc.std_error:.4f}")

# %% [markdown]
# f(Y_t) - f(0) - (1/2) int D f''(Y_s) ds has zero mean only when the
# transmission probability matches lam.

# %%
lam = 0.5
f = TestFunction.piecewise_quadratic(lam)
alphas = [0.18, 1 / 3, 0.48]
rows = martingale_drift_sweep(medium, lam, alphas, [f], t=1.0, dt=1e-4, n_paths=5_000, seed=8)
for a, (est,) in zip(alphas, rows):
    print(f"alpha={a:.3f} drift {est.value:+.4f} +/- {est.std_error:.4f}"
          f"  predicted {predicted_drift(medium, a, f, 1.0):+.4f}")
