# %% [markdown]
# # The blowup factor as a function of the radius ratio
#
# For a uniform background field along the line of centres and for the cubic
# harmonic x1^3 - 3 x1 x2^2 the factor has closed forms in digamma values.
# Here the series definition is checked against them and the two curves are
# tabulated on (0, 5]. Set PLOT = True to draw them with matplotlib.

# %%
import numpy as np

from gapfield import Radii, parse_polynomial, psi_cubic_closed, psi_factor, psi_linear_closed

PLOT = False
linear = parse_polynomial("x1")
cubic = parse_polynomial("x1^3 - 3*x1*x2^2")
rs = np.linspace(0.05, 5, 100)
lin = np.array([psi_factor(Radii(1.0, r), linear).psi for r in rs])
cub = np.array([psi_factor(Radii(1.0, r), cubic).psi for r in rs])

# %%
lin_err = max(abs(v / psi_linear_closed(r) - 1) for r, v in zip(rs, lin))
cub_err = max(abs(v / psi_cubic_closed(r) - 1) for r, v in zip(rs, cub))
print(f"max relative gap to closed forms: linear {lin_err:.1e}, cubic {cub_err:.1e}")
print(f"both increasing: {np.all(np.diff(lin) > 0)} {np.all(np.diff(cub) > 0)}")

# %%
for r in (0.1, 0.5, 1.0, 2.0, 5.0):
    i = int(np.argmin(abs(rs - r)))
    print(f"r = {rs[i]:.2f}:  linear {lin[i]:.5f}  cubic {cub[i]:.5f}")

# %% [markdown]
# At r = 1 the linear factor is pi^2/3: with equal spheres the two series
# combine into twice the sum of 1/n^2.

# %%
print(psi_factor(Radii(1.0, 1.0), linear).psi, np.pi**2 / 3)

# %% [markdown]
# A background with no x1-dependence on the axis, such as x2, never blows up.

# %%
print(psi_factor(Radii(1.0, 0.3), parse_polynomial("x2 + x2*x3")).psi)

# %%
if PLOT:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    ax[0].plot(rs, lin)
    ax[0].set(xlabel="r", title="H = x1")
    ax[1].plot(rs, cub)
    ax[1].set(xlabel="r", title="H = x1^3 - 3 x1 x2^2")
    plt.show()
