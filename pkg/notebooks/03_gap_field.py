# %% [markdown]
# # Field in the gap: leading term against the image-charge field
#
# The leading term is a Lorentzian in the distance rho from the axis, peaked
# at Psi / (eps |log eps|). The image-charge field c * grad h differs from
# the full field only by a bounded remainder, so it should approach the
# leading term as eps shrinks, slowly, at a 1/|log eps| rate.

# %%
import math

import numpy as np

from gapfield import SpherePair, grad_u_main, grad_u_singular, image_setup, parse_polynomial, psi_factor

H = parse_polynomial("x1")
print(" eps      peak (main)    c*grad h     rel diff   rel diff*|log eps|")
for eps in (1e-2, 1e-3, 1e-4, 1e-5):
    pair = SpherePair(1.0, 0.5, eps)
    sys1, sys2, consts = image_setup(pair)
    main = grad_u_main(pair, H, np.zeros(3))[0]
    sing = grad_u_singular(pair, H, consts, sys1, sys2, np.zeros(3))[0]
    d = abs(sing / main - 1)
    print(f"{eps:6.0e}  {main:12.4f}  {sing:12.4f}   {d:.4f}    {d * abs(math.log(eps)):.3f}")

# %% [markdown]
# Across the gap the two profiles share the same width, the rho at which
# the leading term halves: rho^2 = 4 eps / (1/r1 + 1/r2). Here that width is
# close to the edge of the window where the leading term applies.

# %%
pair = SpherePair(1.0, 0.5, 1e-4)
sys1, sys2, consts = image_setup(pair)
psi = psi_factor(pair, H).psi
width = math.sqrt(4 * pair.eps / (1 / pair.r1 + 1 / pair.r2))
for rho in np.array([0, 0.25, 0.5, 0.75, 1.0]) * width:
    x = np.array([0.0, rho, 0.0])
    m = grad_u_main(pair, H, x, psi)[0]
    s = grad_u_singular(pair, H, consts, sys1, sys2, x)[0]
    print(f"rho/width = {rho / width:4.2f}:  main {m:10.3f}   c*grad h {s:10.3f}   ratio {s / m:.3f}")
