# %% [markdown]
# # Image charges between two close spheres
#
# Reflecting a unit charge back and forth between two spheres produces two
# sequences of image points that pile up at a pair of limit points inside the
# gap. This script looks at how quickly the charges decay, how the charge sums
# compare with their digamma closed forms, and how the normalising constant
# grows like |log eps|.

# %%
import math

import numpy as np

from gapfield import SpherePair, build_images, fixed_points, q_closed
from gapfield.constants import m_asymptotic, m_from_systems, q_from_systems

pair = SpherePair(1.0, 0.5, 1e-4)
sys1 = build_images(pair, 1)
sys2 = build_images(pair, 2)
p1, p2 = fixed_points(pair)
print(f"limit points {p1:.6f} and {p2:.6f}; sqrt(eps) = {math.sqrt(pair.eps):.6f}")
print(f"{sys1.truncation_K + 1} images in family 1, omitted mass <= {sys1.tail_bound:.1e}")

# %% [markdown]
# Charges fall off like 1/k until k is of order 1/sqrt(delta); only then
# does the geometric tail take over, which is why the sums need thousands of
# terms.

# %%
for k in (1, 10, 100, 500, 800):
    print(f"q_1,{2 * k:<5d} = {sys1.charges[2 * k]:.3e}   k * q = {k * sys1.charges[2 * k]:.4f}")

# %%
print(" delta      rel err Q1   rel err Q2   M / M_asym")
for eps in (1e-3, 1e-4, 1e-5, 1e-6):
    pr = SpherePair(1.0, 0.5, eps)
    s1, s2 = build_images(pr, 1), build_images(pr, 2)
    qs, qc = q_from_systems(s1, s2), q_closed(pr)
    M = m_from_systems(s1, s2)
    print(f"{eps:7.0e}   {abs(qs[0] / qc[0] - 1):.3e}    {abs(qs[1] / qc[1] - 1):.3e}    {M / m_asymptotic(pr):.4f}")

# %% [markdown]
# The charge sums converge at rate delta, while the ratio of M to its leading
# term creeps towards one only like 1/|log eps|.

# %%
ks = np.arange(0, 40, 2)
print(np.round(sys1.points[ks], 4))
