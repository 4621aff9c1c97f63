# %% [markdown]
# # Fixed points of the rescaled gap map
#
# After rescaling by the newest disk radius, a gap of width x becomes F(x).
# Below the critical ratio F has two positive fixed points and gaps starting
# above the lower one never close.

# %%
import numpy as np

from circpart.edgecover import F, classify
from circpart.fixedpoint import GAMMA_STAR, discriminant, positive_fixed_points

print("critical ratio", GAMMA_STAR)
for g in (1.02, 1.05, 1.08, 1.11, GAMMA_STAR, 1.12):
    roots = positive_fixed_points(g)
    print(f"gamma={g:.6f}  disc={discriminant(g):+.3e}  fixed points={np.round(roots, 6)}")

# %% [markdown]
# Orbits from a few starting gaps at gamma = 1.05, stopped once the gap fits
# inside both outcircles.

# %%
g = 1.05
a1, a2 = positive_fixed_points(g)
for x0 in (0.3, 0.5 * (a1 + a2), 3.0, 40.0):
    x = x0
    orbit = [x]
    for _ in range(8):
        if x <= 2 * np.sqrt(g - 1):
            break
        x = F(x, g)
        orbit.append(x)
    print(classify(x0, g).region, np.round(orbit, 4))
