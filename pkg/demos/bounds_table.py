# %% [markdown]
# # Ratio bounds for regular polygons
#
# A single piece needs ratio 1/cos(pi/k). Any partition at all pays at least
# (1 + csc(theta/2))/2 at a corner of angle theta. The construction sits between.

# %%
from circpart.bounds import gamma_one, gamma_theta_kgon, interior_angle
from circpart.cli import table_rows

for k in range(3, 13):
    print(f"k={k:2d}  angle={interior_angle(k):.4f}  one piece={gamma_one(k):.5f}  corner bound={gamma_theta_kgon(k):.5f}")

# %% [markdown]
# The same rows the `circpart table` command prints, with the best ratio the
# construction reaches and its piece count.

# %%
for k, g1, gt, gs, pieces in table_rows(with_counts=False):
    print(k, round(g1, 5), round(gt, 5), round(gs, 5))
