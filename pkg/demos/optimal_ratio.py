# %% [markdown]
# # Best ratio of the construction
#
# Raising gamma shrinks the central gap. The search finds the smallest gamma
# where the gap map is guaranteed to finish.

# %%
from circpart.bounds import gamma_one, gamma_theta_kgon
from circpart.construct import kopt_terms, optimal_gamma

for k in range(5, 13):
    opt = optimal_gamma(k)
    print(f"k={k:2d}  corner bound={gamma_theta_kgon(k):.5f}  construction={opt:.5f}  one piece={gamma_one(k):.5f}")

# %%
t = kopt_terms(6, optimal_gamma(6))
print(t)
