# %% [markdown]
# # Covering one gap
#
# Two unit disks touch the edge at distance 2. Their outcircles of radius gamma
# leave a gap, filled level by level with disks tangent to the edge.

# %%
from circpart.edgecover import canonical_instance, canonical_scaled_gap, cover_edge, steps_to_cover

for g in (1.2, 1.13, 1.12, 1.116, 1.114):
    c = cover_edge(canonical_instance(g))
    print(f"gamma={g}  steps={steps_to_cover(canonical_scaled_gap(g), g)}  "
          f"disks={c.n_gap_disks}  levels={c.level_counts()}")

# %%
c = cover_edge(canonical_instance(1.12))
for x, r, lev in zip(c.x, c.r, c.level):
    if lev > 2:
        continue
    print(f"level {lev}: x={x:.6f} r={r:.6f}")
