# %% [markdown]
# # Polygon partitions
#
# Central disk, one disk per corner, and edge covers in the 2k gaps left
# between them. Writes SVG drawings next to this script.

# %%
import os

from circpart.bounds import gamma_theta_kgon
from circpart.construct import build_partition, optimal_gamma
from circpart.document import svg_text, write_atomic
from circpart.verify import check_covering

here = os.path.dirname(os.path.abspath(__file__))
cases = [(3, 1.5), (4, gamma_theta_kgon(4)), (5, gamma_theta_kgon(5)), (6, optimal_gamma(6))]

# %%
for k, g in cases:
    p = build_partition(k, g)
    rep = check_covering(p, 20_000)
    print(f"k={k} gamma={g:.5f} pieces={p.piece_count} depth={p.depth} uncovered={rep.samples_uncovered}")
    write_atomic(os.path.join(here, f"partition_{k}.svg"), svg_text(p))
