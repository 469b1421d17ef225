# Spectral gaps under edge sampling, and a graph whose sample falls apart.
import math

import numpy as np

from pramconn.experiments import diameter_blowup_rows
from pramconn.generators import cycle, random_regular
from pramconn.spectral import sampling_concentration_experiment, spectral_gap

# cycles: the gap is 1 - cos(2 pi / n), so it shrinks like 1/n^2
for n in (8, 64, 512):
    g = spectral_gap(cycle(n))["min_gap"]
    print(f"C_{n}: gap {g:.6f}  closed form {1 - math.cos(2 * math.pi / n):.6f}")

# a dense regular graph keeps its gap when half the edges are dropped
G = random_regular(1024, 64, 0)
rep = sampling_concentration_experiment(G, 0.5, 30, 0.1, seed=1)
print("gap before:", round(spectral_gap(G)["min_gap"], 4),
      " worst deviation over", rep["trials"], "samples:", round(rep["max_dev"], 4),
      " bound:", round(rep["bound"], 3))

# low-diameter graph built from long thin chains; sampling at 1/log n
rows = diameter_blowup_rows(4000, seeds=range(5))
r0 = rows[0]
print(f"blowup graph n={r0['n']} L={r0['L']} diameter {r0['original_diameter']}")
print("sampled max diameters:", [r["sampled_max_diameter"] for r in rows],
      " largest component:", max(r["largest_component"] for r in rows))
print("mean ratio:", np.mean([r["ratio"] for r in rows]).round(2))
