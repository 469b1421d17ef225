# Work and rounds as n doubles, on cycles (tiny gap) and expanders (constant gap).
import numpy as np

from pramconn.experiments import fit_linear, ltz_path_rounds, mean_by, work_sweep

rows = work_sweep(exps=range(10, 16), seeds=range(3))
for kind in ("cycle", "expander"):
    sel = [dict(r, size=r["n"] + r["m"]) for r in rows if r["family"] == kind]
    size, work = mean_by(sel, "size", "work")
    _, rounds = mean_by(sel, "size", "rounds")
    print(kind)
    for s, w, r in zip(size, work, rounds):
        print(f"  m+n={int(s):8d}  work/(m+n)={w / s:6.1f}  rounds={r:7.1f}")
    fit = fit_linear(size, work)
    print(f"  fit a={fit['a']:.1f} max rel residual={fit['max_rel_residual']:.3f} "
          f"quadratic t={fit['quad_t']:.2f}")

# the round-synchronous solver on paths: rounds grow with log n
ks = np.arange(8, 16)
r = [ltz_path_rounds(int(k))["rounds"] for k in ks]
slope, icpt = np.polyfit(ks, r, 1)
print("path rounds by log2 n:", dict(zip(ks.tolist(), r)))
print(f"  about {slope:.1f} rounds per doubling")
