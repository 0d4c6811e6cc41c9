"""
Lewis versus uniform sampling on imbalanced data
================================================

Rows of A are basis vectors with geometrically growing multiplicities, so
uniform samples often miss the rare coordinates entirely. We compare the
relative error of the reduced-problem solution at several sample sizes.
"""
from lewisq.experiment import parse_config, run_experiment

cfg = parse_config("""
tau_h = 0.75
sizes = 100, 400, 1000
trials = 10
n = 10000
d = 20
""")
_, summary = run_experiment(cfg)

means = {(c["method"], c["size"]): c for c in summary["perCellMeans"]}
print(" size   lewis err2   uniform err2")
for size in (100, 400, 1000):
    print(f"{size:5d}   {means['lewis', size]['err2']:10.4f}   {means['uniform', size]['err2']:12.4f}")
