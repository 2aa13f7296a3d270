"""
Sweeping alpha
==============

Each alpha gives one optimal (rooms, penalty) pair.  The calibration
table marks which pairs no other row beats.
"""

from importlib.resources import files

from pas_opt import dominance_analysis, load_instance, sweep
from pas_opt.sweep import grid, monotonicity_problems, table_from_pairs

inst = load_instance(files("pas_opt") / "data" / "case_study")

t = sweep(inst, grid(step="0.125"))
print(t.to_csv(timings=False))
print("consistency problems:", monotonicity_problems(t))

# the published table's pairs: only the middle rows survive
published = [(13, 23), (13, 8), (13, 8), (13, 8), (30, 8)]
pub = dominance_analysis(table_from_pairs(published, grid()))
for r in pub.rows:
    print(f"alpha {float(r.alpha):.2f}  {r.pair}  non-dominated={r.pareto}")
