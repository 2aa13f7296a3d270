"""
Comparing with a manual allocation
==================================

The case study ships a spread-out hand allocation.  The comparison
reports how many rooms and how much penalty the optimum saves.
"""

from importlib.resources import files

from pas_opt import build_model, compare_baseline, load_instance, solve_exact
from pas_opt.report import load_baseline

root = files("pas_opt") / "data" / "case_study"
inst = load_instance(root)
base = load_baseline(root / "baseline.csv")

opt = solve_exact(build_model(inst, 0.5)).assignment
c = compare_baseline(base, opt, inst, 0.5)
print(c.to_text())
