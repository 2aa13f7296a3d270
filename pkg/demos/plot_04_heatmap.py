"""
Floor occupancy across alpha
============================

Raising alpha pulls PcD classes down to the ground floor.  The heatmap
counts occupied (slot, room) cells per floor.
"""

from importlib.resources import files

from pas_opt import floor_heatmap, load_instance, room_usage, sweep

inst = load_instance(files("pas_opt") / "data" / "case_study")
t = sweep(inst)

h = floor_heatmap([(f"{float(r.alpha):g}", r.assignment) for r in t.rows], inst)
print(h.to_text())

# room usage for the balanced row
mid = t.rows[2]
print(room_usage(mid.assignment, inst).to_text())
