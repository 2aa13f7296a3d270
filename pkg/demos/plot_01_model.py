"""
Writing the allocation model down
=================================

A tiny instance shows the rows of the integer program and how an
assignment maps onto its columns.
"""

from fractions import Fraction

from pas_opt import Discipline, Instance, Room, Timeslot, build_model, brute_force
from pas_opt.model import dump_model, encode

# two disciplines, one of them PcD, two slots and a room on each of two floors
inst = Instance(
    (Discipline("ALG", frequency=2, pcd=0), Discipline("PROG", frequency=1, pcd=1)),
    (Timeslot("mon-1", 0, "mon"), Timeslot("tue-1", 1, "tue")),
    (Room("101", floor=0, capacity=40), Room("304", floor=2, capacity=25)),
)

# alpha is kept as an exact fraction; 0.5 weighs rooms and penalty equally
m = build_model(inst, Fraction(1, 2))
print(m.family_counts())
print(dump_model(m))

# the exhaustive oracle finds the optimum on instances this small
a, b = brute_force(inst, m.alpha)
print(sorted(a.triples))
print(f"fo = {b.fo}  rooms = {b.obj1}  penalty = {b.obj2}")

# the optimum is a feasible 0/1 point of the rows with the same objective
point = encode(m, a)
print(m.is_feasible_point(point), m.objective_at(point))
