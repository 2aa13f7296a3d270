"""Seeded random instances for tests, benchmarks and demos."""

from __future__ import annotations

import random

from .instance import Discipline, Instance, InstanceOptions, Room, Timeslot, validate_instance

DAYS = ("mon", "tue", "wed", "thu", "fri", "sat")


def random_instance(
    seed: int,
    max_disciplines: int = 3,
    max_slots: int = 4,
    max_rooms: int = 3,
    max_floor: int = 4,
    max_frequency: int = 2,
    pcd_prob: float = 0.5,
    restrict_prob: float = 0.3,
    options: InstanceOptions = InstanceOptions(),
) -> Instance:
    """A valid instance drawn from ``random.Random(seed)``.

    Sizes are uniform in ``1..max_*``; draws that break a counting condition
    are redrawn.  Room floors repeat often so equivalent rooms show up.
    """
    rng = random.Random(seed)
    while True:
        n_t = rng.randint(1, max_slots)
        n_s = rng.randint(1, max_rooms)
        n_d = rng.randint(1, max_disciplines)
        days_used = DAYS[: max(1, min(len(DAYS), (n_t + 1) // 2))]
        slots = [
            Timeslot(f"t{i}", order=i, day=days_used[i % len(days_used)] if options.distinct_days else None)
            for i in range(n_t)
        ]
        if options.distinct_days:
            # (day, order) pairs must be unique
            slots = [Timeslot(t.id, order=i // len(days_used), day=t.day) for i, t in enumerate(slots)]
        floors = [rng.randint(0, max_floor) for _ in range(n_s)]
        rooms = [Room(f"r{i}", floor=floors[i], capacity=rng.choice((20, 40)), block="A") for i in range(n_s)]
        discs = []
        for i in range(n_d):
            freq = rng.randint(1, max_frequency)
            elig = None
            if n_s > 1 and rng.random() < restrict_prob:
                k = rng.randint(1, n_s - 1)
                elig = frozenset(r.id for r in rng.sample(rooms, k))
            discs.append(
                Discipline(
                    f"d{i}",
                    frequency=freq,
                    pcd=int(rng.random() < pcd_prob),
                    eligible_rooms=elig,
                    enrollment=rng.choice((10, 30)),
                )
            )
        inst = Instance(tuple(discs), tuple(slots), tuple(rooms), options)
        if not validate_instance(inst):
            return inst
