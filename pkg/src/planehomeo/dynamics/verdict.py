"""Periodic-orbit-forces-fixed-point verdicts on one component."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import BudgetExceeded
from .fixed_points import FixedPointCertificate, as_region, find_fixed_points
from .periodic import PeriodicOrbitReport, find_periodic

K_MAX = 6


class Verdict(str, Enum):
    CONSISTENT = "CONSISTENT"
    INCONSISTENT = "INCONSISTENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class VerdictRecord:
    verdict: Verdict
    fixed_points: list[FixedPointCertificate]
    periodic: dict[int, list[PeriodicOrbitReport]]
    budget_exceeded: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    reproduction: dict | None = None

    @property
    def has_periodic(self) -> bool:
        return any(self.periodic.values())

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "fixedPoints": [c.to_json() for c in self.fixed_points],
            "periodic": {str(k): [r.to_json() for r in v] for k, v in sorted(self.periodic.items())},
            "budgetExceeded": self.budget_exceeded,
            "notes": self.notes,
            "reproduction": self.reproduction,
        }


def theorem_verdict(f, C, K_max: int = K_MAX, tol: float = 1e-10, leaf: float | None = None,
                    max_boxes: int = 400_000, components=None) -> VerdictRecord:
    """Search C for orbits of period 2..K_max that stay in C, and for fixed points in C.

    CONSISTENT when no such orbit is found or a fixed point is found.  A
    periodic orbit without a fixed point is INCONSISTENT and carries the data
    needed to reproduce the run; it signals a software defect.
    """
    budget = []
    try:
        fixed = list(find_fixed_points(f, C, tol=tol, leaf=leaf, max_boxes=max_boxes, gridN=0))
    except BudgetExceeded as exc:
        fixed = list(exc.partial or [])
        budget.append("fixed points")
    periodic: dict[int, list[PeriodicOrbitReport]] = {}
    for k in range(2, K_max + 1):
        try:
            periodic[k] = find_periodic(f, C, k, tol=tol, itinerary_filter=True, components=components,
                                        leaf=leaf, max_boxes=max_boxes)
        except BudgetExceeded as exc:
            periodic[k] = list(exc.partial or [])
            budget.append(f"period {k}")
    rec = VerdictRecord(Verdict.CONSISTENT, fixed, periodic, budget)
    found_orbit = rec.has_periodic
    if fixed:
        rec.notes.append("fixed point certified in C" if any(c.certified for c in fixed)
                         else "numerical fixed point in C")
    if not found_orbit:
        rec.notes.append("no periodic orbit inside C up to the period bound")
    if budget and not fixed:
        rec.verdict = Verdict.INCONCLUSIVE
    elif found_orbit and not fixed:
        rec.verdict = Verdict.INCONSISTENT
        dom = as_region(C)
        rec.reproduction = {
            "component": np.round(dom.vertices, 15).tolist(),
            "orbits": {str(k): [r.orbitPoints.tolist() for r in v] for k, v in periodic.items() if v},
            "K_max": K_max, "tol": tol, "leaf": leaf,
        }
    return rec
