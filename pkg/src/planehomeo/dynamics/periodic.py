"""Periodic orbits as fixed points of iterates, with itinerary bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceeded
from ..pl.homeo import MapHandle
from ..pl.orbits import component_ids
from .fixed_points import as_region, find_fixed_points


class ItineraryPower(MapHandle):
    """k-fold iterate that is undefined unless every iterate stays in ``region``.

    With ``region=None`` only the map's own domain constrains the iterates.
    """

    def __init__(self, f: MapHandle, k: int, region=None):
        self.f, self.k = f, int(k)
        self.region = as_region(region) if region is not None else None
        lf = getattr(f, "lipschitz", None)
        self.lipschitz = lf ** k if lf is not None else None
        self.displacement_lipschitz = self.lipschitz + 1.0 if self.lipschitz is not None else None

    def forward(self, pts, strict: bool = False):
        x = np.asarray(pts, float).reshape(-1, 2).copy()
        ok = np.all(np.isfinite(x), axis=1)
        if self.region is not None:
            ok &= self.region.contains(np.where(ok[:, None], x, 0.0), closed=True)
        for _ in range(self.k):
            x[~ok] = np.nan
            idx = np.nonzero(ok)[0]
            if not len(idx):
                break
            x[idx] = self.f.forward(x[idx])
            ok[idx] &= np.all(np.isfinite(x[idx]), axis=1)
            if self.region is not None:
                idx = np.nonzero(ok)[0]
                ok[idx] &= self.region.contains(x[idx], closed=True)
        x[~ok] = np.nan
        return x.reshape(np.shape(pts))


@dataclass(frozen=True)
class PeriodicOrbitReport:
    period: int
    orbitPoints: np.ndarray
    residual: float
    componentItinerary: tuple[int, ...]
    winding: int = 0

    @property
    def single_component(self) -> bool:
        return len(set(self.componentItinerary)) == 1 and self.componentItinerary[0] >= 0

    def to_json(self) -> dict:
        return {"period": self.period, "orbitPoints": np.round(self.orbitPoints, 12).tolist(),
                "residual": self.residual, "componentItinerary": list(self.componentItinerary),
                "winding": self.winding}


def _divisors(k: int) -> list[int]:
    return [d for d in range(1, k) if k % d == 0]


def orbit_of(f: MapHandle, p: np.ndarray, k: int) -> np.ndarray:
    pts = [np.asarray(p, float)]
    for _ in range(k - 1):
        pts.append(f.forward(pts[-1][None])[0])
    return np.array(pts)


def find_periodic(f: MapHandle, C, k: int, tol: float = 1e-10, itinerary_filter: bool = True,
                  components=None, leaf: float | None = None, max_boxes: int = 400_000,
                  ) -> list[PeriodicOrbitReport]:
    """Orbits of least period ``k`` through the region ``C``.

    With ``itinerary_filter`` every orbit point must lie in ``C``; without it
    the orbit only has to start in ``C`` and remain where ``f`` is defined.
    ``components`` (default: just ``C``) label the itinerary.
    """
    if k < 1:
        raise ValueError("period must be >= 1")
    comps = list(components) if components is not None else [C]
    Fk = ItineraryPower(f, k, C if itinerary_filter else None)
    try:
        fixed = find_fixed_points(Fk, C, tol=tol, leaf=leaf, max_boxes=max_boxes, gridN=0)
        partial = None
    except BudgetExceeded as exc:
        fixed = exc.partial or []
        partial = exc
    dom = as_region(C)
    scale = float(np.ptp(dom.vertices, axis=0).max())
    reports: list[PeriodicOrbitReport] = []
    for cert in fixed:
        p = np.array(cert.witness)
        orbit = orbit_of(f, p, k)
        if not np.all(np.isfinite(orbit)):
            continue
        back = f.forward(orbit[-1][None])[0]
        residual = float(np.linalg.norm(back - p))
        if not residual <= max(tol, 1e-12 * scale) * 10:
            continue
        # least period: reject if an earlier iterate already returns
        if any(np.linalg.norm(orbit[d] - p) <= 1e-7 * scale for d in _divisors(k)):
            continue
        if any(np.min(np.linalg.norm(r.orbitPoints - p, axis=1)) <= 1e-7 * scale for r in reports):
            continue
        Cdom = [as_region(c) for c in comps]
        ids = tuple(int(i) for i in component_ids(orbit, Cdom))
        reports.append(PeriodicOrbitReport(k, orbit, residual, ids, cert.winding))
    if partial is not None:
        raise BudgetExceeded(f"period-{k} search: {partial}", partial=reports)
    return reports


def find_all_periodic(f: MapHandle, C, kmax: int, **kw) -> dict[int, list[PeriodicOrbitReport]]:
    return {k: find_periodic(f, C, k, **kw) for k in range(2, kmax + 1)}

