"""Fixed-point-free extension of a non-self PL homeomorphism to the plane, and its audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import PreconditionViolation
from ..geom.polygon import loop_point
from ..geom.predicates import orient_many
from ..pl.homeo import MapHandle, PLHomeo, is_orientation_preserving
from .partition import ArcPartition, build_partition


@dataclass(frozen=True, eq=False)
class ExtendedHomeo(MapHandle):
    """F = f on D; off D, F moves x along arcs so that lambda^E(F(x)) = lambda^D(x)."""

    core: PLHomeo
    partition: ArcPartition
    _cache: dict = field(default_factory=dict, repr=False)

    lipschitz = None

    @property
    def truncationRadius(self) -> float:
        return self.partition.truncationRadius

    @property
    def D(self):
        return self.partition.D

    @property
    def E(self):
        return self.partition.E

    def forward(self, pts, strict: bool = False) -> np.ndarray:
        pts = np.asarray(pts, float)
        shape = pts.shape
        x = pts.reshape(-1, 2)
        out = np.full_like(x, np.nan)
        inD = self.D.contains(x, closed=True)
        if np.any(inD):
            out[inD] = self.core.forward(x[inD])
        rest = ~np.all(np.isfinite(out), axis=1)
        if np.any(rest):
            u, lam, _ = self.partition.famD.project(x[rest])
            out[rest] = self.partition.famE.lift(u, lam)
        return out.reshape(shape)

    def inverse(self, pts, strict: bool = False) -> np.ndarray:
        pts = np.asarray(pts, float)
        shape = pts.shape
        y = pts.reshape(-1, 2)
        out = np.full_like(y, np.nan)
        inE = self.E.contains(y, closed=True)
        if np.any(inE):
            out[inE] = self.core.inverse(y[inE])
        rest = ~np.all(np.isfinite(out), axis=1)
        if np.any(rest):
            u, lam, _ = self.partition.famE.project(y[rest])
            out[rest] = self.partition.famD.lift(u, lam)
        return out.reshape(shape)

    def transport_residuals(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """|lambda^E(F(x)) - lambda^D(x)| and |pi^E(F(x)) - f(pi^D(x))| for points off D."""
        P = self.partition
        x = np.asarray(pts, float).reshape(-1, 2)
        uD, lamD, _ = P.famD.project(x)
        y = self.forward(x)
        uE, lamE, _ = P.famE.project(y)
        fpi = self.core.forward(P.famD.foot(uD))
        miss = ~np.all(np.isfinite(fpi), axis=1)
        fpi[miss] = loop_point(P.E.vertices, uD[miss])
        return np.abs(lamE - lamD), np.linalg.norm(P.famE.foot(uE) - fpi, axis=1)


def extend_homeo(f: PLHomeo, R: float | None = None, density: int = 256, samples_per_arc: int = 64,
                 waive_fixed_point_free: bool = False, fixed_point_tol: float = 1e-10) -> ExtendedHomeo:
    """Extend f: D -> E (D n E nonempty and connected) to a plane homeomorphism.

    Unless waived, f is first checked to be fixed-point free on D.
    """
    if not is_orientation_preserving(f):
        raise PreconditionViolation("f is not orientation preserving")
    if not waive_fixed_point_free:
        from ..dynamics.fixed_points import find_fixed_points

        fixed = find_fixed_points(f, f.domain, tol=fixed_point_tol, gridN=0, certify=False)
        if len(fixed):
            raise PreconditionViolation(f"f has a fixed point near {fixed[0].witness}")
    P = build_partition(f.domain, f.image, R=R, density=density, samples_per_arc=samples_per_arc)
    return ExtendedHomeo(f, P)


# audits ------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    value: float
    threshold: float
    witness: list | None = None
    detail: str = ""

    def to_json(self) -> dict:
        v = None if not math.isfinite(self.value) else self.value
        return {"name": self.name, "passed": self.passed, "value": v, "threshold": self.threshold,
                "witness": self.witness, "detail": self.detail}


@dataclass(frozen=True)
class ExtensionReport:
    checks: tuple[AuditCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> AuditCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def margin(self) -> float:
        return self["fixed_point_margin"].value

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _disk_samples(rng, center, R, n):
    r = R * np.sqrt(rng.uniform(0, 1, n))
    t = rng.uniform(0, 2 * np.pi, n)
    return center + np.c_[r * np.cos(t), r * np.sin(t)]


def verify_extension(F: ExtendedHomeo, nSamples: int = 10_000, seed: int = 0, gridN: int = 200,
                     lambda_tol: float = 1e-9, inverse_tol: float = 1e-8) -> ExtensionReport:
    """Arc transport, injectivity, seam continuity and fixed-point margin audits.

    The arc-transport audit reads the stored lambda^D table, so a corrupted
    partition table fails with the offending sample as witness.
    """
    P = F.partition
    rng = np.random.default_rng(seed)
    allv = np.vstack([P.D.vertices, P.E.vertices])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    mid = 0.5 * (lo + hi)
    scale = float(np.linalg.norm(hi - lo))
    checks = []

    # (i) arc transport on stored arc samples off int D
    flat = P.arcs.reshape(-1, 2)
    lamD = P.lambdaD.reshape(-1)
    arc_of = np.repeat(np.arange(P.n_arcs), P.arcs.shape[1])
    cand = np.nonzero(np.isfinite(lamD))[0]
    pick = rng.choice(cand, size=min(nSamples, len(cand)), replace=False)
    x = flat[pick]
    y = F.forward(x)
    uE, lamE, _ = P.famE.project(y)
    fpi = F.core.forward(P.famD.foot(P.piD[arc_of[pick]]))
    miss = ~np.all(np.isfinite(fpi), axis=1)
    fpi[miss] = loop_point(P.E.vertices, P.piD[arc_of[pick]][miss])
    err_l = np.abs(lamE - lamD[pick])
    err_p = np.linalg.norm(P.famE.foot(uE) - fpi, axis=1) / max(scale, 1.0)
    err = np.fmax(err_l, err_p)
    err = np.where(np.isfinite(err), err, np.inf)
    k = int(np.argmax(err))
    ok = bool(err[k] <= lambda_tol)
    checks.append(AuditCheck("arc_transport", ok, float(err[k]), lambda_tol,
                             None if ok else [int(arc_of[pick][k]), x[k].tolist()],
                             f"{len(pick)} arc samples; lambda and foot residual"))

    # (ii) injectivity: inverse round trip and local orientation
    xs = np.vstack([_disk_samples(rng, P.center, 0.999 * P.R, nSamples // 2),
                    rng.uniform(mid - (hi - lo), mid + (hi - lo), (nSamples - nSamples // 2, 2))])
    back = F.inverse(F.forward(xs))
    rt = np.linalg.norm(back - xs, axis=1)
    rt = np.where(np.isfinite(rt), rt, np.inf)
    h = 1e-7 * scale
    a = F.forward(xs)
    b = F.forward(xs + [h, 0.0])
    c = F.forward(xs + [0.0, h])
    sign = orient_many(a, b, c)
    bad = np.nonzero(sign <= 0)[0]
    k = int(np.argmax(rt))
    ok = bool(rt[k] <= inverse_tol) and len(bad) == 0
    wit = None
    if not ok:
        wit = xs[k].tolist() if rt[k] > inverse_tol else xs[bad[0]].tolist()
    checks.append(AuditCheck("injectivity", ok, float(rt[k]), inverse_tol, wit,
                             f"{len(xs)} samples; {len(bad)} orientation flips"))

    # (iii) continuity modulus across the seams dD, dE and d(D u E)
    seam = np.vstack([_boundary_samples(P.D.vertices, 200, rng), _boundary_samples(P.E.vertices, 200, rng)])
    dirs = np.array([[np.cos(t), np.sin(t)] for t in np.linspace(0, 2 * np.pi, 8, endpoint=False)])
    Fs = F.forward(seam)

    def omega(delta):
        vals = [np.linalg.norm(F.forward(seam + delta * d) - Fs, axis=1) for d in dirs]
        return float(np.nanmax(np.vstack(vals)))

    # a jump keeps omega roughly constant as delta shrinks; a continuous map decays
    # linearly once delta is below its feature size, so judge the finest decade
    deltas = [1e-3 * scale * 10.0 ** -k for k in range(4)]
    w = [omega(d) for d in deltas]
    w0, w1 = w[-2], w[-1]
    ok = bool(np.isfinite(w1) and (w1 <= 0.5 * w0 or w0 <= 1e-12 * scale))
    checks.append(AuditCheck("seam_continuity", ok, w1 / w0 if w0 > 0 else 0.0, 0.5, None,
                             ", ".join(f"omega({d:.3g})={v:.3g}" for d, v in zip(deltas, w))))

    # (iv) fixed-point-free margin on the doubled bounding box
    xs_ = np.linspace(mid[0] - (hi[0] - lo[0]), mid[0] + (hi[0] - lo[0]), gridN)
    ys_ = np.linspace(mid[1] - (hi[1] - lo[1]), mid[1] + (hi[1] - lo[1]), gridN)
    G = np.stack(np.meshgrid(xs_, ys_), axis=-1).reshape(-1, 2)
    disp = np.linalg.norm(F.forward(G) - G, axis=1)
    disp = np.where(np.isfinite(disp), disp, -np.inf)
    k = int(np.argmin(np.where(np.isfinite(disp), disp, np.inf)))
    margin = float(disp[k]) if np.all(np.isfinite(disp)) else float("nan")
    ok = bool(margin > 0)
    checks.append(AuditCheck("fixed_point_margin", ok, margin, 0.0, G[k].tolist(),
                             f"{gridN}x{gridN} grid over the doubled bounding box"))
    return ExtensionReport(tuple(checks))


def _boundary_samples(poly: np.ndarray, n: int, rng) -> np.ndarray:
    return loop_point(poly, rng.uniform(0, len(poly), n))
