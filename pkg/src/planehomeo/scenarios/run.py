"""Scenario pipeline: intersect -> reduce -> extend -> verify, with JSON/SVG/CSV artifacts."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics import escape_map, find_fixed_points, find_periodic, free_disk_check, grid_margin, theorem_verdict
from ..dynamics.verdict import Verdict
from ..errors import BudgetExceeded, PlaneHomeoError
from ..extension.extend import extend_homeo, verify_extension
from ..geom.boolean import intersect_domains
from ..geom.polygon import domain
from ..reduction import reduce_to_connected
from .render import Layer, render_svg
from .scenario import Scenario

log = logging.getLogger(__name__)

REPORT_VERSION = "planehomeo-report/1"


def clean(obj):
    """JSON-safe copy with floats rounded to 12 decimals and non-finite values as null."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return round(v, 12) if math.isfinite(v) else None
    return obj


@dataclass
class RunContext:
    scenario: Scenario
    out: Path
    seed: int
    prefix: str
    gridN: int | None
    max_iter: int | None
    tol: float | None
    f: object = None
    components: list = field(default_factory=list)
    extended: object = None
    failures: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    def fail(self, step: str, message: str):
        self.failures.append({"seed": self.seed, "step": step, "message": message})

    def path(self, name: str) -> Path:
        p = self.out / f"{self.prefix}{name}"
        self.artifacts.append(p.name)
        return p


def _component(ctx: RunContext, step: dict):
    i = step.get("component", 0)
    if i >= len(ctx.components):
        raise PlaneHomeoError(f"component {i} requested but only {len(ctx.components)} exist")
    return ctx.components[i]


def _step_intersect(ctx: RunContext, step: dict) -> dict:
    f = ctx.f
    comps = ctx.components
    render_svg([Layer(f.domain, "D", "D"), Layer(f.image, "E", "E")] +
               [Layer(c, "component", f"C{i}") for i, c in enumerate(comps)], ctx.path("scene.svg"))
    return {"components": [{"area": c.area, "alpha": len(c.pieces_with("alpha")), "beta": len(c.pieces_with("beta")),
                            "partition_ok": c.check_partition(), "cyclic_order_ok": c.check_cyclic_order()}
                           for c in comps]}


def _step_fixed(ctx: RunContext, step: dict) -> dict:
    region = ctx.f.domain if step.get("region", "domain") == "domain" else _component(ctx, step)
    tol = ctx.tol or step.get("tol", 1e-10)
    try:
        fp = find_fixed_points(ctx.f, region, tol=tol, gridN=ctx.gridN or step.get("gridN", 200))
        budget = False
    except BudgetExceeded as exc:
        fp, budget = exc.partial, True
        ctx.fail("fixed_points", str(exc))
    return {"count": len(fp), "certificates": [c.to_json() for c in fp], "margin": fp.margin,
            "truncated": fp.truncated, "rigorous": fp.rigorous, "budgetExceeded": budget}


def _step_periodic(ctx: RunContext, step: dict) -> dict:
    region = ctx.f.domain if step.get("region", "domain") == "domain" else _component(ctx, step)
    tol = ctx.tol or step.get("tol", 1e-10)
    out = {}
    for k in step.get("periods", [2]):
        try:
            orbits = find_periodic(ctx.f, region, k, tol=tol, components=ctx.components)
        except BudgetExceeded as exc:
            orbits = exc.partial or []
            ctx.fail("periodic", str(exc))
        out[str(k)] = [o.to_json() | {"components": len(set(o.componentItinerary))} for o in orbits]
    return {"orbits": out}


def _step_verdict(ctx: RunContext, step: dict) -> dict:
    recs = []
    for i, C in enumerate(ctx.components):
        rec = theorem_verdict(ctx.f, C, K_max=step.get("K_max", 6), tol=ctx.tol or step.get("tol", 1e-10),
                              components=ctx.components)
        if rec.verdict is not Verdict.CONSISTENT:
            ctx.fail("verdict", f"component {i}: {rec.verdict.value}")
        recs.append(rec.to_json())
    return {"verdicts": recs}


def _step_extend(ctx: RunContext, step: dict) -> dict:
    waive = step.get("waive_fixed_point_free", False)
    F = extend_homeo(ctx.f, density=step.get("density", 256), waive_fixed_point_free=waive)
    ctx.extended = F
    rep = verify_extension(F, nSamples=step.get("nSamples", 10_000), seed=ctx.seed,
                           gridN=ctx.gridN or step.get("gridN", 200))
    for c in rep.checks:
        if not c.passed and not (waive and c.name == "fixed_point_margin"):
            ctx.fail("extend", f"{c.name} failed: value {c.value}")
    F.partition.dump(ctx.path("partition.json"))
    render_svg([Layer(F.partition, "arcs", "arcs"), Layer(F.D, "D", "D"), Layer(F.E, "E", "E")],
               ctx.path("partition.svg"), clip_partition=2.0 * F.partition.D.diameter)
    return {"truncationRadius": F.truncationRadius, "arcs": F.partition.n_arcs, "audit": rep.to_json()}


def _step_reduce(ctx: RunContext, step: dict) -> dict:
    idx = [step["component"]] if "component" in step else range(len(ctx.components))
    out = []
    for i in idx:
        C = ctx.components[i]
        r = reduce_to_connected(ctx.f, C)
        rc = r.reduced_components()
        sep = r.half_disk_separation()
        ok = len(rc) == 1 and abs(rc[0].area - C.area) <= 1e-9 * max(1.0, C.area) and sep > 0
        if not ok:
            ctx.fail("reduce", f"component {i}: reduced intersection has {len(rc)} components")
        render_svg([Layer(ctx.f.domain, "D", "D"), Layer(ctx.f.image, "E", "E"), Layer(r.reducedImage, "Et", "Et")],
                   ctx.path(f"reduction-{i}.svg"))
        out.append({"component": i, "gammas": len(r.gammaArcs), "bumpHeights": r.bumpHeights,
                    "halfDiskSeparation": sep if math.isfinite(sep) else None,
                    "reducedComponents": len(rc), "ok": ok})
    return {"reductions": out}


def _step_escape(ctx: RunContext, step: dict) -> dict:
    gridN = ctx.gridN or step.get("gridN", 200)
    out = []
    for i, C in enumerate(ctx.components):
        mi = ctx.max_iter or step.get("maxIter", "auto")
        if mi == "auto":
            m, _ = grid_margin(ctx.f, C, gridN)
            mi = int(math.ceil(10 * C.domain.diameter / m)) if m and m > 0 else 1000
            mi = min(mi, 100_000)
        field_ = escape_map(ctx.f, C, gridN=gridN, maxIter=int(mi))
        ctx.path(f"escape-{i}.csv").write_text(field_.to_csv())
        render_svg([Layer(C, "component", f"C{i}"), Layer(field_, "escape", "escape")], ctx.path(f"escape-{i}.svg"))
        out.append({"component": i, "maxIter": int(mi), "nonEscaping": field_.n_non_escaping,
                    "maxTime": field_.max_time})
    return {"fields": out}


def _step_free_disk(ctx: RunContext, step: dict) -> dict:
    if ctx.extended is None:
        raise PlaneHomeoError("free_disk needs a preceding extend step")
    U = domain(step["U"])
    res = free_disk_check(ctx.extended, U, n=step.get("n", 5))
    if res.precondition and not res.ok:
        ctx.fail("free_disk", f"images {res.witness} intersect")
    return {"ok": res.ok, "precondition": res.precondition, "witness": res.witness, "minDistance": res.min_distance}


STEPS = {"intersect": _step_intersect, "fixed_points": _step_fixed, "periodic": _step_periodic,
         "verdict": _step_verdict, "extend": _step_extend, "reduce": _step_reduce, "escape": _step_escape,
         "free_disk": _step_free_disk}


def _check_expect(ctx: RunContext, expect: dict, steps: dict):
    if "components" in expect and len(ctx.components) != expect["components"]:
        ctx.fail("expect", f"expected {expect['components']} components, found {len(ctx.components)}")
    fp = steps.get("fixed_points")
    if fp is not None:
        if "fixed_points" in expect and fp["count"] != expect["fixed_points"]:
            ctx.fail("expect", f"expected {expect['fixed_points']} fixed points, found {fp['count']}")
        if "fixed_points_min" in expect and fp["count"] < expect["fixed_points_min"]:
            ctx.fail("expect", f"expected at least {expect['fixed_points_min']} fixed points, found {fp['count']}")
    per = steps.get("periodic", {}).get("orbits", {})
    for k, n in expect.get("periodic", {}).items():
        if len(per.get(k, [])) != n:
            ctx.fail("expect", f"expected {n} period-{k} orbits, found {len(per.get(k, []))}")
    for k, n in expect.get("periodic_min", {}).items():
        if len(per.get(k, [])) < n:
            ctx.fail("expect", f"expected at least {n} period-{k} orbits, found {len(per.get(k, []))}")
    if "multi_component_orbit" in expect:
        has = any(o["components"] > 1 for v in per.values() for o in v)
        if has != expect["multi_component_orbit"]:
            ctx.fail("expect", f"multi-component orbit expected {expect['multi_component_orbit']}, found {has}")
    if "non_escaping" in expect:
        for fld in steps.get("escape", {}).get("fields", []):
            if fld["nonEscaping"] != expect["non_escaping"]:
                ctx.fail("expect", f"component {fld['component']}: {fld['nonEscaping']} non-escaping cells")


@dataclass
class RunResult:
    exit_code: int
    report: dict
    out: Path


def run(scenario: Scenario, out_dir, seed: int | None = None, gridN: int | None = None,
        max_iter: int | None = None, tol: float | None = None) -> RunResult:
    """Execute the scenario's analysis steps and write report.json plus figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [seed] if seed is not None else (scenario.seeds if scenario.seeded else [scenario.seeds[0]])
    runs, failures, artifacts = [], [], []
    for s in seeds:
        ctx = RunContext(scenario, out, s, f"seed{s}-" if len(seeds) > 1 else "", gridN, max_iter, tol)
        entry = {"seed": s, "steps": {}}
        try:
            gen = scenario.build(s)
            ctx.f = gen.map
            entry["params"] = gen.params
            entry["planted"] = gen.planted
            ctx.components = intersect_domains(ctx.f.domain, ctx.f.image)
            entry["nComponents"] = len(ctx.components)
            for step in scenario.analysis:
                op = step["op"]
                log.info("seed %s: %s", s, op)
                try:
                    entry["steps"][op] = STEPS[op](ctx, step)
                except PlaneHomeoError as exc:
                    ctx.fail(op, f"{type(exc).__name__}: {exc}")
            _check_expect(ctx, scenario.expect, entry["steps"])
        except PlaneHomeoError as exc:
            ctx.fail("build", f"{type(exc).__name__}: {exc}")
        runs.append(entry)
        failures += ctx.failures
        artifacts += ctx.artifacts
    code = 0 if not failures else 1
    report = clean({"schema": REPORT_VERSION, "scenario": scenario.name, "exitCode": code, "runs": runs,
                    "failures": failures, "artifacts": sorted(artifacts + ["report.json"])})
    (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    return RunResult(code, report, out)
