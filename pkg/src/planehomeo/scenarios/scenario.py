"""Scenario files: schema validation and map construction."""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..errors import SchemaError, VersionError
from ..geom.polygon import domain
from ..pl.homeo import PLHomeo, build_pl_homeo
from ..pl.mesh import Triangulation, boundary_loops
from .generators import GENERATORS, Generated

SCHEMA_VERSION = "planehomeo/1"


def schema() -> dict:
    text = resources.files("planehomeo.scenarios").joinpath("schema/planehomeo-1.json").read_text()
    return json.loads(text)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


@dataclass
class Scenario:
    name: str
    map_spec: dict
    analysis: list[dict]
    seeds: list[int] = field(default_factory=lambda: [0])
    description: str = ""
    domainD: list | None = None
    expect: dict = field(default_factory=dict)
    source: str | None = None

    @property
    def generator(self) -> str | None:
        return self.map_spec.get("generator")

    @property
    def seeded(self) -> bool:
        g = self.generator
        return g is not None and "seed" in inspect.signature(GENERATORS[g]).parameters

    def build(self, seed: int | None = None) -> Generated:
        """The PL map for one seed (the seed is ignored by unseeded generators)."""
        if self.generator is None:
            return Generated(_explicit_map(self.map_spec), {})
        fn = GENERATORS[self.generator]
        params = dict(self.map_spec.get("params", {}))
        if self.seeded:
            params["seed"] = self.seeds[0] if seed is None else seed
        try:
            return fn(**params)
        except TypeError as exc:
            raise SchemaError(str(exc), "/map/params") from exc

    def to_json(self) -> dict:
        out = {"schema": SCHEMA_VERSION, "name": self.name}
        if self.description:
            out["description"] = self.description
        if self.domainD is not None:
            out["domainD"] = self.domainD
        out["map"] = self.map_spec
        out["analysis"] = self.analysis
        out["seeds"] = self.seeds
        if self.expect:
            out["expect"] = self.expect
        return out


def _explicit_map(spec: dict) -> PLHomeo:
    V, T = spec["vertices"], spec["triangles"]
    loops = boundary_loops(np.asarray(T))
    if len(loops) != 1:
        raise SchemaError("triangulation must be a disk", "/map/triangles")
    try:
        return build_pl_homeo(Triangulation(V, T, loops[0]), spec["targets"])
    except Exception as exc:  # geometry errors are reported against the map block
        raise SchemaError(f"{type(exc).__name__}: {exc}", "/map") from exc


def parse_scenario(doc, source: str | None = None) -> Scenario:
    if not isinstance(doc, dict):
        raise SchemaError("scenario must be a JSON object")
    version = doc.get("schema")
    if version is None:
        raise SchemaError("missing schema version", "/schema")
    if version != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", "/schema")
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        # oneOf failures: report the deepest matching sub-error
        if err.context:
            sub = max(err.context, key=lambda e: len(e.absolute_path))
            raise SchemaError(sub.message, _pointer(list(err.absolute_path) + list(sub.absolute_path)))
        raise SchemaError(err.message, _pointer(err.absolute_path))
    sc = Scenario(doc["name"], doc["map"], doc["analysis"], list(doc.get("seeds", [0])),
                  doc.get("description", ""), doc.get("domainD"), doc.get("expect", {}), source)
    if sc.domainD is not None:
        try:
            domain(sc.domainD)
        except Exception as exc:
            raise SchemaError(f"{type(exc).__name__}: {exc}", "/domainD") from exc
    return sc


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file; a bare gallery name is looked up in the gallery."""
    p = Path(path)
    if not p.exists():
        g = gallery_path(str(path))
        if g is None:
            raise FileNotFoundError(path)
        p = g
    text = p.read_text()
    if not text.strip():
        raise SchemaError("empty scenario file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    return parse_scenario(doc, str(p))


def gallery_dir() -> Path:
    return Path(str(resources.files("planehomeo.scenarios").joinpath("gallery")))


def gallery_names() -> list[str]:
    return sorted(p.stem for p in gallery_dir().glob("*.json"))


def gallery_path(name: str) -> Path | None:
    name = name[:-5] if name.endswith(".json") else name
    p = gallery_dir() / f"{name}.json"
    return p if p.exists() else None
