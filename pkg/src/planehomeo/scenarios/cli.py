"""Command-line entry point.

    planehomeo run <scenario.json> --out <dir> [--seed N] [--grid N] [--max-iter N] [--tol X]
    planehomeo gallery list
    planehomeo verify <scenario>

A scenario argument may be a path or the name of a gallery scenario.  Polygons
(``domainD`` and free-disk ``U``) are JSON arrays of ``[x, y]`` pairs, closed
implicitly.  Exit status is 0 iff every verdict is CONSISTENT, every audit
passes and every expectation in the scenario holds; 2 means the scenario could
not be loaded.  Failures are listed in report.json under ``failures``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import tempfile

from ..errors import SchemaError
from .run import run
from .scenario import gallery_names, gallery_path, load_scenario


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planehomeo", description="Fixed-point analysis of non-self plane homeomorphisms.")
    p.add_argument("-v", "--verbose", action="store_true", help="log pipeline steps to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write report.json and figures")
    r.add_argument("scenario")
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--grid", type=int, help="override gridN for margin and escape grids")
    r.add_argument("--max-iter", type=int, help="override escape maxIter")
    r.add_argument("--tol", type=float, help="override the fixed-point residual tolerance")

    g = sub.add_parser("gallery", help="gallery scenarios")
    g.add_argument("action", choices=["list"])

    v = sub.add_parser("verify", help="run a scenario in a scratch directory and print one line per failure")
    v.add_argument("scenario")
    v.add_argument("--seed", type=int)
    return p


def _load(name):
    try:
        return load_scenario(name)
    except (SchemaError, FileNotFoundError) as exc:
        where = getattr(exc, "pointer", None)
        msg = {"error": type(exc).__name__, "message": str(exc)}
        if where:
            msg["pointer"] = where
        print(json.dumps(msg), file=sys.stderr)
        return None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "gallery":
        for name in gallery_names():
            sc = load_scenario(gallery_path(name))
            print(f"{name}\t{sc.description}")
        return 0
    sc = _load(args.scenario)
    if sc is None:
        return 2
    if args.command == "run":
        res = run(sc, args.out, seed=args.seed, gridN=args.grid, max_iter=args.max_iter, tol=args.tol)
        for f in res.report["failures"]:
            print(f"FAIL seed={f['seed']} {f['step']}: {f['message']}", file=sys.stderr)
        return res.exit_code
    with tempfile.TemporaryDirectory() as tmp:
        res = run(sc, tmp, seed=args.seed)
    for f in res.report["failures"]:
        print(f"FAIL seed={f['seed']} {f['step']}: {f['message']}")
    print(f"{sc.name}: {'OK' if res.exit_code == 0 else 'FAILED'}")
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
