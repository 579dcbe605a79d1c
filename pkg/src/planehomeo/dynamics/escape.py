"""Escape-time fields over a component."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .fixed_points import as_region

NON_ESCAPING = -1
OUTSIDE = -2


@dataclass(frozen=True)
class EscapeField:
    """Per-cell least n >= 1 with f^n(centre) outside C.

    ``times`` is (gridN, gridN) indexed [row (y), column (x)]; NON_ESCAPING
    marks cells still in C after ``maxIter`` steps, OUTSIDE marks cells whose
    centre is not in C.
    """

    xs: np.ndarray
    ys: np.ndarray
    times: np.ndarray
    maxIter: int

    @property
    def inside(self) -> np.ndarray:
        return self.times != OUTSIDE

    @property
    def n_non_escaping(self) -> int:
        return int(np.count_nonzero(self.times == NON_ESCAPING))

    @property
    def max_time(self) -> int:
        t = self.times[self.times > 0]
        return int(t.max()) if t.size else 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("row,col,x,y,time\n")
        for i, y in enumerate(self.ys):
            for j, x in enumerate(self.xs):
                t = int(self.times[i, j])
                if t != OUTSIDE:
                    buf.write(f"{i},{j},{x:.6f},{y:.6f},{t}\n")
        return buf.getvalue()


def escape_map(f, C, gridN: int = 200, maxIter: int = 1000) -> EscapeField:
    """Escape times of cell centres of a gridN x gridN lattice over the bounding box of C."""
    dom = as_region(C)
    lo, hi = dom.vertices.min(axis=0), dom.vertices.max(axis=0)
    cell = (hi - lo) / gridN
    xs = lo[0] + cell[0] * (np.arange(gridN) + 0.5)
    ys = lo[1] + cell[1] * (np.arange(gridN) + 0.5)
    G = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    times = np.full(len(G), OUTSIDE, dtype=np.int64)
    inC = dom.contains(G, closed=True)
    times[inC] = NON_ESCAPING
    idx = np.nonzero(inC)[0]
    x = G[idx]
    for n in range(1, maxIter + 1):
        if not len(idx):
            break
        x = f.forward(x)
        still = np.all(np.isfinite(x), axis=1)
        still[still] = dom.contains(x[still], closed=True)
        times[idx[~still]] = n
        idx, x = idx[still], x[still]
    return EscapeField(xs, ys, times.reshape(gridN, gridN), int(maxIter))
