"""Diagnostic time series emitted by the evolution loop.

One row per diagnostic event. The CSV-visible columns are pinned (the
plotting side consumes them by name); momentum is tracked in memory for
the conservation audit but deliberately kept out of the CSV header.
Variance and its rate are NaN on rows where the boundary-mass guard
declared them untrustworthy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLUMNS = (
    "t", "mass", "energy", "grad_sq", "l4_4", "eta",
    "variance", "rprime", "z_R", "eta_geq_R", "A_R_bound",
)


@dataclass
class DiagnosticSeries:
    rows: list = field(default_factory=list)       # dicts keyed by COLUMNS
    momentum: list = field(default_factory=list)   # (Px, Py, Pz) per row

    def append(self, momentum=(0.0, 0.0, 0.0), **kv):
        missing = set(COLUMNS) - kv.keys()
        if missing:
            raise ValueError(f"diagnostic row missing {sorted(missing)}")
        self.rows.append({k: float(kv[k]) for k in COLUMNS})
        self.momentum.append(tuple(float(p) for p in momentum))

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return np.array([r[name] for r in self.rows])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")
