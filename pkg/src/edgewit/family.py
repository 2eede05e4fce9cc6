"""The 2 x 4 PPT entangled family rho_b and detection scans over it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .operators import DensityMatrix

DIMS = (2, 4)


def default_grid(steps: int = 39) -> list[float]:
    """Open grid ``{1/(steps+1), ..., steps/(steps+1)}`` (39 points -> step 0.025)."""
    return [k / (steps + 1) for k in range(1, steps + 1)]


def rho_b_matrix(b: float) -> np.ndarray:
    """8x8 matrix of the 2x4 Horodecki state.

    Basis order ``|0,0>, ..., |0,3>, |1,0>, ..., |1,3>``.  The upper-left
    block is ``b * 1_4``; ``|0,j>`` couples to ``|1,j+1>`` with weight ``b``
    for ``j = 0, 1, 2``; the ``|1,0>, |1,3>`` sub-block carries
    ``(1+b)/2`` on the diagonal and ``sqrt(1-b^2)/2`` off it.  Everything is
    divided by ``7b + 1``.
    """
    if not 0.0 <= b <= 1.0:
        raise ParameterError(f"b must lie in [0, 1], got {b!r}")
    m = np.zeros((8, 8))
    for j in range(4):
        m[j, j] = b
    for j in range(3):
        m[j, 4 + j + 1] = m[4 + j + 1, j] = b
        m[4 + j + 1, 4 + j + 1] = b
    s = np.sqrt(1.0 - b * b) / 2
    m[4, 4] = m[7, 7] = (1.0 + b) / 2
    m[4, 7] = m[7, 4] = s
    return m / (7 * b + 1)


def rho_b(b: float) -> DensityMatrix:
    return DensityMatrix(rho_b_matrix(b), DIMS)


@dataclass
class FamilyScanRow:
    b_source: float
    grid: list
    tr_W_rho: list
    min_eig_map: list
    b_detected_max_witness: float | None
    b_detected_max_map: float | None
    settings: dict = field(default_factory=dict)

    @property
    def detected_by_witness(self) -> list[bool]:
        return [v < 0 for v in self.tr_W_rho]

    @property
    def detected_by_map(self) -> list[bool]:
        return [v < 0 for v in self.min_eig_map]


def scan_family(b_source: float, grid=None, optimize: bool = False,
                restarts: int = 200, seed: int = 0, safety: float = 0.9) -> FamilyScanRow:
    """Build a witness from ``rho_b(b_source)`` and evaluate it on the family grid.

    Each stage draws from its own random substream of ``seed``.  The map
    column is the smallest eigenvalue of the extended positive map applied
    to each grid state.
    """
    from .decomposition import is_edge
    from .maps import detect_via_map, witness_to_map
    from .operators import substream
    from .witness import construct_edge_witness, detects, normalized, optimize_witness

    if not 0.0 < b_source < 1.0:
        raise ParameterError(f"b_source must lie in (0, 1), got {b_source!r}")
    grid = default_grid() if grid is None else sorted(float(b) for b in grid)
    delta = rho_b(b_source)
    if not is_edge(delta, restarts, substream(seed, 0)):
        raise ParameterError(f"rho_b({b_source}) did not pass the edge test")
    wc = construct_edge_witness(delta, safety=safety, restarts=restarts,
                                seed=substream(seed, 1), check_edge=False)
    if optimize:
        report = optimize_witness(wc.W, restarts=restarts, seed=substream(seed, 2),
                                  certificate_candidates=[delta])
        W = report.witness
    else:
        W = normalized(wc.W)
    m = witness_to_map(W)
    states = [rho_b(b) for b in grid]
    tr = [detects(W, r) for r in states]
    mins = [detect_via_map(m, r) for r in states]
    det_w = [b for b, v in zip(grid, tr) if v < 0]
    det_m = [b for b, v in zip(grid, mins) if v < 0]
    settings = {"optimize": bool(optimize), "restarts": int(restarts), "safety": float(safety)}
    return FamilyScanRow(float(b_source), grid, tr, mins,
                         max(det_w) if det_w else None, max(det_m) if det_m else None,
                         settings)
