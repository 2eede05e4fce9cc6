"""JSON and CSV formats for operators, decompositions, witness reports and scans.

Complex numbers are written as ``[re, im]`` pairs; matrices are row-major
with the basis index ``i = d_B * a + b``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidOperatorError
from .operators import DensityMatrix, HermitianOperator, ProductVector

READ_HERMITIAN_TOL = 1e-9


def complex_array_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_array_from_json(obj) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.shape[-1] != 2:
        raise InvalidOperatorError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def operator_to_json(op: HermitianOperator) -> dict:
    return {"dims": list(op.dims.as_tuple()), "matrix": complex_array_to_json(op.matrix)}


def operator_from_json(obj: dict, *, state: bool = False) -> HermitianOperator:
    """Parse the operator schema; ``state=True`` also demands PSD and unit trace."""
    try:
        dims = obj["dims"]
        m = complex_array_from_json(obj["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidOperatorError(f"malformed operator JSON: {exc}") from exc
    if len(dims) != 2:
        raise InvalidOperatorError("dims must be [d_A, d_B]")
    cls = DensityMatrix if state else HermitianOperator
    return cls(m, dims, tol=READ_HERMITIAN_TOL)


def load_operator(path, *, state: bool = False) -> HermitianOperator:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidOperatorError(f"cannot read operator file {path}: {exc}") from exc
    return operator_from_json(obj, state=state)


def product_vector_to_json(v: ProductVector) -> dict:
    return {"e": complex_array_to_json(v.e), "f": complex_array_to_json(v.f)}


def product_vector_from_json(obj: dict) -> ProductVector:
    return ProductVector(complex_array_from_json(obj["e"]), complex_array_from_json(obj["f"]))


def decomposition_to_json(dec) -> dict:
    return {
        "p": dec.p,
        "components": [{"weight": w, **product_vector_to_json(v)} for w, v in dec.separable_part],
        "delta": None if dec.edge_part is None else operator_to_json(dec.edge_part),
        "steps": [
            {
                "lambda": s.lam,
                "rank_before": list(s.rank_before),
                "rank_after": list(s.rank_after),
                **product_vector_to_json(s.vector),
            }
            for s in dec.steps
        ],
    }


def zero_set_to_json(zs) -> dict:
    return {"span_dim": zs.span_dim, "vectors": [product_vector_to_json(v) for v in zs.vectors]}


def report_to_json(report) -> dict:
    return {
        "witness": operator_to_json(report.witness),
        "zero_set": zero_set_to_json(report.zero_set),
        "zero_set_pt": zero_set_to_json(report.zero_set_pt),
        "span_pw": report.span_pw,
        "span_pwt": report.span_pwt,
        "optimal_certificate": report.optimal_certificate,
        "nd_certificate": (None if report.nd_certificate is None
                           else operator_to_json(report.nd_certificate)),
        "iterations": [
            {
                "candidate": s.candidate,
                "lambda0": s.lambda0,
                "span_pw": s.span_pw,
                "span_pwt": s.span_pwt,
                "halvings": s.halvings,
            }
            for s in report.steps
        ],
    }


def choi_map_to_json(m) -> dict:
    return {"d_in": m.d_in, "d_out": m.d_out, "choi": operator_to_json(m.choi)}


def choi_map_from_json(obj: dict):
    from .maps import ChoiMap

    return ChoiMap(operator_from_json(obj["choi"]), int(obj["d_in"]), int(obj["d_out"]))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


SCAN_COLUMNS = ["b_prime", "tr_W_rho", "min_eig_map", "detected_by_witness", "detected_by_map"]


def scan_to_csv(row) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for b, tr, mn, dw, dm in zip(row.grid, row.tr_W_rho, row.min_eig_map,
                                 row.detected_by_witness, row.detected_by_map):
        w.writerow([repr(float(b)), repr(float(tr)), repr(float(mn)), str(dw).lower(),
                    str(dm).lower()])
    return buf.getvalue()


def scan_header(row, seed: int) -> dict:
    return {
        "b_source": row.b_source,
        "seed": int(seed),
        "settings": row.settings,
        "grid_points": len(row.grid),
        "b_detected_max_witness": row.b_detected_max_witness,
        "b_detected_max_map": row.b_detected_max_map,
    }
