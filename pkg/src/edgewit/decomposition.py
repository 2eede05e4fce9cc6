"""Separable-plus-edge decomposition of PPT states by product-vector subtraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError, RangeCriterionError
from .operators import (
    PSD_TOL,
    RANK_TOL,
    DensityMatrix,
    HermitianOperator,
    ProductVector,
    SeedLike,
    _dims,
    as_rng,
    partial_trace,
    partial_transpose,
    ppt_check,
    pseudo_inverse,
    rank,
)
from .product_search import (
    DEFAULT_RESTARTS,
    ZERO_TOL,
    minimize_range_objective,
    range_kernels,
)

MAX_REJECTIONS = 50
MIN_LAMBDA = 1e-12
CONSUMED_TOL = 1e-12


@dataclass(frozen=True)
class SubtractionStep:
    vector: ProductVector
    lam: float
    rank_before: tuple[int, int]
    rank_after: tuple[int, int]


@dataclass
class EdgeDecomposition:
    """``rho = (1 - p) * sum_k w_k |e_k,f_k><e_k,f_k| + p * delta``."""

    p: float
    separable_part: list  # of (weight, ProductVector)
    edge_part: DensityMatrix | None
    steps: list = field(default_factory=list)

    def separable_matrix(self) -> np.ndarray | None:
        if not self.separable_part:
            return None
        return sum(w * np.outer(v.vector, v.vector.conj()) for w, v in self.separable_part)

    def reconstruct(self) -> np.ndarray:
        total = 0
        sep = self.separable_matrix()
        if sep is not None:
            total = total + (1 - self.p) * sep
        if self.edge_part is not None:
            total = total + self.p * self.edge_part.matrix
        return np.asarray(total)


class SubspacePair(NamedTuple):
    """Orthonormal bases (as column arrays) of two subspaces of H_A (x) H_B."""

    H_a: np.ndarray
    H_b: np.ndarray


class SubspaceChecks(NamedTuple):
    cond_i: bool
    cond_ii: bool
    cond_iii: bool


def _ranks(rho: HermitianOperator, rank_tol: float) -> tuple[int, int]:
    return rank(rho, rank_tol), rank(partial_transpose(rho, "B"), rank_tol)


def _min_eigs(m: np.ndarray, dims) -> tuple[float, float]:
    a, b = dims.as_tuple()
    t = m.reshape(a, b, a, b).transpose(0, 3, 2, 1).reshape(a * b, a * b)
    return np.linalg.eigvalsh(m)[0], np.linalg.eigvalsh(t)[0]


def subtraction_weight(rho: HermitianOperator, v: ProductVector,
                       rank_tol: float = RANK_TOL) -> float:
    """``min[1/<v|rho^+|v>, 1/<v*|(rho^T_B)^+|v*>]`` with pseudo-inverses on the ranges."""
    x1 = v.expectation(pseudo_inverse(rho, rank_tol))
    x2 = v.partial_conjugate().expectation(pseudo_inverse(partial_transpose(rho, "B"), rank_tol))
    return min(1.0 / x1, 1.0 / x2)


def subtract_product(rho: DensityMatrix, v: ProductVector, *, zero_tol: float = ZERO_TOL,
                     rank_tol: float = RANK_TOL, psd_tol: float = PSD_TOL):
    """Remove the largest admissible multiple of ``|v><v|`` from ``rho``.

    Returns ``(lam, rho_next)`` where ``rho = lam |v><v| + (1 - lam) rho_next``.
    ``rho_next`` is ``None`` when the subtraction consumes the whole state.
    The weight is clipped (by bisection) if rounding would push either
    ``rho_next`` or its partial transpose below ``-psd_tol``.
    """
    if not ppt_check(rho, psd_tol).is_ppt:
        raise PreconditionError("subtraction is defined for PPT states only")
    k1, k2 = range_kernels(rho, rank_tol)
    out1 = v.expectation(k1)
    out2 = v.partial_conjugate().expectation(k2)
    if out1 > zero_tol or out2 > zero_tol:
        raise RangeCriterionError(
            f"vector leaves R(rho) or R(rho^T_B) (kernel weights {out1:.3e}, {out2:.3e})"
        )
    lam = subtraction_weight(rho, v, rank_tol)
    if lam >= 1 - CONSUMED_TOL:
        return 1.0, None
    proj = np.outer(v.vector, v.vector.conj())

    def admissible(x):
        # half the PSD floor, measured on the renormalized remainder, so that
        # rounding in the renormalization cannot push it over the floor
        return min(_min_eigs(rho.matrix - x * proj, rho.dims)) >= -0.5 * psd_tol * (1 - x)

    if not admissible(lam):
        lo, hi = 0.0, lam
        for _ in range(60):
            mid = (lo + hi) / 2
            if admissible(mid):
                lo = mid
            else:
                hi = mid
        lam = lo
    m = rho.matrix - lam * proj
    if lam < MIN_LAMBDA:
        raise RangeCriterionError(f"subtraction weight collapsed to {lam:.3e} after clipping")
    if 1 - lam <= CONSUMED_TOL:
        return lam, None
    return lam, _renormalize(m, rho.dims)


def _renormalize(m: np.ndarray, dims) -> DensityMatrix:
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def decompose_edge(rho: DensityMatrix, restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0, *,
                   zero_tol: float = ZERO_TOL, rank_tol: float = RANK_TOL) -> EdgeDecomposition:
    """Split a PPT state into a separable mixture plus an edge remainder.

    Product vectors are removed greedily (best restart of each search) until
    no admissible one remains.  The resulting ``p`` is an upper bound, not
    the minimal edge weight.
    """
    if not ppt_check(rho).is_ppt:
        raise PreconditionError("edge decomposition needs a PPT state")
    rng = as_rng(seed)
    current: DensityMatrix | None = rho
    mass = 1.0
    components: list[tuple[float, ProductVector]] = []
    steps: list[SubtractionStep] = []
    r0 = _ranks(rho, rank_tol)
    bound = r0[0] + r0[1]
    while current is not None and len(steps) <= bound:
        before = _ranks(current, rank_tol)
        step = _next_subtraction(current, restarts, rng, zero_tol, rank_tol)
        if step is None:
            break
        v, lam, nxt = step
        components.append((mass * lam, v))
        after = (0, 0) if nxt is None else _ranks(nxt, rank_tol)
        steps.append(SubtractionStep(v, lam, before, after))
        mass *= 1 - lam
        current = nxt
    total = sum(w for w, _ in components)
    sep = [(w / total, v) for w, v in components]
    if current is None:
        return EdgeDecomposition(0.0, sep, None, steps)
    return EdgeDecomposition(mass, sep, current, steps)


def _next_subtraction(rho, restarts, rng, zero_tol, rank_tol):
    k1, k2 = range_kernels(rho, rank_tol)
    for _ in range(MAX_REJECTIONS):
        res = minimize_range_objective(k1, k2, restarts, rng)
        if res.value > zero_tol:
            return None
        try:
            lam, nxt = subtract_product(rho, res.vector, zero_tol=zero_tol, rank_tol=rank_tol)
        except RangeCriterionError:
            continue
        return res.vector, lam, nxt
    return None


def is_edge(delta: DensityMatrix, restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0, *,
            zero_tol: float = ZERO_TOL, rank_tol: float = RANK_TOL) -> bool:
    """Edge test for a PPT state via the range criterion.

    In 2x2 and 2x3 every PPT state is separable, so the answer there is
    always ``False``.
    """
    if not ppt_check(delta).is_ppt:
        raise PreconditionError("edge states are PPT by definition")
    if delta.dims.total <= 6:
        return False
    res = minimize_range_objective(*range_kernels(delta, rank_tol), restarts, seed)
    return res.value > zero_tol


def _orthonormal(basis, d: int) -> np.ndarray:
    B = np.asarray(basis, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != d and B.shape[1] == d:
        B = B.T
    return B


def subspace_projector(basis: np.ndarray, dims) -> HermitianOperator:
    B = _orthonormal(basis, _dims(dims).total)
    return HermitianOperator(B @ B.conj().T, dims)


def _range_basis(m: np.ndarray, tol: float) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return v[:, w > tol * max(1.0, np.abs(w).max())]


def _same_range(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    bx, by = _range_basis(x, tol), _range_basis(y, tol)
    if bx.shape[1] != by.shape[1]:
        return False
    return np.linalg.norm(bx @ bx.conj().T - by @ by.conj().T) <= 1e-8


def validate_subspace_pair(pair: SubspacePair, dims, restarts: int = DEFAULT_RESTARTS,
                           seed: SeedLike = 0, *, zero_tol: float = ZERO_TOL,
                           rank_tol: float = RANK_TOL) -> SubspaceChecks:
    """Check the three conditions on a pair of "strange" subspaces.

    (i) no ``|e,f>`` in ``H_a`` with ``|e,f*>`` in ``H_b``;
    (ii) equal ranges of the B-reductions of both projectors, and of the
    A-reduction of ``P_a`` with the conjugated A-reduction of ``P_b``;
    (iii) each subspace is larger than the ranks of both its reductions.
    """
    dims = _dims(dims)
    d = dims.total
    Pa = subspace_projector(pair.H_a, dims)
    Pb = subspace_projector(pair.H_b, dims)
    eye = np.eye(d)
    Ka = HermitianOperator(eye - Pa.matrix, dims)
    Kb = HermitianOperator(eye - Pb.matrix, dims)
    res = minimize_range_objective(Ka, Kb, restarts, seed)
    cond_i = res.value > zero_tol

    trB_a, trB_b = partial_trace(Pa, "B"), partial_trace(Pb, "B")
    trA_a, trA_b = partial_trace(Pa, "A"), partial_trace(Pb, "A")
    cond_ii = _same_range(trB_a, trB_b, rank_tol) and _same_range(trA_a, trA_b.conj(), rank_tol)

    def _big_enough(P, trA, trB):
        dim = int(round(P.trace()))
        rA = _range_basis(trA, rank_tol).shape[1]
        rB = _range_basis(trB, rank_tol).shape[1]
        return dim > max(rA, rB)

    cond_iii = _big_enough(Pa, trA_a, trB_a) and _big_enough(Pb, trA_b, trB_b)
    return SubspaceChecks(bool(cond_i), bool(cond_ii), bool(cond_iii))
