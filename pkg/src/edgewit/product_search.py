"""Minimization of Hermitian forms over normalized product vectors.

All searches use the same alternating ("see-saw") scheme.  For fixed ``e``
the objective is a Hermitian form in ``f``, minimized by the lowest
eigenvector of a ``d_B x d_B`` contraction; then the roles swap.  Restarts
are vectorized: one batched ``eigh`` call advances every restart at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import NotAWitnessError, ParameterError, PreconditionError
from .operators import (
    HermitianOperator,
    ProductVector,
    SeedLike,
    as_rng,
    partial_transpose,
    ppt_check,
    random_product_batch,
    spectral_split,
)

ZERO_TOL = 1e-9
SPAN_TOL = 1e-8
DUPLICATE_TOL = 1e-8
DEFAULT_RESTARTS = 200
MAX_SWEEPS = 200
SWEEP_TOL = 1e-12


@dataclass(frozen=True)
class ProductMinResult:
    value: float
    argmin: ProductVector
    restarts_used: int
    converged: bool


@dataclass(frozen=True)
class ZeroSet:
    vectors: list = field(default_factory=list)
    span_dim: int = 0

    def __len__(self):
        return len(self.vectors)


@dataclass
class SeesawRun:
    """Raw batched output: one row per restart."""

    values: np.ndarray
    E: np.ndarray
    F: np.ndarray
    converged: np.ndarray
    sweeps: int
    history: list | None = None


def _f_matrix(T1, T2, E):
    # f-form for fixed e: <e|T1|e> + conj(<e|T2|e>)
    A = np.einsum("ra,abcd,rc->rbd", E.conj(), T1, E)
    if T2 is not None:
        A = A + np.einsum("ra,abcd,rc->rbd", E.conj(), T2, E).conj()
    return A


def _e_matrix(T1, T2, F):
    # e-form for fixed f: <f|T1|f> + <f*|T2|f*>
    B = np.einsum("rb,abcd,rd->rac", F.conj(), T1, F)
    if T2 is not None:
        B = B + np.einsum("rb,abcd,rd->rac", F, T2, F.conj())
    return B


def _lowest(A):
    A = (A + A.conj().transpose(0, 2, 1)) / 2
    w, v = np.linalg.eigh(A)
    return w[:, 0], v[:, :, 0]


def product_form_values(T1, E, F, T2=None) -> np.ndarray:
    """Row-wise ``<e,f|T1|e,f> + <e,f*|T2|e,f*>`` for batches of ``e`` and ``f``."""
    v = np.einsum("ra,rb,abcd,rc,rd->r", E.conj(), F.conj(), T1, E, F).real
    if T2 is not None:
        v = v + np.einsum("ra,rb,abcd,rc,rd->r", E.conj(), F, T2, E, F.conj()).real
    return v


def seesaw(T1, E0, T2=None, *, max_sweeps: int = MAX_SWEEPS, tol: float = SWEEP_TOL,
           record: bool = False) -> SeesawRun:
    """Alternating minimization from the starting ``e`` vectors in ``E0``.

    Each sweep updates ``f`` first, then ``e``.  A restart stops moving once a
    full sweep lowers its value by less than ``tol``.  With ``record=True``
    the value after every half-step is kept (shape ``(2 * sweeps, R)``).
    """
    E = np.array(E0, dtype=complex)
    R = E.shape[0]
    F = np.zeros((R, T1.shape[1]), dtype=complex)
    values = np.full(R, np.inf)
    active = np.ones(R, dtype=bool)
    history = [] if record else None
    sweeps = 0
    while sweeps < max_sweeps and active.any():
        sweeps += 1
        idx = np.flatnonzero(active)
        _, f_new = _lowest(_f_matrix(T1, T2, E[idx]))
        F[idx] = f_new
        if record:
            h = values.copy()
            h[idx] = product_form_values(T1, E[idx], f_new, T2)
            history.append(h)
        w, e_new = _lowest(_e_matrix(T1, T2, F[idx]))
        E[idx] = e_new
        if record:
            h = h.copy()
            h[idx] = w
            history.append(h)
        done = values[idx] - w < tol
        values[idx] = w
        active[idx[done]] = False
    values = product_form_values(T1, E, F, T2)
    return SeesawRun(values, E, F, ~active, sweeps,
                     np.array(history) if record else None)


def _tensor(M: HermitianOperator) -> np.ndarray:
    return np.asarray(M.tensor())


def _check_restarts(restarts):
    if int(restarts) < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    return int(restarts)


def min_product_expectation(M: HermitianOperator, restarts: int = DEFAULT_RESTARTS,
                            seed: SeedLike = 0) -> ProductMinResult:
    """Estimate ``inf <e,f|M|e,f>`` over unit product vectors.

    The result is a multi-start local minimum.  It is an upper bound on the
    true infimum and matches it whenever some restart lands in the global
    basin; nothing here certifies that.
    """
    restarts = _check_restarts(restarts)
    rng = as_rng(seed)
    E0, _ = random_product_batch(rng, M.dims, restarts)
    run = seesaw(_tensor(M), E0)
    k = int(np.argmin(run.values))
    pv = ProductVector(run.E[k], run.F[k])
    return ProductMinResult(pv.expectation(M), pv, restarts, bool(run.converged[k]))


def sup_product_expectation(M: HermitianOperator, restarts: int = DEFAULT_RESTARTS,
                            seed: SeedLike = 0) -> ProductMinResult:
    r = min_product_expectation(-M, restarts, seed)
    return ProductMinResult(-r.value, r.argmin, r.restarts_used, r.converged)


@dataclass(frozen=True)
class RangeSearchResult:
    """Best point of ``F(e,f) = <e,f|K1|e,f> + <e,f*|K2|e,f*>``."""

    value: float
    vector: ProductVector
    first_term: float
    second_term: float


def minimize_range_objective(K1: HermitianOperator, K2: HermitianOperator,
                             restarts: int = DEFAULT_RESTARTS,
                             seed: SeedLike = 0) -> RangeSearchResult:
    """Minimize the range-criterion objective for two kernel projectors.

    ``F`` vanishes exactly at product vectors ``|e,f>`` orthogonal to
    ``R(K1)`` whose partial conjugates ``|e,f*>`` are orthogonal to ``R(K2)``.
    The best see-saw point is refined by nonlinear least squares on the
    residual vector, which converges much faster than the see-saw near
    degenerate zero manifolds.
    """
    restarts = _check_restarts(restarts)
    rng = as_rng(seed)
    E0, _ = random_product_batch(rng, K1.dims, restarts)
    run = seesaw(_tensor(K1), E0, _tensor(K2))
    k = int(np.argmin(run.values))
    V1, V2 = _range_rows(K1), _range_rows(K2)
    best = _range_result(V1, V2, ProductVector(run.E[k], run.F[k]))
    polished = _polish_range(V1, V2, best.vector)
    if polished is not None and polished.value < best.value:
        best = polished
    return best


def _range_result(V1, V2, pv: ProductVector) -> RangeSearchResult:
    # squared residual norms rather than quadratic forms: the latter bottom
    # out at ~1e-16, which is an amplitude error of ~1e-8 in the vector
    t1 = float(np.linalg.norm(V1 @ pv.vector) ** 2)
    t2 = float(np.linalg.norm(V2 @ pv.partial_conjugate().vector) ** 2)
    return RangeSearchResult(t1 + t2, pv, t1, t2)


def _polish_range(V1, V2, pv: ProductVector) -> RangeSearchResult | None:
    if V1.shape[0] + V2.shape[0] == 0:
        return None
    dA, dB = pv.dims.as_tuple()

    def unpack(x):
        e = x[:dA] + 1j * x[dA:2 * dA]
        f = x[2 * dA:2 * dA + dB] + 1j * x[2 * dA + dB:]
        return e / np.linalg.norm(e), f / np.linalg.norm(f)

    def residual(x):
        e, f = unpack(x)
        r = np.concatenate([V1 @ np.kron(e, f), V2 @ np.kron(e, f.conj())])
        return np.concatenate([r.real, r.imag])

    e, f = pv.e, pv.f
    x0 = np.concatenate([e.real, e.imag, f.real, f.imag])
    try:
        sol = least_squares(residual, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=400)
    except (ValueError, np.linalg.LinAlgError):
        return None
    if not np.all(np.isfinite(sol.x)):
        return None
    return _range_result(V1, V2, ProductVector(*unpack(sol.x)))


def _range_rows(K: HermitianOperator) -> np.ndarray:
    """Orthonormal rows spanning the range of the projector ``K``."""
    w, v = np.linalg.eigh(K.matrix)
    return v[:, w > 0.5].conj().T


def range_kernels(rho: HermitianOperator, rank_tol: float | None = None):
    """Kernel projectors of ``rho`` and ``rho^T_B``."""
    kw = {} if rank_tol is None else {"rank_tol": rank_tol}
    k1 = spectral_split(rho, **kw).kernel_projector
    k2 = spectral_split(partial_transpose(rho, "B"), **kw).kernel_projector
    return k1, k2


def range_product_search(rho: HermitianOperator, restarts: int = DEFAULT_RESTARTS,
                         seed: SeedLike = 0, zero_tol: float = ZERO_TOL,
                         rank_tol: float | None = None) -> ProductVector | None:
    """Find ``|e,f> in R(rho)`` with ``|e,f*> in R(rho^T_B)``, or ``None``."""
    if not ppt_check(rho).is_ppt:
        raise PreconditionError("range product search needs a PPT state")
    res = minimize_range_objective(*range_kernels(rho, rank_tol), restarts, seed)
    return res.vector if res.value <= zero_tol else None


def span_dimension(vectors, tol: float = SPAN_TOL) -> int:
    """Rank of the Gram matrix of the tensor vectors."""
    if len(vectors) == 0:
        return 0
    V = np.array([v.vector if isinstance(v, ProductVector) else np.asarray(v) for v in vectors])
    gram = V.conj() @ V.T
    return int(np.sum(np.linalg.eigvalsh(gram) > tol))


def dedupe(vectors, tol: float = DUPLICATE_TOL) -> list:
    """Drop vectors whose tensor overlap with an earlier one exceeds ``1 - tol``."""
    kept, tensors = [], []
    for v in vectors:
        t = v.vector
        if any(abs(np.vdot(u, t)) > 1 - tol for u in tensors):
            continue
        kept.append(v)
        tensors.append(t)
    return kept


def collect_zero_set(W: HermitianOperator, restarts: int = DEFAULT_RESTARTS,
                     seed: SeedLike = 0, zero_tol: float = ZERO_TOL,
                     known=()) -> ZeroSet:
    """Distinct product vectors with ``<e,f|W|e,f> ~ 0``.

    ``known`` vectors (e.g. zeros of a previous iterate) are re-checked
    against ``W`` and kept when they still qualify; the multi-start run adds
    whatever new zeros it lands on.
    """
    restarts = _check_restarts(restarts)
    rng = as_rng(seed)
    E0, _ = random_product_batch(rng, W.dims, restarts)
    run = seesaw(_tensor(W), E0)
    lowest = float(run.values.min())
    if lowest < -zero_tol:
        raise NotAWitnessError(
            f"operator is negative on a product vector (<e,f|W|e,f> = {lowest:.3e})"
        )
    found = [pv for pv in known if abs(pv.expectation(W)) <= zero_tol]
    for k in np.argsort(run.values, kind="stable"):
        if abs(run.values[k]) > zero_tol:
            break
        found.append(ProductVector(run.E[k], run.F[k]))
    vectors = dedupe(found)
    return ZeroSet(vectors, span_dimension(vectors))


def sampled_min(M: HermitianOperator, n: int, seed: SeedLike = 0, chunk: int = 20_000) -> float:
    """Minimum of ``<e,f|M|e,f>`` over ``n`` Haar-random product vectors."""
    rng = as_rng(seed)
    T = _tensor(M)
    best = np.inf
    for start in range(0, n, chunk):
        E, F = random_product_batch(rng, M.dims, min(chunk, n - start))
        best = min(best, float(product_form_values(T, E, F).min()))
    return best
