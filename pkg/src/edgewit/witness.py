"""Nondecomposable entanglement witnesses built from edge states, and their optimization.

A witness ``W`` is nonnegative on every product vector.  Starting from an
edge state ``delta`` the kernel projectors ``P`` (of ``delta``) and ``Q`` (of
``delta^T_B``) give ``W_delta = P + Q^T_B``, which is strictly positive on
products; shifting it down by its product-vector infimum yields a witness
that detects ``delta``.  Optimization then repeatedly subtracts decomposable
operators ``D = P' + Q'^T_B`` that vanish on the zero set of ``W``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateEdgeError,
    InvalidOperatorError,
    NotAWitnessError,
    ParameterError,
    PreconditionError,
)
from .operators import (
    PSD_TOL,
    RANK_TOL,
    DensityMatrix,
    HermitianOperator,
    ProductVector,
    SeedLike,
    as_rng,
    haar_vectors,
    identity,
    kernel_basis,
    partial_transpose,
    random_product_batch,
    sample,
    spectral_split,
)
from .product_search import (
    DEFAULT_RESTARTS,
    ZERO_TOL,
    ZeroSet,
    collect_zero_set,
    dedupe,
    min_product_expectation,
    sampled_min,
    span_dimension,
    sup_product_expectation,
)

log = logging.getLogger(__name__)

SAFETY = 0.9
VERIFY_SAMPLES = 100_000
VERIFY_TOL = 1e-8
MAX_HALVINGS = 5
LAMBDA_MIN = 1e-8
N_RANDOM_CANDIDATES = 20
LAMBDA_RESTARTS = 40
SYMMETRY_TOL = 1e-9
DETECT_TOL = 1e-10


@dataclass(frozen=True)
class WitnessConstruction:
    P: HermitianOperator
    Q: HermitianOperator
    C: HermitianOperator
    epsilon: float  # estimated inf of <e,f|P + Q^T_B|e,f>
    epsilon_used: float  # the shift actually applied (safety * epsilon, maybe halved)
    c: float
    W: HermitianOperator


@dataclass(frozen=True)
class DecomposableOperator:
    """``D = P + Q^T_B`` with ``P, Q >= 0``."""

    P: HermitianOperator
    Q: HermitianOperator

    def __post_init__(self):
        if self.P.dims != self.Q.dims:
            raise ParameterError("P and Q must act on the same space")
        for name, X in (("P", self.P), ("Q", self.Q)):
            lmin = X.eigvalsh()[0]
            if lmin < -PSD_TOL:
                raise ParameterError(f"{name} is not positive semidefinite (min eig {lmin:.3e})")

    @property
    def dims(self):
        return self.P.dims

    @property
    def operator(self) -> HermitianOperator:
        return self.P + partial_transpose(self.Q, "B")

    @classmethod
    def from_positive(cls, X: HermitianOperator) -> "DecomposableOperator":
        return cls(X, HermitianOperator(np.zeros_like(X.matrix), X.dims))


@dataclass(frozen=True)
class OptimizationStep:
    D: HermitianOperator
    lambda0: float
    span_pw: int
    span_pwt: int
    candidate: str
    halvings: int = 0


@dataclass
class WitnessReport:
    witness: HermitianOperator  # unit Frobenius norm
    zero_set: ZeroSet
    zero_set_pt: ZeroSet
    optimal_certificate: str  # "OptimalBySpan" or "Unknown"
    nd_certificate: DensityMatrix | None
    steps: list = field(default_factory=list)
    iterates: list = field(default_factory=list)  # unnormalized W_0, W_1, ...

    @property
    def span_pw(self) -> int:
        return self.zero_set.span_dim

    @property
    def span_pwt(self) -> int:
        return self.zero_set_pt.span_dim


def detects(W: HermitianOperator, rho: HermitianOperator) -> float:
    """``Tr(W rho)``; negative means ``rho`` is detected as entangled."""
    if W.dims != rho.dims:
        raise InvalidOperatorError(f"dimension mismatch: {W.dims} vs {rho.dims}")
    return float(np.einsum("ij,ji->", W.matrix, rho.matrix).real)


def normalized(W: HermitianOperator) -> HermitianOperator:
    norm = np.linalg.norm(W.matrix)
    if norm == 0:
        raise ParameterError("cannot normalize the zero operator")
    return HermitianOperator(W.matrix / norm, W.dims)


def _verified_shift(base: np.ndarray, direction: np.ndarray, amount: float, dims,
                    samples: int, seed: SeedLike) -> tuple[float, int]:
    """Largest of ``amount, amount/2, ...`` keeping ``base - t*direction`` >= 0 on sampled products."""
    rng = as_rng(seed)
    for halvings in range(MAX_HALVINGS + 1):
        W = HermitianOperator(base - amount * direction, dims)
        if samples == 0 or sampled_min(W, samples, rng) >= -VERIFY_TOL:
            return amount, halvings
        log.warning("witness check failed at shift %.3e; halving", amount)
        amount /= 2
    return 0.0, MAX_HALVINGS + 1


def construct_edge_witness(delta: DensityMatrix, C: HermitianOperator | None = None,
                           safety: float = SAFETY, restarts: int = DEFAULT_RESTARTS,
                           seed: SeedLike = 0, *, check_edge: bool = True,
                           verify_samples: int = VERIFY_SAMPLES,
                           rank_tol: float = RANK_TOL) -> WitnessConstruction:
    """Nondecomposable witness detecting the edge state ``delta``.

    ``W = P + Q^T_B - (eps'/c) C`` where ``P``/``Q`` project onto the kernels
    of ``delta``/``delta^T_B``, ``eps' = safety * inf <e,f|P + Q^T_B|e,f>``
    and ``c = sup <e,f|C|e,f>``.  The shift is halved (at most five times) if
    sampled product vectors show the witness property failing.
    """
    from .decomposition import is_edge

    if not 0 < safety <= 1:
        raise ParameterError(f"safety must lie in (0, 1], got {safety}")
    rng = as_rng(seed)
    if check_edge and not is_edge(delta, restarts, rng):
        raise PreconditionError("construct_edge_witness needs an edge state")
    C = identity(delta.dims) if C is None else C
    if detects(C, delta) <= 0:
        raise PreconditionError("Tr(delta C) must be positive")
    P = spectral_split(delta, rank_tol).kernel_projector
    Q = spectral_split(partial_transpose(delta, "B"), rank_tol).kernel_projector
    Wd = P + partial_transpose(Q, "B")
    eps = min_product_expectation(Wd, restarts, rng).value
    if eps <= 1e-8:
        raise DegenerateEdgeError(f"product infimum of P + Q^T_B is {eps:.3e}; cannot certify > 0")
    if np.allclose(C.matrix, np.eye(C.d), atol=0):
        c = 1.0
    else:
        c = sup_product_expectation(C, restarts, rng).value
    eps_used, _ = _verified_shift(Wd.matrix, C.matrix / c, safety * eps, delta.dims,
                                  verify_samples, rng)
    W = HermitianOperator(Wd.matrix - (eps_used / c) * C.matrix, delta.dims)
    return WitnessConstruction(P, Q, C, eps, eps_used, c, W)


def shift_to_tangent(W: HermitianOperator, safety: float = SAFETY,
                     restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0,
                     zero_tol: float = ZERO_TOL) -> HermitianOperator:
    """``W - safety * eps * 1`` with ``eps`` the product-vector minimum of ``W``."""
    eps = min_product_expectation(W, restarts, seed).value
    if eps < -zero_tol:
        raise NotAWitnessError(f"operator is negative on a product vector ({eps:.3e})")
    if eps <= 0:
        return W
    return HermitianOperator(W.matrix - safety * eps * np.eye(W.d), W.dims)


# -- generalized eigenvalue machinery for lambda_0 ---------------------------

def pencil_min(Wm: np.ndarray, Dm: np.ndarray, tol: float = 1e-10) -> tuple[float, np.ndarray | None]:
    """``min x^dag W x / x^dag D x`` over ``x`` outside ``K(D)``, for PSD ``W`` and ``D``.

    Directions in ``K(D)`` only enter through the Schur complement of ``W``
    onto ``R(D)``; when ``D`` is invertible this is the smallest eigenvalue
    of ``D^{-1/2} W D^{-1/2}``.
    """
    w, U = np.linalg.eigh((Dm + Dm.conj().T) / 2)
    top = w[-1]
    if top <= tol:
        return np.inf, None
    r = w > tol * top
    Wt = U.conj().T @ Wm @ U
    Wt = (Wt + Wt.conj().T) / 2
    Wrr = Wt[np.ix_(r, r)]
    if (~r).any():
        Wkk = Wt[np.ix_(~r, ~r)]
        Wkr = Wt[np.ix_(~r, r)]
        gain = np.linalg.pinv(Wkk, rcond=1e-12, hermitian=True) @ Wkr
        S = Wrr - Wkr.conj().T @ gain
    else:
        S = Wrr
    s = 1 / np.sqrt(w[r])
    M = s[:, None] * S * s[None, :]
    lam, V = np.linalg.eigh((M + M.conj().T) / 2)
    xr = s * V[:, 0]
    x = np.zeros(len(w), dtype=complex)
    x[r] = xr
    if (~r).any():
        x[~r] = -gain @ xr
    x = U @ x
    return float(lam[0]), x / np.linalg.norm(x)


def pencil_min_batch(Wb: np.ndarray, Db: np.ndarray, reg: float = 1e-13):
    """Batched ``min x^dag W x / x^dag D x``, computed as ``1 / nu_max`` of ``(D, W + eta)``.

    ``eta = reg * max(1, |W|)`` keeps singular ``W`` invertible; on ``K(D)``
    the regularized quotient is infinite, which gives the same answer as
    the Schur-complement form of :func:`pencil_min`.  Rows where ``D``
    vanishes return ``inf``.
    """
    Wb = (Wb + Wb.conj().transpose(0, 2, 1)) / 2
    Db = (Db + Db.conj().transpose(0, 2, 1)) / 2
    w, U = np.linalg.eigh(Wb)
    eta = reg * np.maximum(1.0, np.abs(w).max(axis=1, keepdims=True))
    G = U / np.sqrt(np.maximum(w, eta))[:, None, :]
    M = G.conj().transpose(0, 2, 1) @ Db @ G
    nu, Y = np.linalg.eigh((M + M.conj().transpose(0, 2, 1)) / 2)
    top = nu[:, -1]
    x = np.einsum("rij,rj->ri", G, Y[:, :, -1])
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        lam = np.where(top > 1e-300, 1.0 / np.where(top > 1e-300, top, 1.0), np.inf)
    return lam, x


def lambda0_search(W: HermitianOperator, D: HermitianOperator, restarts: int = LAMBDA_RESTARTS,
                   seed: SeedLike = 0, max_sweeps: int = 200, tol: float = 1e-13, starts=None):
    """Multi-start see-saw on the ratio ``<e,f|W|e,f> / <e,f|D|e,f>``.

    Each half step solves the pencil for every restart at once, so the
    ratio never increases along a run.  ``starts`` (rows of ``e`` vectors)
    replaces the random starts.  Returns ``(value, ProductVector)`` for the
    best run, or ``(inf, None)`` when ``D`` vanishes on every start.
    """
    from .product_search import _e_matrix, _f_matrix

    TW, TD = W.tensor(), D.tensor()
    if starts is None:
        starts, _ = random_product_batch(as_rng(seed), W.dims, restarts)
    E = np.array(starts, dtype=complex)
    R = E.shape[0]
    F = np.zeros((R, W.dims.d_B), dtype=complex)
    vals = np.full(R, np.inf)
    active = np.ones(R, dtype=bool)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        lf, f_new = pencil_min_batch(_f_matrix(TW, None, E[idx]), _f_matrix(TD, None, E[idx]))
        ok = np.isfinite(lf)
        F[idx[ok]] = f_new[ok]
        le, e_new = pencil_min_batch(_e_matrix(TW, None, F[idx]), _e_matrix(TD, None, F[idx]))
        ok = ok & np.isfinite(le)
        E[idx[ok]] = e_new[ok]
        new = np.where(ok, le, vals[idx])
        done = ~ok | (vals[idx] - new < tol * np.maximum(1.0, np.abs(new)))
        vals[idx] = np.minimum(vals[idx], new)
        active[idx[done]] = False
    if not np.isfinite(vals).any():
        return np.inf, None
    k = int(np.argmin(vals))
    pv = ProductVector(E[k], F[k])
    dv = pv.expectation(D)
    if dv <= 0:
        return np.inf, None
    return pv.expectation(W) / dv, pv


def lambda0_estimate(W: HermitianOperator, D: HermitianOperator,
                     restarts: int = LAMBDA_RESTARTS, check_restarts: int = DEFAULT_RESTARTS,
                     seed: SeedLike = 0, zero_tol: float = ZERO_TOL, max_rounds: int = 20):
    """Ratio search cross-checked by a plain product minimization of ``W - lambda D``.

    If the check finds ``<e,f|W - lambda D|e,f> < 0`` somewhere, that point
    has a smaller ratio; the ratio search restarts from it.  Returns
    ``(lambda, argmin)``.
    """
    rng = as_rng(seed)
    lam, pv = lambda0_search(W, D, restarts, rng)
    if not np.isfinite(lam):
        return lam, pv
    for _ in range(max_rounds):
        check = min_product_expectation(W - lam * D, check_restarts, rng)
        if check.value >= -zero_tol:
            break
        q = check.argmin
        ratio = q.expectation(W) / q.expectation(D)
        lam2, pv2 = lambda0_search(W, D, starts=[q.e], seed=rng)
        if lam2 < ratio:
            lam, pv = lam2, pv2
        else:
            lam, pv = ratio, q
    return lam, pv


def compute_lambda0(W: HermitianOperator, D: DecomposableOperator,
                    restarts: int = LAMBDA_RESTARTS, seed: SeedLike = 0,
                    safety: float = SAFETY) -> float:
    """Largest ``lambda`` with ``W - lambda D`` nonnegative on product vectors.

    Estimated as ``inf_e [D_e^{-1/2} W_e D_e^{-1/2}]_min`` by a see-saw over
    ``e`` and ``f``; the estimate is scaled by ``safety``.
    """
    if not isinstance(D, DecomposableOperator):
        raise ParameterError("D must be given as a DecomposableOperator (P, Q >= 0)")
    val, _ = lambda0_estimate(W, D.operator, restarts, seed=seed)
    if not np.isfinite(val):
        return 0.0
    return max(0.0, safety * val)


# -- optimization loop --------------------------------------------------------

def _complement_projector(vectors, d: int) -> np.ndarray | None:
    if not vectors:
        return np.eye(d, dtype=complex)
    V = np.array([v.vector for v in vectors]).T
    u, s, _ = np.linalg.svd(V, full_matrices=True)
    r = int(np.sum(s > 1e-4 * s[0]))
    if r >= d:
        return None
    K = u[:, r:]
    return K @ K.conj().T


def _candidates(W: HermitianOperator, zs: ZeroSet, zs_t: ZeroSet, rng, n_random: int,
                symmetric: bool):
    d = W.d
    dims = W.dims
    zero = np.zeros((d, d), dtype=complex)
    Pc = _complement_projector(zs.vectors, d) if zs.span_dim < d else None
    Qc = _complement_projector(zs_t.vectors, d) if zs_t.span_dim < d else None
    out = []
    if symmetric:
        if Pc is not None:
            out.append(("complement", Pc, Pc))
        pools = [("P", Pc)] if Pc is not None else []
    else:
        if Pc is not None or Qc is not None:
            out.append(("complement", zero if Pc is None else Pc, zero if Qc is None else Qc))
        pools = [(k, X) for k, X in (("P", Pc), ("Q", Qc)) if X is not None]
    for j in range(n_random if pools else 0):
        kind, X = pools[j % len(pools)]
        x = X @ haar_vectors(rng, 1, d)[0]
        n = np.linalg.norm(x)
        if n < 1e-12:
            continue
        x = x / n
        R = np.outer(x, x.conj())
        if symmetric:
            out.append((f"rank1-sym-{j}", R, R))
        elif kind == "P":
            out.append((f"rank1-P-{j}", R, zero))
        else:
            out.append((f"rank1-Q-{j}", zero, R))
    return [(name, DecomposableOperator(HermitianOperator(P, dims), HermitianOperator(Q, dims)))
            for name, P, Q in out]


def _stops_detecting(W: HermitianOperator, D: HermitianOperator, lam: float) -> bool:
    # A positive semidefinite result detects nothing; this happens only when W
    # itself is decomposable (e.g. D = W).
    m = W.matrix - lam * D.matrix
    return np.linalg.eigvalsh(m)[0] >= -PSD_TOL * max(1.0, np.abs(m).max())


def _zero_sets(W, restarts, rng, known, zero_tol):
    zs = collect_zero_set(W, restarts, rng, zero_tol, known=known)
    pt = dedupe([v.partial_conjugate() for v in zs.vectors])
    return zs, ZeroSet(pt, span_dimension(pt))


def optimize_witness(W: HermitianOperator, max_iters: int | None = None,
                     restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0, *,
                     n_random: int = N_RANDOM_CANDIDATES,
                     lambda_restarts: int = LAMBDA_RESTARTS,
                     verify_samples: int = VERIFY_SAMPLES,
                     zero_tol: float = ZERO_TOL,
                     certificate_candidates: Iterable[DensityMatrix] | None = None) -> WitnessReport:
    """Make ``W`` nd-finer by subtracting decomposable operators until its zero sets span.

    Every iteration collects the zero set ``p_W`` (its partial conjugates form
    ``p_{W^T_B}``), proposes decomposable ``D`` vanishing on both, and
    subtracts ``lambda_0 D`` for the candidate with the largest
    ``lambda_0``.  The loop ends with ``OptimalBySpan`` once both zero sets
    span the whole space, or ``Unknown`` once no candidate gives
    ``lambda_0 > 1e-8``.
    """
    rng = as_rng(seed)
    d = W.d
    max_iters = 2 * d if max_iters is None else int(max_iters)
    zs, zs_t = _zero_sets(W, restarts, rng, (), zero_tol)
    if zs.vectors == [] and min_product_expectation(W, restarts, rng).value < -zero_tol:
        raise NotAWitnessError("optimize_witness needs an entanglement witness")
    steps: list[OptimizationStep] = []
    iterates = [W]
    certificate = "Unknown"
    for _ in range(max_iters + 1):
        if zs.span_dim == d and zs_t.span_dim == d:
            certificate = "OptimalBySpan"
            break
        if len(steps) == max_iters:
            break
        symmetric = np.linalg.norm(W.matrix - partial_transpose(W).matrix) <= SYMMETRY_TOL
        best = None
        for name, D in _candidates(W, zs, zs_t, rng, n_random, symmetric):
            lam, pv = lambda0_estimate(W, D.operator, lambda_restarts, restarts, rng, zero_tol)
            if not np.isfinite(lam) or _stops_detecting(W, D.operator, lam):
                continue
            if best is None or lam > best[1]:
                best = (name, lam, pv, D)
        if best is None or best[1] <= LAMBDA_MIN:
            break
        name, lam, pv, D = best
        Dm = D.operator.matrix
        lam, halvings = _verified_shift(W.matrix, Dm, lam, W.dims, verify_samples, rng)
        if lam <= LAMBDA_MIN:
            break
        W = HermitianOperator(W.matrix - lam * Dm, W.dims)
        known = list(zs.vectors) + ([pv] if halvings == 0 else [])
        zs, zs_t = _zero_sets(W, restarts, rng, known, zero_tol)
        steps.append(OptimizationStep(D.operator, lam, zs.span_dim, zs_t.span_dim, name, halvings))
        iterates.append(W)
        log.info("step %d: %s lambda0=%.4e spans=(%d,%d)", len(steps), name, lam,
                 zs.span_dim, zs_t.span_dim)
    nd = nondecomposability_certificate(W, certificate_candidates, seed=rng)
    return WitnessReport(normalized(W), zs, zs_t, certificate, nd, steps, iterates)


# -- certificates -------------------------------------------------------------

def canonical_decomposition(W: HermitianOperator, delta: DensityMatrix,
                            rank_tol: float = RANK_TOL):
    """Least-squares fit ``W = P + Q^T_B - s * 1`` with ``R(P) in K(delta)``, ``R(Q) in K(delta^T_B)``.

    Returns ``(shift, P, Q, residual)``.  ``P`` and ``Q`` are unconstrained
    Hermitian here; positivity is checked by the caller.
    """
    dims = W.dims
    d = W.d
    VP = kernel_basis(delta, rank_tol)
    VQ = kernel_basis(partial_transpose(delta, "B"), rank_tol)
    columns = []
    for V, transpose in ((VP, False), (VQ, True)):
        k = V.shape[1]
        for i in range(k):
            for j in range(i, k):
                b = np.outer(V[:, i], V[:, j].conj())
                basis = [b] if i == j else [b + b.conj().T, 1j * (b - b.conj().T)]
                for B in basis:
                    X = HermitianOperator(B, dims, tol=1e-9)
                    if transpose:
                        X = partial_transpose(X, "B")
                    columns.append(X.matrix.ravel())
    columns.append(-np.eye(d).ravel())
    A = np.array(columns).T
    A = np.vstack([A.real, A.imag])
    y = np.concatenate([W.matrix.real.ravel(), W.matrix.imag.ravel()])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.linalg.norm(A @ coef - y))
    shift = float(coef[-1])
    # rebuild P and Q from coefficients
    pos = 0
    mats = []
    for V in (VP, VQ):
        k = V.shape[1]
        M = np.zeros((d, d), dtype=complex)
        for i in range(k):
            for j in range(i, k):
                b = np.outer(V[:, i], V[:, j].conj())
                if i == j:
                    M += coef[pos] * b
                    pos += 1
                else:
                    M += coef[pos] * (b + b.conj().T) + coef[pos + 1] * 1j * (b - b.conj().T)
                    pos += 2
        mats.append(HermitianOperator(M, dims, tol=1e-9))
    return shift, mats[0], mats[1], residual


def canonical_form_check(W: HermitianOperator, delta: DensityMatrix,
                         restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0,
                         tol: float = 1e-8) -> bool:
    """Does ``W = P + Q^T_B - eps * 1`` with ``P, Q >= 0`` supported on the kernels of ``delta``?

    The shift, ``P`` and ``Q`` come from one linear least-squares fit.  Also
    requires ``0 <= eps <= inf <e,f|P + Q^T_B|e,f>``.
    """
    if W.dims != delta.dims:
        return False
    shift, P, Q, residual = canonical_decomposition(W, delta)
    if residual > tol or shift < -tol:
        return False
    if P.eigvalsh()[0] < -tol or Q.eigvalsh()[0] < -tol:
        return False
    if shift <= tol:
        return True
    inf = min_product_expectation(P + partial_transpose(Q, "B"), restarts, seed).value
    return shift <= inf + tol


def _default_certificate_candidates(dims, seed):
    if dims.as_tuple() == (2, 4):
        from .family import default_grid, rho_b

        for b in default_grid():
            yield rho_b(b)
    rng = as_rng(seed)
    for _ in range(1000):
        yield sample("random_ppt", dims, rng)


def nondecomposability_certificate(W: HermitianOperator,
                                   candidates: Iterable[DensityMatrix] | None = None,
                                   seed: SeedLike = 0) -> DensityMatrix | None:
    """First PPT state among ``candidates`` detected by ``W``.

    The default candidates are the 39-point ``rho_b`` grid (2x4 only)
    followed by 1000 random PPT states.
    """
    from .operators import ppt_check

    if candidates is None:
        candidates = _default_certificate_candidates(W.dims, seed)
    for rho in candidates:
        if rho.dims == W.dims and ppt_check(rho).is_ppt and detects(W, rho) < -DETECT_TOL:
            return rho
    return None


def _is_projector(X: np.ndarray, tol: float) -> bool:
    # up to a positive scale, since reported witnesses are trace-normalized
    w = np.linalg.eigvalsh((X + X.conj().T) / 2)
    top = w[-1]
    if top <= tol:
        return False
    w = w / top
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1)) <= tol))


def extremality_necessary(report: WitnessReport, delta: DensityMatrix,
                          restarts: int = DEFAULT_RESTARTS, seed: SeedLike = 0) -> bool:
    """Necessary (never sufficient) condition for ``report.witness`` to be extremal."""
    W = report.witness
    if _is_projector(W.matrix, 1e-8) or _is_projector(partial_transpose(W).matrix, 1e-8):
        return True
    return (report.optimal_certificate == "OptimalBySpan"
            and canonical_form_check(W, delta, restarts, seed))
