"""Dense bipartite operators on H_A (x) H_B.

Every matrix uses the row-major index convention ``i = d_B * a + b`` for the
basis vector ``|a>_A (x) |b>_B``.  Operators are immutable: the underlying
arrays are copied on construction and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import InvalidOperatorError, ParameterError, SamplingError

RANK_TOL = 1e-9
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12

SeedLike = Union[int, np.random.Generator, None]


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for subtask ``key`` derived from a root seed.

    Streams with different keys never overlap, so subtasks can be evaluated
    in any order (or concurrently) and still reproduce bit-for-bit.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class BipartiteDims:
    d_A: int
    d_B: int

    def __post_init__(self):
        if int(self.d_A) != self.d_A or int(self.d_B) != self.d_B:
            raise InvalidOperatorError(f"dimensions must be integers, got {self.d_A}, {self.d_B}")
        if self.d_A < 2 or self.d_B < 2:
            raise InvalidOperatorError(f"each subsystem needs dimension >= 2, got {self.d_A}x{self.d_B}")

    @property
    def total(self) -> int:
        return self.d_A * self.d_B

    def as_tuple(self) -> tuple[int, int]:
        return (self.d_A, self.d_B)


def _dims(dims) -> BipartiteDims:
    if isinstance(dims, BipartiteDims):
        return dims
    d_A, d_B = dims
    return BipartiteDims(int(d_A), int(d_B))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class HermitianOperator:
    """Hermitian matrix on H_A (x) H_B.

    Parameters
    ----------
    matrix : array_like
        ``d x d`` complex matrix with ``d = d_A * d_B``.
    dims : BipartiteDims or (int, int)
        Subsystem dimensions.
    tol : float
        Entrywise tolerance for the Hermiticity check.  The stored matrix is
        the exact Hermitian part of the input.
    """

    __slots__ = ("dims", "matrix")

    def __init__(self, matrix, dims, *, tol: float = HERMITIAN_TOL):
        dims = _dims(dims)
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (dims.total, dims.total):
            raise InvalidOperatorError(
                f"matrix shape {m.shape} does not match dims {dims.d_A}x{dims.d_B}"
            )
        if not np.all(np.isfinite(m)):
            raise InvalidOperatorError("matrix has non-finite entries")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > tol:
            raise InvalidOperatorError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims.as_tuple()}, trace={self.trace():.6g})"

    @property
    def d(self) -> int:
        return self.dims.total

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def tensor(self) -> np.ndarray:
        """Matrix reshaped to ``(d_A, d_B, d_A, d_B)``."""
        a, b = self.dims.as_tuple()
        return self.matrix.reshape(a, b, a, b)

    def __add__(self, other):
        _check_same_dims(self, other)
        return HermitianOperator(self.matrix + other.matrix, self.dims)

    def __sub__(self, other):
        _check_same_dims(self, other)
        return HermitianOperator(self.matrix - other.matrix, self.dims)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return HermitianOperator(scalar * self.matrix, self.dims)

    __rmul__ = __mul__

    def __neg__(self):
        return HermitianOperator(-self.matrix, self.dims)


class DensityMatrix(HermitianOperator):
    """Positive semidefinite, unit-trace operator."""

    __slots__ = ()

    def __init__(self, matrix, dims, *, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL):
        super().__init__(matrix, dims, tol=tol)
        tr = np.trace(self.matrix).real
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidOperatorError(f"density matrix must have unit trace, got {tr!r}")
        lmin = np.linalg.eigvalsh(self.matrix)[0]
        if lmin < -psd_tol:
            raise InvalidOperatorError(f"density matrix has negative eigenvalue {lmin:.3e}")

    @classmethod
    def from_unnormalized(cls, matrix, dims) -> "DensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        m = (m + m.conj().T) / 2
        return cls(m / np.trace(m).real, dims)


def _check_same_dims(x: HermitianOperator, y: HermitianOperator):
    if x.dims != y.dims:
        raise InvalidOperatorError(f"dimension mismatch: {x.dims} vs {y.dims}")


def _unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0:
        raise InvalidOperatorError(f"{name} must be a nonzero finite vector")
    return v / n


def phase_fix(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first non-negligible entry is real positive."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (np.abs(z) / z)


@dataclass(frozen=True, eq=False)
class ProductVector:
    """Normalized product vector ``|e> (x) |f>``, stored with canonical phases."""

    e: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        e = phase_fix(_unit(self.e, "e"))
        f = phase_fix(_unit(self.f, "f"))
        e.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "f", f)

    @property
    def dims(self) -> BipartiteDims:
        return BipartiteDims(self.e.size, self.f.size)

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.e, self.f)

    def partial_conjugate(self) -> "ProductVector":
        return ProductVector(self.e, self.f.conj())

    def projector(self) -> HermitianOperator:
        v = self.vector
        return HermitianOperator(np.outer(v, v.conj()), self.dims)

    def expectation(self, M: HermitianOperator) -> float:
        v = self.vector
        return float(np.vdot(v, M.matrix @ v).real)


class SpectralSplit(NamedTuple):
    range_projector: HermitianOperator
    kernel_projector: HermitianOperator
    rank: int
    eigenvalues: np.ndarray


class PPTResult(NamedTuple):
    is_ppt: bool
    min_pt_eigenvalue: float


def identity(dims) -> HermitianOperator:
    dims = _dims(dims)
    return HermitianOperator(np.eye(dims.total), dims)


def _pt_array(m: np.ndarray, d_A: int, d_B: int, subsystem: str) -> np.ndarray:
    t = m.reshape(d_A, d_B, d_A, d_B)
    if subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ParameterError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(d_A * d_B, d_A * d_B)


def partial_transpose(M: HermitianOperator, subsystem: str = "B") -> HermitianOperator:
    """Transpose the indices of one tensor factor.

    >>> import numpy as np
    >>> phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    >>> rho = HermitianOperator(np.outer(phi, phi), (2, 2))
    >>> np.round(partial_transpose(rho).eigvalsh(), 12)
    array([-0.5,  0.5,  0.5,  0.5])
    """
    if not isinstance(M, HermitianOperator):
        raise InvalidOperatorError(f"expected a HermitianOperator, got {type(M).__name__}")
    d_A, d_B = M.dims.as_tuple()
    return HermitianOperator(_pt_array(M.matrix, d_A, d_B, subsystem), M.dims)


def partial_trace(M: HermitianOperator, subsystem: str = "B") -> np.ndarray:
    """Trace out ``subsystem``; returns the reduced matrix on the other factor."""
    t = M.tensor()
    if subsystem == "B":
        return np.einsum("ajcj->ac", t)
    if subsystem == "A":
        return np.einsum("iaib->ab", t)
    raise ParameterError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def ppt_check(rho: HermitianOperator, psd_tol: float = PSD_TOL) -> PPTResult:
    lmin = float(partial_transpose(rho, "B").eigvalsh()[0])
    return PPTResult(lmin >= -psd_tol, lmin)


def _split_arrays(m: np.ndarray, rank_tol: float):
    w, v = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(w))))
    keep = np.abs(w) > rank_tol * scale
    return w, v, keep


def spectral_split(M: HermitianOperator, rank_tol: float = RANK_TOL) -> SpectralSplit:
    """Range/kernel projectors of ``M``.

    Eigenvalues with ``|lambda| <= rank_tol * max(1, |lambda|_max)`` count as
    kernel.
    """
    w, v, keep = _split_arrays(M.matrix, rank_tol)
    vr, vk = v[:, keep], v[:, ~keep]
    return SpectralSplit(
        HermitianOperator(vr @ vr.conj().T, M.dims),
        HermitianOperator(vk @ vk.conj().T, M.dims),
        int(keep.sum()),
        w,
    )


def rank(M: HermitianOperator, rank_tol: float = RANK_TOL) -> int:
    _, _, keep = _split_arrays(M.matrix, rank_tol)
    return int(keep.sum())


def kernel_basis(M: HermitianOperator, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal kernel basis as the columns of a ``d x k`` array."""
    _, v, keep = _split_arrays(M.matrix, rank_tol)
    return v[:, ~keep]


def pseudo_inverse(M: HermitianOperator, rank_tol: float = RANK_TOL) -> HermitianOperator:
    w, v, keep = _split_arrays(M.matrix, rank_tol)
    vr = v[:, keep]
    return HermitianOperator((vr / w[keep]) @ vr.conj().T, M.dims)


def haar_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """``n`` Haar-random unit vectors in C^dim, one per row."""
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_product_batch(rng: np.random.Generator, dims, n: int) -> tuple[np.ndarray, np.ndarray]:
    dims = _dims(dims)
    return haar_vectors(rng, n, dims.d_A), haar_vectors(rng, n, dims.d_B)


PPT_BLOCK = 256
SAMPLE_KINDS = ("pure_product", "separable_mixture", "random_density", "random_ppt")


def sample(kind: str, dims, seed: SeedLike = None, *, n_terms: int | None = None,
           max_tries: int = 100_000):
    """Seeded random objects for testing.

    ``pure_product`` returns a :class:`ProductVector`; every other kind a
    :class:`DensityMatrix`.  ``separable_mixture`` mixes ``n_terms``
    (default ``4 d``) Haar product projectors with flat-Dirichlet weights.
    ``random_density`` is ``G G^dag / Tr`` for a square Ginibre ``G``.
    ``random_ppt`` rejection-samples ``random_density`` until the partial
    transpose is positive.
    """
    dims = _dims(dims)
    rng = as_rng(seed)
    d = dims.total
    if kind == "pure_product":
        e, f = random_product_batch(rng, dims, 1)
        return ProductVector(e[0], f[0])
    if kind == "separable_mixture":
        k = n_terms or 4 * d
        e, f = random_product_batch(rng, dims, k)
        w = rng.dirichlet(np.ones(k))
        vecs = np.einsum("ka,kb->kab", e, f).reshape(k, d)
        m = np.einsum("k,ki,kj->ij", w, vecs, vecs.conj())
        return DensityMatrix.from_unnormalized(m, dims)
    if kind == "random_density":
        return _random_density(rng, dims)
    if kind == "random_ppt":
        # candidates are drawn and screened in blocks; the first PPT one wins
        tried = 0
        while tried < max_tries:
            n = min(PPT_BLOCK, max_tries - tried)
            g = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
            m = g @ g.conj().transpose(0, 2, 1)
            m /= np.trace(m, axis1=1, axis2=2).real[:, None, None]
            a, b = dims.as_tuple()
            pt = m.reshape(n, a, b, a, b).transpose(0, 1, 4, 3, 2).reshape(n, d, d)
            ok = np.flatnonzero(np.linalg.eigvalsh(pt)[:, 0] >= -PSD_TOL)
            if ok.size:
                return DensityMatrix.from_unnormalized(m[ok[0]], dims)
            tried += n
        raise SamplingError(f"no PPT state found in {max_tries} draws for dims {dims.as_tuple()}")
    raise ParameterError(f"unknown sample kind {kind!r}; expected one of {SAMPLE_KINDS}")


def _random_density(rng: np.random.Generator, dims: BipartiteDims) -> DensityMatrix:
    d = dims.total
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return DensityMatrix.from_unnormalized(g @ g.conj().T, dims)


def pure_state(psi, dims) -> DensityMatrix:
    psi = _unit(psi, "psi")
    return DensityMatrix(np.outer(psi, psi.conj()), dims)


def maximally_mixed(dims) -> DensityMatrix:
    dims = _dims(dims)
    return DensityMatrix(np.eye(dims.total) / dims.total, dims)


def phi_plus(d: int = 2) -> DensityMatrix:
    """Normalized maximally entangled state ``sum_k |kk> / sqrt(d)``."""
    psi = np.eye(d).reshape(d * d)
    return pure_state(psi, (d, d))
