"""Witness <-> positive map correspondence.

The map attached to a witness ``W`` on H_A (x) H_B sends operators on a copy
of H_A to operators on H_B::

    Lambda(X) = Tr_A[(X^T (x) 1_B) W]

so that ``W = sum_{ij} |i><j| (x) Lambda(|i><j|)`` is the Choi matrix built
from the unnormalized ``|Psi> = sum_k |k>|k>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperatorError
from .operators import HermitianOperator


@dataclass(frozen=True)
class ChoiMap:
    choi: HermitianOperator
    d_in: int
    d_out: int

    def __post_init__(self):
        if (self.d_in, self.d_out) != self.choi.dims.as_tuple():
            raise InvalidOperatorError(
                f"map dimensions {self.d_in}->{self.d_out} do not match Choi dims "
                f"{self.choi.dims.as_tuple()}"
            )


def witness_to_map(W: HermitianOperator) -> ChoiMap:
    return ChoiMap(W, W.dims.d_A, W.dims.d_B)


def map_to_witness(m: ChoiMap) -> HermitianOperator:
    return m.choi


def apply_map(m: ChoiMap, X) -> np.ndarray:
    """``Lambda(X)`` for a ``d_in x d_in`` matrix ``X`` (Hermitian in, Hermitian out)."""
    X = np.asarray(getattr(X, "matrix", X), dtype=complex)
    if X.shape != (m.d_in, m.d_in):
        raise InvalidOperatorError(f"map input must be {m.d_in}x{m.d_in}, got {X.shape}")
    T = m.choi.tensor()  # (a, b, a', b')
    # sum_{a,a'} X^T[a', a] W[a, b, a', b'] = sum X[a, a'] W[a, b, a', b']
    return np.einsum("ac,abcd->bd", X, T)


def extend_map(m: ChoiMap, rho: HermitianOperator) -> np.ndarray:
    """``(Lambda (x) 1_B)`` applied to the A factor of ``rho``; result on H_out (x) H_B."""
    d_A, d_B = rho.dims.as_tuple()
    if d_A != m.d_in:
        raise InvalidOperatorError(f"map expects a {m.d_in}-dimensional input factor, got {d_A}")
    R = rho.tensor()  # (a, b, a', b')
    T = m.choi.tensor()  # (a, o, a', o')
    out = np.einsum("xbyc,xoyp->obpc", R, T)
    n = m.d_out * d_B
    return out.reshape(n, n)


def detect_via_map(m: ChoiMap, rho: HermitianOperator) -> float:
    """Smallest eigenvalue of the extended map applied to ``conj(rho)``.

    For separable ``rho`` this is nonnegative whenever the map is positive.
    Conjugating first (``conj(rho) = rho^T`` for Hermitian ``rho``) ties the
    test to the witness: the expectation of the output in the unnormalized
    maximally entangled vector of H_out (x) H_B equals ``Tr(W rho)``, so
    every state the witness detects is detected here too.
    """
    conj = HermitianOperator(rho.matrix.conj(), rho.dims)
    out = extend_map(m, conj)
    out = (out + out.conj().T) / 2
    return float(np.linalg.eigvalsh(out)[0])


def choi_of(fn, d_in: int, d_out: int) -> ChoiMap:
    """Choi representation of a linear map given as a Python callable on matrices."""
    C = np.zeros((d_in, d_out, d_in, d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            E = np.zeros((d_in, d_in), dtype=complex)
            E[i, j] = 1.0
            C[i, :, j, :] = np.asarray(fn(E), dtype=complex)
    n = d_in * d_out
    return ChoiMap(HermitianOperator(C.reshape(n, n), (d_in, d_out)), d_in, d_out)
