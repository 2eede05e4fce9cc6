import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from edgewit import (
    HermitianOperator,
    NotAWitnessError,
    PreconditionError,
    ProductVector,
    collect_zero_set,
    min_product_expectation,
    range_product_search,
    span_dimension,
)
from edgewit.operators import phi_plus, random_product_batch
from edgewit.product_search import (
    dedupe,
    minimize_range_objective,
    range_kernels,
    sampled_min,
    seesaw,
    sup_product_expectation,
)


def qubit_grid_minimum(M: HermitianOperator, n_theta=160, n_phi=640) -> float:
    """Exact in ``f``, grid in ``e`` (qubit A): min_e lambda_min(<e|M|e>)."""
    theta = np.linspace(0, np.pi / 2, n_theta)
    phi = np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    E = np.stack([np.cos(T).ravel(), (np.sin(T) * np.exp(1j * P)).ravel()], axis=1)
    A = np.einsum("ra,abcd,rc->rbd", E.conj(), M.tensor(), E)
    return float(np.linalg.eigvalsh(A).min())


def phi_witness(d=2):
    """1/d - |Phi+><Phi+|: a decomposable witness vanishing on |e, e*>."""
    return HermitianOperator(np.eye(d * d) / d - phi_plus(d).matrix, (d, d))


class TestMinProduct:
    def test_identity(self):
        res = min_product_expectation(HermitianOperator(np.eye(8), (2, 4)), restarts=5)
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_phi_witness_has_zero_minimum(self):
        res = min_product_expectation(phi_witness(), restarts=20)
        assert res.value == pytest.approx(0.0, abs=1e-10)
        v = res.argmin
        # minimizers are |e, e*>
        assert abs(np.vdot(v.f, v.e.conj())) == pytest.approx(1, abs=1e-6)

    def test_diagonal_product_eigenvector(self):
        # lowest eigenvector |1,2> is a product vector, so the bound is tight
        d = np.arange(8, dtype=float) + 1
        d[6] = -4
        M = HermitianOperator(np.diag(d), (2, 4))
        res = min_product_expectation(M, restarts=10)
        assert res.value == pytest.approx(-4, abs=1e-12)

    def test_swap_minimum(self):
        swap = np.zeros((9, 9))
        for i in range(3):
            for j in range(3):
                swap[3 * i + j, 3 * j + i] = 1
        res = min_product_expectation(HermitianOperator(swap, (3, 3)), restarts=30)
        assert res.value == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_grid_oracle(self, seed):
        rng = np.random.default_rng(seed)
        M = HermitianOperator(random_hermitian(rng, 8), (2, 4))
        grid = qubit_grid_minimum(M)
        res = min_product_expectation(M, restarts=100, seed=seed)
        assert res.value <= grid + 1e-12
        assert res.value >= grid - 1e-3

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from([(2, 2), (2, 3), (3, 3), (2, 4)]))
    def test_bounded_below_by_lowest_eigenvalue(self, seed, dims):
        rng = np.random.default_rng(seed)
        M = HermitianOperator(random_hermitian(rng, dims[0] * dims[1]), dims)
        res = min_product_expectation(M, restarts=20, seed=seed)
        assert res.value >= M.eigvalsh()[0] - 1e-10
        assert res.value == pytest.approx(res.argmin.expectation(M), abs=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_sampled_products_never_beat_the_minimum(self, seed):
        rng = np.random.default_rng(100 + seed)
        M = HermitianOperator(random_hermitian(rng, 8), (2, 4))
        res = min_product_expectation(M, restarts=200, seed=seed)
        assert sampled_min(M, 10_000, seed=seed) >= res.value - 1e-8

    def test_sup(self):
        M = HermitianOperator(np.diag([1.0, 5.0, 2.0, 3.0]), (2, 2))
        assert sup_product_expectation(M, restarts=10).value == pytest.approx(5.0)

    def test_seeded_runs_agree(self):
        M = HermitianOperator(random_hermitian(np.random.default_rng(9), 8), (2, 4))
        a = min_product_expectation(M, restarts=30, seed=4)
        b = min_product_expectation(M, restarts=30, seed=4)
        assert a.value == b.value
        np.testing.assert_array_equal(a.argmin.vector, b.argmin.vector)

    def test_restarts_validated(self):
        with pytest.raises(ValueError):
            min_product_expectation(phi_witness(), restarts=0)


class TestSeesaw:
    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_per_restart(self, seed):
        rng = np.random.default_rng(seed)
        M = HermitianOperator(random_hermitian(rng, 12), (3, 4))
        E0, _ = random_product_batch(rng, M.dims, 16)
        run = seesaw(M.tensor(), E0, record=True)
        h = run.history
        assert h.shape[0] >= 2
        diffs = np.diff(h[1:], axis=0)  # first row may still contain inf
        assert np.all(diffs <= 1e-12)

    def test_two_term_objective_monotone(self, rng):
        K1 = HermitianOperator(random_hermitian(rng, 8), (2, 4))
        K2 = HermitianOperator(random_hermitian(rng, 8), (2, 4))
        E0, _ = random_product_batch(rng, K1.dims, 16)
        run = seesaw(K1.tensor(), E0, K2.tensor(), record=True)
        assert np.all(np.diff(run.history[1:], axis=0) <= 1e-12)


class TestSpan:
    def test_standard_basis(self):
        vs = [ProductVector(np.eye(2)[i], np.eye(3)[j]) for i in range(2) for j in range(3)]
        assert span_dimension(vs) == 6
        assert span_dimension(vs[:4] + vs[:2]) == 4

    def test_empty(self):
        assert span_dimension([]) == 0

    @pytest.mark.parametrize("d", [2, 3])
    def test_symmetric_products_span_symmetric_subspace(self, d):
        E, _ = random_product_batch(np.random.default_rng(0), (d, d), 3 * d * d)
        vs = [ProductVector(e, e) for e in E]
        assert span_dimension(vs) == d * (d + 1) // 2

    def test_dedupe_drops_phase_copies(self):
        v = ProductVector(np.array([1, 1j]), np.array([1, 0]))
        w = ProductVector(np.array([1j, -1]), np.array([2, 0]))
        u = ProductVector(np.array([1, 0]), np.array([0, 1]))
        assert len(dedupe([v, w, u])) == 2


class TestZeroSet:
    def test_phi_witness_zero_set_spans(self):
        W = phi_witness()
        zs = collect_zero_set(W, restarts=60, seed=0)
        # oracle: zeros are exactly |e, e*>; random such vectors span all of C^4
        E, _ = random_product_batch(np.random.default_rng(1), (2, 2), 16)
        oracle = np.linalg.matrix_rank(np.array([np.kron(e, e.conj()) for e in E]), tol=1e-8)
        assert oracle == 4
        assert zs.span_dim == oracle
        for v in zs.vectors:
            assert abs(v.expectation(W)) <= 1e-9

    def test_positive_definite_has_no_zeros(self):
        zs = collect_zero_set(HermitianOperator(np.eye(4), (2, 2)), restarts=10)
        assert len(zs) == 0 and zs.span_dim == 0

    def test_rejects_non_witness(self):
        W = HermitianOperator(np.eye(4) / 2 - 2 * phi_plus().matrix, (2, 2))
        with pytest.raises(NotAWitnessError):
            collect_zero_set(W, restarts=10)

    def test_known_vectors_are_kept_when_still_zero(self):
        W = phi_witness()
        keep = ProductVector(np.array([1, 0]), np.array([1, 0]))
        drop = ProductVector(np.array([1, 0]), np.array([0, 1]))
        zs = collect_zero_set(W, restarts=1, seed=0, known=[keep, drop])
        assert any(abs(np.vdot(v.vector, keep.vector)) > 1 - 1e-9 for v in zs.vectors)
        assert not any(abs(np.vdot(v.vector, drop.vector)) > 1 - 1e-9 for v in zs.vectors)


class TestRangeSearch:
    def test_requires_ppt(self):
        with pytest.raises(PreconditionError):
            range_product_search(phi_plus())

    def test_finds_vector_in_product_state(self):
        pv = ProductVector(np.array([1, 1j]) / np.sqrt(2), np.array([0.6, 0, 0.8]))
        rho = pv.projector()
        from edgewit import DensityMatrix

        found = range_product_search(DensityMatrix(rho.matrix, (2, 3)), restarts=10)
        assert found is not None
        assert abs(np.vdot(found.vector, pv.vector)) == pytest.approx(1, abs=1e-8)

    def test_rho_half_has_no_admissible_vector(self, rho_half):
        assert range_product_search(rho_half, restarts=200, seed=0) is None

    def test_objective_terms(self, rho_half):
        res = minimize_range_objective(*range_kernels(rho_half), restarts=50, seed=3)
        assert res.value == pytest.approx(res.first_term + res.second_term)
        assert res.value > 1e-6
