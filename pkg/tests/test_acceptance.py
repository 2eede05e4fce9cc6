"""Acceptance criteria 1-9.

Each test logs one PASS/FAIL line (collected in the terminal summary) and
then asserts, so a failing criterion also fails the suite.
"""

import time

import numpy as np
import pytest

from edgewit import (
    DensityMatrix,
    HermitianOperator,
    decompose_edge,
    detect_via_map,
    detects,
    is_edge,
    partial_transpose,
    ppt_check,
    rho_b,
    sample,
    witness_to_map,
)
from edgewit.cli import RunConfig, cmd_scan
from edgewit.family import default_grid
from edgewit.maps import apply_map, choi_of
from edgewit.operators import phi_plus, pure_state, rank
from edgewit.product_search import minimize_range_objective, range_kernels


def run_criterion(log, number, limit, body):
    """Run ``body() -> (ok, detail)``, enforce the runtime limit, log and assert."""
    t0 = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - t0
    if elapsed > limit:
        ok, detail = False, f"{detail}; runtime {elapsed:.1f}s exceeds {limit}s"
    log(number, ok, f"{detail} ({elapsed:.2f}s)")
    assert ok, detail


def _extent(points):
    return f"{min(points):.3f}..{max(points):.3f}" if points else "none"


def test_criterion_1_partial_transpose(acceptance_log):
    def body():
        w = np.sort(partial_transpose(phi_plus()).eigvalsh())
        fixture_err = float(np.max(np.abs(w - [-0.5, 0.5, 0.5, 0.5])))
        rng = np.random.default_rng(1)
        worst = 0.0
        for k in range(1000):
            dims = [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)][k % 5]
            d = dims[0] * dims[1]
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            op = HermitianOperator((g + g.conj().T) / 2, dims)
            for sub in "AB":
                back = partial_transpose(partial_transpose(op, sub), sub)
                worst = max(worst, float(np.max(np.abs(back.matrix - op.matrix))))
        ok = fixture_err <= 1e-10 and worst <= 1e-12
        return ok, f"PT(Phi+) spectrum err {fixture_err:.1e}, involution err {worst:.1e}"

    run_criterion(acceptance_log, 1, 5, body)


def test_criterion_2_family_gate(acceptance_log):
    def body():
        bad = []
        for b in np.round(np.linspace(0, 1, 11), 10):
            rho = rho_b(b)
            if (abs(rho.trace() - 1) > 1e-12 or rho.eigvalsh()[0] < -1e-12
                    or not ppt_check(rho).is_ppt):
                bad.append(b)
        return not bad, f"rho_b valid PPT state for b in 0..1 (failures: {bad})"

    run_criterion(acceptance_log, 2, 5, body)


def test_criterion_3_edge_certification(acceptance_log):
    def body():
        rho = rho_b(0.5)
        f_min = minimize_range_objective(*range_kernels(rho), restarts=200, seed=0).value
        half = is_edge(rho, restarts=200, seed=0)
        zero = is_edge(rho_b(0.0), restarts=200, seed=0)
        one = is_edge(rho_b(1.0), restarts=200, seed=0)
        ok = half and f_min > 1e-6 and not zero and not one
        return ok, (f"is_edge(0.5)={half} F_min={f_min:.3e}, "
                    f"is_edge(0)={zero}, is_edge(1)={one}")

    run_criterion(acceptance_log, 3, 60, body)


def test_criterion_4_initial_witness(acceptance_log, w1, rho_half):
    wc, build_time = w1

    def body():
        expect = -(wc.epsilon_used / wc.c) * detects(wc.C, rho_half)
        exact_err = abs(detects(wc.W, rho_half) - expect)
        rng = np.random.default_rng(44)
        values = []
        for k in range(10_000):
            if k % 2:
                sigma = sample("separable_mixture", (2, 4), rng)
            else:
                sigma = sample("pure_product", (2, 4), rng).projector()
            values.append(detects(wc.W, sigma))
        worst = min(values)
        ok = exact_err <= 1e-10 and worst >= -1e-8
        return ok, (f"|Tr(W1 delta) + eps'/c Tr(delta C)| = {exact_err:.1e}, "
                    f"min Tr(W1 sigma) = {worst:.3e}; construction took {build_time:.1f}s")

    run_criterion(acceptance_log, 4, 120 - build_time, body)


def test_criterion_5_decomposition(acceptance_log, rho_half):
    def body():
        worst_err, worst_ratio, failures = 0.0, 0.0, []
        for seed in range(20):
            rng = np.random.default_rng(500 + seed)
            sigma = sample("separable_mixture", (2, 4), rng, n_terms=int(rng.integers(1, 6)))
            t = float(rng.uniform(0.2, 0.9))
            rho = DensityMatrix(t * rho_half.matrix + (1 - t) * sigma.matrix, (2, 4))
            if not ppt_check(rho).is_ppt:
                failures.append((seed, "not PPT"))
                continue
            dec = decompose_edge(rho, restarts=200, seed=seed)
            err = float(np.linalg.norm(dec.reconstruct() - rho.matrix))
            bound = rank(rho) + rank(partial_transpose(rho))
            worst_err = max(worst_err, err)
            worst_ratio = max(worst_ratio, len(dec.steps) / bound)
            if err > 1e-8 or len(dec.steps) > bound:
                failures.append((seed, err, len(dec.steps), bound))
        ok = not failures
        return ok, (f"20 mixtures: max reconstruction err {worst_err:.1e}, "
                    f"max steps/bound {worst_ratio:.2f}, failures {failures}")

    run_criterion(acceptance_log, 5, 600, body)


def test_criterion_6_optimization(acceptance_log, optimized):
    report, opt_time = optimized

    def body():
        totals = [s.span_pw + s.span_pwt for s in report.steps]
        increasing = all(b > a for a, b in zip(totals, totals[1:]))
        grid = default_grid()
        states = [rho_b(b) for b in grid]
        before = {b for b, r in zip(grid, states) if detects(report.iterates[0], r) < 0}
        after = {b for b, r in zip(grid, states) if detects(report.witness, r) < 0}
        ok = increasing and len(report.steps) <= 16 and before <= after and bool(before)
        return ok, (f"{len(report.steps)} iterations, span sums {totals}, "
                    f"{report.optimal_certificate}; detected {len(before)} -> {len(after)} "
                    f"grid points ({_extent(before)} -> {_extent(after)}); "
                    f"optimization took {opt_time:.1f}s")

    run_criterion(acceptance_log, 6, 900 - opt_time, body)


def test_criterion_7_maps(acceptance_log, w1, optimized):
    def body():
        msgs, ok = [], True
        grid = default_grid()
        for name, W in (("W1", w1[0].W), ("optimized", optimized[0].witness)):
            m = witness_to_map(W)
            by_w = {b for b in grid if detects(W, rho_b(b)) < 0}
            by_m = {b for b in grid if detect_via_map(m, rho_b(b)) < 0}
            ok &= by_w <= by_m
            msgs.append(f"{name}: witness {len(by_w)} <= map {len(by_m)}")
            rebuilt = choi_of(lambda X: apply_map(m, X), 2, 4)
            rt = float(np.max(np.abs(rebuilt.choi.matrix - W.matrix)))
            ok &= rt <= 1e-12
            msgs.append(f"roundtrip {rt:.1e}")
        swap = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                swap[2 * i + j, 2 * j + i] = 1
        t_err = float(np.max(np.abs(choi_of(lambda X: X.T, 2, 2).choi.matrix - swap)))
        ok &= t_err == 0
        msgs.append(f"Choi(T) = SWAP err {t_err:.1e}")
        return ok, "; ".join(msgs)

    run_criterion(acceptance_log, 7, 300, body)


def test_criterion_8_low_dimensions(acceptance_log):
    def body():
        rng = np.random.default_rng(8)
        sep_fail = sum(not ppt_check(sample("separable_mixture", dims, rng)).is_ppt
                       for dims in [(2, 2), (2, 3)] for _ in range(1000))
        phi_fails = not ppt_check(phi_plus()).is_ppt
        pure_pass = 0
        for _ in range(50):
            psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            s = np.linalg.svd(psi.reshape(2, 2), compute_uv=False)
            assert s[1] / s[0] > 1e-6  # entangled: two nonzero Schmidt coefficients
            pure_pass += ppt_check(pure_state(psi, (2, 2))).is_ppt
        ok = sep_fail == 0 and phi_fails and pure_pass == 0
        return ok, (f"separable 2x2/2x3 failing PPT: {sep_fail}/2000; Phi+ fails: {phi_fails}; "
                    f"entangled pure states passing PPT: {pure_pass}/50")

    run_criterion(acceptance_log, 8, 30, body)


def test_criterion_9_determinism(acceptance_log):
    def body():
        cfg = RunConfig(seed=2024)
        a, ha = cmd_scan(0.5, 39, False, cfg)
        b, hb = cmd_scan(0.5, 39, False, cfg)
        same = a.encode() == b.encode() and ha == hb
        return same, f"two scans byte-identical: {same} ({len(a.encode())} bytes)"

    run_criterion(acceptance_log, 9, 30, body)


@pytest.mark.parametrize("b", [0.25, 0.75])
def test_other_sources_are_edge_states(b):
    assert is_edge(rho_b(b), restarts=200, seed=1)
