"""Acceptance criteria, one test each.

Every test prints a ``[PASS]`` or ``[FAIL]`` line with the measured figure
and also appends it to the terminal summary.
"""

import time

import numpy as np

from sylvdyn.dynamics import PulseShape, PulseSpec, TimeGrid, compare_solvers, propagate_commuting
from sylvdyn.linalg import eigenvalues
from sylvdyn.matfunc import expm, frobenius_covariants, oracle_expm, oracle_residual
from sylvdyn.models import (
    IntegratedCouplings,
    LambdaParams,
    build_g_lambda,
    closed_form_two_level,
    ground_state,
    lambda_eigenvalues,
    two_level_generator,
)

from helpers import ACCEPTANCE_LINES, fro, multiset_distance, random_complex, random_orthogonal


def record(tag, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag} {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def random_lambda(rng):
    return LambdaParams(*rng.uniform(-5.0, 5.0, 3))


def test_ac1_two_level_closed_form():
    rng = np.random.default_rng(101)
    zetas = rng.uniform(0.0, 10.0, 100)
    zetas[zetas == 0.0] = 10.0
    phis = rng.uniform(0.0, 2 * np.pi, 100)
    S0 = np.array([0.0, 0.0, -1.0])
    start = time.perf_counter()
    worst = 0.0
    for z, phi in zip(zetas, phis):
        ic = IntegratedCouplings(z * np.cos(phi), z * np.sin(phi))
        S = expm(two_level_generator(ic)).result @ S0
        worst = max(worst, float(np.linalg.norm(S - closed_form_two_level(ic))))
    elapsed = time.perf_counter() - start
    record("AC1", "two-level closed form", worst <= 1e-9 and elapsed < 1.0,
           f"max error {worst:.2e} (<= 1e-9), {elapsed:.3f} s (< 1 s)")


def test_ac2_pi_pulse():
    ic = IntegratedCouplings(0.0, np.pi)
    closed = closed_form_two_level(ic)
    S0 = np.array([0.0, 0.0, 1.0])
    spec = PulseSpec.constant("two-level", duration=1.0, rabi=np.pi)
    final = propagate_commuting(spec, S0, TimeGrid(0.0, 1.0, 10)).final
    err = max(abs(closed[2] - 1.0), abs(final[2] + 1.0))
    record("AC2", "pi pulse inverts w", err <= 1e-12, f"|w_final + w_initial| = {err:.2e} (<= 1e-12)")


def test_ac3_lambda_spectrum():
    rng = np.random.default_rng(303)
    worst, mismatched, missing_zero = 0.0, 0, 0
    for _ in range(100):
        p = random_lambda(rng)
        closed = lambda_eigenvalues(p, cluster_tol=1e-8)
        numeric = eigenvalues(build_g_lambda(p), cluster_tol=1e-8)
        mismatched += sorted(closed.multiplicities) != sorted(numeric.multiplicities)
        worst = max(worst, multiset_distance(closed.repeated(), numeric.repeated()))
        zero = [m for v, m in numeric.clusters if abs(v) <= 1e-8]
        missing_zero += zero != [2]
    ok = worst <= 1e-8 and mismatched == 0 and missing_zero == 0
    record("AC3", "Lambda spectrum", ok,
           f"max eigenvalue error {worst:.2e} (<= 1e-8), multiplicity mismatches {mismatched}, "
           f"runs without double zero {missing_zero}")


def jordan_block(lam, m):
    return lam * np.eye(m, dtype=complex) + np.diag(np.ones(m - 1), 1)


def test_ac4_confluent_sylvester():
    rng = np.random.default_rng(404)
    worst_lambda = 0.0
    for _ in range(50):
        G = build_g_lambda(random_lambda(rng))
        report = expm(G)
        assert report.method == "sylvester-confluent"
        worst_lambda = max(worst_lambda, oracle_residual(report.result, G))
    worst_jordan = 0.0
    for m in (2, 3, 4):
        for lam in (0.0, 1.5, -2.0 + 0.5j, 3j, complex(*rng.standard_normal(2))):
            J = jordan_block(lam, m)
            report = expm(J)
            assert report.method == "sylvester-confluent"
            worst_jordan = max(worst_jordan, oracle_residual(report.result, J))
    ok = worst_lambda <= 1e-8 and worst_jordan <= 1e-8
    record("AC4", "confluent Sylvester vs oracle", ok,
           f"Lambda {worst_lambda:.2e}, Jordan blocks {worst_jordan:.2e} (relative, <= 1e-8)")


def test_ac5_projector_algebra():
    rng = np.random.default_rng(505)
    worst = 0.0
    count = 0
    for n in range(2, 9):
        while count < 200 * (n - 1):
            G = random_complex(rng, n)
            spec = eigenvalues(G)
            if not spec.is_distinct:
                continue
            Q = frobenius_covariants(G, spec)
            scale = 1.0 + fro(G)
            I = np.eye(n)
            errs = [fro(sum(Q) - I), fro(sum(g * q for g, q in zip(spec.values, Q)) - G)]
            for j, Qj in enumerate(Q):
                errs.append(fro(Qj @ Qj - Qj))
                errs.extend(fro(Qj @ Qk) for k, Qk in enumerate(Q) if k != j)
            worst = max(worst, max(errs) / scale)
            count += 1
    record("AC5", "projector algebra", worst <= 1e-9,
           f"max error / (1 + |G|_F) = {worst:.2e} over {count} matrices (<= 1e-9)")


def test_ac6_method_agreement():
    cases = [
        PulseSpec.constant("two-level", duration=2.0, detuning=0.7, rabi=1.4),
        PulseSpec.constant("two-level", duration=3.0, detuning=-2.5, rabi=0.3),
        PulseSpec.constant("two-level", duration=1.0, rabi=np.pi),
        PulseSpec.constant("lambda", duration=1.0, alpha=3.0, beta=4.0),
        PulseSpec.constant("lambda", duration=2.0, alpha=1.1, beta=-0.4, detuning=0.6),
        PulseSpec.constant("lambda", duration=1.5, alpha=-0.8, beta=2.2, detuning=-1.7),
    ]
    start = time.perf_counter()
    worst = 0.0
    for spec in cases:
        S0 = ground_state(spec.model)
        cmp = compare_solvers(spec, S0, TimeGrid(0.0, spec.duration, 99))
        assert all(len(t.times) == 100 for t in cmp.trajectories.values())
        worst = max(worst, cmp.max_deviation)
    elapsed = time.perf_counter() - start
    record("AC6", "method agreement", worst <= 1e-8 and elapsed < 5.0,
           f"max pairwise deviation {worst:.2e} (<= 1e-8), {elapsed:.2f} s (< 5 s)")


def test_ac7_conservation():
    rng = np.random.default_rng(707)
    drift = 0.0
    grid = TimeGrid(0.0, 4.0, 99)
    for k in range(20):
        model = "two-level" if k % 2 == 0 else "lambda"
        names = ("detuning", "rabi") if model == "two-level" else ("alpha", "beta", "detuning")
        kind = ("constant", "gaussian", "sine-squared")[k % 3]
        couplings = {n: PulseShape(kind, rng.uniform(-3, 3), 2.0, 1.5) for n in names}
        S0 = ground_state(model)
        traj = propagate_commuting(PulseSpec(model, couplings, 4.0), S0, grid)
        drift = max(drift, float(np.abs(traj.norms() - np.linalg.norm(S0)).max()))
    det_err = 0.0
    generators = [random_complex(rng, n) for n in range(2, 9) for _ in range(30)]
    generators += [build_g_lambda(random_lambda(rng)) for _ in range(30)]
    for G in generators:
        E = expm(G).result
        expected = np.exp(np.trace(G))
        det_err = max(det_err, abs(np.linalg.det(E) - expected) / abs(expected))
    ok = drift <= 1e-8 and det_err <= 1e-8
    record("AC7", "conservation laws", ok,
           f"norm drift {drift:.2e} (<= 1e-8), det(exp G) vs exp(tr G) {det_err:.2e} relative (<= 1e-8)")


def near_degenerate_family(eps, R):
    T = np.array([[0.0, 1.0, 0.5], [0.0, eps, 0.3], [0.0, 0.0, -1.0]])
    return R @ T @ R.T


def test_ac8_near_degeneracy():
    R = random_orthogonal(np.random.default_rng(808), 3)
    worst, worst_eps = 0.0, None
    methods = set()
    for eps in np.logspace(-1, -12, 45):
        G = near_degenerate_family(eps, R)
        report = expm(G)
        methods.add(report.method)
        err = oracle_residual(report.result, G)
        if err > worst:
            worst, worst_eps = err, eps
    record("AC8", "near-degeneracy robustness", worst <= 1e-6,
           f"max relative error {worst:.2e} at eps={worst_eps:.1e} (<= 1e-6), branches {sorted(methods)}")
