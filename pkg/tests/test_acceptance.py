"""Acceptance gate: one test per criterion, each printing a PASS line with
its measured runtime. Tolerances are fixed here, not configurable."""

import math
import time

import numpy as np
import pytest

from canodual import fixtures
from canodual.dual import assemble, eval_dual, grad_dual, hess_dual
from canodual.errors import NoDualCriticalPointError
from canodual.minimax import (
    beta_sweep,
    existence_check as existence_minimax,
    smooth_and_canonicalize,
    solve as solve_minimax,
)
from canodual.model import (
    Classification,
    DualPoint,
    ExistenceVerdict,
)
from canodual.oracle import (
    definiteness_transfer_check,
    fd_gradient,
    fd_hessian,
    grid_global_min,
)
from canodual.primal import duality_map, eval_lse, eval_primal, grad_primal, hess_primal
from canodual.quartic import QuarticInstance, existence_check as existence_quartic
from canodual.quartic import solve as solve_quartic
from canodual.solver import SolverConfig, find_critical_points, solve_global

from conftest import (
    rand_feasible_zeta,
    rand_instance,
    rand_minimax,
    rand_quartic_easy,
    rand_quartic_hard,
)


RESULTS = []


def announce(criterion, ok, elapsed, budget, detail=""):
    line = (f"ACCEPTANCE {criterion}: {'PASS' if ok and elapsed < budget else 'FAIL'} "
            f"({elapsed:.2f}s / budget {budget:.0f}s){' - ' if detail else ''}{detail}")
    RESULTS.append(line)
    print(line)
    assert ok
    assert elapsed < budget, f"criterion {criterion} exceeded budget: {elapsed:.2f}s"


def nearest(pairs, key, target):
    return min(pairs, key=lambda p: abs(key(p) - target))


def test_criterion_1_benchmark1_regression():
    t0 = time.perf_counter()
    rep = find_critical_points(fixtures.example1())
    ok = len(rep.critical_pairs) == 3
    matched = set()
    for tau, sigma, x, value, label in fixtures.EX1_EXPECTED["points"]:
        p = nearest(rep.critical_pairs, lambda q: float(q.zeta.sigma[0]), sigma)
        matched.add(id(p))
        ok &= abs(float(p.zeta.tau[0]) - tau) <= 1e-4
        ok &= abs(float(p.zeta.sigma[0]) - sigma) <= 1e-4
        ok &= abs(float(p.x[0]) - x) <= 1e-4
        ok &= abs(p.primal_value - value) <= 1e-5
        if label == "SADDLE":
            ok &= p.dual_label == Classification.SADDLE
            ok &= p.primal_label == Classification.LOCAL_MIN
        else:
            ok &= p.classification.value == label
    ok &= len(matched) == 3
    elapsed = time.perf_counter() - t0
    announce(1, ok, elapsed, 1.0, "3 critical points, values, triality labels")


def test_criterion_2_benchmark2_regression():
    t0 = time.perf_counter()
    inst = fixtures.example2()
    fast = solve_quartic(QuarticInstance.from_problem(inst))
    ok = abs(float(fast.best.zeta.sigma[0]) - 19.093) <= 1e-2
    ok &= np.max(np.abs(fast.best.x - np.array([5.6, 0.67]))) <= 5e-2
    rep = find_critical_points(inst)
    ok &= len(rep.critical_pairs) == 5
    for sigma_ref, eig_ref in zip(fixtures.EX2_EXPECTED["sigma"],
                                  fixtures.EX2_EXPECTED["eigenvalues"]):
        p = nearest(rep.critical_pairs, lambda q: float(q.zeta.sigma[0]), sigma_ref)
        ok &= abs(float(p.zeta.sigma[0]) - sigma_ref) <= 1e-2
        w = assemble(inst, p.zeta).eigenvalues
        for computed, ref in zip(w, eig_ref):
            ok &= np.sign(computed) == np.sign(ref)
            ok &= abs(computed - ref) <= 1e-1
    elapsed = time.perf_counter() - t0
    announce(2, ok, elapsed, 2.0, "fast path + all five roots with eigenvalue signs")


def test_criterion_3_benchmark3_regression():
    t0 = time.perf_counter()
    rep = solve_minimax(fixtures.example3())
    exp = fixtures.EX3_EXPECTED
    best = rep.best
    ok = best.classification == Classification.GLOBAL_MIN
    ok &= abs(float(best.zeta.tau[0]) - exp["tau_global"]) <= 1e-5
    ok &= np.max(np.abs(best.x - np.array(exp["x_global"]))) <= 1e-5
    ok &= abs(best.primal_value - exp["value_global"]) <= 1e-5
    second = nearest(rep.critical_pairs, lambda q: float(q.zeta.tau[0]),
                     exp["tau_second"])
    ok &= abs(float(second.zeta.tau[0]) - exp["tau_second"]) <= 1e-5
    ok &= abs(second.primal_value - exp["value_second"]) <= 1e-4
    ok &= second.primal_label == Classification.SADDLE
    elapsed = time.perf_counter() - t0
    announce(3, ok, elapsed, 1.0, "global pair + second critical point (primal saddle)")


def test_criterion_4_zero_gap_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    cfg = SolverConfig(num_starts=8, max_iter=80)
    pairs_checked = 0
    ok = True
    for _ in range(200):
        inst = rand_instance(rng, n=int(rng.integers(1, 5)))
        rep = find_critical_points(inst, cfg)
        fmax = float(np.max(np.abs(inst.f), initial=0.0))
        for p in rep.critical_pairs:
            pairs_checked += 1
            ok &= abs(p.primal_value - p.dual_value) <= 1e-6 * (1 + abs(p.dual_value))
            ok &= float(np.max(np.abs(grad_primal(inst, p.x)))) <= 1e-6 * (1 + fmax)
    ok &= pairs_checked >= 100  # the sweep must actually exercise the theorem
    elapsed = time.perf_counter() - t0
    announce(4, ok, elapsed, 30.0,
             f"zero gap + gradient transfer on {pairs_checked} critical pairs")


def test_criterion_5_derivative_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    ok = True
    for _ in range(100):
        inst = rand_instance(rng, n=int(rng.integers(1, 5)))
        x = rng.standard_normal(inst.n)
        g = grad_primal(inst, x)
        g_fd = fd_gradient(lambda y: eval_primal(inst, y), x, h=1e-5)
        ok &= float(np.max(np.abs(g - g_fd))) / (1 + float(np.max(np.abs(g)))) <= 1e-6
        H = hess_primal(inst, x)
        H_fd = fd_hessian(lambda y: eval_primal(inst, y), x, h=1e-4)
        ok &= float(np.max(np.abs(H - H_fd))) / (1 + float(np.max(np.abs(H)))) <= 1e-5
    for _ in range(100):
        inst = rand_instance(rng, n=int(rng.integers(1, 5)))
        zeta = rand_feasible_zeta(rng, inst)
        vec = zeta.vector()
        fn = lambda v: eval_dual(inst, DualPoint.from_vector(v, inst.p))
        g = grad_dual(inst, zeta)
        g_fd = fd_gradient(fn, vec, h=1e-5)
        ok &= float(np.max(np.abs(g - g_fd))) / (1 + float(np.max(np.abs(g)))) <= 1e-6
        H = hess_dual(inst, zeta)
        H_fd = fd_hessian(fn, vec, h=1e-4)
        ok &= float(np.max(np.abs(H - H_fd))) / (1 + float(np.max(np.abs(H)))) <= 1e-5
    elapsed = time.perf_counter() - t0
    announce(5, ok, elapsed, 10.0,
             "objective and dual derivatives vs central differences")


def test_criterion_6_oracle_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    from canodual.errors import HardCaseError

    successes = 0
    attempts = 0
    ok = True
    while successes < 50 and attempts < 150:
        attempts += 1
        inst = rand_instance(rng, n=int(rng.integers(1, 3)),
                             p=int(rng.integers(0, 2)), r=1,
                             a_range=(-1.5, 1.5), f_scale=0.4, spd_quartic=True,
                             alpha_range=(1.5, 4.0), c_range=(-1.2, 0.4),
                             spd_eigs=(0.6, 1.6))
        try:
            rep = solve_global(inst)
        except HardCaseError:
            continue
        successes += 1
        x_star, v_star = grid_global_min(inst, (-6.0, 6.0), 601)
        ok &= float(np.max(np.abs(x_star))) < 5.9  # optimum interior to the box
        ok &= abs(rep.best.primal_value - v_star) <= 1e-4
    ok &= successes == 50
    elapsed = time.perf_counter() - t0
    announce(6, ok, elapsed, 60.0,
             f"{successes} certified solves match the 601-node polished grid")


def test_criterion_7_existence_conditions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    ok = True
    verdicts_p1 = {"yes": 0, "no": 0}
    for i in range(100):
        n = int(rng.integers(1, 3))
        inst = rand_quartic_easy(rng, n) if i % 2 == 0 else rand_quartic_hard(rng, n)
        qi = QuarticInstance.from_problem(inst)
        verdict = existence_quartic(qi.spectral(), qi.alpha, qi.c)
        if verdict == ExistenceVerdict.NOT_EXISTS:
            verdicts_p1["no"] += 1
            try:
                solve_quartic(qi)
                ok = False
            except NoDualCriticalPointError:
                pass
            x_star, _ = grid_global_min(inst, (-8.0, 8.0), 401)
            z = duality_map(inst, x_star)
            # the hard-case optimum sits where G is exactly singular; the
            # finite oracle resolves that point only to ~1e-3
            ok &= float(np.linalg.eigvalsh(inst.curvature(z.tau, z.sigma))[0]) <= 1e-2
        else:
            verdicts_p1["yes"] += 1
            rep = solve_quartic(qi)
            x_star, v_star = grid_global_min(inst, (-8.0, 8.0), 401)
            ok &= abs(rep.best.primal_value - v_star) <= 1e-4
    ok &= min(verdicts_p1.values()) >= 20  # both branches exercised

    verdicts_p2 = {"yes": 0, "no": 0, "unbounded": 0}
    modes = (["generic"] * 30 + ["unconditional"] * 20 + ["exists"] * 20
             + ["not_exists"] * 15 + ["unbounded"] * 15)
    for mode in modes:
        n = int(rng.integers(1, 3))
        mm = rand_minimax(rng, n, mode)
        can = smooth_and_canonicalize(mm)
        verdict = existence_minimax(can.spectral(), can.d, can.beta)
        if verdict == ExistenceVerdict.UNBOUNDED:
            verdicts_p2["unbounded"] += 1
            with pytest.raises(Exception):
                solve_minimax(mm)
            v = can.spectral().U[:, 0]
            ray = [mm.max_value(can.to_original(t * v)) for t in 2.0 ** np.arange(26)]
            ok &= min(ray) < -1e6
        elif verdict == ExistenceVerdict.NOT_EXISTS:
            verdicts_p2["no"] += 1
            try:
                solve_minimax(mm)
                ok = False
            except NoDualCriticalPointError:
                pass
            prob = can.to_problem()
            y_star, _ = grid_global_min(prob, (-8.0, 8.0), 401)
            z = duality_map(prob, y_star)
            ok &= float(np.linalg.eigvalsh(prob.curvature(z.tau, z.sigma))[0]) <= 1e-2
        else:
            verdicts_p2["yes"] += 1
            rep = solve_minimax(mm)
            prob = can.to_problem()
            y_star, v_star = grid_global_min(prob, (-8.0, 8.0), 401)
            ok &= abs(rep.best.primal_value - (v_star + can.value_shift)) <= 1e-4
    ok &= verdicts_p2["yes"] >= 20 and verdicts_p2["no"] >= 10
    ok &= verdicts_p2["unbounded"] >= 10
    elapsed = time.perf_counter() - t0
    announce(7, ok, elapsed, 60.0,
             f"P1 {verdicts_p1} / P2 {verdicts_p2} all consistent with solver and oracle")


def test_criterion_8_definiteness_transfer_suite():
    t0 = time.perf_counter()
    ok = True
    for seed in range(10):
        for (r, n, m) in ((1, 2, 2), (2, 3, 3), (1, 3, 2)):
            ok &= definiteness_transfer_check(seed, 500, r=r, n=n, m=m)
    elapsed = time.perf_counter() - t0
    announce(8, ok, elapsed, 20.0, "10 seeds x 500 trials x 3 shapes")


def test_criterion_9_numerical_stability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    mm = fixtures.example3()
    ok = True
    for beta in (1.0, 1e2, 1e4):
        from canodual.minimax import MinimaxInstance

        swapped = MinimaxInstance(A1=mm.A1, A2=mm.A2, f1=mm.f1, f2=mm.f2,
                                  d1=mm.d1, d2=mm.d2, beta=beta)
        can = smooth_and_canonicalize(swapped)
        prob = can.to_problem()
        for _ in range(25):
            val = eval_lse(prob, rng.uniform(-5, 5, 2))
            ok &= math.isfinite(val)
        rep = solve_minimax(swapped)
        ok &= math.isfinite(rep.best.primal_value)
        ok &= all(math.isfinite(v) for v in rep.best.x)
    rows = beta_sweep(mm, [1.0, 1e2, 1e4])
    values = [row["value"] for row in rows]
    ok &= all(math.isfinite(v) for v in values)
    # decreasing toward the nonsmooth optimum value 0
    for coarse, fine in zip(values[:-1], values[1:]):
        ok &= fine <= coarse + 1e-9
    ok &= values[-1] >= -1e-9
    ok &= values[-1] <= 1e-3
    elapsed = time.perf_counter() - t0
    announce(9, ok, elapsed, 30.0,
             f"beta sweep values {['%.6f' % v for v in values]} decreasing to 0")
