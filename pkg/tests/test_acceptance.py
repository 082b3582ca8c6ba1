"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import re
import time
from functools import lru_cache

import numpy as np
import pytest

from darpline.adversary import (
    AdversaryConfig,
    gen_luring,
    gen_nowaiting_lb,
    gen_theta_gt2,
    gen_waiting_lb,
    run_general_lower_bound,
)
from darpline.analysis import (
    SILVER,
    audit_simulation,
    f1,
    f2,
    g1,
    g2,
    rho_lower_bound,
    solve_constants,
    theta_star,
    upper_bound,
)
from darpline.cli import main
from darpline.model import RandomInstanceConfig, random_instance
from darpline.offline import OfflineQuery, brute_force_makespan, makespan, opt, optimal_schedule
from darpline.online import GreedyReplan, Ignore, SmarterStart, Smartstart, eagerize, simulate

EPS = 1e-3
ADVERSARY_RHO = 2.0585


@pytest.fixture
def report(capsys):
    def _report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")

    return _report


def ratio_of(alg, inst):
    res = simulate(alg, inst)
    return res, res.completion_time / opt(inst)


# ---------------------------------------------------------------- shared runs


@lru_cache(maxsize=None)
def waiting_runs():
    out = []
    for theta in (1.3, 1.5, theta_star(), 1.9):
        inst = gen_waiting_lb(theta, EPS)
        res, r = ratio_of(SmarterStart(theta), inst)
        out.append((theta, inst, res, r, f1(theta) - EPS))
    return tuple(out)


@lru_cache(maxsize=None)
def nowaiting_runs():
    out = []
    for theta in (1.62, theta_star(), 1.8, 2.0):
        inst = gen_nowaiting_lb(theta, EPS)
        res, r = ratio_of(SmarterStart(theta), inst)
        out.append((theta, inst, res, r, f2(theta) - EPS))
    return tuple(out)


@lru_cache(maxsize=None)
def gt2_runs():
    out = []
    for theta in (2.2, SILVER, 3.0):
        inst = gen_theta_gt2(theta, EPS)
        res, r = ratio_of(SmarterStart(theta), inst)
        bound = g1(theta) if theta <= SILVER else g2(theta)
        out.append((theta, inst, res, r, bound - EPS))
    return tuple(out)


ADVERSARY_ALGS = {
    "ignore": Ignore,
    "smartstart:1.5": lambda: Smartstart(1.5),
    "smarterstart:theta*": lambda: SmarterStart(theta_star()),
    "replan": GreedyReplan,
}


@lru_cache(maxsize=None)
def adversary_runs(rho):
    return tuple(
        (name, c, run_general_lower_bound(eagerize(make()), AdversaryConfig(rho=rho, capacity=c)))
        for name, make in ADVERSARY_ALGS.items()
        for c in (1, 2)
    )


@lru_cache(maxsize=None)
def random_family():
    rng = np.random.default_rng(20240611)
    insts = []
    for k in range(500):
        cfg = RandomInstanceConfig(
            n=int(rng.integers(1, 6)), radius=3.0, capacity=(1, 2, 3, math.inf)[k % 4], visit_fraction=0.3
        )
        insts.append(random_instance(rng, cfg))
    return tuple(insts)


@lru_cache(maxsize=None)
def envelope_runs():
    out = []
    for theta in (1.3, theta_star(), 1.9):
        for inst in random_family():
            res = simulate(SmarterStart(theta), inst)
            best = opt(inst)
            r = 1.0 if best <= 1e-12 else res.completion_time / best
            out.append((theta, inst, res, r))
    return tuple(out)


def worst_gap(runs):
    return max(abs(r - want) for *_, r, want in runs)


# ---------------------------------------------------------------- criteria


def test_criterion_1_constants(report, capsys):
    solve_constants.cache_clear()
    start = time.perf_counter()
    code = main(["bounds"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    found = {k: float(v) for k, v in re.findall(r"(\w+)=([0-9.]+)", out)}
    want = {"rho_lb": 2.0585, "theta_star": 1.71249, "rho_star": 2.6662}
    errs = {k: abs(found[k] - v) for k, v in want.items()}
    ok = code == 0 and all(e <= 1e-4 for e in errs.values()) and elapsed < 1.0
    report(1, ok, " ".join(f"{k}={found[k]:.6f}" for k in want) + f" ({elapsed:.3f}s)")
    assert ok


def test_criterion_2_waiting_tight(report):
    start = time.perf_counter()
    gap = worst_gap(waiting_runs())
    elapsed = time.perf_counter() - start
    ok = gap <= 1e-6 and elapsed < 5
    report(2, ok, f"max |ratio - (f1 - eps)| = {gap:.3e} (tol 1e-6)")
    assert ok


def test_criterion_3_nowaiting_tight(report):
    start = time.perf_counter()
    runs = nowaiting_runs()
    elapsed = time.perf_counter() - start
    gap = worst_gap(runs)
    detail = ", ".join(f"theta={t:.5g}: {r - w:+.3e}" for t, _, _, r, w in runs)
    ok = gap <= 1e-6 and elapsed < 5
    report(3, ok, f"ratio - (f2 - eps): {detail} (tol 1e-6)")
    assert ok


def test_criterion_4_gt2_penalty(report):
    start = time.perf_counter()
    runs = gt2_runs()
    elapsed = time.perf_counter() - start
    gap = worst_gap(runs)
    meet = max(abs(g1(SILVER) - 2 * math.sqrt(2)), abs(g2(SILVER) - 2 * math.sqrt(2)))
    detail = ", ".join(f"theta={t:.5g}: {r - w:+.3e}" for t, _, _, r, w in runs)
    ok = gap <= 1e-6 and meet <= 1e-12 and elapsed < 5
    report(4, ok, f"ratio - (g - eps): {detail}; |g(1+sqrt2) - 2sqrt2| = {meet:.1e}")
    assert ok


def test_criterion_5_general_adversary(report):
    start = time.perf_counter()
    runs = adversary_runs(ADVERSARY_RHO)
    elapsed = time.perf_counter() - start
    low = min(tr.ratio for *_, tr in runs)
    opt_gap = max(abs(opt(tr.instance()) - tr.claimed_opt) for *_, tr in runs)
    ok = low >= 2.0585 - 1e-6 and opt_gap <= 1e-6 and elapsed < 30
    report(5, ok, f"min ratio {low:.7f} over {len(runs)} runs at rho={ADVERSARY_RHO}, OPT gap {opt_gap:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_5_at_the_exact_root(report):
    rho = rho_lower_bound()
    runs = adversary_runs(rho)
    low = min(tr.ratio for *_, tr in runs)
    opt_gap = max(abs(opt(tr.instance()) - tr.claimed_opt) for *_, tr in runs)
    ok = low >= rho - 1e-6 and opt_gap <= 1e-6
    report("5 (rho = exact root)", ok, f"min ratio {low:.9f} vs rho {rho:.9f}")
    assert ok


def test_criterion_6_upper_envelope(report):
    start = time.perf_counter()
    runs = envelope_runs()
    elapsed = time.perf_counter() - start
    slack = min(upper_bound(theta) - r for theta, _, _, r in runs)
    ok = slack >= -1e-6 and elapsed < 120
    report(6, ok, f"{len(runs)} runs, min (max(f1,f2) - ratio) = {slack:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_7_oracle_equivalence(report):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    worst = 0.0
    for k in range(500):
        cap = (1, 2, 3, math.inf)[k % 4]
        inst = random_instance(
            rng, RandomInstanceConfig(n=int(rng.integers(1, 7)), radius=3.0, capacity=cap, visit_fraction=0.3)
        )
        q = OfflineQuery(float(rng.uniform(0, 6)), float(rng.uniform(-3, 3)), inst.requests, cap)
        worst = max(worst, abs(optimal_schedule(q).makespan - brute_force_makespan(q)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60
    report(7, ok, f"500 queries, max |search - brute force| = {worst:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_structural_audits(report):
    sims = [(theta, inst, res) for theta, inst, res, *_ in waiting_runs() + nowaiting_runs() + gt2_runs()]
    for name, _, tr in adversary_runs(ADVERSARY_RHO):
        if name.startswith("smarterstart"):
            inst = tr.instance()
            sims.append((theta_star(), inst, simulate(SmarterStart(theta_star()), inst)))
    sims += [(theta, inst, res) for theta, inst, res, _ in envelope_runs()]
    failures = []
    for theta, inst, res in sims:
        rep = audit_simulation(res, inst, theta)
        failures += [(theta, c.name, c.margin) for c in rep.failures]
    ok = not failures
    report(8, ok, f"{len(sims)} simulations audited, {len(failures)} failed checks")
    assert ok, failures[:5]


def test_criterion_9_makespan_laws(report):
    rng = np.random.default_rng(9)
    bad = []
    for k in range(300):
        cap = (1, 2, 3, math.inf)[k % 4]
        inst = random_instance(
            rng, RandomInstanceConfig(n=int(rng.integers(1, 5)), radius=3.0, capacity=cap, visit_fraction=0.3)
        )
        reqs = inst.requests
        t, t2 = sorted(rng.uniform(0, 8, size=2))
        p, p2 = rng.uniform(-3, 3, size=2)
        if makespan(t, p, reqs, cap) < makespan(t2, p, reqs, cap) - 1e-9:
            bad.append(("monotone", k))
        if makespan(t, p, reqs, cap) > abs(p - p2) + makespan(t, p2, reqs, cap) + 1e-9:
            bad.append(("triangle", k))
        known = [r for r in reqs if r.release <= t]
        chain = [makespan(t, 0, known, cap), makespan(t, 0, reqs, cap), makespan(0, 0, reqs, cap), opt(inst)]
        if any(a > b + 1e-9 for a, b in zip(chain, chain[1:])):
            bad.append(("prefix", k))
    ok = not bad
    report(9, ok, f"300 samples, {len(bad)} violations")
    assert ok, bad[:5]


def test_criterion_10_luring(report):
    inst = gen_luring(1.0, 0.05, 2.0)
    fast = simulate(Smartstart(2.0), inst).trajectory.first_reach(1.0)
    slow = simulate(SmarterStart(2.0), inst).trajectory.first_reach(1.0)
    ok = abs(fast - 1.05) <= 1e-9 and slow >= 1.0 - 1e-9
    report(10, ok, f"Smartstart reaches 1 at {fast:.12g}, SmarterStart at {slow:.12g}")
    assert ok

