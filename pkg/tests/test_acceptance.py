"""End-to-end acceptance gate.

Each test emits exactly one verdict line before asserting:

    ACCEPTANCE <n> [<name>]: PASS|FAIL -- <measured values>

The lines are echoed in the terminal summary (see conftest.py), so they
appear in any runner log even with output capture on.

The eight checks, with their pinned tolerances:

1.  Rugged-landscape optima count: for N in {4, 8, 12} with K = N-1, the
    mean number of local optima over 10,000 landscapes per N is within 5%
    of 2^N/(N+1).
2.  Smooth-landscape walks: for K = 0 and N in {4, 8, 12}, adaptive walks
    from all 2^N starting genotypes reach the unique global optimum, under
    both move rules, in 100% of cases.
3.  Coevolution speed: over the grid K in {1,3,5,7} x C in {0,2,4} x
    S in {2,4,8} at N = 8 with 200 systems per cell (ring coupling,
    round-robin scheduling, greedy moves), the Kendall rank correlation of
    cell-median steps-to-equilibrium is <= -0.3 against K and >= +0.3
    against C and against S.
4.  Market invariants: over 100 seeded runs (5 groups, 6 suppliers,
    200 periods, technology shock at period 100), zero violations of the
    share simplex, the welfare floor (group welfare >= outside option),
    rationing conservation, target-utility monotonicity under innovation,
    and design-space confinement before and after the shock.
5.  Welfare envelope: across a 200-seed batch under default parameters all
    four outcome classes occur, and among runs classified substitution_A or
    substitution_B the terminal aggregate welfare exceeds the pre-shock
    maximum in at least 90% of runs.
6.  Self-adaptive mutation: pooled terminal mutation rates evolved on
    smooth (K=0) versus maximally rugged (K=N-1) landscapes (N=16,
    population 100, 300 generations, 30 seeds per condition) differ by a
    two-sided Mann-Whitney rank test at p < 0.05.
7.  Determinism: rerunning any experiment kind with an identical config and
    seed yields byte-identical CSV reports, and a 4-worker concurrent batch
    writes the same bytes as the sequential one.
8.  Oracle equivalence: for N <= 10 every adaptive-walk endpoint is a
    member of the brute-force local-optima set, and the replicator share
    update matches direct formula evaluation to 1e-12 on random inputs.
"""

import itertools
import sys
from collections import Counter

import numpy as np
from scipy import stats
from conftest import record_verdict

from coevo import (
    GAConfig,
    MarketParams,
    adaptive_walk,
    build_landscape,
    build_nkc,
    classify_outcome,
    coevolution_run,
    enumerate_local_optima,
    one_mutant_neighbors,
    parse_config,
    run_batch,
    run_market,
    run_meta_ga,
    write_reports,
)
from coevo.market import OUTCOME_CLASSES, active_dims, replicator_update
from coevo.metaga import RateCoding, decode_rates


def _report(number: int, name: str, ok: bool, detail: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {number} [{name}]: {verdict} -- {detail}"
    record_verdict(line)
    print(line, file=sys.__stdout__, flush=True)
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. mean local-optima count on maximally rugged landscapes
# ---------------------------------------------------------------------------


def test_01_rugged_optima_count_matches_expectation():
    landscapes_per_n = 10_000
    tolerance = 0.05
    parts = []
    ok = True
    for n in (4, 8, 12):
        expected = 2**n / (n + 1)
        counts = np.empty(landscapes_per_n)
        for i in range(landscapes_per_n):
            landscape = build_landscape(n, n - 1, seed=n * 1_000_000 + i)
            counts[i] = len(enumerate_local_optima(landscape))
        mean = counts.mean()
        rel = abs(mean - expected) / expected
        ok = ok and rel <= tolerance
        parts.append(f"N={n}: mean {mean:.3f} vs {expected:.3f} ({rel:.2%})")
    _report(1, "rugged optima count", ok, "; ".join(parts) + f" [tol {tolerance:.0%}]")


# ---------------------------------------------------------------------------
# 2. smooth landscapes: every start walks to the unique global optimum
# ---------------------------------------------------------------------------


def test_02_smooth_walks_always_reach_global_optimum():
    reached = 0
    total = 0
    unique = True
    for n in (4, 8, 12):
        landscape = build_landscape(n, 0, seed=7 * n + 1)
        optima = enumerate_local_optima(landscape)
        unique = unique and len(optima) == 1
        target = next(iter(optima))
        for rule in ("random_fitter", "greedy"):
            rng = np.random.default_rng(n)
            for bits in itertools.product((0, 1), repeat=n):
                walk = adaptive_walk(landscape, bits, rule=rule, rng=rng)
                total += 1
                if walk.terminated_at_optimum and walk.endpoint == target:
                    reached += 1
    ok = unique and reached == total
    _report(
        2,
        "smooth walks find the optimum",
        ok,
        f"{reached}/{total} walks ended at the unique optimum "
        f"(single-optimum check: {'ok' if unique else 'VIOLATED'}) [required 100%]",
    )


# ---------------------------------------------------------------------------
# 3. coevolution speed responds to K, C and S
# ---------------------------------------------------------------------------


def test_03_equilibrium_speed_rank_correlations():
    reps = 200
    cap = 5_000
    threshold = 0.3
    cells = []
    for k in (1, 3, 5, 7):
        for c in (0, 2, 4):
            for s in (2, 4, 8):
                steps = np.empty(reps)
                for rep in range(reps):
                    rng = np.random.default_rng([k, c, s, rep])
                    system = build_nkc(
                        s, 8, k, c, seed=int(rng.integers(2**63)), topology="ring"
                    )
                    result = coevolution_run(
                        system,
                        order="round_robin",
                        rule="greedy",
                        rng=rng,
                        max_steps=cap,
                    )
                    steps[rep] = result.steps if result.converged else cap
                cells.append((k, c, s, float(np.median(steps))))
    k_vals, c_vals, s_vals, medians = map(np.array, zip(*cells))
    tau_k = stats.kendalltau(k_vals, medians).statistic
    tau_c = stats.kendalltau(c_vals, medians).statistic
    tau_s = stats.kendalltau(s_vals, medians).statistic
    ok = tau_k <= -threshold and tau_c >= threshold and tau_s >= threshold
    _report(
        3,
        "equilibrium speed vs K, C, S",
        ok,
        f"tau_K={tau_k:+.3f} (need <= -{threshold}), "
        f"tau_C={tau_c:+.3f}, tau_S={tau_s:+.3f} (need >= +{threshold}); "
        f"36 cell medians, {reps} systems/cell",
    )


# ---------------------------------------------------------------------------
# 4. market invariants hold in every period of every run
# ---------------------------------------------------------------------------


def test_04_market_invariants_hold():
    runs = 100
    periods = 200
    params = MarketParams()
    shock = params.shock
    old_dims = active_dims("old", shock)
    new_dims = active_dims("new", shock)
    violations = Counter()

    for seed in range(runs):
        for rec in run_market(params, periods, seed=seed):
            if np.any(rec.shares_after < -1e-12) or abs(rec.shares_after.sum() - 1) > 1e-9:
                violations["simplex"] += 1
            if np.any(rec.group_welfare < rec.null_welfare - 1e-9):
                violations["welfare floor"] += 1
            bought = rec.purchases.sum(axis=0)
            if (
                np.any(np.abs(bought - rec.sales) > 1e-9)
                or np.any(rec.sales > rec.quantities + 1e-9)
                or np.any(rec.purchases.sum(axis=1) > rec.sizes)
                or rec.sizes.sum() != params.population
            ):
                violations["rationing conservation"] += 1
            if np.any(rec.target_utility_post < rec.target_utility_pre - 1e-12):
                violations["target-utility monotonicity"] += 1
            for row, tech in zip(rec.designs, rec.supplier_types):
                live = old_dims if tech == "old" else new_dims
                dead = np.setdiff1d(np.arange(shock.h), live)
                confined = np.all(row >= -1e-12) and np.all(row[dead] == 0.0)
                if rec.period < shock.T1:
                    # the characteristic cap applies only before the shock
                    confined = confined and tech == "old"
                    confined = confined and np.all(row[live] <= shock.x_max + 1e-12)
                if not confined:
                    violations["design confinement"] += 1
    ok = not violations
    detail = (
        f"{runs} runs x {periods} periods, zero violations"
        if ok
        else f"violations: {dict(violations)}"
    )
    _report(4, "market invariants", ok, detail)


# ---------------------------------------------------------------------------
# 5. welfare envelope lift and outcome-class coverage
# ---------------------------------------------------------------------------


def test_05_welfare_envelope_and_outcome_coverage():
    seeds = 200
    required_lift = 0.90
    params = MarketParams()
    t1 = params.shock.T1
    classes = Counter()
    lifted = 0
    substitutions = 0
    for seed in range(seeds):
        history = run_market(params, 200, seed=seed)
        outcome = classify_outcome(history, params)
        classes[outcome] += 1
        if outcome in ("substitution_A", "substitution_B"):
            substitutions += 1
            pre_max = max(r.aggregate_welfare for r in history[:t1])
            if history[-1].aggregate_welfare > pre_max:
                lifted += 1
    coverage = all(classes[c] > 0 for c in OUTCOME_CLASSES)
    share = lifted / substitutions if substitutions else 0.0
    ok = coverage and substitutions > 0 and share >= required_lift
    _report(
        5,
        "welfare envelope lift",
        ok,
        f"classes {dict(classes)}; lift {lifted}/{substitutions} "
        f"({share:.0%}, need >= {required_lift:.0%})",
    )


# ---------------------------------------------------------------------------
# 6. evolved mutation rates adapt to landscape ruggedness
# ---------------------------------------------------------------------------


def test_06_terminal_mutation_rates_differ_by_ruggedness():
    seeds = 30
    alpha = 0.05
    coding = RateCoding()

    def terminal_rates(k: int) -> np.ndarray:
        pools = []
        for seed in range(seeds):
            cfg = GAConfig(N=16, K=k, population=100, generations=300, seed=seed)
            result = run_meta_ga(cfg)
            pools.append([decode_rates(c, coding)[0] for c in result.population])
        return np.concatenate(pools)

    smooth = terminal_rates(0)
    rugged = terminal_rates(15)
    p = stats.mannwhitneyu(smooth, rugged, alternative="two-sided").pvalue
    ok = p < alpha
    _report(
        6,
        "self-adaptive mutation rates",
        ok,
        f"pooled medians: smooth {np.median(smooth):.2e} vs rugged "
        f"{np.median(rugged):.2e}; Mann-Whitney p={p:.3g} (need < {alpha})",
    )


# ---------------------------------------------------------------------------
# 7. byte-identical reports: reruns and concurrent batches
# ---------------------------------------------------------------------------

FAST_PAYLOADS = {
    "nk-walk": {"kind": "nk-walk", "N": 8, "K": 2, "walks": 4},
    "nk-optima": {"kind": "nk-optima", "N": 7, "K": 2},
    "nkc-coevolve": {
        "kind": "nkc-coevolve", "S": 2, "N": 6, "K": 2, "C": 1, "max_steps": 500,
    },
    "wb-run": {
        "kind": "wb-run", "periods": 12, "T1": 5, "horizon": 4, "classify_window": 3,
    },
    "metaga-run": {
        "kind": "metaga-run", "N": 8, "K": 2, "population": 10, "generations": 5,
    },
}


def _csv_bytes(logs, config, out_dir) -> tuple[bytes, bytes]:
    paths = write_reports(logs, config, out_dir, figures=False)
    with open(paths["timeseries"], "rb") as fh:
        timeseries = fh.read()
    with open(paths["summary_csv"], "rb") as fh:
        summary = fh.read()
    return timeseries, summary


def test_07_reports_are_byte_identical(tmp_path):
    mismatches = []
    for kind, payload in FAST_PAYLOADS.items():
        config = parse_config({**payload, "replicates": 3, "seed": 42})
        first = _csv_bytes(run_batch(config), config, tmp_path / f"{kind}-a")
        second = _csv_bytes(run_batch(config), config, tmp_path / f"{kind}-b")
        if first != second:
            mismatches.append(f"{kind}: rerun differs")
        concurrent = _csv_bytes(
            run_batch(config, workers=4), config, tmp_path / f"{kind}-c"
        )
        if first != concurrent:
            mismatches.append(f"{kind}: concurrent differs")
    ok = not mismatches
    detail = (
        f"{len(FAST_PAYLOADS)} kinds x (rerun + 4-worker batch) all byte-identical"
        if ok
        else "; ".join(mismatches)
    )
    _report(7, "deterministic reports", ok, detail)


# ---------------------------------------------------------------------------
# 8. independent oracles: brute-force optima membership and replicator formula
# ---------------------------------------------------------------------------


def _brute_force_optima(landscape) -> set:
    optima = set()
    for code in range(2**landscape.N):
        genotype = tuple((code >> j) & 1 for j in range(landscape.N))
        fit = landscape.fitness(genotype)
        if all(landscape.fitness(nb) <= fit for nb in one_mutant_neighbors(genotype)):
            optima.add(genotype)
    return optima


def test_08_walk_and_replicator_oracles():
    member = 0
    walks = 0
    for n in (6, 8, 10):
        for seed in (1, 2):
            landscape = build_landscape(n, n // 2, seed=100 * n + seed)
            optima = _brute_force_optima(landscape)
            rng = np.random.default_rng(seed)
            for _ in range(30):
                start = tuple(rng.integers(0, 2, size=n).tolist())
                for rule in ("random_fitter", "greedy"):
                    walk = adaptive_walk(landscape, start, rule=rule, rng=rng)
                    walks += 1
                    if walk.endpoint in optima:
                        member += 1

    rng = np.random.default_rng(2024)
    max_err = 0.0
    trials = 400
    for t in range(trials):
        m = int(rng.integers(2, 9))
        shares = rng.dirichlet(np.ones(m))
        if t % 3 == 0 and m > 2:
            shares[rng.integers(m)] = 0.0
            shares /= shares.sum()
        welfare = rng.uniform(0.1, 5.0, size=m)
        r = (0.5, 1.0, 2.0, 3.7)[t % 4]
        direct = shares * welfare**r
        direct /= direct.sum()
        got = replicator_update(shares, welfare, r)
        max_err = max(max_err, float(np.max(np.abs(got - direct))))

    ok = member == walks and max_err <= 1e-12
    _report(
        8,
        "walk and replicator oracles",
        ok,
        f"{member}/{walks} endpoints in brute-force optima sets; "
        f"replicator max |err| {max_err:.2e} over {trials} trials (tol 1e-12)",
    )
