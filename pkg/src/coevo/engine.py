"""Seeded batch execution of configured experiments.

A batch runs ``replicates`` independent copies of one experiment; replicate
``i`` always uses seed ``base_seed + i``, so any replicate can be reproduced
alone and a batch's outputs do not depend on how the work was scheduled.
Replicates may run sequentially or on a process pool; both paths produce
identical :class:`RunLog` sequences, and hence byte-identical reports.

Inside a replicate, every random decision flows from one
``numpy.random.default_rng(seed)`` stream in a fixed order (component seeds
first, then dynamics), which pins the full trajectory to the seed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import (
    CoevolveSettings,
    ExperimentConfig,
    MarketSettings,
    MetaGASettings,
    OptimaSettings,
    WalkSettings,
)
from .errors import ParameterError
from .market import (
    NEW_TECH,
    classify_outcome,
    init_state,
    step_period,
)
from .metaga import GAConfig, RateCoding, run_meta_ga
from .nk import (
    adaptive_walk,
    build_landscape,
    build_nkc,
    coevolution_run,
    enumerate_local_optima,
)

#: Upper bound (exclusive) for derived component seeds.
_SEED_SPAN = 2**63


@dataclass
class RunLog:
    """One replicate's observables: per-step rows plus end-of-run scalars."""

    kind: str
    replicate: int
    seed: int
    timeseries: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _bits_to_str(bits) -> str:
    return "".join(str(int(b)) for b in bits)


# ---------------------------------------------------------------------------
# per-kind replicate runners
# ---------------------------------------------------------------------------


def _run_walk(settings: WalkSettings, seed: int) -> tuple[list[dict], dict]:
    rng = np.random.default_rng(seed)
    landscape = build_landscape(
        settings.N, settings.K, seed=int(rng.integers(_SEED_SPAN)), scheme=settings.scheme
    )
    rows = []
    for w in range(settings.walks):
        start = tuple(int(b) for b in rng.integers(0, 2, settings.N))
        walk = adaptive_walk(
            landscape, start, rule=settings.rule, rng=rng, max_steps=settings.max_steps
        )
        rows.append(
            {
                "walk": w,
                "steps": walk.steps,
                "start_fitness": landscape.fitness(start),
                "final_fitness": walk.final_fitness,
                "at_local_optimum": int(walk.terminated_at_optimum),
                "endpoint": _bits_to_str(walk.endpoint),
            }
        )
    steps = np.array([r["steps"] for r in rows], dtype=float)
    finals = np.array([r["final_fitness"] for r in rows])
    summary = {
        "walks": settings.walks,
        "mean_steps": float(steps.mean()),
        "max_steps_taken": int(steps.max()),
        "mean_final_fitness": float(finals.mean()),
        "best_final_fitness": float(finals.max()),
        "optimum_fraction": float(
            np.mean([r["at_local_optimum"] for r in rows])
        ),
    }
    return rows, summary


def _run_optima(settings: OptimaSettings, seed: int) -> tuple[list[dict], dict]:
    rng = np.random.default_rng(seed)
    landscape = build_landscape(
        settings.N, settings.K, seed=int(rng.integers(_SEED_SPAN)), scheme=settings.scheme
    )
    optima = sorted(enumerate_local_optima(landscape))
    rows = [
        {
            "optimum": i,
            "genotype": _bits_to_str(g),
            "fitness": landscape.fitness(g),
        }
        for i, g in enumerate(optima)
    ]
    fitnesses = np.array([r["fitness"] for r in rows])
    summary = {
        "optima_count": len(optima),
        "global_max_fitness": float(fitnesses.max()),
        "mean_optimum_fitness": float(fitnesses.mean()),
    }
    return rows, summary


def _run_coevolve(settings: CoevolveSettings, seed: int) -> tuple[list[dict], dict]:
    rng = np.random.default_rng(seed)
    system = build_nkc(
        settings.S,
        settings.N,
        settings.K,
        settings.C,
        seed=int(rng.integers(_SEED_SPAN)),
        topology=settings.topology,
    )
    result = coevolution_run(
        system,
        order=settings.order,
        rule=settings.rule,
        max_steps=settings.max_steps,
        rng=rng,
    )
    rows = [
        {"species": s, "final_fitness": float(f)}
        for s, f in enumerate(result.species_fitness)
    ]
    summary = {
        "converged": int(result.converged),
        "steps": result.steps,
        "passes": result.passes,
        "mean_final_fitness": float(np.mean(result.species_fitness)),
        "min_final_fitness": float(np.min(result.species_fitness)),
    }
    return rows, summary


def _run_market(settings: MarketSettings, seed: int) -> tuple[list[dict], dict]:
    params = settings.params
    rng = np.random.default_rng(seed)
    state = init_state(params, rng)
    history = [step_period(state, rng) for _ in range(settings.periods)]

    rows = []
    for rec in history:
        row = {
            "period": rec.period,
            "shock_fired": int(rec.shock_fired),
            "aggregate_welfare": rec.aggregate_welfare,
            "total_sales": float(rec.sales.sum()),
            "new_tech_sales_share": rec.new_tech_sales_share,
        }
        for slot, (share, welf, gtype) in enumerate(
            zip(rec.shares_after, rec.group_welfare, rec.group_types)
        ):
            row[f"group{slot}_share"] = float(share)
            row[f"group{slot}_welfare"] = float(welf)
            row[f"group{slot}_tech"] = gtype
        for slot, (sales, price, stype) in enumerate(
            zip(rec.sales, rec.prices, rec.supplier_types)
        ):
            row[f"supplier{slot}_sales"] = float(sales)
            row[f"supplier{slot}_price"] = float(price)
            row[f"supplier{slot}_tech"] = stype
        rows.append(row)

    welfare = np.array([rec.aggregate_welfare for rec in history])
    t1 = params.shock.T1
    pre = welfare[:t1] if t1 > 0 else welfare[:0]
    can_classify = settings.periods >= t1 + params.horizon
    outcome = classify_outcome(history, params) if can_classify else "unclassified"
    pre_max = float(pre.max()) if pre.size else float("nan")
    final = float(welfare[-1])
    summary = {
        "periods": settings.periods,
        "outcome": outcome,
        "pre_shock_max_welfare": pre_max,
        "final_welfare": final,
        "welfare_exceeds_pre_shock_max": int(pre.size > 0 and final > pre_max),
        "final_new_tech_share": history[-1].new_tech_sales_share,
        "final_new_supplier_count": sum(
            1 for t in history[-1].supplier_types if t == NEW_TECH
        ),
    }
    return rows, summary


def _run_metaga(settings: MetaGASettings, seed: int) -> tuple[list[dict], dict]:
    config = GAConfig(
        N=settings.N,
        K=settings.K,
        population=settings.population,
        generations=settings.generations,
        seed=seed,
        scheme=settings.scheme,
        coding=RateCoding(rate_min=settings.rate_min, rate_max=settings.rate_max),
        elitism=settings.elitism,
    )
    result = run_meta_ga(config)
    rows = [
        {
            "generation": g.generation,
            "best_fitness": g.best_fitness,
            "mean_fitness": g.mean_fitness,
            "mean_mutation_rate": g.mean_mu,
            "mean_crossover_rate": g.mean_chi,
            "mean_inversion_rate": g.mean_iota,
        }
        for g in result.history
    ]
    last = result.history[-1]
    summary = {
        "generations": settings.generations,
        "final_best_fitness": last.best_fitness,
        "final_mean_fitness": last.mean_fitness,
        "final_mean_mutation_rate": last.mean_mu,
        "final_mean_crossover_rate": last.mean_chi,
        "final_mean_inversion_rate": last.mean_iota,
    }
    return rows, summary


_RUNNERS = {
    "nk-walk": _run_walk,
    "nk-optima": _run_optima,
    "nkc-coevolve": _run_coevolve,
    "wb-run": _run_market,
    "metaga-run": _run_metaga,
}


# ---------------------------------------------------------------------------
# batch execution
# ---------------------------------------------------------------------------


def run_replicate(kind: str, settings: object, replicate: int, seed: int) -> RunLog:
    """Run one replicate of ``kind`` with its own seed."""
    try:
        runner = _RUNNERS[kind]
    except KeyError:
        raise ParameterError(f"unknown experiment kind {kind!r}") from None
    timeseries, summary = runner(settings, seed)
    return RunLog(
        kind=kind, replicate=replicate, seed=seed, timeseries=timeseries, summary=summary
    )


def _replicate_star(args: tuple) -> RunLog:
    return run_replicate(*args)


def run_batch(
    config: ExperimentConfig,
    replicates: int | None = None,
    base_seed: int | None = None,
    workers: int = 1,
) -> list[RunLog]:
    """Run a batch of replicates; results are ordered by replicate index.

    Replicate ``i`` uses seed ``base_seed + i``. With ``workers > 1`` the
    replicates are distributed over a process pool; scheduling cannot change
    any result because every replicate is a pure function of its seed.
    """
    replicates = config.replicates if replicates is None else replicates
    base_seed = config.seed if base_seed is None else base_seed
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")
    if base_seed < 0:
        raise ParameterError(f"base seed must be >= 0, got {base_seed}")
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    jobs = [
        (config.kind, config.settings, i, base_seed + i) for i in range(replicates)
    ]
    if workers == 1 or replicates == 1:
        return [_replicate_star(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, replicates)) as pool:
        return list(pool.map(_replicate_star, jobs))
