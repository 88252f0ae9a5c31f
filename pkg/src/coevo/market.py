"""Agent-based market of heterogeneous user groups and innovating suppliers.

User groups carry taste weights over product characteristics and choose each
period between posted offers and an outside option; suppliers post prices and
capacities, earn profits, adapt output toward demand, and improve their
designs by local mutation and by imitating profitable rivals. Group shares
evolve by payoff-biased replication, so demand composition and supply
decisions coevolve. Midway through a run a second technology with a larger
characteristics space and a cost advantage can enter, replacing marginal
suppliers and user groups; runs then end in substitution, lock-out, or
market sharing.

Conventions used throughout:

* Characteristics vectors have fixed length ``h``; a technology only "sees"
  a contiguous slice of the dimensions (old: ``0..h1-1``, new: ``h2-1..h-1``,
  with 1 <= h2 <= h1 < h so the technologies overlap). Inactive entries stay
  exactly 0.0.
* Group utility for design ``x`` at price ``p`` is
  ``sum_k alpha_k sqrt(x_k) + beta sqrt(m - p)``; the outside option is worth
  ``beta sqrt(m)``. Offers priced above the budget ``m`` are unaffordable and
  rank below the outside option.
* All stochastic steps consume a caller-supplied ``numpy.random.Generator``
  in a fixed documented order, so runs are reproducible from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegeneratePopulationError,
    ParameterError,
    SelectionError,
    StateError,
)

OLD_TECH = "old"
NEW_TECH = "new"

#: Profit floor used as a roulette weight so bankrupt suppliers keep a
#: vanishing but nonzero chance of being imitated.
PROFIT_FLOOR = 1e-9

#: Sentinel placed in preference lists for the outside (no-purchase) option.
NULL_OFFER = None


# ---------------------------------------------------------------------------
# agents and parameters
# ---------------------------------------------------------------------------


@dataclass
class UserGroup:
    """A homogeneous consumer group: shared tastes, budget, and a population
    share that evolves by payoff-biased replication."""

    id: int
    alpha: np.ndarray  # taste weights, length h, zero outside the tech's dims
    beta: float  # weight on residual income
    budget: float  # per-user income m, shared across groups
    share: float  # fraction of the user population
    tech_type: str = OLD_TECH

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.ndim != 1:
            raise ParameterError("alpha must be a 1-D vector")
        if np.any(self.alpha < 0):
            raise ParameterError("alpha weights must be non-negative")
        if self.beta <= 0:
            raise ParameterError("beta must be positive")
        if self.budget <= 0:
            raise ParameterError("budget must be positive")
        if self.share < 0:
            raise ParameterError("share must be non-negative")
        if self.tech_type not in (OLD_TECH, NEW_TECH):
            raise ParameterError(f"unknown tech_type {self.tech_type!r}")


@dataclass
class Supplier:
    """A supplier posting one design at one price with bounded capacity."""

    id: int
    design: np.ndarray  # characteristics vector, length h
    price: float
    quantity: float  # capacity posted next session
    target_group: int  # id of the group whose utility guides innovation
    tech_type: str = OLD_TECH
    wealth: float = 0.0
    profit: float = 0.0  # most recent period's profit
    market_share: float = 0.0  # unit-sales share in the most recent session

    def __post_init__(self) -> None:
        self.design = np.asarray(self.design, dtype=float)
        if self.design.ndim != 1:
            raise ParameterError("design must be a 1-D vector")
        if np.any(self.design < 0):
            raise ParameterError("design characteristics must be non-negative")
        if self.price < 0:
            raise ParameterError("price must be non-negative")
        if self.quantity < 0:
            raise ParameterError("quantity must be non-negative")
        if self.tech_type not in (OLD_TECH, NEW_TECH):
            raise ParameterError(f"unknown tech_type {self.tech_type!r}")


@dataclass(frozen=True)
class ShockConfig:
    """When and how the second technology enters.

    At the start of period ``T1`` suppliers whose unit-sales share and groups
    whose population share sit below the cutoffs are replaced one-for-one by
    new-technology entrants; the new technology spans dimensions
    ``h2-1..h-1`` (1-indexed bounds ``1 <= h2 <= h1 < h``), the design-space
    cap on characteristic values is lifted, and entrant unit-cost weights are
    the incumbent weights scaled by ``theta``.
    """

    T1: int = 100
    h: int = 6  # total characteristics dimensions
    h1: int = 4  # old tech spans dims 1..h1 (1-indexed)
    h2: int = 2  # new tech spans dims h2..h (1-indexed)
    x_max: float = 10.0  # pre-entry cap on characteristic values
    theta: float = 0.5  # entrant cost-weight multiplier, in (0, 1]
    share_cutoff_supplier: float = 0.1
    share_cutoff_user: float = 0.1

    def __post_init__(self) -> None:
        if self.T1 < 0:
            raise ParameterError("T1 must be non-negative")
        if not (1 <= self.h2 <= self.h1 < self.h):
            raise ParameterError(
                f"need 1 <= h2 <= h1 < h, got h2={self.h2} h1={self.h1} h={self.h}"
            )
        if self.x_max <= 0:
            raise ParameterError("x_max must be positive")
        if not (0 < self.theta <= 1):
            raise ParameterError("theta must lie in (0, 1]")
        for name in ("share_cutoff_supplier", "share_cutoff_user"):
            cut = getattr(self, name)
            if not (0 <= cut < 1):
                raise ParameterError(f"{name} must lie in [0, 1)")


@dataclass(frozen=True)
class MarketParams:
    """Everything needed to build and step a market run."""

    groups: int = 5
    suppliers: int = 6
    population: int = 100  # total user count G, split across groups
    budget: float = 10.0  # per-user income m
    r: float = 1.0  # replicator payoff exponent
    mu: float = 0.15  # per-component design mutation probability
    kappa: float = 1.0  # mutation step scale
    lam: float = 0.3  # partial-adjustment speed of capacity toward demand
    markup: float = 0.2  # price = (1 + markup) * unit cost
    gamma: float = 0.05  # unit-cost weight per characteristic unit
    q0: float = 20.0  # initial posted capacity
    alpha_min: float = 0.2
    alpha_max: float = 1.2
    beta_min: float = 0.8
    beta_max: float = 1.2
    shock: ShockConfig = field(default_factory=ShockConfig)
    # outcome classification
    horizon: int = 50  # periods after T1 before classification is meaningful
    classify_window: int = 10  # terminal periods averaged for classification
    substitution_threshold: float = 0.9
    lockout_threshold: float = 0.1

    def __post_init__(self) -> None:
        if self.groups < 1:
            raise ParameterError("need at least one user group")
        if self.suppliers < 0:
            raise ParameterError("supplier count must be non-negative")
        if self.population < 1:
            raise ParameterError("population must be positive")
        if self.budget <= 0:
            raise ParameterError("budget must be positive")
        if self.r <= 0:
            raise ParameterError("replicator exponent r must be positive")
        if not (0 <= self.mu <= 1):
            raise ParameterError("mu must lie in [0, 1]")
        if self.kappa <= 0:
            raise ParameterError("kappa must be positive")
        if not (0 < self.lam <= 1):
            raise ParameterError("lambda must lie in (0, 1]")
        if self.markup < 0:
            raise ParameterError("markup must be non-negative")
        if self.gamma <= 0:
            raise ParameterError("gamma must be positive")
        if self.q0 < 0:
            raise ParameterError("q0 must be non-negative")
        if not (0 < self.alpha_min <= self.alpha_max):
            raise ParameterError("need 0 < alpha_min <= alpha_max")
        if not (0 < self.beta_min <= self.beta_max):
            raise ParameterError("need 0 < beta_min <= beta_max")
        if self.horizon < 1 or self.classify_window < 1:
            raise ParameterError("horizon and classify_window must be >= 1")
        if not (0 <= self.lockout_threshold < self.substitution_threshold <= 1):
            raise ParameterError(
                "need 0 <= lockout_threshold < substitution_threshold <= 1"
            )


def active_dims(tech_type: str, shock: ShockConfig) -> np.ndarray:
    """Indices (0-based) of the characteristics a technology can use."""
    if tech_type == OLD_TECH:
        return np.arange(0, shock.h1)
    if tech_type == NEW_TECH:
        return np.arange(shock.h2 - 1, shock.h)
    raise ParameterError(f"unknown tech_type {tech_type!r}")


def cost_weights(params: MarketParams, tech_type: str) -> np.ndarray:
    """Per-dimension unit-cost weights; entrants enjoy the theta discount."""
    gamma = np.full(params.shock.h, params.gamma, dtype=float)
    if tech_type == NEW_TECH:
        gamma *= params.shock.theta
    return gamma


# ---------------------------------------------------------------------------
# utility and preference ranking
# ---------------------------------------------------------------------------


def utility(group: UserGroup, design: np.ndarray, price: float) -> float:
    """Per-user utility of buying ``design`` at ``price``; ``-inf`` when the
    price exceeds the budget (the offer is unaffordable)."""
    if price > group.budget:
        return float("-inf")
    service = float(np.dot(group.alpha, np.sqrt(np.asarray(design, dtype=float))))
    return service + group.beta * math.sqrt(group.budget - price)


def null_utility(group: UserGroup) -> float:
    """Utility of buying nothing and keeping the whole budget."""
    return group.beta * math.sqrt(group.budget)


def rank_offers(group: UserGroup, suppliers: list[Supplier]) -> list[int | None]:
    """Strict preference order over supplier ids plus the outside option.

    Returns supplier ids in descending utility with ``NULL_OFFER`` (``None``)
    inserted at the rank of the outside option. Exact utility ties resolve in
    favour of the outside option, then lower price, then lower supplier id,
    so the ordering is total and deterministic. Entries after ``NULL_OFFER``
    are never bought.
    """
    null_u = null_utility(group)
    # key: higher utility first; the 0/1 flag makes the outside option win ties
    keyed: list[tuple[float, int, float, int, int | None]] = [
        (-null_u, 0, 0.0, -1, NULL_OFFER)
    ]
    for s in suppliers:
        keyed.append((-utility(group, s.design, s.price), 1, s.price, s.id, s.id))
    keyed.sort(key=lambda t: t[:4])
    return [entry[-1] for entry in keyed]


# ---------------------------------------------------------------------------
# one market session
# ---------------------------------------------------------------------------


@dataclass
class SessionResult:
    """Outcome of one rationed market session."""

    sizes: np.ndarray  # users per group, ints summing to the population
    group_welfare: np.ndarray  # realised mean per-user utility W_i per group
    sales: np.ndarray  # units sold per supplier (slot order)
    demand: np.ndarray  # units demanded per supplier, including rationed
    purchases: np.ndarray  # (groups, suppliers) units bought


def group_sizes(shares: np.ndarray, population: int) -> np.ndarray:
    """Split ``population`` users across groups by largest remainder, so the
    integer sizes always sum exactly to the population."""
    shares = np.asarray(shares, dtype=float)
    if np.any(shares < 0):
        raise ParameterError("shares must be non-negative")
    total = shares.sum()
    if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
        raise ParameterError(f"shares must sum to 1, got {total!r}")
    exact = shares * population
    sizes = np.floor(exact).astype(np.int64)
    shortfall = population - int(sizes.sum())
    if shortfall > 0:
        remainders = exact - sizes
        # stable argsort => ties go to the lower group index
        order = np.argsort(-remainders, kind="stable")
        sizes[order[:shortfall]] += 1
    return sizes


def market_session(
    groups: list[UserGroup],
    suppliers: list[Supplier],
    population: int,
    rng: np.random.Generator,
) -> SessionResult:
    """Run one rationed session: groups arrive in random order and buy down
    their preference lists while capacity lasts.

    Each group's users all post demand to the best offer still above the
    outside option; whole units are sold up to the remaining capacity, and
    any rationed users cascade to the next entry. Users reaching the outside
    option exit with the null utility. Demand is recorded wherever users
    post it, so oversubscribed suppliers see their excess demand.
    """
    m = len(groups)
    n = len(suppliers)
    sizes = group_sizes(np.array([g.share for g in groups]), population)
    remaining_qty = np.array([float(s.quantity) for s in suppliers])
    slot_of = {s.id: i for i, s in enumerate(suppliers)}

    sales = np.zeros(n)
    demand = np.zeros(n)
    purchases = np.zeros((m, n), dtype=np.int64)
    welfare = np.zeros(m)

    order = rng.permutation(m)
    for gi in order:
        group = groups[gi]
        remaining = int(sizes[gi])
        if remaining == 0:
            welfare[gi] = null_utility(group)
            continue
        utility_sum = 0.0
        for entry in rank_offers(group, suppliers):
            if entry is NULL_OFFER:
                utility_sum += remaining * null_utility(group)
                remaining = 0
                break
            si = slot_of[entry]
            supplier = suppliers[si]
            demand[si] += remaining
            units = min(remaining, int(math.floor(remaining_qty[si] + 1e-9)))
            if units > 0:
                remaining_qty[si] -= units
                sales[si] += units
                purchases[gi, si] += units
                utility_sum += units * utility(group, supplier.design, supplier.price)
                remaining -= units
            if remaining == 0:
                break
        welfare[gi] = utility_sum / sizes[gi]
    return SessionResult(sizes, welfare, sales, demand, purchases)


# ---------------------------------------------------------------------------
# population and supplier dynamics
# ---------------------------------------------------------------------------


def replicator_update(shares: np.ndarray, welfare: np.ndarray, r: float) -> np.ndarray:
    """Payoff-biased replication: new share_i ∝ share_i * W_i**r.

    Welfare must be positive wherever the share is positive (the square-root
    utility with a positive beta guarantees this on the simplex interior).
    """
    shares = np.asarray(shares, dtype=float)
    welfare = np.asarray(welfare, dtype=float)
    if shares.shape != welfare.shape:
        raise ParameterError("shares and welfare must have the same shape")
    if np.any((shares > 0) & (welfare <= 0)):
        raise ParameterError("welfare must be positive for live groups")
    weights = shares * np.power(welfare, r, where=shares > 0, out=np.zeros_like(welfare))
    total = weights.sum()
    if total <= 0:
        raise DegeneratePopulationError("all replicator weights vanished")
    return weights / total


def unit_cost(design: np.ndarray, gamma: np.ndarray) -> float:
    """Linear unit production cost of a design."""
    return float(np.dot(np.asarray(gamma, dtype=float), np.asarray(design, dtype=float)))


def markup_price(design: np.ndarray, gamma: np.ndarray, markup: float) -> float:
    """Cost-plus price for a design."""
    return (1.0 + markup) * unit_cost(design, gamma)


def supplier_period_update(
    supplier: Supplier, sales: float, demand: float, params: MarketParams
) -> Supplier:
    """Post-session accounting: profit on produced capacity, wealth
    accumulation, and partial adjustment of capacity toward demand."""
    cost = unit_cost(supplier.design, cost_weights(params, supplier.tech_type))
    supplier.profit = supplier.price * sales - cost * supplier.quantity
    supplier.wealth += supplier.profit
    supplier.quantity = max(0.0, supplier.quantity + params.lam * (demand - supplier.quantity))
    return supplier


def mutate_design(
    supplier: Supplier,
    target: UserGroup,
    params: MarketParams,
    shock_applied: bool,
    rng: np.random.Generator,
) -> bool:
    """Local design search: perturb a random subset of the active
    characteristics and keep the candidate only if it strictly raises the
    target group's utility at the supplier's current price.

    Returns True when the design changed. Characteristic values are clamped
    to [0, x_max] before the shock and to [0, inf) afterwards.
    """
    dims = active_dims(supplier.tech_type, params.shock)
    mutate_mask = rng.random(dims.size) < params.mu
    count = int(mutate_mask.sum())
    if count == 0:
        return False
    eps = rng.standard_normal(count)
    candidate = supplier.design.copy()
    touched = dims[mutate_mask]
    candidate[touched] = candidate[touched] + params.kappa * eps
    hi = math.inf if shock_applied else params.shock.x_max
    candidate[touched] = np.clip(candidate[touched], 0.0, hi)
    if utility(target, candidate, supplier.price) > utility(
        target, supplier.design, supplier.price
    ):
        supplier.design = candidate
        return True
    return False


def select_rival(
    suppliers: list[Supplier], exclude_id: int, rng: np.random.Generator
) -> Supplier:
    """Roulette draw over the other suppliers weighted by recent profit
    (floored at a tiny positive value so every rival stays reachable)."""
    rivals = [s for s in suppliers if s.id != exclude_id]
    if not rivals:
        raise SelectionError("no rival suppliers to select from")
    weights = np.array([max(s.profit, PROFIT_FLOOR) for s in rivals])
    probs = weights / weights.sum()
    idx = rng.choice(len(rivals), p=probs)
    return rivals[int(idx)]


def selective_transfer(
    supplier: Supplier,
    rival: Supplier,
    target: UserGroup,
    params: MarketParams,
    rng: np.random.Generator,
) -> bool:
    """Imitation: copy a random nonempty subset of the rival's active
    characteristic values and keep the hybrid only if it strictly raises
    the target group's utility at the supplier's current price. The rival
    is never modified.

    Both suppliers must use the same technology (the same design space).
    Returns True when the design changed.
    """
    if supplier.tech_type != rival.tech_type:
        raise ParameterError("selective transfer requires a same-technology rival")
    dims = active_dims(supplier.tech_type, params.shock)
    while True:
        mask = rng.random(dims.size) < 0.5
        if mask.any():
            break
    candidate = supplier.design.copy()
    touched = dims[mask]
    candidate[touched] = rival.design[touched]
    if utility(target, candidate, supplier.price) > utility(
        target, supplier.design, supplier.price
    ):
        supplier.design = candidate
        return True
    return False


# ---------------------------------------------------------------------------
# run state, shock, and the period loop
# ---------------------------------------------------------------------------


@dataclass
class MarketState:
    """Mutable state of one market run."""

    params: MarketParams
    groups: list[UserGroup]
    suppliers: list[Supplier]
    period: int = 0
    shock_applied: bool = False
    next_group_id: int = 0
    next_supplier_id: int = 0


def init_state(params: MarketParams, rng: np.random.Generator) -> MarketState:
    """Build the pre-entry market: equal group shares, tastes drawn uniformly
    on the old technology's dimensions, suppliers with uniform designs priced
    at cost plus markup, each targeting a uniformly drawn group."""
    shock = params.shock
    old_dims = active_dims(OLD_TECH, shock)
    groups: list[UserGroup] = []
    for gid in range(params.groups):
        alpha = np.zeros(shock.h)
        alpha[old_dims] = rng.uniform(params.alpha_min, params.alpha_max, old_dims.size)
        beta = float(rng.uniform(params.beta_min, params.beta_max))
        groups.append(
            UserGroup(
                id=gid,
                alpha=alpha,
                beta=beta,
                budget=params.budget,
                share=1.0 / params.groups,
                tech_type=OLD_TECH,
            )
        )
    gamma_old = cost_weights(params, OLD_TECH)
    suppliers: list[Supplier] = []
    for sid in range(params.suppliers):
        design = np.zeros(shock.h)
        design[old_dims] = rng.uniform(0.0, shock.x_max, old_dims.size)
        target = int(rng.integers(params.groups))
        suppliers.append(
            Supplier(
                id=sid,
                design=design,
                price=markup_price(design, gamma_old, params.markup),
                quantity=params.q0,
                target_group=target,
                tech_type=OLD_TECH,
            )
        )
    return MarketState(
        params=params,
        groups=groups,
        suppliers=suppliers,
        next_group_id=params.groups,
        next_supplier_id=params.suppliers,
    )


def _group_by_id(state: MarketState, gid: int) -> UserGroup:
    for g in state.groups:
        if g.id == gid:
            return g
    raise StateError(f"no live group with id {gid}")


def _retarget(supplier: Supplier, groups: list[UserGroup]) -> None:
    """Point a supplier at the live group that values its current offer most
    (ties to the lowest group id)."""
    best = max(groups, key=lambda g: (utility(g, supplier.design, supplier.price), -g.id))
    supplier.target_group = best.id


def apply_shock(state: MarketState, rng: np.random.Generator) -> None:
    """Technology entry: replace below-cutoff groups and suppliers with
    new-technology entrants, lift the design cap, and give entrants the
    theta cost discount. One-shot per run.

    Replacement draws happen in slot order, groups first (tastes over the
    new dimensions, budget and population share inherited) then suppliers
    (uniform designs on the new dimensions, cost-plus prices, fresh wealth,
    targets drawn among new-technology groups when any exist). Survivors
    whose target group died are re-pointed at the live group that values
    their offer most.
    """
    if state.shock_applied:
        raise StateError("the technology shock was already applied")
    params = state.params
    shock = params.shock
    new_dims = active_dims(NEW_TECH, shock)

    for i, group in enumerate(state.groups):
        if group.share < shock.share_cutoff_user:
            alpha = np.zeros(shock.h)
            alpha[new_dims] = rng.uniform(
                params.alpha_min, params.alpha_max, new_dims.size
            )
            beta = float(rng.uniform(params.beta_min, params.beta_max))
            state.groups[i] = UserGroup(
                id=state.next_group_id,
                alpha=alpha,
                beta=beta,
                budget=params.budget,
                share=group.share,
                tech_type=NEW_TECH,
            )
            state.next_group_id += 1

    new_groups = [g for g in state.groups if g.tech_type == NEW_TECH]
    gamma_new = cost_weights(params, NEW_TECH)
    live_ids = {g.id for g in state.groups}
    for i, supplier in enumerate(state.suppliers):
        if supplier.market_share < shock.share_cutoff_supplier:
            design = np.zeros(shock.h)
            design[new_dims] = rng.uniform(0.0, shock.x_max, new_dims.size)
            if new_groups:
                target = new_groups[int(rng.integers(len(new_groups)))].id
            else:
                target = -1  # resolved by retargeting below
            entrant = Supplier(
                id=state.next_supplier_id,
                design=design,
                price=markup_price(design, gamma_new, params.markup),
                quantity=params.q0,
                target_group=target,
                tech_type=NEW_TECH,
            )
            if target < 0:
                _retarget(entrant, state.groups)
            state.suppliers[i] = entrant
            state.next_supplier_id += 1
        elif supplier.target_group not in live_ids:
            _retarget(supplier, state.groups)
    state.shock_applied = True


@dataclass
class PeriodRecord:
    """Everything observable about one completed period."""

    period: int
    group_ids: list[int]
    group_types: list[str]
    sizes: np.ndarray
    group_welfare: np.ndarray
    null_welfare: np.ndarray
    shares_before: np.ndarray
    shares_after: np.ndarray
    supplier_ids: list[int]
    supplier_types: list[str]
    prices: np.ndarray
    quantities: np.ndarray  # capacity posted in this period's session
    sales: np.ndarray
    demand: np.ndarray
    profit: np.ndarray
    wealth: np.ndarray
    market_share: np.ndarray
    designs: np.ndarray  # (suppliers, h) snapshot after innovation
    purchases: np.ndarray  # (groups, suppliers) units
    target_utility_pre: np.ndarray  # before innovation, at the session price
    target_utility_post: np.ndarray  # after innovation, at the same price
    aggregate_welfare: float
    new_tech_sales_share: float
    new_sales_to_new_groups: float
    new_sales_to_old_groups: float
    shock_fired: bool


def step_period(state: MarketState, rng: np.random.Generator) -> PeriodRecord:
    """Advance the market one period and return the observables.

    Order of events: technology entry (once, at the configured period) →
    market session → replicator share update → supplier accounting and
    capacity adjustment → design mutation for every supplier → imitation of
    a profit-selected same-technology rival for every supplier → cost-plus
    repricing for suppliers whose design changed.
    """
    params = state.params
    shock_fired = False
    if state.period == params.shock.T1 and not state.shock_applied:
        apply_shock(state, rng)
        shock_fired = True

    groups = state.groups
    suppliers = state.suppliers
    session = market_session(groups, suppliers, params.population, rng)

    shares_before = np.array([g.share for g in groups])
    shares_after = replicator_update(shares_before, session.group_welfare, params.r)
    for g, s in zip(groups, shares_after):
        g.share = float(s)

    quantities_posted = np.array([s.quantity for s in suppliers])
    prices_posted = np.array([s.price for s in suppliers])
    total_sales = session.sales.sum()
    for i, supplier in enumerate(suppliers):
        supplier_period_update(supplier, session.sales[i], session.demand[i], params)
        supplier.market_share = (
            float(session.sales[i] / total_sales) if total_sales > 0 else 0.0
        )

    # innovation: mutation pass, then imitation pass; prices held fixed so
    # the acceptance rule is a monotone improvement of target-group utility
    targets = [_group_by_id(state, s.target_group) for s in suppliers]
    u_pre = np.array(
        [utility(t, s.design, s.price) for t, s in zip(targets, suppliers)]
    )
    changed = [False] * len(suppliers)
    for i, supplier in enumerate(suppliers):
        if mutate_design(supplier, targets[i], params, state.shock_applied, rng):
            changed[i] = True
    for i, supplier in enumerate(suppliers):
        same_tech = [s for s in suppliers if s.tech_type == supplier.tech_type]
        if len(same_tech) < 2:
            continue
        rival = select_rival(same_tech, supplier.id, rng)
        if selective_transfer(supplier, rival, targets[i], params, rng):
            changed[i] = True
    u_post = np.array(
        [utility(t, s.design, s.price) for t, s in zip(targets, suppliers)]
    )
    for i, supplier in enumerate(suppliers):
        if changed[i]:
            gamma = cost_weights(params, supplier.tech_type)
            supplier.price = markup_price(supplier.design, gamma, params.markup)

    new_mask = np.array([s.tech_type == NEW_TECH for s in suppliers])
    group_new_mask = np.array([g.tech_type == NEW_TECH for g in groups])
    new_sales = session.sales[new_mask].sum() if new_mask.any() else 0.0
    if new_mask.any():
        to_new = session.purchases[np.ix_(group_new_mask, new_mask)].sum()
        to_old = session.purchases[np.ix_(~group_new_mask, new_mask)].sum()
    else:
        to_new = to_old = 0.0

    record = PeriodRecord(
        period=state.period,
        group_ids=[g.id for g in groups],
        group_types=[g.tech_type for g in groups],
        sizes=session.sizes,
        group_welfare=session.group_welfare,
        null_welfare=np.array([null_utility(g) for g in groups]),
        shares_before=shares_before,
        shares_after=shares_after,
        supplier_ids=[s.id for s in suppliers],
        supplier_types=[s.tech_type for s in suppliers],
        prices=prices_posted,
        quantities=quantities_posted,
        sales=session.sales.copy(),
        demand=session.demand.copy(),
        profit=np.array([s.profit for s in suppliers]),
        wealth=np.array([s.wealth for s in suppliers]),
        market_share=np.array([s.market_share for s in suppliers]),
        designs=np.array([s.design.copy() for s in suppliers])
        if suppliers
        else np.zeros((0, params.shock.h)),
        purchases=session.purchases,
        target_utility_pre=u_pre,
        target_utility_post=u_post,
        aggregate_welfare=float(np.dot(shares_before, session.group_welfare)),
        new_tech_sales_share=float(new_sales / total_sales) if total_sales > 0 else 0.0,
        new_sales_to_new_groups=float(to_new),
        new_sales_to_old_groups=float(to_old),
        shock_fired=shock_fired,
    )
    state.period += 1
    return record


def run_market(
    params: MarketParams, periods: int, seed: int | np.random.Generator
) -> list[PeriodRecord]:
    """Initialise and run a market for ``periods`` periods from one seed."""
    if periods < 1:
        raise ParameterError("periods must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    state = init_state(params, rng)
    return [step_period(state, rng) for _ in range(periods)]


# ---------------------------------------------------------------------------
# outcome classification
# ---------------------------------------------------------------------------

SUBSTITUTION_A = "substitution_A"
SUBSTITUTION_B = "substitution_B"
LOCK_OUT = "lock_out"
SHARING = "sharing"

OUTCOME_CLASSES = (SUBSTITUTION_A, SUBSTITUTION_B, LOCK_OUT, SHARING)


def classify_outcome(history: list[PeriodRecord], params: MarketParams) -> str:
    """Label a completed run by the new technology's terminal sales share.

    Averaged over the last ``classify_window`` periods: above the
    substitution threshold the run is a substitution — type A when the new
    technology's units went predominantly to replacement (new-type) user
    groups, type B when incumbents' customers switched; below the lock-out
    threshold the entrant failed; anything between is market sharing.
    """
    need = params.shock.T1 + params.horizon
    if len(history) < need:
        raise ParameterError(
            f"history has {len(history)} periods; classification needs >= {need}"
        )
    window = history[-params.classify_window :]
    total = sum(float(rec.sales.sum()) for rec in window)
    new = sum(
        float(rec.sales[np.array([t == NEW_TECH for t in rec.supplier_types])].sum())
        if rec.sales.size
        else 0.0
        for rec in window
    )
    share = new / total if total > 0 else 0.0
    if share > params.substitution_threshold:
        to_new = sum(rec.new_sales_to_new_groups for rec in window)
        to_old = sum(rec.new_sales_to_old_groups for rec in window)
        return SUBSTITUTION_A if to_new > to_old else SUBSTITUTION_B
    if share < params.lockout_threshold:
        return LOCK_OUT
    return SHARING
