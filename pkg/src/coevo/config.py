"""Experiment configuration: JSON loading with strict field validation.

A configuration file is a single JSON object with a ``kind`` key naming the
experiment plus that experiment's parameters as flat keys. Two engine-level
keys are accepted everywhere: ``replicates`` (default 1) and ``seed``
(default 0); command-line flags override them. Every other key must belong
to the named kind — unknown keys, missing required keys, and wrongly typed
values raise :class:`~coevo.errors.ConfigError` naming the offending key.

``default_config(kind)`` returns a ready-to-run payload for each kind,
mirroring the reference file shipped as ``coevo/defaults.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ConfigError, ParameterError
from .market import MarketParams, ShockConfig
from .nk import MAX_ENUMERATION_N

KINDS = ("nk-walk", "nk-optima", "nkc-coevolve", "wb-run", "metaga-run")

_MISSING = object()


@dataclass(frozen=True)
class WalkSettings:
    """Seeded adaptive walks on one landscape per replicate."""

    N: int = 12
    K: int = 2
    scheme: str = "random"
    rule: str = "random_fitter"
    walks: int = 32
    max_steps: int | None = None


@dataclass(frozen=True)
class OptimaSettings:
    """Exhaustive local-optima enumeration of one landscape per replicate."""

    N: int = 12
    K: int = 3
    scheme: str = "random"


@dataclass(frozen=True)
class CoevolveSettings:
    """Coupled-landscape coevolution until mutual stability or a step cap."""

    S: int = 4
    N: int = 8
    K: int = 3
    C: int = 2
    topology: str = "ring"
    order: str = "round_robin"
    rule: str = "random_fitter"
    max_steps: int = 5000


@dataclass(frozen=True)
class MarketSettings:
    """A technology-substitution market run."""

    periods: int = 200
    params: MarketParams = MarketParams()


@dataclass(frozen=True)
class MetaGASettings:
    """A genetic algorithm whose operator rates evolve on the chromosome."""

    N: int = 16
    K: int = 8
    scheme: str = "random"
    population: int = 100
    generations: int = 300
    rate_min: float = 1e-4
    rate_max: float = 0.5
    elitism: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated experiment: what to run, how often, from which seed."""

    kind: str
    settings: object
    replicates: int = 1
    seed: int = 0


# ---------------------------------------------------------------------------
# field extraction helpers
# ---------------------------------------------------------------------------


def _type_name(types: tuple[type, ...]) -> str:
    names = {int: "integer", float: "number", str: "string", bool: "boolean"}
    return " or ".join(names.get(t, t.__name__) for t in types)


def _take(
    payload: dict[str, Any],
    key: str,
    types: tuple[type, ...],
    default: Any = _MISSING,
    choices: tuple | None = None,
    nullable: bool = False,
) -> Any:
    """Pop ``key`` from ``payload`` with strict type checking.

    Booleans are never accepted where integers are expected (JSON ``true``
    is not a count), and integers are accepted wherever numbers are.
    """
    if key not in payload:
        if default is _MISSING:
            raise ConfigError(f"missing required key: {key!r}")
        return default
    value = payload.pop(key)
    if value is None and nullable:
        return None
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"key {key!r}: expected {_type_name(types)}, got boolean")
    if float in types and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, types):
        raise ConfigError(
            f"key {key!r}: expected {_type_name(types)}, "
            f"got {type(value).__name__}"
        )
    if choices is not None and value not in choices:
        raise ConfigError(
            f"key {key!r}: expected one of {', '.join(map(repr, choices))}, "
            f"got {value!r}"
        )
    return value


def _require_empty(payload: dict[str, Any], kind: str) -> None:
    if payload:
        keys = ", ".join(repr(k) for k in sorted(payload))
        raise ConfigError(f"unknown key(s) for {kind} config: {keys}")


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# per-kind parsers
# ---------------------------------------------------------------------------


def _parse_walk(payload: dict[str, Any]) -> WalkSettings:
    s = WalkSettings(
        N=_take(payload, "N", (int,), 12),
        K=_take(payload, "K", (int,), 2),
        scheme=_take(payload, "scheme", (str,), "random", choices=("random", "adjacent")),
        rule=_take(payload, "rule", (str,), "random_fitter", choices=("random_fitter", "greedy")),
        walks=_take(payload, "walks", (int,), 32),
        max_steps=_take(payload, "max_steps", (int,), None, nullable=True),
    )
    _require_empty(payload, "nk-walk")
    _check(s.N >= 1, f"key 'N': must be >= 1, got {s.N}")
    _check(0 <= s.K <= s.N - 1, f"key 'K': must lie in [0, N-1], got {s.K}")
    _check(s.walks >= 1, f"key 'walks': must be >= 1, got {s.walks}")
    _check(
        s.max_steps is None or s.max_steps >= 1,
        f"key 'max_steps': must be >= 1 or null, got {s.max_steps}",
    )
    return s


def _parse_optima(payload: dict[str, Any]) -> OptimaSettings:
    s = OptimaSettings(
        N=_take(payload, "N", (int,), 12),
        K=_take(payload, "K", (int,), 3),
        scheme=_take(payload, "scheme", (str,), "random", choices=("random", "adjacent")),
    )
    _require_empty(payload, "nk-optima")
    _check(
        1 <= s.N <= MAX_ENUMERATION_N,
        f"key 'N': must lie in [1, {MAX_ENUMERATION_N}] for exhaustive search, got {s.N}",
    )
    _check(0 <= s.K <= s.N - 1, f"key 'K': must lie in [0, N-1], got {s.K}")
    return s


def _parse_coevolve(payload: dict[str, Any]) -> CoevolveSettings:
    s = CoevolveSettings(
        S=_take(payload, "S", (int,), 4),
        N=_take(payload, "N", (int,), 8),
        K=_take(payload, "K", (int,), 3),
        C=_take(payload, "C", (int,), 2),
        topology=_take(payload, "topology", (str,), "ring", choices=("ring", "all_to_one")),
        order=_take(payload, "order", (str,), "round_robin", choices=("round_robin", "random")),
        rule=_take(payload, "rule", (str,), "random_fitter", choices=("random_fitter", "greedy")),
        max_steps=_take(payload, "max_steps", (int,), 5000),
    )
    _require_empty(payload, "nkc-coevolve")
    _check(s.S >= 2, f"key 'S': need at least two species, got {s.S}")
    _check(s.N >= 1, f"key 'N': must be >= 1, got {s.N}")
    _check(0 <= s.K <= s.N - 1, f"key 'K': must lie in [0, N-1], got {s.K}")
    _check(0 <= s.C <= s.N, f"key 'C': must lie in [0, N], got {s.C}")
    _check(s.max_steps >= 1, f"key 'max_steps': must be >= 1, got {s.max_steps}")
    return s


def _parse_market(payload: dict[str, Any]) -> MarketSettings:
    periods = _take(payload, "periods", (int,), 200)
    shock_kwargs = dict(
        T1=_take(payload, "T1", (int,), 100),
        h=_take(payload, "h", (int,), 6),
        h1=_take(payload, "h1", (int,), 4),
        h2=_take(payload, "h2", (int,), 2),
        x_max=_take(payload, "x_max", (float,), 10.0),
        theta=_take(payload, "theta", (float,), 0.5),
        share_cutoff_supplier=_take(payload, "share_cutoff_supplier", (float,), 0.1),
        share_cutoff_user=_take(payload, "share_cutoff_user", (float,), 0.1),
    )
    params_kwargs = dict(
        groups=_take(payload, "groups", (int,), 5),
        suppliers=_take(payload, "suppliers", (int,), 6),
        population=_take(payload, "population", (int,), 100),
        budget=_take(payload, "budget", (float,), 10.0),
        r=_take(payload, "r", (float,), 1.0),
        mu=_take(payload, "mu", (float,), 0.15),
        kappa=_take(payload, "kappa", (float,), 1.0),
        lam=_take(payload, "lam", (float,), 0.3),
        markup=_take(payload, "markup", (float,), 0.2),
        gamma=_take(payload, "gamma", (float,), 0.05),
        q0=_take(payload, "q0", (float,), 20.0),
        alpha_min=_take(payload, "alpha_min", (float,), 0.2),
        alpha_max=_take(payload, "alpha_max", (float,), 1.2),
        beta_min=_take(payload, "beta_min", (float,), 0.8),
        beta_max=_take(payload, "beta_max", (float,), 1.2),
        horizon=_take(payload, "horizon", (int,), 50),
        classify_window=_take(payload, "classify_window", (int,), 10),
        substitution_threshold=_take(payload, "substitution_threshold", (float,), 0.9),
        lockout_threshold=_take(payload, "lockout_threshold", (float,), 0.1),
    )
    _require_empty(payload, "wb-run")
    _check(periods >= 1, f"key 'periods': must be >= 1, got {periods}")
    try:
        params = MarketParams(shock=ShockConfig(**shock_kwargs), **params_kwargs)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return MarketSettings(periods=periods, params=params)


def _parse_metaga(payload: dict[str, Any]) -> MetaGASettings:
    s = MetaGASettings(
        N=_take(payload, "N", (int,), 16),
        K=_take(payload, "K", (int,), 8),
        scheme=_take(payload, "scheme", (str,), "random", choices=("random", "adjacent")),
        population=_take(payload, "population", (int,), 100),
        generations=_take(payload, "generations", (int,), 300),
        rate_min=_take(payload, "rate_min", (float,), 1e-4),
        rate_max=_take(payload, "rate_max", (float,), 0.5),
        elitism=_take(payload, "elitism", (bool,), False),
    )
    _require_empty(payload, "metaga-run")
    _check(s.N >= 1, f"key 'N': must be >= 1, got {s.N}")
    _check(0 <= s.K <= s.N - 1, f"key 'K': must lie in [0, N-1], got {s.K}")
    _check(
        s.population >= 2 and s.population % 2 == 0,
        f"key 'population': must be even and >= 2, got {s.population}",
    )
    _check(s.generations >= 1, f"key 'generations': must be >= 1, got {s.generations}")
    _check(
        0 < s.rate_min <= s.rate_max <= 1,
        f"keys 'rate_min'/'rate_max': need 0 < rate_min <= rate_max <= 1, "
        f"got {s.rate_min} and {s.rate_max}",
    )
    return s


_PARSERS = {
    "nk-walk": _parse_walk,
    "nk-optima": _parse_optima,
    "nkc-coevolve": _parse_coevolve,
    "wb-run": _parse_market,
    "metaga-run": _parse_metaga,
}


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def parse_config(payload: dict[str, Any]) -> ExperimentConfig:
    """Validate a decoded JSON object into an :class:`ExperimentConfig`."""
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object")
    working = dict(payload)
    kind = _take(working, "kind", (str,), choices=KINDS)
    replicates = _take(working, "replicates", (int,), 1)
    seed = _take(working, "seed", (int,), 0)
    _check(replicates >= 1, f"key 'replicates': must be >= 1, got {replicates}")
    _check(seed >= 0, f"key 'seed': must be >= 0, got {seed}")
    settings = _PARSERS[kind](working)
    return ExperimentConfig(kind=kind, settings=settings, replicates=replicates, seed=seed)


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a JSON experiment configuration from disk."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(payload)


def default_config(kind: str) -> dict[str, Any]:
    """A copy of the shipped default payload for ``kind`` (includes the
    ``kind`` key, so the result can be written out and run as-is)."""
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    text = resources.files("coevo").joinpath("defaults.json").read_text()
    return dict(json.loads(text)[kind])
