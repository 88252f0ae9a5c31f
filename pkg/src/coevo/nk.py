"""NK and coupled NK(C) fitness landscapes.

Binary genotypes of length N are points on a Boolean hypercube. Each locus
contributes a fitness value looked up from a seeded random table keyed by the
locus's own allele and the alleles of K other loci; genotype fitness is the
mean of the N contributions. The coupled variant extends every table with C
allele inputs read from a partner species, so one species' move deforms the
landscapes of the species coupled to it.

Landscape and system objects are immutable after construction and safe to
share across concurrent walkers; every walk or coevolution run owns its own
RNG stream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ParameterError

Genotype = tuple[int, ...]

# Exhaustive scans allocate O(2^N); keep brute force within sane memory.
MAX_ENUMERATION_N = 24
_CHUNK = 1 << 16


class TieWarning(UserWarning):
    """An exact fitness tie was met where continuous draws make ties
    probability zero; usually a sign of hand-edited tables."""


def _as_bits(genotype, n: int) -> np.ndarray:
    bits = np.asarray(genotype, dtype=np.int64)
    if bits.ndim != 1 or bits.size != n:
        raise ParameterError(f"genotype length {bits.size} != N={n}")
    if np.any((bits != 0) & (bits != 1)):
        raise ParameterError("genotype alleles must be 0 or 1")
    return bits


def _codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    # locus 0 is the most significant bit
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] >> shifts) & 1


class NKLandscape:
    """A seeded NK fitness landscape over length-N binary genotypes.

    K tunes ruggedness: K=0 gives a smooth single-peak landscape, K=N-1 a
    fully random one. Construction is a pure function of
    (N, K, seed, scheme); rebuilding with the same arguments reproduces the
    contribution tables bit for bit.
    """

    def __init__(self, N: int, K: int, seed: int, scheme: str = "random"):
        if N < 1:
            raise ParameterError(f"N must be >= 1, got {N}")
        if not 0 <= K <= N - 1:
            raise ParameterError(f"K out of range: need 0 <= K <= N-1, got K={K} with N={N}")
        if scheme not in ("random", "adjacent"):
            raise ParameterError(f"unknown neighbor scheme {scheme!r}")
        self.N = N
        self.K = K
        self.seed = seed
        self.scheme = scheme

        rng = np.random.default_rng(seed)
        if scheme == "adjacent":
            self.neighbors = np.array(
                [[(i + j) % N for j in range(1, K + 1)] for i in range(N)], dtype=np.int64
            ).reshape(N, K)
        else:
            rows = []
            for i in range(N):
                others = np.delete(np.arange(N), i)
                rows.append(rng.choice(others, size=K, replace=False))
            self.neighbors = np.array(rows, dtype=np.int64).reshape(N, K)
        self.tables = rng.random((N, 2 ** (K + 1)))

        # gather plan: per locus, own index then its K inputs, packed MSB-first
        self._inputs = np.concatenate(
            [np.arange(N, dtype=np.int64)[:, None], self.neighbors], axis=1
        )
        self._powers = 1 << np.arange(K, -1, -1, dtype=np.int64)
        self._rows = np.arange(N)

    def __repr__(self) -> str:
        return f"NKLandscape(N={self.N}, K={self.K}, seed={self.seed}, scheme={self.scheme!r})"

    def contributions(self, genotype) -> np.ndarray:
        """Per-locus fitness contributions for one genotype."""
        bits = _as_bits(genotype, self.N)
        cfg = bits[self._inputs] @ self._powers
        return self.tables[self._rows, cfg]

    def fitness(self, genotype) -> float:
        """Mean of the N per-locus contributions; always in [0, 1]."""
        return float(self.contributions(genotype).mean())

    def fitness_batch(self, genotypes: np.ndarray) -> np.ndarray:
        """Fitness of each row of an (m, N) 0/1 array."""
        g = np.asarray(genotypes, dtype=np.int64)
        if g.ndim != 2 or g.shape[1] != self.N:
            raise ParameterError(f"expected shape (m, {self.N}), got {g.shape}")
        cfg = g[:, self._inputs] @ self._powers
        return self.tables[self._rows, cfg].mean(axis=1)

    def fitness_all(self) -> np.ndarray:
        """Fitness of every genotype, indexed by its packed integer code
        (locus 0 = most significant bit). Exhaustive: N <= 24 only."""
        if self.N > MAX_ENUMERATION_N:
            raise CapacityError(
                f"exhaustive evaluation needs 2^{self.N} states; limit is N <= {MAX_ENUMERATION_N}"
            )
        total = 1 << self.N
        out = np.empty(total)
        for lo in range(0, total, _CHUNK):
            hi = min(lo + _CHUNK, total)
            bits = _codes_to_bits(np.arange(lo, hi, dtype=np.int64), self.N)
            out[lo:hi] = self.fitness_batch(bits)
        return out


def build_landscape(N: int, K: int, seed: int, scheme: str = "random") -> NKLandscape:
    """Construct a seeded NK landscape (see NKLandscape)."""
    return NKLandscape(N, K, seed, scheme=scheme)


def one_mutant_neighbors(genotype) -> list[Genotype]:
    """The N genotypes at Hamming distance 1, in locus order."""
    base = tuple(int(b) for b in genotype)
    return [base[:i] + (1 - base[i],) + base[i + 1 :] for i in range(len(base))]


@dataclass
class Walk:
    """An adaptive walk: strictly fitness-increasing one-mutant moves."""

    trajectory: list[tuple[Genotype, float]]
    terminated_at_optimum: bool

    @property
    def steps(self) -> int:
        return len(self.trajectory) - 1

    @property
    def endpoint(self) -> Genotype:
        return self.trajectory[-1][0]

    @property
    def final_fitness(self) -> float:
        return self.trajectory[-1][1]


def _flip_candidates(bits: np.ndarray) -> np.ndarray:
    """Rows: current genotype followed by its N one-mutant neighbors."""
    n = bits.size
    cand = np.repeat(bits[None, :], n + 1, axis=0)
    cand[1:] ^= np.eye(n, dtype=np.int64)
    return cand


def adaptive_walk(
    landscape: NKLandscape,
    start,
    rule: str = "random_fitter",
    rng=None,
    max_steps: int | None = None,
) -> Walk:
    """Climb to a local optimum by strictly fitter one-mutant moves.

    rule="random_fitter" picks uniformly among strictly fitter neighbors;
    rule="greedy" picks the fittest one (ties broken by lowest locus index).
    """
    if rule not in ("random_fitter", "greedy"):
        raise ParameterError(f"unknown walk rule {rule!r}")
    rng = np.random.default_rng(rng)
    bits = _as_bits(start, landscape.N)
    f = landscape.fitness_batch(_flip_candidates(bits))
    trajectory = [(tuple(int(b) for b in bits), float(f[0]))]
    while True:
        fitter = np.flatnonzero(f[1:] > f[0])
        if fitter.size == 0:
            return Walk(trajectory, terminated_at_optimum=True)
        if max_steps is not None and len(trajectory) - 1 >= max_steps:
            return Walk(trajectory, terminated_at_optimum=False)
        if rule == "greedy":
            locus = int(fitter[np.argmax(f[1:][fitter])])
        else:
            locus = int(rng.choice(fitter))
        bits[locus] ^= 1
        f = landscape.fitness_batch(_flip_candidates(bits))
        trajectory.append((tuple(int(b) for b in bits), float(f[0])))


def enumerate_local_optima(landscape: NKLandscape) -> set[Genotype]:
    """All genotypes with no strictly fitter one-mutant neighbor (2^N scan).

    Under continuous uniform tables every optimum is strict with probability
    one; an optimum with an exactly equal neighbor raises TieWarning instead
    of being silently kept or dropped.
    """
    n = landscape.N
    fits = landscape.fitness_all()
    codes = np.arange(fits.size, dtype=np.int64)
    is_opt = np.ones(fits.size, dtype=bool)
    tied = np.zeros(fits.size, dtype=bool)
    for i in range(n):
        nbr = fits[codes ^ (1 << (n - 1 - i))]
        is_opt &= fits >= nbr
        tied |= fits == nbr
    if np.any(is_opt & tied):
        warnings.warn(
            "local optimum with an exactly-equal neighbor; tables look degenerate",
            TieWarning,
            stacklevel=2,
        )
    opt_codes = np.flatnonzero(is_opt)
    bits = _codes_to_bits(opt_codes, n)
    return {tuple(int(b) for b in row) for row in bits}


# ---------------------------------------------------------------------------
# Coupled landscapes


class NKCSystem:
    """S coupled NK landscapes: each locus of a species also reads C allele
    inputs from one partner species, so a partner's move re-keys the tables.

    topology="ring" couples species s to (s+1) mod S; "all_to_one" couples
    every species to species 0 (and species 0 to species 1).
    """

    def __init__(
        self, S: int, N: int, K: int, C: int, seed: int, topology: str = "ring"
    ):
        if S < 2:
            raise ParameterError(f"S must be >= 2, got {S}")
        if N < 1:
            raise ParameterError(f"N must be >= 1, got {N}")
        if not 0 <= K <= N - 1:
            raise ParameterError(f"K out of range: need 0 <= K <= N-1, got K={K} with N={N}")
        if not 0 <= C <= N:
            raise ParameterError(f"C out of range: need 0 <= C <= N, got C={C}")
        if topology not in ("ring", "all_to_one"):
            raise ParameterError(f"unknown topology {topology!r}")
        self.S = S
        self.N = N
        self.K = K
        self.C = C
        self.seed = seed
        self.topology = topology
        if topology == "ring":
            self.partner = tuple((s + 1) % S for s in range(S))
        else:
            self.partner = tuple(1 if s == 0 else 0 for s in range(S))

        rng = np.random.default_rng(seed)
        self.neighbors = np.empty((S, N, K), dtype=np.int64)
        self.externals = np.empty((S, N, C), dtype=np.int64)
        for s in range(S):
            for i in range(N):
                others = np.delete(np.arange(N), i)
                self.neighbors[s, i] = rng.choice(others, size=K, replace=False)
                self.externals[s, i] = rng.choice(N, size=C, replace=False)
        self.tables = rng.random((S, N, 2 ** (K + C + 1)))
        self.profile = rng.integers(0, 2, size=(S, N), dtype=np.int64)

        # gather plan over the concatenated (own bits, partner bits) vector
        self._inputs = np.empty((S, N, K + C + 1), dtype=np.int64)
        self._inputs[:, :, 0] = np.arange(N)
        self._inputs[:, :, 1 : K + 1] = self.neighbors
        self._inputs[:, :, K + 1 :] = self.externals + N
        self._powers = 1 << np.arange(K + C, -1, -1, dtype=np.int64)
        self._rows = np.arange(N)

    def __repr__(self) -> str:
        return (
            f"NKCSystem(S={self.S}, N={self.N}, K={self.K}, C={self.C}, "
            f"seed={self.seed}, topology={self.topology!r})"
        )

    def _profile_array(self, profile) -> np.ndarray:
        prof = np.asarray(profile, dtype=np.int64)
        if prof.shape != (self.S, self.N):
            raise ParameterError(f"profile shape {prof.shape} != ({self.S}, {self.N})")
        return prof

    def species_fitness(self, s: int, profile) -> float:
        """Fitness of species s given every species' current genotype."""
        prof = self._profile_array(profile)
        return float(self._candidate_fitness(s, prof[s], prof[self.partner[s]])[0])

    def _candidate_fitness(self, s: int, own: np.ndarray, partner: np.ndarray) -> np.ndarray:
        """Fitness of species s's current genotype and its N one-mutant
        variants (index 0 = current, index i+1 = flip at locus i)."""
        cand = _flip_candidates(own)
        full = np.concatenate([cand, np.repeat(partner[None, :], cand.shape[0], axis=0)], axis=1)
        cfg = full[:, self._inputs[s]] @ self._powers
        return self.tables[s][self._rows, cfg].mean(axis=1)


def build_nkc(S: int, N: int, K: int, C: int, seed: int, topology: str = "ring") -> NKCSystem:
    """Construct a seeded coupled landscape system (see NKCSystem)."""
    return NKCSystem(S, N, K, C, seed, topology=topology)


def nash_check(system: NKCSystem, profile) -> bool:
    """True iff no species has a strictly fitter one-mutant move while the
    other species hold their genotypes fixed."""
    prof = system._profile_array(profile)
    for s in range(system.S):
        f = system._candidate_fitness(s, prof[s], prof[system.partner[s]])
        if np.any(f[1:] > f[0]):
            return False
    return True


@dataclass
class CoevolutionResult:
    """Outcome of one coevolution run. steps counts individual moves; a run
    that hits max_steps before an all-quiet pass reports converged=False."""

    converged: bool
    steps: int
    passes: int
    profile: np.ndarray
    species_fitness: np.ndarray = field(repr=False)

    @property
    def steps_to_nash(self) -> int | None:
        return self.steps if self.converged else None


def coevolution_run(
    system: NKCSystem,
    order: str = "round_robin",
    max_steps: int = 10_000,
    rng=None,
    rule: str = "random_fitter",
    start=None,
) -> CoevolutionResult:
    """Asynchronous coevolution: one species moves per turn to a strictly
    fitter one-mutant neighbor given the others' genotypes; a full pass over
    all species with no move is a Nash equilibrium.
    """
    if order not in ("round_robin", "random"):
        raise ParameterError(f"unknown order {order!r}")
    if rule not in ("random_fitter", "greedy"):
        raise ParameterError(f"unknown move rule {rule!r}")
    if max_steps <= 0:
        raise ParameterError(f"max_steps must be > 0, got {max_steps}")
    rng = np.random.default_rng(rng)
    prof = system._profile_array(system.profile if start is None else start).copy()

    moves = 0
    passes = 0
    while True:
        passes += 1
        if order == "random":
            turn_order = rng.permutation(system.S)
        else:
            turn_order = np.arange(system.S)
        moved_this_pass = False
        for s in turn_order:
            f = system._candidate_fitness(s, prof[s], prof[system.partner[s]])
            fitter = np.flatnonzero(f[1:] > f[0])
            if fitter.size == 0:
                continue
            if rule == "greedy":
                locus = int(fitter[np.argmax(f[1:][fitter])])
            else:
                locus = int(rng.choice(fitter))
            prof[s, locus] ^= 1
            moves += 1
            moved_this_pass = True
            if moves >= max_steps:
                fits = [system.species_fitness(t, prof) for t in range(system.S)]
                return CoevolutionResult(False, moves, passes, prof, np.array(fits))
        if not moved_this_pass:
            fits = [system.species_fitness(t, prof) for t in range(system.S)]
            return CoevolutionResult(True, moves, passes, prof, np.array(fits))
