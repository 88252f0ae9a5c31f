"""Self-adaptive genetic algorithm with rate meta-genes.

Chromosomes carry a locus-labeled payload (so reordering operators change
linkage without losing loci) plus three 8-bit tail genes that encode the
chromosome's own mutation, crossover, and inversion rates. The rates are
therefore under selection together with the payload: populations evolving on
landscapes of different ruggedness settle on different operator rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .nk import NKLandscape

META_GENES = 3
GENE_BITS = 8


@dataclass(frozen=True)
class RateCoding:
    """Log-uniform map from an 8-bit gene to an operator rate:
    rate = rate_min * (rate_max / rate_min) ** (gene / 255)."""

    rate_min: float = 1e-4
    rate_max: float = 0.5

    def __post_init__(self):
        if not 0 < self.rate_min <= self.rate_max:
            raise ParameterError(
                f"need 0 < rate_min <= rate_max, got [{self.rate_min}, {self.rate_max}]"
            )

    def decode(self, gene: int) -> float:
        return self.rate_min * (self.rate_max / self.rate_min) ** (gene / 255.0)


@dataclass
class MetaChromosome:
    """Payload of (locus label, allele) pairs in arbitrary order plus the
    three rate genes, stored as (mutation, crossover, inversion)."""

    labels: np.ndarray  # permutation of 0..N-1, payload order
    alleles: np.ndarray  # 0/1, aligned with labels
    meta: np.ndarray  # three uint8 genes

    @property
    def n(self) -> int:
        return self.labels.size

    def genotype(self) -> np.ndarray:
        """Alleles sorted into locus order; payload ordering is irrelevant."""
        out = np.empty(self.n, dtype=np.int64)
        out[self.labels] = self.alleles
        return out

    def copy(self) -> "MetaChromosome":
        return MetaChromosome(self.labels.copy(), self.alleles.copy(), self.meta.copy())


def random_chromosome(n: int, rng) -> MetaChromosome:
    """Identity payload order, uniform alleles, uniform rate genes."""
    return MetaChromosome(
        labels=np.arange(n, dtype=np.int64),
        alleles=rng.integers(0, 2, size=n, dtype=np.int64),
        meta=rng.integers(0, 256, size=META_GENES, dtype=np.int64),
    )


def decode_rates(chromosome: MetaChromosome, coding: RateCoding = RateCoding()):
    """(mutation, crossover, inversion) rates decoded from the meta genes."""
    mu, chi, iota = (coding.decode(int(g)) for g in chromosome.meta)
    return mu, chi, iota


def payload_fitness(chromosome: MetaChromosome, landscape: NKLandscape) -> float:
    """Landscape fitness of the label-sorted payload; meta genes are not
    part of the evaluated genotype."""
    if chromosome.n != landscape.N or sorted(chromosome.labels.tolist()) != list(range(landscape.N)):
        raise ParameterError(
            f"payload labels must cover 0..{landscape.N - 1} exactly once"
        )
    return landscape.fitness(chromosome.genotype())


def inversion(chromosome: MetaChromosome, rng) -> MetaChromosome:
    """Reverse a random contiguous payload segment; the (label, allele)
    pairs and the meta genes are preserved."""
    out = chromosome.copy()
    i, j = sorted(rng.integers(0, chromosome.n, size=2).tolist())
    out.labels[i : j + 1] = out.labels[i : j + 1][::-1]
    out.alleles[i : j + 1] = out.alleles[i : j + 1][::-1]
    return out


def _recombine(a: MetaChromosome, b: MetaChromosome, cut: int) -> MetaChromosome:
    """Label-safe one-point recombination: a's payload prefix up to the cut,
    b's payload (in b's order) for the remaining loci, and meta genes taken
    from a before the cut and b after it."""
    n = a.n
    pay_cut = min(cut, n)
    prefix = set(a.labels[:pay_cut].tolist())
    keep = np.array([lab not in prefix for lab in b.labels], dtype=bool)
    labels = np.concatenate([a.labels[:pay_cut], b.labels[keep]])
    alleles = np.concatenate([a.alleles[:pay_cut], b.alleles[keep]])
    meta = np.array(
        [a.meta[k] if n + k < cut else b.meta[k] for k in range(META_GENES)],
        dtype=np.int64,
    )
    return MetaChromosome(labels, alleles, meta)


def crossover(
    parent_a: MetaChromosome,
    parent_b: MetaChromosome,
    rng,
    coding: RateCoding = RateCoding(),
) -> tuple[MetaChromosome, MetaChromosome]:
    """One-point crossover applied with probability equal to the mean of the
    parents' decoded crossover rates; otherwise the offspring are clones.
    The single cut position is shared by both offspring and ranges over the
    payload plus the meta tail."""
    if parent_a.n != parent_b.n:
        raise ParameterError("parents must have the same payload length")
    chi = 0.5 * (
        coding.decode(int(parent_a.meta[1])) + coding.decode(int(parent_b.meta[1]))
    )
    if rng.random() >= chi:
        return parent_a.copy(), parent_b.copy()
    cut = int(rng.integers(0, parent_a.n + META_GENES + 1))
    return _recombine(parent_a, parent_b, cut), _recombine(parent_b, parent_a, cut)


def self_adaptive_mutate(
    chromosome: MetaChromosome, rng, coding: RateCoding = RateCoding()
) -> MetaChromosome:
    """Bit-flip the meta genes under the currently decoded mutation rate,
    then flip payload alleles under the newly decoded rate, so the mutation
    rate regulates its own change."""
    mu_old = coding.decode(int(chromosome.meta[0]))
    meta_bits = np.unpackbits(chromosome.meta.astype(np.uint8))
    meta_bits ^= (rng.random(meta_bits.size) < mu_old).astype(np.uint8)
    meta = np.packbits(meta_bits).astype(np.int64)
    mu_new = coding.decode(int(meta[0]))
    alleles = chromosome.alleles ^ (rng.random(chromosome.n) < mu_new).astype(np.int64)
    return MetaChromosome(chromosome.labels.copy(), alleles, meta)


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    mean_mu: float
    mean_chi: float
    mean_iota: float


@dataclass
class GAConfig:
    N: int = 16
    K: int = 8
    population: int = 100
    generations: int = 300
    seed: int = 0
    scheme: str = "random"
    coding: RateCoding = field(default_factory=RateCoding)
    elitism: bool = False
    selection_floor: float = 1e-9


@dataclass
class MetaGAResult:
    history: list[GenerationStats]
    population: list[MetaChromosome]
    landscape: NKLandscape


def _roulette(fitness: np.ndarray, count: int, rng, floor: float) -> np.ndarray:
    w = np.maximum(fitness, floor)
    return rng.choice(fitness.size, size=count, p=w / w.sum())


def run_meta_ga(config: GAConfig, landscape: NKLandscape | None = None) -> MetaGAResult:
    """Generational GA: fitness-proportional selection, self-adaptive
    crossover/inversion/mutation, full replacement. Deterministic per seed;
    the landscape seed is derived from the run seed unless one is supplied.
    """
    if config.population < 2 or config.population % 2 != 0:
        raise ParameterError(f"population must be even and >= 2, got {config.population}")
    if config.generations < 1:
        raise ParameterError(f"generations must be >= 1, got {config.generations}")
    rng = np.random.default_rng(config.seed)
    if landscape is None:
        landscape = NKLandscape(
            config.N, config.K, seed=int(rng.integers(2**63)), scheme=config.scheme
        )
    elif landscape.N != config.N:
        raise ParameterError("landscape N does not match config N")

    coding = config.coding
    pop = [random_chromosome(config.N, rng) for _ in range(config.population)]
    history: list[GenerationStats] = []

    for gen in range(config.generations):
        genotypes = np.stack([c.genotype() for c in pop])
        fits = landscape.fitness_batch(genotypes)
        genes = np.stack([c.meta for c in pop])
        rates = coding.rate_min * (coding.rate_max / coding.rate_min) ** (genes / 255.0)
        history.append(
            GenerationStats(
                generation=gen,
                best_fitness=float(fits.max()),
                mean_fitness=float(fits.mean()),
                mean_mu=float(rates[:, 0].mean()),
                mean_chi=float(rates[:, 1].mean()),
                mean_iota=float(rates[:, 2].mean()),
            )
        )
        if gen == config.generations - 1:
            break

        parent_idx = _roulette(fits, config.population, rng, config.selection_floor)
        next_pop: list[MetaChromosome] = []
        for k in range(0, config.population, 2):
            a, b = pop[parent_idx[k]], pop[parent_idx[k + 1]]
            for child in crossover(a, b, rng, coding):
                iota = coding.decode(int(child.meta[2]))
                if rng.random() < iota:
                    child = inversion(child, rng)
                next_pop.append(self_adaptive_mutate(child, rng, coding))
        if config.elitism:
            next_pop[0] = pop[int(np.argmax(fits))].copy()
        pop = next_pop

    return MetaGAResult(history, pop, landscape)
