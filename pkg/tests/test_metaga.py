"""Self-adaptive GA tests: rate decoding arithmetic, label-safety of the
reordering operators, the two-phase mutation rule, and generational loop
behavior."""

import math

import numpy as np
import pytest

from coevo import (
    GAConfig,
    MetaChromosome,
    ParameterError,
    RateCoding,
    build_landscape,
    run_meta_ga,
)
from coevo.metaga import (
    GENE_BITS,
    META_GENES,
    crossover,
    decode_rates,
    inversion,
    payload_fitness,
    random_chromosome,
    self_adaptive_mutate,
)

#: A coding whose every gene value decodes to rate 1.0 — forces operators on.
ALWAYS = RateCoding(rate_min=1.0, rate_max=1.0)
#: A coding that decodes to a vanishing rate — freezes all operators.
NEVER = RateCoding(rate_min=1e-300, rate_max=1e-300)


def chrom(labels, alleles, meta=(0, 0, 0)) -> MetaChromosome:
    return MetaChromosome(
        labels=np.array(labels, dtype=np.int64),
        alleles=np.array(alleles, dtype=np.int64),
        meta=np.array(meta, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# rate coding
# ---------------------------------------------------------------------------


def test_rate_coding_endpoints():
    coding = RateCoding(rate_min=1e-4, rate_max=0.5)
    assert coding.decode(0) == pytest.approx(1e-4, rel=1e-12)
    assert coding.decode(255) == pytest.approx(0.5, rel=1e-12)


def test_rate_coding_is_log_linear():
    coding = RateCoding(rate_min=1e-4, rate_max=0.5)
    lo, hi = math.log(1e-4), math.log(0.5)
    for gene in (1, 17, 85, 128, 200, 254):
        expected = lo + (gene / 255.0) * (hi - lo)
        assert math.log(coding.decode(gene)) == pytest.approx(expected, rel=1e-12)


def test_rate_coding_monotone():
    coding = RateCoding()
    rates = [coding.decode(g) for g in range(256)]
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_rate_coding_validation():
    with pytest.raises(ParameterError):
        RateCoding(rate_min=0.0, rate_max=0.5)
    with pytest.raises(ParameterError):
        RateCoding(rate_min=0.6, rate_max=0.5)


def test_decode_rates_reads_genes_in_order():
    coding = RateCoding(rate_min=1e-4, rate_max=0.5)
    c = chrom([0, 1], [0, 1], meta=(0, 255, 128))
    mu, chi, iota = decode_rates(c, coding)
    assert mu == pytest.approx(coding.decode(0))
    assert chi == pytest.approx(coding.decode(255))
    assert iota == pytest.approx(coding.decode(128))


# ---------------------------------------------------------------------------
# chromosome payload
# ---------------------------------------------------------------------------


def test_genotype_sorts_alleles_by_label():
    c = chrom(labels=[2, 0, 1], alleles=[1, 0, 1])
    np.testing.assert_array_equal(c.genotype(), [0, 1, 1])


def test_payload_fitness_ignores_order_and_meta():
    landscape = build_landscape(5, 2, seed=1)
    a = chrom(labels=[0, 1, 2, 3, 4], alleles=[1, 0, 1, 1, 0], meta=(0, 0, 0))
    b = chrom(labels=[4, 2, 0, 1, 3], alleles=[0, 1, 1, 0, 1], meta=(255, 7, 99))
    # b encodes the same locus->allele map as a, scrambled and with other meta
    assert payload_fitness(a, landscape) == pytest.approx(payload_fitness(b, landscape))
    assert payload_fitness(a, landscape) == pytest.approx(
        landscape.fitness((1, 0, 1, 1, 0))
    )


def test_payload_fitness_rejects_bad_labels():
    landscape = build_landscape(4, 1, seed=0)
    with pytest.raises(ParameterError):
        payload_fitness(chrom([0, 1, 2], [0, 0, 0]), landscape)
    with pytest.raises(ParameterError):
        payload_fitness(chrom([0, 1, 1, 3], [0, 0, 0, 0]), landscape)


def test_random_chromosome_structure():
    rng = np.random.default_rng(2)
    c = random_chromosome(10, rng)
    np.testing.assert_array_equal(np.sort(c.labels), np.arange(10))
    assert set(np.unique(c.alleles)) <= {0, 1}
    assert c.meta.shape == (META_GENES,)
    assert np.all((0 <= c.meta) & (c.meta <= 255))


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def test_inversion_preserves_pairs_and_meta():
    rng = np.random.default_rng(3)
    c = random_chromosome(12, rng)
    mapping = dict(zip(c.labels.tolist(), c.alleles.tolist()))
    out = inversion(c, rng)
    np.testing.assert_array_equal(out.meta, c.meta)
    assert dict(zip(out.labels.tolist(), out.alleles.tolist())) == mapping
    np.testing.assert_array_equal(np.sort(out.labels), np.arange(12))


def test_inversion_reverses_a_contiguous_segment():
    c = chrom(labels=[0, 1, 2, 3, 4, 5], alleles=[0, 1, 0, 1, 0, 1])
    rng = np.random.default_rng(4)
    probe = np.random.default_rng(4)
    i, j = sorted(probe.integers(0, 6, size=2).tolist())
    out = inversion(c, rng)
    expected = list(range(6))
    expected[i : j + 1] = expected[i : j + 1][::-1]
    np.testing.assert_array_equal(out.labels, expected)


def test_crossover_clones_when_rate_zero():
    a = random_chromosome(8, np.random.default_rng(5))
    b = random_chromosome(8, np.random.default_rng(6))
    c1, c2 = crossover(a, b, np.random.default_rng(7), coding=NEVER)
    np.testing.assert_array_equal(c1.labels, a.labels)
    np.testing.assert_array_equal(c1.alleles, a.alleles)
    np.testing.assert_array_equal(c2.labels, b.labels)
    assert c1 is not a  # children are copies, never aliases


def test_crossover_children_are_label_permutations():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = inversion(random_chromosome(9, rng), rng)
        b = inversion(random_chromosome(9, rng), rng)
        c1, c2 = crossover(a, b, rng, coding=ALWAYS)
        np.testing.assert_array_equal(np.sort(c1.labels), np.arange(9))
        np.testing.assert_array_equal(np.sort(c2.labels), np.arange(9))


def test_crossover_prefix_from_first_parent():
    rng = np.random.default_rng(9)
    probe = np.random.default_rng(9)
    a = chrom(labels=[3, 1, 0, 2], alleles=[1, 1, 0, 0], meta=(10, 20, 30))
    b = chrom(labels=[0, 2, 3, 1], alleles=[1, 0, 0, 1], meta=(40, 50, 60))
    probe.random()  # the crossover-probability draw
    cut = int(probe.integers(0, 4 + META_GENES + 1))
    c1, _ = crossover(a, b, rng, coding=ALWAYS)
    pay_cut = min(cut, 4)
    np.testing.assert_array_equal(c1.labels[:pay_cut], a.labels[:pay_cut])
    np.testing.assert_array_equal(c1.alleles[:pay_cut], a.alleles[:pay_cut])
    # remaining loci appear in b's payload order
    rest = [lab for lab in b.labels.tolist() if lab not in set(a.labels[:pay_cut].tolist())]
    np.testing.assert_array_equal(c1.labels[pay_cut:], rest)
    # meta genes: from a before the cut, from b at or after it
    for k in range(META_GENES):
        expected = a.meta[k] if 4 + k < cut else b.meta[k]
        assert c1.meta[k] == expected


def test_crossover_preserves_allele_of_each_locus():
    rng = np.random.default_rng(10)
    for _ in range(30):
        a = inversion(random_chromosome(7, rng), rng)
        b = inversion(random_chromosome(7, rng), rng)
        map_a = dict(zip(a.labels.tolist(), a.alleles.tolist()))
        map_b = dict(zip(b.labels.tolist(), b.alleles.tolist()))
        c1, _ = crossover(a, b, rng, coding=ALWAYS)
        for lab, allele in zip(c1.labels.tolist(), c1.alleles.tolist()):
            assert allele in (map_a[lab], map_b[lab])


def test_mutation_rate_one_flips_everything():
    c = chrom(labels=[0, 1, 2], alleles=[0, 1, 0], meta=(0, 128, 255))
    out = self_adaptive_mutate(c, np.random.default_rng(11), coding=ALWAYS)
    np.testing.assert_array_equal(out.alleles, [1, 0, 1])
    np.testing.assert_array_equal(out.meta, [255, 127, 0])  # bitwise complement


def test_mutation_rate_zero_changes_nothing():
    rng = np.random.default_rng(12)
    c = random_chromosome(16, rng)
    out = self_adaptive_mutate(c, rng, coding=NEVER)
    np.testing.assert_array_equal(out.alleles, c.alleles)
    np.testing.assert_array_equal(out.meta, c.meta)


def test_mutation_preserves_labels():
    rng = np.random.default_rng(13)
    c = inversion(random_chromosome(10, rng), rng)
    out = self_adaptive_mutate(c, rng)
    np.testing.assert_array_equal(out.labels, c.labels)


def test_meta_bits_flip_under_old_rate():
    """The payload flip probability is the NEW rate: with meta genes at 255
    (old rate = max) and a coding spanning [tiny, 1], flipped-to-low meta
    genes must produce almost no payload flips despite the high old rate."""
    coding = RateCoding(rate_min=1e-12, rate_max=1.0)
    c = chrom(labels=list(range(64)), alleles=[0] * 64, meta=(255, 255, 255))
    out = self_adaptive_mutate(c, np.random.default_rng(14), coding=coding)
    # old mu = 1 -> all 24 meta bits flip -> meta becomes 0 -> new mu = 1e-12
    np.testing.assert_array_equal(out.meta, [0, 0, 0])
    assert out.alleles.sum() == 0


# ---------------------------------------------------------------------------
# generational loop
# ---------------------------------------------------------------------------


def test_history_length_and_fields():
    config = GAConfig(N=8, K=2, population=10, generations=5, seed=15)
    result = run_meta_ga(config)
    assert [g.generation for g in result.history] == [0, 1, 2, 3, 4]
    for g in result.history:
        assert 0.0 <= g.mean_fitness <= g.best_fitness <= 1.0
        assert g.mean_mu > 0 and g.mean_chi > 0 and g.mean_iota > 0
    assert len(result.population) == 10


def test_single_generation_reports_initial_population():
    config = GAConfig(N=6, K=1, population=8, generations=1, seed=16)
    result = run_meta_ga(config)
    assert len(result.history) == 1


def test_run_is_deterministic():
    config = GAConfig(N=10, K=3, population=12, generations=15, seed=17)
    a = run_meta_ga(config)
    b = run_meta_ga(config)
    assert [(g.best_fitness, g.mean_mu) for g in a.history] == [
        (g.best_fitness, g.mean_mu) for g in b.history
    ]
    for ca, cb in zip(a.population, b.population):
        np.testing.assert_array_equal(ca.alleles, cb.alleles)
        np.testing.assert_array_equal(ca.meta, cb.meta)


def test_explicit_landscape_is_used():
    landscape = build_landscape(8, 0, seed=18)
    config = GAConfig(N=8, K=0, population=10, generations=10, seed=19)
    result = run_meta_ga(config, landscape=landscape)
    assert result.landscape is landscape
    with pytest.raises(ParameterError):
        run_meta_ga(GAConfig(N=9, population=10, generations=2), landscape=landscape)


def test_elitism_makes_best_fitness_monotone():
    config = GAConfig(N=12, K=4, population=20, generations=40, seed=20, elitism=True)
    result = run_meta_ga(config)
    best = [g.best_fitness for g in result.history]
    assert all(b >= a - 1e-12 for a, b in zip(best, best[1:]))


def test_selection_improves_over_random_start():
    config = GAConfig(N=12, K=2, population=30, generations=60, seed=21)
    result = run_meta_ga(config)
    assert max(g.best_fitness for g in result.history) > result.history[0].mean_fitness


def test_population_validation():
    with pytest.raises(ParameterError):
        run_meta_ga(GAConfig(population=7, generations=5))
    with pytest.raises(ParameterError):
        run_meta_ga(GAConfig(population=0, generations=5))
    with pytest.raises(ParameterError):
        run_meta_ga(GAConfig(population=10, generations=0))
