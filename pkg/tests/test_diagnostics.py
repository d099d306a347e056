import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasedcube import (
    BiasedMeasure, CubeFunction, Partition, check_decoupled_exceedance, check_decoupled_theorem,
    check_exceedance_lemma, check_level_weight_lemma, check_stability_theorem, exceedance_set,
    influence_profile, level_weight, partition_level_sum, partition_rhs, random_partition,
    random_low_influence, transform, tribes,
)
from biasedcube.bounds import exceedance_threshold
from biasedcube.diagnostics import (
    check_integral_bound, check_partition_inequality, inclusion_probability, partition_average,
    partition_numerators,
)

from conftest import all_boolean


def brute_numerators(f, m, part, d):
    s = transform(f, m)
    out = np.zeros(f.n)
    for S in range(1 << f.n):
        inJ = [k for k in range(f.n) if (S >> k) & 1 and (part.J >> k) & 1]
        inI = [k for k in range(f.n) if (S >> k) & 1 and (part.I >> k) & 1]
        if len(inJ) == 1 and len(inI) == d - 1:
            out[inJ[0]] += s.coeffs[S] ** 2
    return out


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(3, 0b011, 0b110)
    with pytest.raises(ValueError):
        Partition(3, 0b001, 0b010)
    part = Partition.from_J(4, [2, 4])
    assert part.I == 0b0101 and part.J_coords == (2, 4) and part.I_coords == (1, 3)


def test_parity_partition_sum():
    f = CubeFunction.from_callable(2, lambda x: bin(x).count("1") & 1)
    assert partition_level_sum(f, BiasedMeasure(0.5), Partition.from_J(2, [2]), 2) == pytest.approx(0.25)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4), p=st.sampled_from([0.1, 0.5, 0.7]))
def test_numerators_match_enumeration(seed, d, p):
    rng = np.random.default_rng(seed)
    f = CubeFunction(rng.random(256))
    part = random_partition(8, d, seed)
    m = BiasedMeasure(p)
    np.testing.assert_allclose(partition_numerators(f, m, part, d), brute_numerators(f, m, part, d),
                               atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_partition_average_identity(d):
    f = CubeFunction(np.random.default_rng(d).random(64))
    m = BiasedMeasure(0.3)
    lw = level_weight(transform(f, m), d)
    avg = partition_average(f, m, d)
    assert avg == pytest.approx(inclusion_probability(d) * lw, rel=1e-10)
    assert math.e * avg >= lw


def test_tribes_partition_inequality():
    f = tribes(12, 3)
    m = BiasedMeasure(0.5)
    rep = check_partition_inequality(f, m, Partition.from_J(12, [1, 2, 3]), 2, "tribes")
    assert rep.hypothesis_met and rep.passed
    assert partition_rhs(f, m, Partition.from_J(12, [1, 2, 3]), 2).value == rep.rhs


def test_exceedance_set_matches_direct():
    rng = np.random.default_rng(8)
    f = CubeFunction((rng.random(256) < 0.5).astype(float))
    m = BiasedMeasure(0.5)
    part = random_partition(8, 2, 3)
    num = brute_numerators(f, m, part, 2)
    inf2 = influence_profile(f, m).normalized ** 2
    for t in (0.5, 1.0, 4.0):
        expected = {k + 1 for k in range(8) if (part.J >> k) & 1 and num[k] > t * inf2[k]}
        assert exceedance_set(f, m, part, 2, t) == frozenset(expected)


def test_exceedance_is_strict():
    f = CubeFunction.from_callable(2, lambda x: bin(x).count("1") & 1)
    m = BiasedMeasure(0.5)
    part = Partition.from_J(2, [2])
    # numerator of 2 is 1/4, I'_2^2 = 1/4
    assert exceedance_set(f, m, part, 2, 1.0) == frozenset()
    assert exceedance_set(f, m, part, 2, 0.99) == {2}


def test_exceedance_lemma_on_tribes():
    f = tribes(12, 3)
    m = BiasedMeasure(0.5)
    rep = check_exceedance_lemma(f, m, random_partition(12, 2, 0), 2, exceedance_threshold(2, 0.5))
    assert rep.hypothesis_met and rep.passed


def test_decoupled_exceedance_random_pair():
    rng = np.random.default_rng(11)
    f = CubeFunction((rng.random(256) < 0.5).astype(float))
    g = CubeFunction((rng.random(256) < 0.5).astype(float))
    rep = check_decoupled_exceedance(f, g, BiasedMeasure(0.5), random_partition(8, 2, 1), 2,
                                     exceedance_threshold(2, 0.5))
    assert rep.passed


def test_level_weight_lemma_on_tribes_16():
    rep = check_level_weight_lemma(tribes(16, 4), BiasedMeasure(0.5), 2, "tribes")
    assert rep.hypothesis_met and rep.passed
    assert rep.parameters["W"] == pytest.approx(0.042433, abs=1e-6)
    assert rep.rhs / rep.lhs >= 1


def test_level_weight_lemma_above_threshold_not_asserted():
    rep = check_level_weight_lemma(tribes(4, 2), BiasedMeasure(0.5), 2)
    assert not rep.hypothesis_met and rep.passed


@pytest.mark.parametrize("seed", range(5))
def test_level_weight_lemma_low_influence(seed):
    f = random_low_influence(8, math.exp(-2), seed)
    rep = check_level_weight_lemma(f, BiasedMeasure(0.5), 2)
    assert rep.hypothesis_met and rep.passed


def test_stability_dictator_example():
    f = CubeFunction.from_callable(3, lambda x: x & 1)
    rep = check_stability_theorem(f, BiasedMeasure(0.5), 0.1)
    assert rep.lhs == pytest.approx(0.25 * 0.9, abs=1e-14)
    assert rep.rhs == pytest.approx(16.61, abs=0.01)
    assert rep.passed


@pytest.mark.parametrize("p", [0.2, 0.5])
@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_stability_exhaustive_n3(p, eps):
    m = BiasedMeasure(p)
    assert all(check_stability_theorem(f, m, eps).passed for f in all_boolean(3))


def test_range_hypothesis():
    f = CubeFunction(np.array([0.0, 2.0]))
    rep = check_stability_theorem(f, BiasedMeasure(0.5), 0.1)
    assert not rep.hypothesis_met and "[-1, 1]" in rep.hypothesis_detail
    rep = check_exceedance_lemma(CubeFunction(np.array([0.0, 0.5])), BiasedMeasure(0.5),
                                 Partition.from_J(1, [1]), 2, 100.0)
    assert not rep.hypothesis_met


@pytest.mark.parametrize("d", [2, 3])
def test_decoupled_theorem_random_pairs(d):
    for seed in range(10):
        f = random_low_influence(8, math.exp(-2 * d), seed)
        g = random_low_influence(8, math.exp(-2 * d), seed + 100)
        rep = check_decoupled_theorem(f, g, BiasedMeasure(0.5), d)
        assert rep.passed


def test_decoupled_theorem_needs_unit_influence_mass():
    # parity on many bits has sum I'^2 = n/4 > 1
    f = CubeFunction.from_callable(6, lambda x: bin(x).count("1") & 1)
    rep = check_decoupled_theorem(f, f, BiasedMeasure(0.5), 2)
    assert not rep.hypothesis_met and "> 1" in rep.hypothesis_detail


def test_integral_report():
    rep = check_integral_bound(2, 0.5, 8 * math.e)
    assert rep.hypothesis_met and rep.passed and rep.parameters["rel_error"] <= 1e-8


def test_random_partition_concentrates():
    n, seeds = 10_000, 10_000
    sizes = np.array([bin(random_partition(n, 2, s).J).count("1") for s in range(seeds)])
    sigma = math.sqrt(n * 0.25)
    assert abs(sizes.mean() - n / 2) <= 3 * sigma / math.sqrt(seeds)
    assert sizes.std() == pytest.approx(sigma, rel=0.05)


def test_random_partition_is_seeded():
    assert random_partition(50, 3, 7) == random_partition(50, 3, 7)
    assert random_partition(50, 3, 7) != random_partition(50, 3, 8)
    with pytest.raises(ValueError):
        random_partition(5, 1, 0)
