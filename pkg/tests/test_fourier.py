import math

import numpy as np
import pytest
from hypothesis import given, settings

from biasedcube import (
    BiasedMeasure, CubeFunction, CubePoint, IncompatibleOperandsError, Spectrum, cross_level_inner,
    fourier_degree, inner_product, inverse_transform, level_weight, naive_transform, subset_mask,
    transform, walsh_function, walsh_value,
)
from biasedcube.fourier import butterfly_forward, butterfly_inverse

from conftest import biases, brute_coefficient, tables


def dictator(n):
    return CubeFunction.from_callable(n, lambda x: x & 1)


def test_character_values():
    m = BiasedMeasure(0.3)
    assert walsh_value({1}, CubePoint(1, 1), m) == pytest.approx(math.sqrt(7 / 3), abs=1e-12)
    assert walsh_value({1}, CubePoint(1, 0), m) == pytest.approx(-math.sqrt(3 / 7), abs=1e-12)
    assert walsh_value(set(), CubePoint(3, 5), m) == 1.0


def test_dictator_spectrum():
    s = transform(dictator(2), BiasedMeasure(0.3))
    assert s[set()] == pytest.approx(0.3, abs=1e-15)
    assert s[{1}] == pytest.approx(math.sqrt(0.21), abs=1e-15)
    assert s[{2}] == pytest.approx(0.0, abs=1e-15)
    assert s[{1, 2}] == pytest.approx(0.0, abs=1e-15)
    assert level_weight(s, 1) == pytest.approx(0.21, abs=1e-14)
    assert level_weight(s, 2) == pytest.approx(0.0, abs=1e-14)


def test_parity_spectrum():
    f = CubeFunction.from_callable(2, lambda x: bin(x).count("1") & 1)
    s = transform(f, BiasedMeasure(0.5))
    np.testing.assert_allclose(s.coeffs, [0.5, 0, 0, -0.5], atol=1e-15)
    assert level_weight(s, 2) == pytest.approx(0.25)


def test_inner_product_with_character():
    m = BiasedMeasure(0.3)
    assert inner_product(dictator(1), walsh_function({1}, 1, m), m) == pytest.approx(math.sqrt(0.21), abs=1e-14)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_characters_orthonormal(n, measure):
    w = measure.weights(n)
    chars = np.array([walsh_function(T, n, measure).values for T in range(1 << n)])
    gram = (chars * w) @ chars.T
    np.testing.assert_allclose(gram, np.eye(1 << n), atol=1e-12)


@settings(max_examples=40)
@given(f=tables(max_n=5), p=biases)
def test_butterfly_matches_definition(f, p):
    s = transform(f, BiasedMeasure(p))
    direct = [brute_coefficient(f, T, p) for T in range(1 << f.n)]
    np.testing.assert_allclose(s.coeffs, direct, atol=1e-10)


@settings(max_examples=40)
@given(f=tables(max_n=7), p=biases)
def test_butterfly_matches_naive(f, p):
    m = BiasedMeasure(p)
    np.testing.assert_allclose(transform(f, m).coeffs, naive_transform(f, m).coeffs, atol=1e-10)


@settings(max_examples=60)
@given(f=tables(max_n=10), p=biases)
def test_roundtrip_and_parseval(f, p):
    m = BiasedMeasure(p)
    s = transform(f, m)
    np.testing.assert_allclose(inverse_transform(s).values, f.values, atol=1e-10)
    assert s.total_weight() == pytest.approx(inner_product(f, f, m), rel=1e-10, abs=1e-12)
    assert s.coeffs[0] == pytest.approx(float(np.dot(m.weights(f.n), f.values)), abs=1e-12)


def test_batched_butterfly():
    rng = np.random.default_rng(1)
    block = rng.normal(size=(3, 16))
    out = butterfly_forward(block, 0.3)
    for row, o in zip(block, out):
        np.testing.assert_allclose(o, butterfly_forward(row, 0.3), atol=1e-14)
    np.testing.assert_allclose(butterfly_inverse(out, 0.3), block, atol=1e-12)


def test_subset_mask_and_indexing():
    assert subset_mask([1, 3]) == 0b101
    s = transform(dictator(3), BiasedMeasure(0.5))
    assert s[0b001] == s[{1}] == s[[1]]


def test_level_weight_range():
    s = transform(dictator(2), BiasedMeasure(0.5))
    with pytest.raises(IndexError):
        level_weight(s, 3)


def test_level_weights_sum_to_total():
    rng = np.random.default_rng(2)
    s = transform(CubeFunction(rng.normal(size=256)), BiasedMeasure(0.3))
    assert s.level_weights().sum() == pytest.approx(s.total_weight(), rel=1e-12)


def test_fourier_degree():
    m = BiasedMeasure(0.3)
    assert fourier_degree(transform(dictator(4), m)) == 1
    assert fourier_degree(transform(CubeFunction.constant(3, 2.0), m)) == 0
    and3 = CubeFunction.from_callable(3, lambda x: float(x == 7))
    assert fourier_degree(transform(and3, m)) == 3


def test_cross_level_inner_brute_force():
    rng = np.random.default_rng(3)
    m = BiasedMeasure(0.3)
    sf = transform(CubeFunction(rng.random(256)), m)
    sg = transform(CubeFunction(rng.random(256)), m)
    direct = sum(sf.coeffs[T] * sg.coeffs[T] for T in range(256) if bin(T).count("1") == 2)
    assert cross_level_inner(sf, sg, 2) == pytest.approx(direct, rel=1e-12)


def test_cross_level_inner_rejects_mismatch():
    m = BiasedMeasure(0.3)
    with pytest.raises(IncompatibleOperandsError):
        cross_level_inner(transform(dictator(2), m), transform(dictator(3), m), 1)
    with pytest.raises(IncompatibleOperandsError):
        cross_level_inner(transform(dictator(2), m), transform(dictator(2), BiasedMeasure(0.5)), 1)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_serialization_roundtrip(p):
    rng = np.random.default_rng(4)
    s = transform(CubeFunction(rng.normal(size=32)), BiasedMeasure(p))
    b = Spectrum.from_bytes(s.to_bytes())
    c = Spectrum.from_csv(s.to_csv())
    for t in (b, c):
        assert (t.n, t.p) == (s.n, s.p)
        np.testing.assert_array_equal(t.coeffs, s.coeffs)
    assert len(s.to_bytes()) == 16 + 8 * 32
    with pytest.raises(ValueError):
        Spectrum.from_bytes(b"XXXX" + s.to_bytes()[4:])
