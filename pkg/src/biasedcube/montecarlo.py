"""Sampled influences and noise stability for functions given as oracles.

An :class:`Oracle` evaluates a function on batches of points.  It may declare
the coordinates the function actually reads (``support``); since coordinates
are independent under mu_p and the noise acts coordinate-wise, only those
coordinates are ever sampled, which makes n = 10**6 dictators cheap.

Reproducibility: the sample budget is cut into fixed-size chunks and chunk
``c`` draws from ``SeedSequence(seed, spawn_key=(c,))``.  The result is
therefore the same for any number of worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from .cube import BiasedMeasure, CubeFunction, CubePoint
from .influence import NoiseParams

CHUNK = 1 << 15


class Estimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True)
class Oracle:
    """A function on {0,1}^n evaluated on blocks of sampled bits.

    ``evaluate`` receives a ``(batch, k)`` uint8 array whose column ``j`` holds
    coordinate ``support[j]`` and returns ``batch`` real values.  With
    ``support=None`` every coordinate 1..n is passed, in order.
    """

    n: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    support: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        if self.support is not None:
            sup = tuple(int(i) for i in self.support)
            if any(not 1 <= i <= self.n for i in sup) or len(set(sup)) != len(sup):
                raise ValueError("support must list distinct coordinates in 1..n")
            object.__setattr__(self, "support", sup)

    @property
    def coords(self) -> tuple:
        return self.support if self.support is not None else tuple(range(1, self.n + 1))

    def __call__(self, x) -> float:
        mask = x.mask if isinstance(x, CubePoint) else int(x)
        bits = np.array([[(mask >> (i - 1)) & 1 for i in self.coords]], dtype=np.uint8)
        return float(np.asarray(self.evaluate(bits))[0])

    @classmethod
    def from_function(cls, f: CubeFunction, name: str = "") -> "Oracle":
        weights = (1 << np.arange(f.n, dtype=np.int64))
        table = f.values

        def evaluate(bits):
            return table[bits.astype(np.int64) @ weights]

        return cls(f.n, evaluate, None, name)

    @classmethod
    def from_mask_function(cls, n: int, fn: Callable[[int], float], name: str = "") -> "Oracle":
        """Wrap a scalar evaluator ``fn(mask) -> value`` (slow; for user code)."""
        shifts = [1 << k for k in range(n)]

        def evaluate(bits):
            out = np.empty(bits.shape[0])
            for r, row in enumerate(bits):
                out[r] = fn(sum(s for s, b in zip(shifts, row) if b))
            return out

        return cls(n, evaluate, None, name)


def _stream(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _chunk_sizes(samples: int) -> list:
    full, rest = divmod(samples, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _run_chunks(work, samples: int, seed: int, workers: int) -> list:
    sizes = _chunk_sizes(samples)
    jobs = [(c, size) for c, size in enumerate(sizes)]
    if workers <= 1:
        return [work(_stream(seed, c), size) for c, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: work(_stream(seed, job[0]), job[1]), jobs))


def _check_samples(samples: int) -> None:
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")


def sample_points(rng: np.random.Generator, size: int, k: int, p: float) -> np.ndarray:
    return (rng.random((size, k)) < p).astype(np.uint8)


def perturb(bits: np.ndarray, noise: NoiseParams, rng: np.random.Generator) -> np.ndarray:
    """Apply N_eps independently to every coordinate of every row."""
    keep = rng.random(bits.shape) >= noise.epsilon
    fresh = rng.random(bits.shape) < noise.p
    return np.where(keep, bits, fresh.astype(np.uint8))


def noise_sample(x: CubePoint, noise: NoiseParams, rng: np.random.Generator) -> CubePoint:
    """One draw of y ~ N_eps(x)."""
    bits = np.array([x.bits()], dtype=np.uint8)
    y = perturb(bits, noise, rng)[0]
    return CubePoint.from_bits(y.tolist())


def noise_stability_mc(
    oracle: Oracle,
    n: int,
    noise: NoiseParams,
    samples: int,
    seed: int,
    workers: int = 1,
) -> Estimate:
    """Sample covariance of (f(x), f(y)) over x ~ mu_p, y ~ N_eps(x).

    The standard error is the delta-method one: the sample standard deviation
    of (f(x) - mean)(f(y) - mean') divided by sqrt(samples).
    """
    _check_samples(samples)
    if oracle.n != n:
        raise ValueError(f"oracle has n={oracle.n}, asked for n={n}")
    k = len(oracle.coords)

    def work(rng, size):
        x = sample_points(rng, size, k, noise.p)
        y = perturb(x, noise, rng)
        return (np.asarray(oracle.evaluate(x), dtype=np.float64),
                np.asarray(oracle.evaluate(y), dtype=np.float64))

    parts = _run_chunks(work, samples, seed, workers)
    a = np.concatenate([pa for pa, _ in parts])
    b = np.concatenate([pb for _, pb in parts])
    z = (a - a.mean()) * (b - b.mean())
    value = float(z.sum() / (samples - 1))
    stderr = float(z.std(ddof=1) / math.sqrt(samples))
    return Estimate(value, stderr)


def influence_mc(
    oracle: Oracle,
    n: int,
    m: BiasedMeasure,
    i: int,
    samples: int,
    seed: int,
    workers: int = 1,
) -> Estimate:
    """Empirical E|f(x^{i<-0}) - f(x^{i<-1})| over x ~ mu_p.

    For 0/1-valued f this is the frequency of f(x) != f(x xor e_i).
    """
    _check_samples(samples)
    if oracle.n != n:
        raise ValueError(f"oracle has n={oracle.n}, asked for n={n}")
    if not 1 <= i <= n:
        raise IndexError(f"coordinate {i} out of range 1..{n}")
    coords = oracle.coords
    if i not in coords:
        return Estimate(0.0, 0.0)
    col = coords.index(i)
    k = len(coords)

    def work(rng, size):
        x = sample_points(rng, size, k, m.p)
        x[:, col] = 0
        f0 = np.asarray(oracle.evaluate(x), dtype=np.float64)
        x[:, col] = 1
        f1 = np.asarray(oracle.evaluate(x), dtype=np.float64)
        return np.abs(f0 - f1)

    d = np.concatenate(_run_chunks(work, samples, seed, workers))
    return Estimate(float(d.mean()), float(d.std(ddof=1) / math.sqrt(samples)))


def expectation_mc(oracle: Oracle, m: BiasedMeasure, samples: int, seed: int) -> Estimate:
    _check_samples(samples)
    k = len(oracle.coords)

    def work(rng, size):
        return np.asarray(oracle.evaluate(sample_points(rng, size, k, m.p)), dtype=np.float64)

    v = np.concatenate(_run_chunks(work, samples, seed, 1))
    return Estimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)))
