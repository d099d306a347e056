"""Exact influences, the noise operator and noise stability."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cube import (
    DEFAULT_CAP,
    BiasedMeasure,
    CubeFunction,
    coordinate_pairs,
    expectation,
    inner_product,
    popcounts,
    require_exact,
)
from .fourier import butterfly_forward, transform

AGREEMENT_TOL = 1e-10
_BATCH_ELEMENTS = 1 << 17


class InconsistentResultError(ArithmeticError):
    """Two independent exact computations of the same quantity disagree."""


@dataclass(frozen=True)
class NoiseParams:
    """Each coordinate is kept with probability 1 - epsilon, otherwise redrawn from mu_p."""

    epsilon: float
    p: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        BiasedMeasure(self.p)

    @property
    def measure(self) -> BiasedMeasure:
        return BiasedMeasure(self.p)


@dataclass(frozen=True)
class InfluenceProfile:
    influences: np.ndarray
    normalized: np.ndarray
    W: float

    @property
    def total(self) -> float:
        return float(self.influences.sum())


def influence(f: CubeFunction, m: BiasedMeasure, i: int) -> float:
    """I_i(f) = E_{x_-i} |f(x^{i<-0}) - f(x^{i<-1})|.

    For 0/1-valued f this is Pr[f(x) != f(x xor e_i)]: each unordered pair
    {x, x xor e_i} is visited once with weight mu_p(x_-i).
    """
    lo, hi = coordinate_pairs(f.values, i)
    w = m.weights(f.n - 1)
    return float(np.dot(w, np.abs(lo - hi)))


def influences(f: CubeFunction, m: BiasedMeasure) -> np.ndarray:
    if f.n == 0:
        return np.zeros(0)
    w = m.weights(f.n - 1)
    out = np.empty(f.n)
    for i in range(1, f.n + 1):
        lo, hi = coordinate_pairs(f.values, i)
        out[i - 1] = np.dot(w, np.abs(lo - hi))
    return out


def influence_profile(f: CubeFunction, m: BiasedMeasure) -> InfluenceProfile:
    inf = influences(f, m)
    normalized = m.sigma * inf
    W = m.p * (1.0 - m.p) * float(np.dot(inf, inf))
    return InfluenceProfile(inf, normalized, W)


def sum_squared_influences(f: CubeFunction, m: BiasedMeasure) -> float:
    """W(f) = p(1-p) sum_i I_i(f)^2."""
    return influence_profile(f, m).W


def _noise_tables(values: np.ndarray, eps: float, p: float) -> np.ndarray:
    """T applied along the last axis of a stack of tables."""
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[-1].bit_length() - 1
    for i in range(1, n + 1):
        lo, hi = _pair_slots(out, i)
        # (1 - eps)(a, b) + eps((1-p) a + p b) in difference form
        d = hi - lo
        lo += (eps * p) * d
        d *= eps * (1.0 - p)
        hi -= d
    return out


def apply_noise_operator(f: CubeFunction, noise: NoiseParams) -> CubeFunction:
    """(T f)(x) = E_{y ~ N_eps(x)} f(y), computed coordinate by coordinate.

    Replacing x_i by a fresh mu_p draw with probability eps maps the pair
    ``(a, b)`` to ``(1 - eps) (a, b) + eps ((1-p) a + p b)``.
    """
    return CubeFunction(_noise_tables(f.values, noise.epsilon, noise.p))


def _pair_slots(arr: np.ndarray, i: int):
    low = 1 << (i - 1)
    v = arr.reshape(arr.shape[:-1] + (arr.shape[-1] // (2 * low), 2, low))
    return v[..., 0, :], v[..., 1, :]


def noise_stability_batch(values: np.ndarray, p: float, epsilons):
    """Both routes to S_eps for a stack of tables (last axis = cube).

    Returns ``(spectral, operator)``, each of shape ``values.shape[:-1] +
    (len(epsilons),)``.  The spectrum is computed once and reused for every eps.
    """
    values = np.asarray(values, dtype=np.float64)
    lead, size = values.shape[:-1], values.shape[-1]
    n = size.bit_length() - 1
    w = BiasedMeasure(p).weights(n)
    onehot = np.zeros((size, n + 1))
    onehot[np.arange(size), popcounts(n)] = 1.0
    damp = np.array([(1.0 - e) ** np.arange(n + 1) for e in epsilons]).T
    damp[0] = 0.0
    flat = values.reshape(-1, size)
    spectral = np.empty((flat.shape[0], len(epsilons)))
    operator = np.empty_like(spectral)
    rows = max(1, _BATCH_ELEMENTS // size)  # keep blocks cache-sized
    for s in range(0, flat.shape[0], rows):
        block = flat[s:s + rows]
        spectral[s:s + rows] = (butterfly_forward(block, p) ** 2 @ onehot) @ damp
        mean = block @ w
        for j, eps in enumerate(epsilons):
            operator[s:s + rows, j] = (block * _noise_tables(block, eps, p)) @ w - mean * mean
    shape = lead + (len(epsilons),)
    return spectral.reshape(shape), operator.reshape(shape)


def noise_stability_spectral(f: CubeFunction, noise: NoiseParams) -> float:
    """sum over nonempty S of (1-eps)^|S| f^(S)^2."""
    s = transform(f, noise.measure)
    k = popcounts(f.n)
    damp = (1.0 - noise.epsilon) ** k
    damp[0] = 0.0
    return float(np.dot(damp, s.coeffs**2))


def noise_stability_operator(f: CubeFunction, noise: NoiseParams) -> float:
    """Cov(f(x), f(y)) = <f, T f> - E[f]^2, using stationarity of N_eps."""
    m = noise.measure
    tf = apply_noise_operator(f, noise)
    mean = expectation(f, m)
    return inner_product(f, tf, m) - mean * mean


def noise_stability_exact(f: CubeFunction, noise: NoiseParams, cap: int = DEFAULT_CAP) -> float:
    """S_eps(f), cross-checked between the spectral and the operator computation."""
    require_exact(f.n, cap)
    spectral = noise_stability_spectral(f, noise)
    direct = noise_stability_operator(f, noise)
    if abs(spectral - direct) > AGREEMENT_TOL * max(1.0, abs(direct)):
        raise InconsistentResultError(
            f"spectral S_eps={spectral!r} disagrees with covariance {direct!r}"
        )
    return spectral


def first_level_gaps(f: CubeFunction, m: BiasedMeasure) -> np.ndarray:
    """p(1-p) I_i^2 - f^({i})^2 for each coordinate; non-negative for 0/1-valued f."""
    s = transform(f, m)
    first = s.coeffs[[1 << k for k in range(f.n)]]
    inf = influences(f, m)
    return m.p * (1.0 - m.p) * inf**2 - first**2


def spectral_total_influence(f: CubeFunction, m: BiasedMeasure) -> float:
    """sum_S |S| f^(S)^2, which equals p(1-p) sum_i I_i for 0/1-valued f."""
    s = transform(f, m)
    return float(np.dot(popcounts(f.n), s.coeffs**2))


def stability_curve(f: CubeFunction, p: float, epsilons) -> np.ndarray:
    """S_eps(f) for each eps, from one transform."""
    s = transform(f, BiasedMeasure(p))
    levels = s.level_weights()
    levels[0] = 0.0
    k = np.arange(f.n + 1)
    return np.array([float(np.dot((1.0 - e) ** k, levels)) for e in epsilons])


def dictator_stability(p: float, epsilon: float) -> float:
    """Closed form S_eps(x_i) = p(1-p)(1-eps), valid for any n."""
    return p * (1.0 - p) * (1.0 - epsilon)

