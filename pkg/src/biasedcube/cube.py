"""Points, product measures and function tables on the discrete cube {0,1}^n.

Coordinates are 1-based in the public API (coordinate ``i`` is the usual
``x_i``) and stored as bit ``i - 1`` of an integer mask.  A function on the
cube is a table of ``2**n`` values indexed by that mask, so ``values[x]`` is
``f(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

DEFAULT_CAP = 24


class IncompatibleOperandsError(ValueError):
    """Raised when two objects disagree on dimension or bias."""


class CapacityError(ValueError):
    """Raised when an exact (table-based) computation is asked for n above the cap."""


def require_exact(n: int, cap: int = DEFAULT_CAP) -> None:
    if n > cap:
        raise CapacityError(
            f"exact mode supports n <= {cap} (got n={n}); raise the cap or use the Monte Carlo path"
        )


def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**n)``."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def _check_coordinate(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"coordinate {i} out of range 1..{n}")


@dataclass(frozen=True)
class CubePoint:
    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, bits) -> "CubePoint":
        """Build a point from ``(x_1, ..., x_n)``."""
        bits = list(bits)
        mask = sum(1 << k for k, b in enumerate(bits) if b)
        return cls(len(bits), mask)

    def bit(self, i: int) -> int:
        _check_coordinate(i, self.n)
        return (self.mask >> (i - 1)) & 1

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def bits(self) -> tuple:
        return tuple((self.mask >> k) & 1 for k in range(self.n))


@dataclass(frozen=True)
class BiasedMeasure:
    """The product measure mu_p on the cube; each coordinate is 1 with probability p."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < 1.0) or not math.isfinite(p):
            raise ValueError(f"bias p must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def sigma(self) -> float:
        """sqrt(p(1-p)), the standard deviation of one coordinate."""
        return math.sqrt(self.p * (1.0 - self.p))

    def weights(self, n: int) -> np.ndarray:
        """mu_p(x) for every mask x in ``range(2**n)``.

        Built one coordinate at a time as products of (1-p) and p, so each
        weight carries at most n roundings.
        """
        w = np.ones(1)
        factors = (1.0 - self.p, self.p)
        for _ in range(n):
            w = np.concatenate((w * factors[0], w * factors[1]))
        return w


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A real-valued function on {0,1}^n stored as a read-only table."""

    values: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).ravel()
        size = vals.size
        if size == 0 or size & (size - 1):
            raise ValueError(f"table length must be a power of two, got {size}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", size.bit_length() - 1)

    @classmethod
    def from_callable(cls, n: int, fn) -> "CubeFunction":
        """Tabulate ``fn(mask)`` over the whole cube."""
        return cls(np.array([fn(x) for x in range(1 << n)], dtype=np.float64))

    @classmethod
    def constant(cls, n: int, c: float) -> "CubeFunction":
        return cls(np.full(1 << n, float(c)))

    @property
    def is_boolean(self) -> bool:
        v = self.values
        return bool(np.all((v == 0.0) | (v == 1.0)))

    def __call__(self, x) -> float:
        mask = x.mask if isinstance(x, CubePoint) else int(x)
        return float(self.values[mask])

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, CubeFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __add__(self, other):
        _same_dim(self, other)
        return CubeFunction(self.values + other.values)

    def __sub__(self, other):
        _same_dim(self, other)
        return CubeFunction(self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, CubeFunction):
            _same_dim(self, c)
            return CubeFunction(self.values * c.values)
        return CubeFunction(self.values * float(c))

    __rmul__ = __mul__


def _same_dim(f: CubeFunction, g: CubeFunction) -> None:
    if f.n != g.n:
        raise IncompatibleOperandsError(f"dimension mismatch: {f.n} vs {g.n}")


def point_weight(x: CubePoint, m: BiasedMeasure) -> float:
    """mu_p(x) = p^|x| (1-p)^(n-|x|)."""
    k = x.weight
    return math.exp(k * math.log(m.p) + (x.n - k) * math.log1p(-m.p))


def expectation(f: CubeFunction, m: BiasedMeasure) -> float:
    return float(np.dot(m.weights(f.n), f.values))


def inner_product(f: CubeFunction, g: CubeFunction, m: BiasedMeasure) -> float:
    _same_dim(f, g)
    return float(np.dot(m.weights(f.n), f.values * g.values))


def norm2(f: CubeFunction, m: BiasedMeasure) -> float:
    return math.sqrt(inner_product(f, f, m))


def variance(f: CubeFunction, m: BiasedMeasure) -> float:
    mean = expectation(f, m)
    return inner_product(f, f, m) - mean * mean


def flip(x: CubePoint, i: int) -> CubePoint:
    """x with coordinate i toggled."""
    _check_coordinate(i, x.n)
    return CubePoint(x.n, x.mask ^ (1 << (i - 1)))


def coordinate_pairs(values: np.ndarray, i: int) -> tuple:
    """Views ``(f(x^{i<-0}), f(x^{i<-1}))`` over the remaining n-1 coordinates.

    The returned arrays are indexed by the (n-1)-bit mask obtained by deleting
    bit ``i - 1``; this is the ordering used by :func:`fix_coordinate`.
    """
    n = values.shape[-1].bit_length() - 1
    _check_coordinate(i, n)
    lead = values.shape[:-1]
    low = 1 << (i - 1)
    v = values.reshape(*lead, (1 << n) // (2 * low), 2, low)
    a = v[..., 0, :].reshape(*lead, -1)
    b = v[..., 1, :].reshape(*lead, -1)
    return a, b


def fix_coordinate(f: CubeFunction, i: int, a: int) -> CubeFunction:
    """Restriction of f with coordinate i pinned to ``a``; a function of n-1 variables."""
    _check_coordinate(i, f.n)
    if a not in (0, 1):
        raise ValueError("pinned value must be 0 or 1")
    lo, hi = coordinate_pairs(f.values, i)
    return CubeFunction(np.ascontiguousarray(hi if a else lo))
