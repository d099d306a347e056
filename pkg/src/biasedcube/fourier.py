"""Biased Fourier-Walsh basis and the fast O(n 2^n) transform.

For the product measure mu_p the one-coordinate characters are

    omega_i(x) = sqrt((1-p)/p)   if x_i = 1
               = -sqrt(p/(1-p))  if x_i = 0

and omega_T is the product over i in T.  Coefficients are stored in a table
indexed by the subset mask T (bit i-1 <-> coordinate i), the same indexing
used for points.
"""
from __future__ import annotations

from dataclasses import dataclass
import io
import math
import struct

import numpy as np

from .cube import (
    BiasedMeasure,
    CubeFunction,
    CubePoint,
    IncompatibleOperandsError,
    inner_product,
    popcounts,
)

DEGREE_TOL = 1e-12
_MAGIC = b"BFWS"


def _pair_view(arr: np.ndarray, k: int) -> np.ndarray:
    """View of ``arr`` with bit ``k`` of the last axis split out as axis -2."""
    size = arr.shape[-1]
    low = 1 << k
    return arr.reshape(*arr.shape[:-1], size // (2 * low), 2, low)


def butterfly_forward(values: np.ndarray, p: float) -> np.ndarray:
    """Biased Walsh coefficients of every table along the last axis.

    Per coordinate the pair ``(a, b) = (f|x_i=0, f|x_i=1)`` is mapped to
    ``((1-p) a + p b, sqrt(p(1-p)) (b - a))``.
    """
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[-1].bit_length() - 1
    s = math.sqrt(p * (1.0 - p))
    for k in range(n):
        v = _pair_view(out, k)
        a, b = v[..., 0, :], v[..., 1, :]
        d = b - a
        a += p * d  # (1-p) a + p b
        np.multiply(d, s, out=b)
    return out


def butterfly_inverse(coeffs: np.ndarray, p: float) -> np.ndarray:
    """Inverse of :func:`butterfly_forward`: sum_T c_T omega_T(x) for every x."""
    out = np.array(coeffs, dtype=np.float64, copy=True)
    n = out.shape[-1].bit_length() - 1
    lo = -math.sqrt(p / (1.0 - p))
    hi = math.sqrt((1.0 - p) / p)
    for k in range(n):
        v = _pair_view(out, k)
        c0, c1 = v[..., 0, :], v[..., 1, :]
        c0 += lo * c1
        c1 *= hi - lo
        c1 += c0
    return out


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Coefficients f^(T) of a function on {0,1}^n with respect to mu_p."""

    n: int
    p: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64).ravel()
        if c.size != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} coefficients, got {c.size}")
        BiasedMeasure(self.p)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "p", float(self.p))

    def __getitem__(self, T) -> float:
        return float(self.coeffs[_as_mask(T)])

    @property
    def measure(self) -> BiasedMeasure:
        return BiasedMeasure(self.p)

    def total_weight(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def level_weights(self) -> np.ndarray:
        """Array whose entry d is the level-d weight."""
        return np.bincount(popcounts(self.n), weights=self.coeffs**2, minlength=self.n + 1)

    def to_bytes(self) -> bytes:
        header = _MAGIC + struct.pack("<Id", self.n, self.p)
        return header + self.coeffs.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Spectrum":
        if data[:4] != _MAGIC:
            raise ValueError("not a serialized spectrum")
        n, p = struct.unpack_from("<Id", data, 4)
        coeffs = np.frombuffer(data, dtype="<f8", offset=16)
        return cls(n, p, coeffs.copy())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,p\n")
        buf.write(f"{self.n},{self.p!r}\n")
        buf.write("mask,coefficient\n")
        for T, c in enumerate(self.coeffs.tolist()):
            buf.write(f"{T},{c!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Spectrum":
        lines = text.strip().splitlines()
        n_str, p_str = lines[1].split(",")
        coeffs = [float(line.split(",")[1]) for line in lines[3:]]
        return cls(int(n_str), float(p_str), np.array(coeffs))


def _as_mask(T) -> int:
    if isinstance(T, (int, np.integer)):
        return int(T)
    return sum(1 << (i - 1) for i in T)


def subset_mask(coords) -> int:
    """Mask of a set of 1-based coordinates."""
    return _as_mask(tuple(coords))


def walsh_value(T, x: CubePoint, m: BiasedMeasure) -> float:
    """omega_T(x) for a subset mask (or iterable of coordinates) T."""
    T = _as_mask(T)
    if T >> x.n:
        raise ValueError("subset mask exceeds the point dimension")
    ones = (T & x.mask).bit_count()
    zeros = T.bit_count() - ones
    return math.sqrt((1 - m.p) / m.p) ** ones * (-math.sqrt(m.p / (1 - m.p))) ** zeros


def walsh_function(T, n: int, m: BiasedMeasure) -> CubeFunction:
    """omega_T tabulated over {0,1}^n."""
    T = _as_mask(T)
    x = np.arange(1 << n, dtype=np.uint64)
    ones = np.bitwise_count(x & np.uint64(T)).astype(np.int64)
    zeros = T.bit_count() - ones
    hi = math.sqrt((1 - m.p) / m.p)
    lo = -math.sqrt(m.p / (1 - m.p))
    return CubeFunction(hi**ones * lo**zeros)


def transform(f: CubeFunction, m: BiasedMeasure) -> Spectrum:
    return Spectrum(f.n, m.p, butterfly_forward(f.values, m.p))


def inverse_transform(s: Spectrum) -> CubeFunction:
    return CubeFunction(butterfly_inverse(s.coeffs, s.p))


def naive_transform(f: CubeFunction, m: BiasedMeasure) -> Spectrum:
    """O(4^n) transform by explicit inner products with every Walsh product."""
    coeffs = [inner_product(f, walsh_function(T, f.n, m), m) for T in range(1 << f.n)]
    return Spectrum(f.n, m.p, np.array(coeffs))


def _check_level(d: int, n: int) -> None:
    if not 0 <= d <= n:
        raise IndexError(f"level {d} out of range 0..{n}")


def level_weight(s: Spectrum, d: int) -> float:
    """sum over |S| = d of f^(S)^2."""
    _check_level(d, s.n)
    sel = popcounts(s.n) == d
    c = s.coeffs[sel]
    return float(np.dot(c, c))


def fourier_degree(s: Spectrum, tol: float = DEGREE_TOL) -> int:
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    big = np.abs(s.coeffs) > tol
    if not big.any():
        return 0
    return int(popcounts(s.n)[big].max())


def _compatible(sf: Spectrum, sg: Spectrum) -> None:
    if sf.n != sg.n:
        raise IncompatibleOperandsError(f"dimension mismatch: {sf.n} vs {sg.n}")
    if sf.p != sg.p:
        raise IncompatibleOperandsError(f"bias mismatch: {sf.p} vs {sg.p}")


def cross_level_inner(sf: Spectrum, sg: Spectrum, d: int) -> float:
    """sum over |S| = d of f^(S) g^(S)."""
    _compatible(sf, sg)
    _check_level(d, sf.n)
    sel = popcounts(sf.n) == d
    return float(np.dot(sf.coeffs[sel], sg.coeffs[sel]))
