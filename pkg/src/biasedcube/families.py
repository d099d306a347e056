"""Example functions: tribes, dictators, parities, majority, OR/AND and random corpora."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from .cube import DEFAULT_CAP, BiasedMeasure, CubeFunction, require_exact
from .influence import sum_squared_influences
from .montecarlo import Oracle


class GenerationFailure(RuntimeError):
    """A random generator could not meet its target within the attempt budget."""


@dataclass(frozen=True)
class TribesSpec:
    """OR over disjoint tribes of AND over the tribe's coordinates.

    ``layout`` lists the tribes as tuples of 1-based coordinates; by default
    tribe k is the block ``k*r + 1 .. (k+1)*r``.
    """

    n: int
    r: int
    layout: tuple = field(default=None)

    def __post_init__(self):
        if self.r < 1 or self.n < 1:
            raise ValueError("n and r must be positive")
        if self.n % self.r:
            raise ValueError(f"tribe size r={self.r} does not divide n={self.n}")
        if self.layout is None:
            layout = tuple(tuple(range(k * self.r + 1, (k + 1) * self.r + 1))
                           for k in range(self.n // self.r))
        else:
            layout = tuple(tuple(int(i) for i in tribe) for tribe in self.layout)
            flat = sorted(i for tribe in layout for i in tribe)
            if flat != list(range(1, self.n + 1)) or any(len(t) != self.r for t in layout):
                raise ValueError("layout must split 1..n into disjoint tribes of size r")
        object.__setattr__(self, "layout", layout)

    @property
    def tribes(self) -> int:
        return self.n // self.r


def tribes_size_suggestion(n: float, p: float, base: float = math.e) -> float:
    """(log n - log log n + log log(1/p)) / log(1/p), in any logarithm base.

    The value does not depend on ``base``; it is returned unrounded.  For
    p > 1/e the term log log(1/p) is negative and is used as is.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if not 0 < p < 1:
        raise ValueError(f"bias p must lie in (0, 1), got {p!r}")
    if base <= 1:
        raise ValueError("logarithm base must exceed 1")

    def log(x):
        return math.log(x) / math.log(base)

    inv = log(1 / p)
    return (log(n) - log(log(n)) + log(inv)) / inv


def tribes_oracle(spec: TribesSpec) -> Oracle:
    cols = [np.array(t) - 1 for t in spec.layout]

    def evaluate(bits):
        out = np.zeros(bits.shape[0], dtype=bool)
        for c in cols:
            out |= bits[:, c].all(axis=1)
        return out.astype(np.float64)

    return Oracle(spec.n, evaluate, None, f"tribes(n={spec.n},r={spec.r})")


def make_tribes(spec: TribesSpec, cap: int = DEFAULT_CAP):
    """Return ``(oracle, table)``; ``table`` is None when n exceeds the cap."""
    oracle = tribes_oracle(spec)
    if spec.n > cap:
        return oracle, None
    x = np.arange(1 << spec.n, dtype=np.int64)
    out = np.zeros(x.size, dtype=bool)
    for tribe in spec.layout:
        m = sum(1 << (i - 1) for i in tribe)
        out |= (x & m) == m
    return oracle, CubeFunction(out.astype(np.float64))


def tribes(n: int, r: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    require_exact(n, cap)
    return make_tribes(TribesSpec(n, r), cap)[1]


def tribes_expectation(spec: TribesSpec, p: float) -> float:
    """1 - (1 - p^r)^(n/r)."""
    return 1.0 - (1.0 - p**spec.r) ** spec.tribes


def tribes_influence_closed_form(spec: TribesSpec, p: float) -> float:
    """p^(r-1) (1 - p^r)^(n/r - 1), the same for every coordinate."""
    return p ** (spec.r - 1) * (1.0 - p**spec.r) ** (spec.tribes - 1)


def tribes_level_coefficient(spec: TribesSpec, p: float, d: int) -> float:
    """f^(S) for S a set of d coordinates inside one tribe:
    sqrt((1-p)/p)^d p^r (1 - p^r)^(n/r - 1).

    Only points where the rest of S's tribe is all ones and every other tribe
    has a zero contribute, and there f is the AND over S, whose correlation
    with the characters is positive under omega_i(1) = sqrt((1-p)/p).
    """
    if not 1 <= d <= spec.r:
        raise ValueError(f"need 1 <= d <= r={spec.r}, got d={d}")
    return math.sqrt((1 - p) / p) ** d * p**spec.r * (1 - p**spec.r) ** (spec.tribes - 1)


def tightness_restriction(n: int, r: int, p: float, d: int) -> bool:
    """Whether d <= min(1/p, sqrt(r), log n / log log n)."""
    if n <= math.e:
        return False
    return d <= min(1 / p, math.sqrt(r), math.log(n) / math.log(math.log(n)))


def _check_n(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    require_exact(n, cap)


def dictator(n: int, i: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    _check_n(n, cap)
    if not 1 <= i <= n:
        raise IndexError(f"coordinate {i} out of range 1..{n}")
    x = np.arange(1 << n, dtype=np.int64)
    return CubeFunction(((x >> (i - 1)) & 1).astype(np.float64))


def parity(n: int, S, cap: int = DEFAULT_CAP) -> CubeFunction:
    """XOR of the coordinates in S, as a 0/1 function."""
    _check_n(n, cap)
    S = tuple(S)
    if any(not 1 <= i <= n for i in S):
        raise IndexError(f"parity coordinates must lie in 1..{n}")
    mask = sum(1 << (i - 1) for i in set(S))
    x = np.arange(1 << n, dtype=np.uint64)
    return CubeFunction((np.bitwise_count(x & np.uint64(mask)) & 1).astype(np.float64))


def majority(n: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    _check_n(n, cap)
    if n % 2 == 0:
        raise ValueError("majority needs odd n")
    x = np.arange(1 << n, dtype=np.uint64)
    return CubeFunction((np.bitwise_count(x) > n // 2).astype(np.float64))


def or_function(n: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    _check_n(n, cap)
    v = np.ones(1 << n)
    v[0] = 0.0
    return CubeFunction(v)


def and_function(n: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    _check_n(n, cap)
    v = np.zeros(1 << n)
    v[-1] = 1.0
    return CubeFunction(v)


def random_boolean(n: int, density: float, seed: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    """Each point is independently 1 with probability ``density``."""
    _check_n(n, cap)
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    return CubeFunction((rng.random(1 << n) < density).astype(np.float64))


def random_real(n: int, seed: int, cap: int = DEFAULT_CAP) -> CubeFunction:
    """Values uniform on [-1, 1]."""
    _check_n(n, cap)
    rng = np.random.default_rng(seed)
    return CubeFunction(rng.uniform(-1.0, 1.0, 1 << n))


def _random_dnf(n: int, rng: np.random.Generator, p: float) -> np.ndarray:
    """OR of a few random AND terms whose widths make each term rare under mu_p."""
    x = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(x.size, dtype=bool)
    base = max(1, min(n, int(round(math.log(max(n, 2)) / math.log(1 / min(p, 1 - p)))) + 1))
    for _ in range(int(rng.integers(1, 4))):
        width = int(min(n, base + rng.integers(0, 3)))
        coords = rng.choice(n, size=width, replace=False)
        signs = rng.random(width) < 0.5
        term = np.ones(x.size, dtype=bool)
        for c, s in zip(coords, signs):
            bit = ((x >> int(c)) & 1).astype(bool)
            term &= bit if s else ~bit
        out |= term
    return out


def _random_sparse(n: int, rng: np.random.Generator) -> np.ndarray:
    """1 on a handful of random points."""
    out = np.zeros(1 << n, dtype=bool)
    k = int(rng.integers(1, 4))
    out[rng.choice(1 << n, size=min(k, 1 << n), replace=False)] = True
    return out


def random_low_influence(
    n: int,
    W_target: float,
    seed: int,
    p: float = 0.5,
    max_attempts: int = 200,
    cap: int = DEFAULT_CAP,
) -> CubeFunction:
    """A random non-constant 0/1 function with W(f) <= W_target under mu_p.

    Candidates alternate between random DNFs with long terms and functions
    supported on a few points; the first candidate meeting the target is
    returned.
    """
    _check_n(n, cap)
    if W_target <= 0:
        raise ValueError("W_target must be positive")
    m = BiasedMeasure(p)
    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        table = _random_dnf(n, rng, p) if attempt % 2 == 0 else _random_sparse(n, rng)
        if rng.random() < 0.5:
            table = ~table
        f = CubeFunction(table.astype(np.float64))
        W = sum_squared_influences(f, m)
        if 0 < W <= W_target:
            return f
    raise GenerationFailure(f"no candidate with 0 < W <= {W_target} after {max_attempts} attempts")


@dataclass(frozen=True)
class CorpusEntry:
    """A named function with the parameters that regenerate it."""

    name: str
    params: dict
    seed: Optional[int] = None
    function: Optional[CubeFunction] = None

    def to_record(self) -> dict:
        rec = {"name": self.name, "params": dict(self.params), "seed": self.seed}
        if self.function is not None:
            rec["n"] = self.function.n
            rec["table"] = pack_table(self.function)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "CorpusEntry":
        f = unpack_table(rec["table"], rec["n"]) if "table" in rec else None
        return cls(rec["name"], dict(rec["params"]), rec.get("seed"), f)


def pack_table(f: CubeFunction) -> str:
    """Hex string of the 0/1 table, bit x of the packed little-endian bytes = f(x)."""
    if not f.is_boolean:
        raise ValueError("only 0/1-valued tables can be bit-packed")
    return np.packbits(f.values.astype(np.uint8), bitorder="little").tobytes().hex()


def unpack_table(text: str, n: int) -> CubeFunction:
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: 1 << n]
    return CubeFunction(bits.astype(np.float64))


FAMILIES = ("dictator", "parity", "majority", "or", "and", "tribes", "random")


def family_oracle(name: str, n: int, r: Optional[int] = None, seed: int = 0,
                  density: float = 0.5, cap: int = DEFAULT_CAP) -> Oracle:
    """Oracle for a named family.  Dictator and parity oracles read only the
    coordinates they depend on, so they work for very large n."""
    if name == "dictator":
        return Oracle(n, lambda b: b[:, 0].astype(np.float64), (1,), f"dictator(n={n})")
    if name == "parity":
        return Oracle(n, lambda b: (b.sum(axis=1) & 1).astype(np.float64), None, f"parity(n={n})")
    if name == "majority":
        if n % 2 == 0:
            raise ValueError("majority needs odd n")
        return Oracle(n, lambda b: (b.sum(axis=1) > n // 2).astype(np.float64), None, f"majority(n={n})")
    if name == "or":
        return Oracle(n, lambda b: b.any(axis=1).astype(np.float64), None, f"or(n={n})")
    if name == "and":
        return Oracle(n, lambda b: b.all(axis=1).astype(np.float64), None, f"and(n={n})")
    if name == "tribes":
        if r is None:
            raise ValueError("tribes needs a tribe size r")
        return tribes_oracle(TribesSpec(n, r))
    if name == "random":
        return Oracle.from_function(random_boolean(n, density, seed, cap), f"random(n={n},seed={seed})")
    raise KeyError(f"unknown family {name!r}; known families: {', '.join(FAMILIES)}")


def family_function(name: str, n: int, r: Optional[int] = None, seed: int = 0,
                    density: float = 0.5, cap: int = DEFAULT_CAP) -> CubeFunction:
    require_exact(n, cap)
    if name == "dictator":
        return dictator(n, 1, cap)
    if name == "parity":
        return parity(n, range(1, n + 1), cap)
    if name == "majority":
        return majority(n, cap)
    if name == "or":
        return or_function(n, cap)
    if name == "and":
        return and_function(n, cap)
    if name == "tribes":
        if r is None:
            raise ValueError("tribes needs a tribe size r")
        return tribes(n, r, cap)
    if name == "random":
        return random_boolean(n, density, seed, cap)
    raise KeyError(f"unknown family {name!r}; known families: {', '.join(FAMILIES)}")
