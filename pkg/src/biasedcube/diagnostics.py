"""Partition-restricted level sums, exceedance sets, and end-to-end checks of
the level-weight, stability and decoupled bounds on concrete functions.

A partition {I, J} of the coordinates is held as two disjoint bitmasks.  For
j in J the *numerator* of j is

    sum over T subset of I with |T| = d-1 of f^(T + {j})^2,

i.e. the level-d mass whose only representative in J is j.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from .bounds import (
    decoupled_bound,
    decoupled_exceedance_bound,
    exceedance_bound,
    integral_bound_check,
    level_weight_bound,
    partition_bound,
    stability_bound,
)
from .cube import DEFAULT_CAP, BiasedMeasure, CubeFunction, IncompatibleOperandsError, require_exact
from .fourier import Spectrum, cross_level_inner, level_weight, transform
from .influence import NoiseParams, influence_profile, noise_stability_exact
from .reports import VerificationReport


@dataclass(frozen=True)
class Partition:
    n: int
    I: int
    J: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.I & self.J:
            raise ValueError("I and J overlap")
        if (self.I | self.J) != full or self.I < 0 or self.J < 0:
            raise ValueError("I and J must cover exactly the coordinates 1..n")

    @classmethod
    def from_J(cls, n: int, J) -> "Partition":
        """Partition with the given J (mask or iterable of 1-based coordinates)."""
        if not isinstance(J, int):
            J = sum(1 << (j - 1) for j in J)
        return cls(n, ((1 << n) - 1) & ~J, J)

    @property
    def J_coords(self) -> tuple:
        return tuple(k + 1 for k in range(self.n) if (self.J >> k) & 1)

    @property
    def I_coords(self) -> tuple:
        return tuple(k + 1 for k in range(self.n) if (self.I >> k) & 1)


def random_partition(n: int, d: int, seed: int) -> Partition:
    """Each coordinate independently joins J with probability 1/d."""
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = np.random.default_rng(seed)
    inJ = rng.random(n) < 1.0 / d
    J = int.from_bytes(np.packbits(inJ, bitorder="little").tobytes(), "little")
    return Partition.from_J(n, J)


def _numerators(cf: np.ndarray, cg: np.ndarray, part: Partition, d: int) -> np.ndarray:
    """Per-coordinate sums of cf[S] cg[S] over S = T + {j}, T in I, |T| = d-1.

    Entry k of the result belongs to coordinate k+1; entries outside J are 0.
    """
    n = part.n
    S = np.arange(1 << n, dtype=np.uint64)
    SJ = S & np.uint64(part.J)
    SI = S & np.uint64(part.I)
    sel = (np.bitwise_count(SJ) == 1) & (np.bitwise_count(SI) == d - 1)
    j = np.bitwise_count(SJ[sel] - np.uint64(1)).astype(np.int64)
    return np.bincount(j, weights=cf[sel] * cg[sel], minlength=n)


def _check_d(d: int) -> None:
    if d < 2:
        raise ValueError("d must be at least 2")


def _check_partition(f: CubeFunction, part: Partition) -> None:
    if part.n != f.n:
        raise ValueError(f"partition is over {part.n} coordinates, function over {f.n}")


def _spectrum(f: CubeFunction, m: BiasedMeasure, spectrum: Optional[Spectrum]) -> Spectrum:
    return spectrum if spectrum is not None else transform(f, m)


def partition_numerators(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int,
                         spectrum: Optional[Spectrum] = None) -> np.ndarray:
    _check_d(d)
    _check_partition(f, part)
    c = _spectrum(f, m, spectrum).coeffs
    return _numerators(c, c, part, d)


def partition_level_sum(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int,
                        cap: int = DEFAULT_CAP) -> float:
    """Level-d mass on sets with exactly d-1 elements in I and one in J."""
    require_exact(f.n, cap)
    return float(partition_numerators(f, m, part, d).sum())


def _mass_in(values: np.ndarray, part: Partition) -> float:
    keep = np.array([(part.J >> k) & 1 for k in range(part.n)], dtype=bool)
    return float(values[keep].sum())


def partition_rhs(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int):
    """5 (2Be/(d-1))^(d-1) s log(1/s)^(d-1) with s = sum over J of I'_j^2."""
    _check_d(d)
    _check_partition(f, part)
    prof = influence_profile(f, m)
    return partition_bound(d, m.p, _mass_in(prof.normalized**2, part))


def check_partition_inequality(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int,
                               label: str = "") -> VerificationReport:
    lhs = partition_level_sum(f, m, part, d)
    bound = partition_rhs(f, m, part, d)
    return _report("partition_level_sum", dict(p=m.p, d=d, n=f.n, J=part.J, function=label),
                   lhs, bound)


def exceedance_set(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int, t: float) -> frozenset:
    """Coordinates j in J whose numerator exceeds t I'_j(f)^2 (strictly)."""
    if t <= 0:
        raise ValueError("t must be positive")
    num = partition_numerators(f, m, part, d)
    inf2 = influence_profile(f, m).normalized ** 2
    return frozenset(k + 1 for k in range(f.n) if (part.J >> k) & 1 and num[k] > t * inf2[k])


def _report(check: str, params: dict, lhs: float, bound, extra_detail: str = "") -> VerificationReport:
    met = bound.hypothesis_met or bound.trivial
    detail = "; ".join(x for x in (bound.hypothesis_detail, extra_detail) if x)
    return VerificationReport(check, params, float(lhs), float(bound.value), met, detail)


def _range_detail(f: CubeFunction, boolean: bool) -> str:
    if boolean and not f.is_boolean:
        return "function is not 0/1-valued"
    if not boolean and np.abs(f.values).max() > 1.0:
        return "function values leave [-1, 1]"
    return ""


def _apply_range(report: VerificationReport, detail: str) -> VerificationReport:
    if not detail:
        return report
    joined = "; ".join(x for x in (report.hypothesis_detail, detail) if x)
    return VerificationReport(report.check, report.parameters, report.lhs, report.rhs, False, joined)


def check_exceedance_lemma(f: CubeFunction, m: BiasedMeasure, part: Partition, d: int, t: float,
                           label: str = "") -> VerificationReport:
    """sum over L^f_t of I'_j^2 against 5e (t/4)^(-1/(d-1)) B exp(-((d-1)/2Be)(t/4)^(1/(d-1)))."""
    L = exceedance_set(f, m, part, d, t)
    inf2 = influence_profile(f, m).normalized ** 2
    lhs = float(sum(inf2[j - 1] for j in L))
    bound = exceedance_bound(d, m.p, t)
    rep = _report("exceedance_lemma",
                  dict(p=m.p, d=d, t=t, n=f.n, J=part.J, function=label, exceedance_size=len(L)),
                  lhs, bound)
    return _apply_range(rep, _range_detail(f, boolean=True))


def _same_space(f: CubeFunction, g: CubeFunction) -> None:
    if f.n != g.n:
        raise IncompatibleOperandsError(f"dimension mismatch: {f.n} vs {g.n}")


def _unit_mass_detail(wf: float, wg: float) -> str:
    bad = []
    if wf > 1:
        bad.append(f"sum I'(f)^2={wf:.6g} > 1")
    if wg > 1:
        bad.append(f"sum I'(g)^2={wg:.6g} > 1")
    return "; ".join(bad)


def check_decoupled_exceedance(f: CubeFunction, g: CubeFunction, m: BiasedMeasure, part: Partition,
                               d: int, t: float, label: str = "") -> VerificationReport:
    """sum over L_t of I'_j(f) I'_j(g), where L_t uses the products f^ g^."""
    _check_d(d)
    _same_space(f, g)
    _check_partition(f, part)
    if t <= 0:
        raise ValueError("t must be positive")
    num = _numerators(transform(f, m).coeffs, transform(g, m).coeffs, part, d)
    pf, pg = influence_profile(f, m), influence_profile(g, m)
    prod = pf.normalized * pg.normalized
    L = [k for k in range(f.n) if (part.J >> k) & 1 and num[k] > t * prod[k]]
    lhs = float(prod[L].sum()) if L else 0.0
    bound = decoupled_exceedance_bound(d, m.p, t)
    rep = _report("decoupled_exceedance",
                  dict(p=m.p, d=d, t=t, n=f.n, J=part.J, function=label, exceedance_size=len(L)),
                  lhs, bound)
    detail = "; ".join(x for x in (_unit_mass_detail(pf.W, pg.W),
                                   _range_detail(f, True), _range_detail(g, True)) if x)
    return _apply_range(rep, detail)


def check_level_weight_lemma(f: CubeFunction, m: BiasedMeasure, d: int, label: str = "",
                             cap: int = DEFAULT_CAP) -> VerificationReport:
    """Level-d weight of f against the bound driven by W(f)."""
    require_exact(f.n, cap)
    _check_d(d)
    W = influence_profile(f, m).W
    lhs = level_weight(transform(f, m), d) if d <= f.n else 0.0
    bound = level_weight_bound(d, m.p, W)
    rep = _report("level_weight_lemma", dict(p=m.p, d=d, n=f.n, W=W, function=label), lhs, bound)
    return _apply_range(rep, _range_detail(f, boolean=False))


def check_stability_theorem(f: CubeFunction, m: BiasedMeasure, epsilon: float, label: str = "",
                            uniform: bool = False, cap: int = DEFAULT_CAP) -> VerificationReport:
    """S_eps(f) against (6e+1) W^(alpha eps), or 20 W^(0.234 eps) with ``uniform``."""
    lhs = noise_stability_exact(f, NoiseParams(epsilon, m.p), cap)
    W = influence_profile(f, m).W
    bound = stability_bound(epsilon, m.p, W, uniform=uniform)
    name = "stability_theorem_uniform" if uniform else "stability_theorem"
    rep = _report(name, dict(p=m.p, epsilon=epsilon, n=f.n, W=W, function=label), lhs, bound)
    return _apply_range(rep, _range_detail(f, boolean=False))


def check_decoupled_theorem(f: CubeFunction, g: CubeFunction, m: BiasedMeasure, d: int,
                            label: str = "", cap: int = DEFAULT_CAP) -> VerificationReport:
    """sum over |S| = d of f^(S) g^(S) against the decoupled bound in S = sum I'(f) I'(g)."""
    require_exact(f.n, cap)
    _check_d(d)
    _same_space(f, g)
    pf, pg = influence_profile(f, m), influence_profile(g, m)
    S = float(np.dot(pf.normalized, pg.normalized))
    lhs = cross_level_inner(transform(f, m), transform(g, m), d) if d <= f.n else 0.0
    bound = decoupled_bound(d, m.p, S)
    rep = _report("decoupled_theorem",
                  dict(p=m.p, d=d, n=f.n, S=S, W_f=pf.W, W_g=pg.W, function=label), lhs, bound)
    detail = "; ".join(x for x in (_unit_mass_detail(pf.W, pg.W),
                                   _range_detail(f, True), _range_detail(g, True)) if x)
    return _apply_range(rep, detail)


def check_integral_bound(d: int, p: float, t0: float) -> VerificationReport:
    res = integral_bound_check(d, p, t0)
    detail = "" if res.hypothesis_met else "t0 not above (4B(p)e)^((d-1)/2)"
    return VerificationReport("integral_bound", dict(p=p, d=d, t0=t0, rel_error=res.rel_error),
                              res.lhs, res.rhs, res.hypothesis_met, detail)


def partition_average(f: CubeFunction, m: BiasedMeasure, d: int) -> float:
    """Exact expectation of the partition level sum when each coordinate joins J
    with probability 1/d, by enumerating all 2^n partitions."""
    _check_d(d)
    c = transform(f, m).coeffs
    total = 0.0
    for J in range(1 << f.n):
        k = J.bit_count()
        weight = (1 / d) ** k * (1 - 1 / d) ** (f.n - k)
        total += weight * float(_numerators(c, c, Partition.from_J(f.n, J), d).sum())
    return total


def inclusion_probability(d: int) -> float:
    """Probability a fixed d-set has exactly one element in J: ((d-1)/d)^(d-1)."""
    return ((d - 1) / d) ** (d - 1) if d > 1 else math.nan
