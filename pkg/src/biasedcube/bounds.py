"""Closed-form constants and right-hand sides of the level-weight, noise
stability, tail and decoupled bounds, each with its precondition.

All logarithms are natural.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple

from scipy import integrate

E = math.e
STABILITY_PREFACTOR = 6 * E + 1
UNIFORM_PREFACTOR = 20.0
UNIFORM_EXPONENT = 0.234
# log2(e)/2 = 0.7213..., the asymptotic tribes exponent reported next to alpha(eps) eps
COMPARISON_EXPONENT = math.log2(E) / 2

_SERIES_RADIUS = 1e-7


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class BoundResult:
    """Right-hand side of a bound together with whether its precondition holds.

    ``trivial`` marks the degenerate case (zero influence mass) in which the
    bound reads ``lhs <= 0`` and holds for every 0/1-valued function.
    """

    value: float
    hypothesis_met: bool
    hypothesis_detail: str = ""
    trivial: bool = False

    @property
    def applies(self) -> bool:
        return self.hypothesis_met or self.trivial


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"bias p must lie in (0, 1), got {p!r}")
    return p


def _log_odds(p: float) -> float:
    """ln((1-p)/p) without cancellation near p = 1/2."""
    return math.log1p((1.0 - 2.0 * p) / p)


def _canonical(p: float) -> float:
    # max(p, 1-p) is the same float for p and fl(1-p), so B(p) == B(1-p) bit for bit
    return max(p, 1.0 - p)


def hypercontractivity_ratio_form(p: float) -> float:
    """((1-p)/p - p/(1-p)) / (2 ln((1-p)/p)), evaluated stably.

    The numerator is rewritten as (1-2p)/p + (1-2p)/(1-p), which is the same
    number without the cancellation of two nearly equal ratios.
    """
    p = _check_p(p)
    if p == 0.5:
        return 1.0
    delta = 1.0 - 2.0 * p
    return (delta / p + delta / (1.0 - p)) / (2.0 * _log_odds(p))


def hypercontractivity_product_form(p: float) -> float:
    """((1-p) - p) / (2 p (1-p) (ln(1-p) - ln p))."""
    p = _check_p(p)
    if p == 0.5:
        return 1.0
    return (1.0 - 2.0 * p) / (2.0 * p * (1.0 - p) * _log_odds(p))


def hypercontractivity_constant(p: float) -> float:
    """B(p); continuous at p = 1/2 with B(1/2) = 1 and symmetric under p -> 1-p.

    With u = ln((1-p)/p) the expression equals sinh(u)/u, whose series
    1 + u^2/6 is used within 1e-7 of 1/2.
    """
    p = _canonical(_check_p(p))
    if abs(p - 0.5) < _SERIES_RADIUS:
        u = _log_odds(p)
        return 1.0 + u * u / 6.0
    return hypercontractivity_product_form(p)


def tail_bound(d: int, p: float, t: float) -> BoundResult:
    """exp(-d t^(2/d) / (2 B e)) for Pr[|f| >= t], f of degree <= d with ||f||_2 = 1."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    B = hypercontractivity_constant(p)
    threshold = (2 * B * E) ** (d / 2)
    value = math.exp(-d * t ** (2.0 / d) / (2 * B * E)) if t > 0 else 1.0
    if t < threshold:
        return BoundResult(value, False, f"t={t:.6g} below (2B(p)e)^(d/2)={threshold:.6g}")
    return BoundResult(value, True)


def _xlog_power(x: float, d: int, k: int) -> float:
    return x * math.log(d / x) ** k


def level_weight_bound(d: int, p: float, W: float) -> BoundResult:
    """(5e/d) (2Be/(d-1))^(d-1) W log(d/W)^(d-1), valid for 0 < W <= exp(-2(d-1))."""
    if d < 2:
        raise ValueError("level must be at least 2")
    if W < 0:
        raise ValueError("W must be non-negative")
    if W == 0:
        return BoundResult(0.0, False, "W = 0 (constant function)", trivial=True)
    B = hypercontractivity_constant(p)
    value = 5 * E / d * (2 * B * E / (d - 1)) ** (d - 1) * _xlog_power(W, d, d - 1)
    limit = math.exp(-2 * (d - 1))
    if W > limit:
        return BoundResult(value, False, f"W={W:.6g} exceeds exp(-2(d-1))={limit:.6g}")
    return BoundResult(value, True)


def alpha(epsilon: float, p: float) -> float:
    """1 / (eps + log(2Be) + 3 log log(2Be))."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    L = math.log(2 * hypercontractivity_constant(p) * E)
    return 1.0 / (epsilon + L + 3 * math.log(L))


def stability_bound(epsilon: float, p: float, W: float, uniform: bool = False) -> BoundResult:
    """(6e+1) W^(alpha(eps) eps); with ``uniform`` the p = 1/2 form 20 W^(0.234 eps)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if W < 0:
        raise ValueError("W must be non-negative")
    _check_p(p)
    if W == 0:
        return BoundResult(0.0, False, "W = 0 (constant function)", trivial=True)
    if uniform:
        value = UNIFORM_PREFACTOR * W ** (UNIFORM_EXPONENT * epsilon)
        if p != 0.5:
            return BoundResult(value, False, f"uniform variant needs p = 1/2, got {p}")
        return BoundResult(value, True)
    return BoundResult(STABILITY_PREFACTOR * W ** (alpha(epsilon, p) * epsilon), True)


class IntegralCheck(NamedTuple):
    lhs: float
    rhs: float
    hypothesis_met: bool
    holds: bool
    rel_error: float


def _tail_integral_scaled(d: int, B: float, t0: float, rtol: float):
    """int_{t0}^inf t^2 exp(-c (t^k - t0^k)) dt with c = (d-1)/(2Be), k = 2/(d-1).

    Integrated over panels of geometrically growing width, starting from the
    local decay length at t0, until the integrand is below 1e-300.  Each
    panel's absolute tolerance is 1e-3 rtol times the running total.
    """
    c = (d - 1) / (2 * B * E)
    k = 2.0 / (d - 1)
    base = t0**k

    def log_g(t):
        return 2 * math.log(t) - c * (t**k - base)

    def g(t):
        return t * t * math.exp(-c * (t**k - base))

    peak = (2.0 / (c * k)) ** (1.0 / k)
    scale = 1.0 / (c * k * t0 ** (k - 1))
    floor = math.log(1e-300)
    total = err = 0.0
    a, width = t0, scale
    for _ in range(2000):
        b = a + width
        # far-tail panels only need accuracy relative to what is already summed
        val, e = integrate.quad(g, a, b, epsabs=1e-3 * rtol * total, epsrel=rtol / 10, limit=200)
        total += val
        err += e
        if b > peak and log_g(b) < floor:
            break
        a, width = b, width * 2
    else:
        raise QuadratureError("tail integral did not fall below 1e-300")
    return total, err


def integral_bound_check(d: int, p: float, t0: float, rtol: float = 1e-8) -> IntegralCheck:
    """Compare the tail integral of t^2 exp(-((d-1)/2Be) t^(2/(d-1))) from t0 with
    5 B e t0^(3 - 2/(d-1)) exp(-((d-1)/2Be) t0^(2/(d-1))).

    The bound applies for t0 > (4Be)^((d-1)/2).  Both sides share the factor
    exp(-c t0^k), so the comparison is made with that factor removed.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    B = hypercontractivity_constant(p)
    c = (d - 1) / (2 * B * E)
    k = 2.0 / (d - 1)
    scaled, abserr = _tail_integral_scaled(d, B, t0, rtol)
    rel = abserr / scaled if scaled > 0 else 0.0
    if rel > rtol:
        raise QuadratureError(f"relative error {rel:.3g} exceeds {rtol:.3g}")
    rhs_scaled = 5 * B * E * t0 ** (3 - k)
    shared = math.exp(-c * t0**k)
    met = t0 > (4 * B * E) ** ((d - 1) / 2)
    holds = scaled <= rhs_scaled * (1 + 1e-9)
    return IntegralCheck(scaled * shared, rhs_scaled * shared, met, holds, rel)


def partition_bound(d: int, p: float, s: float) -> BoundResult:
    """5 (2Be/(d-1))^(d-1) s log(1/s)^(d-1) with s the influence mass inside J.

    The t0 choice behind this bound needs s <= exp(-2(d-1)); that is the
    precondition reported.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if s < 0:
        raise ValueError("influence mass must be non-negative")
    if s == 0:
        return BoundResult(0.0, False, "no influence inside J", trivial=True)
    B = hypercontractivity_constant(p)
    value = 5 * (2 * B * E / (d - 1)) ** (d - 1) * s * math.log(1 / s) ** (d - 1) if s < 1 else math.inf
    limit = math.exp(-2 * (d - 1))
    if s > limit:
        concave = "inside" if s <= math.exp(-(d - 1)) else "outside"
        return BoundResult(value, False,
                           f"sum_J I'^2={s:.6g} exceeds exp(-2(d-1))={limit:.6g} ({concave} concavity range)")
    return BoundResult(value, True)


def exceedance_threshold(d: int, p: float) -> float:
    """Smallest t for the exceedance-set bounds: 4 (4Be)^(d-1)."""
    return 4 * (4 * hypercontractivity_constant(p) * E) ** (d - 1)


def exceedance_bound(d: int, p: float, t: float) -> BoundResult:
    """5e (t/4)^(-1/(d-1)) B exp(-((d-1)/2Be) (t/4)^(1/(d-1)))."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if t <= 0:
        raise ValueError("t must be positive")
    B = hypercontractivity_constant(p)
    u = (t / 4) ** (1.0 / (d - 1))
    value = 5 * E / u * B * math.exp(-(d - 1) / (2 * B * E) * u)
    threshold = exceedance_threshold(d, p)
    if t < threshold:
        return BoundResult(value, False, f"t={t:.6g} below 4(4B(p)e)^(d-1)={threshold:.6g}")
    return BoundResult(value, True)


def decoupled_exceedance_bound(d: int, p: float, t: float) -> BoundResult:
    """2 sqrt(5e) (t/4)^(-1/(2(d-1))) sqrt(B) exp(-((d-1)/4Be) (t/4)^(1/(d-1)))."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if t <= 0:
        raise ValueError("t must be positive")
    B = hypercontractivity_constant(p)
    u = (t / 4) ** (1.0 / (d - 1))
    value = 2 * math.sqrt(5 * E * B / u) * math.exp(-(d - 1) / (4 * B * E) * u)
    threshold = exceedance_threshold(d, p)
    if t < threshold:
        return BoundResult(value, False, f"t={t:.6g} below 4(4B(p)e)^(d-1)={threshold:.6g}")
    return BoundResult(value, True)


def decoupled_bound(d: int, p: float, S: float) -> BoundResult:
    """(70e/d) (4Be/(d-1))^(d-1) S log(d/S)^(d-1), valid for 0 < S <= exp(-2(d-1)).

    The caller checks the remaining preconditions sum I'(f)^2 <= 1 and
    sum I'(g)^2 <= 1.
    """
    if d < 2:
        raise ValueError("level must be at least 2")
    if S < 0:
        raise ValueError("S must be non-negative")
    if S == 0:
        return BoundResult(0.0, False, "S = 0 (no shared influence)", trivial=True)
    B = hypercontractivity_constant(p)
    value = 70 * E / d * (4 * B * E / (d - 1)) ** (d - 1) * _xlog_power(S, d, d - 1)
    limit = math.exp(-2 * (d - 1))
    if S > limit:
        return BoundResult(value, False, f"S={S:.6g} exceeds exp(-2(d-1))={limit:.6g}")
    return BoundResult(value, True)
