"""Command-line driver: spectra, inequality checks, tightness tables and
Monte Carlo estimates, written as JSON lines or CSV.

Settings come from built-in defaults, then an optional flat ``key = value``
config file (``--config``), then command-line flags, later sources winning.
The effective settings are echoed as the header of every output: a first
JSON line ``{"header": {...}}`` or leading ``# key=value`` lines in CSV.

If ``--out`` is not given and ``BIASEDCUBE_OUT_DIR`` is set, output goes to
``$BIASEDCUBE_OUT_DIR/<command>.<jsonl|csv>``; otherwise to stdout.

Exit status: 0 on success, 1 when some check whose hypothesis holds fails,
2 on configuration or I/O errors.
"""
from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
import configparser
import csv
import dataclasses
from dataclasses import dataclass, field
import io
import json
import math
import os
from pathlib import Path
import sys
from typing import Optional

import numpy as np

from . import __version__
from .bounds import (
    COMPARISON_EXPONENT,
    alpha,
    exceedance_threshold,
    hypercontractivity_constant,
    level_weight_bound,
    stability_bound,
)
from .cube import DEFAULT_CAP, BiasedMeasure, CapacityError, CubeFunction, IncompatibleOperandsError, require_exact
from .diagnostics import (
    check_decoupled_exceedance,
    check_decoupled_theorem,
    check_exceedance_lemma,
    check_integral_bound,
    check_level_weight_lemma,
    check_partition_inequality,
    check_stability_theorem,
    random_partition,
)
from .families import FAMILIES, family_function, family_oracle, tightness_restriction
from .fourier import fourier_degree, transform
from .influence import NoiseParams, dictator_stability, influence_profile, noise_stability_exact
from .montecarlo import influence_mc, noise_stability_mc
from .reports import REPORT_SCHEMA, SLACK, to_csv

OUT_DIR_ENV = "BIASEDCUBE_OUT_DIR"
EXHAUSTIVE_MAX_N = 4

CHECKS = ("level_weight", "stability", "stability_uniform", "decoupled", "exceedance",
          "decoupled_exceedance", "partition", "integral")

HEADER_SCHEMA = {
    "type": "object",
    "required": ["header"],
    "additionalProperties": False,
    "properties": {"header": {"type": "object"}},
}

# every line of a JSON report stream matches this
LINE_SCHEMA = {"oneOf": [HEADER_SCHEMA, REPORT_SCHEMA]}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: list = field(default_factory=lambda: [0.5])
    eps: list = field(default_factory=lambda: [0.1])
    d: list = field(default_factory=lambda: [2])
    n: int = 8
    family: str = "tribes"
    r: Optional[int] = 2
    seed: list = field(default_factory=lambda: [0])
    samples: int = 100_000
    format: str = "json"
    out: Optional[str] = None
    cap: int = DEFAULT_CAP
    tol: float = SLACK
    checks: list = field(default_factory=lambda: ["level_weight", "stability"])
    g_family: Optional[str] = None
    t_scale: list = field(default_factory=lambda: [1.0])
    t0_scale: list = field(default_factory=lambda: [1.01, 2.0, 10.0])
    coordinate: int = 1
    density: float = 0.5
    workers: int = 1
    timestamp: Optional[str] = None
    plot_out: Optional[str] = None
    spectrum_out: Optional[str] = None

    def __post_init__(self):
        for name in ("p", "eps", "d", "seed", "checks", "t_scale", "t0_scale"):
            if not getattr(self, name):
                raise ConfigError(f"grid {name!r} is empty")
        if any(not 0 < p < 1 for p in self.p):
            raise ConfigError("every p must lie in (0, 1)")
        if any(not 0 <= e <= 1 for e in self.eps):
            raise ConfigError("every eps must lie in [0, 1]")
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.family not in FAMILIES + ("all",):
            raise ConfigError(f"unknown family {self.family!r}; known families: "
                              f"{', '.join(FAMILIES + ('all',))}")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}; known: {', '.join(CHECKS)}")
        if self.samples < 2:
            raise ConfigError("samples must be at least 2")

    def header(self) -> dict:
        h = dataclasses.asdict(self)
        h["version"] = __version__
        return h


_LISTS = {"p": float, "eps": float, "d": int, "seed": int, "checks": str,
          "t_scale": float, "t0_scale": float}
_SCALARS = {"n": int, "r": int, "samples": int, "cap": int, "tol": float, "coordinate": int,
            "density": float, "workers": int, "family": str, "g_family": str, "format": str,
            "out": str, "timestamp": str, "plot_out": str, "spectrum_out": str}


def _convert(key: str, raw: str):
    if key in _LISTS:
        return [_LISTS[key](x.strip()) for x in raw.split(",") if x.strip()]
    if key in _SCALARS:
        return _SCALARS[key](raw.strip())
    raise ConfigError(f"unknown setting {key!r}")


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    parser.read_string("[run]\n" + text, source=path)
    return {k.replace("-", "_"): _convert(k.replace("-", "_"), v) for k, v in parser["run"].items()}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biasedcube", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "biased Fourier spectrum and level-weight table",
        "check": "run inequality checks over a grid",
        "tightness": "ratio tables for the level-weight and stability bounds",
        "estimate": "Monte Carlo noise stability and influence",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="flat key = value settings file")
        sp.add_argument("--p", help="comma-separated biases")
        sp.add_argument("--eps", help="comma-separated noise rates")
        sp.add_argument("--d", help="comma-separated levels")
        sp.add_argument("--n", help="number of coordinates")
        sp.add_argument("--family", help=f"one of {', '.join(FAMILIES)}, or 'all' (every Boolean function)")
        sp.add_argument("--r", help="tribe size")
        sp.add_argument("--seed", help="comma-separated seeds")
        sp.add_argument("--samples", help="Monte Carlo sample budget")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--out", help="output file")
        sp.add_argument("--cap", help="largest n for exact computation")
        sp.add_argument("--tol", help="relative slack for lhs <= rhs")
        sp.add_argument("--checks", help=f"comma-separated subset of {', '.join(CHECKS)}")
        sp.add_argument("--g-family", dest="g_family", help="second function for decoupled checks")
        sp.add_argument("--t-scale", dest="t_scale", help="exceedance t as multiples of the threshold")
        sp.add_argument("--t0-scale", dest="t0_scale", help="integral t0 as multiples of (4Be)^((d-1)/2)")
        sp.add_argument("--coordinate", help="coordinate for the influence estimate")
        sp.add_argument("--density", help="density of the random family")
        sp.add_argument("--workers", help="threads for grid points and sampling")
        sp.add_argument("--timestamp", help="fixed timestamp for report lines")
        sp.add_argument("--plot-out", dest="plot_out", help="plot-data CSV (tightness)")
        sp.add_argument("--spectrum-out", dest="spectrum_out", help="serialized spectrum (spectrum)")
    return ap


def resolve_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    settings = read_config_file(ns.pop("config")) if "config" in ns else {}
    for key, raw in ns.items():
        settings[key] = _convert(key, raw)
    return RunConfig(command=command, **settings)


# ---------------------------------------------------------------- output


def default_out(cfg: RunConfig) -> Optional[Path]:
    if cfg.out:
        return Path(cfg.out)
    base = os.environ.get(OUT_DIR_ENV)
    if base:
        return Path(base) / f"{cfg.command}.{'jsonl' if cfg.format == 'json' else 'csv'}"
    return None


def _sibling(cfg: RunConfig, explicit: Optional[str], suffix: str) -> Optional[Path]:
    if explicit:
        return Path(explicit)
    out = default_out(cfg)
    return out.with_name(out.stem + suffix) if out is not None else None


def _write(path: Optional[Path], text, binary: bool = False) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if binary:
            path.write_bytes(text)
        else:
            path.write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return _clean(v.item())
    return v


def render_rows(cfg: RunConfig, rows: list, columns: list) -> str:
    """Header plus plain rows, as JSON lines or CSV."""
    if cfg.format == "json":
        lines = [json.dumps({"header": cfg.header()})]
        lines += [json.dumps({k: _clean(r.get(k)) for k in columns}) for r in rows]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    for k, v in cfg.header().items():
        buf.write(f"# {k}={json.dumps(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if _clean(r.get(k)) is None else _clean(r.get(k)) for k in columns])
    return buf.getvalue()


def render_reports(cfg: RunConfig, reports: list, timestamp: str) -> str:
    if cfg.format == "json":
        lines = [json.dumps({"header": cfg.header()})]
        lines += [json.dumps(r.to_record(timestamp)) for r in reports]
        return "\n".join(lines) + "\n"
    head = "".join(f"# {k}={json.dumps(v)}\n" for k, v in cfg.header().items())
    return head + to_csv(reports, timestamp)


def _timestamp(cfg: RunConfig) -> str:
    if cfg.timestamp:
        return cfg.timestamp
    from datetime import datetime, timezone
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _ordered_map(fn, items: list, workers: int) -> list:
    """Map in grid order; the result order never depends on completion order."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- functions


def _functions(cfg: RunConfig, seed: int):
    """(label, function) pairs for the configured family."""
    if cfg.family == "all":
        if cfg.n > EXHAUSTIVE_MAX_N:
            raise ConfigError(f"family 'all' enumerates 2^(2^n) functions; needs n <= {EXHAUSTIVE_MAX_N}")
        size = 1 << cfg.n
        for k in range(1 << size):
            bits = np.array([(k >> x) & 1 for x in range(size)], dtype=np.float64)
            yield f"all[{k}]", CubeFunction(bits)
        return
    f = family_function(cfg.family, cfg.n, cfg.r, seed, cfg.density, cfg.cap)
    yield _label(cfg.family, cfg, seed), f


def _label(family: str, cfg: RunConfig, seed: int) -> str:
    if family == "tribes":
        return f"tribes(n={cfg.n},r={cfg.r})"
    if family == "random":
        return f"random(n={cfg.n},seed={seed})"
    return f"{family}(n={cfg.n})"


def _seeds(cfg: RunConfig) -> list:
    # only the random family depends on the seed
    return cfg.seed if cfg.family == "random" else cfg.seed[:1]


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg: RunConfig):
    require_exact(cfg.n, cfg.cap)
    seed = cfg.seed[0]
    rows, blobs = [], []
    label, f = next(_functions(cfg, seed)) if cfg.family != "all" else (None, None)
    if f is None:
        raise ConfigError("spectrum needs a single function, not family 'all'")
    for p in cfg.p:
        s = transform(f, BiasedMeasure(p))
        blobs.append(s)
        for d, w in enumerate(s.level_weights()):
            rows.append(dict(function=label, p=p, d=d, level_weight=float(w),
                             degree=fourier_degree(s, cfg.tol)))
    text = render_rows(cfg, rows, ["function", "p", "d", "level_weight", "degree"])
    spath = _sibling(cfg, cfg.spectrum_out, ".spectrum" + (".bin" if cfg.format == "json" else ".csv"))
    if spath is not None:
        if cfg.format == "json":
            _write(spath, b"".join(s.to_bytes() for s in blobs), binary=True)
        else:
            _write(spath, "".join(s.to_csv() for s in blobs))
    return text, False


def _check_tasks(cfg: RunConfig):
    """Grid points in a fixed order; each is a zero-argument callable."""
    tasks = []
    if "integral" in cfg.checks:
        for d in cfg.d:
            for p in cfg.p:
                for scale in cfg.t0_scale:
                    t0 = scale * (4 * hypercontractivity_constant(p) * math.e) ** ((d - 1) / 2)
                    tasks.append(lambda d=d, p=p, t0=t0: [check_integral_bound(d, p, t0)])
    function_checks = [c for c in cfg.checks if c != "integral"]
    if not function_checks:
        return tasks
    require_exact(cfg.n, cfg.cap)
    for seed in _seeds(cfg):
        for label, f in _functions(cfg, seed):
            g = f
            if cfg.g_family:
                g = family_function(cfg.g_family, cfg.n, cfg.r, seed + 1, cfg.density, cfg.cap)
            for p in cfg.p:
                tasks.append(lambda f=f, g=g, p=p, label=label, seed=seed:
                             _function_checks(cfg, function_checks, f, g, p, label, seed))
    return tasks


def _function_checks(cfg, checks, f, g, p, label, seed) -> list:
    m = BiasedMeasure(p)
    out = []
    for name in checks:
        if name in ("stability", "stability_uniform"):
            for eps in cfg.eps:
                out.append(check_stability_theorem(f, m, eps, label, uniform=name == "stability_uniform",
                                                   cap=cfg.cap))
            continue
        for d in cfg.d:
            if name == "level_weight":
                out.append(check_level_weight_lemma(f, m, d, label, cfg.cap))
            elif name == "decoupled":
                out.append(check_decoupled_theorem(f, g, m, d, label, cfg.cap))
            elif name == "partition":
                out.append(check_partition_inequality(f, m, random_partition(f.n, d, seed), d, label))
            else:
                part = random_partition(f.n, d, seed)
                for scale in cfg.t_scale:
                    t = scale * exceedance_threshold(d, p)
                    if name == "exceedance":
                        out.append(check_exceedance_lemma(f, m, part, d, t, label))
                    else:
                        out.append(check_decoupled_exceedance(f, g, m, part, d, t, label))
    return out


def cmd_check(cfg: RunConfig):
    results = _ordered_map(lambda task: task(), _check_tasks(cfg), cfg.workers)
    reports = [dataclasses.replace(r, tolerance=cfg.tol) for batch in results for r in batch]
    failed = any(r.hypothesis_met and not r.passed for r in reports)
    return render_reports(cfg, reports, _timestamp(cfg)), failed


TIGHTNESS_COLUMNS = [
    "kind", "function", "p", "d", "epsilon", "W", "hypothesis_met", "restriction_met", "degenerate",
    "level_weight", "level_weight_rhs", "level_ratio", "stability", "stability_rhs", "theorem_holds",
    "log_stability", "alpha_eps_log_W", "log_ratio", "empirical_exponent", "alpha_eps",
    "comparison_exponent",
]


def cmd_tightness(cfg: RunConfig):
    require_exact(cfg.n, cfg.cap)
    if cfg.family == "all":
        raise ConfigError("tightness needs a single function, not family 'all'")
    label, f = next(_functions(cfg, cfg.seed[0]))
    rows, plot, failed = [], [], False
    for p in cfg.p:
        m = BiasedMeasure(p)
        s = transform(f, m)
        levels = s.level_weights()
        degenerate = int(np.count_nonzero(levels[1:] > cfg.tol)) <= 1
        W = influence_profile(f, m).W
        r = cfg.r if cfg.family == "tribes" else cfg.n
        for d in cfg.d:
            lw = float(levels[d]) if d <= f.n else 0.0
            bound = level_weight_bound(d, p, W)
            ok = bound.value >= lw * (1 - cfg.tol) if bound.hypothesis_met else True
            failed |= not ok
            rows.append(dict(kind="level_weight", function=label, p=p, d=d, W=W,
                             hypothesis_met=bound.hypothesis_met,
                             restriction_met=tightness_restriction(cfg.n, r, p, d), degenerate=degenerate,
                             level_weight=lw, level_weight_rhs=bound.value,
                             level_ratio=lw / bound.value if bound.value > 0 else math.nan,
                             theorem_holds=ok))
        for eps in cfg.eps:
            S = noise_stability_exact(f, NoiseParams(eps, p), cfg.cap)
            bound = stability_bound(eps, p, W)
            ok = S <= bound.value * (1 + cfg.tol) if bound.hypothesis_met else True
            failed |= not ok
            ae = alpha(eps, p) * eps
            log_s = math.log(S) if S > 0 else -math.inf
            log_w = math.log(W) if W > 0 else -math.inf
            exponent = log_s / log_w if (S > 0 and 0 < W < 1) else math.nan
            rows.append(dict(kind="stability", function=label, p=p, epsilon=eps, W=W,
                             hypothesis_met=bound.hypothesis_met, degenerate=degenerate,
                             stability=S, stability_rhs=bound.value, theorem_holds=ok,
                             log_stability=log_s, alpha_eps_log_W=ae * log_w,
                             log_ratio=log_s / (ae * log_w) if math.isfinite(exponent) else math.nan,
                             empirical_exponent=exponent, alpha_eps=ae,
                             comparison_exponent=COMPARISON_EXPONENT))
            plot.append(dict(x=eps, y=exponent, series=f"empirical_exponent p={p}"))
            plot.append(dict(x=eps, y=ae, series=f"alpha_eps p={p}"))
            plot.append(dict(x=eps, y=COMPARISON_EXPONENT, series="comparison_exponent"))
    ppath = _sibling(cfg, cfg.plot_out, ".plot.csv")
    if ppath is not None:
        _write(ppath, plot_csv(plot))
    return render_rows(cfg, rows, TIGHTNESS_COLUMNS), failed


def plot_csv(points: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "series"])
    for pt in points:
        w.writerow([pt["x"], "" if _clean(pt["y"]) is None else pt["y"], pt["series"]])
    return buf.getvalue()


ESTIMATE_COLUMNS = ["quantity", "function", "n", "p", "epsilon", "coordinate", "samples", "seed",
                    "value", "stderr", "exact", "z"]


def _exact_stability(cfg: RunConfig, f: Optional[CubeFunction], p: float, eps: float):
    if cfg.family == "dictator":
        return dictator_stability(p, eps)
    if f is not None:
        return noise_stability_exact(f, NoiseParams(eps, p), cfg.cap)
    return None


def cmd_estimate(cfg: RunConfig):
    """Sampled noise stability per (p, eps, seed) and the influence of one coordinate.

    Reports carry no timestamp, so equal settings give identical bytes.
    """
    rows = []
    for seed in cfg.seed:
        oracle = family_oracle(cfg.family, cfg.n, cfg.r, seed, cfg.density, cfg.cap)
        exact_f = family_function(cfg.family, cfg.n, cfg.r, seed, cfg.density, cfg.cap) \
            if cfg.n <= min(cfg.cap, 16) else None
        for p in cfg.p:
            for eps in cfg.eps:
                est = noise_stability_mc(oracle, cfg.n, NoiseParams(eps, p), cfg.samples, seed, cfg.workers)
                exact = _exact_stability(cfg, exact_f, p, eps)
                rows.append(dict(quantity="noise_stability", function=oracle.name, n=cfg.n, p=p,
                                 epsilon=eps, samples=cfg.samples, seed=seed, value=est.value,
                                 stderr=est.stderr, exact=exact, z=_z(est, exact)))
            m = BiasedMeasure(p)
            est = influence_mc(oracle, cfg.n, m, cfg.coordinate, cfg.samples, seed, cfg.workers)
            exact = None
            if exact_f is not None:
                exact = float(influence_profile(exact_f, m).influences[cfg.coordinate - 1])
            elif cfg.family == "dictator":
                exact = 1.0 if cfg.coordinate == 1 else 0.0
            rows.append(dict(quantity="influence", function=oracle.name, n=cfg.n, p=p,
                             coordinate=cfg.coordinate, samples=cfg.samples, seed=seed,
                             value=est.value, stderr=est.stderr, exact=exact, z=_z(est, exact)))
    return render_rows(cfg, rows, ESTIMATE_COLUMNS), False


def _z(est, exact):
    if exact is None:
        return None
    if est.stderr == 0:
        return 0.0 if est.value == exact else math.inf
    return (est.value - exact) / est.stderr


COMMANDS = {"spectrum": cmd_spectrum, "check": cmd_check, "tightness": cmd_tightness,
            "estimate": cmd_estimate}


def run(cfg: RunConfig) -> int:
    text, failed = COMMANDS[cfg.command](cfg)
    _write(default_out(cfg), text)
    return 1 if failed else 0


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        return run(cfg)
    except (ConfigError, CapacityError, IncompatibleOperandsError, KeyError, ValueError, OSError,
            configparser.Error) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"biasedcube: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
