"""Command-line experiment runner.

``newsvendor-arena run [CONFIG] [--preset NAME] [--out DIR] [--seed S] [--runs R] [--horizon T]``
runs an experiment and writes ``runs.csv``, ``trace.csv``, ``plot.svg`` and
``manifest.ini`` into the output directory. ``newsvendor-arena validate``
resolves a configuration without running it.

Configurations are INI files. A preset is loaded first when given and the
file's sections override it key by key; command-line flags override both.

Exit codes: 0 success, 1 configuration error, 2 runtime error. The
``NEWSVENDOR_WORKERS`` environment variable sets the number of worker
processes.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .arena import aggregate, derive_seed, policy_tag, simulate, worker_count
from .core import ActionGrid, CostParams
from .demand import KINDS as DEMAND_KINDS
from .demand import DemandGenerator, generate
from .multi import (AllocationSpace, ChainParams, CombinatorialEWF, best_fixed_allocation,
                    run_chain)
from .policies import POLICY_KINDS, make_policy

METRICS = ("regret", "cumulative-cost", "expected-regret")
CHAIN_POLICY = "combinatorial-ewf"


class ConfigError(ValueError):
    pass


PRESETS = {
    "fig1": """
[experiment]
horizon = 100000
runs = 100
seed = 20240101
metric = regret
benchmark = fixed
[costs]
h = 1
b = 1
[grid]
levels = 1..30
D = 30
[demand]
kind = iid-binomial
trials = 30
prob = 0.5
[policy.ewf]
[policy.fsf]
[policy.aee]
[policy.aim]
[policy.ewf-full]
[policy.greedy-full]
[policy.aim-full]
""",
    "fig2": """
[experiment]
horizon = 100000
runs = 100
seed = 20240102
metric = cumulative-cost
benchmark = fixed
[costs]
h = 1
b = 1
[grid]
levels = 1..30
D = 30
[demand]
kind = shifted-binomial
trials = 30
prob = 0.5
prob_low = 0.1
[policy.ewf]
[policy.fsf]
switches = 3
[policy.aee]
[policy.aim]
[policy.ewf-full]
[policy.fsf-full]
switches = 3
[policy.greedy-full]
[policy.aim-full]
""",
    "aim-demo": """
[experiment]
horizon = 10000
runs = 100
seed = 20240103
metric = regret
benchmark = fixed
[costs]
h = 1
b = 1
[grid]
levels = 0,1,2
D = 2
[demand]
kind = constant
value = 1
[policy.aim]
[policy.aim-unbiased]
""",
    "combinatorial-demo": """
[experiment]
horizon = 10000
runs = 20
seed = 20240104
metric = regret
benchmark = fixed
[grid]
levels = 0,1,2
D = 2
[chain]
r = 3
f = 0,0
h = 1,1
b = 1,1
f0 = 0
h0 = 1
[demand]
kind = constant
value = 1,2
[policy.combinatorial-ewf]
""",
}


# ---------------------------------------------------------------------------
# configuration


@dataclass
class PolicySpec:
    name: str
    kind: str
    options: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    horizon: int
    runs: int
    seed: int
    metric: str
    benchmark: object
    grid: ActionGrid
    demand: list
    policies: list
    costs: Optional[CostParams] = None
    chain: Optional[ChainParams] = None
    information: Optional[str] = None
    shared_demand: bool = True
    downsample: int = 0
    out: str = "out"
    source: configparser.ConfigParser = None

    @property
    def is_chain(self) -> bool:
        return self.chain is not None

    @property
    def stride(self) -> int:
        return self.downsample or max(1, self.horizon // 1000)


def _get(section, key, conv, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"[{section.name}] missing '{key}'")
        return default
    raw = section[key].strip()
    try:
        return conv(raw)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"[{section.name}] {key} = {raw!r}: {err}") from None


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(" ", "").split(",") if x]


def _parse_levels(text: str) -> list[int]:
    text = text.replace(" ", "")
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return _int_list(text)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _benchmark(text: str):
    text = text.strip().lower()
    if text == "fixed":
        return "fixed"
    if text.startswith("switching"):
        S = int(text.split(":", 1)[1]) if ":" in text else 0
        if S < 0:
            raise ValueError("switch budget must be nonnegative")
        return ("switching", S)
    raise ValueError("expected 'fixed' or 'switching:S'")


def _auto_float(text: str):
    return None if text.lower() == "auto" else float(text)


_POLICY_KEYS = {
    "gamma": _auto_float, "eta": _auto_float, "alpha": _auto_float,
    "switches": int, "schedule": str, "step_scale": _auto_float, "x0": float, "level": int,
    "exploration_periods": _int_list,
}


def load_config(path: Optional[str] = None, preset: Optional[str] = None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; known: {', '.join(PRESETS)}")
        cp.read_string(PRESETS[preset])
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {path} not found")
        try:
            cp.read_string(p.read_text(), source=str(p))
        except configparser.Error as err:
            raise ConfigError(str(err)) from None
    if preset is None and path is None:
        raise ConfigError("give a config file or --preset")
    return cp


def parse_config(cp: configparser.ConfigParser, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Resolve an INI configuration into an :class:`ExperimentConfig`; raises :class:`ConfigError`."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    ex = cp["experiment"]
    T = overrides.get("horizon", _get(ex, "horizon", int, required=True))
    R = overrides.get("runs", _get(ex, "runs", int, 1))
    seed = overrides.get("seed", _get(ex, "seed", int, 0))
    if T < 1:
        raise ConfigError("horizon must be positive")
    if R < 1:
        raise ConfigError("runs must be at least 1")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    metric = _get(ex, "metric", str, "regret")
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; known: {', '.join(METRICS)}")
    bench = _get(ex, "benchmark", _benchmark, "fixed")
    info = _get(ex, "information", str, None)
    if info is not None and info not in ("censored", "partially-censored", "full"):
        raise ConfigError(f"unknown information mode {info!r}")
    shared = _get(ex, "shared_demand", _bool, True)
    downsample = _get(ex, "downsample", int, 0)
    if downsample < 0:
        raise ConfigError("downsample must be nonnegative")

    if "grid" not in cp:
        raise ConfigError("missing [grid] section")
    g = cp["grid"]
    levels = _get(g, "levels", _parse_levels, required=True)
    D = _get(g, "D", int, max(levels) if levels else 0)
    try:
        grid = ActionGrid(levels, D)
    except ValueError as err:
        raise ConfigError(f"[grid] {err}") from None

    chain = costs = None
    if "chain" in cp:
        c = cp["chain"]
        try:
            chain = ChainParams(
                grid, _get(c, "r", int, required=True), _get(c, "f", _float_list, required=True),
                _get(c, "h", _float_list, required=True), _get(c, "b", _float_list, required=True),
                _get(c, "f0", float, 0.0), _get(c, "h0", float, required=True),
                pull=_get(c, "pull", _bool, False), fill_level=_get(c, "fill_level", int, None),
                cap=_get(c, "cap", int, 200_000))
        except ValueError as err:
            raise ConfigError(f"[chain] {err}") from None
        if metric == "expected-regret" or bench != "fixed":
            raise ConfigError("the multi-retailer experiment supports the fixed benchmark with "
                              "regret or cumulative-cost only")
    else:
        if "costs" not in cp:
            raise ConfigError("missing [costs] section")
        c = cp["costs"]
        try:
            costs = CostParams(_get(c, "h", float, required=True), _get(c, "b", float, required=True), D)
        except ValueError as err:
            raise ConfigError(f"[costs] {err}") from None

    demand = _parse_demand(cp, T, D, chain.K if chain else None)
    policies = _parse_policies(cp, chain is not None)
    if isinstance(bench, tuple) and bench[1] >= T:
        raise ConfigError("switch budget must be below the horizon")
    cfg = ExperimentConfig(T, R, seed, metric, bench, grid, demand, policies, costs, chain, info,
                           shared, downsample, overrides.get("out", _get(ex, "out", str, "out")), cp)
    build_policies(cfg)  # surfaces option errors now
    return cfg


def _parse_demand(cp, T: int, D: int, K: Optional[int]) -> list:
    if "demand" not in cp:
        raise ConfigError("missing [demand] section")
    d = cp["demand"]
    kind = _get(d, "kind", str, required=True)
    if kind not in DEMAND_KINDS:
        raise ConfigError(f"unknown demand kind {kind!r}; known: {', '.join(DEMAND_KINDS)}")
    window = _get(d, "window", _int_list, None)
    if window is not None and (len(window) != 2 or not 1 <= window[0] <= window[1] <= T):
        raise ConfigError("[demand] window needs two periods 1 <= t1 <= t2 <= horizon")
    values = _get(d, "value", _int_list, [0])
    count = K or 1
    if kind == "constant" and len(values) not in (1, count):
        raise ConfigError(f"[demand] value needs 1 or {count} entries")
    if len(values) == 1:
        values = values * count
    if kind == "scripted" and K is not None:
        raise ConfigError("scripted demand is single-retailer only")
    try:
        return [DemandGenerator(kind, T, D, trials=_get(d, "trials", int, min(30, D)),
                                prob=_get(d, "prob", float, 0.5), prob_low=_get(d, "prob_low", float, 0.1),
                                window=tuple(window) if window else None, value=values[k],
                                path=_get(d, "path", str, None))
                for k in range(count)]
    except ValueError as err:
        raise ConfigError(f"[demand] {err}") from None


def _parse_policies(cp, chain: bool) -> list:
    specs = []
    for sec in cp.sections():
        if not sec.startswith("policy."):
            continue
        name = sec[len("policy."):]
        s = cp[sec]
        kind = _get(s, "kind", str, name)
        known = (CHAIN_POLICY,) if chain else POLICY_KINDS
        if kind not in known:
            raise ConfigError(f"[{sec}] unknown policy {kind!r}; known: {', '.join(known)}")
        opts = {}
        for key in s:
            if key == "kind":
                continue
            if key not in _POLICY_KEYS:
                raise ConfigError(f"[{sec}] unknown option {key!r}")
            val = _get(s, key, _POLICY_KEYS[key])
            if val is not None:
                opts[key] = val
        specs.append(PolicySpec(name, kind, opts))
    if not specs:
        raise ConfigError("no [policy.NAME] sections")
    return specs


def build_policies(cfg: ExperimentConfig) -> list:
    out = []
    for spec in cfg.policies:
        try:
            if cfg.is_chain:
                opts = dict(spec.options)
                pol = CombinatorialEWF(cfg.chain, cfg.horizon, opts.pop("gamma", None), opts.pop("eta", None))
                if opts:
                    raise ValueError(f"unexpected options for {spec.kind}: {sorted(opts)}")
                pol.name = spec.name
            else:
                pol = make_policy(spec.kind, cfg.grid, cfg.costs, cfg.horizon, name=spec.name, **spec.options)
        except (ValueError, KeyError) as err:
            raise ConfigError(f"[policy.{spec.name}] {err}") from None
        out.append(pol)
    return out


# ---------------------------------------------------------------------------
# running


@dataclass
class Results:
    traces: list
    rows: list  # (policy, run, t-array, level strings, demand strings, cost, cum_cost)
    resolved: dict


def _fmt(x) -> str:
    return format(float(x), ".9g")


def run_single(cfg: ExperimentConfig, workers: Optional[int] = None) -> Results:
    policies = build_policies(cfg)
    gen = cfg.demand[0]
    recs = simulate(policies, gen, cfg.runs, cfg.seed, cfg.information, cfg.shared_demand,
                    record_expected=cfg.metric == "expected-regret", workers=workers)
    cache: dict = {}
    traces, rows = [], []
    idx = _sample_periods(cfg)
    for pol in policies:
        rs = recs[pol.name]
        traces.append(aggregate(rs, cfg.grid, cfg.benchmark, cfg.metric, _cache=cache))
        for rec in rs:
            costs = rec.costs
            rows.append((pol.name, rec.run, idx + 1, rec.levels[idx], rec.demands[idx], costs[idx],
                         np.cumsum(costs)[idx]))
    return Results(traces, rows, {p.name: {"kind": s.kind, **p.parameters()}
                                  for p, s in zip(policies, cfg.policies)})


def _chain_demands(cfg: ExperimentConfig, runs: Sequence[int]) -> np.ndarray:
    out = np.empty((len(runs), cfg.horizon, cfg.chain.K), dtype=np.int64)
    for n, r in enumerate(runs):
        for k, gen in enumerate(cfg.demand):
            out[n, :, k] = generate(gen, derive_seed(cfg.seed, r, 0, k))
    return out


def run_multi(cfg: ExperimentConfig) -> Results:
    from .arena import RegretTrace

    policies = build_policies(cfg)
    runs = list(range(cfg.runs))
    demands = _chain_demands(cfg, runs)
    idx = _sample_periods(cfg)
    traces, rows, resolved = [], [], {}
    for pol, spec in zip(policies, cfg.policies):
        seeds = [derive_seed(cfg.seed, r, 1, policy_tag(pol.name)) for r in runs]
        recs = run_chain(pol, demands, seeds, runs)
        space: AllocationSpace = pol.space
        curves = []
        for rec in recs:
            if cfg.metric == "regret":
                curves.append(rec.cum_costs - best_fixed_allocation(rec.demands, space)[1])
            else:
                curves.append(rec.cum_costs)
            lv = space.levels[rec.allocations]
            rows.append((pol.name, rec.run, idx + 1, ["|".join(map(str, x)) for x in lv[idx]],
                         ["|".join(map(str, x)) for x in rec.demands[idx]], rec.costs[idx],
                         rec.cum_costs[idx]))
        curves = np.stack(curves)
        traces.append(RegretTrace(pol.name, curves.mean(axis=0), curves.std(axis=0), len(recs), cfg.metric))
        resolved[pol.name] = {"kind": spec.kind, **pol.parameters()}
    return Results(traces, rows, resolved)


def _sample_periods(cfg: ExperimentConfig) -> np.ndarray:
    k = cfg.stride
    idx = np.arange(k - 1, cfg.horizon, k)
    if idx.size == 0 or idx[-1] != cfg.horizon - 1:
        idx = np.append(idx, cfg.horizon - 1)
    return idx


def write_outputs(cfg: ExperimentConfig, res: Results, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "runs.csv", "w", newline="") as fh:
        fh.write("policy,run,t,level,demand,cost,cum_cost\n")
        for name, run, ts, lv, dm, cost, cum in res.rows:
            fh.writelines(f"{name},{run},{t},{a},{d},{_fmt(c)},{_fmt(s)}\n"
                          for t, a, d, c, s in zip(ts, lv, dm, cost, cum))
    with open(out / "trace.csv", "w", newline="") as fh:
        fh.write("policy,t,mean,std\n")
        for tr in res.traces:
            fh.writelines(f"{tr.policy},{t},{_fmt(m)},{_fmt(s)}\n"
                          for t, m, s in zip(range(1, tr.mean.size + 1), tr.mean, tr.std))
    ylabel = {"regret": "regret", "expected-regret": "expected regret",
              "cumulative-cost": "cumulative cost"}[cfg.metric]
    (out / "plot.svg").write_text(render_svg(res.traces, ylabel))
    write_manifest(cfg, res.resolved, out / "manifest.ini")


def write_manifest(cfg: ExperimentConfig, resolved: dict, path: Path) -> None:
    m = configparser.ConfigParser(interpolation=None)
    m.optionxform = str
    for sec in cfg.source.sections():
        m[sec] = dict(cfg.source[sec])
    ex = m["experiment"]
    ex["horizon"], ex["runs"], ex["seed"] = str(cfg.horizon), str(cfg.runs), str(cfg.seed)
    ex["downsample"] = str(cfg.stride)
    for name, params in resolved.items():
        m[f"resolved.{name}"] = {k: (repr(v) if isinstance(v, float) else str(v)) for k, v in params.items()}
    m["package"] = {"version": __version__}
    with open(path, "w") as fh:
        m.write(fh)


# ---------------------------------------------------------------------------
# plotting

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def _tick_label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e5 or abs(v) < 1e-2):
        return f"{v:.1e}"
    return f"{v:g}"


def render_svg(traces, ylabel: str, width: int = 760, height: int = 480, points: int = 600) -> str:
    """Mean curves with shaded one-standard-deviation bands, as a standalone SVG document."""
    left, right, top, bottom = 80, 170, 20, 50
    pw, ph = width - left - right, height - top - bottom
    T = max(tr.mean.size for tr in traces)
    lo = min(float((tr.mean - tr.std).min()) for tr in traces)
    hi = max(float((tr.mean + tr.std).max()) for tr in traces)
    lo = min(lo, 0.0)
    if hi <= lo:
        hi = lo + 1.0

    def sx(t):
        return left + pw * (t - 1) / max(T - 1, 1)

    def sy(v):
        return top + ph * (1 - (v - lo) / (hi - lo))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    for v in _nice_ticks(lo, hi):
        y = sy(v)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">{_tick_label(v)}</text>')
    for v in _nice_ticks(1, T):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{_tick_label(v)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">period t</text>')
    out.append(f'<text transform="translate(18,{top + ph / 2}) rotate(-90)" text-anchor="middle">{ylabel}</text>')
    for n, tr in enumerate(traces):
        color = PALETTE[n % len(PALETTE)]
        idx = np.unique(np.linspace(0, tr.mean.size - 1, min(points, tr.mean.size)).astype(int))
        t = idx + 1
        upper = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, tr.mean[idx] + tr.std[idx]))
        lower = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t[::-1], (tr.mean[idx] - tr.std[idx])[::-1]))
        out.append(f'<polygon points="{upper} {lower}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
        line = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, tr.mean[idx]))
        out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = top + 14 + 18 * n
        out.append(f'<line x1="{left + pw + 12}" y1="{ly - 4}" x2="{left + pw + 32}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly}">{tr.policy}</text>')
    out.append("</svg>\n")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# entry points


def estimate_cost(cfg: ExperimentConfig) -> tuple[float, float]:
    """Rough ``(megabytes, seconds)`` for a run, from measured per-period throughput."""
    P, R, T = len(cfg.policies), cfg.runs, cfg.horizon
    if cfg.is_chain:
        A = AllocationSpace(cfg.chain).A
        seconds = R * T * P * (3e-7 + 2e-8 * A * cfg.chain.K)
        mb = (R * T * (cfg.chain.K * 8 + 4 + 8) * P + A * R * 8 * 4) / 1e6
    else:
        seconds = R * T * P * (2e-7 + 3e-8 * cfg.grid.N)
        mb = (R * T * (8 + 2 * P) + 3 * 8 * T * P + R * T * 8 * 2) / 1e6
    rows = P * R * len(_sample_periods(cfg)) + P * T
    mb += rows * 40 / 1e6
    return mb, seconds / worker_count()


def describe(cfg: ExperimentConfig) -> str:
    lines = [f"horizon T = {cfg.horizon}, runs R = {cfg.runs}, seed = {cfg.seed}",
             f"grid: {cfg.grid.N} levels from {cfg.grid.levels[0]} to {cfg.grid.levels[-1]}, D = {cfg.grid.D}"]
    if cfg.is_chain:
        c = cfg.chain
        lines.append(f"retailers K = {c.K}, replenishment r = {c.r}, beta = {c.beta:g}, "
                     f"allocations = {AllocationSpace(c).A}")
    else:
        p = cfg.costs
        lines.append(f"h = {p.h:g}, b = {p.b:g}, beta = {p.beta:g}, 1/(2 beta T) = {1 / (2 * p.beta * cfg.horizon):.9g}")
    lines.append(f"demand: {cfg.demand[0].kind}; metric: {cfg.metric}; benchmark: {cfg.benchmark}")
    for pol, spec in zip(build_policies(cfg), cfg.policies):
        params = ", ".join(f"{k} = {v:.9g}" if isinstance(v, float) else f"{k} = {v}"
                           for k, v in pol.parameters().items())
        lines.append(f"policy {spec.name} ({spec.kind}): {params or 'no learning parameters'}")
    mb, sec = estimate_cost(cfg)
    lines.append(f"estimated memory ~{mb:.0f} MB, runtime ~{sec:.0f} s with {worker_count()} worker(s)")
    return "\n".join(lines)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="newsvendor-arena",
                                 description="Repeated newsvendor experiments with censored demand.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "validate"):
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--seed", type=int)
        p.add_argument("--runs", type=int)
        p.add_argument("--horizon", type=int)
        if name == "run":
            p.add_argument("--out")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cp = load_config(args.config, args.preset)
        cfg = parse_config(cp, {"seed": args.seed, "runs": args.runs, "horizon": args.horizon,
                                "out": getattr(args, "out", None)})
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    if args.command == "validate":
        print(describe(cfg))
        return 0
    try:
        res = run_multi(cfg) if cfg.is_chain else run_single(cfg)
        write_outputs(cfg, res, Path(cfg.out))
    except (OSError, ValueError, FloatingPointError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return 2
    print(f"wrote runs.csv, trace.csv, plot.svg and manifest.ini to {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
