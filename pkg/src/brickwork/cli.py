"""Command-line front end: ``brickwork <subcommand> [flags]``.

Exit codes: 0 success, 2 invalid arguments, 3 resource cap exceeded,
4 statistical check failed under ``--assert``, 1 any other library error.
Errors are printed to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import __version__
from . import analytics, domainwall, memory, projectors
from .circuit import CircuitGeometry, IntervalSpec, lightcone_free_sites
from .ensemble import default_workers
from .errors import BrickworkError, InvalidArgument, ResourceLimitError, StatisticalCheckFailure
from .experiments import ensemble_average, mi_profile_samples
from .output import emit, format_config, parse_config, render_summary, render_table
from .randmat import sample_haar_unitary
from .rng import RngStream

SEED_ENV = "BRICKWORK_SEED"
DEFAULT_SEED = 0
EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_RESOURCE, EXIT_ASSERT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _mem_cap(text: str) -> int:
    units = {"k": 1024, "m": 1024**2, "g": 1024**3}
    t = text.strip().lower().rstrip("b")
    try:
        if t and t[-1] in units:
            return int(float(t[:-1]) * units[t[-1]])
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid memory size {text!r}") from None


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"invalid boolean {text!r}")


def parse_depths(text: str) -> list[int]:
    """``"3"``, ``"1,2,4"`` or the inclusive range ``"0..5"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split(".."))
            out = list(range(lo, hi + 1))
        else:
            out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InvalidArgument(f"invalid depth specification {text!r}") from None
    if not out or min(out) < 0:
        raise InvalidArgument(f"depths must be a nonempty list of nonnegative integers, got {text!r}")
    return out


# -- subcommands ---------------------------------------------------------------

def _single_depth(text: str) -> int:
    depths = parse_depths(text)
    if len(depths) != 1:
        raise InvalidArgument(f"this command takes a single depth, got {text!r}")
    return depths[0]


def _check_dims(*dims: int) -> None:
    if min(dims) < 2:
        raise InvalidArgument(f"local dimensions must be at least 2, got {list(dims)}")


def _interval(args, T: int, L: int) -> IntervalSpec:
    if args.interval_start is None:
        return IntervalSpec.aligned(args.interval_len, T, L)
    return IntervalSpec(args.interval_start, args.interval_len)


def cmd_purity(args, seed: int):
    q, l = args.q, args.interval_len
    _check_dims(q)
    depths = parse_depths(args.depth)
    rows, exact = [], {}
    floor = Fraction(1, q**l)
    L = None
    if args.trials > 0:
        need = lightcone_free_sites(l, max(depths))
        L = args.sites or need
        if L < need and not args.allow_lightcone:
            raise InvalidArgument(
                f"L={L} is below the lightcone-free size {need} for depth {max(depths)}; pass --allow-lightcone to override"
            )
        geo = CircuitGeometry.uniform(q, L)
        geo.check_memory(args.mem_cap)
    failures = []
    for T in depths:
        P = domainwall.purity_exact(q, l, T)
        lo, hi = domainwall.purity_excess_bounds(q, l, T)
        exact[str(T)] = str(P)
        row = {
            "T": T,
            "exact": float(P),
            "exact_rational": str(P),
            "excess": float(P - floor),
            "excess_lower": float(lo),
            "excess_upper": float(hi),
        }
        if not lo <= P - floor <= hi:
            failures.append(f"T={T}: excess outside bounds")
        if args.trials > 0:
            est = ensemble_average(
                "purity", geo, _interval(args, T, L), T, args.trials, RngStream(seed).substream(T),
                workers=args.workers, mem_cap=args.mem_cap,
            )
            row.update(mc_mean=est.mean, mc_stderr=est.stderr)
            if not est.within(float(P), nsigma=4, slack=1e-12):
                failures.append(f"T={T}: Monte Carlo {est.mean} vs exact {float(P)}")
        rows.append(row)
    return "table", rows, {"purity_exact": exact, "L": L}, failures


def cmd_mi_profile(args, seed: int):
    q, L, l, T = args.q, args.sites or 8, args.interval_len, _single_depth(args.depth)
    _check_dims(q)
    geo = CircuitGeometry.uniform(q, L)
    geo.check_memory(args.mem_cap)
    iv = _interval(args, T, L)
    out = mi_profile_samples(geo, iv, T, args.trials, RngStream(seed), workers=args.workers, mem_cap=args.mem_cap)
    lq = math.log(q)
    rows, failures = [], []
    n = args.trials
    stats = {}
    for k, x in enumerate(out["cuts"]):
        r2, vn = out["renyi2"][:, k] / lq, out["vn"][:, k] / lq
        se = lambda a: float(a.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        stats[x] = (float(r2.mean()), se(r2))
        rows.append({
            "x": x,
            "mi_renyi2_mean": float(r2.mean()),
            "mi_renyi2_stderr": se(r2),
            "mi_vn_mean": float(vn.mean()),
            "mi_vn_stderr": se(vn),
            "analytic": analytics.mi_profile(x, T, l),
        })
    if 0 in stats and abs(stats[0][0]) > 1e-12:
        failures.append("MI at x=0 is not zero")
    for x, (m, s) in stats.items():
        if l - x in stats:
            m2, s2 = stats[l - x]
            if abs(m - m2) > 4 * math.hypot(s, s2) + 1e-12:
                failures.append(f"profile not symmetric at x={x}")
    oracle = {"trapezoid": [analytics.mi_profile(x, T, l) for x in out["cuts"]]}
    return "table", rows, oracle, failures


def cmd_projector_stats(args, seed: int):
    d, r = args.dim, args.rank
    samples = projectors.fidelity_samples(d, r, args.trials, RngStream(seed))
    edges = np.linspace(0.0, 1.0, args.buckets + 1)
    rows = []
    for i, s in enumerate(samples):
        counts, _ = np.histogram(s.eigenvalues, bins=edges)
        row = {"pair": i, "F": s.fidelity}
        row.update({f"lam_b{k}": int(c) for k, c in enumerate(counts)})
        rows.append(row)
    stats = projectors.fidelity_stats(samples)
    w = r / d
    oracle, failures = {"w": w}, []
    if 0 < w <= 0.5:
        mean, var = projectors.fidelity_mean_analytic(w), projectors.fidelity_variance_analytic(w, r)
        oracle.update(mean=mean, variance=var)
        if w < 0.5:
            oracle["half_moment"] = projectors.eigen_density_moment(w, 0.5)
        if not stats["mean"].within(mean, nsigma=4):
            failures.append(f"mean {stats['mean'].mean} vs {mean}")
        if abs(stats["variance"] / var - 1) > 0.3:
            failures.append(f"variance {stats['variance']} vs {var}")
    oracle["sample_mean"] = stats["mean"].as_dict()
    oracle["sample_variance"] = stats["variance"]
    return "table", rows, oracle, failures


def cmd_packing(args, seed: int):
    res = projectors.greedy_packing(args.dim, args.rank, args.eps, args.max_draws, RngStream(seed))
    summary = res.as_dict()
    rep = analytics.packing_fidelity_count(args.rank, args.dim, args.eps)
    oracle = {"log_count_bound": rep.as_dict()}
    failures = [] if res.count >= args.min_count else [f"packed {res.count} < {args.min_count}"]
    return "summary", summary, oracle, failures


def _pick_brick(rule: memory.WedgeRule, placement: str) -> tuple[int, int]:
    bricks = rule.bricks(placement)
    if not bricks:
        raise InvalidArgument(f"no {placement} brick exists at this depth and interval")
    return sorted(bricks, key=lambda tb: (-tb[0], tb[1]))[0]


def cmd_memory(args, seed: int):
    q, Q, L, l, T = args.q, args.bigQ, args.sites or 8, args.interval_len, _single_depth(args.depth)
    _check_dims(q, Q)
    geo = CircuitGeometry.alternating(q, Q, L)
    iv = _interval(args, T, L)
    iv.validate(geo, T)
    if args.layer is not None and args.bond is not None:
        layer, bond = args.layer, args.bond
    else:
        layer, bond = _pick_brick(memory.WedgeRule(geo, iv, T), args.placement)
    dim = geo.site_dims[bond] * geo.site_dims[geo.partner(bond)] if 0 <= bond < L else 0
    vstream = RngStream(seed, 1)
    if args.perturbation == "identity":
        V = np.eye(dim, dtype=complex)
    elif args.perturbation == "traceless":
        V = memory.traceless_unitary(dim, vstream)
    else:
        V = sample_haar_unitary(dim, vstream)
    pert = memory.Perturbation(layer, bond, V)
    res = memory.memory_experiment(
        q, Q, L, iv, T, pert, args.trials, RngStream(seed), workers=args.workers, mem_cap=args.mem_cap, geometry=geo
    )
    rows = [{"trial": i, "F": f, "phase": res.phase, "placement": res.placement} for i, f in enumerate(res.samples)]
    predicted = abs(np.trace(V)) / (q * Q) if res.placement == "inside" and res.phase == "early" else 1.0
    oracle = {
        "summary": res.as_dict(),
        "brick": {"layer": layer, "bond": bond},
        "predicted_F": float(predicted),
        "interval": {"start": iv.start, "length": iv.length},
    }
    failures = []
    mean = res.estimate.mean
    if args.perturbation == "identity":
        if not np.all(res.samples == 1.0):
            failures.append("identity perturbation changed the state")
    elif res.placement == "inside" and res.phase == "early":
        if not mean < 0.6:
            failures.append(f"inside-wedge mean F {mean} is not below 0.6")
    elif res.placement == "outside" or res.phase == "late":
        if not mean > 0.9:
            failures.append(f"mean F {mean} is not above 0.9")
    return "table", rows, oracle, failures


_BOUNDS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "purity": (None, ("q", "l", "T")),
    "mi_profile": (analytics.mi_profile, ("x", "T", "l")),
    "trapezoid_area": (analytics.trapezoid_area, ("T", "l")),
    "complexity_lower": (analytics.complexity_lower_bound, ("T", "l", "eps")),
    "mi_gate": (analytics.mi_gate_bound, ("m", "q", "eps", "l")),
    "mi_continuity": (analytics.mi_continuity, ("eps", "d_min")),
    "thermalization_time": (analytics.thermalization_time, ("q", "l", "eps")),
    "prob_overlap": (analytics.prob_overlap_bound, ("k", "eps_design", "delta", "l", "L", "q")),
    "holographic_complexity": (analytics.holographic_complexity, ("l", "L", "T", "s", "beta", "which")),
    "holographic_entropy": (analytics.holographic_entropy, ("l", "T", "s")),
    "packing_design": (analytics.packing_design_bound, ("k", "alpha", "beta", "eps_design", "d")),
    "packing_full": (analytics.packing_full_bound, ("d", "alpha", "beta")),
    "packing_rank": (analytics.packing_rank_bound, ("r", "d", "eps")),
    "packing_fidelity": (analytics.packing_fidelity_count, ("r", "d", "eps")),
    "linear_growth_gate": (analytics.linear_growth_gate_bound, ("T", "L", "poly_coeff", "poly_exponent")),
    "phase_boundary": (memory.phase_boundary, ("q", "Q", "l")),
    "fidelity_mean": (projectors.fidelity_mean_analytic, ("w",)),
    "fidelity_variance": (projectors.fidelity_variance_analytic, ("w", "r")),
}
_INT_PARAMS = {"k", "l", "L", "d", "r", "m", "x", "T"}


def _param_value(key: str, text: str):
    if key == "which":
        return text
    try:
        v = float(text)
    except ValueError:
        raise InvalidArgument(f"parameter {key}={text!r} is not a number") from None
    return int(v) if key in _INT_PARAMS and v.is_integer() else v


def cmd_bounds(args, seed: int):
    if args.name not in _BOUNDS:
        raise InvalidArgument(f"unknown bound {args.name!r}; choose from {sorted(_BOUNDS)}")
    fn, names = _BOUNDS[args.name]
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InvalidArgument(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = _param_value(k.strip(), v.strip())
    unknown = set(params) - set(names)
    if unknown:
        raise InvalidArgument(f"unknown parameters {sorted(unknown)} for {args.name}; expected {list(names)}")
    if args.name == "purity":
        missing = [n for n in names if n not in params]
        if missing:
            raise InvalidArgument(f"missing parameters {missing}")
        q, l, T = int(params["q"]), int(params["l"]), int(params["T"])
        P = domainwall.purity_exact(q, l, T)
        lo, hi = domainwall.purity_excess_bounds(q, l, T)
        excess = P - Fraction(1, q**l)
        rep = analytics.BoundReport("purity", params, float(P), {"excess_in_bounds": lo <= excess <= hi})
        rep.flags = {"exact": str(P), "excess_lower": float(lo), "excess_upper": float(hi)}
    else:
        try:
            result = fn(**params)
        except TypeError as exc:
            raise InvalidArgument(f"{args.name}: {exc}; expected {list(names)}") from None
        if isinstance(result, analytics.BoundReport):
            rep = result
        elif isinstance(result, tuple):
            rep = analytics.BoundReport(args.name, params, result[0])
            rep.flags = {"left_limit": result[1], "right_limit": result[2]}
        else:
            rep = analytics.BoundReport(args.name, params, result)
    failures = [] if rep.valid else [f"preconditions failed: {rep.conditions}"]
    return "summary", rep.as_dict(), {}, failures


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=None, help=f"master seed (default: ${SEED_ENV}, else {DEFAULT_SEED})")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--mem-cap", type=_mem_cap, default=2 * 1024**3, help="state-vector memory cap, bytes or 512M/2G")
    g.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    g.add_argument("--assert", dest="check", action="store_true", help="exit 4 when a statistical check fails")
    g.add_argument("--config", default=None, help="flat key = value file; flags override it")
    g.add_argument("--wall-time", action="store_true", help="record elapsed seconds (output is then not reproducible)")

    p = _Parser(prog="brickwork", description="Random brickwork circuits: exact purity, simulations and bounds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def chain(sp, q=2, sites=None, l=4, depth="1", trials=100):
        sp.add_argument("--q", type=int, default=q, help="local dimension q >= 2")
        sp.add_argument("--sites", type=int, default=sites, help="ring size L (even)")
        sp.add_argument("--interval-start", type=int, default=None, help="first site of the interval (default: centred, aligned with the last layer)")
        sp.add_argument("--interval-len", type=int, default=l, help="interval length l (even)")
        sp.add_argument("--depth", default=depth, help="circuit depth T")
        sp.add_argument("--trials", type=int, default=trials, help="Monte Carlo trials")

    sp = sub.add_parser("purity", parents=[common], help="exact averaged purity with bounds and optional Monte Carlo")
    chain(sp, depth="0..3", trials=0)
    sp.add_argument("--allow-lightcone", action="store_true", help="allow rings smaller than l + 2T + 2")
    sp.set_defaults(func=cmd_purity)

    sp = sub.add_parser("mi-profile", parents=[common], help="mutual information across every cut of the interval")
    chain(sp, sites=8)
    sp.set_defaults(func=cmd_mi_profile)

    sp = sub.add_parser("projector-stats", parents=[common], help="fidelity of pairs of random rank-r states")
    sp.add_argument("--dim", type=int, default=128, help="Hilbert space dimension d")
    sp.add_argument("--rank", type=int, default=8, help="rank r <= d")
    sp.add_argument("--trials", type=int, default=500, help="number of pairs")
    sp.add_argument("--buckets", type=int, default=10, help="eigenvalue histogram buckets on [0, 1]")
    sp.set_defaults(func=cmd_projector_stats)

    sp = sub.add_parser("packing", parents=[common], help="greedy packing of nearly orthogonal random states")
    sp.add_argument("--dim", type=int, default=32)
    sp.add_argument("--rank", type=int, default=2)
    sp.add_argument("--eps", type=float, default=0.5, help="fidelity tolerance in (0, 1)")
    sp.add_argument("--max-draws", type=int, default=2000)
    sp.add_argument("--min-count", type=int, default=1, help="--assert threshold on the packed count")
    sp.set_defaults(func=cmd_packing)

    sp = sub.add_parser("memory", parents=[common], help="fidelity after modifying one brick of an alternating q/Q chain")
    chain(sp, sites=8, trials=300)
    sp.add_argument("--bigQ", type=int, default=6, help="odd-site dimension Q")
    sp.add_argument("--layer", type=int, default=None)
    sp.add_argument("--bond", type=int, default=None, help="left site of the modified brick")
    sp.add_argument("--placement", choices=memory.PLACEMENTS, default="inside", help="choose a brick by placement")
    sp.add_argument("--perturbation", choices=("traceless", "identity", "haar"), default="traceless")
    sp.set_defaults(func=cmd_memory)

    sp = sub.add_parser("bounds", parents=[common], help="evaluate a closed-form bound")
    sp.add_argument("--name", required=True, choices=sorted(_BOUNDS))
    sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="repeatable")
    sp.set_defaults(func=cmd_bounds)
    return p


_NOT_CONFIG = {"func", "config", "command"}


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _convert(sp: argparse.ArgumentParser, key: str, text: str):
    for action in sp._actions:
        if action.dest != key:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            return _bool(text)
        if isinstance(action, argparse._AppendAction):
            return [s.strip() for s in text.split(";") if s.strip()]
        value = action.type(text) if action.type else text
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config value {key}={text!r} not in {list(action.choices)}")
        return value
    raise UsageError(f"unknown config key {key!r}")


def run_config(args) -> dict:
    """The resolved parameters of a run, as written to output headers and config files."""
    out = {"command": args.command}
    for k, v in sorted(vars(args).items()):
        if k not in _NOT_CONFIG:
            out[k] = ";".join(v) if isinstance(v, list) else v
    return out


def config_text(args) -> str:
    cfg = {k: v for k, v in run_config(args).items() if k != "command"}
    return format_config(cfg)


def _resolve(argv: list[str]):
    parser = build_parser()
    args = parser.parse_args(argv)
    seed_flag = args.seed
    file_values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = parse_config(fh.read())
        except OSError as exc:
            raise InvalidArgument(f"cannot read config file: {exc}") from None
        sp = _subparser(parser, args.command)
        file_values = {k: _convert(sp, k, v) for k, v in raw.items() if k != "command"}
        if "command" in raw and raw["command"] != args.command:
            raise UsageError(f"config is for {raw['command']!r}, not {args.command!r}")
        sp.set_defaults(**file_values)
        args = parser.parse_args(argv)
    if seed_flag is not None:
        source = "flag"
    elif "seed" in file_values:
        source = "config"
    elif os.environ.get(SEED_ENV, "").strip():
        try:
            args.seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise InvalidArgument(f"${SEED_ENV} is not an integer") from None
        source = "env"
    else:
        args.seed, source = DEFAULT_SEED, "default"
    if args.workers is None:
        args.workers = default_workers()
    return args, source


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args, source = _resolve(argv)
        if args.workers < 1:
            raise InvalidArgument("workers must be positive")
        if getattr(args, "trials", 1) < 0:
            raise InvalidArgument("trials must be nonnegative")
        start = time.perf_counter()
        kind, payload, oracle, failures = args.func(args, args.seed)
        meta = {
            "tool": "brickwork",
            "version": __version__,
            "config": run_config(args),
            "seed_source": source,
            "oracle": oracle,
        }
        if args.check:
            meta["checks"] = {"passed": not failures, "failures": failures}
        if args.wall_time:
            meta["wall_time_s"] = round(time.perf_counter() - start, 3)
        render = render_table if kind == "table" else render_summary
        emit(render(payload, meta, args.format), args.out)
        if args.check and failures:
            raise StatisticalCheckFailure("; ".join(failures))
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except ResourceLimitError as exc:
        return _fail(EXIT_RESOURCE, "resource_limit", str(exc))
    except StatisticalCheckFailure as exc:
        return _fail(EXIT_ASSERT, "check_failed", str(exc))
    except InvalidArgument as exc:
        return _fail(EXIT_USAGE, "invalid_argument", str(exc))
    except BrickworkError as exc:
        return _fail(EXIT_ERROR, type(exc).__name__, str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
