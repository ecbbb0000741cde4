"""Command-line interface.

    zicap preset fig4 --out fig4.json
    zicap check fig4.json --json
    zicap region fig4.json --bound capacity --u-card 3 --restarts 32 --out cap.csv
    zicap sumcap fig4.json
    zicap compare fig4.json --outdir fig4_out
    zicap verify --suite coincide --samples 500

Exit codes: 0 success, 1 usage error, 2 precondition violation or failed suite.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .channels import (
    build_benzel,
    build_elgamal,
    build_fig4,
    channel_to_dict,
    check_conditions,
    load_channel,
)
from .optim import SearchConfig, default_lambda_grid
from .regions import BoundKind, convex_hull
from .search import PreconditionError, max_sum_rate, trace_frontier
from . import verify

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2

BOUNDS = {
    "inner": BoundKind.HK_INNER,
    "outer": BoundKind.THM4_OUTER,
    "thm1": BoundKind.THM1_OUTER,
    "capacity": BoundKind.CAPACITY,
    "sato": BoundKind.SATO,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for precondition failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def noise_law(spec: str, q: int) -> np.ndarray:
    """A pmf over Z_q from either ``"p0,p1,..."`` or a scalar flip probability.

    A scalar ``s`` means ``P(0) = 1 - s`` with ``s`` spread evenly over the other
    ``q - 1`` symbols (for ``q = 2`` this is a Bernoulli(s) noise).
    """
    try:
        vals = [float(v) for v in str(spec).split(",")]
    except ValueError:
        raise UsageError(f"cannot parse noise law {spec!r}") from None
    if len(vals) == 1:
        s = vals[0]
        if not 0.0 <= s <= 1.0:
            raise UsageError(f"noise probability {s} outside [0, 1]")
        return np.array([1.0 - s] + [s / (q - 1)] * (q - 1))
    if len(vals) != q:
        raise UsageError(f"noise law needs {q} entries, got {len(vals)}")
    return np.array(vals)


def _search_config(args) -> SearchConfig:
    return SearchConfig(seed=args.seed, restarts=args.restarts,
                        lambda_grid=default_lambda_grid(args.lambdas),
                        max_iters=args.max_iters, q_card=args.q_card, u_card=args.u_card)


def _load(path):
    try:
        return load_channel(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load channel {path}: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def frontier_csv(region, config: dict) -> str:
    """CSV text of a frontier; comment lines carry the version and configuration."""
    lines = [
        f"# zicap {__version__}",
        f"# bound_kind: {region.bound_kind.value}",
        f"# hulled: {str(region.hulled).lower()}",
        "# config: " + json.dumps(_jsonable(config), sort_keys=True),
        "R1,R2",
    ]
    lines += [f"{r1:.6f},{r2:.6f}" for r1, r2 in region.points()]
    return "\n".join(lines) + "\n"


def _write_region(region, path: Path, config: dict, wall: float) -> None:
    path.write_text(frontier_csv(region, config), encoding="utf-8")
    side = {
        "version": __version__,
        "bound_kind": region.bound_kind.value,
        "seed": config.get("seed"),
        "config": config,
        "hulled": region.hulled,
        "points": len(region.frontier),
        "wall_time_s": wall,
        "meta": {k: v for k, v in region.meta.items() if k != "config"},
    }
    path.with_suffix(".json").write_text(json.dumps(_jsonable(side), indent=1) + "\n",
                                         encoding="utf-8")


def _trace(zc, bound: str, cfg: SearchConfig, force: bool, hull):
    kind = BOUNDS[bound]
    extras = None
    if kind is BoundKind.CAPACITY:
        extras = check_conditions(zc, cfg)
        if not extras.both and not force:
            raise PreconditionError("capacity region needs both conditions: " + extras.note)
    return trace_frontier(zc, kind, cfg, extras=extras, force=force, hull=hull)


# --- subcommands -----------------------------------------------------------

def cmd_preset(args) -> int:
    if args.name == "fig4":
        zc = build_fig4()
    elif args.name == "elgamal":
        zc = build_elgamal(args.eps)
    else:
        try:
            zc = build_benzel(args.q, noise_law(args.z1, args.q), noise_law(args.z2, args.q))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    text = json.dumps(channel_to_dict(zc), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    zc = _load(args.channel)
    rep = check_conditions(zc, SearchConfig(seed=args.seed), trials=args.trials)
    if args.json:
        print(json.dumps(_jsonable(rep.to_dict()), indent=1))
    else:
        print(f"cond1 necessary : {rep.cond1_necessary_pass}")
        print(f"cond1 certified : {rep.cond1_certified}")
        print(f"tau             : {rep.tau:.12g}")
        p = "none" if rep.p_star is None else np.array2string(rep.p_star.values, precision=9)
        print(f"p*              : {p}")
        print(f"max_dev         : {rep.max_dev:.3e}")
        if rep.note:
            print(f"note            : {rep.note}")
    return EXIT_OK if rep.both else EXIT_PRECONDITION


def cmd_region(args) -> int:
    zc = _load(args.channel)
    cfg = _search_config(args)
    hull = False if args.raw else (True if args.hull else None)
    t0 = time.perf_counter()
    region = _trace(zc, args.bound, cfg, args.force, hull)
    wall = time.perf_counter() - t0
    config = dict(cfg.to_dict(), bound=args.bound, channel=str(args.channel), force=args.force,
                  hull=region.hulled)
    if args.out:
        _write_region(region, Path(args.out), config, wall)
    else:
        sys.stdout.write(frontier_csv(region, config))
    return EXIT_OK


def cmd_sumcap(args) -> int:
    zc = _load(args.channel)
    rep = max_sum_rate(zc, _search_config(args))
    if args.json:
        print(json.dumps(_jsonable(rep.to_dict()), indent=1))
    else:
        print(f"sum rate        : {rep.value:.6f}")
        print(f"I(U;Y1|Q)       : {rep.i_u_y1:.6f}")
        print(f"I(U;Y2|Q)       : {rep.i_u_y2:.6f}")
        print(f"predicate holds : {rep.predicate_holds}")
        print(f"certified       : {rep.certified}")
    return EXIT_OK


def containment_report(regions: dict) -> dict:
    """Pairwise comparisons of traced regions by diagonal slack.

    For each ordered pair ``(a, b)`` reports the worst slack of ``a``'s frontier
    points inside ``b`` (negative means some point of ``a`` lies outside ``b``)
    and the largest sum-rate gap ``b.max_sum - a.max_sum``.
    """
    out = {}
    for na, ra in regions.items():
        for nb, rb in regions.items():
            if na == nb:
                continue
            slacks = [rb.slack(r1, r2) for r1, r2 in ra.points()]
            out[f"{na} in {nb}"] = {
                "min_slack": float(min(slacks)),
                "max_slack": float(max(slacks)),
                "contained": bool(min(slacks) >= -1e-6),
                "sum_rate_gap": float(rb.max_sum - ra.max_sum),
            }
    return out


def cmd_compare(args) -> int:
    zc = _load(args.channel)
    cfg = _search_config(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    regions = {}
    for bound in args.bounds:
        t0 = time.perf_counter()
        region = _trace(zc, bound, cfg, args.force, None)
        wall = time.perf_counter() - t0
        config = dict(cfg.to_dict(), bound=bound, channel=str(args.channel), hull=region.hulled)
        _write_region(region, outdir / f"{bound}.csv", config, wall)
        regions[bound] = region
        if bound == "sato":
            hulled = convex_hull(region)
            _write_region(hulled, outdir / "sato_hull.csv", dict(config, hull=True), wall)
            regions["sato_hull"] = hulled
    report = {"version": __version__, "channel": str(args.channel), "config": cfg.to_dict(),
              "comparisons": containment_report(regions)}
    (outdir / "containment.json").write_text(json.dumps(_jsonable(report), indent=1) + "\n",
                                             encoding="utf-8")
    for name, row in report["comparisons"].items():
        print(f"{name:24s} contained={row['contained']!s:5s} min_slack={row['min_slack']:+.6f} "
              f"sum_gap={row['sum_rate_gap']:+.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.suite == "lemma1":
        worst = 0.0
        for _ in range(args.samples):
            n = int(rng.integers(1, 5))
            joint = verify.random_joint(rng, n, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
            worst = max(worst, verify.korner_marton_identity(joint).gap)
        ok = worst <= 1e-10
        print(f"lemma1     samples={args.samples} max_gap={worst:.3e} {'PASS' if ok else 'FAIL'}")
    elif args.suite in ("appendixb", "refinv"):
        worst = 0.0
        for _ in range(args.samples):
            zc = verify.random_modadd_channel(rng)
            aux = verify.random_aux(rng, zc)
            if args.suite == "appendixb":
                worst = max(worst, verify.appendix_b_identities(zc, aux))
            else:
                worst = max(worst, verify.reference_invariance(zc, aux))
        tol = 1e-12 if args.suite == "appendixb" else 1e-10
        ok = worst <= tol
        print(f"{args.suite:10s} samples={args.samples} max_gap={worst:.3e} "
              f"{'PASS' if ok else 'FAIL'}")
    else:
        channels = ([(args.channel, _load(args.channel))] if args.channel else
                    [("fig4", build_fig4()),
                     ("benzel", build_benzel(2, [0.9, 0.1], [0.8, 0.2])),
                     ("elgamal", build_elgamal(0.3))])
        ok = True
        for name, zc in channels:
            rep = check_conditions(zc, SearchConfig(seed=args.seed))
            if not rep.both:
                print(f"coincide   {name}: conditions not established ({rep.note})")
                ok = False
                continue
            res = verify.coincidence_suite(zc, args.samples, args.seed, rep.p_star, rep.tau)
            ok &= res.ok
            print(f"coincide   {name}: {res.passed}/{res.samples} "
                  f"eq_gap={res.max_equality_gap:.3e} "
                  f"contain={res.max_containment_excess:+.3e} {'PASS' if res.ok else 'FAIL'}")
            for f in res.failures[:5]:
                print(f"  sample {f.sample}: {f.check} gap={f.gap:.3e} law={json.dumps(f.law)}")
    return EXIT_OK if ok else EXIT_PRECONDITION


# --- parser ------------------------------------------------------------------

def _add_search_flags(p) -> None:
    p.add_argument("--u-card", type=int, default=None, help="|U| (default: largest allowed)")
    p.add_argument("--q-card", type=int, default=None, help="|Q| (default depends on bound)")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--lambdas", type=int, default=33, help="number of interior weight angles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=300)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zicap", description="Rate regions of Z-interference channels")
    parser.add_argument("--version", action="version", version=f"zicap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preset", help="write a preset channel file")
    p.add_argument("name", choices=["fig4", "benzel", "elgamal"])
    p.add_argument("--q", type=int, default=2, help="benzel alphabet size")
    p.add_argument("--z1", default="0.1", help="benzel Z1 law: scalar or comma list")
    p.add_argument("--z2", default="0.2", help="benzel Z2 law: scalar or comma list")
    p.add_argument("--eps", type=float, default=0.3, help="elgamal erasure-like parameter")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("check", help="check the channel conditions")
    p.add_argument("channel")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", help="trace a rate-region frontier to CSV")
    p.add_argument("channel")
    p.add_argument("--bound", choices=list(BOUNDS), default="outer")
    _add_search_flags(p)
    p.add_argument("--out", help="CSV path; a .json sidecar is written next to it")
    p.add_argument("--force", action="store_true",
                   help="trace the capacity region even if the conditions are not established")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--raw", action="store_true", help="do not convexify the union")
    g.add_argument("--hull", action="store_true", help="convexify the union (also for sato)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("sumcap", help="maximize the outer-bound sum rate")
    p.add_argument("channel")
    _add_search_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sumcap)

    p = sub.add_parser("compare", help="trace several bounds and compare them")
    p.add_argument("channel")
    _add_search_flags(p)
    p.add_argument("--outdir", default="compare_out")
    p.add_argument("--bounds", nargs="+", choices=list(BOUNDS),
                   default=["capacity", "sato", "inner", "outer"])
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run a numerical identity suite")
    p.add_argument("--suite", choices=["lemma1", "appendixb", "refinv", "coincide"],
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--channel", help="channel file for the coincide suite "
                                     "(default: the three presets)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"zicap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"zicap: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"zicap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
