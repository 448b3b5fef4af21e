"""Command-line front end: ``specialopen verify|homology|bench|config-space|nerve``."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import theorems as th
from .cache import HomologyCache, complex_key
from .fincat import CategoryError, loads_category
from .homology import HomologyError, betti_f2, coreduce, dumps_matrix, homology, normalized_chains, smith
from .manifolds import (
    ModelError,
    build_AkBkp,
    build_AkqBk,
    build_Bk,
    config_complex,
    enumerate_balls,
    parse_model,
    parse_region,
    parse_subbasis,
)
from .sset import SimplicialError, dumps_sset, loads_sset, nerve, pi0

CHECKS = ("nerve-ak", "thomason", "fiber", "terminal-j", "decomposition", "refinement", "bary",
          "semidirect", "all")
USAGE_ERRORS = (ModelError, HomologyError, SimplicialError, CategoryError, OSError)


class UsageError(Exception):
    pass


# -- task construction ----------------------------------------------------------


def _instance_seeds(stream: str, seed: int, count: int) -> list[int]:
    rng = random.Random(f"{stream}:{seed}")
    return [rng.getrandbits(48) for _ in range(count)]


def tasks_for(check: str, args) -> list[tuple[str, dict]]:
    """Independent (check, params) units in deterministic order."""
    deg = args.max_degree
    if check == "nerve-ak":
        return [("nerve-ak", {"model": args.model or "cycle:6", "k": _k(args, 1),
                              "max_degree": 1 if deg is None else deg, "sweep": args.sweep})]
    if check == "thomason":
        n = 20 if args.count is None else args.count
        return [("thomason", {"seed": s, "index": i, "max_degree": 2 if deg is None else deg})
                for i, s in enumerate(_instance_seeds("thomason", args.seed, n))]
    if check == "fiber":
        n = 50 if args.count is None else args.count
        return [("fiber", {"seed": s, "index": i}) for i, s in enumerate(_instance_seeds("fiber", args.seed, n))]
    if check == "terminal-j":
        return [("terminal-j", {"model": args.model or "interval:4", "k": _k(args, 1),
                                "q": 1 if args.q is None else args.q, "region": args.region})]
    if check == "decomposition":
        return [("decomposition", {"model": args.model or "interval:4", "k": _k(args, 1),
                                   "p": 1 if args.p is None else args.p, "region": args.region})]
    if check == "refinement":
        return [("refinement", {"model": args.model or "cycle:8", "k": _k(args, 1),
                                "p": 0 if args.p is None else args.p, "region": args.region,
                                "subbasis": args.subbasis or "stride:2", "max_degree": 1 if deg is None else deg})]
    if check == "bary":
        n = 10_000 if args.count is None else args.count
        return [("bary", {"seed": _instance_seeds("bary", args.seed, 1)[0], "count": n})]
    if check == "semidirect":
        return [("semidirect", {})]
    if check == "all":
        return acceptance_tasks(args.seed)
    raise UsageError(f"unknown check {check!r}")


def _k(args, default: int) -> int:
    return default if args.k is None else args.k


def acceptance_tasks(seed: int) -> list[tuple[str, dict]]:
    out: list[tuple[str, dict]] = [
        ("nerve-ak", {"model": "cycle:6", "k": 1, "max_degree": 1, "sweep": 2}),
        ("nerve-ak", {"model": "interval:6", "k": 2, "max_degree": 1, "sweep": 2}),
        ("nerve-ak", {"model": "cycle:6", "k": 2, "max_degree": 1, "sweep": 2}),
    ]
    out += [("thomason", {"seed": s, "index": i, "max_degree": 2})
            for i, s in enumerate(_instance_seeds("thomason", seed, 20))]
    out.append(("semidirect", {}))
    out += [("decomposition", {"model": "interval:4", "k": k, "p": p, "region": None})
            for k in (1, 2) for p in (1, 2)]
    out += [("terminal-j", {"model": m, "k": k, "q": q, "region": None})
            for m in ("interval:4", "cycle:5") for k in (1, 2) for q in (1, 2)]
    out += [("refinement", {"model": "cycle:8", "k": k, "p": p, "region": None, "subbasis": "stride:2",
                            "max_degree": 1}) for k in (1, 2) for p in (0, 1)]
    out += [("fiber", {"seed": s, "index": i}) for i, s in enumerate(_instance_seeds("fiber", seed, 50))]
    out.append(("bary", {"seed": _instance_seeds("bary", seed, 1)[0], "count": 10_000}))
    return out


def run_task(task: tuple[str, dict], coeff: str = "integer", cache_dir: str | None = None) -> th.CheckReport:
    name, params = task
    cache = HomologyCache.from_env(cache_dir) if name in ("nerve-ak", "thomason", "refinement") else None
    if name == "nerve-ak":
        model = parse_model(params["model"])
        rep = th.verify_nerve_ak(model, params["k"], params["max_degree"], params["sweep"], coeff, cache)
    elif name == "thomason":
        c, f = th.random_poset_functor(random.Random(params["seed"]))
        rep = th.verify_thomason(c, f, params["max_degree"], coeff, params, cache)
    elif name == "fiber":
        c, f = th.random_fiber_instance(random.Random(params["seed"]))
        rep = th.verify_vertex_fiber(c, f, params=params)
    elif name == "terminal-j":
        model = parse_model(params["model"])
        bundle = build_Bk(model, enumerate_balls(model), params["k"])
        region = parse_region(model, params["region"]) if params["region"] else None
        rep = th.verify_homotopy_terminal_J(bundle, params["q"], region, params)
    elif name == "decomposition":
        model = parse_model(params["model"])
        bundle = build_Bk(model, enumerate_balls(model), params["k"])
        region = parse_region(model, params["region"]) if params["region"] else None
        rep = th.verify_grothendieck_decomposition(bundle, params["p"], region, params)
    elif name == "refinement":
        model = parse_model(params["model"])
        region = parse_region(model, params["region"]) if params["region"] else None
        sub = parse_subbasis(model, params["subbasis"])
        rep = th.verify_refinement(model, params["k"], params["p"], region, sub, params["max_degree"],
                                   coeff, params, cache)
        rep.params["subbasis"] = params["subbasis"]
    elif name == "bary":
        rep = th.verify_bary(params["seed"], params["count"])
    elif name == "semidirect":
        rep = th.verify_semidirect()
    else:
        raise UsageError(f"unknown check {name!r}")
    return rep


def _run_one(payload):
    task, coeff, cache_dir = payload
    return run_task(task, coeff, cache_dir)


def run_tasks(tasks, jobs: int = 1, coeff: str = "integer", cache_dir: str | None = None) -> list[th.CheckReport]:
    """Run tasks, possibly on a process pool; results keep task order."""
    payloads = [(t, coeff, cache_dir) for t in tasks]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_one(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, payloads))


# -- output ---------------------------------------------------------------------------


def _short_params(params: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in params.items() if v is not None and k not in ("coeff",))


def _side(d: dict | None) -> str:
    if not d:
        return "-"
    if "text" in d:
        return d["text"]
    return json.dumps(d, sort_keys=True)


def emit_reports(reports, fmt: str, timings: bool, out=None) -> None:
    out = out or sys.stdout
    if fmt == "jsonl":
        for r in reports:
            out.write(r.to_json(timings) + "\n")
        return
    for r in reports:
        line = f"{r.verdict:<24} {r.name:<14} {_short_params(r.params)}"
        line += f"  left={_side(r.left)} right={_side(r.right)}"
        if r.stabilization:
            line += f" sweep={r.stabilization['verdict']}"
        if timings and r.wall_time_ms is not None:
            line += f" [{r.wall_time_ms:.0f} ms]"
        out.write(line + "\n")
    passed = sum(r.passed for r in reports)
    out.write(f"{passed}/{len(reports)} passed\n")


# -- commands ----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    tasks = tasks_for(args.check, args)
    reports = run_tasks(tasks, args.jobs, args.coeff, args.cache_dir)
    emit_reports(reports, args.format, args.timings)
    return 0 if all(r.passed for r in reports) else 1


def _category_from_args(args):
    model = parse_model(args.model)
    family = parse_subbasis(model, args.subbasis)
    k = 1 if args.k is None else args.k
    bundle = build_Bk(model, family, k)
    region = parse_region(model, args.region) if args.region else None
    if args.p is not None and args.q is not None:
        raise UsageError("give at most one of --p and --q")
    if args.p is not None:
        return build_AkBkp(bundle, args.p, region)
    if args.q is not None:
        return build_AkqBk(bundle, args.q, region)[0]
    return build_AkBkp(bundle, 0, region)


def _load_input(path: str, top: int):
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return loads_sset(text)
    return nerve(loads_category(text), top)


def _homology_record(x, through: int, coeff: str, cache: HomologyCache) -> dict:
    comp = th.complex_homology(x, through, coeff, cache) if x.top >= through + 1 or not x.truncated \
        else _partial(x, through, coeff)
    d = comp.as_dict()
    d["counts"] = x.counts()
    d["valid_through"] = comp.summary.valid_through
    return d


def _partial(x, through: int, coeff: str) -> th.Computed:
    """Homology of a truncated complex, unknown above its valid range."""
    cc = normalized_chains(x)
    cc.check()
    red, _ = coreduce(cc)
    summary = homology(red, through, strict=False)
    f2 = betti_f2(red, through, strict=False) if coeff == "f2" else None
    return th.Computed(summary, f2, pi0(x), cc.size(), red.size())


def _print_homology(rec: dict, fmt: str, kind: str) -> None:
    if fmt == "jsonl":
        out = {"v": th.SCHEMA_VERSION, "kind": kind}
        out.update(rec)
        print(json.dumps(out, sort_keys=True, separators=(",", ":")))
        return
    h = rec["homology"]
    parts = []
    for n, (b, t) in enumerate(zip(h["betti"], h["torsion"])):
        if b is None:
            parts.append(f"H{n}=unknown")
        else:
            parts.append(f"H{n}=Z^{b}" + "".join(f"+Z/{x}" for x in t))
    print(f"betti {rec['text']}")
    print("  ".join(parts))
    vt = rec["valid_through"]
    print(f"valid through degree {vt if vt is not None else 'all'}; simplices per dimension {rec['counts']}")


def cmd_homology(args) -> int:
    through = 2 if args.max_degree is None else args.max_degree
    top = args.top if args.top is not None else through + 1
    if args.input:
        x = _load_input(args.input, top)
    elif args.model:
        x = nerve(_category_from_args(args), top)
    else:
        raise UsageError("homology needs --input or --model")
    cache = HomologyCache.from_env(args.cache_dir)
    _print_homology(_homology_record(x, through, args.coeff, cache), args.format, "homology")
    return 0


def cmd_config_space(args) -> int:
    if not args.model:
        raise UsageError("config-space needs --model")
    model = parse_model(args.model)
    j = 1 if args.k is None else args.k
    through = 1 if args.max_degree is None else args.max_degree
    x = config_complex(model, j, through + 1)
    cache = HomologyCache.from_env(args.cache_dir)
    _print_homology(_homology_record(x, through, args.coeff, cache), args.format, "config-space")
    return 0


def cmd_nerve(args) -> int:
    if not args.model:
        raise UsageError("nerve needs --model")
    through = 1 if args.max_degree is None else args.max_degree
    top = args.top if args.top is not None else through + 1
    cat = _category_from_args(args)
    x = nerve(cat, top)
    if args.output:
        Path(args.output).write_text(dumps_sset(x) + "\n")
    rec = {"objects": len(cat.objects), "morphisms": cat.num_morphisms, "counts": x.counts(),
           "truncated": bool(x.truncated)}
    if args.format == "jsonl":
        print(json.dumps(dict(rec, v=th.SCHEMA_VERSION, kind="nerve"), sort_keys=True, separators=(",", ":")))
    else:
        print(f"{rec['objects']} objects, {rec['morphisms']} morphisms")
        print(f"nondegenerate simplices per dimension {rec['counts']}" + (" (truncated)" if x.truncated else ""))
    return 0


def bench_corpus(seed: int, count: int):
    """Deterministic corpus: nerves of random posets and of small A_k posets."""
    rng = random.Random(f"bench:{seed}")
    models = ["interval:5", "cycle:6", "interval:6", "cycle:7", "grid:2x3"]
    out = []
    for i in range(count):
        if i % 2 == 0:
            p = th.random_poset(rng, rng.randint(6, 14), density=rng.uniform(0.2, 0.6))
            out.append((f"poset{i}", p.as_category()))
        else:
            spec = models[(i // 2) % len(models)]
            model = parse_model(spec)
            out.append((f"{spec}/k2", build_Bk(model, enumerate_balls(model), 2).A_category))
    return out


def cmd_bench(args) -> int:
    count = 6 if args.count is None else args.count
    through = 1 if args.max_degree is None else args.max_degree
    rows = []
    outdir = Path(args.output) if args.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for i, (name, cat) in enumerate(bench_corpus(args.seed, count)):
        t0 = time.perf_counter()
        cc = normalized_chains(nerve(cat, through + 1))
        t1 = time.perf_counter()
        red, log = coreduce(cc)
        t2 = time.perf_counter()
        for n in range(1, red.top + 1):
            smith(red.boundaries[n])
        t3 = time.perf_counter()
        if outdir:
            for n in range(1, red.top + 1):
                (outdir / f"{i:03d}_d{n}.txt").write_text(dumps_matrix(red.boundaries[n]))
        rows.append({"name": name, "hash": complex_key(cc)[:16], "cells": cc.size(), "reduced": red.size(),
                     "ratio": round(log.ratio, 3), "chains_ms": round((t1 - t0) * 1000, 2),
                     "coreduce_ms": round((t2 - t1) * 1000, 2), "smith_ms": round((t3 - t2) * 1000, 2)})
    if args.format == "jsonl":
        for r in rows:
            if not args.timings:
                r = {k: v for k, v in r.items() if not k.endswith("_ms")}
            print(json.dumps(dict(r, v=th.SCHEMA_VERSION, kind="bench"), sort_keys=True, separators=(",", ":")))
        return 0
    print(f"{'name':<16} {'hash':<16} {'cells':>8} {'reduced':>8} {'ratio':>8} {'chains':>9} {'coreduce':>9} {'smith':>9}")
    for r in rows:
        print(f"{r['name']:<16} {r['hash']:<16} {r['cells']:>8} {r['reduced']:>8} {r['ratio']:>8.2f} "
              f"{r['chains_ms']:>7.1f}ms {r['coreduce_ms']:>7.1f}ms {r['smith_ms']:>7.1f}ms")
    return 0


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="interval:n, cycle:n or grid:mxn")
    common.add_argument("--k", type=_nonneg, help="number of components (k, or j for config-space)")
    common.add_argument("--p", type=_nonneg, help="string length in B_k")
    common.add_argument("--q", type=_nonneg, help="string length in A_k")
    common.add_argument("--region", help="open set V as point ranges, e.g. 0-3,5 (default: whole model)")
    common.add_argument("--subbasis", help="stride:s or a ball-list file (default: all balls)")
    common.add_argument("--max-degree", type=_nonneg, help="highest homology degree")
    common.add_argument("--top", type=_nonneg, help="nerve truncation dimension (default max-degree + 1)")
    common.add_argument("--coeff", choices=("integer", "f2"), default="integer",
                        help="integer, or f2 to compare mod-2 Betti numbers first")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=_nonneg, help="randomized batch size")
    common.add_argument("--sweep", type=_nonneg, default=2, help="resolution steps for nerve-ak")
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("--format", choices=("table", "jsonl"), default="table")
    common.add_argument("--cache-dir", help="homology cache directory (env SPECIALOPEN_CACHE_DIR)")
    common.add_argument("--timings", action="store_true", help="include wall times in the output")
    common.add_argument("--input", help="serialized simplicial set (JSON) or category (text)")
    common.add_argument("--output", help="nerve: write the simplicial set as JSON; bench: directory for reduced boundary matrices")

    parser = argparse.ArgumentParser(prog="specialopen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run theorem checks")
    v.add_argument("check", choices=CHECKS)
    sub.add_parser("homology", parents=[common], help="homology of a nerve or serialized simplicial set")
    sub.add_parser("bench", parents=[common], help="time the homology engine on a seeded corpus")
    sub.add_parser("config-space", parents=[common], help="homology of the configuration complex")
    sub.add_parser("nerve", parents=[common], help="build a nerve and report its size")
    return parser


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


COMMANDS = {"verify": cmd_verify, "homology": cmd_homology, "bench": cmd_bench,
            "config-space": cmd_config_space, "nerve": cmd_nerve}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, *USAGE_ERRORS) as exc:
        parser.print_usage(sys.stderr)
        print(f"specialopen: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
