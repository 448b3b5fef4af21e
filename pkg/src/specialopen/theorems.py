"""Desk-scale checks of the equivalence statements, each returning a CheckReport.

Homotopy equivalences are checked through integral homology (plus pi0) of
finite models; categorical statements are checked exactly.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .cache import HomologyCache, complex_key
from .fincat import (
    CatFunctor,
    CatValuedFunctor,
    FinCategory,
    FinPoset,
    categories_isomorphic,
    comma_category,
    grothendieck,
    has_initial,
    opposite,
    validate_category,
)
from .homology import (
    HomologyError,
    HomologySummary,
    betti_f2,
    coreduce,
    homology,
    normalized_chains,
)
from .manifolds import (
    ManifoldModel,
    ModelError,
    OpenSetRep,
    PosetBundle,
    build_AkBkp,
    build_AkqBk,
    build_Bk,
    config_complex,
    enumerate_balls,
    restrict_to,
    validate_basis,
)
from .sset import (
    SetFunctor,
    SimplicialSet,
    find_isomorphism,
    hocolim,
    limit_discrete,
    nerve,
    nerve_functor,
    pi0,
    projection_to_nerve,
    vertex_fiber,
)

SCHEMA_VERSION = 1
TOL = 1e-12
ISOTOPY_NOTE = "isotopy equivalence modeled by component bijection of convex balls"

PASS, FAIL = "pass", "fail"
INCONCLUSIVE_TRUNCATION = "inconclusive-truncation"
INCONCLUSIVE = "inconclusive"


@dataclass
class CheckReport:
    name: str
    params: dict
    verdict: str
    left: dict | None = None
    right: dict | None = None
    degrees_valid: int | None = None
    wall_time_ms: float | None = None
    stabilization: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_record(self, timings: bool = False) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "name": self.name,
            "params": self.params,
            "verdict": self.verdict,
            "left": self.left,
            "right": self.right,
            "degrees_valid": self.degrees_valid,
            "wall_time_ms": round(self.wall_time_ms, 3) if timings and self.wall_time_ms is not None else None,
            "stabilization": self.stabilization,
            "notes": self.notes,
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_record(timings), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        d = json.loads(text)
        if d.get("v") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('v')!r}")
        return cls(d["name"], d["params"], d["verdict"], d.get("left"), d.get("right"),
                   d.get("degrees_valid"), d.get("wall_time_ms"), d.get("stabilization"), d.get("notes", []))


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.wall_time_ms = (time.perf_counter() - t0) * 1000.0
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


# -- homology plumbing --------------------------------------------------------


@dataclass
class Computed:
    summary: HomologySummary
    f2: list[int | None] | None
    components: int
    size: int
    reduced_size: int

    def as_dict(self) -> dict:
        d = {"homology": self.summary.to_dict(), "text": str(self.summary), "pi0": self.components,
             "cells": self.size, "reduced_cells": self.reduced_size}
        if self.f2 is not None:
            d["f2"] = self.f2
        return d


def complex_homology(x: SimplicialSet, through: int, coeff: str = "integer",
                     cache: HomologyCache | None = None, check: bool = True) -> Computed:
    """Homology of ``x`` through ``through`` after coreduction."""
    if x.top < through + 1 and x.truncated:
        raise HomologyError("truncation insufficient")
    top = min(x.top, through + 1)
    cc = normalized_chains(x, top)
    if check:
        cc.check()
    comps = pi0(x)
    key = complex_key(cc, through=through, coeff=coeff) if cache is not None and cache.enabled else None
    hit = cache.lookup(key) if key else None
    if hit is not None:
        # a hit skips both coreduction and Smith reduction
        return Computed(HomologySummary.from_dict(hit["homology"]), hit.get("f2"), comps, cc.size(),
                        hit["reduced_cells"])
    red, _ = coreduce(cc)
    f2 = betti_f2(red, through, strict=False) if coeff == "f2" else None
    summary = homology(red, through, strict=False)
    if key:
        cache.store(key, {"homology": summary.to_dict(), "f2": f2, "reduced_cells": red.size()})
    return Computed(summary, f2, comps, cc.size(), red.size())


def category_homology(c: FinCategory, through: int, coeff: str = "integer",
                      cache: HomologyCache | None = None) -> Computed:
    return complex_homology(nerve(c, through + 1), through, coeff, cache)


def compare_summaries(a: HomologySummary, b: HomologySummary, through: int) -> tuple[str, int | None]:
    """Verdict and the highest degree where both sides are known and agree."""
    valid = None
    for n in range(through + 1):
        ba = a.betti[n] if n < a.degrees else 0
        bb = b.betti[n] if n < b.degrees else 0
        if ba is None or bb is None:
            return INCONCLUSIVE_TRUNCATION, valid
        ta = a.torsion[n] if n < a.degrees else ()
        tb = b.torsion[n] if n < b.degrees else ()
        if ba != bb or ta != tb:
            return FAIL, valid
        valid = n
    return PASS, valid


def _compare(left: Computed, right: Computed, through: int, coeff: str) -> tuple[str, int | None]:
    if coeff == "f2" and left.f2 is not None and right.f2 is not None:
        known = [n for n in range(through + 1) if left.f2[n] is not None and right.f2[n] is not None]
        if any(left.f2[n] != right.f2[n] for n in known):
            return FAIL, None
    return compare_summaries(left.summary, right.summary, through)


# -- NerveAk ------------------------------------------------------------------


def config_homology(model: ManifoldModel, k: int, through: int, coeff: str = "integer",
                    cache: HomologyCache | None = None) -> Computed:
    """Degreewise direct sum over j = 0..k of the configuration complex homology."""
    total = None
    for j in range(k + 1):
        c = complex_homology(config_complex(model, j, through + 1), through, coeff, cache)
        if total is None:
            total = c
        else:
            f2 = None
            if c.f2 is not None:
                f2 = [None if a is None or b is None else a + b for a, b in zip(total.f2, c.f2)]
            total = Computed(total.summary.direct_sum(c.summary), f2, total.components + c.components,
                             total.size + c.size, total.reduced_size + c.reduced_size)
    return total


def _nerve_ak_once(model: ManifoldModel, k: int, through: int, coeff: str, cache) -> tuple:
    bundle = build_Bk(model, enumerate_balls(model), k)
    left = category_homology(bundle.A_category, through, coeff, cache)
    right = config_homology(model, k, through, coeff, cache)
    verdict, valid = _compare(left, right, through, coeff)
    return bundle, left, right, verdict, valid


def _check_nerve_ak_model(model: ManifoldModel, k: int) -> None:
    if model.dim != 1:
        raise ModelError("nerve-ak is only available for 1-dimensional models")
    if model.n < 3 * k:
        raise ModelError(f"model too small: {model} has {model.n} points, need at least {3 * k}")


@_timed
def verify_nerve_ak(model: ManifoldModel, k: int, through: int = 1, sweep: int = 2,
                    coeff: str = "integer", cache: HomologyCache | None = None) -> CheckReport:
    """Nerve of A_k against the disjoint union of configuration spaces, with a resolution sweep."""
    _check_nerve_ak_model(model, k)
    if through < 0:
        raise ModelError("truncation insufficient: degree must be nonnegative")
    bundle, left, right, verdict, valid = _nerve_ak_once(model, k, through, coeff, cache)
    params = {"model": model.spec(), "k": k, "max_degree": through, "coeff": coeff, "sweep": sweep}
    rows = [{"model": model.spec(), "left": str(left.summary), "right": str(right.summary), "verdict": verdict}]
    for step in range(1, sweep + 1):
        bigger = ManifoldModel(model.kind, (model.size[0] + step,))
        _, l2, r2, v2, _ = _nerve_ak_once(bigger, k, through, coeff, cache)
        rows.append({"model": bigger.spec(), "left": str(l2.summary), "right": str(r2.summary), "verdict": v2})
    stable = all(r["verdict"] == PASS for r in rows) and len({r["left"] for r in rows}) == 1
    left_d = left.as_dict()
    left_d["objects"] = len(bundle.objects)
    return CheckReport("nerve-ak", params, verdict, left_d, right.as_dict(), valid,
                       stabilization={"rows": rows, "verdict": "stable" if stable else "unstable"},
                       notes=[ISOTOPY_NOTE])


# -- Thomason -----------------------------------------------------------------


@_timed
def verify_thomason(c: FinCategory, f: CatValuedFunctor, through: int = 2, coeff: str = "integer",
                    params: dict | None = None, cache: HomologyCache | None = None) -> CheckReport:
    """Nerve of the Grothendieck construction against the homotopy colimit of nerves."""
    if through < 0:
        raise HomologyError("truncation insufficient")
    total, _ = grothendieck(c, f)
    problems = validate_category(total)
    left = category_homology(total, through, coeff, cache)
    right = complex_homology(hocolim(nerve_functor(f, through + 1)), through, coeff, cache)
    verdict, valid = _compare(left, right, through, coeff)
    if problems:
        verdict = FAIL
    ld = left.as_dict()
    ld["objects"] = len(total.objects)
    ld["morphisms"] = total.num_morphisms
    return CheckReport("thomason", dict(params or {}, max_degree=through, coeff=coeff), verdict,
                       ld, right.as_dict(), valid, notes=problems[:5])


def random_poset(rng: random.Random, n: int, density: float = 0.5) -> FinPoset:
    """Transitive closure of a random DAG on a shuffled order of ``0..n-1``."""
    order = list(range(n))
    rng.shuffle(order)
    up = [{i} for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                up[order[a]].add(order[b])
    for _ in range(n):
        for i in range(n):
            for j in list(up[i]):
                up[i] |= up[j]
    return FinPoset.from_up_sets(list(range(n)), up)


def _topological(p: FinPoset) -> list[int]:
    return sorted(range(len(p)), key=lambda i: (len(p.down_indices(i)), i))


def random_monotone(rng: random.Random, p: FinPoset, q: FinPoset, tries: int = 20) -> dict:
    """Random order-preserving map, falling back to a constant map."""
    order = _topological(p)
    for _ in range(tries):
        img: dict[int, int] = {}
        ok = True
        for x in order:
            allowed = set(range(len(q)))
            for y in p.down_indices(x):
                if y != x:
                    allowed &= q.up_indices(img[y])
            if not allowed:
                ok = False
                break
            img[x] = rng.choice(sorted(allowed))
        if ok:
            return img
    c = rng.randrange(len(q))
    return {x: c for x in range(len(p))}


def random_poset_functor(rng: random.Random, max_objects: int = 4, max_elements: int = 4,
                         tries: int = 50) -> tuple[FinCategory, CatValuedFunctor]:
    """A random poset ``C`` and a strict functor from it to finite posets.

    Objects are handled in topological order.  Maps out of the covering
    predecessors of ``b`` are drawn at random; all other maps into ``b`` are
    forced by composition, and a draw is kept only if the forced values agree.
    If no draw works, every map into ``b`` becomes constant.
    """
    cp = random_poset(rng, rng.randint(1, max_objects))
    c = cp.as_category("C")
    values = [random_poset(rng, rng.randint(1, max_elements)) for _ in range(len(cp))]
    maps: dict[tuple[int, int], dict[int, int]] = {}
    for b in _topological(cp):
        below = [a for a in cp.down_indices(b) if a != b]
        covers = [a for a in below if not any(a2 != a and a2 in cp.up_indices(a) for a2 in below)]
        chosen = None
        for _ in range(tries):
            cand = {a: random_monotone(rng, values[a], values[b]) for a in covers}
            forced: dict[int, dict[int, int]] = dict(cand)
            ok = True
            for a in sorted(below, key=lambda x: -len(cp.up_indices(x))):
                if a in cand:
                    continue
                for cov in covers:
                    if cov in cp.up_indices(a):
                        m = {x: cand[cov][maps[(a, cov)][x]] for x in range(len(values[a]))}
                        if forced.setdefault(a, m) != m:
                            ok = False
            if ok:
                chosen = forced
                break
        if chosen is None:
            y = rng.randrange(len(values[b]))
            chosen = {a: {x: y for x in range(len(values[a]))} for a in below}
        for a in below:
            maps[(a, b)] = chosen[a]
    cats = {a: values[a].as_category() for a in range(len(cp))}
    mor = {}
    for m in c.morphisms:
        a, b = c.src[m], c.dst[m]
        mor[m] = CatFunctor.identity(cats[a]) if a == b else CatFunctor(cats[a], cats[b], maps[(a, b)])
    return c, CatValuedFunctor(c, cats, mor)


def semidirect_instance() -> tuple[FinCategory, CatValuedFunctor]:
    """Z/2 acting on Z/3 by inversion, both as one-object categories."""
    z2 = FinCategory.from_group([0, 1], lambda a, b: (a + b) % 2, 0)
    z3 = FinCategory.from_group([0, 1, 2], lambda a, b: (a + b) % 3, 0)
    inv = CatFunctor(z3, z3, {"*": "*"}, [0, 2, 1])
    return z2, CatValuedFunctor(z2, {"*": z3}, {0: CatFunctor.identity(z3), 1: inv})


def symmetric_group_3() -> FinCategory:
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]
    return FinCategory.from_group(perms, lambda g, f: tuple(g[f[i]] for i in range(3)), (0, 1, 2))


@_timed
def verify_semidirect() -> CheckReport:
    """The Grothendieck construction of Z/2 on Z/3 against the S_3 table."""
    c, f = semidirect_instance()
    total, _ = grothendieck(c, f)
    s3 = symmetric_group_3()
    iso = categories_isomorphic(total, s3)
    one_object = len(total.objects) == 1 and total.num_morphisms == 6
    ok = one_object and iso is not None and not validate_category(total)
    left = {"objects": len(total.objects), "morphisms": total.num_morphisms,
            "abelian": all(total.compose(g, h) == total.compose(h, g) for g in total.morphisms for h in total.morphisms)}
    right = {"objects": 1, "morphisms": 6, "isomorphic": iso is not None}
    return CheckReport("semidirect", {"group": "Z/2 x| Z/3"}, PASS if ok else FAIL, left, right)


# -- vertex fibers --------------------------------------------------------------


@_timed
def verify_vertex_fiber(c: FinCategory, f, obj=None, params: dict | None = None) -> CheckReport:
    """Each strict vertex fiber of the projection hocolim F -> N(C) against F(c).

    ``f`` is an SSetFunctor; ``obj`` restricts to one object.
    """
    p = projection_to_nerve(f)
    base = p.target
    objs = c.objects if obj is None else [obj]
    failures = []
    for a in objs:
        fib = vertex_fiber(p, base.vertex(a))
        if find_isomorphism(fib, f(a)) is None:
            failures.append(repr(a))
    counts = {repr(a): f(a).counts() for a in objs}
    return CheckReport("fiber", dict(params or {}), PASS if not failures else FAIL,
                       {"fibers_checked": len(objs), "failures": failures}, {"values": counts})


def random_fiber_instance(rng: random.Random):
    c, cf = random_poset_functor(rng, max_objects=3, max_elements=4)
    return c, nerve_functor(cf, 3)


# -- comma categories of J --------------------------------------------------------


@_timed
def verify_homotopy_terminal_J(bundle: PosetBundle, q: int, v: OpenSetRep | None = None,
                               params: dict | None = None) -> CheckReport:
    """Every comma category (d | J) has an initial object; it should be the constant string."""
    cat, j = build_AkqBk(bundle, q, v)
    missing, off = [], []
    for d in cat.objects:
        comma = comma_category(j, d)
        init = has_initial(comma)
        if init is None:
            missing.append(repr(d))
        elif init[0] != d[-1]:
            off.append(repr(d))
    verdict = PASS if not missing else INCONCLUSIVE
    return CheckReport(
        "terminal-j", dict(params or {}, q=q), verdict,
        {"objects": len(cat.objects), "without_initial": missing[:10]},
        {"initial_is_constant_last": not off, "exceptions": off[:10]},
        notes=[ISOTOPY_NOTE])


# -- Grothendieck decomposition -------------------------------------------------


def decomposition_functor(bundle: PosetBundle, p: int) -> CatValuedFunctor:
    """``W |-> A_k(B_k)_{p-1}(W)`` on ``A_k`` with inclusion functors."""
    a_cat = bundle.A_category
    values = {w: build_AkBkp(restrict_to(bundle, w), p - 1) for w in a_cat.objects}

    def fmap(m):
        src, dst = values[a_cat.src[m]], values[a_cat.dst[m]]
        return CatFunctor(src, dst, {x: x for x in src.objects})

    return CatValuedFunctor(a_cat, values, {m: fmap(m) for m in a_cat.morphisms})


@_timed
def verify_grothendieck_decomposition(bundle: PosetBundle, p: int, v: OpenSetRep | None = None,
                                      params: dict | None = None) -> CheckReport:
    """A_k(B_k)_p against A_k integrated over A_k(B_k)_{p-1}(-), with the last-entry hint."""
    if p < 1:
        raise ModelError("p must be at least 1")
    b = bundle if v is None else restrict_to(bundle, v)
    left = build_AkBkp(b, p)
    total, _ = grothendieck(b.A_category, decomposition_functor(b, p))
    hint = {s: (s[-1], s[:-1]) for s in left.objects}
    iso = None
    if set(hint.values()) == set(total.objects):
        iso = categories_isomorphic(left, total, hint)
    return CheckReport(
        "decomposition", dict(params or {}, p=p), PASS if iso is not None else FAIL,
        {"objects": len(left.objects), "morphisms": left.num_morphisms},
        {"objects": len(total.objects), "morphisms": total.num_morphisms, "hinted_isomorphism": iso is not None},
        notes=[ISOTOPY_NOTE])


# -- refinement -----------------------------------------------------------------


def _inclusion_ok(small: FinCategory, big: FinCategory) -> bool:
    return all(x in big for x in small.objects) and all(
        big.arrow(small.src[m], small.dst[m]) is not None for m in small.morphisms)


@_timed
def verify_refinement(model: ManifoldModel, k: int, p: int, v: OpenSetRep | None, subfamily,
                      through: int = 1, coeff: str = "integer", params: dict | None = None,
                      cache: HomologyCache | None = None) -> CheckReport:
    """Nerves of the string categories over a sub-basis and over the full basis."""
    full = enumerate_balls(model)
    fullset = {b.points for b in full}
    if not all(b.points in fullset for b in subfamily):
        raise ModelError("subfamily is not contained in the ball family")
    if not validate_basis(model, subfamily):
        raise ModelError("subfamily not a basis")
    big = build_Bk(model, full, k)
    small = build_Bk(model, subfamily, k)
    cb, cs = build_AkBkp(big, p, v), build_AkBkp(small, p, v)
    right = category_homology(cb, through, coeff, cache)
    left = category_homology(cs, through, coeff, cache)
    verdict, valid = _compare(left, right, through, coeff)
    if verdict == PASS and left.components != right.components:
        verdict = FAIL
    included = _inclusion_ok(cs, cb)
    if not included:
        verdict = FAIL
    ld, rd = left.as_dict(), right.as_dict()
    ld["objects"], rd["objects"] = len(cs.objects), len(cb.objects)
    return CheckReport("refinement", dict(params or {}, model=model.spec(), k=k, p=p, max_degree=through),
                       verdict, ld, rd, valid, notes=[ISOTOPY_NOTE] + ([] if included else ["inclusion failed"]))


# -- discrete Kan extension ---------------------------------------------------------


def kan_extend_discrete(bundle: PosetBundle, sets: Mapping[OpenSetRep, Sequence],
                        restrict: Callable[[OpenSetRep, OpenSetRep, object], object],
                        v: OpenSetRep | None = None) -> list[tuple]:
    """Limit of a set-valued cofunctor over ``B_k(v)``.

    ``restrict(u, w, x)`` sends ``x`` in ``F(w)`` to ``F(u)`` for ``u <= w``.
    Families are tuples ordered like the objects of ``B_k(v)``.
    """
    b = bundle if v is None else restrict_to(bundle, v)
    op = opposite(b.B_category)
    functor = SetFunctor(op, {u: sets[u] for u in op.objects},
                         lambda m, x: restrict(op.dst[m], op.src[m], x))
    return limit_discrete(functor)


def component_colorings(bundle: PosetBundle, colors: Sequence = (0, 1)):
    """The cofunctor ``U |-> maps(components of U, colors)`` and its restriction."""
    model = bundle.model
    comps = {u: model.components(u.points) for u in bundle.objects}
    sets = {u: list(itertools.product(colors, repeat=len(comps[u]))) for u in bundle.objects}

    def restrict(u, w, x):
        cw = comps[w]
        return tuple(x[next(i for i, big in enumerate(cw) if small <= big)] for small in comps[u])

    return sets, restrict


# -- barycentric retraction ------------------------------------------------------------


@dataclass(frozen=True)
class BarycentricPoint:
    coords: tuple[float, ...]
    q: int

    def __post_init__(self):
        if not self.coords:
            raise ValueError("empty coordinate list")
        if any(x < -TOL for x in self.coords):
            raise ValueError("negative barycentric coordinate")
        if abs(math.fsum(self.coords) - 1.0) > TOL:
            raise ValueError("coordinates must sum to 1")
        if not 0 <= self.q < len(self.coords):
            raise ValueError("covering index out of range")


def bary_retract(x: BarycentricPoint) -> BarycentricPoint:
    """Zero the coordinates before ``q`` and renormalize the tail."""
    tail = math.fsum(x.coords[x.q:])
    if tail <= TOL:
        raise ValueError("zero tail")
    out = [0.0] * x.q + [c / tail for c in x.coords[x.q:]]
    return BarycentricPoint(tuple(out), x.q)


def bary_homotopy(x: BarycentricPoint, t: float) -> BarycentricPoint:
    """``(1 - t) x + t * retract(x)``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    bar = bary_retract(x)
    out = tuple((1.0 - t) * a + t * b for a, b in zip(x.coords, bar.coords))
    # renormalize away rounding drift
    s = math.fsum(out)
    return BarycentricPoint(tuple(c / s for c in out), x.q)


def _close(a: Sequence[float], b: Sequence[float]) -> bool:
    return len(a) == len(b) and all(abs(x - y) <= TOL for x, y in zip(a, b))


def _on_string(objs: Sequence[int], coords: Sequence[float], covers: Callable[[int], bool],
               recharacterized: bool = False, t: float = 1.0) -> dict[int, float]:
    """Apply the homotopy at time ``t`` on one simplex; result keyed by object."""
    if recharacterized:
        q = next(i for i, o in enumerate(objs) if covers(o) and coords[i] != 0)
    else:
        q = next(i for i, o in enumerate(objs) if covers(o))
    h = bary_homotopy(BarycentricPoint(tuple(coords), q), t)
    return {o: c for o, c in zip(objs, h.coords) if c != 0.0}


def _same_point(a: dict[int, float], b: dict[int, float]) -> bool:
    keys = set(a) | set(b)
    return all(abs(a.get(x, 0.0) - b.get(x, 0.0)) <= TOL for x in keys)


def shared_face_instance(rng: random.Random) -> bool:
    """Two strings sharing a substring, with a point supported on it; both retractions agree."""
    universe = rng.randint(4, 12)
    threshold = rng.randint(0, universe - 1)
    covers = (lambda o: o >= threshold)
    pool = list(range(universe))
    shared = sorted(rng.sample(pool, rng.randint(1, universe)))
    if not any(covers(o) for o in shared):
        shared = sorted(set(shared) | {rng.randint(threshold, universe - 1)})
    rest = [o for o in pool if o not in shared]
    s1 = sorted(set(shared) | set(rng.sample(rest, rng.randint(0, len(rest)))))
    s2 = sorted(set(shared) | set(rng.sample(rest, rng.randint(0, len(rest)))))
    weights = {o: rng.random() + 1e-3 for o in shared}
    total = math.fsum(weights.values())
    x1 = [weights[o] / total if o in weights else 0.0 for o in s1]
    x2 = [weights[o] / total if o in weights else 0.0 for o in s2]
    x1[-1] += 1.0 - math.fsum(x1)
    x2[-1] += 1.0 - math.fsum(x2)
    x1 = [max(c, 0.0) for c in x1]
    x2 = [max(c, 0.0) for c in x2]
    t = rng.random()
    ok = True
    for tt in (t, 1.0):
        a = _on_string(s1, x1, covers, t=tt)
        b = _on_string(s2, x2, covers, t=tt)
        ra = _on_string(s1, x1, covers, recharacterized=True, t=tt)
        ok &= _same_point(a, b) and _same_point(a, ra)
    return ok


def random_bary_point(rng: random.Random) -> BarycentricPoint:
    r = rng.randint(1, 8)
    raw = [rng.random() for _ in range(r)]
    if rng.random() < 0.3:
        for i in rng.sample(range(r), rng.randint(0, r - 1)):
            raw[i] = 0.0
    q = rng.randrange(r)
    if math.fsum(raw[q:]) == 0.0:
        raw[-1] = rng.random() + 0.1
    s = math.fsum(raw)
    coords = [c / s for c in raw]
    coords[-1] = max(0.0, 1.0 - math.fsum(coords[:-1]))
    return BarycentricPoint(tuple(coords), q)


@_timed
def verify_bary(seed: int, count: int = 10_000) -> CheckReport:
    """Idempotence, endpoint identities and shared-face agreement on random instances."""
    rng = random.Random(seed)
    idem = ends = shared = 0
    for _ in range(count):
        x = random_bary_point(rng)
        bar = bary_retract(x)
        if _close(bary_retract(bar).coords, bar.coords):
            idem += 1
        if _close(bary_homotopy(x, 0.0).coords, x.coords) and _close(bary_homotopy(x, 1.0).coords, bar.coords):
            ends += 1
        if shared_face_instance(rng):
            shared += 1
    ok = idem == ends == shared == count
    return CheckReport("bary", {"seed": seed, "count": count, "tolerance": TOL}, PASS if ok else FAIL,
                       {"idempotent": idem, "endpoints": ends}, {"shared_face": shared})
