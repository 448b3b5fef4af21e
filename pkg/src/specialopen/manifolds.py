"""Combinatorial manifold models, basis balls, and the special open-set posets.

Models are graphs: the interval ``L_n`` and cycle ``C_n`` (vertices
``0..n-1``) and the grid ``m x n`` (unit cells ``r * n + c`` with 4-adjacency).
Open sets are extensional point sets; a ball is an arc or an axis-aligned
rectangle.  Two balls count as disjoint only when they are also non-adjacent,
so a union of disjoint balls has exactly those balls as its components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .fincat import CatFunctor, FinCategory, FinPoset
from .sset import OrderComplex, SimplicialSet


class ModelError(ValueError):
    pass


# -- models -------------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldModel:
    kind: str  # "interval" | "cycle" | "grid"
    size: tuple[int, ...]

    def __post_init__(self):
        if self.kind == "cycle" and self.size[0] < 3:
            raise ModelError(f"model too small: cycle needs at least 3 vertices, got {self.size[0]}")
        if any(s < 1 for s in self.size):
            raise ModelError("model too small: sizes must be positive")

    @property
    def dim(self) -> int:
        return 2 if self.kind == "grid" else 1

    @property
    def n(self) -> int:
        """Number of points."""
        out = 1
        for s in self.size:
            out *= s
        return out

    @property
    def points(self) -> range:
        return range(self.n)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in self.points]
        if self.kind == "grid":
            rows, cols = self.size
            for r in range(rows):
                for c in range(cols):
                    v = r * cols + c
                    if c + 1 < cols:
                        adj[v].add(v + 1)
                        adj[v + 1].add(v)
                    if r + 1 < rows:
                        adj[v].add(v + cols)
                        adj[v + cols].add(v)
        else:
            n = self.n
            for v in range(n - 1):
                adj[v].add(v + 1)
                adj[v + 1].add(v)
            if self.kind == "cycle":
                adj[0].add(n - 1)
                adj[n - 1].add(0)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((u, v) for u in self.points for v in self.adjacency[u] if u < v))

    def coords(self, v: int) -> tuple[int, ...]:
        if self.kind == "grid":
            return divmod(v, self.size[1])
        return (v,)

    def components(self, pts: Iterable[int]) -> list[frozenset[int]]:
        pts = set(pts)
        out = []
        while pts:
            start = min(pts)
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for w in self.adjacency[v]:
                    if w in pts and w not in comp:
                        comp.add(w)
                        stack.append(w)
            pts -= comp
            out.append(frozenset(comp))
        out.sort(key=min)
        return out

    def spec(self) -> str:
        if self.kind == "grid":
            return f"grid:{self.size[0]}x{self.size[1]}"
        return f"{self.kind}:{self.size[0]}"

    def __str__(self):
        return self.spec()


def parse_model(text: str) -> ManifoldModel:
    """Parse ``interval:n``, ``cycle:n`` or ``grid:mxn``."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind in ("interval", "cycle"):
            size = (int(rest),)
        elif kind == "grid":
            a, b = rest.lower().split("x")
            size = (int(a), int(b))
        else:
            raise ModelError(f"unknown model kind {kind!r}")
    except ValueError as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed model spec {text!r}") from None
    return ManifoldModel(kind, size)


# -- balls and open sets ------------------------------------------------------


@dataclass(frozen=True, order=True)
class OpenSetRep:
    """Extensional open set: a sorted tuple of points."""

    points: tuple[int, ...]

    @classmethod
    def of(cls, pts: Iterable[int]) -> "OpenSetRep":
        return cls(tuple(sorted(set(pts))))

    @cached_property
    def mask(self) -> int:
        m = 0
        for v in self.points:
            m |= 1 << v
        return m

    def __len__(self):
        return len(self.points)

    def __contains__(self, v) -> bool:
        return v in self.points

    def issubset(self, other: "OpenSetRep") -> bool:
        return self.mask & ~other.mask == 0

    def __repr__(self):
        return "{" + ",".join(map(str, self.points)) + "}"


EMPTY = OpenSetRep(())


@dataclass(frozen=True)
class Ball:
    """An arc ``(start, length)`` or a rectangle ``(r0, c0, height, width)``."""

    shape: tuple[int, ...]
    points: frozenset[int]

    @property
    def start(self) -> tuple[int, ...]:
        return self.shape[:2] if len(self.shape) == 4 else self.shape[:1]

    def as_open(self) -> OpenSetRep:
        return OpenSetRep.of(self.points)

    def __repr__(self):
        return f"Ball{self.shape}"


def enumerate_balls(model: ManifoldModel) -> list[Ball]:
    """All arcs (proper arcs on a cycle) or all axis-aligned rectangles."""
    out = []
    if model.kind == "interval":
        n = model.n
        for start in range(n):
            for length in range(1, n - start + 1):
                out.append(Ball((start, length), frozenset(range(start, start + length))))
    elif model.kind == "cycle":
        n = model.n
        for start in range(n):
            for length in range(1, n):
                out.append(Ball((start, length), frozenset((start + i) % n for i in range(length))))
    else:
        rows, cols = model.size
        for r0 in range(rows):
            for c0 in range(cols):
                for h in range(1, rows - r0 + 1):
                    for w in range(1, cols - c0 + 1):
                        pts = frozenset((r0 + i) * cols + c0 + j for i in range(h) for j in range(w))
                        out.append(Ball((r0, c0, h, w), pts))
    return out


def validate_basis(model: ManifoldModel, family: Sequence[Ball]) -> bool:
    """Every point inside every ball has a family ball around it inside that ball."""
    full = enumerate_balls(model)
    by_point: dict[int, list[frozenset[int]]] = {v: [] for v in model.points}
    for b in family:
        for v in b.points:
            by_point[v].append(b.points)
    for big in full:
        for v in big.points:
            if not any(small <= big.points for small in by_point[v]):
                return False
    return True


def stride_family(model: ManifoldModel, s: int) -> list[Ball]:
    """Balls whose start coordinates are divisible by ``s``, plus all singletons."""
    if s < 1:
        raise ModelError("stride must be positive")
    return [b for b in enumerate_balls(model)
            if len(b.points) == 1 or all(x % s == 0 for x in b.start)]


def load_family(model: ManifoldModel, path: str | Path) -> list[Ball]:
    """Read a ball list: one ball per line as its points (grid cells as ``r,c``)."""
    full = {b.points: b for b in enumerate_balls(model)}
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#")[0].strip()
        if not line:
            continue
        pts = set()
        for tok in line.split():
            if "," in tok:
                r, c = map(int, tok.split(","))
                pts.add(r * model.size[1] + c)
            else:
                pts.add(int(tok))
        key = frozenset(pts)
        if key not in full:
            raise ModelError(f"line {lineno}: not a ball of {model}")
        out.append(full[key])
    return out


def parse_subbasis(model: ManifoldModel, spec: str | None) -> list[Ball]:
    if spec is None or spec in ("", "full"):
        return enumerate_balls(model)
    if spec.startswith("stride:"):
        try:
            s = int(spec.split(":", 1)[1])
        except ValueError:
            raise ModelError(f"malformed sub-basis spec {spec!r}") from None
        return stride_family(model, s)
    return load_family(model, spec)


def parse_region(model: ManifoldModel, spec: str | None) -> OpenSetRep:
    """``None``/``all`` for the whole model, or comma/range lists like ``0-3,5``."""
    if spec is None or spec in ("", "all", "M"):
        return OpenSetRep.of(model.points)
    if spec in ("empty", "none"):
        return EMPTY
    pts = set()
    for part in spec.split(","):
        a, _, b = part.partition("-")
        try:
            lo = int(a)
            hi = int(b) if b else lo
        except ValueError:
            raise ModelError(f"malformed region {spec!r}") from None
        pts.update(range(lo, hi + 1))
    if not pts <= set(model.points):
        raise ModelError(f"region {spec!r} leaves the model")
    return OpenSetRep.of(pts)


def is_isotopy_equiv(model: ManifoldModel, u: OpenSetRep, v: OpenSetRep) -> bool:
    """Inclusion ``u <= v`` induces a bijection on components."""
    if not u.issubset(v):
        raise ModelError("not a subset")
    cu, cv = model.components(u.points), model.components(v.points)
    if len(cu) != len(cv):
        return False
    return all(any(a <= b for a in cu) for b in cv)


# -- posets of special open sets ---------------------------------------------


@dataclass
class PosetBundle:
    model: ManifoldModel
    family: list[Ball]
    k: int
    objects: list[OpenSetRep]
    B: FinPoset
    A: FinPoset
    ncomp: dict[OpenSetRep, int] = field(default_factory=dict)

    @cached_property
    def B_category(self) -> FinCategory:
        return self.B.as_category("B")

    @cached_property
    def A_category(self) -> FinCategory:
        return self.A.as_category("A")

    def components(self, u: OpenSetRep) -> int:
        return self.ncomp[u]


def _separated(model: ManifoldModel, a: frozenset[int], b: frozenset[int]) -> bool:
    if a & b:
        return False
    adj = model.adjacency
    return not any(adj[v] & b for v in a)


def _bundle(model, family, k, objects, ncomp) -> PosetBundle:
    masks = [u.mask for u in objects]
    up_b, up_a = [], []
    comps = [model.components(u.points) for u in objects]
    for i, u in enumerate(objects):
        ub, ua = [], []
        for j, m in enumerate(masks):
            if masks[i] & ~m:
                continue
            ub.append(j)
            if len(comps[i]) == len(comps[j]) and all(any(a <= b for a in comps[i]) for b in comps[j]):
                ua.append(j)
        up_b.append(ub)
        up_a.append(ua)
    return PosetBundle(model, list(family), k, objects,
                       FinPoset.from_up_sets(objects, up_b), FinPoset.from_up_sets(objects, up_a), ncomp)


def build_Bk(model: ManifoldModel, family: Sequence[Ball], k: int) -> PosetBundle:
    """Unions of at most ``k`` pairwise separated family balls, with ``A_k`` inside."""
    if k < 0:
        raise ModelError("k must be nonnegative")
    if not validate_basis(model, family):
        raise ModelError("family is not a basis")
    balls = sorted({b.points for b in family}, key=lambda p: (len(p), sorted(p)))
    found: dict[OpenSetRep, int] = {EMPTY: 0}

    def extend(chosen: list[frozenset[int]], start: int):
        if chosen:
            u = OpenSetRep.of(itertools.chain.from_iterable(chosen))
            found.setdefault(u, len(chosen))
        if len(chosen) == k:
            return
        for i in range(start, len(balls)):
            b = balls[i]
            if all(_separated(model, b, c) for c in chosen):
                chosen.append(b)
                extend(chosen, i + 1)
                chosen.pop()

    extend([], 0)
    objects = sorted(found, key=lambda u: (found[u], len(u), u.points))
    return _bundle(model, family, k, objects, found)


def restrict_to(bundle: PosetBundle, v: OpenSetRep) -> PosetBundle:
    """Full subposets on the objects contained in ``v``."""
    objects = [u for u in bundle.objects if u.issubset(v)]
    family = [b for b in bundle.family if b.points <= set(v.points)]
    ncomp = {u: bundle.ncomp[u] for u in objects}
    keep = set(objects)
    B = bundle.B.subposet(lambda u: u in keep)
    A = bundle.A.subposet(lambda u: u in keep)
    return PosetBundle(bundle.model, family, bundle.k, objects, B, A, ncomp)


def _strings(chain: FinPoset, p: int) -> list[tuple[int, ...]]:
    """Weakly increasing index strings of length ``p + 1``."""
    out = [(i,) for i in range(len(chain))]
    for _ in range(p):
        out = [s + (j,) for s in out for j in sorted(chain.up_indices(s[-1]))]
    return out


def _string_poset(chain: FinPoset, morph: FinPoset, p: int) -> FinPoset:
    """Strings in ``chain`` ordered componentwise by ``morph``."""
    strings = _strings(chain, p)
    strings.sort()
    pos = {s: i for i, s in enumerate(strings)}
    up = []
    for s in strings:
        cands = [()]
        for i, a in enumerate(s):
            nxt = []
            for c in cands:
                for b in morph.up_indices(a):
                    if i == 0 or b in chain.up_indices(c[-1]):
                        nxt.append(c + (b,))
            cands = nxt
        up.append([pos[c] for c in cands])
    el = chain.elements
    return FinPoset.from_up_sets([tuple(el[i] for i in s) for s in strings], up)


def _region(bundle: PosetBundle, v: OpenSetRep | None) -> PosetBundle:
    return bundle if v is None else restrict_to(bundle, v)


def build_AkBkp(bundle: PosetBundle, p: int, v: OpenSetRep | None = None) -> FinCategory:
    """Strings ``U0 <= ... <= Up`` in ``B_k(v)``; morphisms componentwise in ``A_k``."""
    if p < 0:
        raise ModelError("p must be nonnegative")
    b = _region(bundle, v)
    return _string_poset(b.B, b.A, p).as_category(f"A(B)_{p}")


def build_AkqBk(bundle: PosetBundle, q: int, v: OpenSetRep | None = None) -> tuple[FinCategory, CatFunctor]:
    """Strings in ``A_k(v)`` with morphisms componentwise in ``B_k``, and ``J``."""
    if q < 0:
        raise ModelError("q must be nonnegative")
    b = _region(bundle, v)
    cat = _string_poset(b.A, b.B, q).as_category(f"(A)_{q}B")
    base = b.B_category
    j = CatFunctor(base, cat, {u: (u,) * (q + 1) for u in base.objects})
    return cat, j


def ak_poset_category(bundle: PosetBundle, v: OpenSetRep | None = None) -> FinCategory:
    return _region(bundle, v).A_category


# -- configuration complexes --------------------------------------------------


def config_cells(model: ManifoldModel, j: int) -> list[tuple]:
    """Cells of the discrete configuration complex.

    A cell is a sorted tuple of ``j`` graph cells (a vertex ``(v,)`` or an edge
    ``(u, v)``) whose closures lie at distance at least 2 from each other.
    """
    if model.dim != 1:
        raise ModelError("configuration complexes are only available for 1-dimensional models")
    if j < 0:
        raise ModelError("j must be nonnegative")
    if model.n < 3 * j:
        raise ModelError(f"model too small for j={j}: need at least {3 * j} points")
    graph_cells = [(v,) for v in model.points] + list(model.edges)
    adj = model.adjacency
    near = []
    for c in graph_cells:
        s = set(c)
        for v in c:
            s |= adj[v]
        near.append(s)
    out = []

    def rec(chosen: list[int], start: int, blocked: set):
        if len(chosen) == j:
            out.append(tuple(sorted(graph_cells[i] for i in chosen)))
            return
        for i in range(start, len(graph_cells)):
            if blocked.isdisjoint(graph_cells[i]):
                chosen.append(i)
                rec(chosen, i + 1, blocked | near[i])
                chosen.pop()

    rec([], 0, set())
    return sorted(set(out), key=lambda c: (sum(len(x) for x in c), c))


def config_face_poset(model: ManifoldModel, j: int) -> FinPoset:
    cells = config_cells(model, j)
    pos = {c: i for i, c in enumerate(cells)}
    down: list[set[int]] = []
    for c in cells:
        below = {c}
        frontier = [c]
        while frontier:
            x = frontier.pop()
            for idx, g in enumerate(x):
                if len(g) == 2:
                    for v in g:
                        y = tuple(sorted(x[:idx] + ((v,),) + x[idx + 1:]))
                        if y not in below:
                            below.add(y)
                            frontier.append(y)
        down.append({pos[y] for y in below})
    up: list[set[int]] = [set() for _ in cells]
    for i, d in enumerate(down):
        for a in d:
            up[a].add(i)
    return FinPoset.from_up_sets(cells, up)


def config_complex(model: ManifoldModel, j: int, top: int | None = None) -> SimplicialSet:
    """Barycentric subdivision of the discrete unordered configuration complex."""
    poset = config_face_poset(model, j)
    depth = j + 1 if top is None else top
    return OrderComplex(poset.as_category(f"conf{j}"), depth)
