"""Simplicial sets in Eilenberg-Zilber form, nerves, and homotopy colimits.

Only nondegenerate simplices are stored.  A possibly degenerate simplex is a
triple ``(m, s, eta)``: nondegenerate simplex ``s`` of dimension ``m`` and a
monotone surjection ``eta: [n] -> [m]`` given as a tuple of length ``n + 1``.
Face tables store ``(target, word)`` where ``word`` lists the positions ``i``
with ``eta(i) == eta(i + 1)``; this is the degeneracy word of the face.

String convention for replacements: a ``p``-string is ``c0 -> c1 -> ... -> cp``
(composable morphisms, first one out of ``c0``).  The simplicial replacement
puts ``F(c0)`` over such a string, the cosimplicial replacement ``F(cp)``.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from typing import Callable, Hashable, Mapping, Sequence

from .fincat import CatFunctor, CatValuedFunctor, FinCategory, SearchBudgetExceeded

Simplex = tuple  # (m, s, eta)


class SimplicialError(ValueError):
    pass


@lru_cache(maxsize=None)
def eta_from_word(n: int, word: tuple[int, ...]) -> tuple[int, ...]:
    eta = [0]
    for i in range(n):
        eta.append(eta[-1] if i in word else eta[-1] + 1)
    return tuple(eta)


def word_from_eta(eta: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i in range(len(eta) - 1) if eta[i] == eta[i + 1])


@lru_cache(maxsize=None)
def surjections(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All monotone surjections ``[n] -> [m]``."""
    if m > n or m < 0:
        return ()
    return tuple(eta_from_word(n, w) for w in itertools.combinations(range(n), n - m))


def identity_eta(n: int) -> tuple[int, ...]:
    return tuple(range(n + 1))


class SimplicialSet:
    """Finite (possibly truncated) simplicial set.

    ``faces[n][s]`` holds the ``n + 1`` faces of nondegenerate ``n``-simplex
    ``s`` as ``(target, word)``; ``faces[0]`` holds empty tuples.  ``labels``
    optionally names each simplex.
    """

    def __init__(self, faces: Sequence[Sequence[tuple]], top: int | None = None,
                 truncated: bool = False, labels: Sequence[Sequence] | None = None):
        self._faces = [list(level) for level in faces]
        self.top = len(self._faces) - 1 if top is None else top
        while len(self._faces) <= self.top:
            self._faces.append([])
        self.truncated = truncated
        self.labels = [list(level) for level in labels] if labels is not None else None

    # -- basic access ---------------------------------------------------------

    def count(self, n: int) -> int:
        return len(self._faces[n]) if 0 <= n <= self.top else 0

    def counts(self) -> list[int]:
        return [self.count(n) for n in range(self.top + 1)]

    @property
    def dimension(self) -> int:
        """Highest dimension holding a nondegenerate simplex (-1 if empty)."""
        d = -1
        for n in range(self.top + 1):
            if self.count(n):
                d = n
        return d

    def face_data(self, n: int, s: int) -> tuple:
        return self._faces[n][s]

    def label(self, n: int, s: int):
        return self.labels[n][s] if self.labels is not None else (n, s)

    def simplex(self, n: int, s: int) -> Simplex:
        return (n, s, identity_eta(n))

    def face(self, x: Simplex, i: int) -> Simplex:
        """``d_i`` of a possibly degenerate simplex, in normal form."""
        m, s, eta = x
        n = len(eta) - 1
        if not 0 <= i <= n or n == 0:
            raise SimplicialError(f"face index {i} out of range for dimension {n}")
        v = eta[i]
        rest = eta[:i] + eta[i + 1:]
        if (i > 0 and eta[i - 1] == v) or (i < n and eta[i + 1] == v):
            return (m, s, rest)
        t, word = self.face_data(m, s)[v]
        theta = eta_from_word(m - 1, word)
        return (m - 1 - len(word), t, tuple(theta[u if u < v else u - 1] for u in rest))

    def degeneracy(self, x: Simplex, j: int) -> Simplex:
        m, s, eta = x
        return (m, s, eta[: j + 1] + eta[j:])

    def normalize_face(self, n: int, s: int, i: int) -> tuple[int, tuple[int, ...]]:
        m, t, eta = self.face(self.simplex(n, s), i)
        return t, word_from_eta(eta)

    def explicit(self) -> "SimplicialSet":
        """Materialized copy with stored face tables."""
        faces = [[self.face_data(n, s) for s in range(self.count(n))] for n in range(self.top + 1)]
        labels = [[self.label(n, s) for s in range(self.count(n))] for n in range(self.top + 1)]
        return SimplicialSet(faces, self.top, self.truncated, labels)

    def __repr__(self):
        t = ", truncated" if self.truncated else ""
        return f"<{type(self).__name__} counts={self.counts()}{t}>"


def simplicial_violations(x: SimplicialSet, limit: int = 20) -> list[str]:
    """Failures of ``d_i d_j = d_{j-1} d_i`` (i < j), checked on every simplex."""
    out = []
    for n in range(2, x.top + 1):
        for s in range(x.count(n)):
            sx = x.simplex(n, s)
            faces = [x.face(sx, j) for j in range(n + 1)]
            for j in range(n + 1):
                for i in range(j):
                    if x.face(faces[j], i) != x.face(faces[i], j - 1):
                        out.append(f"d{i} d{j} != d{j - 1} d{i} on simplex {s} of dimension {n}")
                        if len(out) >= limit:
                            return out
    for n in range(1, x.top + 1):
        for s in range(x.count(n)):
            data = x.face_data(n, s)
            if len(data) != n + 1:
                out.append(f"simplex {s} of dimension {n} has {len(data)} faces")
            for t, word in data:
                if not 0 <= t < x.count(n - 1 - len(word)):
                    out.append(f"face of simplex {s} (dimension {n}) points outside the set")
    return out


def point() -> SimplicialSet:
    return SimplicialSet([[()]], 0)


def discrete_set(k: int) -> SimplicialSet:
    return SimplicialSet([[()] * k], 0)


def boundary_triangle() -> SimplicialSet:
    """The boundary of the 2-simplex: three vertices, three edges."""
    return SimplicialSet([[()] * 3, [((1, ()), (0, ())), ((2, ()), (0, ())), ((2, ()), (1, ()))]], 1)


def simplicial_complex(facets: Sequence[Sequence[int]], top: int | None = None) -> SimplicialSet:
    """Ordered simplicial complex generated by ``facets`` (vertex lists)."""
    simplices: set[tuple[int, ...]] = set()
    for f in facets:
        f = tuple(sorted(set(f)))
        for r in range(1, len(f) + 1):
            simplices.update(itertools.combinations(f, r))
    dim = max((len(s) for s in simplices), default=1) - 1
    top = dim if top is None else top
    levels = [sorted(s for s in simplices if len(s) == n + 1) for n in range(top + 1)]
    index = [{s: i for i, s in enumerate(level)} for level in levels]
    faces = []
    for n, level in enumerate(levels):
        if n == 0:
            faces.append([()] * len(level))
            continue
        faces.append([tuple((index[n - 1][s[:i] + s[i + 1:]], ()) for i in range(n + 1)) for s in level])
    return SimplicialSet(faces, top, dim > top, levels)


# -- nerves -------------------------------------------------------------------


class OrderComplex(SimplicialSet):
    """Nerve of a poset category: nondegenerate simplices are strict chains."""

    def __init__(self, category: FinCategory, top: int):
        self.category = category
        c = category
        n_obj = len(c.objects)
        strict_up = [[] for _ in range(n_obj)]
        for m in c.morphisms:
            a, b = c.index(c.src[m]), c.index(c.dst[m])
            if a != b:
                strict_up[a].append(b)
        for lst in strict_up:
            lst.sort()
        self._strict_up = strict_up
        chains: list[list[tuple[int, ...]]] = [[(i,) for i in range(n_obj)]]
        truncated = False
        for n in range(1, top + 2):
            prev = chains[-1]
            nxt = [ch + (b,) for ch in prev for b in strict_up[ch[-1]]]
            if n == top + 1:
                truncated = bool(nxt)
                break
            chains.append(nxt)
        self.chains = chains
        self._index = [{ch: i for i, ch in enumerate(level)} for level in chains]
        super().__init__([[] for _ in range(top + 1)], top, truncated)

    def count(self, n: int) -> int:
        return len(self.chains[n]) if 0 <= n <= self.top else 0

    def face_data(self, n: int, s: int) -> tuple:
        if n == 0:
            return ()
        ch = self.chains[n][s]
        idx = self._index[n - 1]
        return tuple((idx[ch[:i] + ch[i + 1:]], ()) for i in range(n + 1))

    def face_index(self, n: int, s: int, i: int) -> int:
        ch = self.chains[n][s]
        return self._index[n - 1][ch[:i] + ch[i + 1:]]

    def label(self, n: int, s: int):
        obj = self.category.objects
        return tuple(obj[i] for i in self.chains[n][s])

    def objects_of(self, n: int, s: int) -> tuple:
        return self.label(n, s)

    def string(self, n: int, s: int) -> tuple[int, ...]:
        c = self.category
        obj = self.objects_of(n, s)
        return tuple(c.arrow(obj[i], obj[i + 1]) for i in range(n))

    def vertex(self, a) -> int:
        return self.category.index(a)

    def locate(self, start, mors: Sequence[int]) -> Simplex:
        """Normal form of the string ``start --mors--> ...``."""
        c = self.category
        objs = [start] + [c.dst[m] for m in mors]
        chain, eta = [c.index(objs[0])], [0]
        for k in range(1, len(objs)):
            i = c.index(objs[k])
            if i != chain[-1]:
                chain.append(i)
            eta.append(len(chain) - 1)
        m = len(chain) - 1
        return (m, self._index[m][tuple(chain)], tuple(eta))


class CategoryNerve(SimplicialSet):
    """Nerve of a general finite category, truncated at ``top``.

    Nondegenerate ``n``-simplices are strings of ``n`` composable non-identity
    morphisms; faces that compose to identities come back degenerate.
    """

    def __init__(self, category: FinCategory, top: int):
        self.category = category
        c = category
        nonid = [m for m in c.morphisms if not c.is_identity(m)]
        out: dict = {a: [] for a in c.objects}
        for m in nonid:
            out[c.src[m]].append(m)
        strings: list[list[tuple[int, ...]]] = [[() for _ in c.objects]]
        if top >= 1:
            strings.append([(m,) for m in nonid])
        truncated = False
        for n in range(2, top + 2):
            nxt = [st + (g,) for st in strings[-1] for g in out[c.dst[st[-1]]]]
            if n == top + 1:
                truncated = bool(nxt)
                break
            strings.append(nxt)
        if top == 0:
            truncated = bool(nonid)
        self.strings = strings
        self._index = [{st: i for i, st in enumerate(level)} for level in strings[1:]]
        self._index.insert(0, {})
        super().__init__([[] for _ in range(top + 1)], top, truncated)

    def count(self, n: int) -> int:
        return len(self.strings[n]) if 0 <= n <= self.top else 0

    def objects_of(self, n: int, s: int) -> tuple:
        c = self.category
        if n == 0:
            return (c.objects[s],)
        st = self.strings[n][s]
        return (c.src[st[0]],) + tuple(c.dst[m] for m in st)

    def string(self, n: int, s: int) -> tuple[int, ...]:
        return self.strings[n][s]

    def label(self, n: int, s: int):
        return self.objects_of(n, s)[0] if n == 0 else self.strings[n][s]

    def vertex(self, a) -> int:
        return self.category.index(a)

    def locate(self, start, mors: Sequence[int]) -> Simplex:
        c = self.category
        kept, eta = [], [0]
        for m in mors:
            if not c.is_identity(m):
                kept.append(m)
            eta.append(len(kept))
        m = len(kept)
        if m == 0:
            return (0, c.index(start), tuple(eta))
        return (m, self._index[m][tuple(kept)], tuple(eta))

    def face_data(self, n: int, s: int) -> tuple:
        if n == 0:
            return ()
        c = self.category
        st = self.strings[n][s]
        out = []
        for i in range(n + 1):
            if i == 0:
                start, mors = c.dst[st[0]], st[1:]
            elif i == n:
                start, mors = c.src[st[0]], st[:-1]
            else:
                start = c.src[st[0]]
                mors = st[: i - 1] + (c.compose(st[i], st[i - 1]),) + st[i + 1:]
            m, t, eta = self.locate(start, mors)
            out.append((t, word_from_eta(eta)))
        return tuple(out)


def nerve(c: FinCategory, top: int, exact: bool = False) -> SimplicialSet:
    """Nerve of ``c`` through dimension ``top``.

    With ``exact`` a nerve with nondegenerate simplices above ``top`` raises.
    """
    if top < 0:
        raise SimplicialError("top dimension must be nonnegative")
    x = OrderComplex(c, top) if c.is_poset() else CategoryNerve(c, top)
    if exact and x.truncated:
        raise SimplicialError(f"truncation below requested degree: chains longer than {top} exist")
    return x


# -- maps ---------------------------------------------------------------------


class SimplicialMap:
    """Map of simplicial sets; ``images[n][s] = (target, word)``."""

    def __init__(self, source: SimplicialSet, target: SimplicialSet, images: Sequence[Sequence[tuple]]):
        self.source = source
        self.target = target
        self.images = [list(level) for level in images]

    def image(self, n: int, s: int) -> Simplex:
        t, word = self.images[n][s]
        return (n - len(word), t, eta_from_word(n, word))

    def apply(self, x: Simplex) -> Simplex:
        m, s, eta = x
        k, t, theta = self.image(m, s)
        return (k, t, tuple(theta[e] for e in eta))

    def then(self, other: "SimplicialMap") -> "SimplicialMap":
        """``other . self``."""
        images = []
        for n in range(self.source.top + 1):
            level = []
            for s in range(self.source.count(n)):
                _, t, eta = other.apply(self.image(n, s))
                level.append((t, word_from_eta(eta)))
            images.append(level)
        return SimplicialMap(self.source, other.target, images)

    @classmethod
    def identity(cls, x: SimplicialSet) -> "SimplicialMap":
        return cls(x, x, [[(s, ()) for s in range(x.count(n))] for n in range(x.top + 1)])

    def __eq__(self, other):
        if not isinstance(other, SimplicialMap):
            return NotImplemented
        return self.images == other.images


def map_violations(f: SimplicialMap) -> list[str]:
    x = f.source
    out = []
    for n in range(1, x.top + 1):
        for s in range(x.count(n)):
            sx = x.simplex(n, s)
            fx = f.apply(sx)
            for i in range(n + 1):
                if f.apply(x.face(sx, i)) != f.target.face(fx, i):
                    out.append(f"map does not commute with d{i} on simplex {s} of dimension {n}")
    return out


def nerve_map(g: CatFunctor, source: SimplicialSet, target: SimplicialSet) -> SimplicialMap:
    """The map of nerves induced by functor ``g``."""
    images = []
    for n in range(source.top + 1):
        level = []
        for s in range(source.count(n)):
            objs = source.objects_of(n, s)
            mors = [g.fmap(m) for m in source.string(n, s)]
            _, t, eta = target.locate(g(objs[0]), mors)
            level.append((t, word_from_eta(eta)))
        images.append(level)
    return SimplicialMap(source, target, images)


def subcomplex(x: SimplicialSet, keep: Sequence[Sequence[int]]) -> tuple[SimplicialSet, list[list[int]]]:
    """Sub-simplicial set on the kept ids; returns it with the id embedding."""
    new = [{s: i for i, s in enumerate(level)} for level in keep]
    faces, labels = [], []
    for n, level in enumerate(keep):
        rows = []
        for s in level:
            row = []
            for t, word in x.face_data(n, s):
                m = n - 1 - len(word)
                if t not in new[m]:
                    raise SimplicialError("kept simplices are not closed under faces")
                row.append((new[m][t], word))
            rows.append(tuple(row))
        faces.append(rows)
        labels.append([x.label(n, s) for s in level])
    trunc = x.truncated and len(keep) - 1 == x.top
    return SimplicialSet(faces, len(keep) - 1, trunc, labels), [list(level) for level in keep]


def vertex_fiber(p: SimplicialMap, v: int) -> SimplicialSet:
    """Strict preimage of the totally degenerate simplices on vertex ``v``."""
    if not 0 <= v < p.target.count(0):
        raise SimplicialError("vertex not in target")
    src = p.source
    keep = []
    for n in range(src.top + 1):
        keep.append([s for s in range(src.count(n)) if p.images[n][s] == (v, tuple(range(n)))])
    return subcomplex(src, keep)[0]


def pi0(x: SimplicialSet) -> int:
    parent = list(range(x.count(0)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if x.top >= 1:
        for s in range(x.count(1)):
            (b, _), (a, _) = x.face_data(1, s)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return len({find(a) for a in range(x.count(0))})


def find_isomorphism(x: SimplicialSet, y: SimplicialSet, budget: int = 10**6) -> list[list[int]] | None:
    """A dimensionwise bijection of nondegenerate simplices commuting with faces."""
    top = max(x.dimension, y.dimension)
    if any(x.count(n) != y.count(n) for n in range(top + 1)):
        return None
    counter = [budget]

    def vertex_profile(z, v):
        prof = []
        for n in range(1, top + 1):
            for s in range(z.count(n)):
                for i, (t, word) in enumerate(z.face_data(n, s)):
                    if len(word) == n - 1 and t == v:
                        prof.append((n, i))
        return tuple(sorted(prof))

    def signature(z, n, s, phi_lower):
        return tuple((phi_lower[n - 1 - len(w)][t], w) for t, w in z.face_data(n, s))

    def solve(n, phi):
        counter[0] -= 1
        if counter[0] < 0:
            raise SearchBudgetExceeded("search exceeded budget")
        if n > top:
            return phi
        if n == 0:
            gx: dict = {}
            gy: dict = {}
            for v in range(x.count(0)):
                gx.setdefault(vertex_profile(x, v), []).append(v)
            for v in range(y.count(0)):
                gy.setdefault(vertex_profile(y, v), []).append(v)
        else:
            ident = [list(range(y.count(k))) for k in range(n)]
            gx, gy = {}, {}
            for s in range(x.count(n)):
                gx.setdefault(signature(x, n, s, phi), []).append(s)
            for s in range(y.count(n)):
                gy.setdefault(signature(y, n, s, ident), []).append(s)
        if {k: len(v) for k, v in gx.items()} != {k: len(v) for k, v in gy.items()}:
            return None
        groups = sorted(gx, key=lambda k: (len(gx[k]), repr(k)))

        def assign(gi, level):
            if gi == len(groups):
                return solve(n + 1, phi + [level])
            for perm in itertools.permutations(gy[groups[gi]]):
                counter[0] -= 1
                if counter[0] < 0:
                    raise SearchBudgetExceeded("search exceeded budget")
                for a, b in zip(gx[groups[gi]], perm):
                    level[a] = b
                res = assign(gi + 1, level)
                if res is not None:
                    return res
            return None

        return assign(0, [None] * x.count(n))

    return solve(0, [])


def is_isomorphic(x: SimplicialSet, y: SimplicialSet, budget: int = 10**6) -> bool:
    return find_isomorphism(x, y, budget) is not None


# -- functors into simplicial sets and finite sets ----------------------------


class SSetFunctor:
    """Functor ``C -> sSet`` given by values and simplicial maps per morphism."""

    def __init__(self, category: FinCategory, values: Mapping[Hashable, SimplicialSet],
                 maps: Mapping[int, SimplicialMap] | Callable[[int], SimplicialMap]):
        self.category = category
        self.values = dict(values)
        self._maps = maps
        # values that are not truncated impose no bound on the usable top
        cut = [v.top for v in self.values.values() if v.truncated]
        full = [v.top for v in self.values.values()]
        self.top = min(cut) if cut else max(full, default=0)
        self.bounded = bool(cut)

    def __call__(self, a) -> SimplicialSet:
        return self.values[a]

    def fmap(self, m: int) -> SimplicialMap:
        return self._maps(m) if callable(self._maps) else self._maps[m]


def constant_sset_functor(c: FinCategory, x: SimplicialSet) -> SSetFunctor:
    ident = SimplicialMap.identity(x)
    return SSetFunctor(c, {a: x for a in c.objects}, {m: ident for m in c.morphisms})


def nerve_functor(f: CatValuedFunctor, top: int) -> SSetFunctor:
    """``c |-> nerve(f(c))`` with the induced maps."""
    c = f.source
    values = {a: nerve(f(a), top) for a in c.objects}
    maps = {m: nerve_map(f.fmap(m), values[c.src[m]], values[c.dst[m]]) for m in c.morphisms}
    return SSetFunctor(c, values, maps)


class SetFunctor:
    """Functor ``C -> FinSet``; ``action(m, x)`` applies morphism ``m``."""

    def __init__(self, category: FinCategory, sets: Mapping[Hashable, Sequence],
                 action: Mapping[int, Mapping] | Callable[[int, object], object]):
        self.category = category
        self.sets = {a: tuple(v) for a, v in sets.items()}
        self._action = action

    def __call__(self, a) -> tuple:
        return self.sets[a]

    def apply(self, m: int, x):
        if callable(self._action):
            return self._action(m, x)
        return self._action[m][x]


def set_functor_violations(f: SetFunctor) -> list[str]:
    c = f.category
    out = []
    for m in c.morphisms:
        target = set(f(c.dst[m]))
        for x in f(c.src[m]):
            if f.apply(m, x) not in target:
                out.append(f"F({m}) leaves its target set")
                break
    for a in c.objects:
        if any(f.apply(c.identity(a), x) != x for x in f(a)):
            out.append(f"F(id_{a!r}) is not the identity")
    for b in c.objects:
        for g0 in c.in_morphisms(b):
            for g1 in c.out_morphisms(b):
                h = c.compose(g1, g0)
                if any(f.apply(h, x) != f.apply(g1, f.apply(g0, x)) for x in f(c.src[g0])):
                    out.append(f"F({g1} . {g0}) != F({g1}) F({g0})")
    return out


def limit_discrete(f: SetFunctor) -> list[tuple]:
    """Matching families ``(x_c)`` with ``F(u)(x_c) = x_c'`` for all ``u: c -> c'``.

    Families are tuples ordered like ``f.category.objects``.
    """
    c = f.category
    objs = c.objects
    n = len(objs)
    pos = {a: i for i, a in enumerate(objs)}
    # constraint lists keyed by the later object in the assignment order
    order = sorted(range(n), key=lambda i: (len(f(objs[i])), i))
    rank = {i: r for r, i in enumerate(order)}
    checks: list[list[tuple[int, int, bool]]] = [[] for _ in range(n)]
    for m in c.morphisms:
        a, b = pos[c.src[m]], pos[c.dst[m]]
        if a == b and c.is_identity(m):
            continue
        later = a if rank[a] >= rank[b] else b
        checks[later].append((m, a, b))
    out = []
    assign: list = [None] * n

    def rec(r):
        if r == n:
            out.append(tuple(assign))
            return
        i = order[r]
        for x in f(objs[i]):
            assign[i] = x
            if all(f.apply(m, assign[a]) == assign[b] for m, a, b in checks[i]):
                rec(r + 1)
        assign[i] = None

    rec(0)
    out.sort(key=repr)
    return out


# -- bisimplicial sets and the diagonal ---------------------------------------


class BisimplicialSet:
    """Doubly graded nondegenerate cells with horizontal and vertical faces.

    ``hfaces[(p, q)][c][i]`` and ``vfaces[(p, q)][c][i]`` are elements
    ``(p0, q0, cell, eta_h, eta_v)``; the horizontal surjection has length
    ``p`` (``p - 1`` after a horizontal face) and so on.
    """

    def __init__(self, top: int, cells: Mapping[tuple[int, int], Sequence], hfaces, vfaces):
        self.top = top
        self.cells = {k: list(v) for k, v in cells.items()}
        self.hfaces = hfaces
        self.vfaces = vfaces

    def count(self, p: int, q: int) -> int:
        return len(self.cells.get((p, q), ()))

    def hface(self, x: tuple, i: int) -> tuple:
        p0, q0, c, eh, ev = x
        v = eh[i]
        rest = eh[:i] + eh[i + 1:]
        if v in rest:
            return (p0, q0, c, rest, ev)
        p1, q1, c1, fh, fv = self.hfaces[(p0, q0)][c][v]
        return (p1, q1, c1, tuple(fh[u if u < v else u - 1] for u in rest), tuple(fv[e] for e in ev))

    def vface(self, x: tuple, i: int) -> tuple:
        p0, q0, c, eh, ev = x
        v = ev[i]
        rest = ev[:i] + ev[i + 1:]
        if v in rest:
            return (p0, q0, c, eh, rest)
        p1, q1, c1, fh, fv = self.vfaces[(p0, q0)][c][v]
        return (p1, q1, c1, tuple(fh[e] for e in eh), tuple(fv[u if u < v else u - 1] for u in rest))

    def cell(self, p: int, q: int, c: int) -> tuple:
        return (p, q, c, identity_eta(p), identity_eta(q))


def bisimplicial_violations(b: BisimplicialSet, limit: int = 20) -> list[str]:
    out = []
    for (p, q), cells in b.cells.items():
        for c in range(len(cells)):
            x = b.cell(p, q, c)
            for j in range(p + 1):
                for i in range(j):
                    if p >= 2 and b.hface(b.hface(x, j), i) != b.hface(b.hface(x, i), j - 1):
                        out.append(f"horizontal identity fails at ({p},{q}) cell {c}")
            for j in range(q + 1):
                for i in range(j):
                    if q >= 2 and b.vface(b.vface(x, j), i) != b.vface(b.vface(x, i), j - 1):
                        out.append(f"vertical identity fails at ({p},{q}) cell {c}")
            if p >= 1 and q >= 1:
                for i in range(p + 1):
                    for j in range(q + 1):
                        if b.hface(b.vface(x, j), i) != b.vface(b.hface(x, i), j):
                            out.append(f"faces do not commute at ({p},{q}) cell {c}")
            if len(out) >= limit:
                return out
    return out


def _normalize_diagonal(x: tuple) -> tuple[tuple, tuple[int, ...]]:
    p0, q0, c, eh, ev = x
    common = tuple(k for k in range(len(eh) - 1) if eh[k] == eh[k + 1] and ev[k] == ev[k + 1])
    drop = {k + 1 for k in common}
    keep = [k for k in range(len(eh)) if k not in drop]
    return (p0, q0, c, tuple(eh[k] for k in keep), tuple(ev[k] for k in keep)), common


def diagonal(b: BisimplicialSet) -> SimplicialSet:
    """The diagonal simplicial set: ``n``-simplices are ``(n, n)``-elements."""
    levels: list[list[tuple]] = []
    for n in range(b.top + 1):
        level = []
        for (p0, q0), cells in sorted(b.cells.items()):
            if p0 > n or q0 > n or p0 + q0 < n:
                continue
            for c in range(len(cells)):
                for eh in surjections(n, p0):
                    rh = set(word_from_eta(eh))
                    for ev in surjections(n, q0):
                        if rh.isdisjoint(word_from_eta(ev)):
                            level.append((p0, q0, c, eh, ev))
        levels.append(level)
    index = [{x: i for i, x in enumerate(level)} for level in levels]
    faces: list[list[tuple]] = [[()] * len(levels[0])] if levels else []
    for n in range(1, b.top + 1):
        rows = []
        for x in levels[n]:
            row = []
            for i in range(n + 1):
                y, word = _normalize_diagonal(b.hface(b.vface(x, i), i))
                row.append((index[n - 1 - len(word)][y], word))
            rows.append(tuple(row))
        faces.append(rows)
    return SimplicialSet(faces, b.top, getattr(b, "truncated", False), levels)


class SimplicialReplacement(BisimplicialSet):
    """Simplicial replacement of ``F: C -> sSet``.

    Cell ``(p, q)`` pairs a nondegenerate ``p``-string ``c0 -> ... -> cp`` of
    the nerve of ``C`` with a nondegenerate ``q``-simplex of ``F(c0)``.
    ``d_0`` horizontally drops ``c0`` and pushes the simplex along the first
    morphism.
    """

    def __init__(self, f: SSetFunctor, top: int | None = None):
        top = f.top if top is None else top
        if f.bounded and top > f.top:
            raise SimplicialError("values are truncated below the requested top")
        c = f.category
        self.functor = f
        self.base = nerve(c, top)
        base = self.base
        cells: dict[tuple[int, int], list] = {}
        pos: dict = {}
        for p in range(top + 1):
            for s in range(base.count(p)):
                c0 = base.objects_of(p, s)[0]
                val = f(c0)
                for q in range(top + 1):
                    lst = cells.setdefault((p, q), [])
                    for sig in range(val.count(q)):
                        pos[(p, s, q, sig)] = len(lst)
                        lst.append((s, sig))
        self.pos = pos
        hfaces: dict = {}
        vfaces: dict = {}
        for (p, q), lst in cells.items():
            hrows, vrows = [], []
            for s, sig in lst:
                c0 = base.objects_of(p, s)[0]
                val = f(c0)
                sx = (q, sig, identity_eta(q))
                row = []
                for i in range(p + 1 if p else 0):
                    m, t, eta = base.face(base.simplex(p, s), i)
                    if i == 0:
                        first = base.string(p, s)[0]
                        qq, tau, theta = f.fmap(first).apply(sx)
                    else:
                        qq, tau, theta = sx
                    row.append((m, qq, pos[(m, t, qq, tau)], eta, theta))
                hrows.append(row)
                row = []
                for j in range(q + 1 if q else 0):
                    qq, tau, theta = val.face(sx, j)
                    row.append((p, qq, pos[(p, s, qq, tau)], identity_eta(p), theta))
                vrows.append(row)
            hfaces[(p, q)] = hrows
            vfaces[(p, q)] = vrows
        super().__init__(top, cells, hfaces, vfaces)
        self.truncated = base.truncated or any(v.truncated for v in f.values.values())


def srep(f: SSetFunctor, top: int | None = None) -> SimplicialReplacement:
    return SimplicialReplacement(f, top)


def hocolim(f: SSetFunctor, top: int | None = None) -> SimplicialSet:
    """Homotopy colimit as the diagonal of the simplicial replacement."""
    rep = srep(f, top)
    x = diagonal(rep)
    x.replacement = rep
    return x


def projection_to_nerve(f: SSetFunctor, top: int | None = None) -> SimplicialMap:
    """The map ``hocolim F -> nerve C`` forgetting the ``F``-coordinate."""
    x = hocolim(f, top)
    rep = x.replacement
    images = []
    for n in range(x.top + 1):
        level = []
        for (p0, q0, c, eh, ev) in x.labels[n]:
            s, _ = rep.cells[(p0, q0)][c]
            level.append((s, word_from_eta(eh)))
        images.append(level)
    return SimplicialMap(x, rep.base, images)


# -- cosimplicial replacement --------------------------------------------------


class CosimplicialDescriptor:
    """Shape of the cosimplicial replacement of ``F`` through codegree ``top``.

    ``strings[q]`` lists every ``q``-string (degenerate ones included) as a
    nerve element; the factor over string ``s`` is ``F(last object of s)``.
    ``coface[q][i][k] = (j, m)``: component ``k`` of ``d^i x`` is component
    ``j`` of ``x`` pushed along morphism ``m`` (None for the identity).
    ``codegeneracy[q][j][k]`` is the index of the source component.
    """

    def __init__(self, category: FinCategory, top: int):
        self.category = category
        self.top = top
        self.base = base = nerve(category, top)
        self.strings: list[list[Simplex]] = []
        for q in range(top + 1):
            self.strings.append([(m, s, eta) for m in range(q + 1) for s in range(base.count(m))
                                 for eta in surjections(q, m)])
        self.index = [{x: i for i, x in enumerate(level)} for level in self.strings]
        self.factors = [[self.last_object(x) for x in level] for level in self.strings]
        self.coface: list[list[list[tuple[int, int | None]]]] = [[]]
        for q in range(1, top + 1):
            per_i = []
            for i in range(q + 1):
                per_i.append([(self.index[q - 1][base.face(x, i)], self.last_morphism(x) if i == q else None)
                              for x in self.strings[q]])
            self.coface.append(per_i)
        self.codegeneracy: list[list[list[int]]] = []
        for q in range(top):
            self.codegeneracy.append([[self.index[q + 1][base.degeneracy(x, j)] for x in self.strings[q]]
                                      for j in range(q + 1)])

    def objects(self, x: Simplex) -> tuple:
        m, s, eta = x
        objs = self.base.objects_of(m, s)
        return tuple(objs[e] for e in eta)

    def last_object(self, x: Simplex):
        return self.objects(x)[-1]

    def last_morphism(self, x: Simplex) -> int | None:
        m, s, eta = x
        if len(eta) < 2 or eta[-1] == eta[-2]:
            return None
        return self.base.string(m, s)[eta[-1] - 1]

    def factor_counts(self) -> list[int]:
        return [len(level) for level in self.strings]


def cosimplicial_violations(d: CosimplicialDescriptor) -> list[str]:
    c = d.category

    def comp(g, f):
        if g is None:
            return f
        if f is None:
            return g
        h = c.compose(g, f)
        return None if c.is_identity(h) else h

    # index maps composed the contravariant way: (A then B)(k) reads B first
    def cof(q, i):
        return lambda k: d.coface[q][i][k]

    def codeg(q, j):
        return lambda k: (d.codegeneracy[q][j][k], None)

    def then(first, second):
        # x |-> second(first(x)); component k of the result
        def h(k):
            j, m = second(k)
            j2, m2 = first(j)
            return j2, comp(m, m2)
        return h

    out = []
    top = d.top
    for q in range(2, top + 1):
        for j in range(q + 1):
            for i in range(j):
                lhs, rhs = then(cof(q - 1, i), cof(q, j)), then(cof(q - 1, j - 1), cof(q, i))
                if any(lhs(k) != rhs(k) for k in range(len(d.strings[q]))):
                    out.append(f"d^{j} d^{i} != d^{i} d^{j - 1} in codegree {q}")
    for q in range(1, top):
        n = len(d.strings[q])
        for j in range(q + 1):
            for i in range(q + 2):
                # s^j d^i : codegree q -> q
                lhs = then(cof(q + 1, i), codeg(q, j))
                if i < j:
                    rhs = then(codeg(q - 1, j - 1), cof(q, i))
                elif i in (j, j + 1):
                    rhs = lambda k: (k, None)
                else:
                    rhs = then(codeg(q - 1, j), cof(q, i - 1))
                if any(lhs(k) != rhs(k) for k in range(n)):
                    out.append(f"s^{j} d^{i} identity fails in codegree {q}")
    for q in range(top - 1):
        for j in range(q + 1):
            for i in range(j + 1):
                lhs = then(codeg(q + 1, i), codeg(q, j))
                rhs = then(codeg(q + 1, j + 1), codeg(q, i))
                if any(lhs(k) != rhs(k) for k in range(len(d.strings[q]))):
                    out.append(f"s^{j} s^{i} != s^{i} s^{j + 1} in codegree {q}")
    return out


def crep_describe(category: FinCategory, top: int) -> CosimplicialDescriptor:
    return CosimplicialDescriptor(category, top)


# -- serialization ------------------------------------------------------------


def dumps_sset(x: SimplicialSet) -> str:
    """JSON text: per-dimension lists of face tuples ``[target, word]``."""
    faces = [[[[t, list(w)] for t, w in x.face_data(n, s)] for s in range(x.count(n))]
             for n in range(x.top + 1)]
    return json.dumps({"top": x.top, "truncated": bool(x.truncated), "faces": faces},
                      separators=(",", ":"))


def loads_sset(text: str) -> SimplicialSet:
    try:
        data = json.loads(text)
        faces = [[tuple((int(t), tuple(int(i) for i in w)) for t, w in row) for row in level]
                 for level in data["faces"]]
        top = int(data.get("top", len(faces) - 1))
        truncated = bool(data.get("truncated", False))
    except (ValueError, KeyError, TypeError) as exc:
        raise SimplicialError(f"malformed simplicial set: {exc}") from None
    x = SimplicialSet(faces, top, truncated)
    for n in range(1, x.top + 1):
        for s in range(x.count(n)):
            row = x.face_data(n, s)
            if len(row) != n + 1:
                raise SimplicialError(f"simplex {s} of dimension {n} needs {n + 1} faces")
            for t, w in row:
                m = n - 1 - len(w)
                if not 0 <= t < x.count(m) or any(not 0 <= i < n - 1 for i in w):
                    raise SimplicialError(f"bad face reference on simplex {s} of dimension {n}")
    return x
