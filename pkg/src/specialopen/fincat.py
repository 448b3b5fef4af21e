"""Finite categories, posets, functors, and constructions on them.

Morphisms are integer ids ``0..n-1``.  A category either carries an explicit
composition table or is *thin* (at most one morphism per ordered pair of
objects), in which case composition is read off the source/target pair.
Posets become thin categories.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping, Sequence

Obj = Hashable


class CategoryError(ValueError):
    pass


class SearchBudgetExceeded(CategoryError):
    pass


class FinCategory:
    __slots__ = ("objects", "src", "dst", "identities", "_table", "_pair", "_obj_index",
                 "_hom", "_out", "_in", "name")

    def __init__(
        self,
        objects: Sequence[Obj],
        morphisms: Sequence[tuple[Obj, Obj]],
        identities: Mapping[Obj, int],
        composition: Mapping[tuple[int, int], int] | None = None,
        name: str | None = None,
    ):
        self.objects = tuple(objects)
        self._obj_index = {a: i for i, a in enumerate(self.objects)}
        if len(self._obj_index) != len(self.objects):
            raise CategoryError("duplicate objects")
        self.src = tuple(s for s, _ in morphisms)
        self.dst = tuple(t for _, t in morphisms)
        for s, t in morphisms:
            if s not in self._obj_index or t not in self._obj_index:
                raise CategoryError(f"morphism {s!r} -> {t!r} has an unknown endpoint")
        self.identities = dict(identities)
        self.name = name
        self._hom: dict[tuple[Obj, Obj], list[int]] = {}
        self._out: dict[Obj, list[int]] = {a: [] for a in self.objects}
        self._in: dict[Obj, list[int]] = {a: [] for a in self.objects}
        for m, (s, t) in enumerate(morphisms):
            self._hom.setdefault((s, t), []).append(m)
            self._out[s].append(m)
            self._in[t].append(m)
        if composition is None:
            if any(len(v) > 1 for v in self._hom.values()):
                raise CategoryError("a category without a composition table must be thin")
            self._table = None
            self._pair = {k: v[0] for k, v in self._hom.items()}
        else:
            self._table = dict(composition)
            self._pair = None

    # -- construction ---------------------------------------------------------

    @classmethod
    def discrete(cls, objects: Iterable[Obj]) -> "FinCategory":
        objects = list(objects)
        return cls(objects, [(a, a) for a in objects], {a: i for i, a in enumerate(objects)})

    @classmethod
    def from_group(cls, elements: Sequence, mul: Callable, identity, obj: Obj = "*") -> "FinCategory":
        """One-object category whose morphisms are ``elements``."""
        index = {g: i for i, g in enumerate(elements)}
        table = {(index[g], index[f]): index[mul(g, f)] for g in elements for f in elements}
        return cls([obj], [(obj, obj)] * len(elements), {obj: index[identity]}, table)

    # -- queries --------------------------------------------------------------

    @property
    def thin(self) -> bool:
        return self._table is None

    @property
    def num_morphisms(self) -> int:
        return len(self.src)

    @property
    def morphisms(self) -> range:
        return range(len(self.src))

    def index(self, a: Obj) -> int:
        return self._obj_index[a]

    def __contains__(self, a) -> bool:
        return a in self._obj_index

    def hom(self, a: Obj, b: Obj) -> list[int]:
        return self._hom.get((a, b), [])

    def arrow(self, a: Obj, b: Obj) -> int | None:
        """The unique morphism ``a -> b`` of a thin category, if any."""
        return self._pair.get((a, b)) if self._pair is not None else None

    def out_morphisms(self, a: Obj) -> list[int]:
        return self._out[a]

    def in_morphisms(self, b: Obj) -> list[int]:
        return self._in[b]

    def identity(self, a: Obj) -> int:
        return self.identities[a]

    def is_identity(self, m: int) -> bool:
        return self.identities.get(self.src[m]) == m

    def compose(self, g: int, f: int) -> int:
        """``g . f`` (first ``f``, then ``g``)."""
        if self.dst[f] != self.src[g]:
            raise CategoryError(f"morphisms {g} and {f} are not composable")
        if self._table is None:
            return self._pair[(self.src[f], self.dst[g])]
        try:
            return self._table[(g, f)]
        except KeyError:
            raise CategoryError(f"composition {g} . {f} is undefined") from None

    def composition_table(self) -> dict[tuple[int, int], int]:
        if self._table is not None:
            return dict(self._table)
        table = {}
        for b in self.objects:
            for f in self._in[b]:
                for g in self._out[b]:
                    table[(g, f)] = self._pair[(self.src[f], self.dst[g])]
        return table

    def is_poset(self) -> bool:
        if not self.thin:
            return False
        for (a, b) in self._hom:
            if a != b and (b, a) in self._hom:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.src == other.src
            and self.dst == other.dst
            and self.identities == other.identities
            and (self.thin and other.thin or self.composition_table() == other.composition_table())
        )

    def __hash__(self):
        return hash((self.objects, self.src, self.dst))

    def __repr__(self):
        kind = "thin " if self.thin else ""
        label = f" {self.name}" if self.name else ""
        return f"<{kind}FinCategory{label}: {len(self.objects)} objects, {self.num_morphisms} morphisms>"


class FinPoset:
    """Finite poset given by elements and a relation containing its reflexive pairs."""

    __slots__ = ("elements", "_index", "_up", "_down")

    def __init__(self, elements: Sequence[Obj], leq: Iterable[tuple[Obj, Obj]], check: bool = True):
        self.elements = tuple(elements)
        self._index = {a: i for i, a in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise CategoryError("duplicate poset elements")
        up: list[set[int]] = [{i} for i in range(len(self.elements))]
        for a, b in leq:
            up[self._index[a]].add(self._index[b])
        self._up = [frozenset(s) for s in up]
        down: list[set[int]] = [set() for _ in self.elements]
        for i, s in enumerate(self._up):
            for j in s:
                down[j].add(i)
        self._down = [frozenset(s) for s in down]
        if check:
            problems = poset_violations(self)
            if problems:
                raise CategoryError("not a partial order: " + "; ".join(problems[:5]))

    @classmethod
    def from_up_sets(cls, elements: Sequence[Obj], up: Sequence[Iterable[int]]) -> "FinPoset":
        """Build from (reflexive, transitive) up-sets given by element index."""
        self = cls.__new__(cls)
        self.elements = tuple(elements)
        self._index = {a: i for i, a in enumerate(self.elements)}
        self._up = [frozenset(s) | {i} for i, s in enumerate(up)]
        down: list[set[int]] = [set() for _ in self.elements]
        for i, s in enumerate(self._up):
            for j in s:
                down[j].add(i)
        self._down = [frozenset(s) for s in down]
        return self

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls(range(n), [(i, j) for i in range(n) for j in range(i, n)])

    def __len__(self):
        return len(self.elements)

    def index(self, a: Obj) -> int:
        return self._index[a]

    def le(self, a: Obj, b: Obj) -> bool:
        return self._index[b] in self._up[self._index[a]]

    def up_indices(self, i: int) -> frozenset[int]:
        return self._up[i]

    def down_indices(self, i: int) -> frozenset[int]:
        return self._down[i]

    @property
    def leq(self) -> set[tuple[Obj, Obj]]:
        el = self.elements
        return {(el[i], el[j]) for i, s in enumerate(self._up) for j in s}

    def num_relations(self) -> int:
        return sum(len(s) for s in self._up)

    def as_category(self, name: str | None = None) -> FinCategory:
        el = self.elements
        morphisms = []
        identities = {}
        for i, s in enumerate(self._up):
            for j in sorted(s):
                if i == j:
                    identities[el[i]] = len(morphisms)
                morphisms.append((el[i], el[j]))
        return FinCategory(el, morphisms, identities, None, name)

    def subposet(self, keep: Callable[[Obj], bool]) -> "FinPoset":
        idx = [i for i, a in enumerate(self.elements) if keep(a)]
        new = {old: k for k, old in enumerate(idx)}
        return FinPoset.from_up_sets(
            [self.elements[i] for i in idx],
            [[new[j] for j in self._up[i] if j in new] for i in idx],
        )

    def opposite(self) -> "FinPoset":
        return FinPoset.from_up_sets(self.elements, self._down)

    def __eq__(self, other):
        if not isinstance(other, FinPoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.leq == other.leq

    def __repr__(self):
        return f"<FinPoset: {len(self.elements)} elements, {self.num_relations()} relations>"


def poset_violations(p: FinPoset) -> list[str]:
    out = []
    for i, s in enumerate(p._up):
        if i not in s:
            out.append(f"not reflexive at {p.elements[i]!r}")
        for j in s:
            if j != i and i in p._up[j]:
                out.append(f"not antisymmetric: {p.elements[i]!r}, {p.elements[j]!r}")
            if not p._up[j] <= s:
                out.append(f"not transitive through {p.elements[j]!r}")
    return out


def poset_of_category(c: FinCategory) -> FinPoset:
    """Recover the order relation of a poset category."""
    if not c.is_poset():
        raise CategoryError("category is not a poset")
    return FinPoset(c.objects, [(c.src[m], c.dst[m]) for m in c.morphisms])


# -- functors -----------------------------------------------------------------


class CatFunctor:
    """Functor between finite categories.

    ``mor`` may be omitted when the target is thin; morphisms are then sent to
    the unique arrow between the image objects.
    """

    __slots__ = ("source", "target", "obj", "_mor")

    def __init__(self, source: FinCategory, target: FinCategory, obj: Mapping[Obj, Obj],
                 mor: Sequence[int] | Mapping[int, int] | None = None):
        self.source = source
        self.target = target
        self.obj = dict(obj)
        if mor is None:
            if not target.thin:
                raise CategoryError("a morphism map is required unless the target is thin")
            mor = []
            for m in source.morphisms:
                a = target.arrow(self.obj[source.src[m]], self.obj[source.dst[m]])
                if a is None:
                    raise CategoryError(f"no target arrow for morphism {m}")
                mor.append(a)
        if isinstance(mor, Mapping):
            mor = [mor[m] for m in source.morphisms]
        self._mor = tuple(mor)

    def __call__(self, a: Obj) -> Obj:
        return self.obj[a]

    def fmap(self, m: int) -> int:
        return self._mor[m]

    @property
    def mor(self) -> tuple[int, ...]:
        return self._mor

    @classmethod
    def identity(cls, c: FinCategory) -> "CatFunctor":
        return cls(c, c, {a: a for a in c.objects}, list(c.morphisms))

    def then(self, other: "CatFunctor") -> "CatFunctor":
        """``other . self``."""
        return CatFunctor(self.source, other.target,
                          {a: other.obj[b] for a, b in self.obj.items()},
                          [other.fmap(m) for m in self._mor])

    def __eq__(self, other):
        if not isinstance(other, CatFunctor):
            return NotImplemented
        return self.obj == other.obj and self._mor == other._mor

    def __hash__(self):
        return hash(self._mor)

    def __repr__(self):
        return f"<CatFunctor {self.source!r} -> {self.target!r}>"


def functor_violations(f: CatFunctor) -> list[str]:
    c, d = f.source, f.target
    out = []
    for a in c.objects:
        if f.obj.get(a) not in d:
            out.append(f"object {a!r} has no image in the target")
    if out:
        return out
    for a in c.objects:
        if f.fmap(c.identity(a)) != d.identity(f(a)):
            out.append(f"identity of {a!r} not preserved")
    for m in c.morphisms:
        im = f.fmap(m)
        if d.src[im] != f(c.src[m]) or d.dst[im] != f(c.dst[m]):
            out.append(f"morphism {m} lands between the wrong objects")
    if out:
        return out
    for b in c.objects:
        for g0 in c.in_morphisms(b):
            for g1 in c.out_morphisms(b):
                if f.fmap(c.compose(g1, g0)) != d.compose(f.fmap(g1), f.fmap(g0)):
                    out.append(f"composite {g1} . {g0} not preserved")
    return out


class CatValuedFunctor:
    """Strict functor ``C -> Cat``: a category per object, a functor per morphism."""

    def __init__(self, source: FinCategory, obj: Mapping[Obj, FinCategory],
                 mor: Mapping[int, CatFunctor] | Callable[[int], CatFunctor]):
        self.source = source
        self.obj = dict(obj)
        self._mor = mor

    def __call__(self, c: Obj) -> FinCategory:
        return self.obj[c]

    def fmap(self, m: int) -> CatFunctor:
        return self._mor(m) if callable(self._mor) else self._mor[m]


def cat_valued_violations(f: CatValuedFunctor) -> list[str]:
    c = f.source
    out = []
    for m in c.morphisms:
        fm = f.fmap(m)
        if fm.source is not f(c.src[m]) and fm.source != f(c.src[m]):
            out.append(f"F({m}) has the wrong source")
        if fm.target is not f(c.dst[m]) and fm.target != f(c.dst[m]):
            out.append(f"F({m}) has the wrong target")
        out += [f"F({m}): {v}" for v in functor_violations(fm)]
    for a in c.objects:
        if f.fmap(c.identity(a)) != CatFunctor.identity(f(a)):
            out.append(f"F(id_{a!r}) is not the identity")
    for b in c.objects:
        for g0 in c.in_morphisms(b):
            for g1 in c.out_morphisms(b):
                if f.fmap(c.compose(g1, g0)) != f.fmap(g0).then(f.fmap(g1)):
                    out.append(f"F({g1} . {g0}) != F({g1}) . F({g0})")
    return out


# -- validation ---------------------------------------------------------------


def validate_category(c: FinCategory) -> list[str]:
    """Every violated identity, closure, or associativity instance; empty iff valid."""
    report = []
    for a in c.objects:
        i = c.identities.get(a)
        if i is None:
            report.append(f"object {a!r} has no identity")
        elif c.src[i] != a or c.dst[i] != a:
            report.append(f"identity of {a!r} is not an endomorphism of it")
    if report:
        return report

    def comp(g, f):
        try:
            return c.compose(g, f)
        except CategoryError:
            return None

    for b in c.objects:
        for f in c.in_morphisms(b):
            for g in c.out_morphisms(b):
                h = comp(g, f)
                if h is None:
                    report.append(f"composition missing for ({g}, {f})")
                elif c.src[h] != c.src[f] or c.dst[h] != c.dst[g]:
                    report.append(f"composite ({g}, {f}) = {h} has wrong endpoints")
    if report:
        return report
    for m in c.morphisms:
        if comp(m, c.identity(c.src[m])) != m:
            report.append(f"right identity law fails at {m}")
        if comp(c.identity(c.dst[m]), m) != m:
            report.append(f"left identity law fails at {m}")
    if c.thin:
        return report
    for b in c.objects:
        for f in c.in_morphisms(b):
            for g in c.out_morphisms(b):
                gf = c.compose(g, f)
                for h in c.out_morphisms(c.dst[g]):
                    if c.compose(c.compose(h, g), f) != c.compose(h, gf):
                        report.append(f"associativity fails at ({h}, {g}, {f})")
    return report


# -- constructions ------------------------------------------------------------


def opposite(c: FinCategory) -> FinCategory:
    morphisms = [(c.dst[m], c.src[m]) for m in c.morphisms]
    table = None
    if not c.thin:
        table = {(f, g): h for (g, f), h in c.composition_table().items()}
    name = None if c.name is None else (c.name[:-3] if c.name.endswith("^op") else c.name + "^op")
    return FinCategory(c.objects, morphisms, c.identities, table, name)


class Subcategory(FinCategory):
    """A subcategory remembering the ids of its morphisms in the parent."""

    __slots__ = ("parent", "parent_ids")

    def inclusion(self) -> CatFunctor:
        return CatFunctor(self, self.parent, {a: a for a in self.objects}, list(self.parent_ids))


def _sub(c: FinCategory, objects: list, mids: list[int], name=None) -> Subcategory:
    new = {m: i for i, m in enumerate(mids)}
    morphisms = [(c.src[m], c.dst[m]) for m in mids]
    identities = {a: new[c.identity(a)] for a in objects}
    table = None
    if not c.thin:
        table = {}
        for i, f in enumerate(mids):
            for j, g in enumerate(mids):
                if c.dst[f] == c.src[g]:
                    h = c.compose(g, f)
                    if h not in new:
                        raise CategoryError(
                            f"not closed under composition: {g} . {f} = {h} is not kept")
                    table[(j, i)] = new[h]
    sub = Subcategory(objects, morphisms, identities, table, name)
    sub.parent = c
    sub.parent_ids = tuple(mids)
    return sub


def full_subcategory(c: FinCategory, keep: Callable[[Obj], bool]) -> Subcategory:
    objects = [a for a in c.objects if keep(a)]
    kept = set(objects)
    mids = [m for m in c.morphisms if c.src[m] in kept and c.dst[m] in kept]
    return _sub(c, objects, mids, c.name)


def wide_subcategory(c: FinCategory, keep: Callable[[int], bool]) -> Subcategory:
    """Same objects, morphisms passing ``keep`` (identities must pass)."""
    mids = [m for m in c.morphisms if keep(m)]
    kept = set(mids)
    for a in c.objects:
        if c.identity(a) not in kept:
            raise CategoryError(f"predicate drops the identity of {a!r}")
    if c.thin:
        for f in mids:
            for g in c.out_morphisms(c.dst[f]):
                if g in kept and c.compose(g, f) not in kept:
                    raise CategoryError(f"not closed under composition: {g} . {f}")
    return _sub(c, list(c.objects), mids)


def comma_category(j: CatFunctor, d: Obj) -> FinCategory:
    """The comma category ``(d | J)``: objects ``(c, h: d -> J c)``."""
    src, tgt = j.source, j.target
    objects = [(c, h) for c in src.objects for h in tgt.hom(d, j(c))]
    morphisms: list[tuple] = []
    mids: list[int] = []
    for (c, h) in objects:
        for u in src.out_morphisms(c):
            h2 = tgt.compose(j.fmap(u), h)
            morphisms.append(((c, h), (src.dst[u], h2)))
            mids.append(u)
    identities = {}
    pos = {}
    for i, (x, m) in enumerate(zip(morphisms, mids)):
        pos[(x[0], m)] = i
        if src.is_identity(m):
            identities[x[0]] = i
    table = None
    if not src.thin:
        table = {}
        for i, (x, f) in enumerate(zip(morphisms, mids)):
            for g in src.out_morphisms(src.dst[f]):
                table[(pos[(x[1], g)], i)] = pos[(x[0], src.compose(g, f))]
    return FinCategory(objects, morphisms, identities, table)


def has_initial(c: FinCategory) -> Obj | None:
    """An object with exactly one morphism to every object, or None."""
    n = len(c.objects)
    for a in c.objects:
        outs = c.out_morphisms(a)
        if len(outs) != n:
            continue
        if len({c.dst[m] for m in outs}) == n:
            return a
    return None


def has_terminal(c: FinCategory) -> Obj | None:
    n = len(c.objects)
    for a in c.objects:
        ins = c.in_morphisms(a)
        if len(ins) == n and len({c.src[m] for m in ins}) == n:
            return a
    return None


def grothendieck(c: FinCategory, f: CatValuedFunctor) -> tuple[FinCategory, CatFunctor]:
    """The Grothendieck construction of ``f`` and its projection to ``c``.

    Objects are pairs ``(a, x)`` with ``x`` in ``f(a)``; a morphism
    ``(a, x) -> (b, y)`` is ``(u, g)`` with ``u: a -> b`` and
    ``g: f(u)(x) -> y`` in ``f(b)``, composed as
    ``(u', g') . (u, g) = (u' . u, g' . f(u')(g))``.
    """
    objects = [(a, x) for a in c.objects for x in f(a).objects]
    labels: list[tuple[int, int]] = []
    morphisms: list[tuple] = []
    for (a, x) in objects:
        for u in c.out_morphisms(a):
            b = c.dst[u]
            fu = f.fmap(u)
            y0 = fu(x)
            fb = f(b)
            for g in fb.out_morphisms(y0):
                labels.append((u, g))
                morphisms.append(((a, x), (b, fb.dst[g])))
    # (u, g) alone does not determine the source object
    index = {(m[0], lab): i for i, (m, lab) in enumerate(zip(morphisms, labels))}
    identities = {(a, x): index[((a, x), (c.identity(a), f(a).identity(x)))] for (a, x) in objects}
    thin = c.thin and all(f(a).thin for a in c.objects)
    table = None
    if not thin:
        table = {}
        by_src: dict = {}
        for i, m in enumerate(morphisms):
            by_src.setdefault(m[0], []).append(i)
        for i, (u, g) in enumerate(labels):
            mid = morphisms[i][1]
            for k in by_src.get(mid, ()):
                u2, g2 = labels[k]
                cb2 = f(c.dst[u2])
                h = (c.compose(u2, u), cb2.compose(g2, f.fmap(u2).fmap(g)))
                table[(k, i)] = index[(morphisms[i][0], h)]
    total = FinCategory(objects, morphisms, identities, table)
    proj = CatFunctor(total, c, {o: o[0] for o in objects}, [u for u, _ in labels])
    return total, proj


def fiber_category(proj: CatFunctor, a: Obj) -> Subcategory:
    """Strict fiber of a functor over object ``a``: objects over ``a``, morphisms over ``id_a``."""
    src, tgt = proj.source, proj.target
    ida = tgt.identity(a)
    objects = [o for o in src.objects if proj(o) == a]
    mids = [m for m in src.morphisms if proj.fmap(m) == ida]
    return _sub(src, objects, mids)


# -- isomorphism --------------------------------------------------------------


def _match_morphisms(c: FinCategory, d: FinCategory, phi: dict, budget: list[int]) -> list[int] | None:
    """Find a composition-preserving morphism bijection over object bijection ``phi``."""
    psi: dict[int, int] = {}
    for a in c.objects:
        for b in c.objects:
            if len(c.hom(a, b)) != len(d.hom(phi[a], phi[b])):
                return None
    for a in c.objects:
        psi[c.identity(a)] = d.identity(phi[a])
    if c.thin and d.thin:
        return [d.arrow(phi[c.src[m]], phi[c.dst[m]]) for m in c.morphisms]

    order = list(c.morphisms)

    def consistent(assign: dict) -> dict | None:
        # close the partial assignment under composition
        assign = dict(assign)
        used = {}
        for m, m2 in assign.items():
            if used.setdefault(m2, m) != m:
                return None
        changed = True
        while changed:
            changed = False
            for f, f2 in list(assign.items()):
                for g in c.out_morphisms(c.dst[f]):
                    g2 = assign.get(g)
                    if g2 is None:
                        continue
                    h = c.compose(g, f)
                    h2 = d.compose(g2, f2)
                    have = assign.get(h)
                    if have is None:
                        if used.setdefault(h2, h) != h:
                            return None
                        assign[h] = h2
                        changed = True
                    elif have != h2:
                        return None
        return assign

    start = consistent(psi)
    if start is None:
        return None

    def search(assign):
        budget[0] -= 1
        if budget[0] < 0:
            raise SearchBudgetExceeded("search exceeded budget")
        todo = next((m for m in order if m not in assign), None)
        if todo is None:
            return assign
        taken = set(assign.values())
        for cand in d.hom(phi[c.src[todo]], phi[c.dst[todo]]):
            if cand in taken:
                continue
            nxt = consistent({**assign, todo: cand})
            if nxt is not None:
                res = search(nxt)
                if res is not None:
                    return res
        return None

    res = search(start)
    if res is None:
        return None
    return [res[m] for m in c.morphisms]


def categories_isomorphic(
    c: FinCategory,
    d: FinCategory,
    hint: Mapping[Obj, Obj] | None = None,
    budget: int = 10**6,
) -> tuple[CatFunctor, CatFunctor] | None:
    """An isomorphism ``c -> d`` with its inverse, or None.

    With ``hint`` only that object correspondence is tried.
    """
    if len(c.objects) != len(d.objects) or c.num_morphisms != d.num_morphisms:
        return None
    counter = [budget]

    def finish(phi):
        mor = _match_morphisms(c, d, phi, counter)
        if mor is None:
            return None
        fwd = CatFunctor(c, d, phi, mor)
        inv_obj = {v: k for k, v in phi.items()}
        inv_mor = [0] * d.num_morphisms
        for m, m2 in enumerate(mor):
            inv_mor[m2] = m
        return fwd, CatFunctor(d, c, inv_obj, inv_mor)

    if hint is not None:
        phi = dict(hint)
        if set(phi) != set(c.objects) or set(phi.values()) != set(d.objects) \
                or len(set(phi.values())) != len(phi):
            return None
        return finish(phi)

    def signature(cat, a):
        return (len(cat.out_morphisms(a)), len(cat.in_morphisms(a)), len(cat.hom(a, a)))

    sig_c = {a: signature(c, a) for a in c.objects}
    sig_d = {b: signature(d, b) for b in d.objects}
    if sorted(sig_c.values()) != sorted(sig_d.values()):
        return None
    order = sorted(c.objects, key=lambda a: (sum(1 for b in c.objects if sig_c[b] == sig_c[a]), c.index(a)))

    def search(phi, used):
        counter[0] -= 1
        if counter[0] < 0:
            raise SearchBudgetExceeded("search exceeded budget")
        if len(phi) == len(order):
            return finish(phi)
        a = order[len(phi)]
        for b in d.objects:
            if b in used or sig_d[b] != sig_c[a]:
                continue
            ok = all(len(c.hom(a, x)) == len(d.hom(b, phi[x])) and len(c.hom(x, a)) == len(d.hom(phi[x], b))
                     for x in phi)
            if not ok:
                continue
            phi[a] = b
            used.add(b)
            res = search(phi, used)
            if res is not None:
                return res
            del phi[a]
            used.discard(b)
        return None

    return search({}, set())


# -- serialization ------------------------------------------------------------


def _label(a) -> str:
    if isinstance(a, (frozenset, set)):
        return "{" + ",".join(sorted(_label(x) for x in a)) + "}"
    if isinstance(a, tuple):
        return "(" + ",".join(_label(x) for x in a) + ")"
    return str(a).replace(" ", "")


def dumps_category(c: FinCategory) -> str:
    """Text form with objects, morphisms, and composition; order-normalized."""
    labels = {a: _label(a) for a in c.objects}
    if len(set(labels.values())) != len(labels):
        raise CategoryError("object labels are not distinct")
    objs = sorted(c.objects, key=lambda a: labels[a])
    rank = {a: i for i, a in enumerate(objs)}
    order = sorted(c.morphisms, key=lambda m: (rank[c.src[m]], rank[c.dst[m]], not c.is_identity(m), m))
    new = {m: i for i, m in enumerate(order)}
    lines = ["objects"]
    lines += [f"  {labels[a]}" for a in objs]
    lines.append("morphisms")
    for m in order:
        lines.append(f"  {new[m]}: {labels[c.src[m]]} -> {labels[c.dst[m]]}")
    lines.append("composition")
    comp = sorted((new[g], new[f], new[h]) for (g, f), h in c.composition_table().items())
    lines += [f"  {g} . {f} = {h}" for g, f, h in comp]
    return "\n".join(lines) + "\n"


def loads_category(text: str) -> FinCategory:
    """Inverse of :func:`dumps_category`; objects come back as their labels."""
    section = None
    objects, morphisms, comp = [], {}, {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("objects", "morphisms", "composition"):
            section = line
            continue
        try:
            if section == "objects":
                objects.append(line)
            elif section == "morphisms":
                mid, rest = line.split(":", 1)
                s, t = (x.strip() for x in rest.split("->"))
                morphisms[int(mid)] = (s, t)
            elif section == "composition":
                lhs, h = line.split("=")
                g, f = lhs.split(".")
                comp[(int(g), int(f))] = int(h)
            else:
                raise CategoryError(f"line outside any section: {line!r}")
        except ValueError:
            raise CategoryError(f"malformed line: {line!r}") from None
    if sorted(morphisms) != list(range(len(morphisms))):
        raise CategoryError("morphism ids must be 0..n-1")
    mors = [morphisms[i] for i in range(len(morphisms))]
    identities = {}
    for a in objects:
        for i, (s, t) in enumerate(mors):
            if s == t == a and all(comp.get((i, f)) == f for f in range(len(mors)) if mors[f][1] == a):
                identities[a] = i
                break
        else:
            raise CategoryError(f"object {a} has no identity")
    return FinCategory(objects, mors, identities, comp)

