"""Independent reference computations used by the tests.

Nothing here imports the package's homology or nerve code.  Boundary
matrices are built from scratch and reduced with sympy (torsion) or numpy
(ranks of larger matrices).
"""

import itertools
import random

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import ZZ


def _factors(rows):
    if not rows or not rows[0]:
        return []
    return [int(d) for d in invariant_factors(Matrix(rows), domain=ZZ) if d != 0]


def _rank(rows):
    if not rows or not rows[0]:
        return 0
    return int(np.linalg.matrix_rank(np.array(rows, dtype=float)))


def homology_from_dense(ranks, mats, through, torsion=True):
    """``mats[n]`` is the dense matrix of C_n -> C_{n-1} (``mats[0]`` unused).

    Returns a list of (betti, torsion tuple) for degrees 0..through; the
    complex must reach degree ``through + 1``.
    """
    out = []
    rk = [0] * (len(ranks) + 1)
    tors = [()] * (len(ranks) + 1)
    for n in range(1, len(ranks)):
        if torsion:
            f = _factors(mats[n])
            rk[n] = len(f)
            tors[n] = tuple(sorted(d for d in (abs(x) for x in f) if d > 1))
        else:
            rk[n] = _rank(mats[n])
    for n in range(through + 1):
        out.append((ranks[n] - rk[n] - rk[n + 1], tors[n + 1]))
    return out


def simplicial_complex_homology(facets, through, torsion=True):
    simplices = set()
    for f in facets:
        f = tuple(sorted(set(f)))
        for r in range(1, len(f) + 1):
            simplices.update(itertools.combinations(f, r))
    return _homology_of_simplices(simplices, through, torsion)


def _homology_of_simplices(simplices, through, torsion):
    levels = [sorted(s for s in simplices if len(s) == n + 1) for n in range(through + 2)]
    index = [{s: i for i, s in enumerate(lv)} for lv in levels]
    ranks = [len(lv) for lv in levels]
    mats = [None]
    for n in range(1, through + 2):
        m = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        for j, s in enumerate(levels[n]):
            for i in range(n + 1):
                m[index[n - 1][s[:i] + s[i + 1:]]][j] += (-1) ** i
        mats.append(m)
    return homology_from_dense(ranks, mats, through, torsion)


def order_complex_homology(elements, le, through, torsion=True):
    """Homology of the poset ``(elements, le)`` via its chains."""
    elements = list(elements)
    # sort so that chains are increasing in list order
    order = sorted(range(len(elements)), key=lambda i: sum(le(elements[j], elements[i]) for j in range(len(elements))))
    simplices = set()

    def grow(chain):
        simplices.add(tuple(chain))
        if len(chain) == through + 2:
            return
        last = chain[-1]
        for b in order:
            if b != last and order.index(b) > order.index(last) and le(elements[last], elements[b]):
                grow(chain + [b])

    for a in order:
        grow([a])
    # relabel by position so that tuples are sorted increasingly
    pos = {a: i for i, a in enumerate(order)}
    return _homology_of_simplices({tuple(pos[a] for a in s) for s in simplices}, through, torsion)


def group_bar_homology(elements, mul, identity, through):
    """Normalized bar complex of a finite group, directly from its table."""
    nonid = [g for g in elements if g != identity]
    levels = [[()]] + [list(itertools.product(nonid, repeat=n)) for n in range(1, through + 2)]
    index = [{s: i for i, s in enumerate(lv)} for lv in levels]
    ranks = [len(lv) for lv in levels]
    mats = [None]
    for n in range(1, through + 2):
        m = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        for j, s in enumerate(levels[n]):
            for i in range(n + 1):
                if i == 0:
                    face = s[1:]
                elif i == n:
                    face = s[:-1]
                else:
                    prod = mul(s[i], s[i - 1])
                    if prod == identity:
                        continue
                    face = s[: i - 1] + (prod,) + s[i + 1:]
                m[index[n - 1][face]][j] += (-1) ** i
        mats.append(m)
    return homology_from_dense(ranks, mats, through)


# -- combinatorics of the manifold models -------------------------------------


def components(kind, n, pts):
    pts = set(pts)

    def nbrs(v):
        out = {v - 1, v + 1}
        if kind == "cycle":
            out = {x % n for x in out}
        return {x for x in out if 0 <= x < n}

    comps = []
    while pts:
        stack = [pts.pop()]
        comp = set(stack)
        while stack:
            v = stack.pop()
            for w in nbrs(v):
                if w in pts:
                    pts.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def special_open_sets(kind, n, k):
    """Subsets with at most ``k`` components, each a proper arc."""
    out = []
    for r in range(n + 1):
        for s in itertools.combinations(range(n), r):
            if kind == "cycle" and r == n:
                continue
            if len(components(kind, n, s)) <= k:
                out.append(frozenset(s))
    return out


def arcs(kind, n):
    return [s for s in special_open_sets(kind, n, 1) if s]


def isotopy(kind, n, u, v):
    cu, cv = components(kind, n, u), components(kind, n, v)
    if len(cu) != len(cv):
        return False
    return all(sum(1 for a in cu if a <= b) == 1 for b in cv)


def count_strings(elements, le, p):
    """Weakly increasing strings of length ``p + 1``."""
    if p == 0:
        return len(elements)
    return sum(1 for s in itertools.product(elements, repeat=p + 1)
               if all(le(s[i], s[i + 1]) for i in range(p)))


def brute_limit(objects, arrows, sets):
    """``arrows`` lists ``(a, b, fn)``; families as dicts keyed by object."""
    out = []
    for combo in itertools.product(*(sets[a] for a in objects)):
        fam = dict(zip(objects, combo))
        if all(fn(fam[a]) == fam[b] for a, b, fn in arrows):
            out.append(fam)
    return out


def tables_isomorphic(elems_a, mul_a, elems_b, mul_b):
    """Brute force over all bijections."""
    if len(elems_a) != len(elems_b):
        return False
    for perm in itertools.permutations(elems_b):
        phi = dict(zip(elems_a, perm))
        if all(phi[mul_a(x, y)] == mul_b(phi[x], phi[y]) for x in elems_a for y in elems_a):
            return True
    return False


# -- random instances -------------------------------------------------------------


def random_facets(rng: random.Random, max_vertices=8, max_facets=8, max_dim=3):
    nv = rng.randint(3, max_vertices)
    out = []
    for _ in range(rng.randint(1, max_facets)):
        d = rng.randint(1, max_dim)
        out.append(tuple(sorted(rng.sample(range(nv), min(d + 1, nv)))))
    return out


# Six-vertex real projective plane
RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
       (1, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 5), (2, 4, 5)]


def config_poset(kind, n, j):
    """Discrete configuration cells (closures pairwise non-adjacent) and the face order."""

    def dist_ok(a, b):
        for u in a:
            for v in b:
                d = abs(u - v)
                if kind == "cycle":
                    d = min(d, n - d)
                if d < 2:
                    return False
        return True

    graph = [(v,) for v in range(n)] + [(v, v + 1) for v in range(n - 1)]
    if kind == "cycle":
        graph.append((0, n - 1))
    cells = [c for c in itertools.combinations(graph, j)
             if all(dist_ok(a, b) for a, b in itertools.combinations(c, 2))]

    def le(c, d):
        return any(all(set(x) <= set(y) for x, y in zip(c, perm)) for perm in itertools.permutations(d))

    return cells, le
