"""Integer chain complexes, Smith normal form, and homology.

Boundary matrices are sparse and column-major.  Homology is read off the
invariant factors of the boundary maps, usually after a homology-preserving
elimination pass (:func:`coreduce`) that removes unit-incidence cell pairs.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class HomologyError(ValueError):
    pass


class IntMatrix:
    """Sparse integer matrix stored as ``{col: {row: value}}``.

    Zero entries are never stored.
    """

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: dict[int, dict[int, int]] = {}
        if cols:
            for c, col in cols.items():
                col = {r: v for r, v in col.items() if v}
                if col:
                    self.cols[c] = col

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        cols: dict[int, dict[int, int]] = {}
        for r, row in enumerate(rows):
            if len(row) != ncols:
                raise HomologyError("ragged matrix")
            for c, v in enumerate(row):
                if v:
                    cols.setdefault(c, {})[r] = int(v)
        return cls(nrows, ncols, cols)

    @classmethod
    def from_triplets(cls, nrows: int, ncols: int, triplets: Iterable[tuple[int, int, int]]) -> "IntMatrix":
        cols: dict[int, dict[int, int]] = {}
        for r, c, v in triplets:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise HomologyError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            col = cols.setdefault(c, {})
            col[r] = col.get(r, 0) + int(v)
        return cls(nrows, ncols, cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for c, col in self.cols.items():
            for r, v in col.items():
                out[r][c] = v
        return out

    def triplets(self) -> list[tuple[int, int, int]]:
        return sorted((r, c, v) for c, col in self.cols.items() for r, v in col.items())

    def rows(self) -> dict[int, dict[int, int]]:
        out: dict[int, dict[int, int]] = {}
        for c, col in self.cols.items():
            for r, v in col.items():
                out.setdefault(r, {})[c] = v
        return out

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.cols.values())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return not self.cols

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.ncols, self.nrows, self.rows())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise HomologyError(f"shape mismatch {self.shape} @ {other.shape}")
        out: dict[int, dict[int, int]] = {}
        for c, col in other.cols.items():
            acc: dict[int, int] = {}
            for k, v in col.items():
                left = self.cols.get(k)
                if left is None:
                    continue
                for r, w in left.items():
                    acc[r] = acc.get(r, 0) + w * v
            acc = {r: v for r, v in acc.items() if v}
            if acc:
                out[c] = acc
        return IntMatrix(self.nrows, other.ncols, out)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        return f"IntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


# -- matrix exchange format ---------------------------------------------------


def dumps_matrix(m: IntMatrix) -> str:
    lines = [f"{m.nrows} {m.ncols} {m.nnz}"]
    lines += [f"{r} {c} {v}" for r, c, v in m.triplets()]
    return "\n".join(lines) + "\n"


def loads_matrix(text: str) -> IntMatrix:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise HomologyError("empty matrix file")
    try:
        head = [int(x) for x in lines[0]]
        body = [tuple(int(x) for x in ln) for ln in lines[1:]]
    except ValueError as exc:
        raise HomologyError(f"malformed matrix file: {exc}") from None
    if len(head) not in (2, 3) or any(len(t) != 3 for t in body):
        raise HomologyError("malformed matrix file")
    if len(head) == 3 and head[2] != len(body):
        raise HomologyError(f"header announces {head[2]} entries, found {len(body)}")
    return IntMatrix.from_triplets(head[0], head[1], body)


# -- Smith normal form --------------------------------------------------------


@dataclass
class SmithStats:
    pivots: int = 0
    max_bits: int = 0


def _divisibility_chain(diag: list[int]) -> tuple[int, ...]:
    d = sorted(abs(x) for x in diag if x)
    # diag(a, b) ~ diag(gcd, lcm); repeat until each entry divides the next
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = d[i], d[j]
            if b % a:
                g = math.gcd(a, b)
                d[i], d[j] = g, a // g * b
    return tuple(d)


def smith(m: IntMatrix, stats: SmithStats | None = None) -> tuple[int, ...]:
    """Invariant factors ``d1 | d2 | ...`` of ``m`` (all positive)."""
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for c, col in m.cols.items():
        cols[c] = dict(col)
        for r, v in col.items():
            rows.setdefault(r, {})[c] = v
    diag: list[int] = []
    heap = sorted(rows)

    def set_entry(r, c, v):
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, {})[r] = v
        else:
            row = rows.get(r)
            if row is not None and c in row:
                del row[c]
                if not row:
                    del rows[r]
            col = cols.get(c)
            if col is not None and r in col:
                del col[r]
                if not col:
                    del cols[c]

    def pick_pivot():
        # smallest |v|, ties by (row, col); a unit in the first live row wins early
        best = None
        while heap and heap[0] not in rows:
            heapq.heappop(heap)
        for r in heap[:1]:
            for c, v in rows[r].items():
                if abs(v) == 1 and (best is None or c < best[1]):
                    best = (r, c)
        if best is not None:
            return best
        key = None
        for r, row in rows.items():
            for c, v in row.items():
                k = (abs(v), r, c)
                if key is None or k < key:
                    key = k
        return key[1], key[2]

    while rows:
        r, c = pick_pivot()
        while True:
            p = rows[r][c]
            smaller = None
            for r2, a in list(cols[c].items()):
                if r2 == r:
                    continue
                q = a // p
                for c2, b in list(rows[r].items()):
                    set_entry(r2, c2, rows.get(r2, {}).get(c2, 0) - q * b)
                rem = rows.get(r2, {}).get(c, 0)
                if rem and (smaller is None or (abs(rem), r2, c) < smaller):
                    smaller = (abs(rem), r2, c)
            for c2, a in list(rows[r].items()):
                if c2 == c:
                    continue
                q = a // p
                for r2, b in list(cols[c].items()):
                    set_entry(r2, c2, cols.get(c2, {}).get(r2, 0) - q * b)
                rem = rows.get(r, {}).get(c2, 0)
                if rem and (smaller is None or (abs(rem), r, c2) < smaller):
                    smaller = (abs(rem), r, c2)
            if smaller is None:
                break
            r, c = smaller[1], smaller[2]
        diag.append(abs(p))
        if stats is not None:
            stats.pivots += 1
            stats.max_bits = max(stats.max_bits, abs(p).bit_length())
        set_entry(r, c, 0)
    return _divisibility_chain(diag)


def rank_f2(m: IntMatrix) -> int:
    """Rank over the two-element field (rows packed into Python ints)."""
    pivots: dict[int, int] = {}
    rank = 0
    for c, col in m.cols.items():
        bits = 0
        for r, v in col.items():
            if v & 1:
                bits |= 1 << r
        while bits:
            top = bits.bit_length() - 1
            piv = pivots.get(top)
            if piv is None:
                pivots[top] = bits
                rank += 1
                break
            bits ^= piv
    return rank


# -- chain complexes ----------------------------------------------------------


@dataclass
class ChainComplex:
    """Free chain complex in degrees ``0..top``.

    ``boundaries[n]`` is the matrix of ``C_n -> C_{n-1}`` (``boundaries[0]``
    has zero rows).  When ``truncated`` is set, cells above ``top`` exist but
    were not generated, so degree ``top`` homology is unknown.
    """

    ranks: list[int]
    boundaries: list[IntMatrix]
    truncated: bool = False

    def __post_init__(self):
        if len(self.ranks) != len(self.boundaries):
            raise HomologyError("ranks and boundaries disagree in length")
        for n, (rk, bd) in enumerate(zip(self.ranks, self.boundaries)):
            below = self.ranks[n - 1] if n else 0
            if bd.shape != (below, rk):
                raise HomologyError(f"boundary {n} has shape {bd.shape}, expected {(below, rk)}")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    @property
    def valid_through(self) -> int | None:
        """Highest degree whose homology is determined; None means all."""
        return self.top - 1 if self.truncated else None

    def size(self) -> int:
        return sum(self.ranks)

    def check(self) -> None:
        for n in range(1, self.top):
            prod = self.boundaries[n] @ self.boundaries[n + 1]
            if not prod.is_zero():
                raise HomologyError(f"boundary composite d{n} d{n + 1} is nonzero")

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * r for n, r in enumerate(self.ranks))


def normalized_chains(x, top: int | None = None) -> ChainComplex:
    """Normalized chains of a simplicial set, generated by nondegenerate simplices.

    Degenerate faces contribute zero.  The result is marked truncated when
    simplices above ``top`` exist (or may exist) in ``x``.
    """
    if top is None:
        top = x.top
    if top > x.top:
        raise HomologyError(f"insufficient top dimension: have {x.top}, need {top}")
    truncated = x.truncated if top == x.top else x.count(top + 1) > 0
    ranks = [x.count(n) for n in range(top + 1)]
    boundaries = [IntMatrix(0, ranks[0])]
    for n in range(1, top + 1):
        cols = {}
        for s in range(ranks[n]):
            col: dict[int, int] = {}
            for i, (t, word) in enumerate(x.face_data(n, s)):
                if word:
                    continue
                v = col.get(t, 0) + (-1 if i & 1 else 1)
                if v:
                    col[t] = v
                else:
                    del col[t]
            if col:
                cols[s] = col
        boundaries.append(IntMatrix(ranks[n - 1], ranks[n], cols))
    return ChainComplex(ranks, boundaries, truncated)


@dataclass
class HomologySummary:
    """Betti numbers and torsion per degree; ``None`` marks an unknown degree."""

    betti: list[int | None]
    torsion: list[tuple[int, ...] | None]
    valid_through: int | None = None

    def __post_init__(self):
        for tor in self.torsion:
            if tor is None:
                continue
            if any(t <= 1 for t in tor):
                raise HomologyError("torsion coefficients must exceed 1")
            if any(b % a for a, b in zip(tor, tor[1:])):
                raise HomologyError("torsion coefficients must form a divisibility chain")

    @property
    def degrees(self) -> int:
        return len(self.betti)

    def known(self) -> int:
        """Number of leading degrees that are determined."""
        k = 0
        for b in self.betti:
            if b is None:
                break
            k += 1
        return k

    def truncate(self, through: int) -> "HomologySummary":
        return HomologySummary(self.betti[: through + 1], self.torsion[: through + 1], self.valid_through)

    def direct_sum(self, other: "HomologySummary") -> "HomologySummary":
        n = max(self.degrees, other.degrees)
        betti, torsion = [], []
        for d in range(n):
            a = self.betti[d] if d < self.degrees else 0
            b = other.betti[d] if d < other.degrees else 0
            ta = self.torsion[d] if d < self.degrees else ()
            tb = other.torsion[d] if d < other.degrees else ()
            if a is None or b is None or ta is None or tb is None:
                betti.append(None)
                torsion.append(None)
            else:
                betti.append(a + b)
                torsion.append(_divisibility_chain(list(ta) + list(tb)))
        vt = [v for v in (self.valid_through, other.valid_through) if v is not None]
        return HomologySummary(betti, torsion, min(vt) if vt else None)

    def to_dict(self) -> dict:
        return {
            "betti": list(self.betti),
            "torsion": [list(t) if t is not None else None for t in self.torsion],
            "valid_through": self.valid_through,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HomologySummary":
        return cls(
            list(d["betti"]),
            [tuple(t) if t is not None else None for t in d["torsion"]],
            d.get("valid_through"),
        )

    def __str__(self):
        parts = []
        for b, t in zip(self.betti, self.torsion):
            if b is None:
                parts.append("?")
            elif t:
                parts.append(f"{b}+" + "+".join(f"Z/{x}" for x in t))
            else:
                parts.append(str(b))
        return "(" + ", ".join(parts) + ")"


def _degree_data(cc: ChainComplex, upto: int) -> tuple[list[int], list[tuple[int, ...]]]:
    ranks, factors = [0], [()]
    for n in range(1, upto + 1):
        f = smith(cc.boundaries[n]) if n <= cc.top else ()
        ranks.append(len(f))
        factors.append(f)
    return ranks, factors


def homology(cc: ChainComplex, through: int, strict: bool = True) -> HomologySummary:
    """Integral homology in degrees ``0..through``.

    With ``strict`` a degree past the validity range raises; otherwise such
    degrees are reported as unknown.
    """
    if through < 0:
        raise HomologyError("degree must be nonnegative")
    vt = cc.valid_through
    limit = through if vt is None else min(through, vt)
    if limit < through and strict:
        raise HomologyError(f"degree {through} beyond validity range (valid through {vt})")
    ranks, factors = _degree_data(cc, min(limit + 1, cc.top))
    betti: list[int | None] = []
    torsion: list[tuple[int, ...] | None] = []
    for n in range(through + 1):
        if n > limit:
            betti.append(None)
            torsion.append(None)
            continue
        cn = cc.ranks[n] if n <= cc.top else 0
        rk_n = ranks[n] if n < len(ranks) else 0
        rk_up = ranks[n + 1] if n + 1 < len(ranks) else 0
        betti.append(cn - rk_n - rk_up)
        up = factors[n + 1] if n + 1 < len(factors) else ()
        torsion.append(tuple(x for x in up if x > 1))
    return HomologySummary(betti, torsion, vt)


def betti_f2(cc: ChainComplex, through: int, strict: bool = True) -> list[int | None]:
    """Dimensions of homology with coefficients in the two-element field."""
    vt = cc.valid_through
    limit = through if vt is None else min(through, vt)
    if limit < through and strict:
        raise HomologyError(f"degree {through} beyond validity range (valid through {vt})")
    ranks = [0] + [rank_f2(cc.boundaries[n]) for n in range(1, min(limit + 1, cc.top) + 1)]
    out: list[int | None] = []
    for n in range(through + 1):
        if n > limit:
            out.append(None)
            continue
        cn = cc.ranks[n] if n <= cc.top else 0
        rk_n = ranks[n] if n < len(ranks) else 0
        rk_up = ranks[n + 1] if n + 1 < len(ranks) else 0
        out.append(cn - rk_n - rk_up)
    return out


def f2_from_integral(h: HomologySummary) -> list[int | None]:
    """Universal-coefficient prediction of F2 dimensions from integral data."""
    out: list[int | None] = []
    for n, b in enumerate(h.betti):
        if b is None or h.torsion[n] is None or (n and h.torsion[n - 1] is None):
            out.append(None)
            continue
        even = sum(1 for t in h.torsion[n] if t % 2 == 0)
        even_below = sum(1 for t in h.torsion[n - 1] if t % 2 == 0) if n else 0
        out.append(b + even + even_below)
    return out


# -- reduction ----------------------------------------------------------------


@dataclass
class ReductionLog:
    size_before: list[int] = field(default_factory=list)
    size_after: list[int] = field(default_factory=list)
    free_faces: int = 0
    coreductions: int = 0
    eliminations: int = 0

    @property
    def ratio(self) -> float:
        after = sum(self.size_after)
        return sum(self.size_before) / after if after else math.inf


def coreduce(cc: ChainComplex) -> tuple[ChainComplex, ReductionLog]:
    """Remove unit-incidence cell pairs until none remain.

    One vertex per component is first set aside (it spans a free summand of
    H_0) and returned as an isolated cell; quotienting by it seeds the
    coreduction cascade.  Free faces (a cell with a single coface) and
    coreduction pairs (a cell with a single face) are removed without
    fill-in; remaining unit entries are eliminated in sweeps, cheapest
    first.  Every step preserves homology in the valid range.
    """
    top = cc.top
    log = ReductionLog(size_before=list(cc.ranks))
    # bd[n][cell] = {face: coef}, cob[n][cell] = {coface: coef}
    bd: list[dict[int, dict[int, int]]] = [dict() for _ in range(top + 1)]
    cob: list[dict[int, dict[int, int]]] = [dict() for _ in range(top + 1)]
    for n in range(top + 1):
        bd[n] = {i: {} for i in range(cc.ranks[n])}
        cob[n] = {i: {} for i in range(cc.ranks[n])}
    for n in range(1, top + 1):
        for c, col in cc.boundaries[n].cols.items():
            bd[n][c] = dict(col)
            for r, v in col.items():
                cob[n - 1][r][c] = v

    queue: deque[tuple[int, int]] = deque()
    for n in range(top + 1):
        for c in range(cc.ranks[n]):
            queue.append((n, c))

    def remove(n: int, c: int, touched: list):
        for f in bd[n].pop(c):
            del cob[n - 1][f][c]
            touched.append((n - 1, f))
        for g in cob[n].pop(c):
            del bd[n + 1][g][c]
            touched.append((n + 1, g))

    def try_simple(n: int, c: int) -> bool:
        if c not in bd[n]:
            return False
        # free face: c in degree n-1 of a pair, coface in degree n+1 <= top
        if n < top:
            co = cob[n][c]
            if len(co) == 1:
                (s, v), = co.items()
                if abs(v) == 1:
                    touched: list = []
                    remove(n + 1, s, touched)
                    remove(n, c, touched)
                    queue.extend(touched)
                    log.free_faces += 1
                    return True
        if n >= 1:
            faces = bd[n][c]
            if len(faces) == 1:
                (t, v), = faces.items()
                if abs(v) == 1:
                    touched = []
                    # other cofaces of t simply lose t
                    remove(n, c, touched)
                    remove(n - 1, t, touched)
                    queue.extend(touched)
                    log.coreductions += 1
                    return True
        return False

    def eliminate(n: int, s: int, t: int) -> None:
        u = bd[n][s][t]
        sigma = dict(bd[n][s])
        for rho, c in list(cob[n - 1][t].items()):
            if rho == s:
                continue
            factor = c * u
            faces = bd[n][rho]
            for f, w in sigma.items():
                nv = faces.get(f, 0) - factor * w
                if nv:
                    faces[f] = nv
                    cob[n - 1][f][rho] = nv
                else:
                    faces.pop(f, None)
                    cob[n - 1][f].pop(rho, None)
            queue.append((n, rho))
        touched: list = []
        remove(n, s, touched)
        remove(n - 1, t, touched)
        queue.extend(touched)
        log.eliminations += 1

    def cost(n: int, s: int, t: int) -> int:
        return (len(bd[n][s]) - 1) * (len(cob[n - 1][t]) - 1)

    def eliminate_batch() -> int:
        """One sweep over unit entries in (cost, degree, cell, face) order."""
        cands = []
        for n in range(1, top + 1):
            for s, faces in bd[n].items():
                for t, v in faces.items():
                    if abs(v) == 1:
                        cands.append((cost(n, s, t), n, s, t))
        cands.sort()
        done = 0
        for c0, n, s, t in cands:
            faces = bd[n].get(s)
            if faces is None or abs(faces.get(t, 0)) != 1 or cost(n, s, t) > c0:
                continue
            eliminate(n, s, t)
            done += 1
            drain()
        return done

    def drain() -> None:
        while queue:
            n, c = queue.popleft()
            try_simple(n, c)

    # quotient by one vertex per component; each one is a free H_0 summand
    parent = list(range(cc.ranks[0])) if top >= 0 else []

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if top >= 1:
        for col in cc.boundaries[1].cols.values():
            ends = list(col)
            for b in ends[1:]:
                ra, rb = find(ends[0]), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(a) for a in range(len(parent))})
    for r in roots:
        touched: list = []
        remove(0, r, touched)
        queue.extend(touched)
    drain()
    while eliminate_batch():
        pass

    # the set-aside vertices come back as isolated cells
    for r in roots:
        bd[0][r] = {}
    order = [sorted(bd[n]) for n in range(top + 1)]
    index = [{c: i for i, c in enumerate(o)} for o in order]
    ranks = [len(o) for o in order]
    boundaries = [IntMatrix(0, ranks[0])]
    for n in range(1, top + 1):
        cols = {index[n][c]: {index[n - 1][f]: v for f, v in bd[n][c].items()} for c in order[n]}
        boundaries.append(IntMatrix(ranks[n - 1], ranks[n], cols))
    log.size_after = ranks
    return ChainComplex(ranks, boundaries, cc.truncated), log


def reduced_homology(cc: ChainComplex, through: int, strict: bool = True) -> HomologySummary:
    """Homology computed after :func:`coreduce`."""
    small, _ = coreduce(cc)
    return homology(small, through, strict)
