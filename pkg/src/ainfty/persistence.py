"""Point-cloud filtrations, persistence barcodes, bottleneck distance,
and Delta_n barcodes built on transferred A-infinity coalgebras."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

from .exactlin import QQ, SparseMatrix, vstack
from .complexes import ChainComplex, GradedBasis, homology_contraction


class FilteredComplex:
    """Finite filtered simplicial complex.

    simplices is a list of (vertex tuple, filtration value) in declaration
    order; every face must be declared with a value <= the simplex's own.
    """

    def __init__(self, simplices):
        self.simplices = []
        self.value = {}
        for verts, t in simplices:
            v = tuple(sorted(verts))
            if len(set(v)) != len(v):
                raise ValueError("repeated vertex in simplex %r" % (verts,))
            if v in self.value:
                raise ValueError("simplex %r declared twice" % (v,))
            if not math.isfinite(t):
                raise ValueError("non-finite filtration value on %r" % (v,))
            for w in combinations(v, len(v) - 1):
                if len(v) == 1:
                    continue
                if w not in self.value:
                    raise ValueError("face %r of %r missing" % (w, v))
                if self.value[w] > t:
                    raise ValueError("face %r of %r appears later" % (w, v))
            self.simplices.append((v, t))
            self.value[v] = t
        if not self.simplices:
            raise ValueError("empty filtered complex")
        self.max_dim = max(len(v) - 1 for v, _ in self.simplices)

    def values(self):
        """Sorted distinct filtration values (the critical stages)."""
        return sorted(set(t for _, t in self.simplices))

    def ordered(self):
        """Simplices sorted by (value, dimension, declaration order)."""
        return sorted(range(len(self.simplices)),
                      key=lambda i: (self.simplices[i][1],
                                     len(self.simplices[i][0]), i))

    def stage(self, fieldk, t=None):
        """Chain complex of the subcomplex at value <= t (all of F if None),
        with a globally fixed per-degree simplex order so that stage bases
        are nested.  Returns (complex, key map simplex -> (degree, index))."""
        by_deg = {}
        keymap = {}
        for v, val in self.simplices:
            if t is not None and val > t:
                continue
            n = len(v) - 1
            by_deg.setdefault(n, []).append(v)
        labels = {n: ["-".join(map(str, v)) for v in vs]
                  for n, vs in by_deg.items()}
        for n, vs in by_deg.items():
            for i, v in enumerate(vs):
                keymap[v] = (n, i)
        diffs = {}
        for n, vs in by_deg.items():
            if n == 0 or (n - 1) not in by_deg:
                continue
            cols = []
            for v in vs:
                col = {}
                for i in range(len(v)):
                    w = v[:i] + v[i + 1:]
                    r = keymap[w][1]
                    col[r] = fieldk.one if i % 2 == 0 else fieldk.neg(fieldk.one)
                cols.append(col)
            diffs[n] = SparseMatrix.from_columns(fieldk, len(by_deg[n - 1]), cols)
        return ChainComplex(fieldk, GradedBasis(labels), diffs), keymap


@dataclass
class PersistenceDiagram:
    """Multiset of intervals (birth, death, degree); death may be +inf.

    kind is "classical" or "delta" (with the arity recorded); delta
    diagrams also carry the authoritative (i, j) rank table and a flag
    when the ranks are not interval-decomposable (flicker)."""

    intervals: list
    kind: str = "classical"
    arity: int = None
    discarded: int = 0
    rank_table: dict = None
    flicker: bool = False

    def __post_init__(self):
        for b, d, k in self.intervals:
            if d < b:
                raise ValueError("interval (%r, %r) has death before birth"
                                 % (b, d))

    def restrict(self, k):
        return PersistenceDiagram([iv for iv in self.intervals if iv[2] == k],
                                  kind=self.kind, arity=self.arity,
                                  discarded=self.discarded,
                                  rank_table=self.rank_table,
                                  flicker=self.flicker)


def rips(points, max_eps, max_dim):
    """Vietoris-Rips filtration: a simplex enters at the largest pairwise
    Euclidean distance among its vertices, truncated at max_eps/max_dim."""
    if not points:
        raise ValueError("empty point set")
    if max_eps <= 0:
        raise ValueError("max_eps must be positive")
    n = len(points)
    dist = [[math.dist(points[i], points[j]) for j in range(n)]
            for i in range(n)]
    simplices = [((i,), 0.0) for i in range(n)]
    frontier = [((i,), 0.0) for i in range(n)]
    for dim in range(1, max_dim + 1):
        nxt = []
        for verts, val in frontier:
            for j in range(verts[-1] + 1, n):
                ds = [dist[i][j] for i in verts]
                if max(ds) > max_eps:
                    continue
                nxt.append((verts + (j,), max(val, max(ds))))
        nxt.sort(key=lambda s: s[1])
        simplices.extend(nxt)
        frontier = nxt
    return FilteredComplex(simplices)


def _enclosing_radius(pts):
    """Radius of the smallest ball containing up to three points."""
    if len(pts) == 1:
        return 0.0
    if len(pts) == 2:
        return math.dist(pts[0], pts[1]) / 2
    sides = sorted(math.dist(pts[i], pts[j])
                   for i, j in combinations(range(3), 2))
    c, b, a = sides
    # obtuse or degenerate: the longest side's midpoint ball already covers
    if a * a >= b * b + c * c:
        return a / 2
    s = (a + b + c) / 2
    area = math.sqrt(max(s * (s - a) * (s - b) * (s - c), 0.0))
    return a * b * c / (4 * area)


def cech(points, max_eps, max_dim):
    """Cech filtration by smallest enclosing balls, ambient dimension <= 3
    and simplices up to dimension 2 only."""
    if not points:
        raise ValueError("empty point set")
    if max_eps <= 0:
        raise ValueError("max_eps must be positive")
    if any(len(p) > 3 for p in points):
        raise ValueError("cech supports ambient dimension <= 3")
    if max_dim > 2:
        raise ValueError("cech supports simplices up to dimension 2")
    n = len(points)
    simplices = [((i,), 0.0) for i in range(n)]
    for dim in range(1, max_dim + 1):
        batch = []
        for verts in combinations(range(n), dim + 1):
            r = _enclosing_radius([points[i] for i in verts])
            if r <= max_eps:
                batch.append((verts, r))
        batch.sort(key=lambda s: s[1])
        simplices.extend(batch)
    return FilteredComplex(simplices)


def barcode(F, fieldk, k=None):
    """Persistence barcode by boundary-matrix column reduction over the
    field, simplices ordered by (value, dimension, declaration).  Intervals
    are half open: a class born at b and killed at d contributes (b, d).
    Zero-length intervals are dropped but counted in the diagnostics."""
    order = F.ordered()
    pos = {F.simplices[idx][0]: p for p, idx in enumerate(order)}
    cols = []
    for p, idx in enumerate(order):
        v, _ = F.simplices[idx]
        col = {}
        for i in range(len(v)):
            if len(v) == 1:
                break
            w = v[:i] + v[i + 1:]
            col[pos[w]] = fieldk.one if i % 2 == 0 else fieldk.neg(fieldk.one)
        cols.append(col)
    pivot = {}
    pair = {}
    for j in range(len(cols)):
        col = cols[j]
        while col:
            low = max(col)
            other = pivot.get(low)
            if other is None:
                break
            c = fieldk.neg(fieldk.div(col[low], cols[other][low]))
            for r, v in cols[other].items():
                s = fieldk.add(col.get(r, fieldk.zero), fieldk.mul(c, v))
                if s:
                    col[r] = s
                elif r in col:
                    del col[r]
        if col:
            low = max(col)
            pivot[low] = j
            pair[low] = j
    intervals = []
    discarded = 0
    paired = set(pair) | set(pair.values())
    for p, idx in enumerate(order):
        v, b = F.simplices[idx]
        deg = len(v) - 1
        if p in pair:
            d = F.simplices[order[pair[p]]][1]
            if d == b:
                discarded += 1
            else:
                intervals.append((b, d, deg))
        elif p not in paired:
            intervals.append((b, math.inf, deg))
    if k is not None:
        intervals = [iv for iv in intervals if iv[2] == k]
    intervals.sort(key=lambda iv: (iv[2], iv[0], iv[1]))
    return PersistenceDiagram(intervals, kind="classical", discarded=discarded)


def _stage_cycle_boundary(F, fieldk, k, t):
    """Cycle columns Z_k at stage t and the global k-simplex key map."""
    C, keymap = F.stage(fieldk, t)
    rows = {v: i for v, (n, i) in keymap.items() if n == k}
    ker = C.d(k).kernel_basis() if C.dim(k) else []
    ksimp = [v for v, (n, _) in sorted(keymap.items(), key=lambda kv: kv[1])
             if n == k]
    bnd = C.d(k + 1).columns() if C.dim(k + 1) else []
    return ker, bnd, ksimp, rows


def persistent_rank(F, fieldk, k, i, j):
    """Rank of H_k(stage i) -> H_k(stage j), computed from cycle and
    boundary matrices directly (independently of any barcode)."""
    if i > j:
        raise ValueError("persistent_rank needs i <= j")
    zi, _, simp_i, _ = _stage_cycle_boundary(F, fieldk, k, i)
    _, bj, simp_j, rows_j = _stage_cycle_boundary(F, fieldk, k, j)
    # reindex stage-i cycles into the stage-j chain group
    zi_j = [{rows_j[simp_i[r]]: v for r, v in col.items()} for col in zi]
    nr = len(simp_j)
    B = SparseMatrix.from_columns(fieldk, nr, bj)
    ZB = SparseMatrix.from_columns(fieldk, nr, zi_j + bj)
    return ZB.rank() - B.rank()


def _bar_dist(a, b):
    db = abs(a[0] - b[0])
    if math.isinf(a[1]) or math.isinf(b[1]):
        return math.inf if math.isinf(a[1]) != math.isinf(b[1]) else db
    return max(db, abs(a[1] - b[1]))


def _diag_dist(a):
    return math.inf if math.isinf(a[1]) else (a[1] - a[0]) / 2


def _feasible(b1, b2, r):
    """Perfect matching of size |b1|+|b2| in the bar/diagonal graph at
    threshold r."""
    import networkx as nx
    G = nx.Graph()
    left = [("a", i) for i in range(len(b1))] + [("da", j) for j in range(len(b2))]
    right = [("b", j) for j in range(len(b2))] + [("db", i) for i in range(len(b1))]
    G.add_nodes_from(left, bipartite=0)
    G.add_nodes_from(right, bipartite=1)
    eps = 1e-12 * (1 + abs(r))
    for i, a in enumerate(b1):
        for j, b in enumerate(b2):
            if _bar_dist(a, b) <= r + eps:
                G.add_edge(("a", i), ("b", j))
        if _diag_dist(a) <= r + eps:
            G.add_edge(("a", i), ("db", i))
    for j, b in enumerate(b2):
        if _diag_dist(b) <= r + eps:
            G.add_edge(("da", j), ("b", j))
    for j in range(len(b2)):
        for i in range(len(b1)):
            G.add_edge(("da", j), ("db", i))
    m = nx.bipartite.hopcroft_karp_matching(G, top_nodes=left) if G.edges else {}
    return sum(1 for u in left if u in m) == len(left)


def _bottleneck_degree(b1, b2):
    inf1 = sorted(a[0] for a in b1 if math.isinf(a[1]))
    inf2 = sorted(a[0] for a in b2 if math.isinf(a[1]))
    if len(inf1) != len(inf2):
        return math.inf
    base = max((abs(x - y) for x, y in zip(inf1, inf2)), default=0.0)
    f1 = [a for a in b1 if not math.isinf(a[1])]
    f2 = [a for a in b2 if not math.isinf(a[1])]
    cand = {0.0, base}
    cand.update(_diag_dist(a) for a in f1)
    cand.update(_diag_dist(a) for a in f2)
    cand.update(_bar_dist(a, b) for a in f1 for b in f2)
    for r in sorted(cand):
        if r >= base and _feasible(f1, f2, r):
            return r
    return math.inf


def bottleneck(D1, D2):
    """Bottleneck distance between two diagrams, exact threshold search
    over the finite candidate-cost set with a perfect-matching feasibility
    test.  Infinite bars match only infinite bars; mismatched counts give
    +inf.  Degrees are matched separately and the maximum is returned."""
    degs = set(iv[2] for iv in D1.intervals) | set(iv[2] for iv in D2.intervals)
    out = 0.0
    for k in degs:
        b1 = [(iv[0], iv[1]) for iv in D1.intervals if iv[2] == k]
        b2 = [(iv[0], iv[1]) for iv in D2.intervals if iv[2] == k]
        out = max(out, _bottleneck_degree(b1, b2))
    return out


def aw_coalgebra(C, keymap):
    """Alexander-Whitney diagonal on simplicial chains: the class of
    [v_0..v_n] maps to the sum of front face tensor back face."""
    from .dgalg import DGCoalgebra
    delta = {}
    for v, key in keymap.items():
        out = {}
        for i in range(len(v)):
            out[(keymap[v[:i + 1]], keymap[v[i:]])] = C.field.one
        delta[key] = out
    return DGCoalgebra(C, delta)


def ainfty_stage(F, t, fieldk=QQ, max_arity=4):
    """Transferred A-infinity coalgebra on H_*(stage t): Alexander-Whitney
    coalgebra on the stage subcomplex, contracted by homology_contraction
    and fed to the tensor trick.  Rational coefficients only; the simplex
    order is globally fixed so stages share representatives where possible."""
    from .perturbation import tensor_trick
    if fieldk != QQ:
        raise ValueError("stage coalgebras are computed over the rationals")
    C, keymap = F.stage(fieldk, t)
    Cg = aw_coalgebra(C, keymap)
    H, con = homology_contraction(C)
    return tensor_trick(Cg, con, max_arity=max_arity)


def _homology_stage_data(F, fieldk, t, max_arity):
    from .perturbation import tensor_trick
    C, keymap = F.stage(fieldk, t)
    Cg = aw_coalgebra(C, keymap)
    H, con = homology_contraction(C)
    S = tensor_trick(Cg, con, max_arity=max_arity)
    return C, keymap, H, con, S


def _compat_check(data, n):
    """Where contraction bases at consecutive stages align (same homology
    key, same representative cycle), the Delta_n structure constants must
    restrict; emit a warning where they do not."""
    for a in range(len(data) - 1):
        Ca, ka, Ha, cona, Sa = data[a]
        Cb, kb, Hb, conb, Sb = data[a + 1]
        relabel = {key: kb[s] for s, key in ka.items()}
        aligned = set()
        for h in Ha.basis.keys():
            if h[1] >= Hb.basis.dim(h[0]):
                continue
            za = {relabel[key]: v
                  for key, v in cona.g.apply({h: Ca.field.one}).items()}
            if za == conb.g.apply({h: Cb.field.one}):
                aligned.add(h)
        for h in aligned:
            va = Sa.ops.get(n, {}).get(h, {})
            vb = Sb.ops.get(n, {}).get(h, {})
            for t in set(va) | set(vb):
                if all(key in aligned for key in t) and va.get(t) != vb.get(t):
                    warnings.warn("Delta_%d at %r does not restrict across "
                                  "stages %d -> %d" % (n, h, a, a + 1))


def delta_barcode(F, n, k, max_arity=None, fieldk=QQ):
    """Delta_n persistence in degree k.

    For critical stages i <= j the rank is dim of the image of
    H_k(stage i) -> H_k(stage j) restricted to classes whose image at
    every intermediate stage lies in the kernel of Delta_n.  The rank
    table is the authoritative output; the interval multiset is derived
    by inclusion-exclusion when the table is interval-decomposable and
    by greedy maximal intervals (with the flicker flag set) otherwise.
    """
    if max_arity is None:
        max_arity = n
    if max_arity < n:
        raise ValueError("arity limit below the requested Delta_n")
    if fieldk != QQ:
        raise ValueError("delta_barcode works over the rationals")
    stages = F.values()
    data = [_homology_stage_data(F, fieldk, t, max_arity) for t in stages]
    _compat_check(data, n)

    def hkeys(H, deg):
        return [key for key in H.basis.keys() if key[0] == deg]

    # iota[a][b]: matrix of H_k(stage a) -> H_k(stage b) on the chosen bases
    iota = {}
    dmat = []
    for b, (Cb, kb, Hb, conb, Sb) in enumerate(data):
        rows_b = {key: i for i, key in enumerate(hkeys(Hb, k))}
        for a in range(b + 1):
            Ca, ka, Ha, cona, Sa = data[a]
            srcs = hkeys(Ha, k)
            relabel = {key: kb[simp] for simp, key in ka.items()}
            cols = []
            for h in srcs:
                z = cona.g.apply({h: Ca.field.one})
                zb = {relabel[key]: v for key, v in z.items()}
                cls = conb.f.apply(zb)
                cols.append({rows_b[key]: v for key, v in cls.items()})
            iota[(a, b)] = SparseMatrix.from_columns(fieldk, len(rows_b), cols)
        # Delta_n on degree k at stage b, target basis enumerated lazily
        srcs = hkeys(Hb, k)
        tkeys = {}
        cols = []
        for h in srcs:
            col = {}
            for t, v in Sb.ops.get(n, {}).get(h, {}).items():
                if t not in tkeys:
                    tkeys[t] = len(tkeys)
                col[tkeys[t]] = v
            cols.append(col)
        dmat.append(SparseMatrix.from_columns(fieldk, max(len(tkeys), 1), cols))

    m = len(stages)
    rank = {}
    for a in range(m):
        Ha = data[a][2]
        dim_a = len(hkeys(Ha, k))
        for b in range(a, m):
            pieces = [dmat[l] * iota[(a, l)] for l in range(a, b + 1)]
            stacked = vstack(pieces) if len(pieces) > 1 else pieces[0]
            kerb = stacked.kernel_basis() if dim_a else []
            K = SparseMatrix.from_columns(fieldk, dim_a, kerb)
            rank[(a, b)] = (iota[(a, b)] * K).rank()

    def r(a, b):
        if a < 0 or b >= m or a > b:
            return 0
        return rank[(a, b)]

    # inclusion-exclusion; r(a, m) = 0 encodes death after the last stage
    mu = {}
    ok = True
    for a in range(m):
        # bars dying strictly after stage b live on [a, b]; b = m-1 with
        # survival encoded separately as an infinite bar
        for b in range(a, m):
            v = (r(a, b) - r(a, b + 1)) - (r(a - 1, b) - r(a - 1, b + 1))
            if v < 0:
                ok = False
            if v:
                mu[(a, b)] = v
    intervals = []
    flicker = False
    if ok:
        # verify the multiset reproduces the table exactly
        for a in range(m):
            for b in range(a, m):
                got = sum(v for (x, y), v in mu.items() if x <= a and b <= y)
                if got != r(a, b):
                    ok = False
    if ok:
        chosen = mu
    else:
        flicker = True
        resid = dict(rank)
        chosen = {}
        spans = sorted(((a, b) for a in range(m) for b in range(a, m)),
                       key=lambda ab: (ab[0] - ab[1], ab[0]))
        for a, b in spans:
            while resid[(a, b)] > 0:
                chosen[(a, b)] = chosen.get((a, b), 0) + 1
                for x in range(a, b + 1):
                    for y in range(x, b + 1):
                        resid[(x, y)] = max(resid[(x, y)] - 1, 0)
    for (a, b), cnt in sorted(chosen.items()):
        birth = stages[a]
        death = math.inf if b == m - 1 else stages[b + 1]
        intervals.extend([(birth, death, k)] * cnt)
    table = {(stages[a], stages[b]): v for (a, b), v in rank.items()}
    intervals.sort()
    return PersistenceDiagram(intervals, kind="delta", arity=n,
                              rank_table=table, flicker=flicker)
