"""Graded based chain complexes, degree-shifted chain maps, contractions.

Internal convention is homological throughout: the differential has
degree -1.  Every complex lives on a finite truncation window
[min_deg, max_deg]; identities are only asserted inside the window and
callers are expected to leave a degree of slack at each end.

Chains are sparse dicts keyed by (degree, index) with nonzero scalar
values.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exactlin import SparseMatrix, hstack


@dataclass
class CheckReport:
    """Pass/first-failure result of a structural checker."""

    ok: bool
    message: str = ""
    degree: int = None
    witness: object = None

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "CheckReport(pass)"
        return "CheckReport(FAIL: %s)" % self.message


PASS = CheckReport(True)


class GradedBasis:
    """Ordered basis labels per degree on a finite degree window."""

    def __init__(self, labels_by_degree):
        self.labels = {n: tuple(ls) for n, ls in labels_by_degree.items() if ls}
        for n, ls in self.labels.items():
            if len(set(ls)) != len(ls):
                raise ValueError("duplicate labels in degree %d" % n)
        if self.labels:
            self.min_deg = min(self.labels)
            self.max_deg = max(self.labels)
        else:
            self.min_deg = 0
            self.max_deg = 0
        self._index = {n: {l: i for i, l in enumerate(ls)}
                       for n, ls in self.labels.items()}

    def dim(self, n):
        return len(self.labels.get(n, ()))

    def degrees(self):
        return sorted(self.labels)

    def label(self, key):
        n, i = key
        return self.labels[n][i]

    def index(self, n, label):
        return self._index[n][label]

    def keys(self, n=None):
        if n is not None:
            return [(n, i) for i in range(self.dim(n))]
        return [(n, i) for n in self.degrees() for i in range(self.dim(n))]

    def __eq__(self, other):
        return isinstance(other, GradedBasis) and self.labels == other.labels


class ChainComplex:
    """Finite based chain complex with differential of degree -1."""

    def __init__(self, field, basis, differentials=None):
        self.field = field
        self.basis = basis if isinstance(basis, GradedBasis) else GradedBasis(basis)
        self.diff = {}
        for n, m in (differentials or {}).items():
            expect = (self.basis.dim(n - 1), self.basis.dim(n))
            if (m.nrows, m.ncols) != expect:
                raise ValueError("differential at degree %d has shape %dx%d, expected %dx%d"
                                 % (n, m.nrows, m.ncols, *expect))
            if m.entries:
                self.diff[n] = m

    @property
    def min_deg(self):
        return self.basis.min_deg

    @property
    def max_deg(self):
        return self.basis.max_deg

    def dim(self, n):
        return self.basis.dim(n)

    def d(self, n):
        m = self.diff.get(n)
        if m is None:
            m = SparseMatrix.zero(self.field, self.basis.dim(n - 1), self.basis.dim(n))
        return m

    def in_window(self, n):
        return self.min_deg <= n <= self.max_deg

    def basis_chain(self, key):
        return {key: self.field.one}

    def apply_d(self, chain):
        out = {}
        f = self.field
        for (n, i), c in chain.items():
            col = self.d(n).column(i)
            for r, v in col.items():
                k = (n - 1, r)
                s = f.add(out.get(k, f.zero), f.mul(c, v))
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return out

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.field == other.field
                and self.basis == other.basis
                and all(self.d(n) == other.d(n)
                        for n in set(self.diff) | set(other.diff)))


def verify_complex(C):
    """Check d(n-1) . d(n) == 0 at every degree of the window."""
    for n in range(C.min_deg + 2, C.max_deg + 1):
        prod = C.d(n - 1) * C.d(n)
        if not prod.is_zero():
            (i, j) = sorted(prod.entries)[0]
            return CheckReport(False,
                               "d.d != 0 at degree %d, column %r" % (n, C.basis.label((n, j))),
                               degree=n, witness=C.basis.label((n, j)))
    return PASS


def koszul_sign(degrees, permutation):
    """Sign of permuting graded symbols: -1 per inversion of an odd-odd pair.

    `permutation[k]` is the original position of the element placed at
    position k in the result.
    """
    sign = 1
    n = len(permutation)
    if sorted(permutation) != list(range(n)):
        raise ValueError("not a permutation of 0..%d" % (n - 1))
    for a in range(n):
        for b in range(a + 1, n):
            if permutation[a] > permutation[b]:
                if degrees[permutation[a]] % 2 and degrees[permutation[b]] % 2:
                    sign = -sign
    return sign


class ChainMap:
    """Degreewise linear map with a degree shift r.

    Genuine chain maps (even r) commute with the differential up to
    (-1)^r; homotopies carry r=+1 and no commutation invariant.
    """

    def __init__(self, source, target, shift, components=None):
        self.source = source
        self.target = target
        self.shift = shift
        self.comps = {}
        for n, m in (components or {}).items():
            expect = (target.dim(n + shift), source.dim(n))
            if (m.nrows, m.ncols) != expect:
                raise ValueError("component at degree %d has shape %dx%d, expected %dx%d"
                                 % (n, m.nrows, m.ncols, *expect))
            if m.entries:
                self.comps[n] = m

    @classmethod
    def identity(cls, C):
        return cls(C, C, 0, {n: SparseMatrix.identity(C.field, C.dim(n))
                             for n in C.basis.degrees()})

    @classmethod
    def zero(cls, source, target, shift):
        return cls(source, target, shift)

    def component(self, n):
        m = self.comps.get(n)
        if m is None:
            m = SparseMatrix.zero(self.source.field,
                                  self.target.dim(n + self.shift), self.source.dim(n))
        return m

    def apply(self, chain):
        f = self.source.field
        out = {}
        for (n, i), c in chain.items():
            col = self.component(n).column(i)
            for r, v in col.items():
                k = (n + self.shift, r)
                s = f.add(out.get(k, f.zero), f.mul(c, v))
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return out

    def is_zero(self):
        return not self.comps

    def __add__(self, other):
        if self.shift != other.shift:
            raise ValueError("shift mismatch in chain map sum")
        comps = {}
        for n in set(self.comps) | set(other.comps):
            comps[n] = self.component(n) + other.component(n)
        return ChainMap(self.source, self.target, self.shift, comps)

    def __sub__(self, other):
        return self + other.scale(self.source.field.neg(self.source.field.one))

    def scale(self, c):
        return ChainMap(self.source, self.target, self.shift,
                        {n: m.scale(c) for n, m in self.comps.items()})

    def __eq__(self, other):
        if not isinstance(other, ChainMap) or self.shift != other.shift:
            return False
        degs = set(self.comps) | set(other.comps)
        return all(self.component(n) == other.component(n) for n in degs)

    def check_chain_map(self):
        """Commutation with the differentials up to (-1)^shift on the window."""
        f = self.source.field
        sgn = f.one if self.shift % 2 == 0 else f.neg(f.one)
        for n in range(self.source.min_deg + 1, self.source.max_deg + 1):
            if not self.target.in_window(n + self.shift - 1):
                continue
            lhs = self.target.d(n + self.shift) * self.component(n)
            rhs = (self.component(n - 1) * self.source.d(n)).scale(sgn)
            if lhs != rhs:
                return CheckReport(False, "chain map fails to commute at degree %d" % n,
                                   degree=n)
        return PASS


def compose(a, b):
    """Composite a . b of chain maps; shifts add."""
    if a.source is not b.target and a.source != b.target:
        raise ValueError("compose: target of second argument must be source of first")
    comps = {}
    for n in b.source.basis.degrees():
        m = a.component(n + b.shift) * b.component(n)
        if m.entries:
            comps[n] = m
    return ChainMap(b.source, a.target, a.shift + b.shift, comps)


@dataclass
class Contraction:
    """Deformation-retract data (f, g, phi) from a big complex onto a small one.

    f: big -> small, g: small -> big (both shift 0), phi: big -> big of
    shift +1, subject to the five identities checked in
    perturbation.check_contraction.
    """

    big: ChainComplex
    small: ChainComplex
    f: ChainMap
    g: ChainMap
    phi: ChainMap


def homology_contraction(C):
    """Homology of C with zero differential, plus a contraction onto it.

    Per degree the basis splits as boundaries + chosen cycle
    representatives + a complement mapping isomorphically onto the
    boundaries below; all choices follow rref pivot conventions, so the
    output is deterministic.
    """
    field = C.field
    pivots_at = {n: C.d(n).rref()[1] for n in range(C.min_deg, C.max_deg + 2)}

    h_labels = {}
    f_comps, g_comps, phi_comps = {}, {}, {}
    for n in C.basis.degrees():
        dim = C.dim(n)
        dn = C.d(n)
        dn1 = C.d(n + 1)
        # boundary basis: d of the pivot columns of d_{n+1}
        b_cols = [dn1.column(j) for j in pivots_at[n + 1]] if C.in_window(n + 1) else []
        z_cols = dn.kernel_basis() if C.in_window(n - 1) else \
            [{i: field.one} for i in range(dim)]
        bz = SparseMatrix.from_columns(field, dim, b_cols + z_cols)
        _, bz_pivots, _ = bz.rref()
        h_cols = [z_cols[j - len(b_cols)] for j in bz_pivots if j >= len(b_cols)]
        a_idx = list(pivots_at[n]) if C.in_window(n - 1) else []

        nb, nh, na = len(b_cols), len(h_cols), len(a_idx)
        if nb + nh + na != dim:
            raise AssertionError("decomposition miscount at degree %d" % n)
        h_labels[n] = ["h%d_%d" % (n, i) for i in range(nh)]

        a_cols = [{i: field.one} for i in a_idx]
        P = SparseMatrix.from_columns(field, dim, b_cols + h_cols + a_cols)
        _, p_piv, Pinv = P.rref()
        if len(p_piv) != dim:
            raise AssertionError("basis change not invertible at degree %d" % n)

        # f: take the H-block coordinates
        f_ent = {(r, j): v for (i, j), v in Pinv.entries.items()
                 if nb <= i < nb + nh for r in [i - nb]}
        f_comps[n] = SparseMatrix(field, nh, dim, f_ent)
        g_comps[n] = SparseMatrix.from_columns(field, dim, h_cols)
        # phi: B-block coordinate j goes to the A-column a_j one degree up
        if nb:
            up = pivots_at[n + 1]
            sel = {(up[i], j): v for (i, j), v in Pinv.entries.items() if i < nb}
            phi_comps[n] = SparseMatrix(field, C.dim(n + 1), dim, sel)

    H = ChainComplex(field, GradedBasis(h_labels))
    con = Contraction(
        big=C, small=H,
        f=ChainMap(C, H, 0, f_comps),
        g=ChainMap(H, C, 0, g_comps),
        phi=ChainMap(C, C, 1, phi_comps),
    )
    return H, con


def tensor_power(C, k):
    """k-fold tensor power of C, with the Koszul-signed differential.

    Basis tensors are labelled "a|b|..." in lexicographic key order.
    """
    field = C.field
    keys = C.basis.keys()
    from itertools import product

    tuples_by_degree = {}
    for tup in product(keys, repeat=k):
        n = sum(key[0] for key in tup)
        tuples_by_degree.setdefault(n, []).append(tup)
    labels = {}
    index = {}
    for n, tups in sorted(tuples_by_degree.items()):
        tups.sort()
        labels[n] = ["|".join(C.basis.label(key) for key in tup) for tup in tups]
        for i, tup in enumerate(tups):
            index[tup] = (n, i)

    diff = {}
    for n, tups in tuples_by_degree.items():
        ent = {}
        for j, tup in enumerate(tups):
            sign_deg = 0
            for pos in range(k):
                key = tup[pos]
                col = C.d(key[0]).column(key[1])
                s = field.one if sign_deg % 2 == 0 else field.neg(field.one)
                for r, v in col.items():
                    newtup = tup[:pos] + ((key[0] - 1, r),) + tup[pos + 1:]
                    if newtup in index:
                        (_, i) = index[newtup]
                        cur = ent.get((i, j), field.zero)
                        ent[(i, j)] = field.add(cur, field.mul(s, v))
                sign_deg += key[0]
        m = SparseMatrix(field, len(tuples_by_degree.get(n - 1, [])), len(tups), ent)
        if m.entries:
            diff[n] = m
    T = ChainComplex(field, GradedBasis(labels), diff)
    T.factor_index = index
    T.factor_tuple = {v: t for t, v in index.items()}
    return T


def tensor_map(maps):
    """Tensor product of chain maps on the same graded object.

    Acts on basis tensors with Koszul signs: the i-th map picks up
    (-1)^(shift_i * (|x_1|+...+|x_{i-1}|)).
    """
    k = len(maps)
    src = maps[0].source
    tgt = maps[0].target
    for m in maps:
        if m.source != src or m.target != tgt:
            raise ValueError("tensor_map: all factors must share source and target")
    field = src.field
    S = tensor_power(src, k)
    T = tgt if k == 1 else tensor_power(tgt, k)
    t_index = T.factor_index if k > 1 else {(key,): key for key in tgt.basis.keys()}
    shift = sum(m.shift for m in maps)

    comps = {}
    ent_by_deg = {}
    for tup, (n, j) in S.factor_index.items():
        partial = [((), field.one)]
        degsum = 0
        for pos in range(k):
            key = tup[pos]
            col = maps[pos].component(key[0]).column(key[1])
            sgn = field.one
            if maps[pos].shift % 2 and degsum % 2:
                sgn = field.neg(field.one)
            new_partial = []
            for prefix, coeff in partial:
                for r, v in col.items():
                    new_partial.append((prefix + ((key[0] + maps[pos].shift, r),),
                                        field.mul(coeff, field.mul(sgn, v))))
            partial = new_partial
            degsum += key[0]
            if not partial:
                break
        for outtup, coeff in partial:
            loc = t_index.get(outtup)
            if loc is None:
                continue
            (_, i) = loc
            ent = ent_by_deg.setdefault(n, {})
            cur = ent.get((i, j), field.zero)
            s = field.add(cur, coeff)
            if s:
                ent[(i, j)] = s
            elif (i, j) in ent:
                del ent[(i, j)]
    for n, ent in ent_by_deg.items():
        tgt_dim = T.dim(n + shift)
        src_dim = S.dim(n)
        comps[n] = SparseMatrix(field, tgt_dim, src_dim, ent)
    Ssrc = S
    Ttgt = T if k > 1 else tgt
    return ChainMap(Ssrc, Ttgt, shift, comps)
