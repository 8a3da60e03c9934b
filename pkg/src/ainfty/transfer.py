"""Inductive transfer of higher multiplications onto homology.

All operations are stored in the suspended convention of dgalg: the
chain-level binary operation entering the recursion is the bar product
mu(a, b) = (-1)^(|a|+1) a.b, and with

    U_n = sum_{p+q=n} mu(f_p (x) f_q)
        - sum_{s=2}^{n-1} sum_r (-1)^(||x_1||+...+||x_r||)
              f_{n-s+1}(1^r (x) m_s (x) 1^t)

the recursion m_n = pi U_n, f_n = h(iota m_n - U_n) produces operations
whose Stasheff defect vanishes identically (checked, not assumed).  No
further signs appear; the suspension absorbs the Koszul bookkeeping.
"""
from __future__ import annotations

from itertools import product as iproduct

from .complexes import homology_contraction
from .dgalg import (AInfinityMorphism, AInfinityStructure, chain_add,
                    chain_degree, chain_scale, check_dga, stasheff_defect)
from .perturbation import check_contraction


class TorsionFailure(Exception):
    """The candidate central element has torsion inside the window."""


class FreenessFailure(Exception):
    """Homology is not free over k[z] on the given basis in the window."""


class CommutativityFailure(Exception):
    """A stored morphism value fails to commute with the central cycle."""


def bar_product(A, a, b):
    """mu(a, b) = (-1)^(|a|+1) a.b, extended bilinearly over chains."""
    f = A.field
    out = {}
    for ka, va in a.items():
        sgn = f.one if (ka[0] + 1) % 2 == 0 else f.neg(f.one)
        row = A.product({ka: f.mul(sgn, va)}, b)
        out = chain_add(f, out, row)
    return out


class TransferState:
    """Progress of the recursion: structure S and morphism F certified up
    to arity frontier - 1."""

    def __init__(self, A, con, S, F, frontier):
        self.A = A
        self.con = con
        self.S = S
        self.F = F
        self.frontier = frontier

    @property
    def field(self):
        return self.A.field


def transfer_start(A, max_arity=8, con=None):
    """Initial state: contraction onto homology, strict m_2, and f_1, f_2.

    A custom contraction of A.complex onto a zero-differential small
    complex may be supplied; the transferred structure depends on that
    choice, though all choices give isomorphic structures.
    """
    rep = check_dga(A)
    if not rep:
        raise ValueError("transfer input is not a dg-algebra: %s" % rep.message)
    if con is None:
        H, con = homology_contraction(A.complex)
    else:
        H = con.small
        for n in H.basis.degrees():
            if not H.d(n).is_zero():
                raise ValueError("custom contraction target must have zero "
                                 "differential")
        for n in A.complex.basis.degrees():
            if con.big.d(n) != A.complex.d(n):
                raise ValueError("custom contraction big complex disagrees "
                                 "with the algebra at degree %d" % n)
    rep = check_contraction(con)
    if not rep:
        raise ValueError("contraction identities failed: %s" % rep.message)
    f = A.field
    S = AInfinityStructure(H, "algebra", {1: {}, 2: {}}, certified_arity=2)
    F = AInfinityMorphism(S, A, {1: {}, 2: {}})
    for k in H.basis.keys():
        F.comps[1][(k,)] = con.g.apply({k: f.one})
    st = TransferState(A, con, S, F, 2)
    for ka in H.basis.keys():
        for kb in H.basis.keys():
            if _provably_zero(st, (ka, kb)):
                continue
            u = u_map(st, 2, (ka, kb))
            m = con.f.apply(u)
            if m:
                S.ops[2][(ka, kb)] = m
            fv = con.phi.apply(_sub(f, con.g.apply(m), u))
            if fv:
                F.comps[2][(ka, kb)] = fv
    st.frontier = 3
    return st


def _sub(field, a, b):
    return chain_add(field, a, chain_scale(field, field.neg(field.one), b))


def _provably_zero(st, keys):
    """Both m_n and f_n land outside the carrier's degree support, so the
    values are zero without computing anything."""
    n = len(keys)
    sigma = sum(k[0] for k in keys)
    C = st.A.complex
    return sigma + n - 1 < C.min_deg or sigma + n - 2 > C.max_deg


def u_map(st, n, keys):
    """Obstruction term U_n on a basis tuple of homology classes."""
    if n > st.frontier:
        raise ValueError("u_map called at arity %d but frontier is %d"
                         % (n, st.frontier))
    return _u_value(st, n, keys)


def _u_value(st, n, keys):
    A, S, F = st.A, st.S, st.F
    f = st.field
    total = {}
    for p in range(1, n):
        a = F.f(p, keys[:p])
        b = F.f(n - p, keys[p:])
        if a and b:
            total = chain_add(f, total, bar_product(A, a, b))
    for s in range(2, n):
        for r in range(n - s + 1):
            inner = S.m(s, keys[r:r + s])
            if not inner:
                continue
            sgn_exp = sum(k[0] + 1 for k in keys[:r])
            sgn = f.one if sgn_exp % 2 == 0 else f.neg(f.one)
            for mk, mv in inner.items():
                out = F.f(n - s + 1, keys[:r] + (mk,) + keys[r + s:])
                if out:
                    total = chain_add(f, total,
                                      chain_scale(f, f.mul(f.neg(sgn), mv), out))
    return total


def _candidate_tuples(st, n):
    """Tuples where some term of U_n can be nonzero, from the supports of
    the stored tables; everything else is zero without evaluation."""
    S, F = st.S, st.F
    cands = set()
    for p in range(1, n):
        left = F.comps.get(p, {})
        right = F.comps.get(n - p, {})
        for ta in left:
            for tb in right:
                cands.add(ta + tb)
    for s in range(2, n):
        inner = list(S.ops.get(s, {}))
        outer = list(F.comps.get(n - s + 1, {}))
        for y in outer:
            for r in range(len(y)):
                for w in inner:
                    # only useful when m_s(w) touches the slot key y[r]
                    if y[r] in S.ops[s][w]:
                        cands.add(y[:r] + w + y[r + 1:])
    return cands


def extend_step(st):
    """Populate arity n = frontier: m_n = pi U_n, f_n = h(iota m_n - U_n)."""
    n = st.frontier
    if n < 3:
        raise ValueError("extend_step needs frontier >= 3")
    rep = check_contraction(st.con)
    if not rep:
        raise ValueError("corrupted contraction: %s" % rep.message)
    f = st.field
    H = st.S.carrier
    ops = {k: dict(v) for k, v in st.S.ops.items()}
    comps = {k: dict(v) for k, v in st.F.comps.items()}
    ops[n] = {}
    comps[n] = {}
    for keys in sorted(_candidate_tuples(st, n)):
        if _provably_zero(st, keys):
            continue
        u = _u_value(st, n, keys)
        m = st.con.f.apply(u)
        if m:
            ops[n][keys] = m
        fv = st.con.phi.apply(_sub(f, st.con.g.apply(m), u))
        if fv:
            comps[n][keys] = fv
    S = AInfinityStructure(H, "algebra", ops, certified_arity=n)
    F = AInfinityMorphism(S, st.A, comps)
    return TransferState(st.A, st.con, S, F, n + 1)


def morphism_defect(st, n):
    """d f_n - (iota m_n - U_n) on every stored tuple; all-zero dict means
    the recursion identity holds at arity n."""
    f = st.field
    out = {}
    for keys in list(st.F.comps.get(n, {})) + list(st.S.ops.get(n, {})):
        keys = tuple(keys)
        if keys in out:
            continue
        u = _u_value(st, n, keys)
        m = st.S.m(n, keys)
        lhs = st.A.complex.apply_d(st.F.f(n, keys))
        rhs = _sub(f, st.con.g.apply(m), u)
        diff = _sub(f, lhs, rhs)
        if diff:
            out[keys] = diff
    return out


def gap_check(st, q):
    """True when m_k and f_k vanish identically (as stored maps) for all
    q <= k <= 2q - 2, which forces all higher operations to vanish."""
    if st.S.certified_arity < 2 * q - 2:
        raise ValueError("gap_check at q=%d needs certified arity %d, have %d"
                         % (q, 2 * q - 2, st.S.certified_arity))
    for k in range(q, 2 * q - 1):
        if st.S.ops.get(k) or st.F.comps.get(k):
            return False
    return True


def transfer_full(A, max_arity=8, gap_search=True, con=None):
    """Run the recursion up to max_arity or until a gap certifies
    completeness; returns (structure, morphism, complete flag)."""
    st = transfer_start(A, max_arity=max_arity, con=con)
    complete = False
    while st.frontier <= max_arity:
        if gap_search:
            for q in range(2, st.S.certified_arity // 2 + 2):
                if 2 * q - 2 <= st.S.certified_arity and gap_check(st, q):
                    complete = True
                    break
            if complete:
                break
        st = extend_step(st)
    if gap_search and not complete:
        for q in range(2, st.S.certified_arity // 2 + 2):
            if 2 * q - 2 <= st.S.certified_arity and gap_check(st, q):
                complete = True
                break
    return st.S, st.F, complete, st


class CentralElement:
    """Candidate polynomial generator z with a chosen chain representative
    and a k[z]-module basis of homology inside the window."""

    def __init__(self, z, z_chain, basis, period):
        self.z = z            # chain on H, homogeneous of degree period
        self.z_chain = z_chain  # cycle in A representing z
        self.basis = list(basis)  # H basis keys generating H over k[z]
        self.period = period

    def __repr__(self):
        return "CentralElement(period=%d, basis=%d elements)" % (
            self.period, len(self.basis))


def _strict_action(st, z, h_chain):
    """[z . h] on homology via chain representatives (plain product)."""
    zc = st.con.g.apply(z)
    hc = st.con.g.apply(h_chain)
    return st.con.f.apply(st.A.product(zc, hc))


def _m_multi(st, n, chains):
    """m_n extended multilinearly to a tuple of chains on homology."""
    f = st.field
    total = {}
    for combo in iproduct(*[list(c.items()) for c in chains]):
        coeff = f.one
        for _, v in combo:
            coeff = f.mul(coeff, v)
        val = st.S.m(n, tuple(k for k, _ in combo))
        total = chain_add(f, total, chain_scale(f, coeff, val))
    return total


def kz_extend(st, z):
    """Extend the transferred operations k[z]-linearly over the window.

    Checks the theorem's hypotheses computationally on the k[z]-submodule
    generated by z.basis: z non-torsion on the translates visible in the
    window, translates linearly independent degreewise, and chain-level
    commutativity of z_chain with every stored morphism value.  Homology
    keys outside that submodule (truncation artifacts of a finite window)
    get no extended operations; tuples whose z-translate escapes the
    window stay undefined.  Where the extension and the direct transfer
    are both defined they must agree, and disagreement is an error.
    """
    f = st.field
    H = st.S.carrier
    A = st.A
    hdegs = H.basis.degrees()
    hmin, hmax = min(hdegs), max(hdegs)

    # z-translates of the basis inside the window; a nonzero class killed
    # by z while the target degree is still visible is torsion
    translates = {}  # (j, i) -> chain on H representing z^j . b_i
    for i, b in enumerate(z.basis):
        cur = dict(b) if isinstance(b, dict) else {b: f.one}
        j = 0
        while cur:
            translates[(j, i)] = cur
            if not (hmin <= chain_degree(cur) + z.period <= hmax):
                break
            nxt = _strict_action(st, z.z, cur)
            if not nxt:
                raise TorsionFailure(
                    "z kills the translate z^%d b_%d inside the window" % (j, i))
            cur = nxt
            j += 1

    # freeness: translates independent degreewise; homology keys in their
    # span get a unique z-decomposition
    from .exactlin import NoSolution, SparseMatrix
    decomp = {}  # H basis key -> chain over (j, basis index) pairs
    for d in hdegs:
        keys_d = list(H.basis.keys(d))
        idx = {k: a for a, k in enumerate(keys_d)}
        cols, names = [], []
        for (j, i), c in translates.items():
            if chain_degree(c) == d:
                cols.append({idx[k]: v for k, v in c.items()})
                names.append((j, i))
        if not cols:
            continue
        m = SparseMatrix.from_columns(f, len(keys_d), cols)
        if m.rank() != len(cols):
            raise FreenessFailure("z-translates are dependent in H_%d" % d)
        for k in keys_d:
            try:
                sol = m.solve_preimage({idx[k]: f.one})
            except NoSolution:
                continue
            decomp[k] = {names[c]: v for c, v in sol.items()}

    # chain-level commutativity of z_chain with every stored f_k value on
    # tuples from the extension's domain
    in_span = set(decomp)
    for n, table in st.F.comps.items():
        for keys, val in table.items():
            if not all(k in in_span for k in keys):
                continue
            left = A.product(z.z_chain, val)
            right = A.product(val, z.z_chain)
            if left != right:
                raise CommutativityFailure(
                    "z_chain does not commute with f_%d at %r" % (n, keys))

    # extension: m_n(z^{j_1} b_{i_1}, ...) = z^{sum j} m_n(b_{i_1}, ...)
    span_keys = sorted(decomp)
    basis_chain = {i: (dict(b) if isinstance(b, dict) else {b: f.one})
                   for i, b in enumerate(z.basis)}
    ops = {n: {} for n in st.S.ops}
    partial = set()  # tuples whose z-translate escapes the window
    for n in st.S.ops:
        if n == 1:
            continue
        for keys in iproduct(span_keys, repeat=n):
            items = [list(decomp[k].items()) for k in keys]
            total = {}
            ok = True
            for combo in iproduct(*items):
                jsum = sum(ji[0] for ji, _ in combo)
                coeff = f.one
                for _, v in combo:
                    coeff = f.mul(coeff, v)
                val = _m_multi(st, n, [basis_chain[ji[1]] for ji, _ in combo])
                # multiply the value by z^jsum on homology
                cur = dict(val)
                for _ in range(jsum):
                    if not cur:
                        break
                    if not (hmin <= chain_degree(cur) + z.period <= hmax):
                        ok = False
                        break
                    cur = _strict_action(st, z.z, cur)
                if not ok:
                    break
                total = chain_add(f, total, chain_scale(f, coeff, cur))
            if not ok:
                partial.add(keys)
                continue
            if total:
                ops[n][keys] = total
    ext = AInfinityStructure(H, "algebra", ops,
                             certified_arity=st.S.certified_arity)

    # overlap check: extension equals the direct transfer where both exist
    for n in st.S.ops:
        if n == 1:
            continue
        for keys in set(st.S.ops[n]) | set(ops[n]):
            if keys in partial or not all(k in in_span for k in keys):
                continue
            if ops[n].get(keys, {}) != st.S.m(n, keys):
                raise ValueError(
                    "k[z]-extension disagrees with the direct transfer at %r"
                    % (keys,))
    return ext
