"""Contraction calculus: the Basic Perturbation Lemma and the tensor trick."""
from __future__ import annotations

from dataclasses import dataclass

from .complexes import (ChainComplex, ChainMap, CheckReport, Contraction,
                        PASS, compose)


def _first_mismatch(a, b):
    return sorted(n for n in set(a.comps) | set(b.comps)
                  if a.component(n) != b.component(n))[0]


class NilpotenceExceeded(Exception):
    """The geometric series of the perturbation lemma failed to terminate."""


def check_contraction(c):
    """Verify the five contraction identities degreewise on the window."""
    f, g, phi = c.f, c.g, c.phi
    N, M = c.big, c.small
    checks = [
        ("fg != id on the small complex", compose(f, g), ChainMap.identity(M)),
        ("f.phi != 0", compose(f, phi), ChainMap.zero(N, M, 1)),
        ("phi.g != 0", compose(phi, g), ChainMap.zero(M, N, 1)),
        ("phi.phi != 0", compose(phi, phi), ChainMap.zero(N, N, 2)),
    ]
    for msg, got, want in checks:
        if got != want:
            bad = _first_mismatch(got, want)
            return CheckReport(False, "%s (first failure at degree %d)" % (msg, bad),
                               degree=bad)
    # gf + phi d + d phi = id on N
    dN = ChainMap(N, N, -1, {n: N.d(n) for n in N.basis.degrees() if N.d(n).entries})
    lhs = compose(g, f) + compose(phi, dN) + compose(dN, phi)
    if lhs != ChainMap.identity(N):
        bad = _first_mismatch(lhs, ChainMap.identity(N))
        return CheckReport(False,
                           "gf + phi.d + d.phi != id (first failure at degree %d)" % bad,
                           degree=bad)
    return PASS


@dataclass
class Perturbation:
    """A degree -1 perturbation delta of the big differential of a contraction.

    Requires (d + delta)^2 = 0 on the window and pointwise nilpotence of
    phi.delta within nil_bound steps.
    """

    delta: ChainMap
    host: Contraction
    nil_bound: int = 0

    def __post_init__(self):
        if self.nil_bound <= 0:
            N = self.host.big
            self.nil_bound = N.max_deg - N.min_deg + 2

    def check(self):
        N = self.host.big
        field = N.field
        dN = ChainMap(N, N, -1, {n: N.d(n) for n in N.basis.degrees()
                                 if N.d(n).entries})
        total = dN + self.delta
        sq = compose(total, total)
        if not sq.is_zero():
            bad = sorted(sq.comps)[0]
            return CheckReport(False, "(d + delta)^2 != 0 at degree %d" % bad,
                               degree=bad)
        pd = compose(self.host.phi, self.delta)
        for key in [(n, i) for n in N.basis.degrees() for i in range(N.dim(n))]:
            vec = {key: field.one}
            for _ in range(self.nil_bound + 1):
                if not vec:
                    break
                vec = pd.apply(vec)
            if vec:
                return CheckReport(False,
                                   "phi.delta not nilpotent within %d steps on %r"
                                   % (self.nil_bound, N.basis.label(key)),
                                   witness=N.basis.label(key))
        return PASS


def _series(c, p):
    """S = sum_{i>=0} (-1)^i (phi delta)^i as a degree-0 map on the big complex.

    Evaluated per basis element, terminating by pointwise nilpotence.
    """
    N = c.big
    field = N.field
    pd = compose(c.phi, p.delta)
    cols = {n: [] for n in N.basis.degrees()}
    for n in N.basis.degrees():
        for i in range(N.dim(n)):
            vec = {(n, i): field.one}
            acc = dict(vec)
            sign = field.neg(field.one)
            for step in range(p.nil_bound + 1):
                vec = pd.apply(vec)
                if not vec:
                    break
                for k, v in vec.items():
                    s = field.add(acc.get(k, field.zero), field.mul(sign, v))
                    if s:
                        acc[k] = s
                    elif k in acc:
                        del acc[k]
                sign = field.neg(sign)
            else:
                raise NilpotenceExceeded(
                    "series did not terminate within %d steps on %r"
                    % (p.nil_bound, N.basis.label((n, i))))
            cols[n].append({r: v for (m, r), v in acc.items() if m == n})
    from .exactlin import SparseMatrix
    comps = {n: SparseMatrix.from_columns(field, N.dim(n), cs)
             for n, cs in cols.items() if cs}
    return ChainMap(N, N, 0, comps)


def bpl(c, p):
    """Basic Perturbation Lemma.

    Given a contraction c and a perturbation p of the big differential,
    returns (new contraction, induced differential perturbation on the
    small complex).  The new contraction connects (N, d+delta) with
    (M, d_M + d_delta).
    """
    rep = check_contraction(c)
    if not rep:
        raise ValueError("bpl input is not a contraction: %s" % rep.message)
    rep = p.check()
    if not rep:
        if "nilpotent" in rep.message:
            raise NilpotenceExceeded(rep.message)
        raise ValueError("bpl perturbation invalid: %s" % rep.message)

    S = _series(c, p)
    f_new = c.f - compose(compose(c.f, compose(p.delta, S)), c.phi)
    g_new = compose(S, c.g)
    phi_new = compose(S, c.phi)
    d_delta = compose(c.f, compose(p.delta, compose(S, c.g)))

    N, M = c.big, c.small
    N_new = ChainComplex(N.field, N.basis,
                         {n: N.d(n) + p.delta.component(n)
                          for n in N.basis.degrees()})
    M_new = ChainComplex(M.field, M.basis,
                         {n: M.d(n) + d_delta.component(n)
                          for n in M.basis.degrees()})
    con = Contraction(
        big=N_new, small=M_new,
        f=ChainMap(N_new, M_new, 0, f_new.comps),
        g=ChainMap(M_new, N_new, 0, g_new.comps),
        phi=ChainMap(N_new, N_new, 1, phi_new.comps),
    )
    return con, ChainMap(M_new, M_new, -1, d_delta.comps)


def tensor_trick(C_alg, c, max_arity=4):
    """Transferred A-infinity coalgebra on the small complex of a
    contraction of a dg-coalgebra, by the explicit tensor formula

        Delta_i = (-1)^(floor(i/2)+i+1)
                  f^(x)i . D[i] . phi[i-1] . D[i-1] ... phi[2] . D[2] . g

    where D[k] = sum_j (-1)^j id^(x)j (x) Delta (x) id^(x)(k-j-2) acts on
    (k-1)-fold tensors and phi[k] = sum_j (gf)^(x)j (x) phi (x) id^(x)(k-j-1)
    is the one-sided homotopy extension of phi to k-fold tensors.  The
    homotopy-extension convention is the load-bearing choice here; it is
    certified by the co-Stasheff defect checker on the output rather than
    assumed.
    """
    from .dgalg import AInfinityStructure, check_dgc

    rep = check_dgc(C_alg)
    if not rep:
        raise ValueError("tensor_trick input is not a dg-coalgebra: %s"
                         % rep.message)
    rep = check_contraction(c)
    if not rep:
        raise ValueError("tensor_trick contraction invalid: %s" % rep.message)
    from itertools import product as iproduct

    f = C_alg.field
    M = c.small

    def acc(out, t, v):
        s = f.add(out.get(t, f.zero), v)
        if s:
            out[t] = s
        elif t in out:
            del out[t]

    def delta_bracket(v, k):
        """D[k]: chains of (k-1)-tuples to chains of k-tuples."""
        out = {}
        for t, coeff in v.items():
            for j in range(k - 1):
                sgn = coeff if j % 2 == 0 else f.neg(coeff)
                for (k1, k2), dv in C_alg.delta.get(t[j], {}).items():
                    acc(out, t[:j] + (k1, k2) + t[j + 1:], f.mul(sgn, dv))
        return out

    def phi_bracket(v, k):
        """phi[k] on chains of k-tuples; phi has degree +1, so it picks up
        the Koszul sign of the factors it passes."""
        out = {}
        for t, coeff in v.items():
            for j in range(k):
                degsum = sum(key[0] for key in t[:j])
                sgn = coeff if degsum % 2 == 0 else f.neg(coeff)
                pieces = []
                for a in range(j):
                    ch = c.g.apply(c.f.apply({t[a]: f.one}))
                    pieces.append(list(ch.items()))
                pieces.append(list(c.phi.apply({t[j]: f.one}).items()))
                for a in range(j + 1, k):
                    pieces.append([(t[a], f.one)])
                for combo in iproduct(*pieces):
                    val = sgn
                    for _, vv in combo:
                        val = f.mul(val, vv)
                    acc(out, tuple(kk for kk, _ in combo), val)
        return out

    ops = {n: {} for n in range(1, max_arity + 1)}
    for h in M.basis.keys():
        dv = M.apply_d({h: f.one})
        if dv:
            ops[1][h] = {(m,): cv for m, cv in dv.items()}
    for i in range(2, max_arity + 1):
        sgn_exp = i // 2 + i + 1
        for h in M.basis.keys():
            v = {(k,): cv for k, cv in c.g.apply({h: f.one}).items()}
            for k in range(2, i + 1):
                if k > 2:
                    v = phi_bracket(v, k - 1)
                v = delta_bracket(v, k)
                if not v:
                    break
            out = {}
            for t, coeff in v.items():
                pieces = [list(c.f.apply({key: f.one}).items()) for key in t]
                for combo in iproduct(*pieces):
                    val = coeff if sgn_exp % 2 == 0 else f.neg(coeff)
                    for _, vv in combo:
                        val = f.mul(val, vv)
                    acc(out, tuple(kk for kk, _ in combo), val)
            if out:
                ops[i][h] = out
    return AInfinityStructure(M, "coalgebra", ops, certified_arity=max_arity)
