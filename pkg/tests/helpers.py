"""Shared fixtures and randomized generators for the test suite.

Random objects are built from known-structure pieces (interval complexes
plus free summands) conjugated by random invertible basis changes, so
d^2 = 0 holds by construction while the matrices look generic.
"""
import random
from itertools import combinations

from ainfty.exactlin import Field, SparseMatrix
from ainfty.complexes import ChainComplex, ChainMap, GradedBasis


def random_invertible(field, n, rng):
    """Product of a unit lower and a unit upper triangular matrix plus a
    permutation: invertible by construction."""
    lo = {(i, i): field.one for i in range(n)}
    up = {(i, i): field.one for i in range(n)}
    for i in range(n):
        for j in range(i):
            if rng.random() < 0.4:
                lo[(i, j)] = field.of(rng.randint(1, 6))
            if rng.random() < 0.4:
                up[(j, i)] = field.of(rng.randint(1, 6))
    perm = list(range(n))
    rng.shuffle(perm)
    P = SparseMatrix(field, n, n, {(perm[i], i): field.one for i in range(n)})
    return SparseMatrix(field, n, n, lo) * SparseMatrix(field, n, n, up) * P


def random_complex(field, rng, degrees=(0, 4), max_dim=8, conjugate=True):
    """Random chain complex with d^2 = 0 and controllable size.

    Returns the complex; in the hidden distinguished basis it is a sum
    of interval pieces and free generators.
    """
    lo, hi = degrees
    dims = {n: 0 for n in range(lo, hi + 1)}
    pieces = []  # ("interval", n, i_top, i_bot) or ("free", n, i)
    for n in range(lo + 1, hi + 1):
        for _ in range(rng.randint(0, max_dim // 2)):
            if dims[n] < max_dim and dims[n - 1] < max_dim:
                pieces.append(("interval", n, dims[n], dims[n - 1]))
                dims[n] += 1
                dims[n - 1] += 1
    for n in range(lo, hi + 1):
        for _ in range(rng.randint(0, 2)):
            if dims[n] < max_dim:
                pieces.append(("free", n, dims[n]))
                dims[n] += 1
    labels = {n: ["c%d_%d" % (n, i) for i in range(dims[n])]
              for n in range(lo, hi + 1) if dims[n]}
    diff = {}
    for kind, n, *idx in pieces:
        if kind == "interval":
            top, bot = idx
            ent = diff.setdefault(n, {})
            ent[(bot, top)] = field.one
    mats = {n: SparseMatrix(field, dims.get(n - 1, 0), dims.get(n, 0), ent)
            for n, ent in diff.items() if dims.get(n) and dims.get(n - 1)}
    if conjugate:
        P = {n: random_invertible(field, dims[n], rng)
             for n in dims if dims[n]}
        Pinv = {}
        for n, m in P.items():
            _, piv, T = m.rref()
            Pinv[n] = T
        mats = {n: Pinv[n - 1] * m * P[n] for n, m in mats.items()
                if (n - 1) in P and n in P}
    return ChainComplex(field, GradedBasis(labels), mats)


def random_perturbed_contraction(field, rng, degrees=(0, 4), max_dim=6):
    """A contraction onto homology plus a compatible perturbation delta.

    delta pairs up generators that are free for d, in the distinguished
    basis, so (d + delta)^2 = 0 by construction.  Returns
    (contraction, delta ChainMap); callers must still filter on the
    pointwise-nilpotence hypothesis.
    """
    from ainfty.complexes import homology_contraction

    lo, hi = degrees
    dims = {n: 0 for n in range(lo, hi + 1)}
    d_ent = {}
    free = {n: [] for n in range(lo, hi + 1)}
    for n in range(lo + 1, hi + 1):
        for _ in range(rng.randint(0, max_dim // 2)):
            if dims[n] < max_dim and dims[n - 1] < max_dim:
                d_ent.setdefault(n, {})[(dims[n - 1], dims[n])] = field.one
                dims[n] += 1
                dims[n - 1] += 1
    for n in range(lo, hi + 1):
        for _ in range(rng.randint(1, 3)):
            if dims[n] < max_dim:
                free[n].append(dims[n])
                dims[n] += 1
    delta_ent = {}
    for n in range(lo + 1, hi + 1):
        tops = list(free[n])
        bots = list(free[n - 1])
        rng.shuffle(tops)
        rng.shuffle(bots)
        for t, b in zip(tops, bots):
            if rng.random() < 0.7:
                delta_ent.setdefault(n, {})[(b, t)] = field.of(rng.randint(1, 4))
                free[n].remove(t)
                free[n - 1].remove(b)
    labels = {n: ["c%d_%d" % (n, i) for i in range(dims[n])]
              for n in dims if dims[n]}
    P = {n: random_invertible(field, dims[n], rng) for n in dims if dims[n]}
    Pinv = {n: m.rref()[2] for n, m in P.items()}

    def conj(ent_by_deg):
        out = {}
        for n, ent in ent_by_deg.items():
            if not (dims.get(n) and dims.get(n - 1)):
                continue
            m = SparseMatrix(field, dims[n - 1], dims[n], ent)
            out[n] = Pinv[n - 1] * m * P[n]
        return out

    C = ChainComplex(field, GradedBasis(labels), conj(d_ent))
    _, con = homology_contraction(C)
    delta = ChainMap(C, C, -1, conj(delta_ent))
    return con, delta


def simplicial_complex(field, simplices):
    """Chain complex of a simplicial complex given as vertex tuples.

    Vertices may appear as bare ints; faces are added automatically.
    Boundary signs follow the usual alternating-face rule on sorted
    vertex tuples.
    """
    closed = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            closed.update(combinations(s, k))
    by_dim = {}
    for s in sorted(closed, key=lambda s: (len(s), s)):
        by_dim.setdefault(len(s) - 1, []).append(s)
    labels = {n: ["s" + "_".join(map(str, s)) for s in ss]
              for n, ss in by_dim.items()}
    index = {s: i for n, ss in by_dim.items() for i, s in enumerate(ss)}
    diff = {}
    for n, ss in by_dim.items():
        if n == 0:
            continue
        ent = {}
        for j, s in enumerate(ss):
            sign = field.one
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1:]
                ent[(index[face], j)] = sign
                sign = field.neg(sign)
        diff[n] = SparseMatrix(field, len(by_dim[n - 1]), len(ss), ent)
    return ChainComplex(field, GradedBasis(labels), diff)


def cyclic_resolution(p, top):
    """Hand-entered period-2 free resolution of F_p over the C_p group
    algebra, truncated at homological degree top.

    F_i = kG with basis g^0..g^(p-1); the differential alternates between
    multiplication by (g - 1) (odd i) and by the norm 1 + g + ... + g^(p-1)
    (even i).  Returns (complex, generator action) with the action the
    degree-0 chain map g. : e_a -> e_{a+1 mod p}.
    """
    field = Field(p)
    labels = {i: ["g%d_%d" % (i, a) for a in range(p)] for i in range(top + 1)}
    diff = {}
    for i in range(1, top + 1):
        ent = {}
        for a in range(p):
            if i % 2 == 1:
                # multiplication by (g - 1)
                ent[((a + 1) % p, a)] = field.one
                ent[(a, a)] = field.add(ent.get((a, a), field.zero),
                                        field.neg(field.one))
                if not ent[(a, a)]:
                    del ent[(a, a)]
            else:
                # multiplication by the norm element
                for b in range(p):
                    ent[(b, a)] = field.one
        diff[i] = SparseMatrix(field, p, p, ent)
    C = ChainComplex(field, GradedBasis(labels), diff)
    act = {i: SparseMatrix(field, p, p,
                           {((a + 1) % p, a): field.one for a in range(p)})
           for i in range(top + 1)}
    action = ChainMap(C, C, 0, act)
    return C, action


def exterior_one_generator(field, deg=1):
    """Exterior algebra on one odd generator x, zero differential."""
    from ainfty.dgalg import DGAlgebra

    C = ChainComplex(field, GradedBasis({0: ["one"], deg: ["x"]}))
    one, x = (0, 0), (deg, 0)
    m2 = {(one, one): {one: field.one},
          (one, x): {x: field.one},
          (x, one): {x: field.one}}
    return DGAlgebra(C, m2)


def truncated_polynomial(field, top=4, gen_deg=2):
    """k[y] / (y^(top+1)) with |y| = gen_deg, zero differential."""
    from ainfty.dgalg import DGAlgebra

    C = ChainComplex(field, GradedBasis(
        {i * gen_deg: ["y%d" % i] for i in range(top + 1)}))
    m2 = {}
    for i in range(top + 1):
        for j in range(top + 1):
            if i + j <= top:
                m2[((i * gen_deg, 0), (j * gen_deg, 0))] = \
                    {((i + j) * gen_deg, 0): field.one}
    return DGAlgebra(C, m2)


def interval_aw_coalgebra(field):
    """Simplicial chains of the 1-simplex with the front-back diagonal."""
    from ainfty.dgalg import DGCoalgebra

    C = simplicial_complex(field, [(0, 1)])
    s0, s1, e = (0, 0), (0, 1), (1, 0)
    delta = {s0: {(s0, s0): field.one},
             s1: {(s1, s1): field.one},
             e: {(s0, e): field.one, (e, s1): field.one}}
    return DGCoalgebra(C, delta)


def cyclic_end_contraction(F, action, A):
    """Hand-built contraction of the equivariant endomorphism algebra of a
    truncated period-2 resolution onto its homology.

    Every equivariant block is multiplication by a group algebra element;
    in the tau = g - 1 power basis the classical periodic contracting
    homotopy is explicit (section of tau. on even levels, of norm. on odd
    levels).  Columns (fixed source, varying target level) are contracted
    first and the source-shifting part of the differential is folded in by
    the perturbation lemma.  Transfer along the result reproduces the
    classical minimal structure, unlike the generic rref contraction.
    """
    from ainfty.complexes import Contraction, homology_contraction, compose
    from ainfty.perturbation import Perturbation, bpl, check_contraction

    field = F.field
    p = F.dim(F.min_deg)
    T = F.max_deg
    ident = SparseMatrix.identity(field, p)
    tau = action.component(0) - ident
    taupow = [ident]
    for _ in range(p - 1):
        taupow.append(tau * taupow[-1])

    def col_range(s):
        return range(max(0, -s), min(T, T - s) + 1)

    def vidx(s, i, j):
        return (i - max(0, -s)) * p + j

    # tau-power model of the endomorphism complex: element (i, j) at shift
    # s is multiplication by tau^j as a map F_i -> F_{i+s}
    vlabels = {s: ["t%d@%d" % (j, i) for i in col_range(s) for j in range(p)]
               for s in range(-T, T + 1)}

    def mult_delta(n, j):
        """tau-exponent after multiplying tau^j by d's element at level n."""
        if n % 2 == 1:
            return j + 1 if j + 1 < p else None
        return p - 1 if j == 0 else None

    dvert, dfull = {}, {}
    for s in range(-T + 1, T + 1):
        ev, ef = {}, {}
        for i in col_range(s):
            for j in range(p):
                c = vidx(s, i, j)
                n = i + s
                if n >= 1:
                    j2 = mult_delta(n, j)
                    if j2 is not None:
                        ev[(vidx(s - 1, i, j2), c)] = field.one
                        ef[(vidx(s - 1, i, j2), c)] = field.one
                if i + 1 <= T:
                    j2 = mult_delta(i + 1, j)
                    if j2 is not None:
                        sgn = field.neg(field.one) if s % 2 == 0 else field.one
                        k = (vidx(s - 1, i + 1, j2), c)
                        ef[k] = field.add(ef.get(k, field.zero), sgn)
                        if not ef[k]:
                            del ef[k]
        dims = (len(vlabels[s - 1]), len(vlabels[s]))
        dvert[s] = SparseMatrix(field, dims[0], dims[1], ev)
        dfull[s] = SparseMatrix(field, dims[0], dims[1], ef)
    Vv = ChainComplex(field, GradedBasis(vlabels), dvert)

    # contract each column onto homology of the resolution: the class of
    # the identity at level 0 and ker d_T at level T
    jset = list(range(1, p)) if T % 2 == 0 else [p - 1]
    mlabels = {}
    for d in range(-T, T + 1):
        labs = []
        if 0 <= -d <= T:
            labs.append("e@%d" % -d)
        if 0 <= T - d <= T:
            labs.extend("j%d@%d" % (r, T - d) for r in jset)
        if labs:
            mlabels[d] = labs
    Msm = ChainComplex(field, GradedBasis(mlabels))

    f_c, g_c, phi_c = {}, {}, {}
    for s in range(-T, T + 1):
        fent, gent = {}, {}
        row = 0
        if 0 <= -s <= T:
            fent[(row, vidx(s, -s, 0))] = field.one
            gent[(vidx(s, -s, 0), row)] = field.one
            row += 1
        if 0 <= T - s <= T:
            for r in jset:
                fent[(row, vidx(s, T - s, r))] = field.one
                gent[(vidx(s, T - s, r), row)] = field.one
                row += 1
        if fent:
            f_c[s] = SparseMatrix(field, row, len(vlabels[s]), fent)
            g_c[s] = SparseMatrix(field, len(vlabels[s]), row, gent)
        pent = {}
        for i in col_range(s):
            n = i + s
            if n >= T:
                continue
            for j in range(p):
                if n % 2 == 0 and j >= 1:
                    pent[(vidx(s + 1, i, j - 1), vidx(s, i, j))] = field.one
                elif n % 2 == 1 and j == p - 1:
                    pent[(vidx(s + 1, i, 0), vidx(s, i, j))] = field.one
        if pent:
            phi_c[s] = SparseMatrix(field, len(vlabels[s + 1]),
                                    len(vlabels[s]), pent)
    con0 = Contraction(
        big=Vv, small=Msm,
        f=ChainMap(Vv, Msm, 0, f_c),
        g=ChainMap(Msm, Vv, 0, g_c),
        phi=ChainMap(Vv, Vv, 1, phi_c))
    rep = check_contraction(con0)
    assert rep, rep.message

    delta = ChainMap(Vv, Vv, -1,
                     {s: dfull[s] - dvert[s] for s in dfull
                      if (dfull[s] - dvert[s]).entries})
    con1, _ = bpl(con0, Perturbation(delta, con0))
    H2, con2 = homology_contraction(con1.small)
    f1 = compose(con2.f, con1.f)
    g1 = compose(con1.g, con2.g)
    phi1 = con1.phi + compose(con1.g, compose(con2.phi, con1.f))

    # transport along the basis change tau-power model -> equivariant basis
    psi_c, psiinv_c = {}, {}
    for s in range(-T, T + 1):
        cols = []
        for i in col_range(s):
            for j in range(p):
                ch = A.block_chain(i, s, taupow[j])
                cols.append({idx: v for (_, idx), v in ch.items()})
        psi_c[s] = SparseMatrix.from_columns(field, A.complex.dim(s), cols)
        _, piv, inv = psi_c[s].rref()
        assert len(piv) == len(cols)
        psiinv_c[s] = inv
    psi = ChainMap(con1.big, A.complex, 0, psi_c)
    assert psi.check_chain_map()
    psiinv = ChainMap(A.complex, con1.big, 0, psiinv_c)
    return Contraction(
        big=A.complex, small=H2,
        f=compose(f1, psiinv),
        g=compose(psi, g1),
        phi=compose(psi, compose(phi1, psiinv)))


def hollow_triangle(field):
    return simplicial_complex(field, [(0, 1), (1, 2), (0, 2)])


def filled_triangle(field):
    return simplicial_complex(field, [(0, 1, 2)])


_cyclic_cache = {}


def cyclic_setup(p, top, max_arity):
    """Equivariant endomorphism dga of the cyclic resolution together with
    the hand-built contraction and the transferred structure, cached since
    the larger cases take minutes."""
    from ainfty.dgalg import endomorphism_dga
    from ainfty.transfer import transfer_full

    key = (p, top, max_arity)
    if key not in _cyclic_cache:
        F, action = cyclic_resolution(p, top)
        A = endomorphism_dga(F, equivariance=[action])
        con = cyclic_end_contraction(F, action, A)
        S, Fm, complete, st = transfer_full(A, max_arity=max_arity,
                                            gap_search=False, con=con)
        _cyclic_cache[key] = (A, con, S, st)
    return _cyclic_cache[key]
