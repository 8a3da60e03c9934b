import random

import pytest

from ainfty.exactlin import Field, QQ, SparseMatrix
from ainfty.complexes import (ChainComplex, ChainMap, GradedBasis, compose,
                              homology_contraction, koszul_sign, tensor_map,
                              tensor_power, verify_complex)
from ainfty.perturbation import check_contraction

from helpers import (filled_triangle, hollow_triangle, random_complex,
                     simplicial_complex)


# --- verify_complex -----------------------------------------------------

def test_verify_zero_differentials():
    C = ChainComplex(QQ, GradedBasis({0: ["a"], 1: ["b"]}))
    assert verify_complex(C)


def test_verify_failure_named():
    C = ChainComplex(QQ, GradedBasis({0: ["a"], 1: ["b"], 2: ["c"]}),
                     {1: SparseMatrix.from_rows(QQ, [[1]]),
                      2: SparseMatrix.from_rows(QQ, [[1]])})
    rep = verify_complex(C)
    assert not rep
    assert rep.degree == 2 and rep.witness == "c"


def test_verify_filled_triangle():
    # oracle: hand-check of the 2-simplex boundary:
    # dd[012] = d([12] - [02] + [01]) = ([2]-[1]) - ([2]-[0]) + ([1]-[0]) = 0
    C = filled_triangle(QQ)
    assert verify_complex(C)
    assert C.dim(0) == 3 and C.dim(1) == 3 and C.dim(2) == 1


# --- koszul_sign --------------------------------------------------------

def test_koszul_identity():
    assert koszul_sign([1, 2, 3], [0, 1, 2]) == 1


def test_koszul_odd_odd_swap():
    assert koszul_sign([1, 3], [1, 0]) == -1


def test_koszul_odd_even_swap():
    assert koszul_sign([1, 2], [1, 0]) == 1


def test_koszul_multiplicative():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(2, 5)
        degs = [rng.randint(0, 3) for _ in range(n)]
        p1 = list(range(n))
        p2 = list(range(n))
        rng.shuffle(p1)
        rng.shuffle(p2)
        comp = [p1[p2[i]] for i in range(n)]
        permuted_degs = [degs[j] for j in p1]
        assert koszul_sign(degs, comp) == (koszul_sign(degs, p1) *
                                           koszul_sign(permuted_degs, p2))
    # 3-cycles of odd generators are two transpositions
    assert koszul_sign([1, 1, 1], [1, 2, 0]) == 1
    assert koszul_sign([1, 1, 1], [2, 0, 1]) == 1
    assert koszul_sign([1, 1, 1], [2, 1, 0]) == -1


# --- homology_contraction -----------------------------------------------

def test_single_point():
    C = simplicial_complex(QQ, [(0,)])
    H, con = homology_contraction(C)
    assert H.dim(0) == 1
    assert con.phi.is_zero()
    assert check_contraction(con)


def test_hollow_triangle_betti():
    # oracle: rank of the boundary matrix is 2, so
    # dim H_0 = 3 - 2 = 1 and dim H_1 = ker d_1 = 3 - 2 = 1
    C = hollow_triangle(QQ)
    assert C.d(1).rank() == 2
    H, con = homology_contraction(C)
    assert H.dim(0) == 1 and H.dim(1) == 1
    assert check_contraction(con)


def test_filled_triangle_betti():
    C = filled_triangle(QQ)
    assert C.d(1).rank() == 2 and C.d(2).rank() == 1
    H, con = homology_contraction(C)
    assert H.dim(0) == 1 and H.dim(1) == 0 and H.dim(2) == 0
    assert check_contraction(con)


@pytest.mark.parametrize("p", [None, 2, 3])
def test_contraction_identities_random(p):
    field = Field(p) if p else QQ
    rng = random.Random(23 if p else 29)
    for trial in range(20):
        C = random_complex(field, rng)
        assert verify_complex(C)
        H, con = homology_contraction(C)
        assert check_contraction(con)
        # rank-nullity cross-check of homology dimensions
        for n in C.basis.degrees():
            zk = C.dim(n) - C.d(n).rank() if C.in_window(n - 1) else C.dim(n)
            bk = C.d(n + 1).rank()
            assert H.dim(n) == zk - bk


def test_contraction_deterministic():
    rng1, rng2 = random.Random(99), random.Random(99)
    C1 = random_complex(Field(3), rng1)
    C2 = random_complex(Field(3), rng2)
    H1, c1 = homology_contraction(C1)
    H2, c2 = homology_contraction(C2)
    assert c1.f == c2.f and c1.g == c2.g and c1.phi == c2.phi


# --- compose ------------------------------------------------------------

def test_compose_with_identity():
    C = hollow_triangle(QQ)
    H, con = homology_contraction(C)
    idC = ChainMap.identity(C)
    assert compose(idC, con.g) == con.g
    assert compose(con.f, idC) == con.f


def test_compose_matches_matrix_products():
    rng = random.Random(31)
    C = random_complex(QQ, rng, degrees=(0, 2), max_dim=4)
    a = ChainMap(C, C, 0, {n: SparseMatrix(QQ, C.dim(n), C.dim(n),
                                           {(i, j): rng.randint(-2, 2)
                                            for i in range(C.dim(n))
                                            for j in range(C.dim(n))})
                           for n in C.basis.degrees()})
    b = ChainMap(C, C, 0, {n: SparseMatrix(QQ, C.dim(n), C.dim(n),
                                           {(i, j): rng.randint(-2, 2)
                                            for i in range(C.dim(n))
                                            for j in range(C.dim(n))})
                           for n in C.basis.degrees()})
    ab = compose(a, b)
    for n in C.basis.degrees():
        assert ab.component(n) == a.component(n) * b.component(n)


# --- tensor constructions -----------------------------------------------

def test_tensor_of_identities_is_identity():
    C = hollow_triangle(QQ)
    idC = ChainMap.identity(C)
    t = tensor_map([idC, idC])
    T = t.source
    assert t == ChainMap.identity(T)


def test_tensor_koszul_sign_on_odd_factor():
    # id (x) d applied to x (x) y with |x| = 1 picks up a minus sign
    C = ChainComplex(QQ, GradedBasis({0: ["p"], 1: ["e"]}),
                     {1: SparseMatrix.from_rows(QQ, [[1]])})
    idC = ChainMap.identity(C)
    dC = ChainMap(C, C, -1, {1: C.d(1)})
    t = tensor_map([idC, dC])
    T = t.source
    key_xy = T.factor_index[((1, 0), (1, 0))]   # e (x) e, degree 2
    out = t.apply({key_xy: QQ.one})
    key_xdy = T.factor_index[((1, 0), (0, 0))]  # e (x) p, degree 1
    assert out == {key_xdy: QQ.of(-1)}


def test_tensor_differential_squares_to_zero():
    rng = random.Random(41)
    for field in (QQ, Field(2)):
        C = random_complex(field, rng, degrees=(0, 3), max_dim=3)
        assert verify_complex(C)
        T = tensor_power(C, 2)
        assert verify_complex(T)
        # and the differential is d(x)id + id(x)d with Koszul signs
        idC = ChainMap.identity(C)
        dC = ChainMap(C, C, -1, {n: C.d(n) for n in C.basis.degrees()
                                 if C.d(n).entries})
        dT = tensor_map([dC, idC]) + tensor_map([idC, dC])
        for n in T.basis.degrees():
            assert dT.component(n) == T.d(n)
