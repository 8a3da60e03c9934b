import random
from fractions import Fraction
from itertools import combinations, product

import pytest

from ainfty.exactlin import Field, NoSolution, QQ, SparseMatrix, hstack, vstack


# --- independent oracles ------------------------------------------------

def det(field, rows):
    """Laplace-expansion determinant, the brute-force oracle."""
    n = len(rows)
    if n == 0:
        return field.one
    if n == 1:
        return rows[0][0]
    total = field.zero
    sign = field.one
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total = field.add(total, field.mul(field.mul(sign, rows[0][j]),
                                           det(field, minor)))
        sign = field.neg(sign)
    return total


def rank_by_minors(m):
    """Largest k with a nonzero k x k minor."""
    rows = m.to_rows()
    for k in range(min(m.nrows, m.ncols), 0, -1):
        for ri in combinations(range(m.nrows), k):
            for ci in combinations(range(m.ncols), k):
                sub = [[rows[i][j] for j in ci] for i in ri]
                if det(m.field, sub):
                    return k
    return 0


def random_matrix(field, nrows, ncols, rng, density=0.6):
    ent = {}
    for i in range(nrows):
        for j in range(ncols):
            if rng.random() < density:
                ent[(i, j)] = field.of(rng.randint(-4, 4))
    return SparseMatrix(field, nrows, ncols, ent)


# --- rref ---------------------------------------------------------------

def test_rref_identity():
    I = SparseMatrix.identity(QQ, 3)
    R, pivots, T = I.rref()
    assert R == I and pivots == (0, 1, 2) and T == I


def test_rref_equal_rows_f2():
    F2 = Field(2)
    m = SparseMatrix.from_rows(F2, [[1, 1], [1, 1]])
    R, pivots, T = m.rref()
    assert R == SparseMatrix.from_rows(F2, [[1, 1], [0, 0]])
    assert pivots == (0,)
    assert T * m == R


def test_rref_rank_matches_minor_oracle_f3():
    F3 = Field(3)
    rng = random.Random(7)
    for _ in range(10):
        m = random_matrix(F3, 5, 5, rng)
        assert m.rank() == rank_by_minors(m)


def test_rref_idempotent_and_transform():
    rng = random.Random(1)
    for field in (QQ, Field(2), Field(5)):
        for _ in range(8):
            m = random_matrix(field, 4, 6, rng)
            R, pivots, T = m.rref()
            assert T * m == R
            assert list(pivots) == sorted(pivots)
            R2, p2, _ = R.rref()
            assert R2 == R and p2 == pivots


# --- kernel -------------------------------------------------------------

def test_kernel_zero_matrix():
    m = SparseMatrix.zero(QQ, 2, 3)
    basis = m.kernel_basis()
    assert basis == [{0: Fraction(1)}, {1: Fraction(1)}, {2: Fraction(1)}]


def test_kernel_identity_empty():
    assert SparseMatrix.identity(QQ, 4).kernel_basis() == []


def test_kernel_1x2_f5_matches_enumeration():
    F5 = Field(5)
    m = SparseMatrix.from_rows(F5, [[1, 2]])
    # oracle: enumerate all 25 vectors
    sols = [(a, b) for a, b in product(range(5), repeat=2)
            if (a + 2 * b) % 5 == 0]
    basis = m.kernel_basis()
    assert len(basis) == 1
    v = basis[0]
    vt = (v.get(0, 0), v.get(1, 0))
    assert vt in sols and vt != (0, 0)
    # the kernel has 5 elements: all multiples of v
    assert len(sols) == 5


def test_rank_nullity_random():
    rng = random.Random(3)
    for field in (QQ, Field(3)):
        for _ in range(10):
            m = random_matrix(field, rng.randint(1, 5), rng.randint(1, 5), rng)
            assert m.rank() + len(m.kernel_basis()) == m.ncols


# --- solve_preimage -----------------------------------------------------

def test_solve_identity():
    m = SparseMatrix.identity(QQ, 3)
    b = {0: Fraction(2), 2: Fraction(-1)}
    assert m.solve_preimage(b) == b


def test_solve_zero_matrix_no_solution():
    m = SparseMatrix.zero(QQ, 2, 2)
    with pytest.raises(NoSolution):
        m.solve_preimage({0: Fraction(1)})


def test_solve_free_variable_zero():
    # oracle: the solution line of [[1,1],[0,0]] x = (2,0) is
    # {(2-t, t)}; the free coordinate (column 1) must be zero.
    m = SparseMatrix.from_rows(QQ, [[1, 1], [0, 0]])
    x = m.solve_preimage({0: Fraction(2)})
    assert x == {0: Fraction(2)}


def test_solve_random_consistency():
    rng = random.Random(11)
    for field in (QQ, Field(7)):
        for _ in range(15):
            m = random_matrix(field, 4, 5, rng)
            # build b in the image on purpose
            x0 = {j: field.of(rng.randint(-3, 3)) for j in range(5)}
            b = m.matvec(x0)
            x = m.solve_preimage(b)
            assert m.matvec(x) == b


# --- rank ---------------------------------------------------------------

def test_rank_trivial_cases():
    assert SparseMatrix.zero(QQ, 3, 4).rank() == 0
    assert SparseMatrix.identity(QQ, 5).rank() == 5


def test_rank_outer_product_is_one():
    F3 = Field(3)
    u = [1, 2, 1]
    v = [2, 1, 2, 1]
    m = SparseMatrix.from_rows(F3, [[(a * b) % 3 for b in v] for a in u])
    assert m.rank() == 1 == rank_by_minors(m)


def test_rank_equals_transpose_rank():
    rng = random.Random(5)
    for _ in range(10):
        m = random_matrix(Field(2), 4, 6, rng)
        assert m.rank() == m.transpose().rank()


# --- field axioms -------------------------------------------------------

@pytest.mark.parametrize("field", [QQ, Field(2), Field(3), Field(7)])
def test_field_axioms_random_triples(field):
    rng = random.Random(17)
    for _ in range(1000):
        if field.p is None:
            a, b, c = (field.of(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
                       for _ in range(3))
        else:
            a, b, c = (field.of(rng.randint(-20, 20)) for _ in range(3))
        assert field.add(field.add(a, b), c) == field.add(a, field.add(b, c))
        assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
        assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b),
                                                          field.mul(a, c))
        if b:
            assert field.mul(b, field.inv(b)) == field.one


def test_field_requires_prime():
    with pytest.raises(ValueError):
        Field(6)


def test_canonical_representation():
    F5 = Field(5)
    assert F5.of(-3) == 2
    assert F5.of(Fraction(1, 2)) == 3  # 2 * 3 = 6 = 1 mod 5
    assert QQ.of("4/6") == Fraction(2, 3)


def test_stack_helpers():
    a = SparseMatrix.from_rows(QQ, [[1, 2]])
    b = SparseMatrix.from_rows(QQ, [[3, 4]])
    assert hstack([a, b]) == SparseMatrix.from_rows(QQ, [[1, 2, 3, 4]])
    assert vstack([a, b]) == SparseMatrix.from_rows(QQ, [[1, 2], [3, 4]])
