"""Exact scalar arithmetic over F_p / Q and sparse matrix elimination.

Every linear-algebra choice made elsewhere in the package (cycle
representatives, preimages, homology bases) is routed through the rref
pivot conventions here, so all outputs are deterministic.
"""
from __future__ import annotations

from fractions import Fraction


class NoSolution(Exception):
    """Requested preimage does not exist: b is outside the image."""


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Field:
    """The coefficient field: F_p for a prime p, or Q when p is None.

    Elements are kept canonical: residues 0 <= r < p for F_p, fully
    reduced Fractions (positive denominator) for Q.
    """

    __slots__ = ("p",)

    def __init__(self, p=None):
        if p is not None and not is_prime(p):
            raise ValueError("field characteristic must be prime, got %r" % (p,))
        self.p = p

    @property
    def zero(self):
        return 0 if self.p else Fraction(0)

    @property
    def one(self):
        return 1 if self.p else Fraction(1)

    def of(self, x):
        """Canonicalize an int, Fraction or 'a/b' string into the field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by %d" % self.p)
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Field(%r)" % self.p if self.p else "Field(Q)"


QQ = Field(None)
GF = Field


class SparseMatrix:
    """Immutable sparse matrix over a Field.

    Entries are a dict (row, col) -> nonzero scalar.  Elimination uses
    dense intermediate rows; only the public representation is sparse.
    """

    __slots__ = ("field", "nrows", "ncols", "entries", "_rref")

    def __init__(self, field, nrows, ncols, entries=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError("entry (%d,%d) out of bounds" % (i, j))
            v = field.of(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean
        self._rref = None

    @classmethod
    def zero(cls, field, nrows, ncols):
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field, n):
        return cls(field, n, n, {(i, i): field.one for i in range(n)})

    @classmethod
    def from_rows(cls, field, rows):
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        ent = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)}
        return cls(field, nrows, ncols, ent)

    @classmethod
    def from_columns(cls, field, nrows, columns):
        """columns: list of dict index -> value."""
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                ent[(i, j)] = v
        return cls(field, nrows, len(columns), ent)

    def to_rows(self):
        rows = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def columns(self):
        cols = [{} for _ in range(self.ncols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def transpose(self):
        return SparseMatrix(self.field, self.ncols, self.nrows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.field == other.field
                and self.nrows == other.nrows and self.ncols == other.ncols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.nrows, self.ncols, frozenset(self.entries.items())))

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in addition")
        f = self.field
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = f.add(ent.get(k, f.zero), v)
        return SparseMatrix(f, self.nrows, self.ncols, ent)

    def __neg__(self):
        f = self.field
        return SparseMatrix(f, self.nrows, self.ncols,
                            {k: f.neg(v) for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        f = self.field
        c = f.of(c)
        return SparseMatrix(f, self.nrows, self.ncols,
                            {k: f.mul(c, v) for k, v in self.entries.items()})

    def __mul__(self, other):
        if not isinstance(other, SparseMatrix):
            return self.scale(other)
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product: %dx%d * %dx%d"
                             % (self.nrows, self.ncols, other.nrows, other.ncols))
        f = self.field
        by_row = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(k, []).append((i, v))
        ent = {}
        for (k, j), w in other.entries.items():
            for i, v in by_row.get(k, ()):
                key = (i, j)
                ent[key] = f.add(ent.get(key, f.zero), f.mul(v, w))
        return SparseMatrix(f, self.nrows, other.ncols, ent)

    def matvec(self, vec):
        """Apply to a sparse column vector (dict index -> value)."""
        f = self.field
        out = {}
        for (i, j), v in self.entries.items():
            c = vec.get(j)
            if c:
                out[i] = f.add(out.get(i, f.zero), f.mul(v, c))
        return {i: v for i, v in out.items() if v}

    def rref(self):
        """Reduced row echelon form.

        Returns (R, pivots, T) with T invertible and T * self == R;
        pivot columns are strictly increasing.
        """
        if self._rref is not None:
            return self._rref
        f = self.field
        rows = self.to_rows()
        trans = SparseMatrix.identity(f, self.nrows).to_rows()
        pivots = []
        r = 0
        for c in range(self.ncols):
            pivot_row = None
            for i in range(r, self.nrows):
                if rows[i][c]:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            trans[r], trans[pivot_row] = trans[pivot_row], trans[r]
            inv = f.inv(rows[r][c])
            rows[r] = [f.mul(inv, v) for v in rows[r]]
            trans[r] = [f.mul(inv, v) for v in trans[r]]
            for i in range(self.nrows):
                if i != r and rows[i][c]:
                    factor = rows[i][c]
                    rows[i] = [f.sub(a, f.mul(factor, b))
                               for a, b in zip(rows[i], rows[r])]
                    trans[i] = [f.sub(a, f.mul(factor, b))
                                for a, b in zip(trans[i], trans[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        R = SparseMatrix.from_rows(f, rows) if rows else SparseMatrix.zero(f, 0, self.ncols)
        T = SparseMatrix.from_rows(f, trans) if trans else SparseMatrix.identity(f, 0)
        self._rref = (R, tuple(pivots), T)
        return self._rref

    def rank(self):
        return len(self.rref()[1])

    def kernel_basis(self):
        """Independent spanning vectors of the kernel, as sparse columns.

        One vector per non-pivot column, with that free coordinate set
        to one; deterministic given the basis order.
        """
        f = self.field
        R, pivots, _ = self.rref()
        pivot_set = set(pivots)
        basis = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            vec = {free: f.one}
            for r, pc in enumerate(pivots):
                v = R.entries.get((r, free))
                if v:
                    vec[pc] = f.neg(v)
            basis.append(vec)
        return basis

    def solve_preimage(self, b):
        """Solve self * x = b with all free coordinates zero.

        b is a sparse column vector; raises NoSolution if b is outside
        the image.  Deterministic for a fixed basis order.
        """
        f = self.field
        R, pivots, T = self.rref()
        tb = T.matvec(b)
        for i in tb:
            if i >= len(pivots):
                raise NoSolution("vector outside the image")
        return {pivots[i]: v for i, v in tb.items()}

    def __repr__(self):
        return "SparseMatrix(%dx%d over %r, %d entries)" % (
            self.nrows, self.ncols, self.field, len(self.entries))


def vec_add(field, a, b):
    out = dict(a)
    for k, v in b.items():
        s = field.add(out.get(k, field.zero), v)
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def vec_scale(field, c, a):
    if not c:
        return {}
    return {k: field.mul(c, v) for k, v in a.items()}


def vec_sub(field, a, b):
    return vec_add(field, a, vec_scale(field, field.neg(field.one), b))


def hstack(mats):
    """Concatenate matrices with equal row counts side by side."""
    field = mats[0].field
    nrows = mats[0].nrows
    ent = {}
    off = 0
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("row count mismatch in hstack")
        for (i, j), v in m.entries.items():
            ent[(i, j + off)] = v
        off += m.ncols
    return SparseMatrix(field, nrows, off, ent)


def vstack(mats):
    """Concatenate matrices with equal column counts on top of each other."""
    field = mats[0].field
    ncols = mats[0].ncols
    ent = {}
    off = 0
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("column count mismatch in vstack")
        for (i, j), v in m.entries.items():
            ent[(i + off, j)] = v
        off += m.nrows
    return SparseMatrix(field, off, ncols, ent)
