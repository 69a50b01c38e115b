"""Exact dense matrices over field towers and sparse Gauss-Jordan kernels."""

from __future__ import annotations

from fractions import Fraction

from .fields import as_scalar, format_scalar, inverse, parse_scalar, scalar_size, tower_of


class Matrix:
    """Immutable exact matrix; entries are Fraction or FieldElement."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        if isinstance(rows, Matrix):
            rows = rows.rows
        rows = tuple(tuple(as_scalar(x) for x in row) for row in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix rows")
        self.rows = rows
        self._hash = None

    @classmethod
    def _raw(cls, rows):
        m = object.__new__(cls)
        m.rows = rows
        m._hash = None
        return m

    @classmethod
    def identity(cls, n):
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, n, m=None):
        m = n if m is None else m
        return cls._raw(tuple((Fraction(0),) * m for _ in range(n)))

    @classmethod
    def diag(cls, *values):
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for row in self.rows:
            yield from row

    def tower(self):
        return tower_of(*self.entries())

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return "Matrix([" + ", ".join(
            "[" + ", ".join(format_scalar(x) for x in row) + "]" for row in self.rows) + "])"

    def __add__(self, other):
        return Matrix._raw(tuple(tuple(a + b for a, b in zip(r, s))
                                 for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        return Matrix._raw(tuple(tuple(a - b for a, b in zip(r, s))
                                 for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            if len(self.rows[0]) != len(cols[0]):
                raise ValueError("shape mismatch in matrix product")
            out = []
            for r in self.rows:
                row = []
                for c in cols:
                    acc = Fraction(0)
                    for a, b in zip(r, c):
                        if a and b:
                            acc = acc + a * b
                    row.append(acc)
                out.append(tuple(row))
            return Matrix._raw(tuple(out))
        other = as_scalar(other)
        return Matrix._raw(tuple(tuple(a * other for a in r) for r in self.rows))

    def __rmul__(self, other):
        other = as_scalar(other)
        return Matrix._raw(tuple(tuple(other * a for a in r) for r in self.rows))

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Matrix.identity(self.shape[0]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def transpose(self):
        return Matrix._raw(tuple(zip(*self.rows)))

    T = property(transpose)

    def trace(self):
        acc = Fraction(0)
        for i in range(min(self.shape)):
            acc = acc + self.rows[i][i]
        return acc

    def det(self):
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        r = self.rows
        if n == 1:
            return r[0][0]
        if n == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        if n == 3:
            return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                    - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                    + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))
        rows = [list(row) for row in r]
        d = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if rows[i][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                d = -d
            d = d * rows[c][c]
            inv = inverse(rows[c][c])
            for i in range(c + 1, n):
                f = rows[i][c] * inv
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        return d

    def adjugate2(self):
        (a, b), (c, d) = self.rows
        return Matrix._raw(((d, -b), (-c, a)))

    def inverse(self):
        n = self.shape[0]
        if n == 2:
            d = self.det()
            return self.adjugate2() * inverse(d)
        aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(self.rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if aug[i][c] != 0), None)
            if p is None:
                raise ZeroDivisionError("singular matrix")
            aug[c], aug[p] = aug[p], aug[c]
            inv = inverse(aug[c][c])
            aug[c] = [x * inv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
        return Matrix([row[n:] for row in aug])

    def is_identity(self):
        n, m = self.shape
        return n == m and all(
            self.rows[i][j] == (1 if i == j else 0) for i in range(n) for j in range(m))

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def to_strings(self, names=None):
        return [[format_scalar(x, names) for x in row] for row in self.rows]

    @classmethod
    def from_strings(cls, rows, tower):
        return cls([[parse_scalar(str(x), tower) for x in row] for row in rows])


def vstack(blocks):
    rows = []
    for b in blocks:
        rows.extend(b.rows)
    return Matrix._raw(tuple(rows))


def _sparse_rows(rows, ncols):
    out = []
    for r in rows:
        d = {j: x for j, x in enumerate(r) if x != 0}
        if d:
            out.append(d)
    return out


def row_reduce(rows, ncols):
    """Sparse Gauss-Jordan elimination.

    ``rows`` is a list of ``{column: entry}`` dicts.  Columns are processed in
    order; the pivot is the smallest entry by expression size, ties going to
    the earliest row.  Returns ``(pivot_rows, pivot_columns)`` in reduced form
    with unit pivots.
    """
    remaining = [dict(r) for r in rows if r]
    pivots = []
    pivot_cols = []
    for c in range(ncols):
        best, best_size = None, None
        for idx, r in enumerate(remaining):
            x = r.get(c)
            if x is not None:
                s = scalar_size(x)
                if best is None or s < best_size:
                    best, best_size = idx, s
        if best is None:
            continue
        prow = remaining.pop(best)
        inv = inverse(prow[c])
        prow = {j: x * inv for j, x in prow.items()}
        prow[c] = Fraction(1)
        eliminate = remaining + pivots
        for r in eliminate:
            f = r.get(c)
            if f is None:
                continue
            for j, x in prow.items():
                v = r.get(j, 0) - f * x
                if v != 0:
                    r[j] = v
                else:
                    r.pop(j, None)
        remaining = [r for r in remaining if r]
        pivots.append(prow)
        pivot_cols.append(c)
    return pivots, pivot_cols


def kernel(matrix):
    """Exact right kernel: ``(dimension, basis)`` with basis vectors as tuples.

    Accepts a Matrix or a ``(rows, ncols)`` pair of sparse dict rows.
    """
    if isinstance(matrix, Matrix):
        ncols = matrix.shape[1]
        rows = _sparse_rows(matrix.rows, ncols)
    else:
        rows, ncols = matrix
    pivots, pivot_cols = row_reduce(rows, ncols)
    pivot_set = set(pivot_cols)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for prow, pc in zip(pivots, pivot_cols):
            x = prow.get(f)
            if x is not None:
                v[pc] = -x
        basis.append(tuple(v))
    return len(free), basis


def rank(matrix):
    if isinstance(matrix, Matrix):
        ncols = matrix.shape[1]
        rows = _sparse_rows(matrix.rows, ncols)
    else:
        rows, ncols = matrix
    return len(row_reduce(rows, ncols)[1])


def mat_vec(matrix, v):
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), Fraction(0))
                 for row in matrix.rows)
