"""Exact rational scalars, vectors and matrices.

Scalars are ``gmpy2.mpq`` values (always reduced, positive denominator).
Vectors and matrices are immutable tuple subclasses so they hash, compare
and iterate like plain tuples while supporting the usual arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpq

from .errors import DimensionMismatch, Singular

Scalar = type(mpq())
RationalLike = Union[int, str, Fraction, "mpq"]

ZERO = mpq(0)
ONE = mpq(1)


def Q(value: RationalLike) -> Scalar:
    """Coerce ``value`` to an exact rational.

    Floats are rejected unless they are integral; strings use the ``"p/q"``
    form (``"p"`` when q = 1).
    """
    if isinstance(value, Scalar):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise TypeError(f"refusing inexact float {value!r}; pass a string or Fraction")
        return mpq(int(value))
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


def fmt(q: RationalLike) -> str:
    """Serialize a rational as ``"p/q"`` or ``"p"``."""
    return str(Q(q))


def parse_vector(text: str) -> "QVector":
    """Parse ``"1,-2/3,4"`` into a QVector."""
    return QVector(t for t in text.split(",") if t.strip())


class QVector(tuple):
    """Immutable vector of exact rationals."""

    def __new__(cls, entries: Iterable[RationalLike] = ()):
        return super().__new__(cls, (Q(e) for e in entries))

    @classmethod
    def _raw(cls, entries):
        # entries already mpq; skips coercion in hot loops
        return tuple.__new__(cls, entries)

    @property
    def dim(self) -> int:
        return len(self)

    @classmethod
    def zeros(cls, n: int) -> "QVector":
        return cls._raw([ZERO] * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "QVector":
        v = [ZERO] * n
        v[i] = ONE
        return cls._raw(v)

    def _check(self, other) -> None:
        if len(other) != len(self):
            raise DimensionMismatch(f"dims {len(self)} and {len(other)}")

    def __add__(self, other):
        self._check(other)
        return QVector._raw([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return QVector._raw([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return QVector._raw([-a for a in self])

    def __mul__(self, s):
        s = Q(s)
        return QVector._raw([a * s for a in self])

    __rmul__ = __mul__

    def __truediv__(self, s):
        s = Q(s)
        if s == 0:
            raise ZeroDivisionError("vector divided by zero")
        return QVector._raw([a / s for a in self])

    def norm1(self) -> Scalar:
        return sum((abs(a) for a in self), ZERO)

    def norm_inf(self) -> Scalar:
        return max((abs(a) for a in self), default=ZERO)

    def norm2_sq(self) -> Scalar:
        return sum((a * a for a in self), ZERO)

    def is_zero(self) -> bool:
        return not any(self)

    def __repr__(self) -> str:
        return "QVector(" + ", ".join(fmt(a) for a in self) + ")"


def dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    if len(a) != len(b):
        raise DimensionMismatch(f"dot of dims {len(a)} and {len(b)}")
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


class QMatrix(tuple):
    """Immutable m x n matrix stored as a tuple of QVector rows."""

    def __new__(cls, rows: Iterable[Iterable[RationalLike]] = ()):
        rows = tuple(r if isinstance(r, QVector) else QVector(r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        return super().__new__(cls, rows)

    @classmethod
    def _raw(cls, rows):
        return tuple.__new__(cls, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self), len(self[0]) if self else 0)

    @property
    def rows(self) -> tuple[QVector, ...]:
        return tuple(self)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls._raw([QVector.unit(n, i) for i in range(n)])

    @classmethod
    def diag(cls, entries: Iterable[RationalLike]) -> "QMatrix":
        entries = [Q(e) for e in entries]
        n = len(entries)
        rows = []
        for i, e in enumerate(entries):
            r = [ZERO] * n
            r[i] = e
            rows.append(QVector._raw(r))
        return cls._raw(rows)

    @property
    def T(self) -> "QMatrix":
        if not self:
            return self
        return QMatrix._raw([QVector._raw(col) for col in zip(*self)])

    def column(self, j: int) -> QVector:
        return QVector._raw([r[j] for r in self])

    def __add__(self, other):
        if not isinstance(other, QMatrix) or other.shape != self.shape:
            raise DimensionMismatch("matrix addition shape mismatch")
        return QMatrix._raw([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        if not isinstance(other, QMatrix) or other.shape != self.shape:
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return QMatrix._raw([a - b for a, b in zip(self, other)])

    def __mul__(self, s):
        return QMatrix._raw([r * s for r in self])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.shape[1] != other.shape[0]:
                raise DimensionMismatch(f"matmul {self.shape} @ {other.shape}")
            cols = other.T
            return QMatrix._raw([QVector._raw([dot(r, c) for c in cols]) for r in self])
        other = other if isinstance(other, QVector) else QVector(other)
        if self.shape[1] != len(other):
            raise DimensionMismatch(f"matvec {self.shape} @ {len(other)}")
        return QVector._raw([dot(r, other) for r in self])

    def vecmat(self, v: Sequence[Scalar]) -> QVector:
        """Row vector times matrix: ``v^T M``."""
        if len(v) != len(self):
            raise DimensionMismatch(f"vecmat {len(v)} @ {self.shape}")
        n = self.shape[1]
        out = [ZERO] * n
        for coef, row in zip(v, self):
            if coef:
                for j, a in enumerate(row):
                    if a:
                        out[j] += coef * a
        return QVector._raw(out)

    def __repr__(self) -> str:
        return "QMatrix([" + ", ".join("[" + ", ".join(fmt(a) for a in r) + "]" for r in self) + "])"


def _eliminate(M: Sequence[Sequence[Scalar]], rhs_cols: list[list[Scalar]]) -> list[list[Scalar]]:
    """Gauss-Jordan on ``M`` carrying the right-hand side columns along.

    Pivot choice is the first nonzero entry in the column. Returns the
    solution columns; raises Singular on rank deficiency.
    """
    n = len(M)
    if any(len(r) != n for r in M):
        raise DimensionMismatch("solve requires a square matrix")
    k = len(rhs_cols)
    # augmented rows: n coefficients then k rhs entries
    aug = [list(M[i]) + [col[i] for col in rhs_cols] for i in range(n)]
    width = n + k
    for c in range(n):
        p = c
        while p < n and not aug[p][c]:
            p += 1
        if p == n:
            raise Singular(f"matrix is singular (no pivot in column {c})")
        if p != c:
            aug[c], aug[p] = aug[p], aug[c]
        prow = aug[c]
        piv = prow[c]
        if piv != 1:
            inv = ONE / piv
            for j in range(c, width):
                if prow[j]:
                    prow[j] *= inv
        nz = [j for j in range(c + 1, width) if prow[j]]
        for r in range(n):
            if r == c:
                continue
            row = aug[r]
            f = row[c]
            if f:
                row[c] = ZERO
                for j in nz:
                    row[j] -= f * prow[j]
    return [[aug[i][n + t] for i in range(n)] for t in range(k)]


def solve(M: QMatrix, rhs: Sequence[RationalLike]) -> QVector:
    """Exact solution of ``M x = rhs``; raises Singular if rank(M) < n."""
    n = len(M)
    if len(rhs) != n:
        raise DimensionMismatch(f"rhs has dim {len(rhs)}, matrix has {n} rows")
    (x,) = _eliminate(M, [[Q(v) for v in rhs]])
    return QVector._raw(x)


def solve_many(M: QMatrix, rhss: Sequence[Sequence[RationalLike]]) -> list[QVector]:
    n = len(M)
    cols = []
    for rhs in rhss:
        if len(rhs) != n:
            raise DimensionMismatch(f"rhs has dim {len(rhs)}, matrix has {n} rows")
        cols.append([Q(v) for v in rhs])
    return [QVector._raw(x) for x in _eliminate(M, cols)]


def invert(M: QMatrix) -> QMatrix:
    """Exact inverse; raises Singular if M is not invertible."""
    n = len(M)
    eye = [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    cols = _eliminate(M, eye)
    # cols[j] is column j of the inverse
    return QMatrix._raw([QVector._raw([cols[j][i] for j in range(n)]) for i in range(n)])


def rank(M: Sequence[Sequence[RationalLike]]) -> int:
    rows = [[Q(a) for a in r] for r in M]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(r + 1, m):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return r


def bit_size(q: Scalar) -> int:
    """Bits needed for numerator plus denominator."""
    return int(gmpy2.bit_length(q.numerator)) + int(gmpy2.bit_length(q.denominator))
