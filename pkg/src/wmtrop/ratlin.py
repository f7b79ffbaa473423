"""Exact linear algebra over the rationals.

Matrices with Fraction entries, subspaces of Q^n held in canonical
reduced-row-echelon form, and dense univariate polynomials over Q.
There are no floats anywhere in this module, so every predicate built on
top of it (filtration equality, lattice divisibility, positive
definiteness) is decided exactly.

All values are immutable after construction; operations are pure
functions, safe to share across threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class DimensionMismatch(ValueError):
    """Operands live in incompatible dimensions."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = Fraction(1) / rows[r][c]
        if inv != 1:
            rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [a - f * b if b else a for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


class Matrix:
    """Immutable dense matrix over Q, row-major."""

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, entries: Iterable[Iterable], *, cols: int | None = None):
        grid = tuple(tuple(_frac(x) for x in row) for row in entries)
        if grid:
            ncols = len(grid[0])
            if any(len(r) != ncols for r in grid):
                raise ValueError("ragged matrix")
            if cols is not None and cols != ncols:
                raise ValueError("cols does not match row length")
        else:
            if cols is None:
                raise ValueError("empty matrix needs explicit cols")
            ncols = cols
        object.__setattr__(self, "_rows", grid)
        object.__setattr__(self, "rows", len(grid))
        object.__setattr__(self, "cols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[Fraction(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        z = Fraction(0)
        return cls([[z] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        cols = [tuple(_frac(x) for x in c) for c in columns]
        if any(len(c) != rows for c in cols):
            raise ValueError("column length mismatch")
        return cls([[c[i] for c in cols] for i in range(rows)], cols=len(cols))

    @classmethod
    def diagonal(cls, diag: Sequence) -> "Matrix":
        d = [_frac(x) for x in diag]
        n = len(d)
        return cls([[d[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)], cols=n)

    def entry(self, i: int, j: int) -> Fraction:
        return self._rows[i][j]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self._rows[ij[0]][ij[1]]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    @property
    def row_tuples(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def rows_list(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix addition shape mismatch")
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)],
            cols=self.cols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return Matrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)],
            cols=self.cols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in r] for r in self._rows], cols=self.cols)

    def scale(self, c) -> "Matrix":
        c = _frac(c)
        return Matrix([[c * x for x in r] for r in self._rows], cols=self.cols)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatch("matrix product shape mismatch")
            cols_b = [other.column(j) for j in range(other.cols)]
            zero = Fraction(0)
            out = []
            for row in self._rows:
                out_row = []
                for col in cols_b:
                    acc = zero
                    for a, b in zip(row, col):
                        if a and b:
                            acc = acc + a * b
                    out_row.append(acc)
                out.append(out_row)
            return Matrix(out, cols=other.cols)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square():
            raise DimensionMismatch("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative matrix power")
        out = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        v = [_frac(x) for x in vec]
        if len(v) != self.cols:
            raise DimensionMismatch("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self._rows)

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self._rows[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def trace(self) -> Fraction:
        if not self.is_square():
            raise DimensionMismatch("trace of a non-square matrix")
        return sum((self._rows[i][i] for i in range(self.rows)), Fraction(0))

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        rows, pivots = _rref(self.rows_list())
        return Matrix(rows, cols=self.cols), tuple(pivots)

    def rank(self) -> int:
        _, pivots = _rref(self.rows_list())
        return len(pivots)

    def det(self) -> Fraction:
        if not self.is_square():
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        a = self.rows_list()
        sign = 1
        out = Fraction(1)
        for c in range(n):
            pr = None
            for i in range(c, n):
                if a[i][c] != 0:
                    pr = i
                    break
            if pr is None:
                return Fraction(0)
            if pr != c:
                a[c], a[pr] = a[pr], a[c]
                sign = -sign
            piv = a[c][c]
            out *= piv
            for i in range(c + 1, n):
                if a[i][c] != 0:
                    f = a[i][c] / piv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return out * sign

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = [list(r) + [Fraction(i == j) for j in range(n)] for i, r in enumerate(self._rows)]
        rows, pivots = _rref(aug)
        if tuple(pivots[:n]) != tuple(range(n)):
            raise ValueError("matrix is not invertible")
        return Matrix([r[n:] for r in rows], cols=n)

    def leading_minor(self, k: int) -> "Matrix":
        """Top-left k-by-k submatrix."""
        return Matrix([r[:k] for r in self._rows[:k]], cols=k)

    def to_lists(self) -> list[list[Fraction]]:
        return self.rows_list()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.cols == other.cols
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.cols, self._rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._rows)
        return f"Matrix({self.rows}x{self.cols}: {body})"


def solve(m: Matrix, target: Sequence) -> tuple[Fraction, ...] | None:
    """One solution x of m*x = target, or None if the system is inconsistent."""
    t = [_frac(x) for x in target]
    if len(t) != m.rows:
        raise DimensionMismatch("target length mismatch")
    aug = [list(r) + [t[i]] for i, r in enumerate(m.row_tuples)]
    if not aug:
        return tuple() if m.cols == 0 else tuple([Fraction(0)] * m.cols)
    rows, pivots = _rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for r, c in enumerate(pivots):
        x[c] = rows[r][m.cols]
    return tuple(x)


class Subspace:
    """Linear subspace of Q^n, stored as its unique RREF basis.

    Equality of subspaces is literal equality of the stored bases, which
    is what makes filtration comparisons decidable bit-for-bit.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Matrix, *, _trusted: bool = False):
        if basis.cols != ambient_dim:
            raise DimensionMismatch("basis width does not match ambient dimension")
        if not _trusted:
            rows, _ = _rref(basis.rows_list())
            rows = [r for r in rows if any(x != 0 for x in r)]
            basis = Matrix(rows, cols=ambient_dim)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [[_frac(x) for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionMismatch("vector length mismatch")
        rows, _ = _rref(rows)
        rows = [r for r in rows if any(x != 0 for x in r)]
        return cls(ambient_dim, Matrix(rows, cols=ambient_dim), _trusted=True)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix([], cols=ambient_dim), _trusted=True)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim), _trusted=True)

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.basis.row_tuples

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def residual(self, vec: Sequence) -> tuple[Fraction, ...]:
        """vec minus its projection onto the pivot coordinates of the basis."""
        v = [_frac(x) for x in vec]
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length mismatch")
        for row in self.basis.row_tuples:
            piv = next(j for j, x in enumerate(row) if x != 0)
            f = v[piv]
            if f != 0:
                v = [a - f * b for a, b in zip(v, row)]
        return tuple(v)

    def contains_vector(self, vec: Sequence) -> bool:
        return all(x == 0 for x in self.residual(vec))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"


def kernel(m: Matrix) -> Subspace:
    """Null space {v : m v = 0} in canonical form."""
    rows, pivots = _rref(m.rows_list())
    n = m.cols
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        vecs.append(v)
    return Subspace.span(n, vecs)


def image(m: Matrix) -> Subspace:
    """Column span of m in canonical form."""
    return Subspace.span(m.rows, [m.column(j) for j in range(m.cols)])


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch("ambient dimension mismatch")
    return Subspace.span(u.ambient_dim, list(u.vectors()) + list(v.vectors()))


def subspace_intersect(u: Subspace, v: Subspace) -> Subspace:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch("ambient dimension mismatch")
    if u.is_zero() or v.is_zero():
        return Subspace.zero(u.ambient_dim)
    # x*U = y*V  <=>  (x, y) in ker [U^T | -V^T]
    cols = [list(r) for r in u.vectors()] + [[-x for x in r] for r in v.vectors()]
    stacked = Matrix.from_columns(cols, u.ambient_dim)
    vecs = []
    for coeffs in kernel(stacked).vectors():
        xs = coeffs[: u.dim]
        vec = [Fraction(0)] * u.ambient_dim
        for c, row in zip(xs, u.vectors()):
            if c != 0:
                vec = [a + c * b for a, b in zip(vec, row)]
        vecs.append(vec)
    return Subspace.span(u.ambient_dim, vecs)


def contains(u: Subspace, v: Subspace) -> bool:
    """True iff v is a subspace of u."""
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch("ambient dimension mismatch")
    return all(u.contains_vector(w) for w in v.vectors())


def apply_to_subspace(m: Matrix, s: Subspace) -> Subspace:
    """Image m(s) of a subspace under a linear map."""
    if m.cols != s.ambient_dim:
        raise DimensionMismatch("map domain does not match ambient dimension")
    return Subspace.span(m.rows, [m.apply(v) for v in s.vectors()])


class RatPoly:
    """Dense univariate polynomial over Q, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    @classmethod
    def zero(cls) -> "RatPoly":
        return cls([])

    @classmethod
    def one(cls) -> "RatPoly":
        return cls([1])

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "RatPoly") -> "RatPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return RatPoly(out)

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        return self + (-other)

    def __neg__(self) -> "RatPoly":
        return RatPoly([-x for x in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, RatPoly):
            if self.is_zero() or other.is_zero():
                return RatPoly.zero()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RatPoly(out)
        c = _frac(other)
        return RatPoly([c * x for x in self.coeffs])

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> "RatPoly":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = RatPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __divmod__(self, other: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd, dv = len(rem) - 1, other.degree
        if dd < dv:
            return RatPoly.zero(), self
        quo = [Fraction(0)] * (dd - dv + 1)
        lead = other.leading
        for k in range(dd - dv, -1, -1):
            c = rem[k + dv] / lead
            quo[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RatPoly(quo), RatPoly(rem)

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[1]

    def monic(self) -> "RatPoly":
        if self.is_zero():
            raise ValueError("zero polynomial has no monic form")
        lead = self.leading
        return self if lead == 1 else RatPoly([x / lead for x in self.coeffs])

    def derivative(self) -> "RatPoly":
        return RatPoly([i * x for i, x in enumerate(self.coeffs)][1:])

    def eval(self, x) -> Fraction:
        x = _frac(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def eval_matrix(self, m: Matrix) -> Matrix:
        if not m.is_square():
            raise DimensionMismatch("polynomial of a non-square matrix")
        out = Matrix.zero(m.rows, m.cols)
        for c in reversed(self.coeffs):
            out = out * m + Matrix.identity(m.rows).scale(c)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "RatPoly(0)"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                xi = "x" if i == 1 else f"x^{i}"
                if c == 1:
                    terms.append(xi)
                elif c == -1:
                    terms.append(f"-{xi}")
                else:
                    terms.append(f"{c}*{xi}")
        body = terms[0]
        for t in terms[1:]:
            body += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return f"RatPoly({body})"


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd via the Euclidean algorithm over Q."""
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return RatPoly.zero()
    return a.monic()


def char_poly(m: Matrix) -> RatPoly:
    """Characteristic polynomial det(xI - m), monic, by Faddeev-LeVerrier.

    The only divisions are by the integers 1..n, which are exact over Q.
    """
    if not m.is_square():
        raise DimensionMismatch("characteristic polynomial of a non-square matrix")
    n = m.rows
    if n == 0:
        return RatPoly.one()
    coeffs_high = [Fraction(1)]  # x^n, then x^(n-1), ...
    work = Matrix.identity(n)
    for k in range(1, n + 1):
        work = m * work
        ck = -work.trace() / k
        coeffs_high.append(ck)
        if k < n:
            work = work + Matrix.identity(n).scale(ck)
    return RatPoly(list(reversed(coeffs_high)))
