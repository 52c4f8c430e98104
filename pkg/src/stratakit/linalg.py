"""Exact linear algebra over GF(p) and the rationals.

This is the only numeric kernel of the package.  Everything above it
(algebras, modules, functors, filtration searches) is assembled from the
operations here, so the contract is strict: no floating point anywhere,
subspaces are kept in canonical reduced row echelon form so that equality
of subspaces is equality of representations, and every operation is pure.

Conventions:

* A vector is a tuple of field elements (ints for GF(p), ``Fraction`` for Q).
* A ``Matrix`` is dense and row-major.  Row count 0 and column count 0 are
  both legal and show up constantly (zero modules, empty kernels).
* Linear maps act on *row* vectors: the map with matrix ``A`` sends ``v`` to
  ``v @ A``, and composition "f then g" is ``f.mat @ g.mat``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """An exact field: the prime field GF(p) or the rationals.

    ``kind`` is ``"GF"`` (with ``p`` prime) or ``"Q"`` (``p`` is None).
    Elements of GF(p) are plain ints in ``range(p)``; elements of Q are
    ``Fraction`` instances.
    """

    kind: str
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "GF":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"GF(p) needs a prime p, got {self.p!r}")
        elif self.kind == "Q":
            if self.p is not None:
                raise ValueError("the rationals take no modulus")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @staticmethod
    def gf(p: int) -> "Field":
        return Field("GF", p)

    @staticmethod
    def rationals() -> "Field":
        return Field("Q")

    @property
    def is_finite(self) -> bool:
        return self.kind == "GF"

    @property
    def zero(self):
        return 0 if self.kind == "GF" else Fraction(0)

    @property
    def one(self):
        return 1 if self.kind == "GF" else Fraction(1)

    def of(self, x) -> int | Fraction:
        """Coerce an int, Fraction, or numeric string into the field."""
        if self.kind == "GF":
            if isinstance(x, str):
                x = int(x, 10)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.kind == "GF" else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == "GF" else a - b

    def neg(self, a):
        return (-a) % self.p if self.kind == "GF" else -a

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == "GF" else a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "GF":
            return pow(a, -1, self.p)
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self) -> Iterator[int]:
        """Iterate all field elements (finite fields only)."""
        if self.kind != "GF":
            raise ValueError("cannot enumerate the rationals")
        return iter(range(self.p))

    def to_json(self) -> dict:
        return {"kind": "GF", "p": self.p} if self.kind == "GF" else {"kind": "Q"}

    def __repr__(self) -> str:
        return f"GF({self.p})" if self.kind == "GF" else "Q"


GF2 = Field.gf(2)
GF3 = Field.gf(3)
QQ = Field.rationals()


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix, row-major entry tuple of length rows*cols."""

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [tuple(field.of(x) for x in r) for r in rows]
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ValueError("ragged rows")
        else:
            if cols is None:
                raise ValueError("a 0-row matrix needs an explicit column count")
            ncols = cols
        if cols is not None and rows and ncols != cols:
            raise ValueError(f"expected {cols} columns, got {ncols}")
        flat = tuple(x for r in rows for x in r)
        return Matrix(field, len(rows), ncols, flat)

    @staticmethod
    def zero(field: Field, rows: int, cols: int) -> "Matrix":
        return Matrix(field, rows, cols, (field.zero,) * (rows * cols))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        ent = tuple(o if i == j else z for i in range(n) for j in range(n))
        return Matrix(field, n, n, ent)

    # -- access ------------------------------------------------------------

    def __getitem__(self, ij: tuple) -> int | Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def row_list(self) -> list[tuple]:
        return [self.row(i) for i in range(self.rows)]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    @property
    def is_zero(self) -> bool:
        z = self.field.zero
        return all(x == z for x in self.entries)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        F = self.field
        return Matrix(
            F, self.rows, self.cols,
            tuple(F.add(a, b) for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        F = self.field
        return Matrix(
            F, self.rows, self.cols,
            tuple(F.sub(a, b) for a, b in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "Matrix":
        F = self.field
        return Matrix(F, self.rows, self.cols, tuple(F.neg(a) for a in self.entries))

    def scale(self, c) -> "Matrix":
        F = self.field
        c = F.of(c)
        return Matrix(F, self.rows, self.cols, tuple(F.mul(c, a) for a in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        F = self.field
        n, m, k = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = []
        if F.kind == "GF":
            p = F.p
            for i in range(n):
                arow = a[i * m : (i + 1) * m]
                for j in range(k):
                    s = 0
                    for t in range(m):
                        s += arow[t] * b[t * k + j]
                    out.append(s % p)
        else:
            for i in range(n):
                arow = a[i * m : (i + 1) * m]
                for j in range(k):
                    s = Fraction(0)
                    for t in range(m):
                        s += arow[t] * b[t * k + j]
                    out.append(s)
        return Matrix(F, n, k, tuple(out))

    def transpose(self) -> "Matrix":
        ent = tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows))
        return Matrix(self.field, self.cols, self.rows, ent)

    def stack(self, other: "Matrix") -> "Matrix":
        """Vertical stack (rows of self, then rows of other)."""
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return Matrix(self.field, self.rows + other.rows, self.cols, self.entries + other.entries)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        rows = [self.row(i) + other.row(i) for i in range(self.rows)]
        return Matrix.from_rows(self.field, rows, cols=self.cols + other.cols)

    def apply_row(self, v: Sequence) -> tuple:
        """Row vector times matrix: v @ self."""
        if len(v) != self.rows:
            raise ValueError("vector length mismatch")
        F = self.field
        out = []
        for j in range(self.cols):
            s = F.zero
            for i, x in enumerate(v):
                if x != F.zero:
                    s = F.add(s, F.mul(x, self.entries[i * self.cols + j]))
            out.append(s)
        return tuple(out)

    def _same_shape(self, other: "Matrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    # -- elimination ---------------------------------------------------------

    def rref(self) -> tuple["Matrix", int, tuple[int, ...]]:
        """Reduced row echelon form.

        Returns (rref matrix, rank, pivot columns).  The RREF is the unique
        one with leading 1s and zeros above and below each pivot; zero rows
        are dropped is NOT done here (shape is preserved), rows below the
        rank are zero.
        """
        F = self.field
        m = [list(self.row(i)) for i in range(self.rows)]
        nrows, ncols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r >= nrows:
                break
            pr = None
            for i in range(r, nrows):
                if m[i][c] != F.zero:
                    pr = i
                    break
            if pr is None:
                continue
            if pr != r:
                m[r], m[pr] = m[pr], m[r]
            piv = m[r][c]
            if piv != F.one:
                inv = F.inv(piv)
                m[r] = [F.mul(inv, x) for x in m[r]]
            for i in range(nrows):
                if i != r and m[i][c] != F.zero:
                    f = m[i][c]
                    m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        flat = tuple(x for row in m for x in row)
        return Matrix(F, nrows, ncols, flat), len(pivots), tuple(pivots)

    def rank(self) -> int:
        return self.rref()[1]

    def row_space(self) -> "Subspace":
        return Subspace.from_matrix(self)

    def left_kernel(self) -> "Subspace":
        """{v : v @ self = 0} as a subspace of k^rows."""
        # Solve by eliminating self^T: kernel of x |-> x @ A equals kernel
        # of A^T acting on column vectors, i.e. classic null space of A^T.
        at = self.transpose()
        R, rank, piv = at.rref()
        F = self.field
        n = self.rows
        free = [j for j in range(n) if j not in piv]
        basis = []
        for fc in free:
            v = [F.zero] * n
            v[fc] = F.one
            for r, pc in enumerate(piv):
                v[pc] = F.neg(R[r, fc])
            basis.append(tuple(v))
        return Subspace.from_matrix(Matrix.from_rows(F, basis, cols=n))

    def solve_right(self, target: "Matrix") -> "Matrix | None":
        """Find X with self @ X = target, or None if inconsistent."""
        yt = self.transpose().solve_left(target.transpose())
        return None if yt is None else yt.transpose()

    def solve_left(self, target: "Matrix") -> "Matrix | None":
        """Find X with X @ self = target, or None if inconsistent.

        ``self`` is (n x m), ``target`` is (k x m), X is (k x n).  This is
        the workhorse for re-expressing vectors in a spanning set.
        """
        if target.cols != self.cols:
            raise ValueError("column mismatch in solve_left")
        F = self.field
        # Row-reduce [self | I] so each target row can be expressed.
        n = self.rows
        aug = self.hstack(Matrix.identity(F, n))
        R, rank, piv = aug.rref()
        # Pivot columns inside the first self.cols columns give usable rows.
        rows_out = []
        for t in range(target.rows):
            v = list(target.row(t)) + [F.zero] * n
            # reduce v against R
            for r, pc in enumerate(piv):
                if pc >= self.cols:
                    break
                if v[pc] != F.zero:
                    f = v[pc]
                    rrow = R.row(r)
                    v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, rrow)]
            if any(x != F.zero for x in v[: self.cols]):
                return None
            rows_out.append(tuple(F.neg(x) for x in v[self.cols :]))
        return Matrix.from_rows(F, rows_out, cols=n)


def intertwiner_basis(field: Field, pairs: Sequence[tuple["Matrix", "Matrix"]], n: int, m: int) -> list["Matrix"]:
    """RREF-canonical basis of {X (n x m) : A_i @ X = X @ B_i for all i}."""
    if n == 0 or m == 0:
        return []
    nvars = n * m
    ncons = len(pairs) * n * m
    if ncons == 0:
        ident = Matrix.identity(field, max(n, m))
        # no constraints: all matrices; basis of unit matrices in RREF order
        out = []
        z = field.zero
        for k in range(n):
            for l in range(m):
                ent = tuple(field.one if (i == k and j == l) else z for i in range(n) for j in range(m))
                out.append(Matrix(field, n, m, ent))
        return out
    rows = []
    for k in range(n):
        for l in range(m):
            row = [field.zero] * ncons
            for pi, (A, B) in enumerate(pairs):
                base = pi * n * m
                for i in range(n):
                    c = A[i, k]
                    if c != field.zero:
                        idx = base + i * m + l
                        row[idx] = field.add(row[idx], c)
                for j in range(m):
                    c = B[l, j]
                    if c != field.zero:
                        idx = base + k * m + j
                        row[idx] = field.sub(row[idx], c)
            rows.append(tuple(row))
    T = Matrix.from_rows(field, rows, cols=ncons)
    ker = T.left_kernel()
    return [Matrix(field, n, m, ker.basis.row(i)) for i in range(ker.dim)]


def solve(a: Matrix, b: Matrix) -> tuple[Matrix, Subspace] | None:
    """Solve x @ a = b rowwise: returns (particular, kernel) or None.

    ``a`` is (n x m); ``b`` is (k x m); the particular solution is (k x n)
    and the kernel is the space of rows v with v @ a = 0, so the full
    solution set for each row is particular_row + kernel.
    """
    part = a.solve_left(b)
    if part is None:
        return None
    return part, a.left_kernel()


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^ambient, basis stored as an RREF matrix.

    Canonical: two subspaces are equal iff their dataclass representations
    are equal.
    """

    ambient: int
    basis: Matrix  # rank x ambient, in RREF with no zero rows

    @staticmethod
    def from_matrix(m: Matrix) -> "Subspace":
        R, rank, _ = m.rref()
        rows = [R.row(i) for i in range(rank)]
        return Subspace(m.cols, Matrix.from_rows(m.field, rows, cols=m.cols))

    @staticmethod
    def zero(field: Field, ambient: int) -> "Subspace":
        return Subspace(ambient, Matrix.from_rows(field, [], cols=ambient))

    @staticmethod
    def full(field: Field, ambient: int) -> "Subspace":
        return Subspace(ambient, Matrix.identity(field, ambient))

    @staticmethod
    def span(field: Field, vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        rows = [tuple(v) for v in vectors]
        return Subspace.from_matrix(Matrix.from_rows(field, rows, cols=ambient))

    @property
    def field(self) -> Field:
        return self.basis.field

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains(self, v: Sequence) -> bool:
        F = self.field
        v = list(v)
        if len(v) != self.ambient:
            raise ValueError("ambient mismatch")
        for i in range(self.basis.rows):
            row = self.basis.row(i)
            pc = next(j for j, x in enumerate(row) if x != F.zero)
            if v[pc] != F.zero:
                f = v[pc]
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
        return all(x == F.zero for x in v)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(other.basis.row(i)) for i in range(other.dim))

    def coords(self, v: Sequence) -> tuple | None:
        """Coordinates of v in the RREF basis, or None if v is outside."""
        sol = self.basis.solve_left(Matrix.from_rows(self.field, [tuple(v)], cols=self.ambient))
        return sol.row(0) if sol is not None else None

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.from_matrix(self.basis.stack(other.basis))

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        F = self.field
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(F, self.ambient)
        stacked = self.basis.stack(other.basis)
        ker = stacked.left_kernel()
        vecs = []
        for i in range(ker.dim):
            coeffs = ker.basis.row(i)[: self.dim]
            vecs.append(self._combine(coeffs))
        return Subspace.span(F, vecs, self.ambient)

    def _combine(self, coeffs: Sequence) -> tuple:
        F = self.field
        out = [F.zero] * self.ambient
        for c, i in zip(coeffs, range(self.dim)):
            if c != F.zero:
                row = self.basis.row(i)
                out = [F.add(x, F.mul(c, y)) for x, y in zip(out, row)]
        return tuple(out)

    def quotient_maps(self) -> tuple[Matrix, Matrix]:
        """Projection/section pair for k^ambient / self.

        Returns (projection, section): projection is (ambient x q) sending a
        row vector to quotient coordinates (classes of the non-pivot
        coordinate vectors), section is (q x ambient) choosing those
        coordinate vectors as representatives; projection after section is
        the identity on the quotient (row convention: section @ projection).
        """
        F = self.field
        piv = []
        for i in range(self.dim):
            row = self.basis.row(i)
            piv.append(next(j for j, x in enumerate(row) if x != F.zero))
        nonpiv = [j for j in range(self.ambient) if j not in piv]
        q = len(nonpiv)
        # projection: reduce e_j against basis, read off non-pivot coords
        proj_rows = []
        for j in range(self.ambient):
            v = [F.zero] * self.ambient
            v[j] = F.one
            for r, pc in enumerate(piv):
                if v[pc] != F.zero:
                    f = v[pc]
                    row = self.basis.row(r)
                    v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
            proj_rows.append(tuple(v[c] for c in nonpiv))
        proj = Matrix.from_rows(F, proj_rows, cols=q)
        sec_rows = []
        for c in nonpiv:
            v = [F.zero] * self.ambient
            v[c] = F.one
            sec_rows.append(tuple(v))
        sec = Matrix.from_rows(F, sec_rows, cols=self.ambient)
        return proj, sec

    def _check(self, other: "Subspace") -> None:
        if self.ambient != other.ambient:
            raise ValueError(f"ambient mismatch: {self.ambient} != {other.ambient}")
        if self.field != other.field:
            raise ValueError("field mismatch")
