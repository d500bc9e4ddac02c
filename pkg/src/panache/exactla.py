"""Exact linear algebra over the rationals and small prime fields.

Rationals are ``fractions.Fraction`` values and prime-field elements are
plain ``int`` residues in ``[0, p)``.  Every matrix carries its field, and
mixing fields raises :class:`FieldMismatch`.  Subspaces are stored through
their reduced row-echelon basis, so equality of subspaces is equality of
basis matrices.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence


class LinAlgError(ValueError):
    """Raised for malformed linear-algebra input (shapes, fields)."""


class FieldMismatch(LinAlgError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """Either Q (``p is None``) or the prime field F_p with p < 2**16."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or not _is_prime(self.p) or self.p >= 1 << 16:
                raise LinAlgError(f"prime field needs a prime below 65536, got {self.p!r}")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, x):
        """Coerce an int, Fraction or string into this field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p is None:
            if isinstance(x, bool):
                raise LinAlgError("booleans are not scalars")
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise LinAlgError(f"cannot coerce {x!r} into Q")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise LinAlgError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, int) and not isinstance(x, bool):
            return x % self.p
        raise LinAlgError(f"cannot coerce {x!r} into F_{self.p}")

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / a
        return pow(a, -1, self.p)

    def parse(self, s: str):
        s = s.strip()
        try:
            if self.p is None:
                return Fraction(s)
            if "/" in s:
                return self(Fraction(s))
            return int(s) % self.p
        except (ValueError, ZeroDivisionError) as exc:
            raise LinAlgError(f"bad scalar {s!r}") from exc

    def fmt(self, a) -> str:
        if self.p is None:
            a = Fraction(a)
            if a.denominator == 1:
                return str(a.numerator)
            return f"{a.numerator}/{a.denominator}"
        return str(a % self.p)

    def to_json(self):
        return "Q" if self.p is None else {"Fp": self.p}

    @staticmethod
    def from_json(obj) -> "Field":
        if obj == "Q":
            return QQ
        if isinstance(obj, dict) and set(obj) == {"Fp"}:
            return Field(int(obj["Fp"]))
        raise LinAlgError(f"bad field descriptor {obj!r}")

    def random(self, rng: random.Random, bound: int = 5):
        """A random element; rationals have numerator and denominator up to ``bound``."""
        if self.p is None:
            return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        return rng.randrange(self.p)

    def random_nonzero(self, rng: random.Random, bound: int = 5):
        while True:
            x = self.random(rng, bound)
            if x:
                return x

    def elements(self) -> list:
        if self.p is None:
            raise LinAlgError("Q is infinite")
        return list(range(self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


class Matrix:
    """Immutable dense matrix over a :class:`Field`."""

    __slots__ = ("field", "rows", "cols", "data", "_hash")

    def __init__(self, field: Field, rows: Sequence[Sequence], cols: Optional[int] = None,
                 _trusted: bool = False):
        self.field = field
        if _trusted:
            data = rows
        else:
            data = tuple(tuple(field(x) for x in row) for row in rows)
        self.data = data
        self.rows = len(data)
        if cols is None:
            if not data:
                raise LinAlgError("column count needed for a matrix with no rows")
            cols = len(data[0])
        self.cols = cols
        for row in data:
            if len(row) != cols:
                raise LinAlgError("ragged matrix")
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def _make(cls, field, data, cols):
        return cls(field, data, cols, _trusted=True)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero
        return cls._make(field, tuple((z,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return cls._make(field, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int) -> "Matrix":
        if not columns:
            return cls.zeros(field, rows, 0)
        return cls(field, [[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def from_flat(cls, field: Field, rows: int, cols: int, flat: Sequence) -> "Matrix":
        if len(flat) != rows * cols:
            raise LinAlgError("flat vector has the wrong length")
        return cls(field, [flat[i * cols:(i + 1) * cols] for i in range(rows)], cols)

    @classmethod
    def scalar(cls, field: Field, n: int, c) -> "Matrix":
        c = field(c)
        z = field.zero
        return cls._make(field, tuple(tuple(c if i == j else z for j in range(n)) for i in range(n)), n)

    # basic protocol -------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field == other.field and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(self.field.fmt(x) for x in row) for row in self.data)
        return f"Matrix<{self.field!r} {self.rows}x{self.cols}>[{body}]"

    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def _norm(self, x):
        return x if self.field.p is None else x % self.field.p

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError(f"shape mismatch {self.shape} + {other.shape}")
        p = self.field.p
        if p is None:
            data = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        else:
            data = tuple(tuple((a + b) % p for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        return Matrix._make(self.field, data, self.cols)

    def __neg__(self) -> "Matrix":
        p = self.field.p
        if p is None:
            data = tuple(tuple(-a for a in r) for r in self.data)
        else:
            data = tuple(tuple(-a % p for a in r) for r in self.data)
        return Matrix._make(self.field, data, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        p = self.field.p
        if p is None:
            data = tuple(tuple(c * a for a in r) for r in self.data)
        else:
            data = tuple(tuple(c * a % p for a in r) for r in self.data)
        return Matrix._make(self.field, data, self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise LinAlgError(f"shape mismatch {self.shape} @ {other.shape}")
        p = self.field.p
        z = self.field.zero
        ocols = other.cols
        odata = other.data
        out = []
        for row in self.data:
            acc = [z] * ocols
            for k, a in enumerate(row):
                if a:
                    orow = odata[k]
                    for j in range(ocols):
                        b = orow[j]
                        if b:
                            acc[j] += a * b
            if p is not None:
                acc = [x % p for x in acc]
            out.append(tuple(acc))
        return Matrix._make(self.field, tuple(out), ocols)

    @property
    def T(self) -> "Matrix":
        if self.rows == 0:
            return Matrix.zeros(self.field, self.cols, 0)
        return Matrix._make(self.field, tuple(zip(*self.data)), self.rows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> tuple:
        return self.data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        data = tuple(tuple(self.data[i][j] for j in cols) for i in rows)
        return Matrix._make(self.field, data, len(cols))

    def with_block(self, r0: int, c0: int, block: "Matrix") -> "Matrix":
        """Copy of self with ``block`` written at offset (r0, c0)."""
        self._check(block)
        rows = [list(r) for r in self.data]
        for i in range(block.rows):
            for j in range(block.cols):
                rows[r0 + i][c0 + j] = block.data[i][j]
        return Matrix._make(self.field, tuple(tuple(r) for r in rows), self.cols)

    def hstack(self, *others: "Matrix") -> "Matrix":
        mats = (self,) + others
        for m in others:
            self._check(m)
            if m.rows != self.rows:
                raise LinAlgError("hstack row mismatch")
        data = tuple(tuple(itertools.chain.from_iterable(m.data[i] for m in mats)) for i in range(self.rows))
        return Matrix._make(self.field, data, sum(m.cols for m in mats))

    def vstack(self, *others: "Matrix") -> "Matrix":
        for m in others:
            self._check(m)
            if m.cols != self.cols:
                raise LinAlgError("vstack column mismatch")
        data = self.data + tuple(itertools.chain.from_iterable(m.data for m in others))
        return Matrix._make(self.field, data, self.cols)

    @staticmethod
    def block_diag(field: Field, blocks: Sequence["Matrix"]) -> "Matrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = Matrix.zeros(field, rows, cols)
        r = c = 0
        for b in blocks:
            out = out.with_block(r, c, b)
            r += b.rows
            c += b.cols
        return out

    def flatten(self) -> tuple:
        return tuple(itertools.chain.from_iterable(self.data))

    # elimination ----------------------------------------------------------
    def rref(self):
        """Return ``(R, pivots)`` with R the reduced row-echelon form."""
        return _rref(self)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "Subspace":
        """Right null space {x : self @ x = 0} as a subspace of field^cols."""
        R, piv = self.rref()
        n = self.cols
        pivset = set(piv)
        vecs = []
        f = self.field
        for free in range(n):
            if free in pivset:
                continue
            v = [f.zero] * n
            v[free] = f.one
            for i, pc in enumerate(piv):
                v[pc] = self._norm(-R.data[i][free])
            vecs.append(v)
        return Subspace.span(f, n, vecs)

    def image(self) -> "Subspace":
        """Column space as a subspace of field^rows."""
        return Subspace.span(self.field, self.rows, [self.column(j) for j in range(self.cols)])

    def row_space(self) -> "Subspace":
        return Subspace.span(self.field, self.cols, self.data)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise LinAlgError("inverse of a non-square matrix")
        n = self.rows
        aug = self.hstack(Matrix.identity(self.field, n))
        R, piv = aug.rref()
        if tuple(piv[:n]) != tuple(range(n)) or len(piv) < n:
            raise LinAlgError("matrix is singular")
        return R.submatrix(range(n), range(n, 2 * n))

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    def to_json(self):
        return [[self.field.fmt(x) for x in row] for row in self.data]

    @staticmethod
    def from_json(field: Field, obj, rows: Optional[int] = None, cols: Optional[int] = None) -> "Matrix":
        if not isinstance(obj, list):
            raise LinAlgError("matrix must be a list of rows")
        if not obj:
            if rows not in (None, 0):
                raise LinAlgError(f"expected {rows} rows, got 0")
            return Matrix.zeros(field, 0, cols or 0)
        data = []
        for row in obj:
            if not isinstance(row, list):
                raise LinAlgError("matrix rows must be lists")
            data.append([field.parse(x) if isinstance(x, str) else field(x) for x in row])
        m = Matrix(field, data)
        if rows is not None and m.rows != rows or cols is not None and m.cols != cols:
            raise LinAlgError(f"expected a {rows}x{cols} matrix, got {m.rows}x{m.cols}")
        return m


def _rref(m: Matrix):
    f = m.field
    p = f.p
    rows = [list(r) for r in m.data]
    nrows, ncols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        inv = f.inv(prow[c])
        if p is None:
            if inv != 1:
                prow = [x * inv for x in prow]
        else:
            if inv != 1:
                prow = [x * inv % p for x in prow]
        rows[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                row = rows[i]
                a = row[c]
                if a:
                    if p is None:
                        for j in nz:
                            row[j] -= a * prow[j]
                    else:
                        for j in nz:
                            row[j] = (row[j] - a * prow[j]) % p
        pivots.append(c)
        r += 1
    return Matrix._make(f, tuple(tuple(x) for x in rows), ncols), tuple(pivots)


class Subspace:
    """A subspace of field^ambient, stored by its canonical RREF basis."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field: Field, ambient: int, basis: Matrix, pivots: tuple):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, field: Field, ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [tuple(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise LinAlgError(f"vector of length {len(v)} in ambient {ambient}")
        if not vecs:
            return cls.zero(field, ambient)
        m = Matrix(field, vecs, ambient)
        R, piv = m.rref()
        basis = R.submatrix(range(len(piv)), range(ambient))
        return cls(field, ambient, basis, piv)

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix.zeros(field, 0, ambient), ())

    @classmethod
    def full(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix.identity(field, ambient), tuple(range(ambient)))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list:
        return [self.basis.data[i] for i in range(self.dim)]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.field == other.field and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.field, self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace<dim {self.dim} in {self.ambient}>"

    def _check(self, other: "Subspace"):
        if self.field != other.field:
            raise FieldMismatch("subspaces over different fields")
        if self.ambient != other.ambient:
            raise LinAlgError(f"ambient mismatch {self.ambient} vs {other.ambient}")

    def reduce(self, v: Sequence) -> tuple:
        """Canonical representative of v modulo this subspace (zero at pivots)."""
        f = self.field
        p = f.p
        v = [f(x) for x in v]
        if len(v) != self.ambient:
            raise LinAlgError("vector length mismatch")
        for i, c in enumerate(self.pivots):
            a = v[c]
            if a:
                row = self.basis.data[i]
                if p is None:
                    for j in range(c, self.ambient):
                        if row[j]:
                            v[j] -= a * row[j]
                else:
                    for j in range(c, self.ambient):
                        if row[j]:
                            v[j] = (v[j] - a * row[j]) % p
        return tuple(v)

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> Optional[tuple]:
        """Coefficients of v in the RREF basis, or None when v is outside."""
        if not self.contains(v):
            return None
        f = self.field
        return tuple(f(v[c]) for c in self.pivots)

    def combination(self, coeffs: Sequence) -> tuple:
        f = self.field
        out = [f.zero] * self.ambient
        for c, row in zip(coeffs, self.basis.data):
            if c:
                for j, x in enumerate(row):
                    if x:
                        out[j] += c * x
        if f.p is not None:
            out = [x % f.p for x in out]
        return tuple(out)

    def issubspace(self, other: "Subspace") -> bool:
        """True when self is contained in other."""
        self._check(other)
        return all(other.contains(v) for v in self.vectors())

    def __le__(self, other: "Subspace") -> bool:
        return self.issubspace(other)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, self.ambient, self.vectors() + other.vectors())

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient)
        reduced = [other.reduce(v) for v in self.vectors()]
        # coefficient vectors c with sum c_i * reduce(u_i) == 0
        rel = Matrix(self.field, reduced, self.ambient).T.kernel()
        return Subspace.span(self.field, self.ambient, [self.combination(c) for c in rel.vectors()])

    def complement_coordinates(self) -> tuple:
        """Non-pivot coordinates; unit vectors there span a complement."""
        piv = set(self.pivots)
        return tuple(j for j in range(self.ambient) if j not in piv)


def rref_kernel_image(m: Matrix):
    """RREF of m with its kernel and image; asserts rank-nullity."""
    R, _ = m.rref()
    ker = m.kernel()
    im = m.image()
    if ker.dim + im.dim != m.cols:
        raise AssertionError("rank-nullity violated")
    return R, ker, im


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Canonical solution x of a @ x = b (free variables zero), or None."""
    a._check(b)
    if a.rows != b.rows:
        raise LinAlgError(f"solve: {a.rows} equations but right side has {b.rows} rows")
    f = a.field
    n = a.cols
    aug = a.hstack(b)
    R, piv = aug.rref()
    if any(c >= n for c in piv):
        return None
    out = [[f.zero] * b.cols for _ in range(n)]
    for i, c in enumerate(piv):
        out[c] = list(R.data[i][n:])
    return Matrix(f, out, b.cols)


def subspace_ops(u: Subspace, v: Subspace):
    """(u + v, u ∩ v, v ⊆ u)."""
    s = u.sum(v)
    i = u.intersection(v)
    if s.dim + i.dim != u.dim + v.dim:
        raise AssertionError("dimension formula violated")
    return s, i, v.issubspace(u)


def solve_affine(field: Field, nvars: int, equations: Sequence) -> tuple:
    """Solve sparse linear equations given as ``(coeff_dict, rhs)`` pairs.

    Returns ``(particular, kernel)`` where ``particular`` is the canonical
    solution tuple (or None when inconsistent) and ``kernel`` the solution
    space of the homogeneous system.
    """
    rows = []
    z = field.zero
    for coeffs, rhs in equations:
        row = [z] * (nvars + 1)
        for k, c in coeffs.items():
            row[k] += c
        row[nvars] = rhs
        if field.p is not None:
            row = [x % field.p for x in row]
        if any(row):
            rows.append(row)
    if not rows:
        return tuple([z] * nvars), Subspace.full(field, nvars)
    m = Matrix(field, rows, nvars + 1)
    R, piv = m.rref()
    homog = R.submatrix(range(len(piv)), range(nvars))
    kernel = homog.kernel() if homog.rows else Subspace.full(field, nvars)
    if nvars in piv:
        return None, kernel
    x = [z] * nvars
    for i, c in enumerate(piv):
        x[c] = R.data[i][nvars]
    return tuple(x), kernel


def enumerate_subspaces(field: Field, ambient: int, dim: Optional[int] = None) -> Iterator[Subspace]:
    """Every subspace of F_p^ambient, generated by echelon pattern."""
    if field.p is None:
        raise LinAlgError("subspace enumeration needs a finite field")
    dims = range(ambient + 1) if dim is None else [dim]
    elems = field.elements()
    for d in dims:
        for piv in itertools.combinations(range(ambient), d):
            pivset = set(piv)
            free = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, ambient) if j not in pivset]
            for vals in itertools.product(elems, repeat=len(free)):
                rows = [[0] * ambient for _ in range(d)]
                for i, c in enumerate(piv):
                    rows[i][c] = 1
                for (i, j), v in zip(free, vals):
                    rows[i][j] = v
                basis = Matrix(field, rows, ambient) if d else Matrix.zeros(field, 0, ambient)
                yield Subspace(field, ambient, basis, piv)


def find_invertible(field: Field, mats: Sequence[Matrix], rng: Optional[random.Random] = None,
                    retries: int = 8, grid: int = 2):
    """Look for an invertible matrix in the span of ``mats``.

    Tries ``retries`` random combinations, then sweeps coefficient vectors
    with entries in ``[-grid, grid]`` (all of F_p for prime fields).  Returns
    ``(matrix or None, deterministic)``; ``deterministic`` is True when the
    answer came from the exhaustive sweep.
    """
    if not mats:
        return None, True
    n = mats[0].rows
    if n == 0:
        return Matrix.zeros(field, 0, 0), True
    rng = rng or random.Random(0)

    def combo(coeffs):
        acc = Matrix.zeros(field, n, n)
        for c, m in zip(coeffs, mats):
            if c:
                acc = acc + m.scale(c)
        return acc

    for _ in range(retries):
        coeffs = [field(rng.randint(-10 ** 6, 10 ** 6)) for _ in mats]
        cand = combo(coeffs)
        if cand.is_invertible():
            return cand, False
    values = field.elements() if field.p is not None else [field(x) for x in range(-grid, grid + 1)]
    if len(values) ** len(mats) > 200000:
        # a degree-bounded grid: vary at most three coefficients at once
        for support in itertools.chain.from_iterable(
                itertools.combinations(range(len(mats)), s) for s in range(1, 4)):
            for vals in itertools.product([v for v in values if v], repeat=len(support)):
                coeffs = [field.zero] * len(mats)
                for i, v in zip(support, vals):
                    coeffs[i] = v
                cand = combo(coeffs)
                if cand.is_invertible():
                    return cand, True
        return None, True
    for coeffs in itertools.product(values, repeat=len(mats)):
        cand = combo(coeffs)
        if cand.is_invertible():
            return cand, True
    return None, True
