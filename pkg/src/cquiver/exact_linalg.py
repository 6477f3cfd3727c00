"""Exact linear algebra over GF(p) or the rationals.

Matrices are thin immutable wrappers around numpy arrays.  Over GF(p) the
array is ``int64`` with entries in ``[0, p)``; over Q it is an ``object``
array of :class:`fractions.Fraction`.  Every reduction is a plain row
reduction with leftmost-pivot tie-breaking, so bases are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NotInvariant

DEFAULT_PRIME = 32003


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A computable exact field: GF(p) when ``p`` is set, Q when ``p is None``."""

    p: int | None = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        # prime fields above this bound could overflow int64 products
        if self.p is not None and self.p >= 2**31:
            raise ValueError("prime too large for int64 arithmetic")

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls(p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def dtype(self):
        return np.int64 if self.p is not None else object

    def __str__(self) -> str:
        return f"GF({self.p})" if self.p is not None else "Q"

    def elem(self, x) -> int | Fraction:
        if self.p is not None:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if self.p is not None:
            return pow(int(x), -1, self.p)
        return 1 / Fraction(x)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.p is not None:
            return np.mod(arr, self.p)
        return arr

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        if self.p is not None:
            return np.zeros((rows, cols), dtype=np.int64)
        out = np.empty((rows, cols), dtype=object)
        out.fill(Fraction(0))
        return out

    def random_elements(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.p is not None:
            return rng.integers(0, self.p, size=shape, dtype=np.int64)
        # small numerators keep rational entries readable
        vals = rng.integers(-3, 4, size=shape)
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*shape):
            out[idx] = Fraction(int(vals[idx]))
        return out


GF = FieldSpec.prime
QQ = FieldSpec(None)


class Matrix:
    """Immutable exact matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "_a")

    def __init__(self, field: FieldSpec, data) -> None:
        if isinstance(data, np.ndarray) and data.ndim == 2:
            arr = data
            if field.p is not None:
                arr = np.mod(arr.astype(np.int64, copy=False), field.p)
            else:
                arr = arr.astype(object, copy=True)
                for idx in np.ndindex(*arr.shape):
                    v = arr[idx]
                    if not isinstance(v, Fraction):
                        arr[idx] = Fraction(v)
        else:
            rows = [list(r) for r in data]
            ncols = len(rows[0]) if rows else 0
            if any(len(r) != ncols for r in rows):
                raise ValueError("ragged matrix rows")
            arr = field.zeros(len(rows), ncols)
            for i, r in enumerate(rows):
                for j, v in enumerate(r):
                    arr[i, j] = field.elem(v)
        arr.flags.writeable = False
        self.field = field
        self._a = arr

    @classmethod
    def _wrap(cls, field: FieldSpec, arr: np.ndarray) -> "Matrix":
        m = cls.__new__(cls)
        arr.flags.writeable = False
        m.field = field
        m._a = arr
        return m

    # constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls._wrap(field, field.zeros(rows, cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        a = field.zeros(n, n)
        for i in range(n):
            a[i, i] = field.elem(1)
        return cls._wrap(field, a)

    @classmethod
    def random(cls, field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> "Matrix":
        return cls._wrap(field, field.random_elements(rng, (rows, cols)))

    @classmethod
    def random_invertible(cls, field: FieldSpec, n: int, rng: np.random.Generator) -> "Matrix":
        while True:
            m = cls.random(field, n, n, rng)
            if rank(m) == n:
                return m

    # shape / access -----------------------------------------------------
    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    def entries(self) -> list:
        """Row-major entries as plain ints (GF(p)) or Fractions (Q)."""
        if self.field.p is not None:
            return [int(v) for v in self._a.ravel()]
        return list(self._a.ravel())

    def tolist(self) -> list[list]:
        if self.field.p is not None:
            return [[int(v) for v in row] for row in self._a]
        return [list(row) for row in self._a]

    def __getitem__(self, key):
        out = self._a[key]
        if isinstance(out, np.ndarray):
            if out.ndim == 2:
                return Matrix._wrap(self.field, out.copy())
            return out.copy()
        return int(out) if self.field.p is not None else out

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.tolist()})"

    # algebra ------------------------------------------------------------
    def _check(self, other: "Matrix") -> None:
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return Matrix.zeros(self.field, self.rows, other.cols)
        return Matrix._wrap(self.field, self.field.reduce(self._a @ other._a))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.reduce(self._a + other._a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.reduce(self._a - other._a))

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(self.field, self.field.reduce(-self._a))

    def scale(self, c) -> "Matrix":
        c = self.field.elem(c)
        return Matrix._wrap(self.field, self.field.reduce(self._a * c))

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.field, self._a.T.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self._a == other._a))
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, tuple(self.entries())))

    def is_zero(self) -> bool:
        return self._a.size == 0 or bool(np.all(self._a == 0))

    def is_identity(self) -> bool:
        a = self._a
        return self.rows == self.cols and bool((a.diagonal() == 1).all()) and np.count_nonzero(a) == self.rows


# block helpers ----------------------------------------------------------


def hstack(field: FieldSpec, blocks: Sequence[Matrix], rows: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(field, rows or 0, 0)
    r = blocks[0].rows
    if any(b.rows != r for b in blocks):
        raise ValueError("hstack row mismatch")
    return Matrix._wrap(field, np.concatenate([b.array for b in blocks], axis=1))


def vstack(field: FieldSpec, blocks: Sequence[Matrix], cols: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(field, 0, cols or 0)
    c = blocks[0].cols
    if any(b.cols != c for b in blocks):
        raise ValueError("vstack column mismatch")
    return Matrix._wrap(field, np.concatenate([b.array for b in blocks], axis=0))


def block_diag(field: FieldSpec, blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = field.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.array
        r += b.rows
        c += b.cols
    return Matrix._wrap(field, out)


# row reduction ------------------------------------------------------------


def _rref_rows(rows: list[list], p: int | None) -> tuple[list[list], list[int]]:
    """Row reduction on nested lists; much cheaper than numpy for small matrices."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        if p is None:
            inv = 1 / rows[r][c]
            head = [x * inv for x in rows[r]]
        else:
            inv = pow(rows[r][c], -1, p)
            head = [x * inv % p for x in rows[r]]
        rows[r] = head
        for i in range(nrows):
            f = rows[i][c]
            if i != r and f:
                if p is None:
                    rows[i] = [x - f * y for x, y in zip(rows[i], head)]
                else:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], head)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (leftmost pivot first)."""
    field = m.field
    if m.rows == 0 or m.cols == 0:
        return m, []
    rows, pivots = _rref_rows(m.array.tolist(), field.p)
    a = field.zeros(m.rows, m.cols)
    a[:, :] = rows
    return Matrix._wrap(field, a), pivots


def rank(m: Matrix) -> int:
    """Rank over the matrix's own field."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def null_space(m: Matrix) -> Matrix:
    """Columns form a basis of ker(m); one basis vector per free column."""
    field = m.field
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(field, n)
    r, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    out = field.zeros(n, len(free))
    if free:
        out[free, range(len(free))] = field.elem(1)
        if pivots:
            out[np.ix_(pivots, range(len(free)))] = field.reduce(-r.array[: len(pivots)][:, free])
    return Matrix._wrap(field, out)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X with a @ X = b, or None when the system is inconsistent.

    When ``a`` has full column rank the solution is unique.
    """
    field = a.field
    if a.rows != b.rows:
        raise ValueError("solve: row mismatch")
    n = a.cols
    aug = hstack(field, [a, b]) if a.rows else Matrix.zeros(field, 0, n + b.cols)
    if aug.rows == 0:
        return Matrix.zeros(field, n, b.cols)
    r, pivots = rref(aug)
    if any(p >= n for p in pivots):
        return None
    x = field.zeros(n, b.cols)
    ra = r.array
    for i, pc in enumerate(pivots):
        x[pc] = ra[i, n:]
    return Matrix._wrap(field, x)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("inverse of non-square matrix")
    x = solve(m, Matrix.identity(m.field, m.rows))
    if x is None or rank(m) != m.rows:
        raise ValueError("matrix is singular")
    return x


# kernels and cokernels --------------------------------------------------


@dataclass(frozen=True)
class KernelPresentation:
    """ker(d) inside a direct sum of two spaces of dims ``ambient_dims``.

    ``inclusion`` has the kernel basis as columns; ``projections`` are its
    two row blocks (the maps from the kernel onto each summand).
    """

    ambient_dims: tuple[int, int]
    inclusion: Matrix
    d: Matrix

    @property
    def dim(self) -> int:
        return self.inclusion.cols

    @property
    def projections(self) -> tuple[Matrix, Matrix]:
        m, _ = self.ambient_dims
        return self.inclusion[:m, :], self.inclusion[m:, :]


@dataclass(frozen=True)
class CokernelPresentation:
    """coker(d): ``projection`` maps the ambient sum onto the quotient."""

    ambient_dims: tuple[int, int]
    projection: Matrix
    d: Matrix

    @property
    def quotient_dim(self) -> int:
        return self.projection.rows

    @property
    def dim(self) -> int:
        return self.projection.rows

    @property
    def restrictions(self) -> tuple[Matrix, Matrix]:
        m, _ = self.ambient_dims
        return self.projection[:, :m], self.projection[:, m:]


def kernel_basis(d: Matrix, split: tuple[int, int] | None = None) -> KernelPresentation:
    split = split if split is not None else (d.cols, 0)
    if sum(split) != d.cols:
        raise ValueError("split does not match the domain dimension")
    return KernelPresentation(split, null_space(d), d)


def cokernel_basis(d: Matrix, split: tuple[int, int] | None = None) -> CokernelPresentation:
    split = split if split is not None else (d.rows, 0)
    if sum(split) != d.rows:
        raise ValueError("split does not match the codomain dimension")
    # rows of the projection span the annihilator of im(d)
    return CokernelPresentation(split, null_space(d.T).T, d)


def induced_on_kernels(
    k1: KernelPresentation, k2: KernelPresentation, blockmap: tuple[Matrix, Matrix]
) -> Matrix:
    """Unique L with ``k2.inclusion @ L == blockdiag @ k1.inclusion``."""
    field = k1.inclusion.field
    b = block_diag(field, blockmap)
    if b.cols != k1.inclusion.rows or b.rows != k2.inclusion.rows:
        raise ValueError("block map shape incompatible with kernels")
    rhs = b @ k1.inclusion
    x = solve(k2.inclusion, rhs)
    if x is None:
        raise NotInvariant("block map does not send the first kernel into the second")
    return x


def induced_on_cokernels(
    c1: CokernelPresentation, c2: CokernelPresentation, blockmap: tuple[Matrix, Matrix]
) -> Matrix:
    """Unique L with ``L @ c1.projection == c2.projection @ blockdiag``."""
    field = c1.projection.field
    b = block_diag(field, blockmap)
    if b.cols != c1.projection.cols or b.rows != c2.projection.cols:
        raise ValueError("block map shape incompatible with cokernels")
    rhs = c2.projection @ b
    x = solve(c1.projection.T, rhs.T)
    if x is None:
        raise NotInvariant("block map does not send the first image into the second")
    return x.T


def factor_through_projection(proj: Matrix, m: Matrix) -> Matrix | None:
    """L with ``L @ proj == m`` for a surjective ``proj``; None if m does not factor."""
    x = solve(proj.T, m.T)
    return None if x is None else x.T


def pullback(f: Matrix, g: Matrix) -> KernelPresentation:
    """Pullback of X --f--> Z <--g-- Y as ker(f | -g) inside X ⊕ Y."""
    return kernel_basis(hstack(f.field, [f, -g]), (f.cols, g.cols))


def pushout(u: Matrix, v: Matrix) -> CokernelPresentation:
    """Pushout of X <--u-- Z --v--> Y as coker(u ; -v) from X ⊕ Y."""
    return cokernel_basis(vstack(u.field, [u, -v]), (u.rows, v.rows))


def is_injective(m: Matrix) -> bool:
    return rank(m) == m.cols


def is_surjective(m: Matrix) -> bool:
    return rank(m) == m.rows


def is_invertible(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows
