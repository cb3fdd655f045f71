"""Exact integer semi-tensor product kernel.

Everything downstream runs on two matrix representations:

* ``LogicalMatrix``: a matrix whose every column is a canonical basis vector,
  stored as the sequence of 1-based column indices.  This is the only
  representation that scales to k^n columns.
* ``DenseMatrix``: an exact integer matrix, used for cross-checks and for the
  small nilpotent blocks of the normal form.  No floating point exists in this
  package.

The index convention is fixed globally: a value v in [1, k] is the basis
vector with a 1 in row v, and a product of basis vectors indexes its combined
state with the leftmost factor most significant:

    index(d_1, ..., d_n) = 1 + sum_j (d_j - 1) * k^(n - j)

All operations are pure; capacity above a configurable ceiling raises
``CapacityError`` before any large object is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Iterable, Sequence

__all__ = [
    "CapacityError",
    "DimensionError",
    "DeltaVector",
    "LogicalMatrix",
    "DenseMatrix",
    "get_capacity",
    "set_capacity",
    "checked_dim",
    "state_index",
    "state_digits",
    "delta",
    "identity",
    "stp",
    "stp_logical",
    "kron",
    "swap_matrix",
    "power_reducing",
    "khatri_rao",
    "khatri_rao_fold",
    "perm_inverse",
    "conjugate",
]


class CapacityError(ValueError):
    """A requested dimension exceeds the configured ceiling."""


class DimensionError(ValueError):
    """Operand dimensions are incompatible."""


_DEFAULT_CAPACITY = 1 << 20
_capacity = _DEFAULT_CAPACITY


def get_capacity() -> int:
    return _capacity


def set_capacity(limit: int) -> None:
    """Set the global dimension ceiling (process-wide, used by the CLI)."""
    global _capacity
    if limit < 1:
        raise ValueError("capacity must be positive")
    _capacity = limit


def checked_dim(value: int, what: str = "dimension") -> int:
    if value > _capacity:
        raise CapacityError(f"{what} {value} exceeds capacity ceiling {_capacity}")
    return value


def state_index(digits: Sequence[int], k: int) -> int:
    """Combined 1-based index of a tuple of values, leftmost most significant."""
    idx = 0
    for d in digits:
        idx = idx * k + (d - 1)
    return idx + 1


def state_digits(index: int, k: int, n: int) -> tuple[int, ...]:
    """Inverse of ``state_index``: split a 1-based index into n values in [1, k]."""
    rem = index - 1
    out = []
    for _ in range(n):
        out.append(rem % k + 1)
        rem //= k
    return tuple(reversed(out))


@dataclass(frozen=True)
class DeltaVector:
    """Basis column vector: the index-th column of the dim x dim identity."""

    dim: int
    index: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not 1 <= self.index <= self.dim:
            raise ValueError(f"index {self.index} out of range [1, {self.dim}]")

    def as_matrix(self) -> "LogicalMatrix":
        return LogicalMatrix(self.dim, (self.index,))

    def __str__(self) -> str:
        return f"D{self.dim}^{self.index}"


def delta(dim: int, index: int) -> DeltaVector:
    return DeltaVector(dim, index)


class LogicalMatrix:
    """Matrix of basis columns, stored as its column-index sequence.

    ``LogicalMatrix(rows, cols)`` has shape ``rows x len(cols)`` and its j-th
    column is the basis vector ``cols[j-1]``.  Immutable and hashable.
    """

    __slots__ = ("rows", "cols")

    def __init__(self, rows: int, cols: Iterable[int]):
        if rows < 1:
            raise ValueError("rows must be positive")
        checked_dim(rows, "row count")
        cols = tuple(cols)
        if not cols:
            raise ValueError("at least one column required")
        checked_dim(len(cols), "column count")
        for c in cols:
            if not 1 <= c <= rows:
                raise ValueError(f"column index {c} out of range [1, {rows}]")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, name, value):
        raise AttributeError("LogicalMatrix is immutable")

    @property
    def ncols(self) -> int:
        return len(self.cols)

    def column(self, j: int) -> DeltaVector:
        """The j-th column (1-based) as a basis vector."""
        return DeltaVector(self.rows, self.cols[j - 1])

    def is_square(self) -> bool:
        return self.rows == self.ncols

    def is_permutation(self) -> bool:
        return self.is_square() and len(set(self.cols)) == self.rows

    def to_dense(self) -> "DenseMatrix":
        n = self.ncols
        entries = [0] * (self.rows * n)
        for j, c in enumerate(self.cols):
            entries[(c - 1) * n + j] = 1
        return DenseMatrix(self.rows, n, entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LogicalMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols))

    def __repr__(self) -> str:
        return f"LogicalMatrix({self.rows}, {self.cols})"

    def __str__(self) -> str:
        return f"D{self.rows}[{','.join(str(c) for c in self.cols)}]"


class DenseMatrix:
    """Exact integer matrix, row-major entries."""

    __slots__ = ("rows", "ncols", "entries")

    def __init__(self, rows: int, ncols: int, entries: Iterable[int]):
        if rows < 1 or ncols < 1:
            raise ValueError("dimensions must be positive")
        checked_dim(rows, "row count")
        checked_dim(ncols, "column count")
        entries = tuple(entries)
        if len(entries) != rows * ncols:
            raise ValueError("entry count does not match dimensions")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("DenseMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "DenseMatrix":
        entries = [0] * (n * n)
        for i in range(n):
            entries[i * n + i] = 1
        return cls(n, n, entries)

    @classmethod
    def zero(cls, rows: int, ncols: int) -> "DenseMatrix":
        return cls(rows, ncols, [0] * (rows * ncols))

    def at(self, i: int, j: int) -> int:
        """Entry at row i, column j (1-based)."""
        return self.entries[(i - 1) * self.ncols + (j - 1)]

    def matmul(self, other: "DenseMatrix") -> "DenseMatrix":
        if self.ncols != other.rows:
            raise DimensionError(
                f"cannot multiply {self.rows}x{self.ncols} by {other.rows}x{other.ncols}"
            )
        n, m, p = self.rows, self.ncols, other.ncols
        a, b = self.entries, other.entries
        out = [0] * (n * p)
        for i in range(n):
            row_off = i * m
            for t in range(m):
                aa = a[row_off + t]
                if aa:
                    b_off = t * p
                    o_off = i * p
                    for j in range(p):
                        out[o_off + j] += aa * b[b_off + j]
        return DenseMatrix(n, p, out)

    def transpose(self) -> "DenseMatrix":
        out = [0] * (self.rows * self.ncols)
        for i in range(self.rows):
            for j in range(self.ncols):
                out[j * self.rows + i] = self.entries[i * self.ncols + j]
        return DenseMatrix(self.ncols, self.rows, out)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def matpow(self, exp: int) -> "DenseMatrix":
        if self.rows != self.ncols:
            raise DimensionError("matpow needs a square matrix")
        if exp < 0:
            raise ValueError("exponent must be nonnegative")
        result = DenseMatrix.identity(self.rows)
        base = self
        while exp:
            if exp & 1:
                result = result.matmul(base)
            base = base.matmul(base) if exp > 1 else base
            exp >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseMatrix)
            and self.rows == other.rows
            and self.ncols == other.ncols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols, self.entries))

    def __repr__(self) -> str:
        return f"DenseMatrix({self.rows}, {self.ncols}, {self.entries})"


def identity(n: int) -> LogicalMatrix:
    return LogicalMatrix(n, range(1, n + 1))


def _kron_logical(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    rows = checked_dim(a.rows * b.rows, "Kronecker row count")
    checked_dim(a.ncols * b.ncols, "Kronecker column count")
    cols = []
    for ca in a.cols:
        base = (ca - 1) * b.rows
        for cb in b.cols:
            cols.append(base + cb)
    return LogicalMatrix(rows, cols)


def _kron_dense(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    rows = checked_dim(a.rows * b.rows, "Kronecker row count")
    ncols = checked_dim(a.ncols * b.ncols, "Kronecker column count")
    out = [0] * (rows * ncols)
    for ia in range(a.rows):
        for ja in range(a.ncols):
            aa = a.entries[ia * a.ncols + ja]
            if aa == 0:
                continue
            for ib in range(b.rows):
                row = ia * b.rows + ib
                off = row * ncols + ja * b.ncols
                b_off = ib * b.ncols
                for jb in range(b.ncols):
                    out[off + jb] = aa * b.entries[b_off + jb]
    return DenseMatrix(rows, ncols, out)


def kron(a, b):
    """Kronecker product; logical x logical stays logical."""
    if isinstance(a, LogicalMatrix) and isinstance(b, LogicalMatrix):
        return _kron_logical(a, b)
    if isinstance(a, DenseMatrix) and isinstance(b, DenseMatrix):
        return _kron_dense(a, b)
    raise TypeError("kron expects two LogicalMatrix or two DenseMatrix operands")


def stp(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Semi-tensor product (A kron I_{t/n})(B kron I_{t/p}), t = lcm(n, p).

    Total: reduces to the ordinary product when inner dimensions match.
    """
    t = lcm(a.ncols, b.rows)
    if t != a.ncols:
        a = _kron_dense(a, DenseMatrix.identity(t // a.ncols))
    if t != b.rows:
        b = _kron_dense(b, DenseMatrix.identity(t // b.rows))
    return a.matmul(b)


def stp_logical(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Semi-tensor product of logical matrices, computed on indices.

    Equals ``stp`` on the dense embeddings.  When the inner dimensions match
    this is plain composition: column j of the result is column b_j of A.
    """
    t = lcm(a.ncols, b.rows)
    if t != a.ncols:
        a = _kron_logical(a, identity(t // a.ncols))
    if t != b.rows:
        b = _kron_logical(b, identity(t // b.rows))
    return LogicalMatrix(a.rows, (a.cols[j - 1] for j in b.cols))


def swap_matrix(m: int, n: int) -> LogicalMatrix:
    """Permutation W of size mn x mn with W (x kron y) = y kron x.

    Built as the column blocks [I_n kron e_1, ..., I_n kron e_m] over the
    basis vectors e_i of dimension m.
    """
    if m < 1 or n < 1:
        raise ValueError("swap_matrix needs positive dimensions")
    size = checked_dim(m * n, "swap size")
    cols = [0] * size
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cols[(i - 1) * n + (j - 1)] = (j - 1) * m + i
    return LogicalMatrix(size, cols)


def power_reducing(d: int) -> LogicalMatrix:
    """Matrix PR of shape d^2 x d with PR x = x kron x for basis vectors x."""
    if d < 1:
        raise ValueError("power_reducing needs a positive dimension")
    checked_dim(d * d, "power-reducing size")
    return LogicalMatrix(d * d, ((i - 1) * d + i for i in range(1, d + 1)))


def khatri_rao(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Columnwise Kronecker product: column j is Col_j(A) kron Col_j(B)."""
    if a.ncols != b.ncols:
        raise DimensionError(
            f"khatri_rao needs equal column counts, got {a.ncols} and {b.ncols}"
        )
    rows = checked_dim(a.rows * b.rows, "Khatri-Rao row count")
    q = b.rows
    return LogicalMatrix(rows, (q * (ca - 1) + cb for ca, cb in zip(a.cols, b.cols)))


def khatri_rao_fold(mats: Sequence[LogicalMatrix]) -> LogicalMatrix:
    """Left fold of ``khatri_rao`` over a nonempty sequence."""
    if not mats:
        raise ValueError("khatri_rao_fold needs at least one matrix")
    out = mats[0]
    for m in mats[1:]:
        out = khatri_rao(out, m)
    return out


def perm_inverse(t: LogicalMatrix) -> LogicalMatrix:
    """Inverse (= transpose) of a permutation matrix."""
    if not t.is_permutation():
        raise ValueError("not a permutation matrix")
    inv = [0] * t.rows
    for j, c in enumerate(t.cols, start=1):
        inv[c - 1] = j
    return LogicalMatrix(t.rows, inv)


def conjugate(m: LogicalMatrix, t: LogicalMatrix) -> LogicalMatrix:
    """Relabel a square transition matrix by a permutation: T^T M T.

    Column q of T names the old state that becomes new state q; the result
    maps q to the new name of M's image of that old state.
    """
    if not t.is_permutation():
        raise ValueError("not a permutation matrix")
    if not m.is_square() or m.rows != t.rows:
        raise DimensionError("conjugate needs a square matrix matching the permutation")
    inv = [0] * t.rows
    for j, c in enumerate(t.cols, start=1):
        inv[c - 1] = j
    return LogicalMatrix(m.rows, (inv[m.cols[c - 1] - 1] for c in t.cols))
