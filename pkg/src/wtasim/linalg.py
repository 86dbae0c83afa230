"""Dense exact matrices over a semiring, indexed by named finite sets.

Entries live in numpy object arrays so that Python ints and Fractions keep
arbitrary precision.  Tuple index sets (``Q^k``) are materialised in
lexicographic factor order, which is the order ``np.kron`` produces; a
transition matrix row for ``(q1, ..., qk)`` therefore lines up with the
row of the same label in a Kronecker power.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import ClassificationError, NotInvertibleError, ShapeError
from .semiring import Semiring


class IndexSet:
    """Ordered set of distinct labels."""

    __slots__ = ("labels", "_pos")

    def __init__(self, labels: Iterable[Hashable]):
        self.labels = tuple(labels)
        self._pos = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._pos) != len(self.labels):
            seen = set()
            dup = next(lab for lab in self.labels if lab in seen or seen.add(lab))
            raise ShapeError(f"duplicate index label {dup!r}")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._pos

    def __getitem__(self, i):
        return self.labels[i]

    def __eq__(self, other):
        return isinstance(other, IndexSet) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"IndexSet({list(self.labels)!r})"

    def index(self, label) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise ShapeError(f"unknown index label {label!r}") from None

    def power(self, k: int) -> "IndexSet":
        return IndexSet(itertools.product(self.labels, repeat=k))

    def product(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(itertools.product(self.labels, other.labels))


def _as_index(x) -> IndexSet:
    return x if isinstance(x, IndexSet) else IndexSet(x)


class Vec:
    __slots__ = ("index", "data", "semiring")

    def __init__(self, index, data, semiring: Semiring, check: bool = True):
        self.index = _as_index(index)
        self.semiring = semiring
        if check:
            data = [semiring.coerce(x) for x in data]
            arr = np.empty(len(data), dtype=object)
            arr[:] = data
            data = arr
        if data.shape != (len(self.index),):
            raise ShapeError(f"vector of length {data.shape} for {len(self.index)} labels")
        self.data = data

    @classmethod
    def zeros(cls, index, semiring: Semiring) -> "Vec":
        index = _as_index(index)
        return cls(index, semiring.zeros(len(index)), semiring, check=False)

    @classmethod
    def from_dict(cls, index, values: dict, semiring: Semiring) -> "Vec":
        index = _as_index(index)
        return cls(index, [values.get(lab, semiring.zero) for lab in index], semiring)

    def __getitem__(self, label):
        return self.data[self.index.index(label)]

    def __len__(self):
        return len(self.index)

    def values(self) -> tuple:
        return tuple(self.data.tolist())

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.data)

    def __eq__(self, other):
        return (
            isinstance(other, Vec)
            and self.index == other.index
            and self.values() == other.values()
        )

    def __repr__(self):
        fmt = self.semiring.format_value
        return "Vec(" + ", ".join(f"{lab}: {fmt(v)}" for lab, v in zip(self.index, self.data)) + ")"

    def as_row(self) -> "Matrix":
        return Matrix([()], self.index, self.data.reshape(1, -1), self.semiring, check=False)


class Matrix:
    __slots__ = ("rows", "cols", "data", "semiring")

    def __init__(self, rows, cols, data, semiring: Semiring, check: bool = True):
        self.rows = _as_index(rows)
        self.cols = _as_index(cols)
        self.semiring = semiring
        shape = (len(self.rows), len(self.cols))
        if check:
            values = [semiring.coerce(x) for row in data for x in row]
            arr = np.empty(shape, dtype=object)
            if values:
                if len(values) != shape[0] * shape[1]:
                    raise ShapeError(f"{len(values)} entries for a {shape[0]}x{shape[1]} matrix")
                arr.reshape(-1)[:] = values
            elif shape[0] * shape[1]:
                raise ShapeError(f"no entries for a {shape[0]}x{shape[1]} matrix")
            data = arr
        if data.shape != shape:
            raise ShapeError(f"data of shape {data.shape} for a {shape[0]}x{shape[1]} matrix")
        self.data = data

    @classmethod
    def zeros(cls, rows, cols, semiring: Semiring) -> "Matrix":
        rows, cols = _as_index(rows), _as_index(cols)
        return cls(rows, cols, semiring.zeros((len(rows), len(cols))), semiring, check=False)

    @classmethod
    def identity(cls, index, semiring: Semiring) -> "Matrix":
        m = cls.zeros(index, index, semiring)
        for i in range(len(m.rows)):
            m.data[i, i] = semiring.one
        return m

    @classmethod
    def from_dict(cls, rows, cols, entries: dict, semiring: Semiring) -> "Matrix":
        """Build from ``{(row_label, col_label): value}``; missing entries are zero."""
        m = cls.zeros(rows, cols, semiring)
        for (r, c), v in entries.items():
            m.data[m.rows.index(r), m.cols.index(c)] = semiring.coerce(v)
        return m

    @classmethod
    def from_function(cls, rows, cols, fn, semiring: Semiring) -> "Matrix":
        rows, cols = _as_index(rows), _as_index(cols)
        return cls(rows, cols, [[fn(r, c) for c in cols] for r in rows], semiring)

    @classmethod
    def from_map(cls, rows, cols, mapping: dict, semiring: Semiring) -> "Matrix":
        """The functional 0/1 matrix of a total map ``rows -> cols``."""
        return cls.from_dict(rows, cols, {(r, mapping[r]): semiring.one for r in _as_index(rows)},
                             semiring)

    @property
    def shape(self):
        return self.data.shape

    def __getitem__(self, key):
        r, c = key
        return self.data[self.rows.index(r), self.cols.index(c)]

    def row(self, label) -> Vec:
        return Vec(self.cols, self.data[self.rows.index(label)].copy(), self.semiring, check=False)

    def tolist(self) -> list:
        return self.data.tolist()

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, self.data.T.copy(), self.semiring, check=False)

    def relabel(self, rows=None, cols=None) -> "Matrix":
        return Matrix(self.rows if rows is None else rows, self.cols if cols is None else cols,
                      self.data, self.semiring, check=False)

    def submatrix(self, rows, cols) -> "Matrix":
        rows, cols = _as_index(rows), _as_index(cols)
        ri = [self.rows.index(r) for r in rows]
        ci = [self.cols.index(c) for c in cols]
        data = self.data[np.ix_(ri, ci)] if ri and ci else self.semiring.zeros((len(ri), len(ci)))
        return Matrix(rows, cols, data, self.semiring, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data.tolist() == other.data.tolist()
        )

    def same_values(self, other: "Matrix") -> bool:
        """Entrywise equality ignoring labels."""
        return self.shape == other.shape and self.data.tolist() == other.data.tolist()

    def __add__(self, other: "Matrix") -> "Matrix":
        _require_same(self.rows, other.rows, "rows")
        _require_same(self.cols, other.cols, "columns")
        return Matrix(self.rows, self.cols, self.semiring.normalize(self.data + other.data),
                      self.semiring, check=False)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def __repr__(self):
        fmt = self.semiring.format_value
        body = "; ".join(" ".join(fmt(x) for x in row) for row in self.data)
        return f"Matrix[{len(self.rows)}x{len(self.cols)}]({body})"


def _require_same(a: IndexSet, b: IndexSet, what: str):
    if a != b:
        raise ShapeError(f"{what} index sets differ: {list(a)[:6]} vs {list(b)[:6]}")


def _dot(a: np.ndarray, b: np.ndarray, sr: Semiring) -> np.ndarray:
    if a.shape[-1] == 0 or 0 in a.shape or 0 in b.shape:
        shape = a.shape[:-1] + b.shape[1:]
        return sr.zeros(shape)
    return sr.normalize(np.dot(a, b))


def matmul(X: Matrix, Y: Matrix) -> Matrix:
    _require_same(X.cols, Y.rows, "inner")
    return Matrix(X.rows, Y.cols, _dot(X.data, Y.data, X.semiring), X.semiring, check=False)


def vecmat(v: Vec, X: Matrix) -> Vec:
    _require_same(v.index, X.rows, "inner")
    return Vec(X.cols, _dot(v.data, X.data, X.semiring), X.semiring, check=False)


def matvec(X: Matrix, v: Vec) -> Vec:
    _require_same(X.cols, v.index, "inner")
    return Vec(X.rows, _dot(X.data, v.data, X.semiring), X.semiring, check=False)


def dot(v: Vec, w: Vec):
    _require_same(v.index, w.index, "vector")
    if len(v) == 0:
        return v.semiring.zero
    return v.semiring.clamp(np.dot(v.data, w.data))


def kron(X: Matrix, Y: Matrix) -> Matrix:
    """Kronecker product with pair labels ``(i1, i2)``."""
    sr = X.semiring
    data = np.kron(X.data, Y.data) if X.data.size and Y.data.size else sr.zeros(
        (len(X.rows) * len(Y.rows), len(X.cols) * len(Y.cols)))
    return Matrix(X.rows.product(Y.rows), X.cols.product(Y.cols), sr.normalize(data), sr,
                  check=False)


def kron_power(X: Matrix, k: int) -> Matrix:
    """``X^{k,⊗}`` with k-tuple labels; ``k = 0`` gives ``(1)`` on the empty tuple."""
    if k < 0:
        raise ValueError("k must be non-negative")
    sr = X.semiring
    data = np.empty((1, 1), dtype=object)
    data[0, 0] = sr.one
    for _ in range(k):
        data = np.kron(data, X.data) if data.size and X.data.size else sr.zeros(
            (data.shape[0] * X.shape[0], data.shape[1] * X.shape[1]))
    return Matrix(X.rows.power(k), X.cols.power(k), sr.normalize(data), sr, check=False)


def kron_power_apply(X: Matrix, k: int, Y: Matrix) -> Matrix:
    """``X^{k,⊗} · Y`` computed by contracting one tensor axis at a time."""
    _require_same(X.cols.power(k), Y.rows, "inner")
    sr = X.semiring
    n_in, n_out, n_cols = len(X.cols), len(X.rows), len(Y.cols)
    if k == 0:
        return Matrix(X.rows.power(0), Y.cols, Y.data.copy(), sr, check=False)
    if n_in == 0 or n_out == 0 or n_cols == 0:
        return Matrix.zeros(X.rows.power(k), Y.cols, sr)
    T = Y.data.reshape((n_in,) * k + (n_cols,))
    for axis in range(k):
        T = np.moveaxis(np.tensordot(X.data, T, axes=([1], [axis])), 0, axis)
    data = sr.normalize(T.reshape(n_out ** k, n_cols))
    return Matrix(X.rows.power(k), Y.cols, data, sr, check=False)


def kron_vectors_apply(vectors: Sequence[Vec], Y: Matrix) -> Vec:
    """``(v1 ⊗ ... ⊗ vk) · Y`` without building the Kronecker vector."""
    sr = Y.semiring
    k = len(vectors)
    if k == 0:
        _require_same(IndexSet([()]), Y.rows, "inner")
        return Vec(Y.cols, Y.data[0].copy(), sr, check=False)
    index = vectors[0].index
    _require_same(index.power(k), Y.rows, "inner")
    n = len(index)
    if n == 0 or len(Y.cols) == 0:
        return Vec.zeros(Y.cols, sr)
    T = Y.data.reshape((n,) * k + (len(Y.cols),))
    for v in vectors:
        T = np.tensordot(v.data, T, axes=([0], [0]))
    return Vec(Y.cols, sr.normalize(T), sr, check=False)


def kron_vector(vectors: Sequence[Vec]) -> Vec:
    sr = vectors[0].semiring if vectors else None
    if sr is None:
        raise ValueError("kron_vector needs at least one vector")
    data = np.ones(1, dtype=object) * sr.one
    labels = [()]
    for v in vectors:
        data = np.kron(data, v.data) if data.size and v.data.size else sr.zeros(
            len(data) * len(v))
        labels = [a + (b,) for a in labels for b in v.index]
    return Vec(labels, sr.normalize(data), sr, check=False)


def block_diag(X: Matrix, Y: Matrix, rows=None, cols=None) -> Matrix:
    """``[[X, 0], [0, Y]]`` on the concatenated (or given) index sets."""
    sr = X.semiring
    rows = _as_index(rows) if rows is not None else IndexSet(list(X.rows) + list(Y.rows))
    cols = _as_index(cols) if cols is not None else IndexSet(list(X.cols) + list(Y.cols))
    data = sr.zeros((len(rows), len(cols)))
    data[: X.shape[0], : X.shape[1]] = X.data
    data[X.shape[0]:, X.shape[1]:] = Y.data
    return Matrix(rows, cols, data, sr, check=False)


@dataclass(frozen=True)
class Classification:
    relational: bool
    functional: bool
    surjective: bool
    injective: bool
    diagonal: bool
    invertible_diagonal: bool
    nondegenerate: bool


def classify(X: Matrix) -> Classification:
    sr = X.semiring
    values = X.data.tolist()
    n_rows, n_cols = X.shape
    relational = all(x in (0, 1) for row in values for x in row)
    ones_per_row = [sum(1 for x in row if x == 1) for row in values]
    ones_per_col = [sum(1 for r in range(n_rows) if values[r][c] == 1) for c in range(n_cols)]
    functional = relational and all(n == 1 for n in ones_per_row)
    surjective = relational and all(n >= 1 for n in ones_per_col)
    injective = relational and all(n <= 1 for n in ones_per_col)
    diagonal = n_rows == n_cols and all(
        values[i][j] == 0 for i in range(n_rows) for j in range(n_cols) if i != j
    )
    invertible_diagonal = diagonal and all(sr.is_unit(values[i][i]) for i in range(n_rows))
    nondegenerate = all(any(x != 0 for x in row) for row in values) and all(
        any(values[r][c] != 0 for r in range(n_rows)) for c in range(n_cols)
    )
    return Classification(relational, functional, surjective, injective, diagonal,
                          invertible_diagonal, nondegenerate)


def rho(X: Matrix) -> dict:
    """The total function ``rows -> cols`` encoded by a functional matrix."""
    if not classify(X).functional:
        raise ClassificationError("matrix is not functional")
    out = {}
    for i, r in enumerate(X.rows):
        j = next(j for j in range(len(X.cols)) if X.data[i, j] == 1)
        out[r] = X.cols[j]
    return out


def invert_diagonal(E: Matrix) -> Matrix:
    c = classify(E)
    sr = E.semiring
    if not c.diagonal:
        raise NotInvertibleError("matrix is not diagonal")
    out = Matrix.zeros(E.cols, E.rows, sr)
    for i in range(E.shape[0]):
        e = E.data[i, i]
        if not sr.is_unit(e):
            raise NotInvertibleError(
                f"diagonal entry {sr.format_value(e)} at {E.rows[i]!r} is not a unit of {sr.name}")
        out.data[i, i] = sr.inv(e)
    return out
