"""Exact dense linear algebra over GF(p) and over the integers.

All field computations are done with numpy int64 arrays holding residues
in [0, p).  Primes and dimensions stay small enough (p <= 5, dims in the
hundreds) that int64 products never overflow.  Integer matrices use
arbitrary-precision Python ints so Smith normal form is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, int(p**0.5) + 1):
        if p % q == 0:
            return False
    return True


class FieldMatrix:
    """A rows x cols matrix over GF(p), stored row-major with entries in [0, p)."""

    __slots__ = ("p", "a")

    def __init__(self, p: int, data):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        a = np.array(data, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        self.p = p
        self.a = np.mod(a, p)
        self.a.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @staticmethod
    def zeros(p: int, rows: int, cols: int) -> "FieldMatrix":
        return FieldMatrix(p, np.zeros((rows, cols), dtype=np.int64))

    @staticmethod
    def identity(p: int, n: int) -> "FieldMatrix":
        return FieldMatrix(p, np.eye(n, dtype=np.int64))

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        assert self.p == other.p and self.cols == other.rows
        return FieldMatrix(self.p, (self.a @ other.a) % self.p)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        assert self.p == other.p and self.a.shape == other.a.shape
        return FieldMatrix(self.p, (self.a + other.a) % self.p)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        assert self.p == other.p and self.a.shape == other.a.shape
        return FieldMatrix(self.p, (self.a - other.a) % self.p)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix(self.p, (-self.a) % self.p)

    def scale(self, c: int) -> "FieldMatrix":
        return FieldMatrix(self.p, (self.a * (c % self.p)) % self.p)

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.p, self.a.T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def is_zero(self) -> bool:
        return not self.a.any()

    def tolist(self):
        return self.a.tolist()

    def __repr__(self):
        return f"FieldMatrix(p={self.p}, {self.a.tolist()})"


def _rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row reduce in place (on a copy).  Pivot = first nonzero entry scanning
    rows top-down in each column left-to-right, which makes the result and the
    pivot list deterministic."""
    m = a.copy() % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        col = m[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        other = np.flatnonzero(m[:, c])
        for j in other:
            if j != r:
                m[j] = (m[j] - m[j, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rref(m: FieldMatrix) -> tuple[FieldMatrix, tuple[int, ...]]:
    """Reduced row echelon form together with the pivot column indices."""
    red, piv = _rref_array(m.a, m.p)
    return FieldMatrix(m.p, red), tuple(piv)


def rank(m: FieldMatrix) -> int:
    return len(rref(m)[1])


def solve(a: FieldMatrix, b: FieldMatrix) -> Optional[FieldMatrix]:
    """Some x with a @ x = b, or None if the system is inconsistent.

    Free coordinates are set to zero, so the answer is deterministic.
    """
    assert a.p == b.p and a.rows == b.rows
    p = a.p
    aug = np.hstack([a.a, b.a])
    red, piv = _rref_array(aug, p)
    piv_in_b = [c for c in piv if c >= a.cols]
    if piv_in_b:
        return None
    x = np.zeros((a.cols, b.cols), dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = red[r, a.cols:]
    return FieldMatrix(p, x)


def kernel_basis(m: FieldMatrix) -> FieldMatrix:
    """Matrix whose columns form a basis of the right null space of m."""
    red, piv = _rref_array(m.a, m.p)
    p = m.p
    free = [c for c in range(m.cols) if c not in piv]
    basis = np.zeros((m.cols, len(free)), dtype=np.int64)
    for k, c in enumerate(free):
        basis[c, k] = 1
        for r, pc in enumerate(piv):
            basis[pc, k] = (-red[r, c]) % p
    return FieldMatrix(p, basis)


def column_space_basis(m: FieldMatrix) -> FieldMatrix:
    """Columns of m restricted to a basis of the column space.

    The pivot columns of the row reduction are kept, so the choice is
    deterministic (leftmost independent columns).
    """
    _, piv = _rref_array(m.a, m.p)
    return FieldMatrix(m.p, m.a[:, list(piv)])


def in_column_space(a: FieldMatrix, v: FieldMatrix) -> bool:
    return solve(a, v) is not None


# ---------------------------------------------------------------------------
# multi-unknown linear systems over GF(p)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatVar:
    name: str
    rows: int
    cols: int

    @property
    def size(self) -> int:
        return self.rows * self.cols


class LinearSystem:
    """Linear equations in several unknown matrices over GF(p).

    Each equation is  sum_k  L_k @ X_{v_k} @ R_k = RHS  with known L_k, R_k.
    Unknowns are vectorized column-major, turning L @ X @ R into
    (R^T kron L) vec(X).
    """

    def __init__(self, p: int):
        self.p = p
        self.vars: list[MatVar] = []
        self._offsets: dict[str, int] = {}
        self._rows: list[np.ndarray] = []
        self._rhs: list[np.ndarray] = []

    def var(self, name: str, rows: int, cols: int) -> MatVar:
        if name in self._offsets:
            raise ValueError(f"duplicate variable {name}")
        v = MatVar(name, rows, cols)
        self._offsets[name] = sum(u.size for u in self.vars)
        self.vars.append(v)
        return v

    @property
    def total(self) -> int:
        return sum(v.size for v in self.vars)

    def add_equation(self, terms, rhs: FieldMatrix) -> None:
        """terms: iterable of (L, var, R); L or R may be None for identity."""
        p = self.p
        shape = None
        blocks: dict[str, np.ndarray] = {}
        for L, v, R in terms:
            lrows = L.rows if L is not None else v.rows
            rcols = R.cols if R is not None else v.cols
            if shape is None:
                shape = (lrows, rcols)
            assert shape == (lrows, rcols), "inconsistent term shapes"
            La = L.a if L is not None else np.eye(v.rows, dtype=np.int64)
            Ra = R.a if R is not None else np.eye(v.cols, dtype=np.int64)
            coef = np.kron(Ra.T % p, La % p) % p
            if v.name in blocks:
                blocks[v.name] = (blocks[v.name] + coef) % p
            else:
                blocks[v.name] = coef
        assert shape is not None
        assert rhs.a.shape == shape, "rhs shape mismatch"
        nrows = shape[0] * shape[1]
        row = np.zeros((nrows, self.total), dtype=np.int64)
        for name, coef in blocks.items():
            off = self._offsets[name]
            row[:, off : off + coef.shape[1]] = coef
        self._rows.append(row)
        self._rhs.append(rhs.a.flatten(order="F")[:, None] % p)

    def _assemble(self) -> tuple[np.ndarray, np.ndarray]:
        if self._rows:
            width = self.total
            padded = [
                r
                if r.shape[1] == width
                else np.concatenate(
                    [r, np.zeros((r.shape[0], width - r.shape[1]), dtype=np.int64)],
                    axis=1,
                )
                for r in self._rows
            ]
            A = np.vstack(padded) % self.p
            b = np.vstack(self._rhs) % self.p
        else:
            A = np.zeros((0, self.total), dtype=np.int64)
            b = np.zeros((0, 1), dtype=np.int64)
        return A, b

    def _unpack(self, x: np.ndarray) -> dict[str, FieldMatrix]:
        out = {}
        for v in self.vars:
            off = self._offsets[v.name]
            block = x[off : off + v.size]
            out[v.name] = FieldMatrix(
                self.p, block.reshape((v.rows, v.cols), order="F")
            )
        return out

    def solve(self) -> Optional[dict[str, FieldMatrix]]:
        A, b = self._assemble()
        x = solve(FieldMatrix(self.p, A), FieldMatrix(self.p, b))
        if x is None:
            return None
        return self._unpack(x.a[:, 0])

    def solution_space(self):
        """(particular, homogeneous basis) or None if inconsistent.

        The homogeneous basis is a list of unpacked variable dicts.
        """
        A, b = self._assemble()
        x = solve(FieldMatrix(self.p, A), FieldMatrix(self.p, b))
        if x is None:
            return None
        null = kernel_basis(FieldMatrix(self.p, A))
        basis = [self._unpack(null.a[:, j]) for j in range(null.cols)]
        return self._unpack(x.a[:, 0]), basis


# ---------------------------------------------------------------------------
# integer matrices and Smith normal form
# ---------------------------------------------------------------------------


class IntegerMatrix:
    """Dense matrix with arbitrary-precision integer entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence[int]], cols: Optional[int] = None):
        rows = [list(map(int, r)) for r in data]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged integer matrix")
        else:
            width = 0 if cols is None else cols
        self.rows = len(rows)
        self.cols = width
        self.data = rows

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntegerMatrix":
        return IntegerMatrix([[0] * cols for _ in range(rows)], cols=cols)

    def copy(self) -> "IntegerMatrix":
        return IntegerMatrix([r[:] for r in self.data], cols=self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntegerMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        return f"IntegerMatrix({self.data})"

    def tolist(self):
        return [r[:] for r in self.data]


def _mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n, k = len(a), len(a[0]) if a else 0
    m = len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    oi[j] += c * bt[j]
    return out


def smith_normal_form(m: IntegerMatrix):
    """(D, U, V) with U @ m @ V = D diagonal, U and V unimodular.

    The diagonal of D is the divisibility chain d1 | d2 | ... with
    nonnegative entries.
    """
    a = [r[:] for r in m.data]
    rows, cols = m.rows, m.cols
    U = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    V = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for r in a:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # find smallest-magnitude nonzero entry in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v != 0 and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        if a[t][t] < 0:
            negate_row(t)
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] % a[t][t] != 0:
                dirty = True
            add_row(i, t, -(a[i][t] // a[t][t]))
        for j in range(t + 1, cols):
            if a[t][j] % a[t][t] != 0:
                dirty = True
            add_col(j, t, -(a[t][j] // a[t][t]))
        if any(a[i][t] for i in range(t + 1, rows)) or any(
            a[t][j] for j in range(t + 1, cols)
        ):
            continue  # remainders left behind; repeat with a smaller pivot
        if dirty:
            continue
        # pivot must also divide every remaining entry for the chain property
        witness = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    witness = i
                    break
            if witness is not None:
                break
        if witness is not None:
            add_row(t, witness, 1)
            continue
        t += 1

    D = IntegerMatrix.zeros(rows, cols)
    for i in range(limit):
        D.data[i][i] = a[i][i]
    return D, IntegerMatrix(U), IntegerMatrix(V)


def smith_invariant_factors(m: IntegerMatrix) -> tuple[int, ...]:
    """Invariant factors of Z^cols / rowspace(m), one per column.

    Rows of m are relations on `cols` generators.  The quotient group is
    the direct sum of Z/d_i over the returned tuple, where Z/0 = Z.
    """
    D, _, _ = smith_normal_form(m)
    diag = [D.data[i][i] for i in range(min(m.rows, m.cols))]
    nonzero = [d for d in diag if d != 0]
    free = m.cols - len(nonzero)
    return tuple(nonzero + [0] * free)


def row_lattice_member(m: IntegerMatrix, v: Sequence[int]) -> bool:
    """Is the integer vector v in the lattice spanned by the rows of m?"""
    if len(v) != m.cols:
        raise ValueError("length mismatch")
    D, _, V = smith_normal_form(m)
    w = _mat_mul([list(map(int, v))], V.data)[0]
    limit = min(m.rows, m.cols)
    for j in range(m.cols):
        d = D.data[j][j] if j < limit else 0
        if d == 0:
            if w[j] != 0:
                return False
        elif w[j] % d != 0:
            return False
    return True


def row_lattices_equal(a: IntegerMatrix, b: IntegerMatrix) -> bool:
    """Do two relation matrices span the same sublattice of Z^cols?

    Decided by mutual membership of all generating rows.
    """
    if a.cols != b.cols:
        raise ValueError("ambient rank mismatch")
    return all(row_lattice_member(b, r) for r in a.data) and all(
        row_lattice_member(a, r) for r in b.data
    )


def stack(a: IntegerMatrix, b: IntegerMatrix) -> IntegerMatrix:
    if a.cols != b.cols:
        raise ValueError("column mismatch")
    return IntegerMatrix(a.tolist() + b.tolist(), cols=a.cols)
