"""Exact integer linear algebra over arbitrary-precision integers.

Smith normal form with unimodular transforms, cokernel presentations of
integer matrices (a finitely generated abelian group with an explicit
quotient map), and linear Diophantine systems.  No floating point is used
anywhere; all entries are Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

Matrix = list[list[int]]


def matrix_dims(a: Matrix) -> tuple[int, int]:
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    return rows, cols


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = matrix_dims(a)
    rb, cb = matrix_dims(b)
    if ca != rb:
        raise ValueError("dimension mismatch in matrix product")
    out = zero_matrix(ra, cb)
    for i in range(ra):
        ai = a[i]
        oi = out[i]
        for k in range(ca):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(cb):
                    oi[j] += aik * bk[j]
    return out


def mat_vec(a: Matrix, x: list[int]) -> list[int]:
    rows, cols = matrix_dims(a)
    if len(x) != cols:
        raise ValueError("dimension mismatch in matrix-vector product")
    return [sum(a[i][j] * x[j] for j in range(cols)) for i in range(rows)]


def transpose(a: Matrix) -> Matrix:
    rows, cols = matrix_dims(a)
    return [[a[i][j] for i in range(rows)] for j in range(cols)]


def determinant(a: Matrix) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """Diagonalization u @ a @ v == s with unimodular u, v.

    The diagonal of ``s`` carries the invariant factors d1 | d2 | ... | d_rank
    (positive), followed by zeros.  ``u_inv`` is the exact inverse of ``u``;
    it is what turns canonical coordinates back into ambient ones.
    """

    u: Matrix
    s: Matrix
    v: Matrix
    u_inv: Matrix
    rank: int
    invariant_factors: tuple[int, ...]


def smith_normal_form(a: Matrix) -> SmithForm:
    """Smith normal form with transforms.

    Pivot choice is always the smallest nonzero absolute entry of the
    remaining block (ties broken row-major), followed by full row/column
    reduction, so the computation is deterministic for a fixed input.
    """
    rows, cols = matrix_dims(a)
    s = [row[:] for row in a]
    u = identity_matrix(rows)
    u_inv = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]
        for r in u_inv:
            r[i], r[j] = r[j], r[i]

    def negate_row(i: int) -> None:
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]
        for r in u_inv:
            r[i] = -r[i]

    def add_row(i: int, j: int, q: int) -> None:
        # row_i += q * row_j; u_inv gets the inverse column operation
        if q == 0:
            return
        s[i] = [x + q * y for x, y in zip(s[i], s[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]
        for r in u_inv:
            r[j] -= q * r[i]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_col(i: int, j: int, q: int) -> None:
        # col_i += q * col_j
        if q == 0:
            return
        for r in s:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]

    def smallest_pivot(t: int) -> tuple[int, int] | None:
        best = None
        where = None
        for i in range(t, rows):
            si = s[i]
            for j in range(t, cols):
                val = si[j]
                if val:
                    val = -val if val < 0 else val
                    if best is None or val < best:
                        best = val
                        where = (i, j)
        return where

    t = 0
    limit = min(rows, cols)
    while t < limit:
        pivot = smallest_pivot(t)
        if pivot is None:
            break
        while True:
            pi, pj = pivot
            swap_rows(t, pi)
            swap_cols(t, pj)
            if s[t][t] < 0:
                negate_row(t)
            d = s[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // d))
                    if s[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // d))
                    if s[t][j]:
                        dirty = True
            if dirty:
                pivot = smallest_pivot(t)
                continue
            offender = None
            for i in range(t + 1, rows):
                si = s[i]
                if any(x % d for x in si[t + 1 :]):
                    offender = i
                    break
            if offender is None:
                break
            # pull a non-divisible row alongside the pivot and keep reducing
            add_row(t, offender, 1)
            pivot = (t, t)
        t += 1

    rank = t
    factors = tuple(s[i][i] for i in range(rank))
    return SmithForm(u=u, s=s, v=v, u_inv=u_inv, rank=rank, invariant_factors=factors)


@dataclass(frozen=True)
class Element:
    """An element of a presented quotient group: torsion residues + free part."""

    torsion: tuple[int, ...]
    free: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.torsion) and not any(self.free)


class CokerPresentation:
    """The quotient of Z^m by the column space of an integer matrix.

    The group is presented as a direct sum of cyclic factors Z/d_i (moduli
    >= 2; factors equal to 1 are dropped) and a free part Z^f, together with
    an explicit projection from ambient integer vectors and a deterministic
    section (``lift``) going the other way.
    """

    def __init__(
        self,
        ambient_dim: int,
        torsion_moduli: tuple[int, ...],
        free_rank: int,
        torsion_rows: tuple[int, ...],
        free_rows: tuple[int, ...],
        u: Matrix,
        u_inv: Matrix,
    ) -> None:
        self.ambient_dim = ambient_dim
        self.torsion_moduli = torsion_moduli
        self.free_rank = free_rank
        self._torsion_rows = torsion_rows
        self._free_rows = free_rows
        self._u = u
        self._u_inv = u_inv

    @property
    def projection(self) -> Matrix:
        """Rows mapping ambient vectors to (torsion residues, free coordinates)."""
        return [self._u[i][:] for i in self._torsion_rows] + [
            self._u[i][:] for i in self._free_rows
        ]

    def group_invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion_moduli

    def project(self, x: list[int]) -> Element:
        if len(x) != self.ambient_dim:
            raise ValueError(
                f"ambient vector of length {len(x)}, expected {self.ambient_dim}"
            )
        torsion = tuple(
            sum(self._u[i][j] * x[j] for j in range(self.ambient_dim)) % d
            for i, d in zip(self._torsion_rows, self.torsion_moduli)
        )
        free = tuple(
            sum(self._u[i][j] * x[j] for j in range(self.ambient_dim))
            for i in self._free_rows
        )
        return Element(torsion=torsion, free=free)

    def lift(self, e: Element) -> list[int]:
        """A deterministic ambient preimage of ``e`` (least nonnegative residues)."""
        self._check(e)
        y = [0] * self.ambient_dim
        for i, r in zip(self._torsion_rows, e.torsion):
            y[i] = r
        for i, val in zip(self._free_rows, e.free):
            y[i] = val
        return mat_vec(self._u_inv, y)

    def zero(self) -> Element:
        return Element(torsion=(0,) * len(self.torsion_moduli), free=(0,) * self.free_rank)

    def add(self, a: Element, b: Element) -> Element:
        self._check(a)
        self._check(b)
        torsion = tuple(
            (x + y) % d for x, y, d in zip(a.torsion, b.torsion, self.torsion_moduli)
        )
        return Element(torsion=torsion, free=tuple(x + y for x, y in zip(a.free, b.free)))

    def negate(self, a: Element) -> Element:
        self._check(a)
        torsion = tuple((-x) % d for x, d in zip(a.torsion, self.torsion_moduli))
        return Element(torsion=torsion, free=tuple(-x for x in a.free))

    def subtract(self, a: Element, b: Element) -> Element:
        return self.add(a, self.negate(b))

    def scale(self, k: int, a: Element) -> Element:
        self._check(a)
        torsion = tuple((k * x) % d for x, d in zip(a.torsion, self.torsion_moduli))
        return Element(torsion=torsion, free=tuple(k * x for x in a.free))

    def element_order(self, a: Element) -> int | None:
        """Order of ``a`` in the group, or None if infinite."""
        self._check(a)
        if any(a.free):
            return None
        order = 1
        for r, d in zip(a.torsion, self.torsion_moduli):
            if r:
                order = order * (d // gcd(d, r)) // gcd(order, d // gcd(d, r))
        return order

    def _check(self, e: Element) -> None:
        if len(e.torsion) != len(self.torsion_moduli) or len(e.free) != self.free_rank:
            raise ValueError("element does not match this presentation")


def cokernel(a: Matrix) -> CokerPresentation:
    """Present Z^m / im(a) where ``a`` maps Z^n -> Z^m by columns."""
    rows, _cols = matrix_dims(a)
    snf = smith_normal_form(a)
    u = [r[:] for r in snf.u]
    u_inv = [r[:] for r in snf.u_inv]
    torsion_rows = tuple(i for i in range(snf.rank) if snf.s[i][i] >= 2)
    moduli = tuple(snf.s[i][i] for i in torsion_rows)
    free_rows = tuple(range(snf.rank, rows))
    # orient free coordinates so the leading coefficient of each row is positive
    for i in free_rows:
        lead = next((x for x in u[i] if x), 0)
        if lead < 0:
            u[i] = [-x for x in u[i]]
            for r in u_inv:
                r[i] = -r[i]
    return CokerPresentation(
        ambient_dim=rows,
        torsion_moduli=moduli,
        free_rank=rows - snf.rank,
        torsion_rows=torsion_rows,
        free_rows=free_rows,
        u=u,
        u_inv=u_inv,
    )


def solve_diophantine(a: Matrix, b: list[int]) -> list[int] | None:
    """Solve a @ x == b over the integers, or return None when unsolvable."""
    rows, cols = matrix_dims(a)
    if len(b) != rows:
        raise ValueError("right-hand side length does not match the matrix")
    snf = smith_normal_form(a)
    c = mat_vec(snf.u, b)
    y = [0] * cols
    for i in range(rows):
        if i < snf.rank:
            d = snf.s[i][i]
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    x = mat_vec(snf.v, y)
    assert mat_vec(a, x) == list(b)
    return x
