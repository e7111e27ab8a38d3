"""Even supermatrices over the exterior algebra and their superdeterminant.

An even supermatrix packs four blocks ``[[A, C], [D, B]]`` where A (m x m)
and B (n x n) have even entries and C (m x n), D (n x m) odd entries.
The row-vector convention is used throughout: a linear change of
coordinates acts as (x, theta) = (y, omega) M, and Jacobians are laid out
with rows indexed by input variables and columns by output components,
so every formula in this package transcribes without transposes.

Entries are generic: anything supporting +, -, *, ``parity()``,
``inverse_even()``, ``is_zero()`` and ``one_like()`` works, which lets the
same routines run on constants (GrassmannElement) and on supersmooth
functions (matrix-valued functions such as Jacobians).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .algebra import DEFAULT_LEVEL, GrassmannElement, Parity
from .errors import BodySingularError, DimensionError, ExactModeError, ParityError, ZeroBodyError

Matrix = tuple  # tuple of tuples of ring entries


def _as_matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def _mat_shape(x: Matrix) -> tuple[int, int]:
    return (len(x), len(x[0]) if x else 0)


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    """Matrix product keeping entry order (left factor's entries left)."""
    rx, cx = _mat_shape(x)
    ry, cy = _mat_shape(y)
    if cx != ry:
        raise DimensionError(f"inner dimensions differ: {cx} vs {ry}")
    return tuple(
        tuple(_dot(x[i], [y[k][j] for k in range(ry)]) for j in range(cy)) for i in range(rx)
    )


def _dot(row, col):
    acc = None
    for a, b in zip(row, col):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


def mat_sub(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(rx, ry)) for rx, ry in zip(x, y))


def mat_scale(x: Matrix, s) -> Matrix:
    return tuple(tuple(s * a for a in row) for row in x)


def _is_zero_matrix(x: Matrix) -> bool:
    return all(e.is_zero() for row in x for e in row)


def even_det(rows) -> object:
    """Determinant of a square matrix of even (hence commuting) entries.

    Leibniz expansion for sizes up to 5; Gaussian elimination with
    body-magnitude pivoting above that (constant entries only, since
    elimination divides by pivots).
    """
    e = _as_matrix(rows)
    r, c = _mat_shape(e)
    if r != c:
        raise DimensionError(f"determinant needs a square matrix, got {r}x{c}")
    for row in e:
        for entry in row:
            if entry.parity() is not Parity.EVEN:
                raise ParityError("determinant entries must be even")
    if r == 0:
        raise DimensionError("empty matrix has no determinant here; handle m=0 upstream")
    if r <= 5 or not isinstance(e[0][0], GrassmannElement):
        return _det_leibniz(e)
    return _det_eliminate(e)


def _det_leibniz(e: Matrix):
    r = len(e)
    acc = None
    for perm in permutations(range(r)):
        sign = _perm_sign(perm)
        term = e[0][perm[0]]
        for i in range(1, r):
            term = term * e[i][perm[i]]
        if sign < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _det_eliminate(e: Matrix):
    """Elimination over the commutative even subring; pivots chosen by
    largest body magnitude so body-invertible matrices always pivot."""
    n = len(e)
    rows = [list(r) for r in e]
    det = rows[0][0].one_like()
    sign = 1
    for k in range(n):
        pivot_row = max(range(k, n), key=lambda i: abs(rows[i][k].body))
        if rows[pivot_row][k].body == 0:
            raise ZeroBodyError("elimination pivot has zero body; matrix body-singular")
        if pivot_row != k:
            rows[k], rows[pivot_row] = rows[pivot_row], rows[k]
            sign = -sign
        pivot = rows[k][k]
        det = det * pivot
        pinv = pivot.inverse_even()
        for i in range(k + 1, n):
            factor = rows[i][k] * pinv
            for j in range(k, n):
                rows[i][j] = rows[i][j] - factor * rows[k][j]
    return det if sign > 0 else -det


def even_matrix_inverse(rows) -> Matrix:
    """Inverse of a square matrix of even entries via adjugate / det."""
    e = _as_matrix(rows)
    r, _ = _mat_shape(e)
    det = even_det(e)
    det_inv = det.inverse_even()
    if r == 1:
        return ((det_inv,),)
    adj = []
    for i in range(r):
        row = []
        for j in range(r):
            minor = tuple(
                tuple(e[p][q] for q in range(r) if q != i) for p in range(r) if p != j
            )
            cof = _det_leibniz(minor)
            if (i + j) & 1:
                cof = -cof
            row.append(cof * det_inv)
        adj.append(tuple(row))
    return tuple(adj)


def _check_block_parity(rows: Matrix, want: Parity, name: str) -> None:
    for row in rows:
        for entry in row:
            if entry.is_zero():
                continue
            if entry.parity() is not want:
                raise ParityError(f"block {name} requires {want.name} entries")


@dataclass(frozen=True)
class EvenSuperMatrix:
    """Block matrix [[A, C], [D, B]] with parity-constrained entries."""

    a: Matrix
    c: Matrix
    d: Matrix
    b: Matrix

    def __post_init__(self):
        a, c, d, b = map(_as_matrix, (self.a, self.c, self.d, self.b))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)
        m, n = self.dims
        if _mat_shape(a) != (m, m) or _mat_shape(b) != (n, n):
            raise DimensionError("diagonal blocks must be square")
        if (m and n) and (_mat_shape(c) != (m, n) or _mat_shape(d) != (n, m)):
            raise DimensionError("off-diagonal blocks have wrong shape")
        _check_block_parity(a, Parity.EVEN, "A")
        _check_block_parity(b, Parity.EVEN, "B")
        _check_block_parity(c, Parity.ODD, "C")
        _check_block_parity(d, Parity.ODD, "D")

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.a), len(self.b))

    @classmethod
    def from_rows(cls, rows, m: int, n: int) -> "EvenSuperMatrix":
        """Split a flat (m+n) x (m+n) array of entries into blocks."""
        e = _as_matrix(rows)
        if _mat_shape(e) != (m + n, m + n):
            raise DimensionError("flat matrix has wrong shape")
        return cls(
            a=tuple(r[:m] for r in e[:m]),
            c=tuple(r[m:] for r in e[:m]),
            d=tuple(r[:m] for r in e[m:]),
            b=tuple(r[m:] for r in e[m:]),
        )

    @classmethod
    def identity(cls, m: int, n: int, level: int = DEFAULT_LEVEL) -> "EvenSuperMatrix":
        one = GrassmannElement.scalar(1, level)
        return cls.identity_like(m, n, one)

    @classmethod
    def identity_like(cls, m: int, n: int, one) -> "EvenSuperMatrix":
        zero = one.zero_like()
        return cls(
            a=tuple(tuple(one if i == j else zero for j in range(m)) for i in range(m)),
            c=tuple(tuple(zero for _ in range(n)) for _ in range(m)),
            d=tuple(tuple(zero for _ in range(m)) for _ in range(n)),
            b=tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)),
        )

    def rows(self) -> Matrix:
        """Flat (m+n) x (m+n) view, row order: even inputs then odd."""
        top = tuple(ra + rc for ra, rc in zip(self.a, self.c))
        bottom = tuple(rd + rb for rd, rb in zip(self.d, self.b))
        return top + bottom

    def map_entries(self, fn) -> "EvenSuperMatrix":
        apply = lambda block: tuple(tuple(fn(entry) for entry in row) for row in block)
        return EvenSuperMatrix(apply(self.a), apply(self.c), apply(self.d), apply(self.b))

    def __matmul__(self, other: "EvenSuperMatrix") -> "EvenSuperMatrix":
        return sm_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, EvenSuperMatrix):
            return NotImplemented
        return (self.a, self.c, self.d, self.b) == (other.a, other.c, other.d, other.b)


def sm_mul(p: EvenSuperMatrix, q: EvenSuperMatrix) -> EvenSuperMatrix:
    """Supermatrix product with Grassmann entry arithmetic."""
    mp, np_ = p.dims
    mq, nq = q.dims
    if (mp, np_) != (mq, nq):
        raise DimensionError(f"dimension mismatch: {p.dims} vs {q.dims}")
    flat = mat_mul(p.rows(), q.rows())
    return EvenSuperMatrix.from_rows(flat, mp, np_)


def _schur_value(diag: Matrix, left: Matrix, mid: Matrix, right: Matrix):
    """diag - left . mid^-1 . right, skipping the correction if a factor
    is zero (which also dodges needless inversions of mid)."""
    if _is_zero_matrix(left) or _is_zero_matrix(right):
        return diag
    mid_inv = even_matrix_inverse(mid)
    return mat_sub(diag, mat_mul(mat_mul(left, mid_inv), right))


def _sdet_via_a(m: EvenSuperMatrix):
    det_a = even_det(m.a)
    schur = _schur_value(m.b, m.d, m.a, m.c)
    return det_a * even_det(schur).inverse_even()


def _sdet_via_b(m: EvenSuperMatrix):
    det_b = even_det(m.b)
    schur = _schur_value(m.a, m.c, m.b, m.d)
    return even_det(schur) * det_b.inverse_even()


def sdet(m: EvenSuperMatrix):
    """Superdeterminant by both block formulas.

    Uses det(A) . det(B - D A^-1 C)^-1 when the A block is
    body-invertible and det(A - C B^-1 D) . det(B)^-1 when B is; when
    both apply the two values are asserted identical.
    """
    mm, nn = m.dims
    if nn == 0:
        return even_det(m.a)
    if mm == 0:
        return even_det(m.b).inverse_even()
    val_a = val_b = None
    err_a = err_b = None
    try:
        val_a = _sdet_via_a(m)
    except (ZeroBodyError, ExactModeError) as e:
        err_a = e
    try:
        val_b = _sdet_via_b(m)
    except (ZeroBodyError, ExactModeError) as e:
        err_b = e
    if val_a is None and val_b is None:
        if isinstance(err_a, ExactModeError) and isinstance(err_b, ExactModeError):
            raise ExactModeError(
                "superdeterminant is not polynomial here (both block "
                "formulas invert nonconstant scalar parts); evaluate "
                "pointwise via quadrature mode"
            )
        raise BodySingularError(
            f"neither diagonal block is body-invertible (A: {err_a}; B: {err_b})"
        )
    if val_a is not None and val_b is not None and val_a != val_b:
        # exact scalars must agree identically; float coefficients may
        # differ by roundoff between the two routes
        if not _roundoff_only(val_a, val_b):
            raise AssertionError("superdeterminant block formulas disagree; parity data corrupt")
    return val_a if val_a is not None else val_b


def _roundoff_only(val_a, val_b) -> bool:
    coeffs_a = list(val_a._terms.values())
    coeffs_b = list(val_b._terms.values())
    if not any(isinstance(c, float) for c in coeffs_a + coeffs_b):
        return False
    diff = val_a - val_b
    mags = [abs(float(c)) for c in coeffs_a + coeffs_b]
    scale = max(mags, default=1.0) or 1.0
    worst = max((abs(float(c)) for c in diff._terms.values()), default=0.0)
    return worst <= 1e-9 * scale


def sm_inverse(m: EvenSuperMatrix) -> EvenSuperMatrix:
    """Inverse supermatrix via block Schur complements."""
    mm, nn = m.dims
    if nn == 0:
        return EvenSuperMatrix(even_matrix_inverse(m.a), m.c, m.d, m.b)
    if mm == 0:
        return EvenSuperMatrix(m.a, m.c, m.d, even_matrix_inverse(m.b))
    a_inv = even_matrix_inverse(m.a)
    b_inv = even_matrix_inverse(m.b)
    schur_a = _schur_value(m.a, m.c, m.b, m.d)  # A - C B^-1 D
    schur_b = _schur_value(m.b, m.d, m.a, m.c)  # B - D A^-1 C
    sa_inv = even_matrix_inverse(schur_a)
    sb_inv = even_matrix_inverse(schur_b)
    new_c = mat_scale(mat_mul(mat_mul(a_inv, m.c), sb_inv), -1)
    new_d = mat_scale(mat_mul(mat_mul(b_inv, m.d), sa_inv), -1)
    return EvenSuperMatrix(sa_inv, new_c, new_d, sb_inv)


__all__ = [
    "EvenSuperMatrix",
    "even_det",
    "even_matrix_inverse",
    "mat_mul",
    "mat_scale",
    "mat_sub",
    "sdet",
    "sm_inverse",
    "sm_mul",
]
