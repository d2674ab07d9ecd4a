"""Integer skew forms, semi-characters, and the twisted symplectic action.

Everything lattice-side is exact: integer matrices use Python ints,
phases are tracked as rational numbers of full turns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateDenominator, NotSkew, SingularForm

__all__ = [
    "IntSkewForm",
    "SemiCharacter",
    "SiegelPoint",
    "TwistedSymplectic",
    "skew_smith_normal_form",
    "standard_form",
    "siegel_action",
    "frame_transport_check",
    "semicharacter_eval",
    "int_det",
    "int_inverse",
    "random_twisted_symplectic",
    "random_siegel_point",
]


# ---------------------------------------------------------------------------
# exact integer linear algebra helpers
# ---------------------------------------------------------------------------

def int_det(rows) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    m = [[int(v) for v in row] for row in rows]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def int_inverse(rows):
    """Exact inverse of an integer matrix, returned with Fraction entries."""
    n = len(rows)
    aug = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def _mat_t(a):
    return [list(col) for col in zip(*a)]


def standard_form(hvec):
    """The normal-form skew matrix [[0, -H], [H, 0]] for H = diag(hvec)."""
    n = len(hvec)
    rows = [[0] * (2 * n) for _ in range(2 * n)]
    for i, h in enumerate(hvec):
        rows[i][n + i] = -int(h)
        rows[n + i][i] = int(h)
    return rows


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntSkewForm:
    """Nondegenerate integer skew-symmetric form on a rank-2n lattice."""

    rows: tuple

    def __init__(self, rows):
        rows = tuple(tuple(int(v) for v in row) for row in rows)
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise ValueError("matrix must be square")
        for i in range(dim):
            for j in range(dim):
                if rows[i][j] != -rows[j][i]:
                    raise NotSkew(f"entry ({i},{j}) breaks skew symmetry")
        if dim % 2 == 1 or int_det(rows) == 0:
            raise SingularForm("skew form must be nondegenerate")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows) // 2

    def apply(self, lam, mu) -> int:
        """The pairing lam . M mu."""
        return sum(lam[i] * self.rows[i][j] * mu[j]
                   for i in range(self.dim) for j in range(self.dim))

    def to_json(self) -> dict:
        return {"n": self.dim, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data) -> "IntSkewForm":
        return cls(data["rows"])


class SiegelPoint:
    """Point of the Siegel upper half space: Omega symmetric, Im Omega > 0."""

    SYM_TOL = 1e-12
    POS_TOL = 1e-12

    def __init__(self, omega):
        om = np.array(omega, dtype=complex)
        if om.ndim == 0:
            om = om.reshape(1, 1)
        if om.ndim != 2 or om.shape[0] != om.shape[1]:
            raise ValueError("Omega must be square")
        if np.max(np.abs(om - om.T)) > self.SYM_TOL * max(1.0, np.max(np.abs(om))):
            raise ValueError("Omega must be symmetric")
        eigs = np.linalg.eigvalsh(om.imag)
        if eigs.min() <= self.POS_TOL:
            raise ValueError("Im Omega must be positive definite")
        self.omega = 0.5 * (om + om.T)

    @property
    def n(self) -> int:
        return self.omega.shape[0]

    def to_json(self) -> dict:
        return {"re": self.omega.real.tolist(), "im": self.omega.imag.tolist()}

    @classmethod
    def from_json(cls, data) -> "SiegelPoint":
        return cls(np.array(data["re"]) + 1j * np.array(data["im"]))


class TwistedSymplectic:
    """Integer matrix a with a H a^T = H for the normal form H of hvec."""

    def __init__(self, hvec, rows):
        self.hvec = tuple(int(h) for h in hvec)
        self.rows = tuple(tuple(int(v) for v in row) for row in rows)
        n2 = 2 * len(self.hvec)
        if len(self.rows) != n2 or any(len(r) != n2 for r in self.rows):
            raise ValueError("matrix size must match 2n")
        h = standard_form(self.hvec)
        lhs = _mat_mul(_mat_mul([list(r) for r in self.rows], h), _mat_t(self.rows))
        if lhs != h:
            raise ValueError("matrix does not preserve the twisted symplectic form")
        if abs(int_det(self.rows)) != 1:
            raise ValueError("matrix must be unimodular")

    @property
    def n(self) -> int:
        return len(self.hvec)

    @classmethod
    def identity(cls, hvec) -> "TwistedSymplectic":
        n2 = 2 * len(hvec)
        return cls(hvec, [[int(i == j) for j in range(n2)] for i in range(n2)])

    def __matmul__(self, other: "TwistedSymplectic") -> "TwistedSymplectic":
        if self.hvec != other.hvec:
            raise ValueError("mismatched invariant factors")
        return TwistedSymplectic(self.hvec, _mat_mul(self.rows, other.rows))

    def inverse(self) -> "TwistedSymplectic":
        inv = int_inverse(self.rows)
        return TwistedSymplectic(self.hvec, [[int(v) for v in row] for row in inv])

    def __eq__(self, other):
        return isinstance(other, TwistedSymplectic) and \
            self.hvec == other.hvec and self.rows == other.rows

    def to_json(self) -> dict:
        return {"n": 2 * self.n, "rows": [list(r) for r in self.rows],
                "h": list(self.hvec)}

    @classmethod
    def from_json(cls, data) -> "TwistedSymplectic":
        return cls(data["h"], data["rows"])


# ---------------------------------------------------------------------------
# skew Smith normal form
# ---------------------------------------------------------------------------

def _swap(m, p, i, j):
    m[i], m[j] = m[j], m[i]
    for row in m:
        row[i], row[j] = row[j], row[i]
    p[i], p[j] = p[j], p[i]


def _row_op(m, p, dst, src, q):
    """Congruence op: row_dst += q*row_src together with col_dst += q*col_src."""
    if q == 0:
        return
    m[dst] = [a + q * b for a, b in zip(m[dst], m[src])]
    for row in m:
        row[dst] += q * row[src]
    p[dst] = [a + q * b for a, b in zip(p[dst], p[src])]


def skew_smith_normal_form(form: IntSkewForm):
    """Invariant factors and a congruence witness for an integer skew form.

    Returns (hvec, A) with A * form * A^T equal to [[0, -H], [H, 0]],
    H = diag(hvec), h_1 | h_2 | ... | h_n, and |det A| = 1.  The witness is
    not canonical; callers must only rely on the stated postconditions.
    """
    m = [list(row) for row in form.rows]
    dim = form.dim
    p = [[int(i == j) for j in range(dim)] for i in range(dim)]

    i = 0
    while i < dim:
        # pivot: smallest nonzero magnitude in the trailing block
        best = None
        for r in range(i, dim):
            for c in range(i, dim):
                v = abs(m[r][c])
                if v and (best is None or v < best[0]):
                    best = (v, r, c)
        if best is None:
            raise SingularForm("form is degenerate")
        _, r, c = best
        if r != i:
            _swap(m, p, i, r)
            if c == i:
                c = r
        if c != i + 1:
            _swap(m, p, i + 1, c)
        if m[i][i + 1] < 0:
            _swap(m, p, i, i + 1)

        while True:
            d = m[i][i + 1]
            # clear row i beyond the pivot pair; skew symmetry clears the rest
            dirty = False
            for c2 in range(i + 2, dim):
                q = m[i][c2] // d
                _row_op(m, p, c2, i + 1, -q)
                if m[i][c2] != 0:
                    dirty = True
            for r2 in range(i + 2, dim):
                q = m[r2][i + 1] // d
                _row_op(m, p, r2, i, -q)
                if m[r2][i + 1] != 0:
                    dirty = True
            if dirty:
                # a remainder smaller than d showed up; reselect the pivot
                best = None
                for r2 in range(i, dim):
                    for c2 in range(i, dim):
                        v = abs(m[r2][c2])
                        if v and (best is None or v < best[0]):
                            best = (v, r2, c2)
                _, r, c = best
                if r != i:
                    _swap(m, p, i, r)
                    if c == i:
                        c = r
                if c != i + 1:
                    _swap(m, p, i + 1, c)
                if m[i][i + 1] < 0:
                    _swap(m, p, i, i + 1)
                continue
            # pivot must divide the whole trailing block for the divisor chain
            bad = next(((r2, c2) for r2 in range(i + 2, dim)
                        for c2 in range(i + 2, dim) if m[r2][c2] % d), None)
            if bad is None:
                break
            _row_op(m, p, i, bad[0], 1)
        i += 2

    hvec = tuple(m[2 * j][2 * j + 1] for j in range(dim // 2))
    # reorder pair basis (u_j, v_j) -> (v_1..v_n, u_1..u_n)
    n = dim // 2
    a = [p[2 * j + 1] for j in range(n)] + [p[2 * j] for j in range(n)]

    target = standard_form(hvec)
    check = _mat_mul(_mat_mul(a, [list(r) for r in form.rows]), _mat_t(a))
    if check != target or abs(int_det(a)) != 1:
        raise AssertionError("internal reduction error")
    return hvec, [list(row) for row in a]


# ---------------------------------------------------------------------------
# semi-characters
# ---------------------------------------------------------------------------

def _strict_lower(rows):
    dim = len(rows)
    return [[rows[i][j] if i > j else 0 for j in range(dim)] for i in range(dim)]


def _cis_turns(t):
    """exp(2 pi i t) with exact values at quarter turns."""
    if isinstance(t, (int, Fraction)):
        tm = Fraction(t) % 1
        if tm.denominator == 1:
            return 1.0 + 0.0j
        if tm.denominator == 2:
            return -1.0 + 0.0j
        if tm.denominator == 4:
            return 1.0j if tm.numerator % 4 == 1 else -1.0j
        t = float(tm)
    return complex(np.exp(2j * np.pi * (t % 1.0)))


class SemiCharacter:
    """Quadratic character chi with chi(l+m) = (-1)^(l.Hm) chi(l) chi(m).

    Represented as chi(l) = (-1)^(l.Tl) exp(2 pi i gcheck.l) where T is the
    strict lower triangle of the form; for the normal form this reduces to
    the standard sign (-1)^(l2 . H l1).
    """

    def __init__(self, form: IntSkewForm, gcheck):
        self.form = form
        gc = tuple(Fraction(v) % 1 for v in gcheck)
        if len(gc) != form.dim:
            raise ValueError("gcheck length must match the form dimension")
        self.gcheck = gc
        self._tmat = _strict_lower(form.rows)

    def eval_turns(self, lam) -> Fraction:
        """Phase in full turns, reduced mod 1; exact."""
        lam = [int(v) for v in lam]
        quad = sum(lam[i] * self._tmat[i][j] * lam[j]
                   for i in range(self.form.dim) for j in range(self.form.dim))
        lin = sum(g * v for g, v in zip(self.gcheck, lam))
        return (Fraction(quad, 2) + lin) % 1

    def eval(self, lam) -> complex:
        return _cis_turns(self.eval_turns(lam))

    def transform(self, a_rows) -> "SemiCharacter":
        """The character chi'(l) = chi(a^T l) on the congruent form a M a^T."""
        a = [[int(v) for v in row] for row in a_rows]
        new_form = IntSkewForm(_mat_mul(_mat_mul(a, [list(r) for r in self.form.rows]),
                                        _mat_t(a)))
        m = _mat_mul(_mat_mul(a, self._tmat), _mat_t(a))
        tprime = _strict_lower(new_form.rows)
        gc_new = []
        at = _mat_t(a)
        for i in range(self.form.dim):
            lin = sum(self.gcheck[j] * at[j][i] for j in range(self.form.dim))
            gc_new.append(lin + Fraction(m[i][i] - tprime[i][i], 2))
        return SemiCharacter(new_form, gc_new)


def semicharacter_eval(chi: SemiCharacter, lam) -> complex:
    """Unit-modulus value of the semi-character at a lattice vector."""
    return chi.eval(lam)


# ---------------------------------------------------------------------------
# Siegel action and frame transport
# ---------------------------------------------------------------------------

def _embed(a: TwistedSymplectic):
    """Real symplectic matrix diag(H, I) a^-T diag(H^-1, I), exact Fractions.

    This is the unique scaling of a^-T that is standard-symplectic (it
    conjugates the preserved form H^-1 onto J) and reproduces the frame
    transport law; swapping the two diagonal factors breaks both whenever
    H is not scalar.
    """
    n = a.n
    ainv_t = _mat_t(int_inverse(a.rows))
    h = a.hvec
    emb = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(2 * n):
        for j in range(2 * n):
            v = Fraction(ainv_t[i][j])
            if i < n:
                v = v * h[i]
            if j < n:
                v = v / h[j]
            emb[i][j] = v
    return emb


def siegel_action(a: TwistedSymplectic, point: SiegelPoint) -> SiegelPoint:
    """Moebius action of a twisted symplectic matrix on the Siegel space."""
    n = a.n
    if point.n != n:
        raise ValueError("dimension mismatch")
    emb = np.array([[float(v) for v in row] for row in _embed(a)])
    om = point.omega
    num = emb[:n, :n] @ om + emb[:n, n:]
    den = emb[n:, :n] @ om + emb[n:, n:]
    if abs(np.linalg.det(den)) < 1e-12:
        raise DegenerateDenominator("Moebius denominator nearly singular")
    new = num @ np.linalg.inv(den)
    return SiegelPoint(0.5 * (new + new.T))


def frame_transport_check(a: TwistedSymplectic, point: SiegelPoint, y) -> float:
    """Residual of the holomorphic frame transport identity.

    For y' = a^-T y and Omega' = a . Omega the combination
    y^1 - H^-1 Omega y^2 transports by the inverse of
    C = A11^T - H^-1 Omega A12^T, where A11, A12 are the upper blocks of a.
    The transposes matter once n > 1; they follow from the cocycle identity
    for the fractional linear action of the embedded matrix.
    """
    n = a.n
    y = np.asarray(y, dtype=float).reshape(2 * n)
    hinv = np.diag([1.0 / h for h in a.hvec])
    om = point.omega
    om2 = siegel_action(a, point).omega

    ainv_t = np.array([[float(v) for v in row] for row in _mat_t(int_inverse(a.rows))])
    yp = ainv_t @ y

    arr = np.array(a.rows, dtype=float)
    block = arr[:n, :n].T - hinv @ om @ arr[:n, n:].T
    lhs = yp[:n] - hinv @ om2 @ yp[n:]
    rhs = np.linalg.solve(block, y[:n] - hinv @ om @ y[n:])
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# random elements for stress tests
# ---------------------------------------------------------------------------

def random_twisted_symplectic(hvec, rng, length: int = 6) -> TwistedSymplectic:
    """Random word in standard generators of the twisted symplectic group."""
    n = len(hvec)
    h = [int(v) for v in hvec]
    gens = []
    n2 = 2 * n

    def from_blocks(b11, b12, b21, b22):
        rows = [[0] * n2 for _ in range(n2)]
        for i in range(n):
            for j in range(n):
                rows[i][j] = b11[i][j]
                rows[i][n + j] = b12[i][j]
                rows[n + i][j] = b21[i][j]
                rows[n + i][n + j] = b22[i][j]
        return rows

    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    zero = [[0] * n for _ in range(n)]
    # the J-like generator
    gens.append(from_blocks(zero, [[-eye[i][j] for j in range(n)] for i in range(n)],
                            eye, zero))
    # shears [[I, S], [0, I]] with S*H symmetric
    for i in range(n):
        s = [[0] * n for _ in range(n)]
        s[i][i] = 1
        gens.append(from_blocks(eye, s, zero, eye))
        for j in range(i + 1, n):
            s = [[0] * n for _ in range(n)]
            s[i][j] = 1
            s[j][i] = h[j] // h[i]
            gens.append(from_blocks(eye, s, zero, eye))
    # diagonal-type generators [[P, 0], [0, H P^-T H^-1]]
    for i in range(n):
        p = [row[:] for row in eye]
        p[i][i] = -1
        q = [[h[r] * int_inverse(p)[c][r] * Fraction(1, h[c]) for c in range(n)]
             for r in range(n)]
        gens.append(from_blocks(p, zero, zero, [[int(v) for v in row] for row in q]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            p = [row[:] for row in eye]
            p[i][j] = 1
            pinv_t = _mat_t(int_inverse(p))
            q = [[Fraction(h[r]) * pinv_t[r][c] / h[c] for c in range(n)]
                 for r in range(n)]
            if all(v.denominator == 1 for row in q for v in row):
                gens.append(from_blocks(p, zero, zero,
                                        [[int(v) for v in row] for row in q]))

    out = TwistedSymplectic.identity(hvec)
    for _ in range(length):
        g = TwistedSymplectic(hvec, gens[int(rng.integers(len(gens)))])
        if rng.integers(2):
            g = g.inverse()
        out = out @ g
    return out


def random_siegel_point(n, rng, spread: float = 1.0) -> SiegelPoint:
    re = rng.normal(scale=spread, size=(n, n))
    re = 0.5 * (re + re.T)
    b = rng.normal(scale=spread, size=(n, n))
    im = b @ b.T + np.eye(n) * 0.3
    return SiegelPoint(re + 1j * im)
