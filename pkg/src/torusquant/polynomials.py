"""Sparse multivariate polynomials used as base coefficients.

Coefficients may be any Python numbers: complex floats for numeric work,
``fractions.Fraction`` or :class:`QQi` (Gaussian rationals) when a result
has to be exact.  Zero coefficients are never stored.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Callable, Iterable, Mapping

import numpy as np

__all__ = ["QQi", "PiPoly", "BasePolynomial"]


class QQi:
    """Gaussian rational a + b*i with exact Fraction parts.

    Supports mixed arithmetic with int and Fraction.  Used where tests
    demand symbolic equality (curvature coefficients, gauge exponents,
    holomorphic symplectic forms).
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QQi):
            return other
        if isinstance(other, (int, Fraction)):
            return QQi(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) - other
            return NotImplemented
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return other - complex(self)
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        return QQi(self.re * o.re - self.im * o.im,
                   self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero QQi")
        return QQi((self.re * o.re + self.im * o.im) / d,
                   (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"


class PiPoly:
    """Exact number of the form sum_p c_p * pi^p with Gaussian-rational c_p.

    Poisson brackets and Dolbeault operators scale modes by rational
    multiples of pi; tracking the pi-power lets nested applications cancel
    symbolically (Jacobi identity, dbar^2 = 0) instead of to roundoff.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        for p, c in (terms or {}).items():
            if not isinstance(c, QQi):
                c = QQi(c)
            if c:
                out[int(p)] = c
        self.terms = out

    @staticmethod
    def _coerce(other):
        if isinstance(other, PiPoly):
            return other
        if isinstance(other, (int, Fraction, QQi)):
            return PiPoly({0: QQi(other) if not isinstance(other, QQi) else other})
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        terms = dict(self.terms)
        for p, c in o.terms.items():
            terms[p] = terms.get(p, QQi()) + c
        return PiPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return PiPoly({p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) - other
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return other - complex(self)
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        terms = {}
        for p, c in self.terms.items():
            for q, d in o.terms.items():
                terms[p + q] = terms.get(p + q, QQi()) + c * d
        return PiPoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            return PiPoly({p: c / other for p, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if not self.terms:
            return hash(0)
        if set(self.terms) == {0}:
            return hash(self.terms[0])
        return hash(tuple(sorted((p, c.re, c.im) for p, c in self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __complex__(self):
        return sum((complex(c) * float(np.pi) ** p
                    for p, c in self.terms.items()), 0j)

    def __repr__(self):
        return f"PiPoly({self.terms!r})"


def _is_zero(c) -> bool:
    if isinstance(c, (QQi, PiPoly)):
        return not c
    return c == 0


class BasePolynomial:
    """Polynomial in ``nvars`` variables stored as exponent -> coefficient.

    Exponents are tuples of nonnegative ints of length ``nvars``.
    """

    __slots__ = ("nvars", "coeffs")

    def __init__(self, nvars: int, coeffs: Mapping[tuple, Number] | None = None):
        self.nvars = int(nvars)
        self.coeffs = {}
        if coeffs:
            for exp, c in coeffs.items():
                if _is_zero(c):
                    continue
                exp = tuple(int(e) for e in exp)
                if len(exp) != self.nvars or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent {exp} for nvars={self.nvars}")
                self.coeffs[exp] = c

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "BasePolynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "BasePolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int, c=1) -> "BasePolynomial":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): c})

    # ---- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(sum(e) for e in self.coeffs)

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def __eq__(self, other):
        if not isinstance(other, BasePolynomial):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.coeffs.items())))

    # ---- ring operations ------------------------------------------------

    def _check(self, other: "BasePolynomial"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if isinstance(other, BasePolynomial):
            self._check(other)
            out = dict(self.coeffs)
            for exp, c in other.coeffs.items():
                s = out.get(exp, 0) + c
                if _is_zero(s):
                    out.pop(exp, None)
                else:
                    out[exp] = s
            return BasePolynomial(self.nvars, out)
        return self + BasePolynomial.constant(self.nvars, other)

    __radd__ = __add__

    def __neg__(self):
        return BasePolynomial(self.nvars, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, BasePolynomial):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BasePolynomial):
            self._check(other)
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    exp = tuple(a + b for a, b in zip(e1, e2))
                    s = out.get(exp, 0) + c1 * c2
                    if _is_zero(s):
                        out.pop(exp, None)
                    else:
                        out[exp] = s
            return BasePolynomial(self.nvars, out)
        if _is_zero(other):
            return BasePolynomial.zero(self.nvars)
        return BasePolynomial(self.nvars, {e: c * other for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    # ---- calculus -------------------------------------------------------

    def diff(self, i: int) -> "BasePolynomial":
        out = {}
        for exp, c in self.coeffs.items():
            if exp[i] == 0:
                continue
            nexp = list(exp)
            nexp[i] -= 1
            out[tuple(nexp)] = c * exp[i]
        return BasePolynomial(self.nvars, out)

    def integrate_radial(self) -> "BasePolynomial":
        """Map each monomial m to m / (deg(m) + 1).

        This is the building block of the radial homotopy primitive of a
        closed 1-form: if w = sum_a c_a dx_a is closed then
        phi(x) = sum_a x_a * (c_a.integrate_radial()) satisfies d phi = w
        and phi(0) = 0.
        """
        out = {}
        for exp, c in self.coeffs.items():
            d = sum(exp)
            out[exp] = c * Fraction(1, d + 1) if not isinstance(c, (float, complex)) \
                else c / (d + 1)
        return BasePolynomial(self.nvars, out)

    # ---- substitution and evaluation -------------------------------------

    def compose_affine(self, mat, offset) -> "BasePolynomial":
        """Substitute x_i -> sum_j mat[i][j] * x'_j + offset[i].

        mat is nvars x nvars, offset length nvars; entries may be exact.
        """
        n = self.nvars
        lin = []
        for i in range(n):
            p = BasePolynomial.constant(n, offset[i]) if not _is_zero(offset[i]) \
                else BasePolynomial.zero(n)
            for j in range(n):
                if not _is_zero(mat[i][j]):
                    p = p + BasePolynomial.variable(n, j, mat[i][j])
            lin.append(p)
        out = BasePolynomial.zero(n)
        for exp, c in self.coeffs.items():
            term = BasePolynomial.constant(n, c)
            for i, e in enumerate(exp):
                for _ in range(e):
                    term = term * lin[i]
            out = out + term
        return out

    def eval(self, point) -> complex:
        """Evaluate at a single point (sequence of length nvars)."""
        total = 0
        for exp, c in self.coeffs.items():
            v = complex(c) if isinstance(c, (QQi, PiPoly, Fraction)) else c
            for i, e in enumerate(exp):
                if e:
                    v = v * point[i] ** e
            total += v
        return complex(total)

    def eval_grid(self, coords) -> np.ndarray:
        """Vectorized evaluation; coords is a sequence of nvars broadcastable arrays."""
        coords = [np.asarray(c) for c in coords]
        shape = np.broadcast_shapes(*(c.shape for c in coords)) if coords else ()
        total = np.zeros(shape, dtype=complex)
        for exp, c in self.coeffs.items():
            v = complex(c)
            term = np.full(shape, v, dtype=complex)
            for i, e in enumerate(exp):
                if e:
                    term = term * coords[i] ** e
            total += term
        return total

    def map_coeffs(self, fn: Callable) -> "BasePolynomial":
        return BasePolynomial(self.nvars, {e: fn(c) for e, c in self.coeffs.items()})

    def to_complex(self) -> "BasePolynomial":
        return self.map_coeffs(complex)

    def extend_vars(self, nvars: int, positions: Iterable[int]) -> "BasePolynomial":
        """Embed into a polynomial ring with nvars variables.

        positions[i] gives the new index of old variable i.
        """
        positions = list(positions)
        out = {}
        for exp, c in self.coeffs.items():
            nexp = [0] * nvars
            for i, e in enumerate(exp):
                nexp[positions[i]] = e
            out[tuple(nexp)] = c
        return BasePolynomial(nvars, out)

    def __repr__(self):
        if not self.coeffs:
            return "BasePolynomial(0)"
        parts = []
        for exp in sorted(self.coeffs):
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exp) if e) or "1"
            parts.append(f"({self.coeffs[exp]})*{mono}")
        return " + ".join(parts)
