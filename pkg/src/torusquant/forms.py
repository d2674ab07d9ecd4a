"""Exterior algebra of polynomial differential forms on chart coordinates.

A form of degree p on nvars coordinates is a finite sum
sum_I c_I(v) dv_{i_1} ^ ... ^ dv_{i_p} with BasePolynomial coefficients.
Wedge, exterior derivative, affine pullback and the radial primitive all
stay inside polynomial data, so identities can be asserted exactly.
"""

from __future__ import annotations

from .errors import NotClosed, NotExactOnDomain
from .polynomials import BasePolynomial, _is_zero

__all__ = ["PolyForm", "one_form", "differential", "primitive"]


def _sorted_sign(idx):
    """Sort an index tuple, returning (tuple, sign); sign 0 on a repeat."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return tuple(idx), 0
    return tuple(idx), sign


def _as_poly(nvars, c):
    if isinstance(c, BasePolynomial):
        if c.nvars != nvars:
            raise ValueError("coefficient has a mismatched variable count")
        return c
    return BasePolynomial.constant(nvars, c)


class PolyForm:
    """Polynomial differential form of fixed degree.

    terms maps strictly increasing index tuples to polynomial coefficients;
    the constructor sorts arbitrary tuples with the matching sign and drops
    zero terms, so structurally equal forms compare equal.
    """

    def __init__(self, nvars, degree, terms=None):
        self.nvars = int(nvars)
        self.degree = int(degree)
        if self.degree < 0 or self.degree > self.nvars:
            raise ValueError("form degree out of range")
        norm = {}
        for idx, c in (terms or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree:
                raise ValueError("index tuple length must equal the degree")
            if any(i < 0 or i >= self.nvars for i in idx):
                raise ValueError("coordinate index out of range")
            key, sign = _sorted_sign(idx)
            if sign == 0:
                continue
            c = _as_poly(self.nvars, c)
            if sign < 0:
                c = c * -1
            norm[key] = norm[key] + c if key in norm else c
        self.terms = {k: v for k, v in norm.items() if not v.is_zero()}

    # ---- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, nvars, degree) -> "PolyForm":
        return cls(nvars, degree)

    @classmethod
    def coordinate(cls, nvars, i) -> "PolyForm":
        """The basis 1-form dv_i."""
        return cls(nvars, 1, {(i,): BasePolynomial.constant(nvars, 1)})

    @classmethod
    def from_function(cls, poly: BasePolynomial) -> "PolyForm":
        return cls(poly.nvars, 0, {(): poly})

    # ---- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def components(self):
        """Coefficient list of a 1-form, indexed by coordinate."""
        if self.degree != 1:
            raise ValueError("components are defined for 1-forms only")
        zero = BasePolynomial.zero(self.nvars)
        return [self.terms.get((i,), zero) for i in range(self.nvars)]

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.nvars == other.nvars and self.degree == other.degree
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.terms)))

    # ---- linear structure --------------------------------------------------

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if self.nvars != other.nvars or self.degree != other.degree:
            raise ValueError("can only add forms of equal degree and variables")
        out = dict(self.terms)
        for idx, c in other.terms.items():
            out[idx] = out[idx] + c if idx in out else c
        return PolyForm(self.nvars, self.degree, out)

    def __neg__(self) -> "PolyForm":
        return self * -1

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def __mul__(self, c) -> "PolyForm":
        c = _as_poly(self.nvars, c)
        return PolyForm(self.nvars, self.degree,
                        {idx: p * c for idx, p in self.terms.items()})

    __rmul__ = __mul__

    # ---- exterior calculus ---------------------------------------------------

    def wedge(self, other: "PolyForm") -> "PolyForm":
        if self.nvars != other.nvars:
            raise ValueError("wedge requires matching variable counts")
        out = {}
        for ia, ca in self.terms.items():
            for ib, cb in other.terms.items():
                key, sign = _sorted_sign(ia + ib)
                if sign == 0:
                    continue
                c = ca * cb
                if sign < 0:
                    c = c * -1
                out[key] = out[key] + c if key in out else c
        return PolyForm(self.nvars, self.degree + other.degree, out)

    def d(self) -> "PolyForm":
        out = {}
        for idx, c in self.terms.items():
            for j in range(self.nvars):
                dc = c.diff(j)
                if dc.is_zero():
                    continue
                key, sign = _sorted_sign((j,) + idx)
                if sign == 0:
                    continue
                if sign < 0:
                    dc = dc * -1
                out[key] = out[key] + dc if key in out else dc
        return PolyForm(self.nvars, self.degree + 1, out)

    def pullback(self, mat, offset=None) -> "PolyForm":
        """Express the form in w-coordinates after substituting v = mat w + offset."""
        nv = self.nvars
        mat = [list(row) for row in mat]
        if len(mat) != nv or any(len(row) != nv for row in mat):
            raise ValueError("pullback matrix must be square in the variables")
        offset = [0] * nv if offset is None else list(offset)
        out = {}
        for idx, c in self.terms.items():
            partial = {(): c.compose_affine(mat, offset)}
            for i in idx:
                grown = {}
                for key, coeff in partial.items():
                    for j in range(nv):
                        if _is_zero(mat[i][j]):
                            continue
                        nkey, sign = _sorted_sign(key + (j,))
                        if sign == 0:
                            continue
                        val = coeff * (mat[i][j] if sign > 0 else -mat[i][j])
                        grown[nkey] = grown[nkey] + val if nkey in grown else val
                partial = grown
            for key, coeff in partial.items():
                out[key] = out[key] + coeff if key in out else coeff
        return PolyForm(nv, self.degree, out)

    def __repr__(self):
        if not self.terms:
            return f"PolyForm({self.nvars}, {self.degree}, 0)"
        parts = []
        for idx in sorted(self.terms):
            basis = "^".join(f"dv{i}" for i in idx) or "1"
            parts.append(f"({self.terms[idx]}) {basis}")
        return " + ".join(parts)


def one_form(coeffs) -> PolyForm:
    """The 1-form sum_i coeffs[i] dv_i."""
    coeffs = list(coeffs)
    nv = coeffs[0].nvars if isinstance(coeffs[0], BasePolynomial) else len(coeffs)
    if len(coeffs) != nv:
        raise ValueError("need one coefficient per coordinate")
    return PolyForm(nv, 1, {(i,): c for i, c in enumerate(coeffs)})


def differential(poly: BasePolynomial) -> PolyForm:
    """d of a polynomial function, as a 1-form."""
    return PolyForm.from_function(poly).d()


def primitive(form: PolyForm) -> BasePolynomial:
    """A polynomial phi with d phi = form and phi(0) = 0.

    Uses the radial homotopy, which lands in polynomials exactly when the
    1-form is closed on a star-shaped domain.
    """
    if form.degree != 1:
        raise ValueError("primitives are computed for 1-forms only")
    if not form.d().is_zero():
        raise NotClosed("the 1-form has a nonzero exterior derivative")
    nv = form.nvars
    phi = BasePolynomial.zero(nv)
    for (a,), c in form.terms.items():
        phi = phi + BasePolynomial.variable(nv, a) * c.integrate_radial()
    if differential(phi) != form:
        raise NotExactOnDomain("radial primitive failed to reproduce the form")
    return phi
