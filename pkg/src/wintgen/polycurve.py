"""Exact complex polynomials and polynomial curves with exact jets.

Coefficients are Gaussian rationals (pairs of fractions.Fraction), so
algebraic identities like "sum of squares is the zero polynomial" can be
asserted exactly, with no tolerance.  Numerical evaluation converts the
coefficients to complex128 once and uses Horner's scheme (batched; the
compiled kernel is used when available).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import horner_many

try:  # gmpy2 rationals are ~10x faster; plain Fractions work the same
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover
    _rational = Fraction


def _to_rational(x):
    if isinstance(x, float):  # includes numpy float64; exact binary value
        return _rational(Fraction(x))
    if isinstance(x, np.integer):
        return _rational(int(x))
    return _rational(x)


class QC:
    """A Gaussian rational: exact complex number re + i*im, rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QC):
            re, im = re.re, re.im
        elif isinstance(re, complex):
            re, im = re.real, re.imag
        self.re = _to_rational(re)
        self.im = _to_rational(im)

    @classmethod
    def _raw(cls, re, im):
        """Wrap parts that are already Fractions (no re-normalization)."""
        self = object.__new__(cls)
        self.re = re
        self.im = im
        return self

    @staticmethod
    def _coerce(other):
        if isinstance(other, QC):
            return other
        try:
            return QC(other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QC._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QC._raw(-self.re, -self.im)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QC._raw(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QC._raw(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def conjugate(self):
        return QC._raw(self.re, -self.im)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        return f"QC({self.re}, {self.im})"


def _trim(coeffs: tuple[QC, ...]) -> tuple[QC, ...]:
    n = len(coeffs)
    while n > 0 and not coeffs[n - 1]:
        n -= 1
    return coeffs[:n]


class Poly:
    """Polynomial with exact QC coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, Poly):
            self.coeffs = coeffs.coeffs
            return
        if isinstance(coeffs, (int, float, complex, Fraction, QC)):
            coeffs = (coeffs,)
        self.coeffs = _trim(tuple(QC(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @staticmethod
    def _coerce(other):
        if isinstance(other, Poly):
            return other
        try:
            return Poly(other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [QC() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self) -> "Poly":
        return Poly(tuple(c * (k + 1) for k, c in enumerate(self.coeffs[1:])))

    def antiderivative(self) -> "Poly":
        """Coefficient-exact antiderivative with zero constant term."""
        return Poly((QC(),) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def conjugate_coeffs(self) -> "Poly":
        return Poly(tuple(c.conjugate() for c in self.coeffs))

    def __call__(self, z):
        """Exact evaluation for QC input, float Horner otherwise."""
        if isinstance(z, QC):
            acc = QC()
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        zs = np.asarray(z, dtype=complex)
        arr = self.to_complex()[:, None]
        out = horner_many(arr, np.atleast_1d(zs).ravel())[..., 0]
        return out.reshape(np.shape(zs)) if np.shape(zs) else complex(out[0])

    def to_complex(self) -> np.ndarray:
        if not self.coeffs:
            return np.zeros(1, dtype=complex)
        return np.array([complex(c) for c in self.coeffs])

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


@dataclass(frozen=True)
class CurveJet:
    """Jet of a curve at a base point: value, d/dz, d2/dz2 and d/dzbar."""

    z: complex
    value: np.ndarray
    dz: np.ndarray
    dzz: np.ndarray
    dzbar: np.ndarray


class PolyCurve:
    """Curve z -> C^dim with exact polynomial components."""

    def __init__(self, components):
        comps = tuple(Poly(p) for p in components)
        if not comps:
            raise ValueError("curve needs at least one component")
        for p in comps:
            for c in p.coeffs:
                if not (
                    np.isfinite(float(c.re)) and np.isfinite(float(c.im))
                ):  # pragma: no cover - Fractions are always finite
                    raise ValueError("non-finite coefficient")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "dim", len(comps))
        self._build_cache()

    def _build_cache(self):
        degs = [max(p.degree, 0) for p in self.components]
        d = max(degs)
        mat = np.zeros((d + 1, self.dim), dtype=complex)
        for j, p in enumerate(self.components):
            vals = p.to_complex()
            mat[: len(vals), j] = vals
        dmat = mat[1:] * np.arange(1, d + 1)[:, None] if d >= 1 else np.zeros((1, self.dim), complex)
        ddmat = dmat[1:] * np.arange(1, d)[:, None] if d >= 2 else np.zeros((1, self.dim), complex)
        object.__setattr__(self, "_coeffs", np.ascontiguousarray(mat))
        object.__setattr__(self, "_dcoeffs", np.ascontiguousarray(dmat))
        object.__setattr__(self, "_ddcoeffs", np.ascontiguousarray(ddmat))

    def derivative(self) -> "PolyCurve":
        return PolyCurve(tuple(p.derivative() for p in self.components))

    def antiderivative(self) -> "PolyCurve":
        return PolyCurve(tuple(p.antiderivative() for p in self.components))

    def dot(self, other: "PolyCurve", metric=None) -> Poly:
        """Exact bilinear pairing; metric is a sequence of +-1 signs
        (defaults to all +1, i.e. the Euclidean bilinear form)."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        if metric is None:
            metric = (1,) * self.dim
        acc = Poly()
        for s, p, q in zip(metric, self.components, other.components):
            term = p * q
            if s == 1:
                acc = acc + term
            elif s == -1:
                acc = acc - term
            else:
                acc = acc + s * term
        return acc

    def eval_many(self, z: np.ndarray, order: int = 2):
        """Batched Horner evaluation: value[, dz[, dzz]] as (N, dim) arrays."""
        z = np.ascontiguousarray(np.asarray(z, dtype=complex).ravel())
        out = [horner_many(self._coeffs, z)]
        if order >= 1:
            out.append(horner_many(self._dcoeffs, z))
        if order >= 2:
            out.append(horner_many(self._ddcoeffs, z))
        return out

    def jet(self, z: complex, order: int = 2) -> CurveJet:
        """Exact-formula jet at a point; d/dzbar is exactly zero."""
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        zs = np.array([z], dtype=complex)
        vals = self.eval_many(zs, order=order)
        zero = np.zeros(self.dim, dtype=complex)
        value = vals[0][0]
        dz = vals[1][0] if order >= 1 else zero.copy()
        dzz = vals[2][0] if order >= 2 else zero.copy()
        return CurveJet(z=complex(z), value=value, dz=dz, dzz=dzz, dzbar=zero.copy())


def eval_poly_jet(curve: PolyCurve, z: complex, order: int = 2) -> CurveJet:
    """Functional wrapper for PolyCurve.jet."""
    return curve.jet(z, order=order)


def poly_antiderivative(p) -> Poly:
    return Poly(p).antiderivative()


class RationalCurve:
    """Curve N(z)/d(z) with polynomial numerator curve and scalar denominator.

    Jets come from the quotient rule applied to exact polynomial jets, so the
    only error is floating-point rounding (the curve is holomorphic away
    from denominator zeros).
    """

    def __init__(self, num: PolyCurve, den: Poly):
        self.num = num
        self.den = Poly(den)
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator polynomial")
        self.dim = num.dim
        self._dcache = PolyCurve([self.den, self.den.derivative(), self.den.derivative().derivative()])

    def eval_many(self, z: np.ndarray, order: int = 2):
        z = np.asarray(z, dtype=complex).ravel()
        nvals = self.num.eval_many(z, order=order)
        dv = self._dcache.eval_many(z, order=0)[0]
        d0 = dv[:, 0:1]
        if np.any(np.abs(d0) < 1e-300):
            raise ZeroDivisionError("evaluation at a pole of the curve")
        out = [nvals[0] / d0]
        if order >= 1:
            d1 = dv[:, 1:2]
            out.append((nvals[1] * d0 - nvals[0] * d1) / d0**2)
        if order >= 2:
            d1 = dv[:, 1:2]
            d2 = dv[:, 2:3]
            out.append(
                (
                    nvals[2] * d0**2
                    - 2 * nvals[1] * d1 * d0
                    - nvals[0] * d2 * d0
                    + 2 * nvals[0] * d1**2
                )
                / d0**3
            )
        return out

    def jet(self, z: complex, order: int = 2) -> CurveJet:
        vals = self.eval_many(np.array([z], dtype=complex), order=order)
        zero = np.zeros(self.dim, dtype=complex)
        return CurveJet(
            z=complex(z),
            value=vals[0][0],
            dz=vals[1][0] if order >= 1 else zero.copy(),
            dzz=vals[2][0] if order >= 2 else zero.copy(),
            dzbar=zero.copy(),
        )
