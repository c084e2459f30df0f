"""Holomorphic 1-isotropic curves in C^{m+2} from Weierstrass-type data.

The recipe takes a polynomial f and m polynomials g_3..g_{m+2} and produces
    phi_1 = f (1 - Q) / 2,   phi_2 = i f (1 + Q) / 2,   phi_k = f g_k,
with Q = sum_k g_k^2, so that sum_k phi_k^2 = 0 holds at the coefficient
level.  X = integral of phi is then a holomorphic 1-isotropic curve, and its
lightcone-style lift lands in the complex quadric.  For m+2 = 3 this reduces
to the classical representation of minimal surfaces in R^3.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .polycurve import QC, Poly, PolyCurve


class PoleNormalizationError(ValueError):
    """Pole pair does not satisfy <p,p>=0, <p*,p*>=0, <p,p*>=-2."""


@dataclass(frozen=True)
class WeierstrassData:
    """f and g_3..g_{m+2} polynomials; f must not be identically zero."""

    f: Poly
    g: tuple[Poly, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "f", Poly(self.f))
        object.__setattr__(self, "g", tuple(Poly(p) for p in self.g))
        if self.m < 2:
            raise ValueError("need m >= 2")
        if len(self.g) != self.m:
            raise ValueError(f"need m={self.m} g-polynomials, got {len(self.g)}")
        if self.f.is_zero():
            raise ValueError("f must not be identically zero")

    @classmethod
    def from_dict(cls, doc: dict) -> "WeierstrassData":
        f = Poly([QC(re, im) for re, im in doc["f"]])
        g = tuple(Poly([QC(re, im) for re, im in comp]) for comp in doc["g"])
        return cls(f=f, g=g, m=int(doc["m"]))

    @classmethod
    def from_json(cls, path) -> "WeierstrassData":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        def dump(p: Poly):
            return [[float(c.re), float(c.im)] for c in p.coeffs] or [[0.0, 0.0]]

        return {"m": self.m, "f": dump(self.f), "g": [dump(p) for p in self.g]}


def load_fixture(name: str) -> WeierstrassData:
    """Load one of the shipped fixture data sets (e.g. 'enneper5')."""
    ref = resources.files("wintgen") / "fixtures" / f"{name.lower()}.json"
    if not ref.is_file():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return WeierstrassData.from_dict(json.loads(ref.read_text()))


def random_weierstrass(rng: np.random.Generator, m: int = 3, max_degree: int = 4) -> WeierstrassData:
    """Random data with small Gaussian-integer coefficients (exact arithmetic)."""

    def rand_poly(min_terms=0):
        deg = int(rng.integers(min_terms, max_degree + 1))
        coeffs = [
            QC(int(rng.integers(-9, 10)), int(rng.integers(-9, 10))) for _ in range(deg + 1)
        ]
        return Poly(coeffs)

    f = Poly()
    while f.is_zero():
        f = rand_poly()
    g = tuple(rand_poly() for _ in range(m))
    return WeierstrassData(f=f, g=g, m=m)


def weierstrass_isotropic(data: WeierstrassData) -> tuple[PolyCurve, PolyCurve]:
    """Return (phi, X) in C^{m+2} with sum phi^2 = 0 exactly and X' = phi."""
    q = Poly()
    for p in data.g:
        q = q + p * p
    phi1 = data.f * (1 - q) * QC("1/2")
    phi2 = data.f * (1 + q) * QC(0, "1/2")
    comps = [phi1, phi2] + [data.f * p for p in data.g]
    phi = PolyCurve(comps)
    x = phi.antiderivative()
    return phi, x


def standard_poles(dim: int) -> tuple[np.ndarray, np.ndarray]:
    wp = np.zeros(dim)
    wp[0] = 1.0
    wp[1] = 1.0
    wps = np.zeros(dim)
    wps[0] = 1.0
    wps[1] = -1.0
    return wp, wps


def _is_standard_pole_pair(poles, dim) -> bool:
    wp, wps = poles
    swp, swps = standard_poles(dim)
    return np.array_equal(np.asarray(wp, dtype=float), swp) and np.array_equal(
        np.asarray(wps, dtype=float), swps
    )


def lift_to_quadric(x_curve: PolyCurve, poles=None) -> PolyCurve:
    """Lift X: C -> C^{m+2} to xi = p* + <X,X> p + 2X in C^{m+4}.

    The lift is built in standard pole position with exact coefficients:
    xi = (1 + <X,X>, <X,X> - 1, 2 X).  A nonstandard pole pair must satisfy
    the normalization conditions; the result is then rotated by the Lorentz
    map taking the standard pair onto it (float coefficients).
    """
    q = Poly()
    for p in x_curve.components:
        q = q + p * p
    comps = [1 + q, q - 1] + [2 * p for p in x_curve.components]
    xi = PolyCurve(comps)
    dim = x_curve.dim + 2
    if poles is None or _is_standard_pole_pair(poles, dim):
        return xi
    from .stereo import PolePair, pole_adaptation  # deferred: avoid import cycle

    pair = PolePair(*poles)
    t_back = np.linalg.inv(pole_adaptation(pair))
    return apply_linear_map(xi, t_back)


def apply_linear_map(curve: PolyCurve, mat: np.ndarray) -> PolyCurve:
    """Componentwise linear change of coordinates of a polynomial curve."""
    dim = curve.dim
    if mat.shape != (dim, dim):
        raise ValueError("matrix shape does not match curve dimension")
    maxdeg = max(p.degree for p in curve.components)
    qmat = [[QC(mat[i, j]) for j in range(dim)] for i in range(dim)]
    comps = []
    for i in range(dim):
        coeffs = []
        for k in range(maxdeg + 1):
            acc = QC()
            for j in range(dim):
                cj = curve.components[j].coeffs
                if k < len(cj):
                    acc = acc + qmat[i][j] * cj[k]
            coeffs.append(acc)
        comps.append(Poly(coeffs))
    return PolyCurve(comps)
