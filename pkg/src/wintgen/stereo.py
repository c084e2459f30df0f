"""Complex stereographic projection between the quadric and C^{m+2}.

pi:  [xi] -> X = (-1 / 2<xi,p>) (<xi,p> p* + <xi,p*> p + 2 xi)
pi^-1:  X -> xi = p* + <X,X> p + 2 X
for a pole pair <p,p>=<p*,p*>=0, <p,p*>=-2.  The classical real
stereographic projection of S^{m+2} is included as the real slice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lorentz
from .lorentz import inner, orthonormal_complement

POLE_TOL = 1e-12


class SpherePoleError(ValueError):
    """The sphere/point passes through the projection pole."""

    def __init__(self, msg, pairing=None):
        super().__init__(msg)
        self.pairing = pairing


@dataclass(frozen=True)
class PolePair:
    """Two lightlike vectors with <p,p*> = -2."""

    wp: np.ndarray
    wps: np.ndarray

    def __post_init__(self):
        wp = np.asarray(self.wp, dtype=float)
        wps = np.asarray(self.wps, dtype=float)
        object.__setattr__(self, "wp", wp)
        object.__setattr__(self, "wps", wps)
        for name, val in (
            ("<p,p>", inner(wp, wp)),
            ("<p*,p*>", inner(wps, wps)),
            ("<p,p*>", inner(wp, wps) + 2.0),
        ):
            if abs(val) > POLE_TOL:
                raise ValueError(f"pole normalization violated: {name} off by {val:.3e}")

    @classmethod
    def standard(cls, dim: int) -> "PolePair":
        wp = np.zeros(dim)
        wp[0] = wp[1] = 1.0
        wps = np.zeros(dim)
        wps[0] = 1.0
        wps[1] = -1.0
        return cls(wp, wps)

    @property
    def dim(self) -> int:
        return self.wp.shape[0]


def pole_adaptation(poles: PolePair) -> np.ndarray:
    """Lorentz matrix T with T p = (1,1,0..), T p* = (1,-1,0..).

    Deterministic: the spacelike completion is seeded by the canonical basis.
    """
    u0 = (poles.wp + poles.wps) / 2.0  # timelike unit
    u1 = (poles.wp - poles.wps) / 2.0  # spacelike unit
    comp = orthonormal_complement(
        np.stack([u0, u1]), (0, poles.dim - 2)
    ).vectors
    basis = np.concatenate([np.stack([u0, u1]), comp])
    eps = np.ones(poles.dim)
    eps[0] = -1.0
    eta = np.ones(poles.dim)
    eta[0] = -1.0
    # row i of T is eps_i * (eta * basis_i)
    return (eps[:, None] * basis) * eta[None, :]


def remove_pole_components(v, poles: PolePair):
    """Project v onto the orthogonal complement of {p, p*} (exact zeroing)."""
    wp, wps = poles.wp, poles.wps
    a = inner(v, wp)
    b = inner(v, wps)
    return v + 0.5 * b[..., None] * wp + 0.5 * a[..., None] * wps


def project_complex(xi, poles: PolePair, tau: float = POLE_TOL):
    """Complex stereographic projection of quadric lifts; batched."""
    xi = np.asarray(xi)
    d = inner(xi, poles.wp)
    bad = np.abs(d) <= tau
    if np.any(bad):
        worst = float(np.min(np.abs(d)))
        raise SpherePoleError(
            f"<xi,p> = {worst:.3e}: sphere passes through the pole "
            "(choose a different pole pair)",
            pairing=worst,
        )
    e = inner(xi, poles.wps)
    x = (-0.5 / d)[..., None] * (
        2 * xi + d[..., None] * poles.wps + e[..., None] * poles.wp
    )
    return remove_pole_components(x, poles)


def lift_complex(x, poles: PolePair, tol: float = 1e-10):
    """Inverse projection xi = p* + <X,X> p + 2X; X must be pole-orthogonal."""
    x = np.asarray(x)
    ra = np.max(np.abs(inner(x, poles.wp)))
    rb = np.max(np.abs(inner(x, poles.wps)))
    scale = max(1.0, float(np.max(np.abs(x))))
    if max(ra, rb) > tol * scale:
        raise ValueError(f"X not orthogonal to the poles (residual {max(ra, rb):.3e})")
    q = inner(x, x)
    return poles.wps + q[..., None] * poles.wp + 2 * x


def euclidean_chart(x, poles: PolePair):
    """Coordinates of a pole-orthogonal vector in the flat chart R^{m+2}.

    For the standard pair this just drops the two pole coordinates; general
    pairs are adapted by the deterministic Lorentz map.
    """
    x = np.asarray(x)
    std = PolePair.standard(poles.dim)
    if np.array_equal(poles.wp, std.wp) and np.array_equal(poles.wps, std.wps):
        return x[..., 2:]
    t = pole_adaptation(poles)
    return np.einsum("ij,...j->...i", t, x)[..., 2:]


def chart_to_ambient(y, poles: PolePair):
    """Inverse of euclidean_chart: embed chart coordinates pole-orthogonally."""
    y = np.asarray(y)
    amb = np.concatenate([np.zeros(y.shape[:-1] + (2,), dtype=y.dtype), y], axis=-1)
    std = PolePair.standard(poles.dim)
    if np.array_equal(poles.wp, std.wp) and np.array_equal(poles.wps, std.wps):
        return amb
    t_inv = np.linalg.inv(pole_adaptation(poles))
    return np.einsum("ij,...j->...i", t_inv, amb)


def project_classical(x, pole=None):
    """Real stereographic projection of S^{m+2} subset R^{m+3} from a pole.

    Default pole (1,0,...,0); x = (x', x'') maps to x''/(1 - x').
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if pole is None:
        pole = np.zeros(n)
        pole[0] = 1.0
    pole = np.asarray(pole, dtype=float)
    basis = _pole_chart_basis(pole)
    xp = np.einsum("...d,d->...", x, pole)
    if np.any(np.abs(1.0 - xp) < 1e-14):
        raise SpherePoleError("point coincides with the projection pole")
    xpp = np.einsum("...d,kd->...k", x, basis)
    return xpp / (1.0 - xp)[..., None]


def inverse_classical(y, pole=None, dim=None):
    """Inverse stereographic projection onto the unit sphere."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1] + 1 if dim is None else dim
    if pole is None:
        pole = np.zeros(n)
        pole[0] = 1.0
    pole = np.asarray(pole, dtype=float)
    basis = _pole_chart_basis(pole)
    r2 = np.sum(y * y, axis=-1)
    denom = (r2 + 1.0)[..., None]
    return pole * ((r2 - 1.0)[..., None] / denom) + 2.0 * np.einsum(
        "...k,kd->...d", y, basis
    ) / denom


def _pole_chart_basis(pole: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the pole's orthogonal complement."""
    n = pole.shape[0]
    if abs(pole[0] - 1.0) < 1e-14 and np.all(np.abs(pole[1:]) < 1e-14):
        return np.eye(n)[1:]
    # Householder reflection taking e0 to the pole
    v = pole - np.eye(n)[0]
    v = v / np.linalg.norm(v)
    h = np.eye(n) - 2.0 * np.outer(v, v)
    return h[:, 1:].T


def random_lorentz(rng: np.random.Generator, dim: int, boost: float = 0.5) -> np.ndarray:
    """Random Lorentz transformation: spatial rotation composed with a boost."""
    a = rng.standard_normal((dim - 1, dim - 1))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    rot = np.eye(dim)
    rot[1:, 1:] = q
    s = boost * rng.standard_normal()
    b = np.eye(dim)
    b[0, 0] = np.cosh(s)
    b[0, 1] = b[1, 0] = np.sinh(s)
    b[1, 1] = np.cosh(s)
    # conjugate the boost plane by another rotation for genericity
    a2 = rng.standard_normal((dim - 1, dim - 1))
    q2, r2 = np.linalg.qr(a2)
    q2 = q2 * np.sign(np.diag(r2))
    rot2 = np.eye(dim)
    rot2[1:, 1:] = q2
    return rot @ rot2 @ b @ rot2.T


def lorentz_defect(t: np.ndarray) -> float:
    """How far a matrix is from the Lorentz group (for validation)."""
    n = t.shape[0]
    eta = np.diag(np.r_[-1.0, np.ones(n - 1)])
    return float(np.max(np.abs(t.T @ eta @ t - eta)))
