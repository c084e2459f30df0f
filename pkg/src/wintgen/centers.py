"""Centers of the mean curvature sphere congruence and the induced minimal
surface in the flat ambient space.

Two independent computation paths are kept and cross-checked:
  * pointwise reflection of the pole in the sphere's spacelike 2-plane,
      O = p - 2<p,xi_1> xi_1 - 2<p,xi_2> xi_2,
    followed by the normalized lift and chart projection;
  * the closed-form curve  X = (-1 / 2<xi,p>) (2 xi + <xi,p> p* + <xi,p*> p)
    whose real part is the center surface.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lorentz import inner, orthonormal_complement
from .polycurve import Poly, PolyCurve, QC, RationalCurve
from .stereo import PolePair, SpherePoleError, euclidean_chart, remove_pole_components

TAU_SIGMA = 1e-10


@dataclass(frozen=True)
class SphereGeometry:
    """Center data of one mean curvature sphere."""

    center_lift: np.ndarray      # O_xi, lightlike
    euclidean_center: np.ndarray  # point of R^{m+2} in the pole chart
    radius: float


def reflect_pole(xi1, xi2, poles: PolePair):
    """Reflection of the pole in the spacelike plane span{xi1, xi2} (batched)."""
    wp = poles.wp
    return (
        wp
        - 2 * inner(wp, xi1)[..., None] * xi1
        - 2 * inner(wp, xi2)[..., None] * xi2
    )


def reflect_pole_complex(xi, poles: PolePair):
    """Same reflection from an arbitrary-scale complex lift:
    O = p - (2/<xi,conj xi>) (<p,xi> conj xi + <p,conj xi> xi)."""
    xi = np.asarray(xi, dtype=complex)
    nrm = inner(xi, np.conj(xi)).real
    a = inner(poles.wp, xi)
    out = poles.wp - (2.0 / nrm)[..., None] * (
        a[..., None] * np.conj(xi) + np.conj(a)[..., None] * xi
    )
    return out.real


def sphere_center(xi1, xi2, poles: PolePair, sphere_points=None) -> SphereGeometry:
    """Center (and radius) of the sphere encoded by the orthonormal pair.

    The radius is measured in the flat chart from witness points on the
    sphere: either the provided ones (e.g. envelope fiber samples, chart
    coordinates) or a lightlike witness built from the orthogonal complement
    of the plane.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    o = reflect_pole(xi1, xi2, poles)
    sigma = -inner(o, poles.wp)
    if abs(sigma) <= TAU_SIGMA:
        raise SpherePoleError(
            f"sphere passes through the pole (sigma = {sigma:.3e})", pairing=float(sigma)
        )
    xt = o / sigma
    center = euclidean_chart(remove_pole_components(xt, poles), poles)
    if sphere_points is None:
        comp = orthonormal_complement(np.stack([xi1, xi2]), (1, xi1.shape[0] - 3)).vectors
        witness_lift = comp[0] + comp[1]
        s = -inner(witness_lift, poles.wp)
        if abs(s) <= TAU_SIGMA:
            witness_lift = comp[0] + comp[2]
            s = -inner(witness_lift, poles.wp)
        pt = euclidean_chart(remove_pole_components(witness_lift / s, poles), poles)
        radius = float(np.linalg.norm(pt - center))
    else:
        pts = np.asarray(sphere_points, dtype=float)
        radius = float(np.mean(np.linalg.norm(pts - center, axis=-1)))
    return SphereGeometry(center_lift=o, euclidean_center=center, radius=radius)


def center_curve(xi_curve: PolyCurve, poles: PolePair | None = None) -> RationalCurve:
    """The closed-form center curve X as a rational curve in C^{m+4}.

    X(z) is holomorphic and 1-isotropic wherever <xi,p> != 0; its real part
    traces the Euclidean centers of the sphere congruence.
    """
    dim = xi_curve.dim
    poles = PolePair.standard(dim) if poles is None else poles
    eta = [-1.0] + [1.0] * (dim - 1)
    d = Poly()
    e = Poly()
    for i in range(dim):
        d = d + QC(eta[i] * poles.wp[i]) * xi_curve.components[i]
        e = e + QC(eta[i] * poles.wps[i]) * xi_curve.components[i]
    if d.is_zero():
        raise SpherePoleError("the whole congruence passes through the pole")
    num = []
    for i in range(dim):
        comp = -2 * xi_curve.components[i] - QC(poles.wps[i]) * d - QC(poles.wp[i]) * e
        num.append(comp)
    return RationalCurve(PolyCurve(num), 2 * d)


def center_samples(xi_curve: PolyCurve, z, poles: PolePair | None = None):
    """Sampled center surface: ambient complex X, real part, chart coords."""
    poles = PolePair.standard(xi_curve.dim) if poles is None else poles
    curve = center_curve(xi_curve, poles)
    z = np.asarray(z, dtype=complex)
    vals = curve.eval_many(z.ravel(), order=2)
    x = vals[0].reshape(z.shape + (curve.dim,))
    xt = x.real
    chart = euclidean_chart(xt, poles)
    return {
        "X": x,
        "X_z": vals[1].reshape(z.shape + (curve.dim,)),
        "X_zz": vals[2].reshape(z.shape + (curve.dim,)),
        "real_part": xt,
        "chart": chart,
        "curve": curve,
    }


def verify_minimal_analytic(xi_curve: PolyCurve, z, poles: PolePair | None = None):
    """Harmonicity/conformality residuals of the center surface from exact jets.

    For the holomorphic X:  Xt_u = Re X_z,  Xt_v = -Im X_z,  Xt_uu = Re X_zz,
    Xt_vv = -Re X_zz.
    """
    from .immersion import harmonicity_from_jets

    data = center_samples(xi_curve, z, poles)
    xz, xzz = data["X_z"], data["X_zz"]
    res = harmonicity_from_jets(xz.real, -xz.imag, xzz.real, -xzz.real)
    res["isotropy"] = np.abs(inner(xz, xz)) / inner(xz, np.conj(xz)).real
    return res


def verify_minimal_grid(xt_samples, steps):
    """FD-path residuals for a sampled center surface (u, v) -> R^{m+2}."""
    from .immersion import harmonicity_residual

    return harmonicity_residual(xt_samples, steps)
