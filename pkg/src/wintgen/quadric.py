"""Geometry of the complex quadric: membership, Hermitian metric, and
holomorphy/isotropy certification of curves and Gauss-map fields.

Residuals are made dimensionless with the Euclidean norm on coordinates in
the fixed standard basis (the Lorentz form is indefinite and unusable for
that purpose); the Euclidean norm never enters any geometric quantity.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, asdict

import numpy as np

from .lorentz import inner

TAU_ISO = 1e-8


class QuadricClass(enum.Enum):
    LIGHTCONE = "LightconePoint"
    QPLUS = "QPlusPoint"
    INVALID = "Invalid"


def _aux_norm2(v):
    return np.sum(np.abs(v) ** 2, axis=-1)


def classify(lift, tau_iso: float = TAU_ISO):
    """LightconePoint / QPlusPoint / Invalid for a projective lift (batched)."""
    lift = np.asarray(lift, dtype=complex)
    scale = _aux_norm2(lift)
    if np.any(scale == 0):
        raise ValueError("zero vector has no projective class")
    iso = np.abs(inner(lift, lift))
    pos = inner(lift, np.conj(lift)).real
    on_quadric = iso <= tau_iso * scale
    is_plus = pos > tau_iso * scale
    cls = np.where(
        on_quadric & is_plus,
        QuadricClass.QPLUS,
        np.where(on_quadric, QuadricClass.LIGHTCONE, QuadricClass.INVALID),
    )
    return cls if cls.shape else cls.item()


def horizontal_part(dxi, xi, nrm=None):
    """Component of dxi orthogonal to the lift direction: dxi - (<dxi,conj xi>/<xi,conj xi>) xi."""
    if nrm is None:
        nrm = inner(xi, np.conj(xi)).real
    coef = inner(dxi, np.conj(xi)) / nrm
    return dxi - coef[..., None] * xi


def hermitian_metric(jet, tau: float = 1e-14) -> float:
    """Value of the quadric's indefinite Hermitian metric on the d/dz direction.

    Invariant under rescaling of the lift.  jet is a CurveJet (or anything
    with .value and .dz).
    """
    xi = np.asarray(jet.value, dtype=complex)
    nrm = float(inner(xi, np.conj(xi)).real)
    if nrm <= tau * _aux_norm2(xi):
        raise ValueError("base point is not in the positive quadric")
    w = horizontal_part(np.asarray(jet.dz, dtype=complex), xi, nrm)
    return float(inner(w, np.conj(w)).real) / nrm


@dataclass(frozen=True)
class IsotropyReport:
    """Per-point certification of a curve as holomorphic and 1-isotropic."""

    z: complex
    lambda_coeff: complex
    holo_residual: float
    iso_residual: float
    hermitian_norm_sq: float
    classification: str


def certify_isotropic_holomorphic(xi, xi_z, xi_zbar, z=None, tau_iso: float = TAU_ISO):
    """Certify jets of a quadric curve on a z-grid; returns IsotropyReports.

    lambda is the best-fit coefficient with xi_zbar ~ lambda xi; the holo
    residual compares the remainder to |xi_z| in the auxiliary norm; the iso
    residual is |<w,w>| / <w, conj w> for the horizontal part w of xi_z.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    xi_z = np.atleast_2d(np.asarray(xi_z, dtype=complex))
    xi_zbar = np.atleast_2d(np.asarray(xi_zbar, dtype=complex))
    n = xi.shape[0]
    z = np.zeros(n, dtype=complex) if z is None else np.atleast_1d(np.asarray(z, dtype=complex))

    nrm = inner(xi, np.conj(xi)).real
    if np.any(nrm <= 0):
        raise ValueError("all base points must lie in the positive quadric")
    dz_scale = np.sqrt(_aux_norm2(xi_z))
    if np.any(dz_scale == 0):
        raise ValueError("curve is not immersed (vanishing xi_z)")

    lam = inner(xi_zbar, np.conj(xi)) / nrm
    holo = np.sqrt(_aux_norm2(xi_zbar - lam[:, None] * xi)) / dz_scale
    w = horizontal_part(xi_z, xi, nrm)
    wconj = inner(w, np.conj(w)).real
    # a vanishing horizontal part means the Gauss image is not immersed;
    # report an infinite isotropy residual rather than dividing by zero
    degenerate = wconj <= 0
    iso = np.where(
        degenerate, np.inf, np.abs(inner(w, w)) / np.where(degenerate, 1.0, wconj)
    )
    herm = wconj / nrm
    cls = np.atleast_1d(classify(xi, tau_iso))

    return [
        IsotropyReport(
            z=complex(z[k]),
            lambda_coeff=complex(lam[k]),
            holo_residual=float(holo[k]),
            iso_residual=float(iso[k]),
            hermitian_norm_sq=float(herm[k]),
            classification=cls[k].value,
        )
        for k in range(n)
    ]


def certify_curve(curve, z, tau_iso: float = TAU_ISO):
    """Certify a polynomial (exactly holomorphic) curve at sampled points."""
    z = np.asarray(z, dtype=complex).ravel()
    vals = curve.eval_many(z, order=1)
    zero = np.zeros_like(vals[0])
    return certify_isotropic_holomorphic(vals[0], vals[1], zero, z=z, tau_iso=tau_iso)


def reports_to_json(reports, path=None):
    recs = []
    for r in reports:
        d = asdict(r)
        d["z"] = [r.z.real, r.z.imag]
        d["lambda_coeff"] = [r.lambda_coeff.real, r.lambda_coeff.imag]
        recs.append(d)
    text = json.dumps(recs, indent=1, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def span_distance(a, b) -> float:
    """Distance between the real 2-planes spanned by two complex lifts.

    Operator norm of the difference of Euclidean orthogonal projectors onto
    span{Re a, Im a} and span{Re b, Im b}; scale and phase free, so it is a
    projective distance for quadric points.
    """

    def proj(x):
        x = np.asarray(x, dtype=complex)
        basis = np.stack([x.real, x.imag], axis=-1)
        q, _ = np.linalg.qr(basis)
        return q @ q.T

    return float(np.linalg.norm(proj(a) - proj(b), 2))


@dataclass(frozen=True)
class GaussMapCheck:
    """Forward residuals of the Gauss-map structure of a Wintgen ideal field."""

    fiber_constancy: float     # (a) d xi(E_a) parallel to xi, all D-perp directions
    isotropy: float            # (b) isotropy of d xi restricted to D
    cauchy_riemann: float      # holomorphy across D: w2 = +- i w1
    submersion: float          # (c) |h(dpi E1) - mu^2 g(E1,E1)| / mu^2 g(E1,E1)


def forward_gauss_check(xi, dxi_frame, rho, m: int) -> list[GaussMapCheck]:
    """Check Gauss-map holomorphy/isotropy/fiber-constancy/submersion factor.

    xi: (N, dim) complex Gauss-map lifts; dxi_frame: (N, m, dim) directional
    derivatives of xi along an adapted orthonormal tangent frame whose first
    two vectors span the canonical distribution; rho: (N,) conformal factors
    relating the ambient-induced metric to the invariant one (g = rho^2 I).
    """
    xi = np.asarray(xi, dtype=complex)
    dxi = np.asarray(dxi_frame, dtype=complex)
    rho = np.asarray(rho, dtype=float)
    if dxi.shape[1] != m:
        raise ValueError("need directional derivatives along all m frame vectors")
    mu2 = (m - 1) / (4.0 * m)
    nrm = inner(xi, np.conj(xi)).real

    w = np.stack([horizontal_part(dxi[:, i], xi, nrm) for i in range(m)], axis=1)
    scale = np.sqrt(np.maximum(_aux_norm2(w[:, 0]), _aux_norm2(w[:, 1])))

    out = []
    for k in range(xi.shape[0]):
        fiber = 0.0
        for a in range(2, m):
            fiber = max(fiber, float(np.sqrt(_aux_norm2(w[k, a])) / scale[k]))
        iso = 0.0
        for i in range(2):
            denom = float(inner(w[k, i], np.conj(w[k, i])).real)
            iso = max(iso, float(np.abs(inner(w[k, i], w[k, i]))) / denom)
        w1, w2 = w[k, 0], w[k, 1]
        cr = min(
            float(np.sqrt(_aux_norm2(w2 - 1j * w1))),
            float(np.sqrt(_aux_norm2(w2 + 1j * w1))),
        ) / float(np.sqrt(_aux_norm2(w1)))
        target = mu2 * rho[k] ** 2
        sub = 0.0
        for i in range(2):
            h = float(inner(w[k, i], np.conj(w[k, i])).real) / nrm[k]
            sub = max(sub, abs(h - target) / target)
        out.append(
            GaussMapCheck(
                fiber_constancy=fiber, isotropy=iso, cauchy_riemann=cr, submersion=sub
            )
        )
    return out
