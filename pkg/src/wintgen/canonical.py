"""Pointwise certification of the canonical shape-operator form.

A codimension-two pair of traceless shape operators is "ideal" when some
orthonormal tangent basis and normal rotation bring it to

    A_1 = mu0 (E_12 + E_21),     A_2 = mu0 (E_11 - E_22),

i.e. the first acts by the off-diagonal swap and the second by diag(1,-1)
on a distinguished tangent 2-plane (the canonical distribution D), both
annihilating its complement.  The defect aggregates four dimensionless
residuals; it vanishes exactly on ideal pairs and is invariant under
tangent conjugation, normal rotation and scaling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TIE_TOL = 1e-3  # relative Gram spread below which the normal angle is tie-broken


@dataclass(frozen=True)
class WintgenReport:
    defect: float
    tangent_frame: np.ndarray  # (m, m): rows E_1, E_2 (spanning D), E_3..
    normal_angle: float        # SO(2) rotation of the normal frame
    distribution: np.ndarray   # (2, m): orthonormal basis of D (= first two rows)
    mu0: float
    lambdas: tuple[float, float]
    residuals: tuple[float, float, float, float]


def traceless_pair(a1, a2):
    """Split symmetric operators into traceless parts and mean curvatures."""
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    m = a1.shape[-1]
    h1 = np.trace(a1, axis1=-2, axis2=-1) / m
    h2 = np.trace(a2, axis1=-2, axis2=-1) / m
    eye = np.eye(m)
    return a1 - h1[..., None, None] * eye, a2 - h2[..., None, None] * eye, h1, h2


def _sym_frob(a, b):
    return np.sum(a * b, axis=(-2, -1))


def wintgen_defect_batch(a1t, a2t):
    """Defect and adapted-frame data for a batch of traceless pairs.

    a1t, a2t: (N, m, m) traceless symmetric.  Returns a dict of arrays.
    """
    a1t = np.asarray(a1t, dtype=float)
    a2t = np.asarray(a2t, dtype=float)
    n, m, _ = a1t.shape
    nrm2 = _sym_frob(a1t, a1t) + _sym_frob(a2t, a2t)
    if np.any(nrm2 == 0):
        raise ValueError("zero pair is umbilic; handle upstream")

    # (i) Frobenius Gram of the normal pencil; r1 = eigenvalue spread
    g11 = _sym_frob(a1t, a1t)
    g12 = _sym_frob(a1t, a2t)
    g22 = _sym_frob(a2t, a2t)
    disc = np.sqrt((g11 - g22) ** 2 + 4 * g12**2)
    r1 = disc

    # (ii) spectral split of S = A1^2 + A2^2
    s = a1t @ a1t + a2t @ a2t
    lam, u = np.linalg.eigh(s)
    # deterministic eigenvector signs: largest-|entry| component positive
    idx = np.argmax(np.abs(u), axis=-2)
    lead = np.take_along_axis(u, idx[:, None, :], axis=-2)[:, 0, :]
    u = u * np.where(lead < 0, -1.0, 1.0)[:, None, :]
    r2 = np.sum(lam[:, : m - 2], axis=-1) + (lam[:, -1] - lam[:, -2])
    dbasis = u[:, :, -2:]  # columns

    # (iii) restriction to D: equal-norm + orthogonality of traceless parts
    p = np.einsum("nia,nij,njb->nab", dbasis, a1t, dbasis)
    q = np.einsum("nia,nij,njb->nab", dbasis, a2t, dbasis)
    eye2 = np.eye(2)
    pt = p - (np.trace(p, axis1=-2, axis2=-1) / 2)[:, None, None] * eye2
    qt = q - (np.trace(q, axis1=-2, axis2=-1) / 2)[:, None, None] * eye2
    np2 = _sym_frob(pt, pt)
    nq2 = _sym_frob(qt, qt)
    r3 = np.abs(np2 - nq2) + 2 * np.abs(_sym_frob(pt, qt))

    # (iv) annihilation of D-perp
    dperp = u[:, :, : m - 2]
    r4 = np.sum(np.einsum("nij,njb->nib", a1t, dperp) ** 2, axis=(-2, -1)) + np.sum(
        np.einsum("nij,njb->nib", a2t, dperp) ** 2, axis=(-2, -1)
    )

    defect = (r1 + r2 + r3 + r4) / nrm2
    mu0 = np.sqrt((np2 + nq2) / 4.0)
    return {
        "defect": defect,
        "residuals": np.stack([r1, r2, r3, r4], axis=-1),
        "mu0": mu0,
        "s_eigvec": u,
        "s_eigval": lam,
        "gram": np.stack([g11, g12, g22], axis=-1),
        "pt": pt,
        "qt": qt,
        "nrm2": nrm2,
    }


def _vec2(t):
    """Traceless symmetric 2x2 [[a,b],[b,-a]] as the vector (a, b)."""
    return np.stack([t[..., 0, 0], t[..., 0, 1]], axis=-1)


def _normal_angle(gram, pt, qt, tie_tol=TIE_TOL):
    """Normal rotation for the adapted frame (batched).

    Diagonalizes the Frobenius Gram; when the Gram is scalar up to tie_tol
    (always the case for ideal pairs) the angle instead maximizes the
    off-diagonal entry of the first rotated operator in the D basis.
    """
    g11, g12, g22 = gram[..., 0], gram[..., 1], gram[..., 2]
    spread = np.sqrt((g11 - g22) ** 2 + 4 * g12**2)
    scale = g11 + g22
    pv = _vec2(pt)
    qv = _vec2(qt)
    # tie-break: |b(theta)| max for b = cos(t) b_P + sin(t) b_Q
    theta_tie = np.arctan2(qv[..., 1], pv[..., 1])
    theta_diag = 0.5 * np.arctan2(2 * g12, g11 - g22)
    return np.where(spread <= tie_tol * scale, theta_tie, theta_diag)


def _rotate_pair(a1t, a2t, theta):
    c, s = np.cos(theta), np.sin(theta)
    b1 = c[..., None, None] * a1t + s[..., None, None] * a2t
    b2 = -s[..., None, None] * a1t + c[..., None, None] * a2t
    return b1, b2


def wintgen_defect(a1t, a2t) -> WintgenReport:
    """Canonical-form defect and adapted frames of a single traceless pair."""
    a1t = np.asarray(a1t, dtype=float)
    a2t = np.asarray(a2t, dtype=float)
    m = a1t.shape[-1]
    res = wintgen_defect_batch(a1t[None], a2t[None])
    theta = float(_normal_angle(res["gram"], res["pt"], res["qt"])[0])
    b1, b2 = _rotate_pair(a1t, a2t, np.array(theta))

    u = res["s_eigvec"][0]
    dbasis = u[:, -2:]
    # in-D basis diagonalizing the rotated B2, descending, with B1 offdiag >= 0
    q = dbasis.T @ b2 @ dbasis
    qt = q - np.trace(q) / 2 * np.eye(2)
    _, v = np.linalg.eigh(qt)
    e1 = dbasis @ v[:, 1]
    e2 = dbasis @ v[:, 0]
    if (e1 @ b1 @ e2) < 0:
        e2 = -e2
    rest = [u[:, k] for k in range(m - 3, -1, -1)]  # descending S-eigenvalue
    frame = np.stack([e1, e2] + rest)
    return WintgenReport(
        defect=float(res["defect"][0]),
        tangent_frame=frame,
        normal_angle=theta,
        distribution=frame[:2].copy(),
        mu0=float(res["mu0"][0]),
        lambdas=(0.0, 0.0),
        residuals=tuple(float(x) for x in res["residuals"][0]),
    )


def wintgen_report_full(a1, a2) -> WintgenReport:
    """Report for a full (not yet traceless) shape-operator pair."""
    a1t, a2t, h1, h2 = traceless_pair(a1, a2)
    rep = wintgen_defect(a1t, a2t)
    return WintgenReport(
        defect=rep.defect,
        tangent_frame=rep.tangent_frame,
        normal_angle=rep.normal_angle,
        distribution=rep.distribution,
        mu0=rep.mu0,
        lambdas=(float(h1), float(h2)),
        residuals=rep.residuals,
    )


def reconstruct_pair(report: WintgenReport, m: int):
    """Rebuild shape operators from (lambdas, mu0, frames); inverse of the
    adapted-form extraction for zero-defect pairs."""
    e1, e2 = report.tangent_frame[0], report.tangent_frame[1]
    b1 = report.mu0 * (np.outer(e1, e2) + np.outer(e2, e1))
    b2 = report.mu0 * (np.outer(e1, e1) - np.outer(e2, e2))
    c, s = np.cos(report.normal_angle), np.sin(report.normal_angle)
    a1t = c * b1 - s * b2
    a2t = s * b1 + c * b2
    eye = np.eye(m)
    return a1t + report.lambdas[0] * eye, a2t + report.lambdas[1] * eye


def certify_field(shape_ops, mask=None):
    """Defect statistics and adapted-frame field over a sampled immersion.

    shape_ops: (..., 2, m, m) field of shape-operator pairs; mask selects the
    regular points.  Returns dict with per-point defect/mu0/frames and
    summary statistics; the distribution field is sign-aligned along the
    flattened order for downstream difference quotients.
    """
    ops = np.asarray(shape_ops, dtype=float)
    lat = ops.shape[:-3]
    m = ops.shape[-1]
    flat = ops.reshape(-1, 2, m, m)
    n = flat.shape[0]
    mask = np.ones(n, dtype=bool) if mask is None else np.asarray(mask).reshape(-1)

    defect = np.full(n, np.nan)
    mu0 = np.full(n, np.nan)
    frames = np.full((n, m, m), np.nan)
    angles = np.full(n, np.nan)
    prev = None
    for k in range(n):
        if not mask[k]:
            continue
        rep = wintgen_report_full(flat[k, 0], flat[k, 1])
        fr = rep.tangent_frame.copy()
        if prev is not None:
            # stabilize the discrete frame gauge along the sweep
            for i in range(m):
                if np.dot(fr[i], prev[i]) < 0:
                    fr[i] = -fr[i]
        prev = fr
        defect[k] = rep.defect
        mu0[k] = rep.mu0
        frames[k] = fr
        angles[k] = rep.normal_angle
    sel = np.isfinite(defect)
    stats = {
        "max_defect": float(np.max(defect[sel])) if np.any(sel) else np.nan,
        "median_defect": float(np.median(defect[sel])) if np.any(sel) else np.nan,
        "count": int(np.sum(sel)),
    }
    return {
        "defect": defect.reshape(lat),
        "mu0": mu0.reshape(lat),
        "frames": frames.reshape(lat + (m, m)),
        "normal_angle": angles.reshape(lat),
        "stats": stats,
    }
