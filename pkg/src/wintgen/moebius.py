"""Conformally invariant data attached to an umbilic-free immersion:
canonical lift, invariant metric, mean curvature spheres, and the two
invariant tensors built from the second fundamental form.

Conventions (codimension p = 2 throughout):
    rho^2 = m/(m-1) |II - (tr II / m) I|^2        (canonical lift scale)
    Y     = rho (1, x)                            (sphere model)
    Y     = rho ((1+|x|^2)/2, (1-|x|^2)/2, x)     (flat model)
    xi_r  = (H^r, n_r + H^r x)                    (sphere model)
    B^r   = rho^-1 (h^r - H^r delta)
    C^r_i = -rho^-2 [H^r_{,i} + sum_j (h^r_ij - H^r delta_ij) e_j(ln rho)]
with H^r_{,i} the normal-connection covariant derivative of the mean
curvature vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .immersion import ExtrinsicData

TAU_UMBILIC = 1e-6  # relative to |II|


class UmbilicError(ValueError):
    """The invariant apparatus degenerates at an umbilic point."""


@dataclass(frozen=True)
class MoebiusData:
    """Pointwise invariant dictionary of an umbilic-free immersion."""

    rho: float
    y: np.ndarray        # canonical lift, lightlike
    metric: np.ndarray   # invariant metric g = rho^2 I in the chart frame
    xi: np.ndarray       # (2, m+4): mean curvature sphere frame
    b: np.ndarray        # (2, m, m)
    c: np.ndarray | None  # (2, m) when third-order data was available


def rho_batch(second_form, mean, m: int):
    """Canonical lift scale from the traceless second fundamental form."""
    h = np.asarray(second_form, dtype=float)
    mean_ = np.asarray(mean, dtype=float)
    eye = np.eye(m)
    tl = h - mean_[..., None, None] * eye
    norm2 = np.sum(tl * tl, axis=(-3, -2, -1))
    return np.sqrt(m / (m - 1) * norm2), np.sqrt(np.sum(h * h, axis=(-3, -2, -1)))


def canonical_lift(data: ExtrinsicData, target: str | None = None, tau_umbilic: float = TAU_UMBILIC):
    """(rho, Y): the scale and the lightlike invariant position vector."""
    target = data.target if target is None else target
    m = data.metric.shape[0]
    rho, ii_norm = rho_batch(data.second_form[None], data.mean_curvature[None], m)
    rho, ii_norm = float(rho[0]), float(ii_norm[0])
    if rho <= tau_umbilic * max(ii_norm, 1e-300):
        raise UmbilicError(f"umbilic point: |traceless II| = {rho:.3e}")
    x = data.position
    if target == "sphere":
        y = rho * np.concatenate([[1.0], x])
    else:
        r2 = float(x @ x)
        y = rho * np.concatenate([[(1 + r2) / 2, (1 - r2) / 2], x])
    return rho, y


def mean_curvature_spheres(data: ExtrinsicData, target: str | None = None) -> np.ndarray:
    """The orthonormal pair (xi_1, xi_2) encoding the mean curvature sphere."""
    target = data.target if target is None else target
    x = data.position
    out = []
    for r in range(data.normals.shape[0]):
        n = data.normals[r]
        h = float(data.mean_curvature[r])
        if target == "sphere":
            out.append(np.concatenate([[h], n + h * x]))
        else:
            r2 = float(x @ x)
            xn = float(x @ n)
            out.append(
                h * np.concatenate([[(1 + r2) / 2, (1 - r2) / 2], x])
                + np.concatenate([[xn, -xn], n])
            )
    return np.stack(out)


def sphere_frame_batch(position, normals, mean):
    """Batched sphere-model xi_r = (H^r, n_r + H^r x)."""
    position = np.asarray(position, dtype=float)
    normals = np.asarray(normals, dtype=float)
    mean = np.asarray(mean, dtype=float)
    head = mean[..., None]
    tail = normals + mean[..., None] * position[..., None, :]
    return np.concatenate([head, tail], axis=-1)


def moebius_B(second_form, mean, rho, m: int | None = None):
    """Invariant second fundamental form B and its two constraint residuals.

    Returns (B, trace_residual, norm_residual): sum_j B^r_jj should vanish
    and sum |B|^2 should equal (m-1)/m.
    """
    h = np.asarray(second_form, dtype=float)
    mean_ = np.asarray(mean, dtype=float)
    m = h.shape[-1] if m is None else m
    eye = np.eye(m)
    rho_safe = np.where(np.asarray(rho) > 0, np.asarray(rho), 1.0)  # umbilic points are masked upstream
    b = (h - mean_[..., None, None] * eye) / rho_safe[..., None, None, None]
    tr = np.einsum("...rii->...r", b)
    trace_residual = np.max(np.abs(tr), axis=-1)
    norm_residual = np.abs(np.sum(b * b, axis=(-3, -2, -1)) - (m - 1) / m)
    return b, trace_residual, norm_residual


def moebius_C(second_form, mean, rho, d_mean, d_lnrho, normal_connection):
    """Invariant 1-form C^r_i from third-order data (batched).

    d_mean: (..., p, m) directional derivatives E_i(H^r) in the orthonormal
    tangent frame; d_lnrho: (..., m); normal_connection: (..., m, p, p) with
    entry [i, s, r] = <d n_s (E_i), n_r>.  The covariant derivative is
    H^r_{,i} = E_i(H^r) + sum_s H^s theta^i_{s r}.
    """
    h = np.asarray(second_form, dtype=float)
    mean_ = np.asarray(mean, dtype=float)
    rho_ = np.asarray(rho, dtype=float)
    d_mean = np.asarray(d_mean, dtype=float)
    d_lnrho = np.asarray(d_lnrho, dtype=float)
    conn = np.asarray(normal_connection, dtype=float)
    m = h.shape[-1]
    eye = np.eye(m)
    cov = d_mean + np.einsum("...s,...isr->...ri", mean_, conn)
    tl = h - mean_[..., None, None] * eye
    grad_term = np.einsum("...rij,...j->...ri", tl, d_lnrho)
    return -(cov + grad_term) / (rho_**2)[..., None, None]


def rotate_C_to_adapted(c, tangent_frame_coeffs, normal_angle):
    """Express C in the adapted gauge: tangent index recombined by the given
    frame coefficients, normal index rotated by the SO(2) angle."""
    c = np.asarray(c, dtype=float)
    coeffs = np.asarray(tangent_frame_coeffs, dtype=float)
    th = np.asarray(normal_angle, dtype=float)
    c_t = np.einsum("...ri,...ki->...rk", c, coeffs)
    cth, sth = np.cos(th), np.sin(th)
    c1 = cth[..., None] * c_t[..., 0, :] + sth[..., None] * c_t[..., 1, :]
    c2 = -sth[..., None] * c_t[..., 0, :] + cth[..., None] * c_t[..., 1, :]
    return np.stack([c1, c2], axis=-2)


def rotate_B_to_adapted(b, tangent_frame_coeffs, normal_angle):
    """Same gauge change for the invariant second fundamental form."""
    b = np.asarray(b, dtype=float)
    coeffs = np.asarray(tangent_frame_coeffs, dtype=float)
    th = np.asarray(normal_angle, dtype=float)
    b_t = np.einsum("...ki,...rij,...lj->...rkl", coeffs, b, coeffs)
    cth, sth = np.cos(th), np.sin(th)
    b1 = cth[..., None, None] * b_t[..., 0, :, :] + sth[..., None, None] * b_t[..., 1, :, :]
    b2 = -sth[..., None, None] * b_t[..., 0, :, :] + cth[..., None, None] * b_t[..., 1, :, :]
    return np.stack([b1, b2], axis=-3)


def moebius_data(data: ExtrinsicData, target: str | None = None, c=None) -> MoebiusData:
    """Assemble the pointwise invariant dictionary (C optional)."""
    rho, y = canonical_lift(data, target)
    xi = mean_curvature_spheres(data, target)
    b, _, _ = moebius_B(data.second_form[None], data.mean_curvature[None], np.array([rho]))
    return MoebiusData(
        rho=rho,
        y=y,
        metric=rho**2 * data.metric,
        xi=xi,
        b=b[0],
        c=None if c is None else np.asarray(c, dtype=float),
    )
