"""Pure numpy implementations of the hot kernels.

These are the fallbacks selected when the compiled extension is not
available; results must match wintgen._kernels up to float reassociation
(see tests/test_kernels.py).
"""
from __future__ import annotations

import numpy as np

_GRID_CACHE: dict = {}


def horner_many(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate dim polynomials (shared degree) at N points.

    coeffs: (D+1, dim) complex128, ascending degree.  z: (N,) complex128.
    Returns (N, dim).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    n = z.shape[0]
    out = np.repeat(coeffs[-1][None, :], n, axis=0)
    for k in range(coeffs.shape[0] - 2, -1, -1):
        out *= z[:, None]
        out += coeffs[k]
    return out


def _rotation_grid(step_deg: float):
    """First two rotation-matrix columns over the Euler grid (cached)."""
    if step_deg in _GRID_CACHE:
        return _GRID_CACHE[step_deg]
    step = np.deg2rad(step_deg)
    na = int(round(2 * np.pi / step))
    nb = int(round(np.pi / step)) + 1
    alpha = np.arange(na) * step
    beta = np.arange(nb) * step
    gamma = np.arange(na) * step
    ca, sa = np.cos(alpha)[:, None, None], np.sin(alpha)[:, None, None]
    cb, sb = np.cos(beta)[None, :, None], np.sin(beta)[None, :, None]
    cg, sg = np.cos(gamma)[None, None, :], np.sin(gamma)[None, None, :]
    shape = (na, nb, na)
    q1 = np.stack(
        [
            np.broadcast_to(ca * cb * cg - sa * sg, shape),
            np.broadcast_to(sa * cb * cg + ca * sg, shape),
            np.broadcast_to(-sb * cg, shape),
        ],
        axis=-1,
    ).reshape(-1, 3)
    q2 = np.stack(
        [
            np.broadcast_to(-ca * cb * sg - sa * cg, shape),
            np.broadcast_to(-sa * cb * sg + ca * cg, shape),
            np.broadcast_to(sb * sg, shape),
        ],
        axis=-1,
    ).reshape(-1, 3)
    theta_cos = np.cos(np.arange(na) * step)
    theta_sin = np.sin(np.arange(na) * step)
    grid = (q1, q2, shape, step, theta_cos, theta_sin)
    _GRID_CACHE[step_deg] = grid
    return grid


def rotation_scan(A1: np.ndarray, A2: np.ndarray, step_deg: float = 3.0):
    """Exhaustive scan over a tangent SO(3) x normal SO(2) rotation grid.

    For each grid rotation the best-fit canonical shape-operator pair (free
    lambda_1, lambda_2, mu_0) is computed in closed form; the normal angle is
    minimized over its own grid.  Returns (fmin, alpha, beta, gamma, theta):
    fmin is the minimal squared Frobenius distance divided by |A|^2.
    """
    A1 = np.asarray(A1, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    A1t = A1 - np.trace(A1) / 3.0 * np.eye(3)
    A2t = A2 - np.trace(A2) / 3.0 * np.eye(3)
    n2 = float(np.sum(A1t * A1t) + np.sum(A2t * A2t))
    if n2 == 0.0:
        return 0.0, 0.0, 0.0, 0.0, 0.0

    q1, q2, shape, step, tcos, tsin = _rotation_grid(step_deg)
    ntheta = shape[0]
    total = q1.shape[0]

    best_f = np.inf
    best_idx = 0
    best_theta = 0.0
    chunk = 65536
    for s in range(0, total, chunk):
        e = min(s + chunk, total)
        q1c, q2c = q1[s:e], q2[s:e]
        q1a1 = q1c @ A1t
        q1a2 = q1c @ A2t
        q2a1 = q2c @ A1t
        q2a2 = q2c @ A2t
        x1 = np.einsum("nd,nd->n", q1a1, q2c)
        x2 = np.einsum("nd,nd->n", q1a2, q2c)
        y1 = np.einsum("nd,nd->n", q1a1, q1c) - np.einsum("nd,nd->n", q2a1, q2c)
        y2 = np.einsum("nd,nd->n", q1a2, q1c) - np.einsum("nd,nd->n", q2a2, q2c)

        pc = 2.0 * x1 + y2
        qc = 2.0 * x2 - y1
        phi = np.arctan2(qc, pc)
        k1 = np.floor(phi / step + 0.5).astype(np.int64) % ntheta
        v1 = np.abs(pc * tcos[k1] + qc * tsin[k1])
        k2 = np.floor((phi + np.pi) / step + 0.5).astype(np.int64) % ntheta
        v2 = np.abs(pc * tcos[k2] + qc * tsin[k2])
        g = np.maximum(v1, v2)
        f = n2 - 0.25 * g * g
        loc = int(np.argmin(f))
        if f[loc] < best_f:
            best_f = float(f[loc])
            best_idx = s + loc
            best_theta = float(int(np.where(v1[loc] >= v2[loc], k1[loc], k2[loc])) * step)
    idx = np.unravel_index(best_idx, shape)
    return (
        best_f / n2,
        float(idx[0] * step),
        float(idx[1] * step),
        float(idx[2] * step),
        best_theta,
    )
