"""Envelope of the 2-parameter sphere family attached to a quadric curve.

At each curve point the lift xi = xi1 - i xi2 and its derivative span a
4-dimensional spacelike subspace V (when the curve is regular); the envelope
consists of the lightlike directions in the complement V-perp, parameterized
over the fiber sphere S^{m-2} by  Yhat = e0 + sum_j Theta_j e_j  for a
pseudo-orthonormal frame {e0; e1..e_{m-1}} of V-perp.  Frames are continued
deterministically along a row-major sweep of the z-grid so that the sampled
immersion is smooth, and local Richardson stencils give its jets.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lorentz import gram, inner, orthonormal_complement, subspace_signature

TAU_CHART = 1e-9
TAU_REG = 1e-12


class RegularityError(ValueError):
    """The curve is not regular (V fails to be 4-dimensional spacelike)."""

    def __init__(self, msg, signature=None):
        super().__init__(msg)
        self.signature = signature


class ChartError(ValueError):
    """Envelope point at infinity of the chosen projective chart."""


@dataclass(frozen=True)
class CongruenceFrame:
    """Adapted frame at one curve point: V = span(v_frame), V-perp = span(complement)."""

    z: complex
    v_frame: np.ndarray     # (4, dim): xi1, xi2, eta1, eta2, orthonormal spacelike
    complement: np.ndarray  # (m, dim): e0 timelike, e1..e_{m-1} spacelike


@dataclass(frozen=True)
class EnvelopeSample:
    z: complex
    theta: np.ndarray   # unit vector in R^{m-1}
    yhat: np.ndarray    # lightlike, first component positive
    xhat: np.ndarray    # point of S^{m+2} in R^{m+3}


def _v_frame_batch(xi, xi_z, tau_reg=TAU_REG):
    """Orthonormal (xi1, xi2, eta1, eta2) from lift jets; batched.

    Returns (vframes (N,4,dim), ok (N,) bool); entries with ok=False hold a
    fixed placeholder frame so downstream batched linear algebra stays
    finite (their results are discarded through the mask).
    """
    nrm = inner(xi, np.conj(xi)).real
    ok = nrm > tau_reg * np.sum(np.abs(xi) ** 2, axis=-1)
    safe_nrm = np.where(ok, nrm, 1.0)
    xin = xi * np.sqrt(2.0 / safe_nrm)[..., None]
    w = xi_z - (inner(xi_z, np.conj(xin)) / 2.0)[..., None] * xin
    hw = inner(w, np.conj(w)).real
    ok = ok & (hw > tau_reg * np.maximum(np.sum(np.abs(xi_z) ** 2, axis=-1), 1e-300))
    eta = w * np.sqrt(2.0 / np.where(ok, hw, 1.0))[..., None]
    v = np.stack([xin.real, -xin.imag, eta.real, eta.imag], axis=-2)
    # spacelike-4 verification: Gram must be close to the identity
    g = gram(v)
    defect = np.max(np.abs(g - np.eye(4)), axis=(-2, -1))
    ok = ok & (defect < 1e-6)
    if not np.all(ok):
        dim = v.shape[-1]
        placeholder = np.zeros((4, dim))
        placeholder[np.arange(4), np.arange(2, 6)] = 1.0
        v = np.where(ok[..., None, None], v, placeholder)
    return v, ok


def _complement_batch(vframes, refs):
    """Continue complement frames from reference frames; batched.

    refs: (N, m, dim) pseudo-orthonormal frames near the target complements.
    The timelike direction is extracted from the Gram eigendecomposition of
    the projected references; the spacelike part is completed by
    Gram-Schmidt, sign-aligned with the references.
    """
    n, m, dim = refs.shape
    proj = refs - np.einsum("nkd,njd->nkj", refs * _eta(dim), vframes) @ vframes
    g = np.einsum("nkd,d,njd->nkj", proj, _eta(dim), proj)
    lam, u = np.linalg.eigh(g)
    # the unique negative eigenvalue is the smallest
    neg = lam[:, 0]
    ok = neg < 0
    e0 = np.einsum("nk,nkd->nd", u[:, :, 0], proj) / np.sqrt(np.where(ok, -neg, 1.0))[:, None]
    flip = inner(e0, refs[:, 0]) > 0
    e0 = np.where(flip[:, None], -e0, e0)
    out = [e0]
    for k in range(1, m):
        v = proj[:, k]
        v = v + inner(v, e0)[:, None] * e0
        for w in out[1:]:
            v = v - inner(v, w)[:, None] * w
        nrm2 = inner(v, v)
        ok = ok & (nrm2 > 0)
        v = v / np.sqrt(np.where(nrm2 > 0, nrm2, 1.0))[:, None]
        flip = inner(v, refs[:, k]) < 0
        v = np.where(flip[:, None], -v, v)
        out.append(v)
    return np.stack(out, axis=1), ok


def _eta(dim):
    e = np.ones(dim)
    e[0] = -1.0
    return e


class SphereCongruence:
    """Frame and envelope evaluation engine for a curve z -> C^{m+4}."""

    def __init__(self, curve, m: int):
        if curve.dim != m + 4:
            raise ValueError(f"curve dimension {curve.dim} != m+4 = {m + 4}")
        self.curve = curve
        self.m = m
        self.dim = m + 4

    def frame_at(self, z: complex, previous: CongruenceFrame | None = None) -> CongruenceFrame:
        """Congruence frame at one point; continuation-aligned when previous given."""
        vals = self.curve.eval_many(np.array([z], dtype=complex), order=1)
        v, ok = _v_frame_batch(vals[0], vals[1])
        if not ok[0]:
            sig = subspace_signature(_real_span_raw(vals[0][0], vals[1][0]))
            raise RegularityError(
                f"curve not regular at z={z}: V signature {sig}", signature=sig
            )
        if previous is None:
            comp = orthonormal_complement(v[0], (1, self.m - 1)).vectors
        else:
            comp, okc = _complement_batch(v, previous.complement[None, :, :])
            if not okc[0]:
                raise RegularityError(f"complement continuation failed at z={z}")
            comp = comp[0]
        return CongruenceFrame(z=complex(z), v_frame=v[0], complement=comp)

    def frames_grid(self, u, v):
        """Row-major continued frames over a (u, v) grid.

        Returns (vframes (nu,nv,4,dim), complements (nu,nv,m,dim), ok mask).
        Degenerate points are masked, not fatal; a fully degenerate curve
        yields an empty regular set.
        """
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        nu, nv = len(u), len(v)
        z = u[:, None] + 1j * v[None, :]
        vals = self.curve.eval_many(z.ravel(), order=1)
        vfr, ok = _v_frame_batch(vals[0], vals[1])
        vfr = vfr.reshape(nu, nv, 4, self.dim)
        ok = ok.reshape(nu, nv)
        comps = np.zeros((nu, nv, self.m, self.dim))
        comps[:, :, :, 2 : self.m + 2] = np.eye(self.m)  # finite placeholder
        if not np.any(ok):
            return vfr, comps, np.zeros((nu, nv), dtype=bool)
        i0, j0 = np.argwhere(ok)[0]
        seed = orthonormal_complement(vfr[i0, j0], (1, self.m - 1)).vectors
        comps[i0, j0] = seed
        # sweep the seed column, then continue column by column both ways
        for i in list(range(i0 + 1, nu)) + list(range(i0 - 1, -1, -1)):
            ref = comps[i + (1 if i < i0 else -1), j0]
            c, okc = _complement_batch(vfr[i, j0][None], ref[None])
            comps[i, j0] = c[0]
            ok[i, j0] &= okc[0]
        for j in list(range(j0 + 1, nv)) + list(range(j0 - 1, -1, -1)):
            refs = comps[:, j + (1 if j < j0 else -1)]
            c, okc = _complement_batch(vfr[:, j], refs)
            comps[:, j] = c
            ok[:, j] &= okc
        return vfr, comps, ok

    def evaluate(self, z, theta, refs, perturbation=None, chart_coords=None):
        """Envelope points for flattened arrays of (z, Theta, reference frame).

        theta: (N, m-1) unit fiber vectors; refs: (N, m, dim) reference
        complements.  Returns (xhat (N, m+3), ok (N,)).
        """
        z = np.asarray(z, dtype=complex).ravel()
        vals = self.curve.eval_many(z, order=1)
        vfr, ok = _v_frame_batch(vals[0], vals[1])
        comp, okc = _complement_batch(vfr, refs)
        ok = ok & okc
        yhat = comp[:, 0] + np.einsum("nk,nkd->nd", theta, comp[:, 1:])
        y0 = yhat[:, 0]
        ok = ok & (np.abs(y0) > TAU_CHART)
        xhat = yhat[:, 1:] / np.where(np.abs(y0) > TAU_CHART, y0, 1.0)[:, None]
        if perturbation is not None:
            if chart_coords is None:
                raise ValueError("perturbation needs chart coordinates")
            xhat = xhat + perturbation(*chart_coords, xhat)
            xhat = xhat / np.linalg.norm(xhat, axis=-1, keepdims=True)
        return xhat, ok


def _real_span_raw(xi, xi_z):
    return np.stack([xi.real, xi.imag, xi_z.real, xi_z.imag])


def envelope_point(frame: CongruenceFrame, theta, tau_chart: float = TAU_CHART) -> EnvelopeSample:
    """Envelope point [e0 + sum Theta_j e_j] in the affine chart of S^{m+2}."""
    theta = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(theta) - 1.0) > 1e-12:
        raise ValueError("Theta must be a unit vector")
    yhat = frame.complement[0] + theta @ frame.complement[1:]
    y0 = yhat[0]
    if abs(y0) <= tau_chart:
        raise ChartError(f"envelope point at infinity of the chart (Yhat^0 = {y0:.2e})")
    if y0 < 0:
        yhat = -yhat
    return EnvelopeSample(z=frame.z, theta=theta, yhat=yhat, xhat=yhat[1:] / yhat[0])


def fiber_theta(m: int, t, base=None):
    """Fiber chart: angle chart on S^1 for m=3, orthographic for m>3.

    For m=3, t is an array of angles.  For m>3, t has shape (..., m-2) with
    |t| < 1, and base is the chart center on S^{m-2} (defaults to the first
    coordinate vector).
    """
    if m == 3:
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    t = np.atleast_2d(np.asarray(t, dtype=float))
    if t.shape[-1] != m - 2:
        raise ValueError("orthographic chart needs m-2 coordinates")
    if base is None:
        base = np.zeros(m - 1)
        base[0] = 1.0
    base = np.asarray(base, dtype=float)
    tangent = _sphere_tangent_basis(base)
    r2 = np.sum(t * t, axis=-1)
    if np.any(r2 >= 1.0):
        raise ChartError("orthographic chart coordinates must satisfy |y| < 1")
    return np.sqrt(1.0 - r2)[..., None] * base + t @ tangent


def _sphere_tangent_basis(base):
    n = base.shape[0]
    idx = int(np.argmax(np.abs(base)))
    mat = [base]
    for k in range(n):
        if k == idx:
            continue
        e = np.zeros(n)
        e[k] = 1.0
        mat.append(e)
    q, r = np.linalg.qr(np.stack(mat, axis=1))
    q = q * np.sign(np.diag(r))
    return q[:, 1:].T
