"""Extrinsic geometry of sampled immersions: fundamental forms, shape
operators, and harmonicity/conformality residuals for surfaces.

All tensors are expressed in the I-orthonormal tangent frame obtained from
the Cholesky factor of the first fundamental form (deterministic).  For
spherical targets the normal frame is orthogonal to the position vector as
well; it is completed either against a reference gauge (projection + Gram-
Schmidt, keeps fields differentiable) or from a fixed ordered candidate
basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU_RANK = 1e-8
TAU_COMPLETE = 0.35  # minimal residual norm for accepting a completion candidate


class RankError(ValueError):
    """Immersion jet is rank-deficient at the point."""


class CompletionError(ValueError):
    """Normal frame completion failed."""


@dataclass(frozen=True)
class ImmersionJet:
    """Second-order jet of an immersion chart at one point."""

    position: np.ndarray  # (d,)
    first: np.ndarray     # (m, d): rows are d(x)/d(chart_k)
    second: np.ndarray    # (m, m, d): symmetric Hessian block
    chart: tuple = ()


@dataclass(frozen=True)
class ExtrinsicData:
    """Metric, adapted frames, second fundamental form and mean curvature."""

    metric: np.ndarray         # (m, m), SPD
    tangent_frame: np.ndarray  # (m, d), I-orthonormal rows
    tangent_coeffs: np.ndarray  # (m, m): frame = coeffs @ first (rows of L^-1)
    normals: np.ndarray        # (p, d), orthonormal rows
    second_form: np.ndarray    # (p, m, m): h^r_ij in the orthonormal frame
    mean_curvature: np.ndarray  # (p,): H^r = tr(h^r)/m
    position: np.ndarray
    target: str


def fundamental_forms_batch(
    position, first, second, target: str = "sphere", normal_reference=None,
    tau_rank: float = TAU_RANK,
):
    """Batched extrinsic data; returns dict of arrays plus an ok mask.

    position: (N, d); first: (N, m, d); second: (N, m, m, d).
    normal_reference: optional (N, p, d) frames used as a smooth gauge.
    """
    position = np.asarray(position, dtype=float)
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    n, m, d = first.shape
    if target not in ("sphere", "flat"):
        raise ValueError("target must be 'sphere' or 'flat'")
    codim = d - m - (1 if target == "sphere" else 0)
    if codim < 1:
        raise ValueError("no normal directions for this target")

    metric = np.einsum("nkd,nld->nkl", first, first)
    sv = np.linalg.svd(first, compute_uv=False)
    ok = sv[:, -1] > tau_rank * sv[:, 0]

    lchol = np.linalg.cholesky(np.where(ok[:, None, None], metric, np.eye(m)))
    linv = np.linalg.inv(lchol)
    tangent = np.einsum("nik,nkd->nid", linv, first)

    span = [tangent[:, i] for i in range(m)]
    if target == "sphere":
        span.append(position)
    span = np.stack(span, axis=1)  # (N, m(+1), d)

    if normal_reference is not None:
        cands = np.asarray(normal_reference, dtype=float)
        normals, okn = _complete_reference(span, cands, codim)
    else:
        normals, okn = _complete_ordered(span, codim)
    ok = ok & okn

    hfr = np.einsum("nia,njb,nabd->nijd", linv, linv, second)
    h = np.einsum("nijd,npd->npij", hfr, normals)
    mean = np.einsum("npii->np", h) / m
    return {
        "metric": metric,
        "tangent_frame": tangent,
        "tangent_coeffs": linv,
        "normals": normals,
        "second_form": h,
        "mean_curvature": mean,
        "ok": ok,
    }


def _complete_reference(span, refs, count, tau: float = 1e-8):
    """Gram-Schmidt the reference frame against span (smooth gauge path)."""
    n, _, d = span.shape
    out = []
    ok = np.ones(n, dtype=bool)
    for k in range(count):
        v = refs[:, k].astype(float).copy()
        for _ in range(2):  # re-orthogonalize once for numerical quality
            v = v - np.einsum("nkd,nk->nd", span, np.einsum("nkd,nd->nk", span, v))
            for w in out:
                v = v - np.sum(v * w, axis=-1, keepdims=True) * w
        nrm = np.linalg.norm(v, axis=-1)
        ok = ok & (nrm > tau)
        out.append(v / np.where(nrm > tau, nrm, 1.0)[:, None])
    return np.stack(out, axis=1), ok


def _complete_ordered(span, count, tau: float = TAU_COMPLETE):
    """Scan the canonical basis in fixed order, accept sufficiently
    independent candidates (deterministic, gauge-free path)."""
    n, _, d = span.shape
    acc = np.zeros((n, count, d))
    filled = np.zeros(n, dtype=int)
    for c in range(d):
        v = np.zeros((n, d))
        v[:, c] = 1.0
        for _ in range(2):
            v = v - np.einsum("nkd,nk->nd", span, np.einsum("nkd,nd->nk", span, v))
            v = v - np.einsum("nsd,ns->nd", acc, np.einsum("nsd,nd->ns", acc, v))
        nrm = np.linalg.norm(v, axis=-1)
        accept = (nrm > tau) & (filled < count)
        if np.any(accept):
            idx = np.nonzero(accept)[0]
            acc[idx, filled[idx]] = v[idx] / nrm[idx, None]
            filled[idx] += 1
        if np.all(filled >= count):
            break
    return acc, filled >= count


def fundamental_forms(jet: ImmersionJet, target: str = "sphere", normal_reference=None) -> ExtrinsicData:
    """Extrinsic data of a single immersion jet."""
    ref = None if normal_reference is None else np.asarray(normal_reference)[None]
    res = fundamental_forms_batch(
        jet.position[None], jet.first[None], jet.second[None], target, ref
    )
    if not res["ok"][0]:
        raise RankError("rank-deficient jet or failed normal completion")
    return ExtrinsicData(
        metric=res["metric"][0],
        tangent_frame=res["tangent_frame"][0],
        tangent_coeffs=res["tangent_coeffs"][0],
        normals=res["normals"][0],
        second_form=res["second_form"][0],
        mean_curvature=res["mean_curvature"][0],
        position=jet.position.copy(),
        target=target,
    )


def shape_operators(data: ExtrinsicData) -> np.ndarray:
    """Shape operators A_{n_r} = h^r in the I-orthonormal frame (Weingarten)."""
    return data.second_form.copy()


def harmonicity_from_jets(xu, xv, xuu, xvv):
    """Harmonicity and conformality residuals from first/second derivatives.

    Residual is |x_uu + x_vv| / sqrt(|x_u|^2 + |x_v|^2): zero iff minimal for
    conformal parameterizations.  Conformality residual is reported alongside
    (normalized the same way, but quadratic in the first derivatives).
    """
    xu, xv, xuu, xvv = (np.asarray(a, dtype=float) for a in (xu, xv, xuu, xvv))
    g = np.sum(xu * xu, axis=-1) + np.sum(xv * xv, axis=-1)
    harm = np.linalg.norm(xuu + xvv, axis=-1) / np.sqrt(g)
    conf = (
        np.abs(np.sum(xu * xu, axis=-1) - np.sum(xv * xv, axis=-1))
        + np.abs(np.sum(xu * xv, axis=-1))
    ) / g
    return {"harmonicity": harm, "conformality": conf}


def harmonicity_residual(samples, steps=None):
    """Grid-level residuals for a sampled surface (u, v) -> R^k.

    samples: (nu, nv, k) array or a GridField; steps: (du, dv).  Returns
    arrays over the lattice with NaN outside the 2-cell interior.
    """
    from .fdgrid import GridField, field_gradients

    if isinstance(samples, GridField):
        steps = samples.steps
        samples = samples.samples
    samples = np.asarray(samples, dtype=float)
    du, dv = steps
    grad, valid = field_gradients(samples, (du, dv))
    xu, xv = grad[..., 0, :], grad[..., 1, :]
    # second derivatives by Richardson of pure second differences
    nu, nv = samples.shape[:2]
    xuu = np.full_like(samples, np.nan)
    xvv = np.full_like(samples, np.nan)
    s = samples
    xuu[2:-2] = (
        4 * (s[3:-1] - 2 * s[2:-2] + s[1:-3]) / du**2
        - (s[4:] - 2 * s[2:-2] + s[:-4]) / (4 * du**2)
    ) / 3
    xvv[:, 2:-2] = (
        4 * (s[:, 3:-1] - 2 * s[:, 2:-2] + s[:, 1:-3]) / dv**2
        - (s[:, 4:] - 2 * s[:, 2:-2] + s[:, :-4]) / (4 * dv**2)
    ) / 3
    res = harmonicity_from_jets(xu, xv, xuu, xvv)
    res["valid"] = valid & np.isfinite(xuu[..., 0]) & np.isfinite(xvv[..., 0])
    return res
