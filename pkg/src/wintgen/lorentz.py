"""Linear algebra in the Lorentz space R^{m+4}_1 and its complexification.

Vectors are plain numpy arrays with the timelike coordinate first, so the
bilinear form is  <u, v> = -u[0] v[0] + u[1] v[1] + ... + u[n-1] v[n-1].
The complex inner product is the bilinear (unconjugated) extension.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU_FRAME = 1e-10
TAU_RANK = 1e-8  # relative to the largest Gram eigenvalue


class DegenerateSpanError(ValueError):
    """Input vectors span a degenerate (or rank-deficient) subspace."""


class SignatureError(ValueError):
    """Computed signature does not match the expected one."""


def inner(u, v):
    """Lorentz inner product -u0 v0 + sum_k uk vk, batched over leading axes."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


# The bilinear extension to complex vectors is the same arithmetic.
cinner = inner


def conj_inner(u, v):
    """<u, conj v>; real and equal to inner(u, u) when u == v is real."""
    return inner(u, np.conj(v))


def gram(vectors):
    """Gram matrix of the Lorentz form, vectors stacked along axis -2."""
    vectors = np.asarray(vectors)
    eta = np.ones(vectors.shape[-1])
    eta[0] = -1.0
    return np.einsum("...id,d,...jd->...ij", vectors, eta, vectors)


def subspace_signature(vectors, tau_rank: float = TAU_RANK):
    """Counts (neg, pos, null) of Gram eigenvalues of the given vectors.

    Null means |eigenvalue| below tau_rank times the largest magnitude
    eigenvalue, so the classification is scale invariant.
    """
    g = gram(np.atleast_2d(np.asarray(vectors, dtype=float)))
    eigs = np.linalg.eigvalsh(g)
    scale = np.max(np.abs(eigs)) if eigs.size else 0.0
    if scale == 0.0:
        return (0, 0, len(eigs))
    thresh = tau_rank * scale
    neg = int(np.sum(eigs < -thresh))
    pos = int(np.sum(eigs > thresh))
    return (neg, pos, len(eigs) - neg - pos)


@dataclass(frozen=True)
class PseudoFrame:
    """Pseudo-orthonormal vectors with Gram diag(-1,..,-1,+1,..,+1)."""

    vectors: np.ndarray  # (k, dim), timelike vectors first
    signature: tuple[int, int]  # (negCount, posCount)

    def __post_init__(self):
        neg, pos = self.signature
        if len(self.vectors) != neg + pos:
            raise SignatureError(
                f"{len(self.vectors)} vectors for signature {self.signature}"
            )

    def gram_defect(self) -> float:
        neg, pos = self.signature
        target = np.diag(np.r_[-np.ones(neg), np.ones(pos)])
        return float(np.max(np.abs(gram(self.vectors) - target)))

    def validate(self, tau: float = TAU_FRAME) -> "PseudoFrame":
        d = self.gram_defect()
        if d > tau:
            raise SignatureError(f"frame Gram defect {d:.3e} exceeds {tau:.1e}")
        return self


def project_out(v, basis, basis_gram_inv=None):
    """Lorentz-orthogonal projection of v onto the complement of span(basis).

    basis must span a nondegenerate subspace; its inverse Gram matrix can be
    passed in when projecting many vectors against the same span.
    """
    basis = np.asarray(basis, dtype=float)
    if basis_gram_inv is None:
        g = gram(basis)
        basis_gram_inv = np.linalg.inv(g)
    coeff = basis_gram_inv @ inner(basis, np.asarray(v))
    return v - coeff @ basis


def orthonormal_complement(
    basis,
    expected_signature: tuple[int, int],
    seed_frame=None,
    tau_frame: float = TAU_FRAME,
    tau_rank: float = TAU_RANK,
) -> PseudoFrame:
    """Pseudo-orthonormal frame of the orthogonal complement of span(basis).

    The timelike directions are extracted first by diagonalizing the Gram
    matrix of the projected seed vectors; the spacelike part is completed by
    modified Gram-Schmidt over the remaining seeds ordered by |self-inner|
    descending.  Deterministic: identical inputs give identical outputs.
    seed_frame defaults to the canonical basis vectors.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    dim = basis.shape[-1]
    neg, pos = expected_signature
    k = neg + pos

    gb = gram(basis)
    eigs = np.linalg.eigvalsh(gb)
    if np.min(np.abs(eigs)) <= tau_rank * np.max(np.abs(eigs)):
        raise DegenerateSpanError(
            f"basis spans a degenerate subspace (Gram eigenvalues {eigs})"
        )
    gb_inv = np.linalg.inv(gb)

    if seed_frame is None:
        seed_frame = np.eye(dim)
    seeds = np.atleast_2d(np.asarray(seed_frame, dtype=float))

    projected = np.stack([project_out(s, basis, gb_inv) for s in seeds])
    pg = gram(projected)
    lam, u = np.linalg.eigh(pg)
    scale = np.max(np.abs(lam))
    if scale == 0.0:
        raise DegenerateSpanError("seed projections vanish")
    signif = np.abs(lam) > tau_rank * scale
    got_neg = int(np.sum(lam[signif] < 0))
    got_pos = int(np.sum(lam[signif] > 0))
    if got_neg + got_pos < k:
        raise DegenerateSpanError(
            "projected seeds do not span the complement; provide a seed frame"
        )
    if got_neg != neg:
        raise SignatureError(
            f"complement signature ({got_neg},{got_pos}), expected {expected_signature}"
        )

    out = []
    # timelike directions from the Gram eigenvectors (negative eigenvalues,
    # most negative first)
    for idx in np.argsort(lam):
        if len(out) == neg or lam[idx] >= 0:
            break
        vec = (projected.T @ u[:, idx]) / np.sqrt(-lam[idx])
        if vec[0] < 0:
            vec = -vec
        for w in out:
            vec = vec + inner(vec, w) * w  # <w,w> = -1
        nrm2 = -inner(vec, vec)
        if nrm2 <= 0:
            raise DegenerateSpanError("timelike extraction failed")
        out.append(vec / np.sqrt(nrm2))

    # spacelike completion: MGS over projected seeds, |self-inner| descending
    self_inners = inner(projected, projected)
    order = np.argsort(-np.abs(self_inners), kind="stable")
    for idx in order:
        if len(out) == k:
            break
        vec = projected[idx]
        for w in out:
            sgn = np.sign(inner(w, w))
            vec = vec - sgn * inner(vec, w) * w
        nrm2 = inner(vec, vec)
        if nrm2 <= tau_rank * scale:
            continue
        idx0 = int(np.argmax(np.abs(vec)))
        if vec[idx0] < 0:
            vec = -vec
        out.append(vec / np.sqrt(nrm2))

    if len(out) != k:
        raise DegenerateSpanError("could not complete the complement frame")

    frame = PseudoFrame(np.stack(out), expected_signature).validate(tau_frame)
    for b in basis:
        r = np.max(np.abs(inner(frame.vectors, b)))
        if r > tau_frame * max(1.0, float(np.linalg.norm(b))):
            raise SignatureError(f"complement not orthogonal to basis: {r:.3e}")
    return frame
