"""Brute-force certification of the canonical shape-operator form.

Independent of the algebraic defect functional: exhaustively scans a grid of
tangent SO(3) x normal SO(2) rotations (Euler angles at a fixed step) and
minimizes the Frobenius distance to the canonical pair over the free
parameters (lambda_1, lambda_2, mu_0), which are fitted in closed form per
rotation.  Only m = 3 is supported (the acceptance scale).
"""
from __future__ import annotations

import numpy as np

from ._backend import rotation_scan

# Worst case for an exactly ideal pair on a 3 degree grid is a rotation
# offset of ~1.5 degrees per angle, giving a normalized squared distance of
# a few 1e-3; generic non-ideal pairs sit orders of magnitude higher.
IDEAL_THRESHOLD = 2e-2


def min_canonical_distance(a1, a2, step_deg: float = 3.0, backend=None) -> float:
    """Normalized squared distance to the canonical form, minimized over the grid."""
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    if a1.shape != (3, 3) or a2.shape != (3, 3):
        raise ValueError("the brute-force scan supports m = 3 only")
    scan = rotation_scan if backend is None else backend.rotation_scan
    return float(scan(a1, a2, step_deg)[0])


def is_ideal(a1, a2, step_deg: float = 3.0, threshold: float = IDEAL_THRESHOLD) -> bool:
    """Grid decision: is the pair (approximately) in the ideal orbit?"""
    return min_canonical_distance(a1, a2, step_deg) < threshold


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_ideal_pair(rng: np.random.Generator, m: int = 3, with_trace: bool = True):
    """Random pair in the ideal orbit: random frames, normal angle and scale."""
    mu0 = float(rng.uniform(0.2, 2.0))
    b1 = np.zeros((m, m))
    b2 = np.zeros((m, m))
    b1[0, 1] = b1[1, 0] = mu0
    b2[0, 0] = mu0
    b2[1, 1] = -mu0
    if with_trace:
        b1 += rng.uniform(-1, 1) * np.eye(m)
        b2 += rng.uniform(-1, 1) * np.eye(m)
    th = rng.uniform(0, 2 * np.pi)
    c, s = np.cos(th), np.sin(th)
    a1 = c * b1 - s * b2
    a2 = s * b1 + c * b2
    q = random_rotation(rng, m)
    return q @ a1 @ q.T, q @ a2 @ q.T


def random_generic_pair(rng: np.random.Generator, m: int = 3, min_defect: float = 5e-2):
    """Random symmetric pair rejected until clearly outside the ideal orbit."""
    from .canonical import traceless_pair, wintgen_defect_batch

    while True:
        a1 = rng.standard_normal((m, m))
        a2 = rng.standard_normal((m, m))
        a1 = (a1 + a1.T) / 2
        a2 = (a2 + a2.T) / 2
        t1, t2, _, _ = traceless_pair(a1, a2)
        if wintgen_defect_batch(t1[None], t2[None])["defect"][0] > min_defect:
            return a1, a2
