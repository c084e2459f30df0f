# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: batched Horner evaluation and the rotation-grid scan.

Semantics mirror wintgen._kernels_py exactly (same cached rotation grid,
same flat-order tie-breaking); keep the two in sync.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, fabs, floor, M_PI

cnp.import_array()

_GRID_CACHE = {}


def horner_many(coeffs, z):
    """Evaluate dim polynomials (shared degree) at N points.

    coeffs: (D+1, dim) complex128, ascending degree.  z: (N,) complex128.
    Returns (N, dim).
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t nd = c.shape[0], dim = c.shape[1], n = zz.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((n, dim), dtype=np.complex128)
    cdef Py_ssize_t i, j, k
    cdef double complex acc, zi
    for i in range(n):
        zi = zz[i]
        for j in range(dim):
            acc = c[nd - 1, j]
            for k in range(nd - 2, -1, -1):
                acc = acc * zi + c[k, j]
            out[i, j] = acc
    return out


def _rotation_grid(double step_deg):
    """First two rotation-matrix columns over the Euler grid (cached);
    bit-identical to the pure numpy backend's grid."""
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
    grid = (
        np.ascontiguousarray(q1),
        np.ascontiguousarray(q2),
        shape,
        float(step),
        np.ascontiguousarray(theta_cos),
        np.ascontiguousarray(theta_sin),
    )
    _GRID_CACHE[step_deg] = grid
    return grid


def rotation_scan(A1, A2, double step_deg=3.0):
    """Exhaustive scan over a tangent SO(3) x normal SO(2) rotation grid.

    For each grid rotation the best-fit canonical shape-operator pair (free
    lambda_1, lambda_2, mu_0) is computed in closed form; the normal angle is
    minimized over its own grid.  Returns (fmin, alpha, beta, gamma, theta):
    fmin is the minimal squared Frobenius distance divided by |A|^2.
    """
    a1 = np.asarray(A1, dtype=np.float64)
    a2 = np.asarray(A2, dtype=np.float64)
    cdef double tr1 = (a1[0, 0] + a1[1, 1] + a1[2, 2]) / 3.0
    cdef double tr2 = (a2[0, 0] + a2[1, 1] + a2[2, 2]) / 3.0
    cdef cnp.ndarray[cnp.float64_t, ndim=2] B1 = np.ascontiguousarray(a1 - tr1 * np.eye(3))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] B2 = np.ascontiguousarray(a2 - tr2 * np.eye(3))
    cdef double n2 = 0.0
    cdef Py_ssize_t i, j
    for i in range(3):
        for j in range(3):
            n2 += B1[i, j] * B1[i, j] + B2[i, j] * B2[i, j]
    if n2 == 0.0:
        return 0.0, 0.0, 0.0, 0.0, 0.0

    q1_arr, q2_arr, shape, step_f, tcos_arr, tsin_arr = _rotation_grid(step_deg)
    cdef double[:, ::1] Q1 = q1_arr
    cdef double[:, ::1] Q2 = q2_arr
    cdef double[::1] tcos = tcos_arr
    cdef double[::1] tsin = tsin_arr
    cdef double step = step_f
    cdef Py_ssize_t total = Q1.shape[0]
    cdef Py_ssize_t ntheta = shape[0]

    cdef double b100 = B1[0, 0], b101 = B1[0, 1], b102 = B1[0, 2]
    cdef double b111 = B1[1, 1], b112 = B1[1, 2], b122 = B1[2, 2]
    cdef double b200 = B2[0, 0], b201 = B2[0, 1], b202 = B2[0, 2]
    cdef double b211 = B2[1, 1], b212 = B2[1, 2], b222 = B2[2, 2]

    cdef double best = 1e300
    cdef Py_ssize_t best_idx = 0
    cdef double best_theta = 0.0
    cdef Py_ssize_t n, k1, k2, tk
    cdef double q10, q11, q12, q20, q21, q22
    cdef double w10, w11, w12, w20, w21, w22, v10, v11, v12, v20, v21, v22
    cdef double x1, x2, y1, y2, pc, qc, phi, vv1, vv2, g, f

    for n in range(total):
        q10 = Q1[n, 0]
        q11 = Q1[n, 1]
        q12 = Q1[n, 2]
        q20 = Q2[n, 0]
        q21 = Q2[n, 1]
        q22 = Q2[n, 2]
        # w = B1 q1, v = B1 q2 (B symmetric)
        w10 = b100 * q10 + b101 * q11 + b102 * q12
        w11 = b101 * q10 + b111 * q11 + b112 * q12
        w12 = b102 * q10 + b112 * q11 + b122 * q12
        v10 = b100 * q20 + b101 * q21 + b102 * q22
        v11 = b101 * q20 + b111 * q21 + b112 * q22
        v12 = b102 * q20 + b112 * q21 + b122 * q22
        w20 = b200 * q10 + b201 * q11 + b202 * q12
        w21 = b201 * q10 + b211 * q11 + b212 * q12
        w22 = b202 * q10 + b212 * q11 + b222 * q12
        v20 = b200 * q20 + b201 * q21 + b202 * q22
        v21 = b201 * q20 + b211 * q21 + b212 * q22
        v22 = b202 * q20 + b212 * q21 + b222 * q22

        x1 = w10 * q20 + w11 * q21 + w12 * q22
        x2 = w20 * q20 + w21 * q21 + w22 * q22
        y1 = (w10 * q10 + w11 * q11 + w12 * q12) - (v10 * q20 + v11 * q21 + v12 * q22)
        y2 = (w20 * q10 + w21 * q11 + w22 * q12) - (v20 * q20 + v21 * q21 + v22 * q22)

        pc = 2.0 * x1 + y2
        qc = 2.0 * x2 - y1
        phi = atan2(qc, pc)
        k1 = <Py_ssize_t>floor(phi / step + 0.5) % ntheta
        if k1 < 0:
            k1 += ntheta
        vv1 = fabs(pc * tcos[k1] + qc * tsin[k1])
        k2 = <Py_ssize_t>floor((phi + M_PI) / step + 0.5) % ntheta
        if k2 < 0:
            k2 += ntheta
        vv2 = fabs(pc * tcos[k2] + qc * tsin[k2])
        if vv1 >= vv2:
            g = vv1
            tk = k1
        else:
            g = vv2
            tk = k2
        f = n2 - 0.25 * g * g
        if f < best:
            best = f
            best_idx = n
            best_theta = tk * step

    cdef Py_ssize_t na = shape[0], nb = shape[1]
    cdef Py_ssize_t ia = best_idx // (nb * na)
    cdef Py_ssize_t ib = (best_idx // na) % nb
    cdef Py_ssize_t ig = best_idx % na
    return best / n2, ia * step, ib * step, ig * step, best_theta
