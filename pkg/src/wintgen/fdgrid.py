"""Uniform lattices of sampled vector fields and Richardson-extrapolated jets.

Grid-level derivatives use central differences at strides 1 and 2 (steps h
and 2h) combined by Richardson extrapolation, giving O(h^4) truncation plus
a per-entry error estimate (extrapolation correction + roundoff bound).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps


class BoundaryError(IndexError):
    """Stencil would leave the lattice."""


@dataclass(frozen=True)
class GridField:
    """Samples of a real vector field on a uniform rectangular lattice.

    samples has shape (n1, ..., nk, d); steps gives the lattice spacing per
    axis (length k).
    """

    samples: np.ndarray
    steps: tuple[float, ...]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "steps", tuple(float(s) for s in self.steps))
        if samples.ndim != len(self.steps) + 1:
            raise ValueError(
                f"samples ndim {samples.ndim} does not match {len(self.steps)} axes + fiber"
            )
        if any(s <= 0 for s in self.steps):
            raise ValueError("steps must be positive")
        if not np.all(np.isfinite(samples)):
            raise ValueError("missing or non-finite samples")

    @property
    def naxes(self) -> int:
        return len(self.steps)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.samples.shape[:-1]


@dataclass(frozen=True)
class FDJet:
    """Value, gradient and Hessian block at one lattice point."""

    value: np.ndarray          # (d,)
    gradient: np.ndarray       # (len(axes), d)
    hessian: np.ndarray        # (len(axes), len(axes), d)
    gradient_err: np.ndarray   # same shape as gradient
    hessian_err: np.ndarray    # same shape as hessian
    axes: tuple[int, ...]


def _shift(samples, index, axis, offset):
    idx = list(index)
    idx[axis] += offset
    return samples[tuple(idx)]


def fd_jet(field: GridField, index, axes=None) -> FDJet:
    """Richardson-extrapolated jets at a lattice point.

    index must be at least 2 cells from the boundary along every requested
    axis; raises BoundaryError otherwise.
    """
    axes = tuple(range(field.naxes)) if axes is None else tuple(axes)
    index = tuple(int(i) for i in index)
    if len(index) != field.naxes:
        raise ValueError("index length does not match lattice rank")
    for a in axes:
        if index[a] < 2 or index[a] > field.shape[a] - 3:
            raise BoundaryError(f"index {index} too close to boundary on axis {a}")

    s = field.samples
    f0 = s[index]
    d = f0.shape[-1]
    na = len(axes)
    grad = np.zeros((na, d))
    grad_err = np.zeros((na, d))
    hess = np.zeros((na, na, d))
    hess_err = np.zeros((na, na, d))

    fscale = np.abs(f0)
    for ai, a in enumerate(axes):
        h = field.steps[a]
        fp1 = _shift(s, index, a, 1)
        fm1 = _shift(s, index, a, -1)
        fp2 = _shift(s, index, a, 2)
        fm2 = _shift(s, index, a, -2)
        fscale = np.maximum.reduce([fscale, np.abs(fp1), np.abs(fm1), np.abs(fp2), np.abs(fm2)])
        d1 = (fp1 - fm1) / (2 * h)
        d1c = (fp2 - fm2) / (4 * h)
        grad[ai] = (4 * d1 - d1c) / 3
        grad_err[ai] = np.abs(d1 - d1c) / 3 + 4 * EPS * fscale / h
        s1 = (fp1 - 2 * f0 + fm1) / h**2
        s1c = (fp2 - 2 * f0 + fm2) / (4 * h**2)
        hess[ai, ai] = (4 * s1 - s1c) / 3
        hess_err[ai, ai] = np.abs(s1 - s1c) / 3 + 8 * EPS * fscale / h**2

    for ai, a in enumerate(axes):
        for bj in range(ai + 1, na):
            b = axes[bj]
            ha, hb = field.steps[a], field.steps[b]

            def corner(sa, sb, k):
                idx = list(index)
                idx[a] += sa * k
                idx[b] += sb * k
                return s[tuple(idx)]

            def mixed(k):
                return (corner(1, 1, k) - corner(1, -1, k) - corner(-1, 1, k) + corner(-1, -1, k)) / (
                    4 * k * k * ha * hb
                )

            m1 = mixed(1)
            m2 = mixed(2)
            hess[ai, bj] = hess[bj, ai] = (4 * m1 - m2) / 3
            err = np.abs(m1 - m2) / 3 + 8 * EPS * fscale / (ha * hb)
            hess_err[ai, bj] = hess_err[bj, ai] = err

    return FDJet(
        value=f0.copy(),
        gradient=grad,
        hessian=hess,
        gradient_err=grad_err,
        hessian_err=hess_err,
        axes=axes,
    )


def field_gradients(samples: np.ndarray, steps, axes=None):
    """Vectorized Richardson first derivatives of a field at every point.

    samples: (..., d) over a lattice; returns (grad, valid) where grad has
    shape lattice + (len(axes), d) with NaN outside the 2-cell interior, and
    valid is the boolean interior mask.
    """
    samples = np.asarray(samples, dtype=float)
    naxes = samples.ndim - 1
    axes = tuple(range(naxes)) if axes is None else tuple(axes)
    lat = samples.shape[:-1]
    d = samples.shape[-1]
    grad = np.full(lat + (len(axes), d), np.nan)
    valid = np.ones(lat, dtype=bool)
    for ai, a in enumerate(axes):
        h = steps[a]
        n = lat[a]
        if n < 5:
            raise BoundaryError(f"axis {a} too short for stride-2 stencils")
        sl = [slice(None)] * samples.ndim

        def at(off):
            sl2 = list(sl)
            sl2[a] = slice(2 + off, n - 2 + off)
            return samples[tuple(sl2)]

        d1 = (at(1) - at(-1)) / (2 * h)
        d1c = (at(2) - at(-2)) / (4 * h)
        gsl = [slice(2, n - 2) if k == a else slice(None) for k in range(naxes)]
        grad[tuple(gsl) + (ai,)] = (4 * d1 - d1c) / 3
        vsl = [slice(None)] * naxes
        vsl[a] = slice(0, 2)
        valid[tuple(vsl)] = False
        vsl[a] = slice(n - 2, n)
        valid[tuple(vsl)] = False
    return grad, valid


def pad_periodic(samples: np.ndarray, axis: int, cells: int = 2) -> np.ndarray:
    """Extend a field periodically along one lattice axis (for angle charts)."""
    samples = np.asarray(samples)
    head = [slice(None)] * samples.ndim
    tail = [slice(None)] * samples.ndim
    head[axis] = slice(0, cells)
    tail[axis] = slice(-cells, None)
    return np.concatenate([samples[tuple(tail)], samples, samples[tuple(head)]], axis=axis)


def write_csv(field: GridField, path) -> None:
    """One row per lattice point: indices then vector components."""
    lat = field.shape
    d = field.samples.shape[-1]
    with open(path, "w") as fh:
        fh.write("# gridfield steps=" + ",".join(repr(s) for s in field.steps))
        fh.write(" shape=" + ",".join(str(n) for n in lat) + "\n")
        fh.write(",".join([f"i{k}" for k in range(len(lat))] + [f"c{k}" for k in range(d)]) + "\n")
        for idx in np.ndindex(*lat):
            row = list(map(str, idx)) + [repr(float(v)) for v in field.samples[idx]]
            fh.write(",".join(row) + "\n")


def read_csv(path) -> GridField:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# gridfield"):
            raise ValueError("not a gridfield CSV")
        parts = dict(p.split("=") for p in header.split()[2:])
        steps = tuple(float(x) for x in parts["steps"].split(","))
        shape = tuple(int(x) for x in parts["shape"].split(","))
        fh.readline()  # column header
        rows = [line.strip().split(",") for line in fh if line.strip()]
    k = len(shape)
    d = len(rows[0]) - k
    samples = np.zeros(shape + (d,))
    for row in rows:
        idx = tuple(int(x) for x in row[:k])
        samples[idx] = [float(x) for x in row[k:]]
    return GridField(samples=samples, steps=steps)
