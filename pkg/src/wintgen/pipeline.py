"""End-to-end verification pipelines over sampled envelopes.

Stages:
  1. build_envelope: sample the envelope immersion on a (u, v, fiber) grid
     with Richardson jets from local stencils (step fd_step).
  2. moebius_fields: extrinsic + invariant data per sample in the smooth
     curve-aligned normal gauge; canonical-form certification.
  3. third_order_checks: derivatives of the second-order fields by outer
     Richardson stencils (step fd_outer) through the same frame-continued
     evaluation, giving the invariant 1-form symmetries, the Gauss-map
     residuals and the submersion factor.
  4. centers_checks: center-surface minimality along both computation paths.

All randomness is seeded; reports are plain dicts of floats/lists so JSON
serialization is byte-stable for identical configs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import canonical, centers, immersion, moebius, quadric, stereo
from .envelope import SphereCongruence, _sphere_tangent_basis, fiber_theta
from .lorentz import inner
from .weierstrass import WeierstrassData, lift_to_quadric, load_fixture, weierstrass_isotropic


def default_tolerances() -> dict:
    return {
        "roundtrip": 1e-12,
        "wintgen_defect_max": 1e-4,
        "perturbed_defect_median_min": 1e-3,
        "sphere_recovery": 1e-4,
        "gauss_fiber": 1e-4,
        "gauss_isotropy": 1e-4,
        "gauss_isotropy_analytic": 1e-12,
        "submersion": 1e-3,
        "b_trace": 1e-10,
        "b_norm": 1e-10,
        "c_symmetry": 1e-3,
        "minimal_analytic": 1e-10,
        "minimal_fd": 1e-4,
        "cross_path": 1e-10,
    }


@dataclass
class PipelineConfig:
    """Batch configuration; see README for the JSON schema."""

    m: int = 3
    fixture: str | None = "enneper5"
    weierstrass: dict | None = None
    u_range: tuple[float, float] = (0.15, 0.95)
    v_range: tuple[float, float] = (0.15, 0.95)
    nu: int = 9
    nv: int = 9
    fiber_samples: int = 8
    fd_step: float = 1e-3
    fd_outer: float = 1e-2
    fd_centers: float = 4e-2
    tolerances: dict = field(default_factory=default_tolerances)
    poles: list | None = None
    outputs: list = field(default_factory=list)
    seed: int = 7

    def __post_init__(self):
        if self.nu < 5 or self.nv < 5:
            raise ValueError("need nu, nv >= 5")
        if self.fiber_samples < 4:
            raise ValueError("need fiberSamples >= 4")
        tols = default_tolerances()
        tols.update(self.tolerances or {})
        self.tolerances = tols
        if any(v <= 0 for v in self.tolerances.values()):
            raise ValueError("tolerances must be positive")
        if self.fd_step <= 0 or self.fd_outer <= 0:
            raise ValueError("FD steps must be positive")

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        keymap = {
            "uRange": "u_range",
            "vRange": "v_range",
            "fiberSamples": "fiber_samples",
            "fdStep": "fd_step",
            "fdOuter": "fd_outer",
            "fdCenters": "fd_centers",
        }
        kwargs = {}
        for k, v in doc.items():
            if k == "zDomain":
                kwargs["u_range"] = tuple(v["uRange"])
                kwargs["v_range"] = tuple(v["vRange"])
                kwargs["nu"] = int(v["nu"])
                kwargs["nv"] = int(v["nv"])
                continue
            if k not in keymap and k not in cls.__dataclass_fields__:
                raise ValueError(f"unknown config field: {k}")
            kwargs[keymap.get(k, k)] = v
        if "u_range" in kwargs:
            kwargs["u_range"] = tuple(kwargs["u_range"])
        if "v_range" in kwargs:
            kwargs["v_range"] = tuple(kwargs["v_range"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "fixture": self.fixture,
            "weierstrass": self.weierstrass,
            "zDomain": {
                "uRange": list(self.u_range),
                "vRange": list(self.v_range),
                "nu": self.nu,
                "nv": self.nv,
            },
            "fiberSamples": self.fiber_samples,
            "fdStep": self.fd_step,
            "fdOuter": self.fd_outer,
            "fdCenters": self.fd_centers,
            "tolerances": dict(sorted(self.tolerances.items())),
            "poles": self.poles,
            "outputs": list(self.outputs),
            "seed": self.seed,
        }


def resolve_curve(config: PipelineConfig):
    """Weierstrass data -> (data, phi, X, xi) for the configured curve."""
    if config.weierstrass is not None:
        data = WeierstrassData.from_dict(config.weierstrass)
    elif config.fixture is not None:
        data = load_fixture(config.fixture)
    else:
        raise ValueError("config needs a fixture name or inline weierstrass data")
    if data.m != config.m:
        raise ValueError(f"config m={config.m} but data has m={data.m}")
    phi, x = weierstrass_isotropic(data)
    xi = lift_to_quadric(x)
    return data, phi, x, xi


def config_poles(config: PipelineConfig) -> stereo.PolePair:
    dim = config.m + 4
    if config.poles is None:
        return stereo.PolePair.standard(dim)
    wp, wps = config.poles
    return stereo.PolePair(np.asarray(wp, dtype=float), np.asarray(wps, dtype=float))


def grid_axes(config: PipelineConfig):
    u = np.linspace(config.u_range[0], config.u_range[1], config.nu)
    v = np.linspace(config.v_range[0], config.v_range[1], config.nv)
    t = np.arange(config.fiber_samples) * (2 * np.pi / config.fiber_samples)
    return u, v, t


# ---------------------------------------------------------------------------
# flat-sample jet and field machinery
# ---------------------------------------------------------------------------


def _stencil_offsets(nax: int, h: float):
    """Offsets for value + Richardson gradient/Hessian stencils."""
    offsets = [np.zeros(nax)]
    index = {"center": 0}
    for a in range(nax):
        for scale in (h, h / 2):
            for sign in (1, -1):
                off = np.zeros(nax)
                off[a] = sign * scale
                index[("ax", a, scale, sign)] = len(offsets)
                offsets.append(off)
    for a in range(nax):
        for b in range(a + 1, nax):
            for scale in (h, h / 2):
                for s1 in (1, -1):
                    for s2 in (1, -1):
                        off = np.zeros(nax)
                        off[a] = s1 * scale
                        off[b] = s2 * scale
                        index[("pair", a, b, scale, s1, s2)] = len(offsets)
                        offsets.append(off)
    return np.stack(offsets), index


def _jets_flat(cong, z, tang, refs, fd_step, perturbation=None, fiber_base=None):
    """Second-order envelope jets at flattened samples.

    z: (N,) complex centers; tang: (N,) fiber angles (m=3) or (N, m-2) chart
    coordinates with fiber_base (N, m-1) unit centers (m>3); refs: (N, m,
    m+4) reference complements used for local gauge continuation.
    Returns dict of flat arrays (xhat, grad, hess, ok).
    """
    m = cong.m
    d = m + 3
    z = np.asarray(z, dtype=complex).ravel()
    n = z.shape[0]
    offsets, index = _stencil_offsets(m, fd_step)
    ns = offsets.shape[0]

    zpts = z[:, None] + offsets[None, :, 0] + 1j * offsets[None, :, 1]
    if m == 3:
        tpts = np.asarray(tang, dtype=float).reshape(n, 1) + offsets[None, :, 2]
        thetas = fiber_theta(3, tpts.reshape(-1))
        chart = (zpts.real.reshape(-1), zpts.imag.reshape(-1), tpts.reshape(-1))
    else:
        base = np.asarray(fiber_base, dtype=float)
        tangb = np.stack([_sphere_tangent_basis(b) for b in base])
        y0 = np.asarray(tang, dtype=float).reshape(n, 1, m - 2)
        y = y0 + offsets[None, :, 2:]
        r2 = np.sum(y * y, axis=-1)
        thetas = (
            np.sqrt(1.0 - r2)[..., None] * base[:, None, :]
            + np.einsum("nsk,nkd->nsd", y, tangb)
        ).reshape(n * ns, m - 1)
        chart = None
        if perturbation is not None:
            raise NotImplementedError("perturbation hook requires the m=3 angle chart")

    refs_rep = np.repeat(refs, ns, axis=0)
    xeval, okeval = cong.evaluate(
        zpts.reshape(-1), thetas, refs_rep, perturbation=perturbation, chart_coords=chart
    )
    xeval = xeval.reshape(n, ns, d)
    okeval = okeval.reshape(n, ns)

    xhat = xeval[:, 0]
    grad = np.zeros((n, m, d))
    hess = np.zeros((n, m, m, d))
    h = fd_step
    for a in range(m):
        fp1 = xeval[:, index[("ax", a, h, 1)]]
        fm1 = xeval[:, index[("ax", a, h, -1)]]
        fp2 = xeval[:, index[("ax", a, h / 2, 1)]]
        fm2 = xeval[:, index[("ax", a, h / 2, -1)]]
        grad[:, a] = (4 * (fp2 - fm2) / h - (fp1 - fm1) / (2 * h)) / 3
        s1 = (fp1 - 2 * xhat + fm1) / h**2
        s2 = (fp2 - 2 * xhat + fm2) / (h / 2) ** 2
        hess[:, a, a] = (4 * s2 - s1) / 3
    for a in range(m):
        for b in range(a + 1, m):

            def mixed(scale):
                pp = xeval[:, index[("pair", a, b, scale, 1, 1)]]
                pm = xeval[:, index[("pair", a, b, scale, 1, -1)]]
                mp = xeval[:, index[("pair", a, b, scale, -1, 1)]]
                mm = xeval[:, index[("pair", a, b, scale, -1, -1)]]
                return (pp - pm - mp + mm) / (4 * scale * scale)

            hess[:, a, b] = hess[:, b, a] = (4 * mixed(h / 2) - mixed(h)) / 3

    return {
        "xhat": xhat,
        "grad": grad,
        "hess": hess,
        "ok": np.all(okeval, axis=1),
    }


def _fields_flat(curve, m, z, jets):
    """Second-order invariant fields at flattened samples, curve gauge."""
    n = z.shape[0]
    d = m + 3
    pos, first, second = jets["xhat"], jets["grad"], jets["hess"]

    xi_raw = curve.eval_many(z, order=0)[0]
    nrm = inner(xi_raw, np.conj(xi_raw)).real
    xin = xi_raw * np.sqrt(2.0 / nrm)[:, None]
    xi_pair = np.stack([xin.real, -xin.imag], axis=1)
    n_ref = xi_pair[:, :, 1:] - xi_pair[:, :, 0][:, :, None] * pos[:, None, :]

    ext = immersion.fundamental_forms_batch(
        pos, first, second, target="sphere", normal_reference=n_ref
    )
    ok = ext["ok"] & jets["ok"]
    rho, ii_norm = moebius.rho_batch(ext["second_form"], ext["mean_curvature"], m)
    ok = ok & (rho > moebius.TAU_UMBILIC * ii_norm)
    xi_hat_pair = moebius.sphere_frame_batch(pos, ext["normals"], ext["mean_curvature"])
    return {
        "ok": ok,
        "xin": xin,
        "metric": ext["metric"],
        "tangent_coeffs": ext["tangent_coeffs"],
        "normals": ext["normals"],
        "second_form": ext["second_form"],
        "mean_curvature": ext["mean_curvature"],
        "rho": rho,
        "xi_hat": xi_hat_pair[:, 0] - 1j * xi_hat_pair[:, 1],
    }


# ---------------------------------------------------------------------------
# stage 1+2: envelope immersion and pointwise invariants on the grid
# ---------------------------------------------------------------------------


@dataclass
class EnvelopeField:
    """Sampled envelope immersion with local-stencil jets."""

    m: int
    u: np.ndarray
    v: np.ndarray
    t: np.ndarray
    steps: tuple
    fd_step: float
    xhat: np.ndarray           # (nu, nv, nt, m+3)
    grad: np.ndarray           # (nu, nv, nt, m, m+3)
    hess: np.ndarray           # (nu, nv, nt, m, m, m+3)
    ok: np.ndarray
    rank_ok: np.ndarray
    sigma_min: np.ndarray
    vframes: np.ndarray
    complements: np.ndarray    # (nu, nv, m, m+4)
    frame_ok: np.ndarray
    xin: np.ndarray            # (nu, nv, m+4) complex, normalized curve lifts
    perturbation: object = None

    @property
    def zgrid(self):
        return self.u[:, None] + 1j * self.v[None, :]

    def flat_samples(self):
        """(z, t, refs) flattened over the lattice, plus the lattice shape."""
        nu, nv, nt = self.xhat.shape[:3]
        z = np.broadcast_to(self.zgrid[:, :, None], (nu, nv, nt)).reshape(-1)
        if self.m == 3:
            tang = np.broadcast_to(self.t[None, None, :], (nu, nv, nt)).reshape(-1)
            base = None
        else:
            tang = np.zeros((nu * nv * nt, self.m - 2))
            base = np.broadcast_to(
                self.t[None, None], (nu, nv, nt, self.m - 1)
            ).reshape(-1, self.m - 1)
        refs = np.broadcast_to(
            self.complements[:, :, None], (nu, nv, nt, self.m, self.m + 4)
        ).reshape(-1, self.m, self.m + 4)
        return z, tang, base, refs, (nu, nv, nt)


def build_envelope(curve, m, u, v, fiber, fd_step, perturbation=None) -> EnvelopeField:
    """Sample the envelope and its jets over the product grid."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = len(u), len(v)
    dim = m + 4
    d = m + 3
    cong = SphereCongruence(curve, m)
    vframes, comps, frame_ok = cong.frames_grid(u, v)

    if m == 3:
        t = np.asarray(fiber, dtype=float)
    else:
        t = np.atleast_2d(np.asarray(fiber, dtype=float))
    nt = t.shape[0]
    dtheta = float(t[1] - t[0]) if (m == 3 and nt > 1) else float("nan")

    z = np.broadcast_to((u[:, None] + 1j * v[None, :])[:, :, None], (nu, nv, nt)).reshape(-1)
    if m == 3:
        tang = np.broadcast_to(t[None, None, :], (nu, nv, nt)).reshape(-1)
        base = None
    else:
        tang = np.zeros((nu * nv * nt, m - 2))
        base = np.broadcast_to(t[None, None], (nu, nv, nt, m - 1)).reshape(-1, m - 1)
    refs = np.broadcast_to(comps[:, :, None], (nu, nv, nt, m, dim)).reshape(-1, m, dim)

    jets = _jets_flat(cong, z, tang, refs, fd_step, perturbation, fiber_base=base)
    ok = jets["ok"].reshape(nu, nv, nt) & frame_ok[:, :, None]
    sv = np.linalg.svd(jets["grad"], compute_uv=False)
    rank_ok = (sv[:, -1] > 1e-6 * sv[:, 0]).reshape(nu, nv, nt)
    sigma_min = sv[:, -1].reshape(nu, nv, nt)

    xin_vals = curve.eval_many((u[:, None] + 1j * v[None, :]).reshape(-1), order=0)[0]
    nrm = np.maximum(inner(xin_vals, np.conj(xin_vals)).real, 1e-300)
    xin = (xin_vals * np.sqrt(2.0 / nrm)[:, None]).reshape(nu, nv, dim)

    du = float(u[1] - u[0]) if nu > 1 else 1.0
    dv = float(v[1] - v[0]) if nv > 1 else 1.0
    return EnvelopeField(
        m=m,
        u=u,
        v=v,
        t=t,
        steps=(du, dv, dtheta),
        fd_step=fd_step,
        xhat=jets["xhat"].reshape(nu, nv, nt, d),
        grad=jets["grad"].reshape(nu, nv, nt, m, d),
        hess=jets["hess"].reshape(nu, nv, nt, m, m, d),
        ok=ok,
        rank_ok=rank_ok,
        sigma_min=sigma_min,
        vframes=vframes,
        complements=comps,
        frame_ok=frame_ok,
        xin=xin,
        perturbation=perturbation,
    )


def moebius_fields(env: EnvelopeField, curve) -> dict:
    """Second-order invariant fields per sample, plus certification data."""
    nu, nv, nt = env.xhat.shape[:3]
    m = env.m
    n = nu * nv * nt
    z, tang, base, refs, lat = env.flat_samples()
    jets = {
        "xhat": env.xhat.reshape(n, -1),
        "grad": env.grad.reshape(n, m, -1),
        "hess": env.hess.reshape(n, m, m, -1),
        "ok": env.ok.reshape(-1),
    }
    f = _fields_flat(curve, m, z, jets)
    b, b_trace, b_norm = moebius.moebius_B(
        f["second_form"], f["mean_curvature"], f["rho"], m
    )
    cert = canonical.certify_field(f["second_form"], mask=f["ok"])
    recovery = np.full(n, np.nan)
    for k in range(n):
        if f["ok"][k]:
            recovery[k] = quadric.span_distance(f["xi_hat"][k], f["xin"][k])

    out = {key: val.reshape(lat + val.shape[1:]) for key, val in f.items()}
    out.update(
        {
            "b": b.reshape(lat + (2, m, m)),
            "b_trace_residual": b_trace.reshape(lat),
            "b_norm_residual": b_norm.reshape(lat),
            "defect": cert["defect"].reshape(lat),
            "mu0": cert["mu0"].reshape(lat),
            "adapted_frames": cert["frames"].reshape(lat + (m, m)),
            "normal_angle": cert["normal_angle"].reshape(lat),
            "recovery": recovery.reshape(lat),
            "defect_stats": cert["stats"],
        }
    )
    return out


# ---------------------------------------------------------------------------
# stage 3: outer Richardson derivatives of the second-order fields
# ---------------------------------------------------------------------------


def third_order_checks(env: EnvelopeField, fields: dict, curve, fd_outer: float = 1e-2) -> dict:
    """Invariant 1-form symmetries, Gauss-map residuals, submersion factor.

    Derivative fields are obtained by outer Richardson differences (steps
    fd_outer, fd_outer/2) of the second-order fields, each shifted sample
    evaluated with the same local-stencil machinery and the center sample's
    frame gauge; the fiber axis uses the m=3 angle chart.
    """
    if env.m != 3:
        raise NotImplementedError("third-order checks need the m=3 angle chart")
    m, dim = 3, env.m + 4
    d = env.m + 3
    z0, tang0, _, refs, lat = env.flat_samples()
    n = z0.shape[0]
    cong = SphereCongruence(curve, m)

    h2 = fd_outer
    shifts = {}
    ok_all = fields["ok"].reshape(-1).copy()
    for a in range(3):
        for scale in (h2, h2 / 2):
            for sign in (1, -1):
                dz = sign * scale * (1 if a == 0 else 1j) if a < 2 else 0.0
                dt = sign * scale if a == 2 else 0.0
                jets = _jets_flat(
                    cong,
                    z0 + dz,
                    tang0 + dt,
                    refs,
                    env.fd_step,
                    perturbation=env.perturbation,
                )
                fshift = _fields_flat(curve, m, z0 + dz, jets)
                ok_all &= fshift["ok"]
                shifts[(a, scale, sign)] = fshift

    def richardson_d(key):
        out = []
        for a in range(3):
            dplus = shifts[(a, h2, 1)][key]
            dminus = shifts[(a, h2, -1)][key]
            dplus2 = shifts[(a, h2 / 2, 1)][key]
            dminus2 = shifts[(a, h2 / 2, -1)][key]
            d1 = (dplus - dminus) / (2 * h2)
            d2 = (dplus2 - dminus2) / h2
            out.append((4 * d2 - d1) / 3)
        return np.stack(out, axis=1)  # (n, axis, ...)

    hgrad = richardson_d("mean_curvature")          # (n, 3, 2)
    # d(ln rho) = d(rho)/rho
    rgrad = richardson_d("rho")                      # (n, 3)
    lgrad = rgrad / fields["rho"].reshape(-1)[:, None]
    ngrad = richardson_d("normals")                  # (n, 3, 2, d)
    xigrad = richardson_d("xi_hat")                  # (n, 3, dim) complex

    coeffs = fields["tangent_coeffs"].reshape(n, m, m)
    dH = np.einsum("nik,nkr->nri", coeffs, hgrad)
    dlnrho = np.einsum("nik,nk->ni", coeffs, lgrad)
    dn_frame = np.einsum("nik,nksd->nisd", coeffs, ngrad)
    conn = np.einsum("nisd,nrd->nisr", dn_frame, fields["normals"].reshape(n, 2, d))

    c = moebius.moebius_C(
        fields["second_form"].reshape(n, 2, m, m),
        fields["mean_curvature"].reshape(n, 2),
        fields["rho"].reshape(n),
        dH,
        dlnrho,
        conn,
    )
    frames = fields["adapted_frames"].reshape(n, m, m)
    angles = fields["normal_angle"].reshape(n)
    c_adapted = moebius.rotate_C_to_adapted(c, frames, angles)
    c_res = np.stack(
        [
            np.abs(c_adapted[:, 0, 0] + c_adapted[:, 1, 1]),
            np.abs(c_adapted[:, 0, 1] - c_adapted[:, 1, 0]),
            np.max(np.abs(c_adapted[:, 1, 2:]), axis=-1),
        ],
        axis=-1,
    )

    dxi_chol = np.einsum("nik,nkd->nid", coeffs.astype(complex), xigrad)
    dxi_adapted = np.einsum("nij,njd->nid", frames.astype(complex), dxi_chol)

    gauss = {k: np.full(n, np.nan) for k in
             ("fiber_constancy", "isotropy", "cauchy_riemann", "submersion")}
    sel = np.nonzero(ok_all)[0]
    if sel.size:
        checks = quadric.forward_gauss_check(
            fields["xi_hat"].reshape(n, dim)[sel],
            dxi_adapted[sel],
            fields["rho"].reshape(n)[sel],
            m,
        )
        for j, k in enumerate(sel):
            gauss["fiber_constancy"][k] = checks[j].fiber_constancy
            gauss["isotropy"][k] = checks[j].isotropy
            gauss["cauchy_riemann"][k] = checks[j].cauchy_riemann
            gauss["submersion"][k] = checks[j].submersion

    c_masked = np.where(ok_all[:, None], c_res, np.nan)
    return {
        "ok": ok_all.reshape(lat),
        "c_tensor": c_adapted.reshape(lat + (2, m)),
        "c_residuals": c_res.reshape(lat + (3,)),
        "c_residual_max": float(np.nanmax(c_masked)) if sel.size else float("nan"),
        "gauss": {k: v.reshape(lat) for k, v in gauss.items()},
        "gauss_max": {
            k: (float(np.nanmax(v)) if sel.size else float("nan"))
            for k, v in gauss.items()
        },
    }


# ---------------------------------------------------------------------------
# stage 4: center surface
# ---------------------------------------------------------------------------


def centers_checks(curve, env: EnvelopeField, fields: dict, poles: stereo.PolePair, fd_centers: float = 4e-2) -> dict:
    """Minimality of the sphere-center surface along both computation paths."""
    zgrid = env.zgrid
    nu, nv = zgrid.shape
    m = env.m
    if not np.any(fields["ok"]):
        return {k: float("nan") for k in (
            "analytic_max", "analytic_conformality_max", "analytic_isotropy_max",
            "holomorphy_residual_max", "cross_path_max", "fd_max",
            "fd_conformality_max", "fiber_spread_max", "radius_deviation_max")}

    analytic = centers.verify_minimal_analytic(curve, zgrid, poles)
    holo = _holomorphy_residual(centers.center_curve(curve, poles), zgrid)

    data = centers.center_samples(curve, zgrid, poles)
    chart_eqx = data["chart"]

    # pointwise reflection path from the input curve's normalized lifts
    refl = np.zeros_like(chart_eqx)
    for i in range(nu):
        for j in range(nv):
            xin = env.xin[i, j]
            geo = centers.sphere_center(xin.real, -xin.imag, poles)
            refl[i, j] = geo.euclidean_center
    cross = float(np.max(np.linalg.norm(refl - chart_eqx, axis=-1)))

    # FD path: centers of the envelope-derived mean curvature spheres,
    # differentiated by local Richardson stencils through the same
    # frame-continued evaluation machinery
    fiber_spread = _center_fiber_spread(fields, poles)
    fd_max, fd_conf = _center_fd_residuals(curve, env, poles, h2=fd_centers)

    # radius consistency: envelope fiber points lie on the sphere
    rad_dev = _radius_consistency(env, poles)

    return {
        "analytic_max": float(np.max(analytic["harmonicity"])),
        "analytic_conformality_max": float(np.max(analytic["conformality"])),
        "analytic_isotropy_max": float(np.max(analytic["isotropy"])),
        "holomorphy_residual_max": holo,
        "cross_path_max": cross,
        "fd_max": fd_max,
        "fd_conformality_max": fd_conf,
        "fiber_spread_max": fiber_spread,
        "radius_deviation_max": rad_dev,
    }


def _envelope_center_chart(curve, env: EnvelopeField, z, poles: stereo.PolePair):
    """Euclidean centers of the envelope-derived spheres at arbitrary z.

    Batched: evaluates the immersion jets at (z, first fiber sample) with the
    nearest grid sample's frame gauge, extracts the mean curvature sphere and
    reflects the pole in it.
    """
    m = env.m
    z = np.asarray(z, dtype=complex).ravel()
    # nearest grid reference frames
    iu = np.clip(np.searchsorted(env.u, z.real), 0, len(env.u) - 1)
    iv = np.clip(np.searchsorted(env.v, z.imag), 0, len(env.v) - 1)
    refs = env.complements[iu, iv]
    cong = SphereCongruence(curve, m)
    if m == 3:
        tang = np.full(z.shape, float(env.t[0]))
        base = None
    else:
        tang = np.zeros((z.shape[0], m - 2))
        base = np.broadcast_to(env.t[0], (z.shape[0], m - 1))
    jets = _jets_flat(cong, z, tang, refs, env.fd_step, env.perturbation, fiber_base=base)
    f = _fields_flat(curve, m, z, jets)
    xh = f["xi_hat"]
    nrm = inner(xh, np.conj(xh)).real
    xh = xh * np.sqrt(2.0 / nrm)[:, None]
    o = centers.reflect_pole(xh.real, -xh.imag, poles)
    sigma = -inner(o, poles.wp)
    if np.any(np.abs(sigma) < 1e-9):
        raise stereo.SpherePoleError("sphere through the pole on the FD stencil")
    xt = o / sigma[:, None]
    return stereo.euclidean_chart(stereo.remove_pole_components(xt, poles), poles), f["ok"]


def _center_fd_residuals(curve, env: EnvelopeField, poles: stereo.PolePair, h2: float = 4e-2):
    """Harmonicity/conformality of the envelope-derived center field
    (restricted to samples whose whole stencil is regular)."""
    z0 = env.zgrid.reshape(-1)

    vals = {}
    ok = np.ones(z0.shape[0], dtype=bool)
    for tag, dz in (
        ("c", 0.0),
        ("up1", h2), ("um1", -h2), ("up2", h2 / 2), ("um2", -h2 / 2),
        ("vp1", 1j * h2), ("vm1", -1j * h2), ("vp2", 1j * h2 / 2), ("vm2", -1j * h2 / 2),
    ):
        vals[tag], okk = _envelope_center_chart(curve, env, z0 + dz, poles)
        ok &= okk
    if not np.any(ok):
        return float("nan"), float("nan")

    def d1(p1, m1, p2, m2):
        return (4 * (vals[p2] - vals[m2]) / h2 - (vals[p1] - vals[m1]) / (2 * h2)) / 3

    def d2(p1, m1, p2, m2):
        s1 = (vals[p1] - 2 * vals["c"] + vals[m1]) / h2**2
        s2 = (vals[p2] - 2 * vals["c"] + vals[m2]) / (h2 / 2) ** 2
        return (4 * s2 - s1) / 3

    xu = d1("up1", "um1", "up2", "um2")
    xv = d1("vp1", "vm1", "vp2", "vm2")
    xuu = d2("up1", "um1", "up2", "um2")
    xvv = d2("vp1", "vm1", "vp2", "vm2")
    res = immersion.harmonicity_from_jets(xu[ok], xv[ok], xuu[ok], xvv[ok])
    return float(np.max(res["harmonicity"])), float(np.max(res["conformality"]))


def _center_fiber_spread(fields: dict, poles: stereo.PolePair) -> float:
    """Largest deviation of per-fiber sphere centers from the first fiber's."""
    xi_hat = fields["xi_hat"]
    nu, nv, nt = xi_hat.shape[:3]
    flat = xi_hat.reshape(-1, xi_hat.shape[-1])
    nrm = inner(flat, np.conj(flat)).real
    flat = flat * np.sqrt(2.0 / nrm)[:, None]
    o = centers.reflect_pole(flat.real, -flat.imag, poles)
    sigma = -inner(o, poles.wp)
    sigma = np.where(np.abs(sigma) < 1e-12, np.nan, sigma)
    xt = o / sigma[:, None]
    chart = stereo.euclidean_chart(stereo.remove_pole_components(xt, poles), poles)
    chart = chart.reshape(nu, nv, nt, -1)
    return float(np.nanmax(np.linalg.norm(chart - chart[:, :, :1], axis=-1)))


def pole_margin(curve, zgrid, poles: stereo.PolePair) -> float:
    """min |<xi_n(z), p>| over the grid for the normalized lifts."""
    z = np.asarray(zgrid, dtype=complex).reshape(-1)
    xi = curve.eval_many(z, order=0)[0]
    nrm = inner(xi, np.conj(xi)).real
    xin = xi * np.sqrt(2.0 / nrm)[:, None]
    return float(np.min(np.abs(inner(xin, poles.wp))))


def _holomorphy_residual(rcurve, zgrid, h: float = 1e-4) -> float:
    """Max |X_zbar| / |X_z| over the grid, Richardson-extrapolated FD."""
    z = np.asarray(zgrid, dtype=complex).reshape(-1)

    def dbar(hh):
        xu = (rcurve.eval_many(z + hh, 0)[0] - rcurve.eval_many(z - hh, 0)[0]) / (2 * hh)
        xv = (rcurve.eval_many(z + 1j * hh, 0)[0] - rcurve.eval_many(z - 1j * hh, 0)[0]) / (2 * hh)
        return (xu + 1j * xv) / 2

    est = (4 * dbar(h / 2) - dbar(h)) / 3
    xz = rcurve.eval_many(z, 1)[1]
    return float(np.max(np.sqrt(np.sum(np.abs(est) ** 2, -1) / np.sum(np.abs(xz) ** 2, -1))))


def _radius_consistency(env: EnvelopeField, poles: stereo.PolePair) -> float:
    """Spot check: fiber points of the envelope lie at distance `radius`
    from the Euclidean center of their sphere (flat chart)."""
    nu, nv, nt = env.xhat.shape[:3]
    worst = 0.0
    for i in range(0, nu, max(1, nu // 3)):
        for j in range(0, nv, max(1, nv // 3)):
            xin = env.xin[i, j]
            lifts = []
            for k in range(nt):
                if not env.ok[i, j, k]:
                    continue
                xh = env.xhat[i, j, k]
                lifts.append(np.concatenate([[1.0], xh]))
            if len(lifts) < 2:
                continue
            lifts = np.stack(lifts)
            s = -inner(lifts, poles.wp)
            if np.any(np.abs(s) < 1e-9):
                continue
            pts = stereo.euclidean_chart(
                stereo.remove_pole_components(lifts / s[:, None], poles), poles
            )
            geo = centers.sphere_center(
                xin.real, -xin.imag, poles, sphere_points=pts
            )
            dists = np.linalg.norm(pts - geo.euclidean_center, axis=-1)
            worst = max(worst, float(np.max(np.abs(dists - geo.radius))))
    return worst


# ---------------------------------------------------------------------------
# randomized stereographic round trips
# ---------------------------------------------------------------------------


def roundtrip_check(m: int, trials: int, seed: int) -> dict:
    """Randomized project/lift round trips both ways; max errors reported."""
    rng = np.random.default_rng(seed)
    dim = m + 4
    poles = stereo.PolePair.standard(dim)

    x = rng.standard_normal((trials, dim)) + 1j * rng.standard_normal((trials, dim))
    x[:, :2] = 0.0
    xi = stereo.lift_complex(x, poles)
    back = stereo.project_complex(xi, poles)
    err_flat = float(np.max(np.abs(back - x)))

    # quadric side: random spacelike orthonormal pairs, random complex scale
    err_proj = 0.0
    done = 0
    while done < trials:
        a, b = random_spacelike_pair(rng, dim)
        xi1 = (a - 1j * b) * (rng.standard_normal() + 1j * rng.standard_normal())
        try:
            x1 = stereo.project_complex(xi1, poles)
        except stereo.SpherePoleError:
            continue
        xi2 = stereo.lift_complex(x1, poles)
        err_proj = max(err_proj, quadric.span_distance(xi2, xi1))
        done += 1
    return {"max_error_flat": err_flat, "max_error_quadric": float(err_proj), "trials": trials}


def random_spacelike_pair(rng: np.random.Generator, dim: int):
    """Random orthonormal spacelike pair in the Lorentz space (rejection)."""
    while True:
        a = rng.standard_normal(dim)
        a[0] *= 0.2
        na = inner(a, a)
        if na < 0.1:
            continue
        a = a / np.sqrt(na)
        b = rng.standard_normal(dim)
        b[0] *= 0.2
        b = b - inner(a, b) * a
        nb = inner(b, b)
        if nb < 0.1:
            continue
        return a, b / np.sqrt(nb)


# ---------------------------------------------------------------------------
# full runs and tolerance gating
# ---------------------------------------------------------------------------


def default_bump(eps: float = 1e-2):
    """Deterministic smooth perturbation used as the non-ideal control."""

    def bump(u, v, t, xhat):
        amp = eps * np.sin(3 * u) * np.cos(2 * v) * np.cos(t)
        out = np.zeros_like(xhat)
        out[:, 0] = amp
        out[:, 3] = 0.5 * amp
        return out

    return bump


def generator_report(config: PipelineConfig) -> dict:
    """Exact coefficient-level identities of the generated curve."""
    data, phi, x, xi = resolve_curve(config)
    eta = [-1] + [1] * (config.m + 3)
    xi_z = xi.derivative()
    return {
        "m": config.m,
        "degree_f": data.f.degree,
        "sum_phi_sq_zero": phi.dot(phi).is_zero(),
        "xi_isotropic_zero": xi.dot(xi, metric=eta).is_zero(),
        "xi_z_isotropic_zero": xi_z.dot(xi_z, metric=eta).is_zero(),
    }


def curve_certification(config: PipelineConfig) -> dict:
    """Analytic-jet certification of the lifted curve on the grid."""
    _, _, _, xi = resolve_curve(config)
    u, v, _ = grid_axes(config)
    z = (u[:, None] + 1j * v[None, :]).reshape(-1)
    reports = quadric.certify_curve(xi, z)
    return {
        "holo_max": max(r.holo_residual for r in reports),
        "iso_max": max(r.iso_residual for r in reports),
        "all_qplus": all(r.classification == "QPlusPoint" for r in reports),
        "hermitian_min": min(r.hermitian_norm_sq for r in reports),
    }


def _masked_max(arr, mask) -> float:
    vals = np.asarray(arr)[np.asarray(mask, dtype=bool)]
    return float(np.max(vals)) if vals.size else float("nan")


def _gate(checks: dict, name: str, value, tol, mode: str = "max") -> None:
    value = float(value)
    if np.isnan(value):
        ok = False
    else:
        ok = bool(value <= tol) if mode == "max" else bool(value >= tol)
    checks[name] = {"value": value, "tolerance": float(tol), "pass": ok}


def _gate_bool(checks: dict, name: str, value: bool) -> None:
    checks[name] = {"value": bool(value), "tolerance": True, "pass": bool(value)}


def run_full(config: PipelineConfig, stages=("all",)) -> dict:
    """Run the configured pipeline stages and gate every residual.

    stages: subset of {'generate', 'lift', 'construct', 'gauss', 'centers',
    'roundtrip'} or ('all',).
    """
    want = set(stages)
    everything = "all" in want
    tol = config.tolerances
    checks: dict = {}
    report: dict = {"config": config.to_dict(), "version": _version(), "checks": checks}

    if everything or want & {"generate", "lift", "construct", "gauss", "centers"}:
        gen = generator_report(config)
        report["generator"] = gen
        _gate_bool(checks, "generator/sum_phi_sq_zero", gen["sum_phi_sq_zero"])
        _gate_bool(checks, "generator/xi_isotropic_zero", gen["xi_isotropic_zero"])
        _gate_bool(checks, "generator/xi_z_isotropic_zero", gen["xi_z_isotropic_zero"])

    if everything or want & {"lift", "construct", "gauss", "centers"}:
        cert = curve_certification(config)
        report["curve_certification"] = cert
        _gate(checks, "lift/iso_analytic", cert["iso_max"], tol["gauss_isotropy_analytic"])
        _gate_bool(checks, "lift/holo_exact", cert["holo_max"] == 0.0)
        _gate_bool(checks, "lift/all_qplus", cert["all_qplus"])

    env = fields = None
    xi = resolve_curve(config)[3]
    if everything or want & {"construct", "gauss", "centers"}:
        u, v, t = grid_axes(config)
        fiber = t if config.m == 3 else _fiber_bases(config)
        env = build_envelope(xi, config.m, u, v, fiber, config.fd_step)
        fields = moebius_fields(env, xi)
        report["envelope"] = {
            "samples": int(env.ok.size),
            "regular": int(np.sum(env.ok)),
            "full_rank": int(np.sum(env.rank_ok & env.ok)),
            "sigma_min": float(np.min(env.sigma_min[env.ok])) if np.any(env.ok) else 0.0,
            "defect_stats": fields["defect_stats"],
            "recovery_max": _masked_max(fields["recovery"], fields["ok"]),
            "b_trace_max": _masked_max(fields["b_trace_residual"], fields["ok"]),
            "b_norm_max": _masked_max(fields["b_norm_residual"], fields["ok"]),
        }
        _gate_bool(checks, "construct/all_regular", bool(np.all(env.ok & env.rank_ok)))
        _gate(checks, "construct/defect_max", fields["defect_stats"]["max_defect"], tol["wintgen_defect_max"])
        _gate(checks, "construct/recovery_max", report["envelope"]["recovery_max"], tol["sphere_recovery"])
        _gate(checks, "construct/b_trace_max", report["envelope"]["b_trace_max"], tol["b_trace"])
        _gate(checks, "construct/b_norm_max", report["envelope"]["b_norm_max"], tol["b_norm"])

    if (everything or "construct" in want) and config.m == 3:
        u, v, t = grid_axes(config)
        pert = build_envelope(
            xi, config.m, u, v, t, config.fd_step, perturbation=default_bump(1e-2)
        )
        fp = moebius_fields(pert, xi)
        report["perturbation_control"] = fp["defect_stats"]
        _gate(
            checks,
            "construct/perturbed_median_defect",
            fp["defect_stats"]["median_defect"],
            tol["perturbed_defect_median_min"],
            mode="min",
        )

    if (everything or "gauss" in want) and config.m == 3:
        third = third_order_checks(env, fields, xi, config.fd_outer)
        report["gauss"] = {
            "interior": int(np.sum(third["ok"])),
            "c_residual_max": third["c_residual_max"],
            **third["gauss_max"],
        }
        _gate(checks, "gauss/fiber_constancy", third["gauss_max"]["fiber_constancy"], tol["gauss_fiber"])
        _gate(checks, "gauss/isotropy", third["gauss_max"]["isotropy"], tol["gauss_isotropy"])
        _gate(checks, "gauss/submersion", third["gauss_max"]["submersion"], tol["submersion"])
        _gate(checks, "moebius/c_symmetry", third["c_residual_max"], tol["c_symmetry"])
        report["_third"] = third

    if everything or "centers" in want:
        poles = config_poles(config)
        cent = centers_checks(xi, env, fields, poles, config.fd_centers)
        report["centers"] = cent
        _gate(checks, "centers/analytic", cent["analytic_max"], tol["minimal_analytic"])
        _gate(checks, "centers/holomorphy", cent["holomorphy_residual_max"], tol["minimal_analytic"])
        _gate(checks, "centers/fd", cent["fd_max"], tol["minimal_fd"])
        _gate(checks, "centers/cross_path", cent["cross_path_max"], tol["cross_path"])

        rng = np.random.default_rng(config.seed)
        rotated = None
        for _ in range(20):
            t_lorentz = stereo.random_lorentz(rng, config.m + 4, boost=0.3)
            cand = stereo.PolePair(t_lorentz @ poles.wp, t_lorentz @ poles.wps)
            # quantitative version of "spheres do not pass through the pole":
            # keep the congruence well away from the candidate pole
            if pole_margin(xi, env.zgrid, cand) < 0.4:
                continue
            try:
                rotated = centers_checks(xi, env, fields, cand, config.fd_centers)
                break
            except stereo.SpherePoleError:
                continue
        if rotated is not None:
            report["centers_rotated_pole"] = rotated
            _gate(checks, "centers/rotated_analytic", rotated["analytic_max"], tol["minimal_analytic"])
            _gate(checks, "centers/rotated_fd", rotated["fd_max"], tol["minimal_fd"])
            _gate(checks, "centers/rotated_cross_path", rotated["cross_path_max"], tol["cross_path"])
        else:
            _gate_bool(checks, "centers/rotated_pole_found", False)

    if everything or "roundtrip" in want:
        rt = roundtrip_check(config.m, 1000, config.seed)
        report["roundtrip"] = rt
        _gate(checks, "roundtrip/flat", rt["max_error_flat"], tol["roundtrip"])
        _gate(checks, "roundtrip/quadric", rt["max_error_quadric"], tol["roundtrip"])

    report["passed"] = all(c["pass"] for c in checks.values())
    report["_env"] = env
    report["_fields"] = fields
    return report


def _fiber_bases(config: PipelineConfig):
    """Quasi-uniform base points on S^{m-2} for the m>3 fiber sampling."""
    rng = np.random.default_rng(config.seed)
    pts = rng.standard_normal((config.fiber_samples, config.m - 1))
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def _version() -> str:
    from . import __version__

    return __version__
