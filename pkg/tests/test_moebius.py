import numpy as np
import pytest

from wintgen.immersion import ExtrinsicData, ImmersionJet, fundamental_forms
from wintgen.lorentz import inner
from wintgen.moebius import (
    UmbilicError,
    canonical_lift,
    mean_curvature_spheres,
    moebius_B,
    moebius_C,
    moebius_data,
    rho_batch,
)


def _graph_jet():
    """Minimal graph z = (u^2 - v^2)/2 at the origin (m = 2 target R^3)."""
    second = np.zeros((2, 2, 3))
    second[0, 0, 2] = 1.0
    second[1, 1, 2] = -1.0
    return ImmersionJet(
        position=np.zeros(3),
        first=np.stack([np.eye(3)[0], np.eye(3)[1]]),
        second=second,
    )


def test_round_sphere_is_umbilic():
    data = ExtrinsicData(
        metric=np.eye(2),
        tangent_frame=np.stack([np.eye(3)[0], np.eye(3)[1]]),
        tangent_coeffs=np.eye(2),
        normals=np.array([[0.0, 0, 1]]),
        second_form=np.array([[[1.0, 0], [0, 1.0]]]),  # II proportional to I
        mean_curvature=np.array([1.0]),
        position=np.zeros(3),
        target="flat",
    )
    with pytest.raises(UmbilicError):
        canonical_lift(data)


def test_minimal_graph_rho():
    data = fundamental_forms(_graph_jet(), target="flat")
    rho, y = canonical_lift(data)
    assert rho == pytest.approx(2.0)
    # flat model lift at x = 0: rho * (1/2, 1/2, 0, 0, 0)
    assert np.allclose(y, [1.0, 1.0, 0, 0, 0])
    assert abs(inner(y, y)) < 1e-14


def test_envelope_rho_positive(small_envelope):
    env, fields = small_envelope
    assert np.all(fields["rho"][fields["ok"]] > 0)


def test_geodesic_equator_spheres():
    """Totally geodesic equator in S^5: H = 0 and constant xi_r = (0, n_r)."""
    u, v, w = 0.3, -0.2, 0.5

    def emb(a, b, c):
        s = np.array([np.cos(a), np.sin(a) * np.cos(b), np.sin(a) * np.sin(b) * np.cos(c),
                      np.sin(a) * np.sin(b) * np.sin(c)])
        return np.concatenate([s, [0.0, 0.0]])

    h = 1e-5
    first = np.stack([
        (emb(u + h, v, w) - emb(u - h, v, w)) / (2 * h),
        (emb(u, v + h, w) - emb(u, v - h, w)) / (2 * h),
        (emb(u, v, w + h) - emb(u, v, w - h)) / (2 * h),
    ])
    second = np.zeros((3, 3, 6))
    pts = {0: (u, v, w)}
    coords = [u, v, w]
    for i in range(3):
        for j in range(3):
            ei = np.eye(3)[i] * h
            ej = np.eye(3)[j] * h
            second[i, j] = (
                emb(*(np.array(coords) + ei + ej))
                - emb(*(np.array(coords) + ei - ej))
                - emb(*(np.array(coords) - ei + ej))
                + emb(*(np.array(coords) - ei - ej))
            ) / (4 * h * h)
    jet = ImmersionJet(position=emb(u, v, w), first=first, second=second)
    data = fundamental_forms(jet, target="sphere")
    assert np.max(np.abs(data.mean_curvature)) < 1e-6
    xi = mean_curvature_spheres(data)
    for r in range(2):
        assert abs(xi[r][0]) < 1e-6
        assert np.allclose(xi[r][1:], data.normals[r], atol=1e-6)


def test_flat_model_sphere_formula():
    """H^1 = 1, n_1 = (0,0,1), x = 0 gives xi_1 = (1/2, 1/2, 0, 0, 1)."""
    data = ExtrinsicData(
        metric=np.eye(2),
        tangent_frame=np.stack([np.eye(3)[0], np.eye(3)[1]]),
        tangent_coeffs=np.eye(2),
        normals=np.array([[0.0, 0, 1]]),
        second_form=np.array([[[1.0, 0], [0, 1.0]]]),
        mean_curvature=np.array([1.0]),
        position=np.zeros(3),
        target="flat",
    )
    xi = mean_curvature_spheres(data)
    assert np.allclose(xi[0], [0.5, 0.5, 0, 0, 1])


def test_sphere_frame_properties(small_envelope):
    """<xi_r, xi_s> = delta, <xi_r, Y> = 0, <xi_r, dY> = 0."""
    env, fields = small_envelope
    i, j, k = 2, 2, 1
    pos = env.xhat[i, j, k]
    rho = fields["rho"][i, j, k]
    y = rho * np.concatenate([[1.0], pos])
    xi = fields["xi_hat"][i, j, k]
    xi1, xi2 = xi.real, -xi.imag
    assert abs(inner(xi1, xi1) - 1) < 1e-9
    assert abs(inner(xi2, xi2) - 1) < 1e-9
    assert abs(inner(xi1, xi2)) < 1e-9
    assert abs(inner(xi1, y)) < 1e-8
    for a in range(3):
        dy = np.concatenate([[0.0], env.grad[i, j, k, a]])  # d(1,x) direction
        assert abs(inner(xi1, dy)) < 1e-7
        assert abs(inner(xi2, dy)) < 1e-7


def test_moebius_B_residuals(small_envelope):
    env, fields = small_envelope
    ok = fields["ok"]
    assert np.max(fields["b_trace_residual"][ok]) < 1e-10
    assert np.max(fields["b_norm_residual"][ok]) < 1e-10
    # m = 3 target value: sum |B|^2 = 2/3
    b = fields["b"][ok]
    assert np.allclose(np.sum(b * b, axis=(-3, -2, -1)), 2.0 / 3.0, atol=1e-10)


def test_moebius_C_zero_for_constant_data():
    h = np.zeros((1, 2, 3, 3))
    h[0, 0] = np.diag([1.0, -1, 0])
    mean = np.zeros((1, 2))
    rho = np.array([2.0])
    c = moebius_C(h, mean, rho, np.zeros((1, 2, 3)), np.zeros((1, 3)), np.zeros((1, 3, 2, 2)))
    assert np.allclose(c, 0)


def test_moebius_metric_consistency(small_envelope):
    """g = <dY, dY> = rho^2 dx . dx checked against difference quotients of Y."""
    env, fields = small_envelope
    du = env.steps[0]
    i, j, k = 2, 2, 0
    rho_f = fields["rho"]
    y = lambda ii: rho_f[ii, j, k] * np.concatenate([[1.0], env.xhat[ii, j, k]])
    d_1 = (y(3) - y(1)) / (2 * du)
    d_2 = (y(4) - y(0)) / (4 * du)
    dy = (4 * d_1 - d_2) / 3  # Richardson over grid strides
    g_fd = inner(dy, dy)
    g_exact = rho_f[i, j, k] ** 2 * fields["metric"][i, j, k, 0, 0]
    assert abs(g_fd - g_exact) < 2e-2 * abs(g_exact)


def test_model_equivalence_invariant_metric(enneper5, small_envelope):
    """Sphere-model and flat-model invariant metrics agree (Moebius
    invariance): g = rho^2 I computed from the spherical envelope equals the
    one computed from its stereographic image in R^5."""
    from wintgen.stereo import project_classical
    from wintgen.immersion import fundamental_forms_batch

    env, fields = small_envelope
    i, j, k = 2, 2, 1

    pole = np.zeros(6)
    pole[0] = 1.0

    h = 1e-4
    m = 3

    def flat_eval(du_, dv_, dt_):
        # evaluate the envelope near the sample and project to R^5
        from wintgen.envelope import SphereCongruence, fiber_theta

        cong = SphereCongruence(enneper5["xi"], 3)
        z = complex(env.u[i] + du_, env.v[j] + dv_)
        th = fiber_theta(3, np.array([env.t[k] + dt_]))
        x, okk = cong.evaluate(
            np.array([z], dtype=complex), th, env.complements[i, j][None]
        )
        assert okk[0]
        return project_classical(x[0], pole=pole)

    first = []
    second = np.zeros((m, m, 5))
    f0 = flat_eval(0, 0, 0)
    offs = [np.eye(3)[a] * h for a in range(3)]
    for a in range(3):
        fp = flat_eval(*offs[a])
        fm = flat_eval(*(-offs[a]))
        first.append((fp - fm) / (2 * h))
        second[a, a] = (fp - 2 * f0 + fm) / h**2
    for a in range(3):
        for b in range(a + 1, 3):
            pp = flat_eval(*(offs[a] + offs[b]))
            pm = flat_eval(*(offs[a] - offs[b]))
            mp = flat_eval(*(-offs[a] + offs[b]))
            mm = flat_eval(*(-offs[a] - offs[b]))
            second[a, b] = second[b, a] = (pp - pm - mp + mm) / (4 * h * h)
    ext = fundamental_forms_batch(
        f0[None], np.stack(first)[None], second[None], target="flat"
    )
    rho_flat, _ = rho_batch(ext["second_form"], ext["mean_curvature"], m)
    g_flat = rho_flat[0] ** 2 * ext["metric"][0]
    g_sphere = fields["rho"][i, j, k] ** 2 * fields["metric"][i, j, k]
    assert np.max(np.abs(g_flat - g_sphere)) < 1e-6 * np.max(np.abs(g_sphere))


def test_sphere_span_constant_along_fibers(small_envelope):
    """The computed mean curvature sphere span is fiber-independent."""
    from wintgen.quadric import span_distance

    env, fields = small_envelope
    nu, nv, nt = env.xhat.shape[:3]
    worst = 0.0
    for i in range(nu):
        for j in range(nv):
            for k in range(1, nt):
                worst = max(
                    worst,
                    span_distance(fields["xi_hat"][i, j, k], fields["xi_hat"][i, j, 0]),
                )
    assert worst < 1e-4


def test_moebius_data_assembly(small_envelope, enneper5):
    env, fields = small_envelope
    jet = ImmersionJet(
        position=env.xhat[2, 2, 0],
        first=env.grad[2, 2, 0],
        second=env.hess[2, 2, 0],
    )
    ext = fundamental_forms(jet, target="sphere")
    md = moebius_data(ext)
    assert md.rho > 0
    assert abs(inner(md.y, md.y)) < 1e-10
    assert md.b.shape == (2, 3, 3)
    assert md.c is None
