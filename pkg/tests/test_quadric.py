import numpy as np
import pytest

from wintgen.polycurve import CurveJet
from wintgen.quadric import (
    QuadricClass,
    certify_curve,
    certify_isotropic_holomorphic,
    classify,
    hermitian_metric,
    reports_to_json,
    span_distance,
)

WP = np.array([1.0, 1, 0, 0, 0, 0, 0], dtype=complex)


def _pair_lift():
    return (np.eye(7)[2] - 1j * np.eye(7)[3]).astype(complex)


def test_classify_lightcone():
    assert classify(WP) is QuadricClass.LIGHTCONE


def test_classify_qplus():
    assert classify(_pair_lift()) is QuadricClass.QPLUS


def test_classify_invalid():
    assert classify(np.eye(7)[1].astype(complex)) is QuadricClass.INVALID


def test_classify_zero_vector():
    with pytest.raises(ValueError):
        classify(np.zeros(7, dtype=complex))


def test_classify_projective():
    rng = np.random.default_rng(0)
    for lift, expect in ((WP, QuadricClass.LIGHTCONE), (_pair_lift(), QuadricClass.QPLUS)):
        for _ in range(10):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            assert classify(c * lift) is expect


def _jet(value, dz):
    zero = np.zeros_like(value)
    return CurveJet(z=0j, value=value, dz=dz, dzz=zero, dzbar=zero)


def test_hermitian_metric_parallel_direction():
    xi = _pair_lift()
    assert hermitian_metric(_jet(xi, (2 + 1j) * xi)) == pytest.approx(0.0)


def test_hermitian_metric_constant_curve():
    xi = _pair_lift()
    assert hermitian_metric(_jet(xi, np.zeros_like(xi))) == 0.0


def test_hermitian_metric_enneper_scaling(enneper5):
    z = np.array([0.3 + 0.2j])
    vals = enneper5["xi"].eval_many(z, order=1)
    h1 = hermitian_metric(_jet(vals[0][0], vals[1][0]))
    assert h1 > 0
    c = 2 + 1j
    h2 = hermitian_metric(_jet(c * vals[0][0], c * vals[1][0]))
    assert abs(h2 - h1) < 1e-8 * abs(h1)


def test_hermitian_metric_lift_invariance(enneper5):
    rng = np.random.default_rng(1)
    z = np.array([0.52 + 0.61j])
    vals = enneper5["xi"].eval_many(z, order=1)
    h1 = hermitian_metric(_jet(vals[0][0], vals[1][0]))
    for _ in range(10):
        c = rng.standard_normal() + 1j * rng.standard_normal()
        h2 = hermitian_metric(_jet(c * vals[0][0], c * vals[1][0]))
        assert abs(h2 - h1) <= 1e-10 * abs(h1)


def test_hermitian_metric_rejects_lightcone():
    with pytest.raises(ValueError):
        hermitian_metric(_jet(WP, np.eye(7)[2].astype(complex)))


def test_certify_polycurve_machine_level(enneper5):
    u = np.linspace(0.2, 0.9, 6)
    z = (u[:, None] + 1j * u[None, :]).ravel()
    reports = certify_curve(enneper5["xi"], z)
    for r in reports:
        assert r.holo_residual == 0.0
        assert r.iso_residual <= 1e-12
        assert r.classification == "QPlusPoint"
        assert r.hermitian_norm_sq > 0


def test_certify_detects_constant_perturbation(enneper5):
    z = np.array([0.4 + 0.3j])
    vals = enneper5["xi"].eval_many(z, order=1)
    c = np.zeros(7)
    c[3] = 1.0
    pert = vals[0] + 1e-3 * c
    rep = certify_isotropic_holomorphic(pert, vals[1], np.zeros_like(pert), z=z)
    assert rep[0].iso_residual >= 1e-4


def test_certify_detector_linear_growth(enneper5):
    """The isotropy residual grows linearly in the perturbation size (the
    first-order term of the quadratic form dominates for small eps)."""
    z = np.array([0.4 + 0.3j])
    vals = enneper5["xi"].eval_many(z, order=1)
    c = np.zeros(7)
    c[3] = 1.0
    res = []
    for eps in (1e-6, 1e-5, 1e-4, 1e-3):
        pert = vals[0] + eps * c
        rep = certify_isotropic_holomorphic(pert, vals[1], np.zeros_like(pert), z=z)
        res.append(rep[0].iso_residual)
    slopes = np.diff(np.log10(res))
    assert np.all(res[:-1] < res[1:])  # monotone growth
    assert np.all(np.abs(slopes - 1.0) < 0.2)


def test_certify_requires_immersion():
    xi = _pair_lift()
    with pytest.raises(ValueError):
        certify_isotropic_holomorphic(xi, np.zeros_like(xi), np.zeros_like(xi))


def test_reports_json(tmp_path, enneper5):
    reports = certify_curve(enneper5["xi"], np.array([0.3 + 0.2j]))
    path = tmp_path / "reports.json"
    text = reports_to_json(reports, path)
    assert path.read_text() == text
    assert "holo_residual" in text and "QPlusPoint" in text


def test_span_distance_basics():
    a = _pair_lift()
    assert span_distance(a, (3 - 2j) * a) < 1e-14
    b = (np.eye(7)[4] - 1j * np.eye(7)[5]).astype(complex)
    assert span_distance(a, b) == pytest.approx(1.0)
    assert span_distance(a, np.conj(a)) < 1e-14  # conjugate spans the same plane
