import numpy as np
import pytest

from wintgen.lorentz import inner
from wintgen.stereo import (
    PolePair,
    SpherePoleError,
    chart_to_ambient,
    euclidean_chart,
    inverse_classical,
    lift_complex,
    lorentz_defect,
    pole_adaptation,
    project_classical,
    project_complex,
    random_lorentz,
)


@pytest.fixture
def poles():
    return PolePair.standard(7)


def test_pole_pair_validation():
    with pytest.raises(ValueError):
        PolePair(np.array([1.0, 0, 0, 0, 0, 0, 0]), np.array([1.0, -1, 0, 0, 0, 0, 0]))


def test_project_pole_star_to_origin(poles):
    x = project_complex(poles.wps.astype(complex), poles)
    assert np.max(np.abs(x)) < 1e-14


def test_project_pole_errors(poles):
    with pytest.raises(SpherePoleError) as err:
        project_complex(poles.wp.astype(complex), poles)
    assert err.value.pairing is not None


def test_lift_examples(poles):
    x = np.zeros(7, dtype=complex)
    assert np.allclose(lift_complex(x, poles), poles.wps)
    x[2] = 1.0
    xi = lift_complex(x, poles)
    assert np.allclose(xi, [2, 0, 2, 0, 0, 0, 0])
    assert abs(inner(xi, xi)) < 1e-14


def test_lift_requires_pole_orthogonality(poles):
    bad = np.zeros(7, dtype=complex)
    bad[0] = 1.0
    with pytest.raises(ValueError):
        lift_complex(bad, poles)


def test_roundtrip_flat(poles):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((200, 7)) + 1j * rng.standard_normal((200, 7))
    x[:, :2] = 0
    assert np.max(np.abs(project_complex(lift_complex(x, poles), poles) - x)) < 1e-12


def test_projectivity(poles, enneper5):
    z = np.array([0.3 + 0.2j])
    xi = enneper5["xi"].eval_many(z, order=0)[0]
    rng = np.random.default_rng(1)
    for _ in range(5):
        c = rng.standard_normal() + 1j * rng.standard_normal()
        a = project_complex(xi, poles)
        b = project_complex(c * xi, poles)
        assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))


def test_isotropy_transport_coefficientwise(enneper5):
    # if <X_z, X_z> = 0 as a polynomial then <xi_z, xi_z> = 0 as a polynomial
    xi_z = enneper5["xi"].derivative()
    assert xi_z.dot(xi_z, metric=[-1] + [1] * 6).is_zero()


def test_classical_south_pole_to_origin():
    x = np.zeros(6)
    x[0] = -1.0
    assert np.max(np.abs(project_classical(x))) == 0.0


def test_classical_equator():
    x = np.zeros(6)
    x[1] = 1.0
    out = project_classical(x)
    assert np.allclose(out, [1, 0, 0, 0, 0])


def test_classical_roundtrip():
    rng = np.random.default_rng(2)
    y = rng.standard_normal((100, 5))
    x = inverse_classical(y)
    assert np.max(np.abs(np.linalg.norm(x, axis=-1) - 1)) < 1e-12
    assert np.max(np.abs(project_classical(x) - y)) < 1e-12


def test_classical_general_pole():
    rng = np.random.default_rng(3)
    pole = rng.standard_normal(6)
    pole /= np.linalg.norm(pole)
    y = rng.standard_normal((50, 5))
    x = inverse_classical(y, pole=pole)
    assert np.max(np.abs(project_classical(x, pole=pole) - y)) < 1e-11


def test_classical_pole_error():
    pole = np.zeros(6)
    pole[0] = 1.0
    with pytest.raises(SpherePoleError):
        project_classical(pole, pole=pole)


def test_pole_adaptation_is_lorentz():
    rng = np.random.default_rng(4)
    t = random_lorentz(rng, 7)
    assert lorentz_defect(t) < 1e-11
    wp = t @ np.array([1.0, 1, 0, 0, 0, 0, 0])
    wps = t @ np.array([1.0, -1, 0, 0, 0, 0, 0])
    pair = PolePair(wp, wps)
    adapt = pole_adaptation(pair)
    assert lorentz_defect(adapt) < 1e-10
    assert np.allclose(adapt @ wp, [1, 1, 0, 0, 0, 0, 0], atol=1e-12)
    assert np.allclose(adapt @ wps, [1, -1, 0, 0, 0, 0, 0], atol=1e-12)


def test_chart_roundtrip_general_poles():
    rng = np.random.default_rng(5)
    t = random_lorentz(rng, 7, boost=0.4)
    pair = PolePair(t @ np.array([1.0, 1, 0, 0, 0, 0, 0]),
                    t @ np.array([1.0, -1, 0, 0, 0, 0, 0]))
    y = rng.standard_normal((20, 5))
    amb = chart_to_ambient(y, pair)
    assert np.max(np.abs(inner(amb, pair.wp))) < 1e-12
    assert np.max(np.abs(inner(amb, pair.wps))) < 1e-12
    assert np.max(np.abs(euclidean_chart(amb, pair) - y)) < 1e-12


def test_lift_positivity_identity(poles):
    """<xi, conj xi> = 4(<X, conj X> - Re<X,X>) for lifted curves; positive
    exactly when X is not a real vector (lightcone points come from real X)."""
    rng = np.random.default_rng(6)
    x = rng.standard_normal((50, 7)) + 1j * rng.standard_normal((50, 7))
    x[:, :2] = 0
    xi = lift_complex(x, poles)
    lhs = inner(xi, np.conj(xi)).real
    rhs = 4 * (inner(x, np.conj(x)).real - inner(x, x).real)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * np.max(np.abs(lhs))
    xreal = x.real.astype(complex)
    xi2 = lift_complex(xreal, poles)
    assert np.max(np.abs(inner(xi2, np.conj(xi2)))) < 1e-12 * np.max(np.abs(xi2)) ** 2
