import numpy as np
import pytest

from wintgen.pipeline import build_envelope, moebius_fields
from wintgen.weierstrass import lift_to_quadric, load_fixture, weierstrass_isotropic


@pytest.fixture(scope="session")
def enneper5():
    data = load_fixture("enneper5")
    phi, x = weierstrass_isotropic(data)
    xi = lift_to_quadric(x)
    return {"data": data, "phi": phi, "X": x, "xi": xi}


@pytest.fixture(scope="session")
def small_envelope(enneper5):
    """5x5x4 envelope for fast module tests (acceptance uses the full grid)."""
    u = np.linspace(0.2, 0.8, 5)
    v = np.linspace(0.2, 0.8, 5)
    t = np.arange(4) * (np.pi / 2)
    env = build_envelope(enneper5["xi"], 3, u, v, t, 1e-3)
    fields = moebius_fields(env, enneper5["xi"])
    return env, fields
