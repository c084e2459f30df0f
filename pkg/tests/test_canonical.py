import numpy as np
import pytest

from wintgen.bruteforce import random_ideal_pair, random_rotation
from wintgen.canonical import (
    certify_field,
    reconstruct_pair,
    traceless_pair,
    wintgen_defect,
    wintgen_defect_batch,
    wintgen_report_full,
)

MU3 = np.sqrt(1.0 / 6.0)


def canonical_pair(mu, m=3):
    b1 = np.zeros((m, m))
    b2 = np.zeros((m, m))
    b1[0, 1] = b1[1, 0] = mu
    b2[0, 0] = mu
    b2[1, 1] = -mu
    return b1, b2


def test_traceless_pair_identity():
    a1t, a2t, h1, h2 = traceless_pair(np.eye(3), np.diag([1.0, -1, 0]))
    assert np.allclose(a1t, 0)
    assert np.allclose(a2t, np.diag([1.0, -1, 0]))
    assert h1 == pytest.approx(1.0)
    assert h2 == pytest.approx(0.0)


def test_traceless_random():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3))
    a = a + a.T
    t1, _, _, _ = traceless_pair(a, a)
    assert abs(np.trace(t1)) < 1e-14


def test_canonical_pair_zero_defect():
    b1, b2 = canonical_pair(MU3)
    rep = wintgen_defect(b1, b2)
    assert rep.defect < 1e-12
    assert rep.mu0 == pytest.approx(MU3)
    # canonical distribution is span{e1, e2}
    proj = rep.distribution.T @ rep.distribution
    expected = np.diag([1.0, 1, 0])
    assert np.max(np.abs(proj - expected)) < 1e-10


def test_max_violation_pair():
    # A1 = diag(1,-1,0), A2 = 0: the norm-balance condition fails maximally
    rep = wintgen_defect(np.diag([1.0, -1, 0]), np.zeros((3, 3)))
    assert rep.defect > 0.4


def test_conjugation_invariance():
    rng = np.random.default_rng(1)
    b1, b2 = canonical_pair(MU3)
    base = wintgen_defect(b1, b2).defect
    for _ in range(10):
        q = random_rotation(rng, 3)
        th = rng.uniform(0, 2 * np.pi)
        c, s = np.cos(th), np.sin(th)
        r1 = c * b1 + s * b2
        r2 = -s * b1 + c * b2
        rep = wintgen_defect(q @ r1 @ q.T, q @ r2 @ q.T)
        assert abs(rep.defect - base) < 1e-12
    # also for a generic non-ideal pair
    a1 = rng.standard_normal((3, 3))
    a1 = a1 + a1.T
    a2 = rng.standard_normal((3, 3))
    a2 = a2 + a2.T
    t1, t2, _, _ = traceless_pair(a1, a2)
    base = wintgen_defect(t1, t2).defect
    for _ in range(10):
        q = random_rotation(rng, 3)
        rep = wintgen_defect(q @ t1 @ q.T, q @ t2 @ q.T)
        assert abs(rep.defect - base) < 1e-12


def test_scale_equivariance():
    rng = np.random.default_rng(2)
    a1 = rng.standard_normal((3, 3))
    a1 = a1 + a1.T - np.trace(a1 + a1.T) / 3 * np.eye(3)
    a2 = rng.standard_normal((3, 3))
    a2 = a2 + a2.T - np.trace(a2 + a2.T) / 3 * np.eye(3)
    base = wintgen_defect(a1, a2).defect
    for c in (2.0, -3.5, 0.01, 170.0):
        assert wintgen_defect(c * a1, c * a2).defect == pytest.approx(base, rel=1e-9)


def test_zero_defect_reconstruction():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a1, a2 = random_ideal_pair(rng)
        rep = wintgen_report_full(a1, a2)
        assert rep.defect < 1e-10
        b1, b2 = reconstruct_pair(rep, 3)
        assert np.max(np.abs(b1 - a1)) < 1e-8
        assert np.max(np.abs(b2 - a2)) < 1e-8


def test_batch_matches_single():
    rng = np.random.default_rng(4)
    pairs = [random_ideal_pair(rng, with_trace=False) for _ in range(5)]
    a1 = np.stack([p[0] for p in pairs])
    a2 = np.stack([p[1] for p in pairs])
    batch = wintgen_defect_batch(a1, a2)
    for k in range(5):
        rep = wintgen_defect(a1[k], a2[k])
        assert rep.defect == pytest.approx(batch["defect"][k], abs=1e-15)
        assert rep.mu0 == pytest.approx(batch["mu0"][k], abs=1e-12)


def test_degenerate_spectrum_is_defect_not_error():
    # S has a triple eigenvalue here; the split is reported via r2
    a1 = np.diag([1.0, 1, -2]) / np.sqrt(6)
    a2 = np.zeros((3, 3))
    rep = wintgen_defect(a1, a2)
    assert np.isfinite(rep.defect)
    assert rep.defect > 0.1


def test_zero_pair_rejected():
    with pytest.raises(ValueError):
        wintgen_defect(np.zeros((3, 3)), np.zeros((3, 3)))


def test_certify_field_stats(small_envelope):
    env, fields = small_envelope
    assert fields["defect_stats"]["max_defect"] < 1e-4
    assert fields["defect_stats"]["count"] == int(np.sum(fields["ok"]))


def test_certify_field_masks():
    rng = np.random.default_rng(5)
    a1, a2 = random_ideal_pair(rng)
    ops = np.stack([np.stack([a1, a2]), np.stack([a1, a2])])
    mask = np.array([True, False])
    out = certify_field(ops, mask=mask)
    assert np.isfinite(out["defect"][0])
    assert np.isnan(out["defect"][1])


def test_m4_canonical_pair():
    b1, b2 = canonical_pair(np.sqrt(3.0 / 16.0), m=4)
    rep = wintgen_defect(b1, b2)
    assert rep.defect < 1e-12
    assert rep.tangent_frame.shape == (4, 4)
