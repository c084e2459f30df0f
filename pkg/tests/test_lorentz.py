import numpy as np
import pytest

from wintgen.lorentz import (
    DegenerateSpanError,
    SignatureError,
    gram,
    inner,
    orthonormal_complement,
    subspace_signature,
)

WP = np.array([1.0, 1, 0, 0, 0, 0, 0])
WPS = np.array([1.0, -1, 0, 0, 0, 0, 0])


def test_inner_pole_pairing():
    assert inner(WP, WPS) == -2.0
    assert inner(WP, WP) == 0.0


def test_inner_timelike_unit():
    e0 = np.eye(7)[0]
    assert inner(e0, e0) == -1.0


def test_inner_orthogonal_spacelike():
    assert inner(np.eye(7)[1], np.eye(7)[2]) == 0.0


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        inner(np.zeros(7), np.zeros(6))


def test_inner_symmetric_bilinear():
    rng = np.random.default_rng(0)
    for _ in range(50):
        u, v, w = rng.standard_normal((3, 7))
        a, b = rng.standard_normal(2)
        assert inner(u, v) == inner(v, u)
        assert abs(inner(a * u + b * v, w) - (a * inner(u, w) + b * inner(v, w))) < 1e-12


def test_cinner_isotropic_pair():
    u = np.zeros(7, dtype=complex)
    u[2] = 1.0
    u[3] = 1j
    assert inner(u, u) == 0.0


def test_cinner_restricts_to_real():
    rng = np.random.default_rng(1)
    u = rng.standard_normal(7)
    assert inner(u.astype(complex), u.astype(complex)) == pytest.approx(inner(u, u))


def test_cinner_orthonormal_pair_expansion():
    # xi = xi1 - i xi2 with orthonormal spacelike xi1, xi2:
    # <xi,xi> = 0 and <xi, conj xi> = 2 by expanding bilinearity
    xi1 = np.eye(7)[2]
    xi2 = np.eye(7)[3]
    xi = xi1 - 1j * xi2
    assert inner(xi, xi) == 0
    assert inner(xi, np.conj(xi)) == 2


def test_cinner_self_conjugate_real():
    rng = np.random.default_rng(2)
    for _ in range(20):
        u = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        val = inner(u, np.conj(u))
        assert abs(val.imag) < 1e-12 * (1 + abs(val.real))


def test_complement_coordinate_subspace():
    basis = np.stack([np.eye(7)[1], np.eye(7)[2]])
    frame = orthonormal_complement(basis, (1, 4))
    assert frame.gram_defect() < 1e-10
    # contains the timelike unit vector and four spacelike units
    assert any(np.allclose(v, np.eye(7)[0]) for v in frame.vectors)
    assert inner(frame.vectors[0], frame.vectors[0]) == pytest.approx(-1.0)


def test_complement_enneper_v_frame(enneper5):
    from wintgen.envelope import SphereCongruence

    cong = SphereCongruence(enneper5["xi"], 3)
    fr = cong.frame_at(0.3 + 0.2j)
    comp = orthonormal_complement(fr.v_frame, (1, 2))
    assert comp.signature == (1, 2)
    assert comp.gram_defect() < 1e-10
    # orthogonal to the input span
    for b in fr.v_frame:
        assert np.max(np.abs(inner(comp.vectors, b))) < 1e-10


def test_complement_lightlike_basis_degenerate():
    with pytest.raises(DegenerateSpanError):
        orthonormal_complement(np.stack([WP]), (1, 5))


def test_complement_signature_mismatch():
    basis = np.stack([np.eye(7)[1]])
    with pytest.raises(SignatureError):
        orthonormal_complement(basis, (0, 5))


def test_complement_deterministic():
    rng = np.random.default_rng(3)
    basis = rng.standard_normal((2, 7))
    basis[:, 0] *= 0.1
    a = orthonormal_complement(basis, (1, 4)).vectors
    b = orthonormal_complement(basis, (1, 4)).vectors
    assert np.array_equal(a, b)


def test_signature_examples(enneper5):
    assert subspace_signature(WP) == (0, 0, 1)
    assert subspace_signature(np.stack([np.eye(7)[2], np.eye(7)[3]])) == (0, 2, 0)
    vals = enneper5["xi"].eval_many(np.array([0.3 + 0.2j]), order=1)
    span = np.stack(
        [vals[0][0].real, vals[0][0].imag, vals[1][0].real, vals[1][0].imag]
    )
    assert subspace_signature(span) == (0, 4, 0)


def test_signature_invariant_under_recombination():
    rng = np.random.default_rng(4)
    for _ in range(20):
        vecs = rng.standard_normal((3, 7))
        sig = subspace_signature(vecs)
        a = rng.standard_normal((3, 3))
        while abs(np.linalg.det(a)) < 0.1:
            a = rng.standard_normal((3, 3))
        assert subspace_signature(a @ vecs) == sig


def test_gram_matches_manual():
    rng = np.random.default_rng(5)
    vecs = rng.standard_normal((3, 7))
    g = gram(vecs)
    for i in range(3):
        for j in range(3):
            assert g[i, j] == pytest.approx(inner(vecs[i], vecs[j]))
