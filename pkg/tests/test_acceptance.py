"""Acceptance suite: every top-level criterion at its stated tolerance,
one pass/fail line printed per criterion (run with `pytest -s` to see them
inline).  Scale: m = 3, the ENNEPER5 fixture on a 9x9 z-grid with 8 fiber
samples and FD step 1e-3.
"""
import time

import numpy as np
import pytest

from wintgen import bruteforce
from wintgen.canonical import traceless_pair, wintgen_defect_batch
from wintgen.pipeline import PipelineConfig, roundtrip_check, run_full
from wintgen.weierstrass import lift_to_quadric, random_weierstrass, weierstrass_isotropic

ETA = [-1] + [1] * 6


def _line(num, ok, name, detail):
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


@pytest.fixture(scope="module")
def full_report():
    start = time.perf_counter()
    report = run_full(PipelineConfig())
    report["_elapsed"] = time.perf_counter() - start
    return report


def test_criterion_1_generator_exactness():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    for _ in range(50):
        data = random_weierstrass(rng, m=3, max_degree=4)
        phi, x = weierstrass_isotropic(data)
        assert phi.dot(phi).is_zero()
        xi = lift_to_quadric(x)
        assert xi.dot(xi, metric=ETA).is_zero()
        xi_z = xi.derivative()
        assert xi_z.dot(xi_z, metric=ETA).is_zero()
    elapsed = time.perf_counter() - start
    ok = elapsed < 1.0
    assert _line(1, ok, "generator exactness",
                 f"50 random data sets, all identities exact ({elapsed:.2f}s)")


def test_criterion_2_stereographic_bijection():
    start = time.perf_counter()
    rt = roundtrip_check(3, 1000, seed=7)
    elapsed = time.perf_counter() - start
    ok = rt["max_error_flat"] < 1e-12 and rt["max_error_quadric"] < 1e-12
    ok &= elapsed < 1.0
    assert _line(
        2, ok, "stereographic bijection",
        f"flat {rt['max_error_flat']:.2e}, quadric {rt['max_error_quadric']:.2e} "
        f"over 1000 trials each way ({elapsed:.2f}s)",
    )


def test_criterion_3_envelope_wintgen_ideal(full_report):
    env_stats = full_report["envelope"]
    pert = full_report["perturbation_control"]
    elapsed = full_report["_elapsed"]
    defect = env_stats["defect_stats"]["max_defect"]
    ok = (
        env_stats["regular"] == env_stats["samples"] == 9 * 9 * 8
        and defect < 1e-4
        and pert["median_defect"] > 1e-3
        and elapsed < 30.0
    )
    assert _line(
        3, ok, "envelope is Wintgen ideal",
        f"max defect {defect:.2e} on {env_stats['regular']} regular samples; "
        f"perturbation control median {pert['median_defect']:.2e} "
        f"(pipeline {elapsed:.1f}s)",
    )


def test_criterion_4_sphere_recovery(full_report):
    rec = full_report["envelope"]["recovery_max"]
    ok = rec < 1e-4
    assert _line(
        4, ok, "mean curvature sphere recovery",
        f"max projective distance {rec:.2e} at every regular sample",
    )


def test_criterion_5_gauss_holomorphy_isotropy(full_report):
    g = full_report["gauss"]
    analytic = full_report["curve_certification"]["iso_max"]
    ok = (
        g["fiber_constancy"] < 1e-4
        and g["isotropy"] < 1e-4
        and analytic < 1e-12
    )
    assert _line(
        5, ok, "Gauss map holomorphy/isotropy + fiber constancy",
        f"fiber {g['fiber_constancy']:.2e}, isotropy {g['isotropy']:.2e}, "
        f"analytic-jet isotropy {analytic:.2e}",
    )


def test_criterion_6_submersion_factor(full_report):
    sub = full_report["gauss"]["submersion"]
    ok = sub < 1e-3
    assert _line(
        6, ok, "Riemannian submersion factor (mu^2 = 1/6)",
        f"relative deviation {sub:.2e}",
    )


def test_criterion_7_moebius_constraints(full_report):
    b_tr = full_report["envelope"]["b_trace_max"]
    b_n = full_report["envelope"]["b_norm_max"]
    c_res = full_report["gauss"]["c_residual_max"]
    ok = b_tr < 1e-10 and b_n < 1e-10 and c_res < 1e-3
    assert _line(
        7, ok, "invariant tensor constraints",
        f"trace {b_tr:.2e}, norm-2/3 {b_n:.2e} (every point), "
        f"1-form symmetries {c_res:.2e}",
    )


def test_criterion_8_minimal_center_surface(full_report):
    c = full_report["centers"]
    r = full_report["centers_rotated_pole"]
    ok = (
        c["analytic_max"] < 1e-10
        and c["fd_max"] < 1e-4
        and c["cross_path_max"] < 1e-10
        and r["analytic_max"] < 1e-10
        and r["fd_max"] < 1e-4
        and r["cross_path_max"] < 1e-10
    )
    assert _line(
        8, ok, "minimal center surface",
        f"analytic {c['analytic_max']:.2e}, FD {c['fd_max']:.2e}, "
        f"cross-path {c['cross_path_max']:.2e}; rotated pole: "
        f"analytic {r['analytic_max']:.2e}, FD {r['fd_max']:.2e}, "
        f"cross-path {r['cross_path_max']:.2e}",
    )


def test_criterion_9_bruteforce_oracle_agreement():
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    disagreements = 0
    for kind in ("ideal", "generic"):
        for _ in range(100):
            if kind == "ideal":
                a1, a2 = bruteforce.random_ideal_pair(rng)
            else:
                a1, a2 = bruteforce.random_generic_pair(rng)
            t1, t2, _, _ = traceless_pair(a1, a2)
            algebraic = wintgen_defect_batch(t1[None], t2[None])["defect"][0] < 1e-8
            brute = bruteforce.is_ideal(a1, a2, step_deg=3.0)
            disagreements += algebraic != brute
            assert algebraic == (kind == "ideal")
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 60.0
    assert _line(
        9, ok, "brute-force oracle agreement",
        f"0 disagreements on 100 ideal + 100 generic pairs ({elapsed:.1f}s)"
        if disagreements == 0
        else f"{disagreements} disagreements ({elapsed:.1f}s)",
    )
