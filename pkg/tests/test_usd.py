"""Geometry, determinant and optimizer tests."""

import math

import numpy as np
import pytest

from _oracles import explicit_a0_entries, grid_oracle, random_symmetric_gram, random_unit_vectors_gram
from usdguard.decoy import optimal_alpha
from usdguard.states import (
    GramData,
    cat_prep,
    coherent_prep,
    gram_from_preps,
    squeezed_prep,
)
from usdguard.usd import (
    build_a0,
    build_geometry,
    det_a0_closed,
    f1,
    gram_delta,
    optimize_usd,
)

EXP_M05 = 0.6065306597126334
F1_EXAMPLE = 0.11434898671989217  # f1 at p_s = 0.5 for s12 = exp(-0.5), s13 = 0.7
F1_DELTA = 0.6265306597126334  # 1 + exp(-0.5) - 2 * 0.49
TWO_STATE_BOUND = 0.3934693402873666  # 1 - exp(-0.5)


def cat_gram(alpha: float) -> GramData:
    return gram_from_preps(
        coherent_prep(alpha, 0.0), coherent_prep(alpha, math.pi), cat_prep(alpha, 0.0)
    )


def test_geometry_orthogonal_triple():
    geom = build_geometry(GramData(0.0, 0.0, 0.0))
    eye = np.eye(3)
    for i, (u, v) in enumerate(zip((geom.u1, geom.u2, geom.u3), (geom.v1, geom.v2, geom.v3))):
        assert np.allclose(u, eye[i]) and np.allclose(v, eye[i])
    assert geom.l == 1.0 and geom.m == 1.0 and not geom.degenerate


def test_geometry_cat_is_degenerate():
    geom = build_geometry(cat_gram(0.5))
    assert geom.degenerate
    assert geom.m < 1e-8
    assert geom.v1 is None and geom.v2 is None and geom.v3 is None


def test_geometry_reproduces_overlaps():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_unit_vectors_gram(rng)
        geom = build_geometry(g)
        us = (geom.u1, geom.u2, geom.u3)
        gram = g.matrix()
        for i in range(3):
            for j in range(3):
                assert abs(np.vdot(us[i], us[j]) - gram[i, j]) < 1e-10


def test_reciprocal_basis_property():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(100):
        g = random_unit_vectors_gram(rng)
        geom = build_geometry(g)
        us = (geom.u1, geom.u2, geom.u3)
        vs = (geom.v1, geom.v2, geom.v3)
        for i in range(3):
            for j in range(3):
                err = abs(np.vdot(vs[i], us[j]) - (1.0 if i == j else 0.0))
                worst = max(worst, err)
    assert worst < 1e-9


def test_geometry_rejects_non_psd():
    with pytest.raises(ValueError):
        build_geometry(GramData(0.9, 0.9, -0.9))


def test_a0_identity_at_zero_probs():
    geom = build_geometry(GramData(EXP_M05, 0.3, 0.3))
    assert np.allclose(build_a0(geom, 0.0, 0.0), np.eye(3))


def test_a0_orthogonal_decoy_diagonal():
    geom = build_geometry(GramData(EXP_M05, 0.0, 0.0))
    a0 = build_a0(geom, 0.3, 0.0)
    assert abs(a0[0, 0] - 0.7) < 1e-12


def test_a0_matches_explicit_entries():
    rng = np.random.default_rng(23)
    for _ in range(50):
        g = random_unit_vectors_gram(rng)
        p_s, p_d = rng.uniform(0.0, 1.0, 2)
        a0 = build_a0(build_geometry(g), float(p_s), float(p_d))
        expected = explicit_a0_entries(g, float(p_s), float(p_d))
        assert np.abs(a0 - expected).max() < 1e-10
        assert np.abs(a0 - a0.conj().T).max() < 1e-12  # Hermitian


def test_a0_rejects_degenerate_and_out_of_range():
    geom = build_geometry(cat_gram(0.5))
    with pytest.raises(ValueError):
        build_a0(geom, 0.1, 0.1)
    good = build_geometry(GramData(0.5, 0.2, 0.2))
    with pytest.raises(ValueError):
        build_a0(good, -0.2, 0.5)
    with pytest.raises(ValueError):
        build_a0(good, 0.5, 1.2)


def test_det_closed_identity_at_zero():
    g = GramData(0.4, 0.3, 0.3)
    assert abs(det_a0_closed(g, 0.0, 0.0) - 1.0) < 1e-12


def test_det_closed_matches_numeric():
    rng = np.random.default_rng(31)
    for _ in range(300):
        g = random_symmetric_gram(rng)
        p_s, p_d = (float(x) for x in rng.uniform(0.0, 1.0, 2))
        numeric = float(np.linalg.det(build_a0(build_geometry(g), p_s, p_d)).real)
        assert abs(det_a0_closed(g, p_s, p_d) - numeric) < 1e-10


def test_det_closed_example_instance():
    g = GramData(EXP_M05, 0.7, 0.7)
    numeric = float(np.linalg.det(build_a0(build_geometry(g), 0.2, 0.3)).real)
    assert abs(det_a0_closed(g, 0.2, 0.3) - numeric) < 1e-12


def test_det_closed_rejects_asymmetric():
    with pytest.raises(ValueError):
        det_a0_closed(GramData(0.5, 0.2, 0.4), 0.1, 0.1)
    with pytest.raises(ValueError):
        det_a0_closed(cat_gram(0.5), 0.1, 0.1)  # degenerate


def test_f1_zero_at_delta():
    g = GramData(0.4, 0.5, 0.5)
    delta = gram_delta(g)
    assert abs(f1(g, delta)) < 1e-12


def test_f1_cat_decoy_origin():
    g = cat_gram(0.8)
    assert abs(gram_delta(g)) < 1e-10
    assert abs(f1(g, 0.0)) < 1e-9


def test_f1_example_value():
    g = GramData(EXP_M05, 0.7, 0.7)
    assert abs(gram_delta(g) - F1_DELTA) < 1e-12
    value = f1(g, 0.5)
    assert abs(value - F1_EXAMPLE) < 1e-12
    assert abs(det_a0_closed(g, 0.5, value)) < 1e-10


def test_f1_curve_zeroes_determinant():
    rng = np.random.default_rng(37)
    for _ in range(50):
        g = random_symmetric_gram(rng)
        for p in np.linspace(0.0, 1.0, 21):
            assert abs(det_a0_closed(g, float(p), f1(g, float(p)))) < 1e-10


def test_optimize_cat_decoy_disables_attack():
    for alpha in (0.1, 1.0, 2.0):
        sol = optimize_usd(cat_gram(alpha), 0.01)
        assert sol.degenerate
        assert (sol.p_s, sol.p_d, sol.p0) == (0.0, 0.0, 1.0)


def test_optimize_orthogonal_decoy_hits_two_state_bound():
    sol = optimize_usd(GramData(EXP_M05, 0.0, 0.0), 0.1)
    assert abs(sol.p_s - TWO_STATE_BOUND) < 1e-6
    assert abs(sol.p_d - 1.0) < 1e-9
    assert sol.min_eig_a0 >= -1e-10
    assert abs(sol.p0 - (1.0 - 0.9 * sol.p_s - 0.1 * sol.p_d)) < 1e-12


def test_optimize_squeezed_matches_grid_oracle():
    alpha = optimal_alpha(0.5)
    g = gram_from_preps(
        coherent_prep(alpha, 0.0), coherent_prep(alpha, math.pi), squeezed_prep(0.5)
    )
    sol = optimize_usd(g, 0.1)
    oracle_obj, _ = grid_oracle(g, 0.1)
    assert 0.9 * sol.p_s + 0.1 * sol.p_d >= oracle_obj - 1e-3


def test_optimizer_dominates_grid_oracle_random():
    rng = np.random.default_rng(41)
    for _ in range(3):
        g = random_symmetric_gram(rng)
        nu = float(rng.uniform(0.01, 0.4))
        sol = optimize_usd(g, nu)
        obj = (1.0 - nu) * sol.p_s + nu * sol.p_d
        oracle_obj, _ = grid_oracle(g, nu)
        assert obj >= oracle_obj - 1e-3
        assert sol.min_eig_a0 >= -1e-10


def test_optimal_ps_non_increasing_in_s12():
    # Holds where the two-state bound p_s <= 1 - s12 binds.  At very low
    # signal overlap the decoy constraint binds instead and relaxes as
    # s12 grows (brute-force grid confirms optimal p_s rising from 0.870
    # at s12 = 0.05 to 0.8727 at s12 = 0.127 for s13 = 0.3, nu = 0.1),
    # so the sweep starts past that corner.
    s13 = 0.3
    nu = 0.1
    prev = math.inf
    for s12 in np.linspace(0.2, 0.9, 12):
        sol = optimize_usd(GramData(float(s12), s13, s13), nu)
        assert sol.p_s <= prev + 1e-9
        assert sol.p_s <= 1.0 - float(s12) + 1e-9
        prev = sol.p_s


def test_optimize_rejects_bad_nu_and_asymmetric():
    g = GramData(0.5, 0.2, 0.2)
    with pytest.raises(ValueError):
        optimize_usd(g, 0.0)
    with pytest.raises(ValueError):
        optimize_usd(GramData(0.5, 0.2, 0.5), 0.1)


def test_solution_p0_identity():
    rng = np.random.default_rng(43)
    for _ in range(5):
        g = random_symmetric_gram(rng)
        nu = float(rng.uniform(0.01, 0.3))
        sol = optimize_usd(g, nu)
        assert abs(sol.p0 - (1.0 - (1.0 - nu) * sol.p_s - nu * sol.p_d)) < 1e-12
