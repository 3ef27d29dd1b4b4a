import json
import math

import numpy as np
import pytest

from cvwitness.exceptions import InapplicableError, InputError
from cvwitness.gaussian import (
    CovarianceMatrix,
    ModePartition,
    WeightVector,
    build_c_matrix,
    builtin,
    duan_check,
    gaussian_ppt_check,
    is_physical,
    load_covariance,
    mancini_check,
    partial_transpose,
    prop1a_check,
    prop1b_check,
    quadrature_index,
    second_moments,
    symplectic_eigenvalues,
    symplectic_form,
    tlur_check,
    tmsv,
    tmsv_with_ancillas,
    vacuum,
    werner_wolf_state,
)
from cvwitness.sampling import random_physical_cov, random_pure_cov, separable_mixture

R = 1.0
C2, S2 = math.cosh(2 * R), math.sinh(2 * R)
WW_VIOLATION = 6 * math.sqrt(2) - 8


def lossy(cov, mode, eta):
    """Pure-loss channel of transmissivity ``eta`` on one mode."""
    scale = np.ones(2 * cov.n_modes)
    scale[2 * mode:2 * mode + 2] = math.sqrt(eta)
    g = cov.gamma * np.outer(scale, scale)
    idx = slice(2 * mode, 2 * mode + 2)
    g[idx, idx] += (1 - eta) * np.eye(2)
    return CovarianceMatrix(g)


# --- data model ------------------------------------------------------------

def test_werner_wolf_entries():
    g = werner_wolf_state().gamma
    assert g.shape == (8, 8)
    assert g[0, 0] == 2 and g[0, 4] == 1 and g[1, 7] == -1 and g[5, 5] == 4
    np.testing.assert_array_equal(g, g.T)
    assert werner_wolf_state().n_modes == 4
    np.testing.assert_array_equal(werner_wolf_state().mean, np.zeros(8))


def test_werner_wolf_is_physical():
    cov = werner_wolf_state()
    sigma = cov.gamma + 1j * symplectic_form(4)
    assert np.linalg.eigvalsh(sigma)[0] >= -1e-10
    assert is_physical(cov)
    assert not is_physical(CovarianceMatrix(0.5 * np.eye(4)))


def test_second_moments():
    assert second_moments(vacuum(2), "x1", "x1") == 0.5
    ww = werner_wolf_state()
    assert second_moments(ww, "x1", "x3") == 0.5
    assert second_moments(ww, "p1", "x3") == 0.0
    assert second_moments(ww, 0, 4) == 0.5
    with pytest.raises(InputError):
        second_moments(ww, 0, 8)
    with pytest.raises(InputError):
        quadrature_index("q1")


def test_covariance_validation():
    with pytest.raises(InputError):
        CovarianceMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(InputError):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(InputError):
        CovarianceMatrix(np.eye(2), mean=[0.0])


def test_xxpp_conversion_roundtrip(tmp_path):
    ww = werner_wolf_state()
    perm = np.r_[0:8:2, 1:8:2]
    xxpp = ww.gamma[np.ix_(perm, perm)]
    doc = {"n_modes": 4, "ordering": "xxpp", "gamma": xxpp.tolist(),
           "mean": list(range(8))}
    path = tmp_path / "ww.json"
    path.write_text(json.dumps(doc))
    loaded = load_covariance(path)
    np.testing.assert_array_equal(loaded.gamma, ww.gamma)
    np.testing.assert_array_equal(loaded.mean, [0, 4, 1, 5, 2, 6, 3, 7])
    again = CovarianceMatrix.from_dict(loaded.to_dict())
    np.testing.assert_array_equal(again.gamma, ww.gamma)


@pytest.mark.parametrize("doc", [
    {"gamma": [[1, 0], [0, 1]]},
    {"n_modes": 2, "gamma": [[1, 0], [0, 1]]},
    {"n_modes": 1, "gamma": [[1, 0], [0, 1]], "ordering": "pxpx"},
])
def test_malformed_documents(doc):
    with pytest.raises(InputError):
        CovarianceMatrix.from_dict(doc)


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_covariance(path)


def test_builtins():
    np.testing.assert_array_equal(builtin("vacuum4").gamma, np.eye(8))
    np.testing.assert_allclose(builtin("tmsv:r=1").gamma, tmsv(1.0).gamma)
    assert builtin("tmsv-ancilla:r=0.5").n_modes == 4
    with pytest.raises(InputError):
        builtin("nope")


def test_partition_and_weights_validation():
    assert ModePartition.parse("2:2") == ModePartition(2, 2)
    with pytest.raises(InputError):
        ModePartition.parse("2-2")
    with pytest.raises(InputError):
        ModePartition(0, 2)
    with pytest.raises(InputError):
        WeightVector([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(InputError):
        WeightVector([1.0, np.nan], [1.0, 1.0])
    with pytest.raises(InputError):
        ModePartition(1, 1).check(vacuum(3))
    with pytest.raises(InputError):
        build_c_matrix(vacuum(2), ModePartition(1, 1), WeightVector.werner_wolf())


# --- covariance matrix C --------------------------------------------------

def test_c_matrix_zero_for_product_state(rng):
    a = random_physical_cov(rng, 2).gamma
    b = random_physical_cov(rng, 2).gamma
    g = np.zeros((8, 8))
    g[:4, :4], g[4:, 4:] = a, b
    w = WeightVector(rng.standard_normal(4), rng.standard_normal(4))
    np.testing.assert_array_equal(build_c_matrix(CovarianceMatrix(g), ModePartition(2, 2), w), 0)


def test_c_matrix_werner_wolf_example_weights():
    c = build_c_matrix(werner_wolf_state(), ModePartition(2, 2), WeightVector.werner_wolf())
    h = math.sqrt(2) / 4
    expected = np.zeros((4, 4))
    expected[0, 0], expected[1, 3], expected[2, 2], expected[3, 1] = h, -h, -h, -h
    np.testing.assert_allclose(c, expected, atol=1e-15)
    assert np.sum(np.linalg.svd(c, compute_uv=False)) ** 2 == pytest.approx(2.0, abs=1e-14)


@pytest.mark.parametrize("t", [0.1, 3.0, -2.0])
def test_c_matrix_bilinear_rescaling(t):
    ww, part, w = werner_wolf_state(), ModePartition(2, 2), WeightVector.werner_wolf()
    scaled = WeightVector(t * w.a, w.b / t)
    np.testing.assert_allclose(build_c_matrix(ww, part, scaled), build_c_matrix(ww, part, w),
                               atol=1e-15)


def test_c_matrix_ignores_mean(rng):
    ww = werner_wolf_state()
    shifted = CovarianceMatrix(ww.gamma, rng.standard_normal(8))
    part, w = ModePartition(2, 2), WeightVector.werner_wolf()
    np.testing.assert_array_equal(build_c_matrix(shifted, part, w), build_c_matrix(ww, part, w))


# --- weighted covariance test ---------------------------------------------

def test_prop1a_werner_wolf():
    rep = prop1a_check(werner_wolf_state(), ModePartition(2, 2), WeightVector.werner_wolf())
    assert rep.violation == pytest.approx(WW_VIOLATION, abs=1e-9)
    assert rep.detected
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.details["bracket_a"] == pytest.approx(2 - math.sqrt(2))
    assert rep.details["bracket_b"] == pytest.approx(4 - math.sqrt(2))


@pytest.mark.parametrize("split", [(1, 3), (2, 2), (3, 1)])
def test_prop1a_vacuum_never_detects(rng, split):
    part = ModePartition(*split)
    for _ in range(10):
        w = WeightVector(rng.standard_normal(2 * split[0]), rng.standard_normal(2 * split[1]))
        rep = prop1a_check(vacuum(4), part, w)
        assert rep.lhs == 0.0 and not rep.detected


def test_prop1a_embedded_tmsv():
    w = WeightVector([1, 1, 0, 0], [1, 1, 0, 0])
    rep = prop1a_check(tmsv_with_ancillas(R), ModePartition(2, 2), w)
    # ||C||^2 = sinh^2(2r), brackets cosh(2r) - 1, violation 2 (cosh 2r - 1)
    assert rep.violation == pytest.approx(2 * (C2 - 1), rel=1e-12)
    assert rep.detected


def test_prop1a_unphysical_marginal_flagged():
    rep = prop1a_check(CovarianceMatrix(0.1 * np.eye(4)), ModePartition(1, 1),
                       WeightVector([1, 1], [1, 1]))
    assert rep.status == "unphysical-marginal"
    assert not rep.detected


def test_prop1a_detection_invariant_under_joint_scaling(rng):
    part = ModePartition(2, 2)
    for _ in range(50):
        cov = random_physical_cov(rng, 4)
        w = WeightVector(rng.standard_normal(4), rng.standard_normal(4))
        rep = prop1a_check(cov, part, w)
        for s in (0.3, -2.0, 7.0):
            scaled = prop1a_check(cov, part, WeightVector(s * w.a, s * w.b))
            assert scaled.violation == pytest.approx(s**4 * rep.violation, rel=1e-9, abs=1e-12)
            if abs(rep.violation) > 1e-8:
                assert scaled.detected == rep.detected


# --- two-mode criteria ------------------------------------------------------

def test_prop1b_tmsv_closed_form():
    rep = prop1b_check(tmsv(R))
    assert rep.detected
    assert rep.lhs == pytest.approx(S2**2)
    assert rep.rhs == pytest.approx((C2 - 1) ** 2)
    assert rep.details["sign_used"] == "minus"
    assert not prop1b_check(tmsv(R), "plus").detected


def test_prop1b_product_state(rng):
    g = np.zeros((4, 4))
    g[:2, :2] = random_physical_cov(rng, 1).gamma
    g[2:, 2:] = random_physical_cov(rng, 1).gamma
    rep = prop1b_check(CovarianceMatrix(g))
    assert rep.lhs == 0.0 and not rep.detected


def test_prop1b_errors():
    with pytest.raises(InapplicableError):
        prop1b_check(vacuum(3))
    with pytest.raises(InputError):
        prop1b_check(vacuum(2), "sideways")


def test_duan():
    rep = duan_check(vacuum(2), 1.0)
    assert rep.lhs == pytest.approx(2.0) and rep.rhs == 2.0 and not rep.detected
    rep = duan_check(tmsv(R), 1.0)
    assert rep.lhs == pytest.approx(2 * math.exp(-2 * R))
    assert rep.detected
    # the orientation of the correlations is carried by the sign of a
    assert not duan_check(tmsv(R), -1.0).detected
    with pytest.raises(InputError):
        duan_check(vacuum(2), 0.0)


def test_duan_on_werner_wolf_marginal():
    # modes 1 and 3: Var(x1 + x3) = 3, Var(p1 - p3) = 5/2
    rep = duan_check(werner_wolf_state().reduced([0, 2]), 1.0)
    assert rep.lhs == pytest.approx(5.5)
    assert not rep.detected


def test_mancini():
    rep = mancini_check(vacuum(2), 1, 1, 1, 1)
    assert rep.lhs == pytest.approx(1.0) and rep.rhs == pytest.approx(1.0)
    assert not rep.detected
    rep = mancini_check(tmsv(R), 1, 1, 1, -1)
    assert rep.lhs == pytest.approx(math.exp(-4 * R))
    assert rep.detected
    with pytest.raises(InputError):
        mancini_check(vacuum(2), 0, 0, 0, 0)


def test_tlur():
    rep = tlur_check(vacuum(2), 1.0)
    assert rep.details["m"] == 0.0 and not rep.detected
    rep = tlur_check(tmsv(R), 1.0)
    assert rep.details["m"] == pytest.approx(0.0, abs=1e-12)
    assert rep.detected
    assert rep.violation == pytest.approx(duan_check(tmsv(R), 1.0).violation)
    with pytest.raises(InapplicableError):
        tlur_check(CovarianceMatrix(0.2 * np.eye(4)))


@pytest.mark.parametrize("a", [0.5, 0.8, 1.0, 1.3, 2.0])
def test_tlur_asymmetric_lossy_state_implies_prop1b(a):
    cov = lossy(tmsv(R), 1, 0.5)
    t = tlur_check(cov, a)
    d = duan_check(cov, a)
    b = prop1b_check(cov)
    assert t.details["m"] != 0.0
    # TLUR raises the Duan bound, so it can only detect more
    assert t.violation >= d.violation
    if t.detected or d.detected:
        assert b.detected
    assert b.detected


# --- symplectic spectra and PPT --------------------------------------------

def test_symplectic_eigenvalues():
    np.testing.assert_allclose(symplectic_eigenvalues(vacuum(3)), [1, 1, 1])
    np.testing.assert_allclose(symplectic_eigenvalues(tmsv(R)), [1, 1], atol=1e-12)
    nu = symplectic_eigenvalues(werner_wolf_state())
    assert np.all(nu >= 1 - 1e-9)
    np.testing.assert_allclose(nu, [1, 1, 3, 3], atol=1e-12)


def test_symplectic_eigenvalues_against_nonhermitian_oracle(rng):
    for _ in range(20):
        cov = random_physical_cov(rng, 3)
        ev = np.linalg.eigvals(1j * symplectic_form(3) @ cov.gamma)
        oracle = np.sort(np.abs(ev.real))[::2]
        np.testing.assert_allclose(symplectic_eigenvalues(cov), oracle, rtol=1e-9)


def test_pure_states_have_unit_spectrum(rng):
    for n in (1, 2, 4):
        for _ in range(10):
            np.testing.assert_allclose(symplectic_eigenvalues(random_pure_cov(rng, n)), 1,
                                       atol=1e-9)


def test_partial_transpose_flips_b_momenta():
    pt = partial_transpose(werner_wolf_state(), ModePartition(2, 2))
    assert pt.gamma[1, 7] == 1 and pt.gamma[3, 5] == 1 and pt.gamma[2, 6] == -1


def test_ppt():
    rep = gaussian_ppt_check(werner_wolf_state(), ModePartition(2, 2))
    assert not rep.detected
    assert rep.lhs >= 1 - 1e-9
    rep = gaussian_ppt_check(tmsv(R), ModePartition(1, 1))
    assert rep.detected
    assert rep.lhs == pytest.approx(math.exp(-2 * R), rel=1e-10)
    assert not gaussian_ppt_check(vacuum(4), ModePartition(2, 2)).detected


# --- sampled invariants ----------------------------------------------------

def test_soundness_on_separable_mixtures(rng):
    part = ModePartition(2, 2)
    detections = 0
    for _ in range(500):
        two = separable_mixture(rng, (1, 1))
        a = rng.uniform(0.2, 3.0) * rng.choice([-1, 1])
        reports = [
            duan_check(two, a),
            tlur_check(two, a),
            mancini_check(two, *rng.standard_normal(4)),
            prop1b_check(two),
        ]
        four = separable_mixture(rng, (2, 2))
        w = WeightVector(rng.standard_normal(4), rng.standard_normal(4))
        reports.append(prop1a_check(four, part, w))
        detections += sum(r.detected for r in reports)
    assert detections == 0


def test_duan_and_tlur_detections_imply_two_mode_detection(rng):
    duan_hits = tlur_hits = 0
    for _ in range(1000):
        cov = random_physical_cov(rng, 2, max_squeezing=1.0, max_thermal=0.5)
        a = rng.uniform(0.2, 3.0) * rng.choice([-1, 1])
        b = prop1b_check(cov)
        d, t = duan_check(cov, a), tlur_check(cov, a)
        duan_hits += d.detected
        tlur_hits += t.detected
        if d.detected or t.detected:
            assert b.detected
    assert duan_hits > 0 and tlur_hits >= duan_hits


def test_prop1b_never_detects_ppt_two_mode_states(rng):
    part = ModePartition(1, 1)
    n_ppt = 0
    for _ in range(1000):
        cov = random_physical_cov(rng, 2, max_squeezing=0.7, max_thermal=1.5)
        if gaussian_ppt_check(cov, part).detected:
            continue
        n_ppt += 1
        assert not prop1b_check(cov).detected
    assert n_ppt > 100
