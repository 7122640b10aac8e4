import numpy as np
import pytest

from drshift.filters import filter_values, make_filter
from drshift.kernels import KernelSpec, gram
from drshift.operators import (
    KernelExpansion,
    apply_operator_function,
    build_operator,
    evaluate_expansion,
    krr_coeffs_direct,
    operator_coeff_action,
)

K = KernelSpec("gaussian", 1.0)


def _random_rep(rng, n, strictly_positive=True, bw=0.6):
    pts = rng.uniform(-1, 1, size=(n, 1))
    w = rng.uniform(0.1 if strictly_positive else 0.0, 1.0, size=n)
    return build_operator(pts, w, KernelSpec("gaussian", bw)), pts, w


def test_single_point_unit_weight():
    rep = build_operator([0.3], [1.0], K)
    assert rep.sym == np.array([[1.0]])
    assert rep.eigvals == np.array([1.0])


def test_two_coincident_points_half_weights():
    # hand oracle: B = [[.5,.5],[.5,.5]], characteristic polynomial
    # l^2 - l = 0, eigenvalues {1, 0}
    rep = build_operator([0.2, 0.2], [0.5, 0.5], K)
    assert np.abs(rep.sym - 0.5).max() <= 1e-15
    assert rep.eigvals == pytest.approx([1.0, 0.0], abs=1e-14)


def test_all_zero_weights_degenerate():
    rep = build_operator([0.0, 1.0, 2.0], [0.0, 0.0, 0.0], K)
    assert (rep.sym == 0.0).all()
    assert (rep.eigvals == 0.0).all()


def test_invalid_weights_rejected():
    with pytest.raises(ValueError):
        build_operator([0.0], [-0.1], K)
    with pytest.raises(ValueError):
        build_operator([0.0], [np.inf], K)
    with pytest.raises(ValueError):
        build_operator([0.0], [0.5, 0.5], K)


def test_eigenvalues_clipped_nonnegative():
    # coincident points make the Gram numerically rank deficient
    pts = np.full((6, 1), 0.5)
    rep = build_operator(pts, np.full(6, 1.0 / 6), K)
    assert (rep.eigvals >= 0.0).all()
    assert rep.eigvals[0] == pytest.approx(1.0, rel=1e-12)


def test_apply_identity_function_on_range_of_w():
    rng = np.random.default_rng(4)
    rep, _, w = _random_rep(rng, 12)
    b = w * rng.standard_normal(12)
    c = apply_operator_function(rep, lambda t: np.ones_like(t), b)
    assert np.abs(c - b).max() <= 1e-12


def test_apply_linear_function_scalar_case():
    rep = build_operator([0.7], [1.0], K)
    c = apply_operator_function(rep, lambda t: t, np.array([1.0]))
    assert c == pytest.approx([1.0], abs=1e-14)


def test_apply_krr_two_point_example():
    # direct 2x2 solve oracle for the coincident-pair ridge system
    mu = 0.37
    rep = build_operator([0.1, 0.1], [0.5, 0.5], K)
    b = np.array([0.0, 1.0])
    c = apply_operator_function(rep, lambda t: 1.0 / (t + mu), b)
    exp = KernelExpansion(points=[0.1, 0.1], coeffs=c, kernel=K)
    got = evaluate_expansion(exp, [0.1])[0]
    W = np.diag([0.5, 0.5])
    G = np.ones((2, 2))
    c_direct = np.linalg.solve(W @ G + mu * np.eye(2), b)
    want = c_direct.sum()  # K(z, .) = 1 at the coincident point
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(1.0 / (1.0 + mu), rel=1e-12)


def test_apply_rejects_nonfinite_filter_values():
    # coincident points force a zero eigenvalue where 1/t blows up
    rep = build_operator([0.4, 0.4], [0.5, 0.5], K)
    assert rep.eigvals[-1] == 0.0
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError, match="eigenvalue"):
            apply_operator_function(rep, lambda t: 1.0 / t, np.array([0.5, 0.5]))


def test_spectrum_agreement_with_nonsymmetric_product():
    rng = np.random.default_rng(5)
    for n in (2, 3, 5, 8):
        rep, pts, w = _random_rep(rng, n)
        vals_b = np.sort(rep.eigvals)[::-1]
        vals_wg = np.linalg.eigvals(np.diag(w) @ rep.gram)
        assert np.abs(vals_wg.imag).max() <= 1e-10
        vals_wg = np.sort(vals_wg.real)[::-1]
        assert vals_b == pytest.approx(vals_wg, rel=1e-8, abs=1e-10)


def test_spectrum_two_point_characteristic_polynomial():
    # explicit quadratic roots for n = 2
    rng = np.random.default_rng(6)
    rep, pts, w = _random_rep(rng, 2)
    WG = np.diag(w) @ rep.gram
    tr, det = np.trace(WG), np.linalg.det(WG)
    disc = np.sqrt(tr * tr - 4 * det)
    roots = np.sort([(tr + disc) / 2, (tr - disc) / 2])[::-1]
    assert rep.eigvals == pytest.approx(roots, rel=1e-8)


def test_operator_norm_bound_for_ratio_weights():
    # weights theta_hat(x_i)/n with theta_hat <= D gives top eigenvalue <= kappa^2 D
    rng = np.random.default_rng(7)
    n, D = 40, 3.0
    pts = rng.uniform(size=(n, 1))
    theta_hat = rng.uniform(0.0, D, size=n)
    rep = build_operator(pts, theta_hat / n, K)
    assert rep.lam_max <= K.kappa_sq * D + 1e-12


def test_zero_weight_point_is_neutral():
    rng = np.random.default_rng(8)
    pts = rng.uniform(size=(10, 1))
    w = rng.uniform(0.2, 1.0, size=10)
    rep = build_operator(pts, w, K)
    pts_aug = np.vstack([pts, [[0.77]]])
    w_aug = np.concatenate([w, [0.0]])
    rep_aug = build_operator(pts_aug, w_aug, K)
    assert np.abs(rep.eigvals - rep_aug.eigvals[:-1]).max() <= 1e-10
    assert rep_aug.eigvals[-1] <= 1e-10

    b = w * rng.standard_normal(10)
    b_aug = np.concatenate([b, [0.0]])
    g = lambda t: 1.0 / (t + 0.2)
    c = apply_operator_function(rep, g, b)
    c_aug = apply_operator_function(rep_aug, g, b_aug)
    assert c_aug[-1] == 0.0
    assert np.abs(c_aug[:-1] - c).max() <= 1e-10


def test_coefficient_action_matches_wg():
    rng = np.random.default_rng(9)
    rep, pts, w = _random_rep(rng, 6)
    c = rng.standard_normal(6)
    assert operator_coeff_action(rep, c) == pytest.approx(
        np.diag(w) @ rep.gram @ c, rel=1e-13
    )


def test_direct_ridge_solver_matches_spectral_route():
    # the spectral route clips eigenvalues below 1e-10 * lam_max, which moves
    # the ridge solution by at most clip * lam_max / lam in relative terms;
    # keeping lam >= 1e-2 makes 1e-6 a conservative tolerance
    rng = np.random.default_rng(10)
    for _ in range(20):
        n = int(rng.integers(2, 60))
        pts = rng.uniform(-1, 1, size=(n, 1))
        w = rng.uniform(0.0, 1.0, size=n)
        w[rng.random(n) < 0.2] = 0.0  # zero weights stay legal
        lam = float(10 ** rng.uniform(-2, 0))
        b = w * rng.standard_normal(n)
        rep = build_operator(pts, w, K)
        filt = make_filter("krr", lam)
        c_eig = apply_operator_function(rep, lambda t: filter_values(filt, t), b)
        c_chol = krr_coeffs_direct(pts, w, lam, K, b)
        scale = max(np.abs(c_eig).max(), 1e-30)
        assert np.abs(c_eig - c_chol).max() <= 1e-6 * scale


def test_evaluate_expansion_examples():
    exp = KernelExpansion(points=[0.4], coeffs=[1.0], kernel=K)
    assert evaluate_expansion(exp, [0.4]) == pytest.approx([1.0], abs=1e-15)
    exp0 = KernelExpansion(points=[0.1, 0.9], coeffs=[0.0, 0.0], kernel=K)
    assert (evaluate_expansion(exp0, [0.3, 0.5]) == 0.0).all()
    exp2 = KernelExpansion(points=[0.0, 1.0], coeffs=[1.0, 1.0], kernel=K)
    got = evaluate_expansion(exp2, [0.0])[0]
    assert got == pytest.approx(1.0 + np.exp(-0.5), rel=1e-14)


def test_expansion_validation():
    with pytest.raises(ValueError):
        KernelExpansion(points=[0.0, 1.0], coeffs=[1.0], kernel=K)
    with pytest.raises(ValueError):
        KernelExpansion(points=[0.0], coeffs=[np.nan], kernel=K)
    exp = KernelExpansion(points=[0.0], coeffs=[1.0], kernel=K)
    with pytest.raises(ValueError):
        evaluate_expansion(exp, np.zeros((2, 3)))


def test_gram_stored_matches_kernel():
    rng = np.random.default_rng(11)
    rep, pts, w = _random_rep(rng, 5)
    assert (rep.gram == gram(rep.kernel, pts, pts)).all()
