import numpy as np
import pytest

from hitchinlab import fiducial as fd
from hitchinlab import gluing as gl
from hitchinlab import linearized as lin
from hitchinlab.errors import NumericalError


class _IdentityCutoff:
    """chi = 1 everywhere: the uncut state (boundary condition ignored)."""

    inner, outer = 1.0, 1.0

    @staticmethod
    def sample(r):
        r = np.asarray(r, dtype=float)
        return np.ones_like(r), np.zeros_like(r), np.zeros_like(r)


def test_cutoff_shape_and_support():
    cut = gl.CutoffProfile()
    r = np.linspace(1e-3, 1.0, 4001)
    chi, dchi, d2chi = cut.sample(r)
    assert ((chi >= 0.0) & (chi <= 1.0)).all()
    assert (chi[r <= 0.5] == 1.0).all()
    assert (chi[r >= cut.outer] == 0.0).all()
    assert (dchi[(r <= 0.5) | (r >= cut.outer)] == 0.0).all()
    assert np.isinf(cut.smooth_order)


def test_cutoff_derivatives_match_differences():
    cut = gl.CutoffProfile()
    r = np.linspace(0.52, 0.68, 2001)
    chi, dchi, d2chi = cut.sample(r)
    h = r[1] - r[0]
    fd1 = np.gradient(chi, h, edge_order=2)
    fd2 = np.gradient(dchi, h, edge_order=2)
    assert np.abs(fd1 - dchi)[2:-2].max() < 1e-4
    assert np.abs(fd2 - d2chi)[2:-2].max() < 1e-2


def test_cutoff_validation():
    with pytest.raises(ValueError):
        gl.CutoffProfile(inner=0.4, outer=0.7)
    with pytest.raises(ValueError):
        gl.CutoffProfile(inner=0.6, outer=0.5)


def test_glued_residual_regions(families):
    state = gl.build_glued(4.0, families[4.0])
    r = state.r
    inner = np.abs(state.residual[r <= 0.5])
    assert inner.max() < 1e-6  # family tolerance: the pair is fiducial there
    outer = np.abs(state.residual[r >= state.cutoff.outer])
    assert outer.max() == 0.0  # closed forms are exact where chi = 0
    assert (state.h_chi[r >= state.cutoff.outer] == 0.0).all()
    near_half = np.abs(state.h_chi[r <= 0.5] - families[4.0].profile.lam * 0.0
                       - state.h_chi[r <= 0.5]).max()
    assert near_half == 0.0


def test_glued_residual_decays_monotonically(profile):
    sups = []
    for t in (2.0, 4.0, 6.0, 8.0):
        fam = fd.build_family(t, profile)
        sups.append(gl.build_glued(t, fam).sup_residual())
    assert all(a > b for a, b in zip(sups, sups[1:]))


def test_approx_error_sweep_fit(profile):
    delta, c, r2 = gl.approx_error_sweep(np.arange(2.0, 10.5, 1.0), profile)
    assert delta > 0
    assert r2 > 0.98
    predicted = (8.0 / 3.0) * 0.5 ** 1.5
    assert abs(delta - predicted) / predicted < 0.3


def test_shrinking_outer_onset_increases_rate(profile):
    # measuring the transition onset from the boundary: halving that distance
    # moves the annulus outward where r^(3/2) is larger
    ts = np.arange(2.0, 10.5, 1.0)
    base, _, _ = gl.approx_error_sweep(ts, profile, gl.CutoffProfile(0.5, 0.7))
    moved, _, _ = gl.approx_error_sweep(ts, profile, gl.CutoffProfile(0.75, 0.9))
    assert moved > base


def test_sweep_validation(profile):
    with pytest.raises(ValueError):
        gl.approx_error_sweep([2.0, 4.0, 8.0], profile)


def test_newton_zero_residual_input(families):
    state = gl.build_glued(4.0, families[4.0], _IdentityCutoff(), n=800)
    result = gl.newton_correct(state, tol=1e-6)
    assert result.iterations == 0
    assert np.abs(result.u).max() == 0.0


def test_newton_correct_t4(families):
    state = gl.build_glued(4.0, families[4.0], n=2000)
    result = gl.newton_correct(state, tol=1e-10)
    assert result.hitchin_residual < 1e-9
    history = result.residual_history
    # quadratic convergence: once below 1e-2, residual ratios r_{k+1}/r_k^2 stay bounded
    ratios = [
        history[i + 1] / history[i] ** 2
        for i in range(len(history) - 1)
        if history[i] < 1e-2 and history[i + 1] > 0
    ]
    assert ratios and max(ratios) < 1e3


def test_newton_a_posteriori_bound(families):
    state = gl.build_glued(4.0, families[4.0], n=1000)
    result = gl.newton_correct(state, tol=1e-10)
    lam = lin.smallest_eigenvalue(gl.newton_operator_matrix(state))
    assert result.sup_u <= 10.0 * state.sup_residual() / lam


def test_sup_u_decreases_in_t(profile):
    sups = []
    for t in (2.0, 4.0, 8.0):
        fam = fd.build_family(t, profile)
        state = gl.build_glued(t, fam, n=1000)
        sups.append(gl.newton_correct(state, tol=1e-10).sup_u)
    assert sups[0] > sups[1] > sups[2]


def test_interior_rigidity(families):
    tol = 1e-10
    state = gl.build_glued(4.0, families[4.0], n=2000)
    result = gl.newton_correct(state, tol=tol)
    interior = np.abs(result.u[state.r <= 0.25])
    assert interior.max() <= 10.0 * tol
    # and the concentration sharpens as t grows
    state8 = gl.build_glued(8.0, families[8.0], n=2000)
    result8 = gl.newton_correct(state8, tol=tol)
    assert np.abs(result8.u[state8.r <= 0.25]).max() < interior.max()


def test_corrected_solution_report(families):
    state = gl.build_glued(4.0, families[4.0], n=2000)
    result = gl.newton_correct(state, tol=1e-10)
    report = gl.corrected_solution_check(state, result)
    assert report["residual_post"] < 1e-9
    assert report["residual_post_l2"] < 1e-9
    assert report["residual_pre"] > report["residual_post"]
    assert report["f_range"][0] > -0.05
    assert report["f_range"][1] < 0.125 + 1e-9


def test_newton_linearization_matches_vertical_block(families, rng):
    state = gl.build_glued(4.0, families[4.0], n=500)
    op = gl.newton_operator_matrix(state)
    v = rng.standard_normal(state.grid.n)
    lhs = lin.apply_operator(op, v)
    d2v = gl._second_difference(v, state.grid.dx)
    rhs = -d2v / state.r ** 2 + 16.0 * state.t ** 2 * state.r * np.cosh(2.0 * state.h_chi) * v
    assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(rhs).max()


def test_growth_norms_fiducial_form(families):
    # the derivative bound concerns the uncut pair: sup |d_r f_t| grows no
    # faster than t, with the t-normalized values varying by < factor 3
    vals = []
    for t, fam in sorted(families.items()):
        vals.append(np.abs(fam.df).max() / t)
    assert max(vals) / min(vals) < 3.0


def test_growth_norms_glued_sweep(profile):
    rows = []
    for t in (2.0, 4.0, 8.0, 16.0):
        fam = fd.build_family(t, profile)
        rows.append(gl.growth_norm_check(gl.build_glued(t, fam, n=1000)))
    norm = [row["sup_df_over_t"] for row in rows]
    assert all(a >= b for a, b in zip(norm, norm[1:]))  # decreasing in t
    for row in rows:
        assert -0.05 < row["f_min"]
        assert row["f_max"] <= 0.125 + 1e-9


def test_growth_norms_identity_cutoff_consistency(families):
    state = gl.build_glued(4.0, families[4.0], _IdentityCutoff(), n=500)
    fam = families[4.0]
    report = gl.growth_norm_check(state)
    assert abs(report["sup_f"] - np.abs(fam.f).max()) < 1e-4
    assert report["f_min"] >= -1e-12


def test_neumann_variant_positive(families):
    state = gl.build_glued(2.0, families[2.0], n=500)
    lam = gl.neumann_zero_mode_eigenvalue(state, n=800)
    assert lam > 0.0


def test_newton_divergence_reports(families):
    state = gl.build_glued(2.0, families[2.0], n=200)
    with pytest.raises(NumericalError):
        gl.newton_correct(state, tol=1e-30, max_iter=3)
