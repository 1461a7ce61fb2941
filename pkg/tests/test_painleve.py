import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hitchinlab.painleve import (
    export_profile_csv,
    psi_eval,
    psi_log_derivatives,
    series_coefficients,
    small_rho_series,
    solve_connection,
)
from hitchinlab.special import bessel_k0, bessel_k1


def test_series_first_coefficients_closed_form():
    a0 = 0.7
    c = series_coefficients(a0, 3)
    assert math.isclose(c[1], -9.0 / (64.0 * a0), rel_tol=1e-14)
    assert math.isclose(c[2], 9.0 * a0 ** 3 / 256.0, rel_tol=1e-14)


def test_series_recursion_against_symbolic_substitution():
    # substitute the truncated 3-term series into the profile equation with
    # rho = w^3, writing sinh(2 psi) = (1/(w v)^2 - (w v)^2)/2 so that the
    # residual is a rational function of w; all orders below the truncation
    # tail must vanish identically
    sympy = pytest.importorskip("sympy")
    w, a0 = sympy.symbols("w a0", positive=True)
    coeffs = [a0, -sympy.Rational(9, 64) / a0, sympy.Rational(9, 256) * a0 ** 3]
    v = sum(c * w ** (4 * j) for j, c in enumerate(coeffs))
    rho_drho = lambda f: w / 3 * sympy.diff(f, w)
    psi = -sympy.log(w * v)
    sinh2psi = ((w * v) ** -2 - (w * v) ** 2) / 2
    residual = sympy.together(
        rho_drho(rho_drho(psi)) - sympy.Rational(1, 2) * w ** 6 * sinh2psi
    )
    num, den = sympy.fraction(sympy.cancel(residual))
    num_poly = sympy.Poly(sympy.expand(num), w)
    den_w_order = sympy.Poly(sympy.expand(den), w).monoms()[-1][0]
    leading = min(m[0] for m in num_poly.monoms()) - den_w_order
    # residual = O(rho^(10/3)) = O(w^10)
    assert leading >= 10


def test_small_rho_series_leading_order():
    a0 = 1.3
    rho = 1e-5
    psi, dpsi = small_rho_series(a0, 3, rho)
    lead = -math.log(rho) / 3.0 - math.log(a0)
    assert abs(psi - lead) < 1e-5
    # a0 scaling shifts psi by -d log a0 at leading order
    psi2, _ = small_rho_series(2.0 * a0, 3, rho)
    assert abs((psi2 - psi) + math.log(2.0)) < 1e-5


def test_small_rho_series_refuses_large_rho():
    with pytest.raises(ValueError):
        small_rho_series(1.0, 3, 5.0, trunc_tol=1e-10)


def test_profile_invariants(profile):
    assert profile.residual_max < 1e-8
    assert (profile.psi > 0).all()
    assert (np.diff(profile.psi) < 0).all()
    assert (profile.dpsi < 0).all()
    eta = 0.125 + 0.375 * profile.psi_x
    assert (eta >= -1e-15).all() and (eta <= 0.125 + 1e-15).all()
    assert (np.diff(eta) >= -1e-12).all()
    assert abs(profile.eta(profile.rho_max) - 0.125) < 1e-6


def test_eta_power_boundedness(profile):
    eta = 0.125 + 0.375 * profile.psi_x
    # eta/rho^(4/3) tends to a positive constant at 0 and decays at infinity
    ratio43 = eta / profile.rho ** (4.0 / 3.0)
    assert ratio43.max() < 10.0 * ratio43[0]
    # eta/rho^(2/3) vanishes at both ends; bounded by its endpoint scale
    ratio23 = eta / profile.rho ** (2.0 / 3.0)
    assert ratio23.max() < 10.0 * max(ratio23[0], ratio23[-1])


def test_connection_constants_stable_under_refinement(profile):
    alt = solve_connection(ode_tol=1e-10)
    assert abs(alt.a0 - profile.a0) < 1e-8
    assert abs(alt.lam - profile.lam) < 1e-8
    moved = solve_connection(rho_mid=2.0)
    assert abs(moved.a0 - profile.a0) < 1e-8
    assert abs(moved.lam - profile.lam) < 1e-8


def test_psi_eval_reproduces_grid_nodes(profile):
    idx = [0, 1000, 4096, 8000]
    psi, dpsi = psi_eval(profile, profile.rho[idx])
    assert np.array_equal(psi, profile.psi[idx])
    assert np.array_equal(dpsi, profile.dpsi[idx])


def test_psi_eval_tail_is_k0(profile):
    rho = 55.0
    psi, dpsi = psi_eval(profile, rho)
    assert psi == profile.lam * bessel_k0(rho)
    assert dpsi == -profile.lam * bessel_k1(rho)


def test_psi_eval_domain(profile):
    with pytest.raises(ValueError):
        psi_eval(profile, 0.0)
    with pytest.raises(ValueError):
        psi_eval(profile, 2.0 * profile.rho_max + 1.0)
    # below rho_min the series extension applies
    psi, _ = psi_eval(profile, profile.rho_min / 4.0)
    assert psi > 0


def test_psi_eval_seam_continuity(profile):
    from hitchinlab.painleve import _series_eval

    # series representation against the stored node at the inner seam
    psi_s, psi_x_s, _ = _series_eval(profile.series, profile.rho_min)
    assert abs(psi_s - profile.psi[0]) < 1e-9
    assert abs(psi_x_s - profile.psi_x[0]) < 1e-9
    # tail representation against the stored node at the outer seam
    assert abs(profile.lam * bessel_k0(profile.rho_max) - profile.psi[-1]) < 1e-9
    assert abs(-profile.lam * profile.rho_max * bessel_k1(profile.rho_max)
               - profile.psi_x[-1]) < 1e-9
    # the residual-grade pipeline agrees with the interpolation pipeline
    # on both sides of the series cut
    for rho in (profile.series_cut * 0.999, profile.series_cut * 1.001):
        psi_a, psi_x_a, _ = psi_log_derivatives(profile, rho)
        psi_b, dpsi_b = psi_eval(profile, rho)
        assert abs(psi_a[0] - psi_b) < 1e-9
        assert abs(psi_x_a[0] - dpsi_b * rho) < 1e-9


def test_psi_eval_matches_local_reintegration(profile):
    # integrate from the nearest grid node to a midpoint and compare
    i = 5000
    x0, x1 = np.log(profile.rho[i]), np.log(profile.rho[i + 1])
    xm = 0.5 * (x0 + x1)
    sol = solve_ivp(
        lambda x, y: (y[1], 0.5 * np.exp(2 * x) * np.sinh(2 * y[0])),
        (x0, xm), (profile.psi[i], profile.psi_x[i]),
        method="DOP853", rtol=1e-12, atol=1e-14,
    )
    psi_mid, dpsi_mid = psi_eval(profile, np.exp(xm))
    assert abs(sol.y[0, -1] - psi_mid) < 1e-8
    assert abs(sol.y[1, -1] - dpsi_mid * np.exp(xm)) < 1e-8


def test_equation_odd_symmetry(profile):
    # integrating from flipped data produces the flipped solution
    x0, x1 = 0.0, 0.5
    y0 = psi_eval(profile, 1.0)
    base = solve_ivp(
        lambda x, y: (y[1], 0.5 * np.exp(2 * x) * np.sinh(2 * y[0])),
        (x0, x1), (y0[0], y0[1] * 1.0), method="DOP853", rtol=1e-12, atol=1e-14,
    )
    flipped = solve_ivp(
        lambda x, y: (y[1], 0.5 * np.exp(2 * x) * np.sinh(2 * y[0])),
        (x0, x1), (-y0[0], -y0[1]), method="DOP853", rtol=1e-12, atol=1e-14,
    )
    assert np.abs(base.y[:, -1] + flipped.y[:, -1]).max() < 1e-10


def test_solver_input_validation():
    with pytest.raises(ValueError):
        solve_connection(rho_min=1.0, rho_mid=0.5)
    with pytest.raises(ValueError):
        solve_connection(tol=0.0)


def test_export_csv_roundtrip(profile, tmp_path):
    path = tmp_path / "psi.csv"
    export_profile_csv(profile, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "rho,psi,dpsi,eta"
    assert len(lines) == len(profile.rho) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == profile.rho[0]
    assert first[1] == profile.psi[0]
