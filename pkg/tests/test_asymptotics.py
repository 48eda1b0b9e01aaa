from fractions import Fraction

import mpmath as mp
import pytest

from protek import (
    NoTau,
    PeriodMismatch,
    WeightFamily,
    WrongRegime,
    bounded_count,
    cdf_asymptotic,
    complex_gamma,
    constants_doubleexp,
    constants_exponential,
    count_asymptotic,
    eta_sequence,
    expectation_asymptotic,
    family_constants,
    make_builtin,
    make_polynomial,
    psi_fluctuation,
    solve_rho_h,
    solve_tau_rho,
    two_point_predictor,
)
from protek.asymptotics import _predictor_round
from protek.textfmt import fraction_to_mpf

ALL_BUILTINS = ("plane", "binary", "pruned-binary", "cayley", "riordan")


def _as_mpf(value):
    if isinstance(value, Fraction):
        return fraction_to_mpf(value)
    return mp.mpf(value)


def close(x, target, tol):
    # compare at high working precision so stored values are not re-rounded
    with mp.workprec(400):
        return abs(_as_mpf(x) - _as_mpf(target)) <= mp.mpf(tol)


# lambda1 (and kappa built from it) in the w1 != 0 regime is an iterated
# limit with a 1e-25 relative stabilization stop; closed-form constants
# are accurate to the working precision.
ITERATED_TOL = mp.mpf("1e-23")


class TestTauRho:
    def test_plane(self, plane):
        tau, rho = solve_tau_rho(plane)
        assert close(tau, "0.5", mp.mpf(10) ** -60)
        assert close(rho, "0.25", mp.mpf(10) ** -60)

    def test_cayley(self, cayley):
        tau, rho = solve_tau_rho(cayley)
        with mp.workprec(280):
            assert close(tau, 1, mp.mpf(10) ** -60)
            assert close(rho, 1 / mp.e, mp.mpf(10) ** -60)

    def test_riordan(self, riordan):
        tau, rho = solve_tau_rho(riordan)
        assert close(tau, "0.5", mp.mpf(10) ** -60)
        with mp.workprec(280):
            assert close(rho, mp.mpf(1) / 3, mp.mpf(10) ** -60)
            assert close(riordan.phi_eval(tau, 0), mp.mpf(3) / 2, mp.mpf(10) ** -60)

    def test_cubic_family(self):
        f = make_polynomial([1, 0, 0, 1])
        tau, rho = solve_tau_rho(f)
        with mp.workprec(280):
            assert close(tau**3, mp.mpf(1) / 2, mp.mpf(10) ** -60)

    @pytest.mark.parametrize("name", ALL_BUILTINS)
    def test_defining_identities(self, name):
        f = make_builtin(name)
        tau, rho = solve_tau_rho(f)
        with mp.workprec(280):
            tol = mp.mpf(10) ** -25
            assert abs(rho * f.phi_eval(tau, 1) - 1) < tol
            assert abs(rho * f.phi_eval(tau, 0) - tau) < tol
            assert tau > rho > 0


def _subcritical_family() -> WeightFamily:
    # weights 1/j^3: the mean-one point would sit beyond the radius
    def weight(j: int) -> Fraction:
        return Fraction(1) if j == 0 else Fraction(1, j**3)

    def phi_eval(t, m: int = 0):
        t = mp.mpf(t)
        if m == 0:
            return 1 + mp.polylog(3, t)
        if m == 1:
            return mp.polylog(2, t) / t
        return (-mp.log(1 - t) - mp.polylog(2, t)) / t**2

    return WeightFamily(
        name="subcritical",
        weight=weight,
        phi_eval=phi_eval,
        radius=1.0,
        support_hint=frozenset({0, 1, 2, 3}),
        phi_form="geometric",
        cache_key="subcritical-test",
    )


def test_no_tau_detected():
    with pytest.raises(NoTau):
        solve_tau_rho(_subcritical_family())


class TestEtaSequence:
    def test_first_step_is_tau_minus_rho(self):
        for name in ALL_BUILTINS:
            f = make_builtin(name)
            c = family_constants(f)
            etas = eta_sequence(c, f, 1)
            with mp.workprec(280):
                assert abs(etas[1] - (c.tau - c.rho)) < mp.mpf(10) ** -60

    def test_plane_third_value(self, plane):
        c = family_constants(plane)
        etas = eta_sequence(c, plane, 2)
        with mp.workprec(280):
            assert abs(etas[2] - mp.mpf(1) / 12) < mp.mpf(10) ** -60

    def test_complete_binary_closed_form(self, complete_binary):
        c = family_constants(complete_binary)
        etas = eta_sequence(c, complete_binary, 6)
        with mp.workprec(280):
            for k, eta in enumerate(etas):
                assert close(eta, 2 * mp.mpf("0.5") ** (2**k), mp.mpf(10) ** -50)

    def test_strictly_decreasing_to_zero(self):
        for name in ("plane", "riordan"):
            f = make_builtin(name)
            c = family_constants(f)
            etas = eta_sequence(c, f, 20)
            assert all(a > b > 0 for a, b in zip(etas, etas[1:]))

    def test_ratio_limits(self, plane, complete_binary):
        c = family_constants(plane)
        etas = eta_sequence(c, plane, 40)
        with mp.workprec(280):
            assert close(etas[40] / etas[39], c.zeta, mp.mpf(10) ** -8)
        c2 = family_constants(complete_binary)
        etas2 = eta_sequence(c2, complete_binary, 8)
        with mp.workprec(280):
            ratio = mp.log(etas2[8]) / mp.log(etas2[7])
            assert close(ratio, 2, mp.mpf(10) ** -2)


class TestConstants:
    def test_plane(self, plane):
        c = family_constants(plane)
        assert c.regime == "exponential" and c.D == 1
        assert close(c.kappa, Fraction(9, 16), ITERATED_TOL)
        assert close(c.d, 4, mp.mpf(10) ** -40)
        assert close(c.lambda1, Fraction(3, 2), ITERATED_TOL)
        assert close(c.a, Fraction(-1, 2), mp.mpf(10) ** -40)

    def test_pruned_binary(self, pruned_binary):
        c = family_constants(pruned_binary)
        assert close(c.d, 2, mp.mpf(10) ** -40)
        assert close(c.lambda1, "3.664", mp.mpf("2e-3"))
        assert close(c.kappa, "0.9160", mp.mpf("1e-3"))

    def test_cayley(self, cayley):
        c = family_constants(cayley)
        with mp.workprec(280):
            assert close(c.d, mp.e, mp.mpf(10) ** -40)
        assert close(c.lambda1, "3.1789", mp.mpf("2e-3"))
        assert close(c.kappa, "0.73926", mp.mpf("1e-4"))

    def test_complete_binary(self, complete_binary):
        c = family_constants(complete_binary)
        assert c.regime == "double-exponential"
        assert (c.r, c.D) == (2, 2)
        for value, target in ((c.lambda1, 2), (c.mu, "0.5"), (c.d, 4), (c.kappa, 2)):
            assert close(value, target, mp.mpf(10) ** -40)

    def test_riordan(self, riordan):
        c = family_constants(riordan)
        assert (c.r, c.D) == (2, 1)
        assert close(c.lambda1, 3, mp.mpf(10) ** -40)
        assert close(c.kappa, 6, mp.mpf(10) ** -40)

    def test_cubic(self):
        c = family_constants(make_polynomial([1, 0, 0, 1]))
        assert (c.r, c.D) == (3, 3)
        assert close(c.lambda1, "1.37473", mp.mpf("1e-5"))

    def test_fractional_branching_weight(self):
        # Phi = 1 + t^2/3: tau = sqrt(3), lambda1 = 2*sqrt(3), mu = 1/2
        c = family_constants(make_polynomial(["1", "0", "1/3"]))
        with mp.workprec(280):
            assert abs(c.tau - mp.sqrt(3)) < mp.mpf(10) ** -50
            assert abs(c.lambda1 - 2 * mp.sqrt(3)) < mp.mpf(10) ** -50
        assert close(c.mu, "0.5", mp.mpf(10) ** -50)
        assert close(c.d, 4, mp.mpf(10) ** -50)

    @pytest.mark.parametrize("name", ALL_BUILTINS)
    def test_structural_invariants(self, name):
        c = family_constants(make_builtin(name))
        assert c.tau > c.rho > 0
        assert c.d > 1 and c.kappa > 0 and c.a < 0
        with mp.workprec(280):
            assert abs(c.a**2 - 2 * c.phi_tau / c.phi2_tau) < mp.mpf(10) ** -40
        if c.regime == "exponential":
            assert 0 < c.zeta < 1
            with mp.workprec(300):
                # same formula through tau = rho*Phi(tau)
                alt = c.lambda1 * (1 - c.zeta) * c.zeta / (c.rho * c.phi_tau)
                assert abs(alt - c.kappa) < mp.mpf(10) ** -40
        else:
            assert 0 < c.mu < 1

    def test_wrong_regime(self, plane, complete_binary):
        with pytest.raises(WrongRegime):
            constants_exponential(complete_binary)
        with pytest.raises(WrongRegime):
            constants_doubleexp(plane)

    def test_riordan_mu_agrees_with_singularity_route(self, riordan):
        # two independent computations of the decay base
        c = family_constants(riordan, 320)
        with mp.workprec(360):
            sol = solve_rho_h(riordan, 4, 320)
            signal = (sol.rho_h / c.rho - 1) / c.kappa
            mu_emp = signal ** (1 / mp.mpf(c.r) ** 5)
            assert abs(mu_emp - c.mu) < mp.mpf(10) ** -8
        assert close(1 / c.d, "0.06102861341729106", mp.mpf(10) ** -9)


class TestCdfAsymptotic:
    def test_plane_value(self, plane):
        c = family_constants(plane)
        got = cdf_asymptotic(c, 200, 5)
        with mp.workprec(280):
            expected = mp.e ** (-mp.mpf(9) / 16 * 200 * mp.mpf(4) ** -5)
        assert close(got, expected, ITERATED_TOL)
        assert close(got, "0.895954", mp.mpf("5e-6"))

    def test_complete_binary_value(self, complete_binary):
        c = family_constants(complete_binary)
        got = cdf_asymptotic(c, 205, 2)
        with mp.workprec(280):
            expected = mp.e ** (-mp.mpf(2) * 205 * mp.mpf(4) ** -4)
        assert close(got, expected, mp.mpf(10) ** -40)

    def test_tends_to_one(self, plane, complete_binary):
        for c, h in ((family_constants(plane), 300), (family_constants(complete_binary), 30)):
            value = cdf_asymptotic(c, 1000, h)
            assert 1 - mp.mpf(10) ** -10 < value <= 1


class TestExpectationAsymptotic:
    def test_plane_layout(self, plane):
        c = family_constants(plane)
        got = expectation_asymptotic(c, 200)
        with mp.workprec(280):
            ln4 = mp.log(4)
            base = (
                mp.log(200) / ln4
                + mp.log(c.kappa) / ln4
                + mp.euler / ln4
                + mp.mpf(1) / 2
            )
            assert abs(got - base) <= mp.mpf("2.1e-3")  # psi stays within its bound

    def test_wrong_regime(self, complete_binary):
        with pytest.raises(WrongRegime):
            expectation_asymptotic(family_constants(complete_binary), 100)

    def test_psi_periodicity(self):
        with mp.workprec(256):
            for x in ("0.17", "0.5", "0.93"):
                a = psi_fluctuation(4, mp.mpf(x))
                b = psi_fluctuation(4, mp.mpf(x) + 1)
                assert abs(a - b) < mp.mpf(10) ** -12

    def test_psi_amplitude_via_gamma_modulus(self):
        # |Gamma(iy)|^2 = pi/(y*sinh(pi*y)) bounds the Fourier coefficients
        with mp.workprec(256):
            ln4 = mp.log(4)
            bound = (
                2
                / ln4
                * sum(
                    mp.sqrt(mp.pi / (y * mp.sinh(mp.pi * y)))
                    for y in (2 * mp.pi * k / ln4 for k in range(1, 11))
                )
            )
            assert bound <= mp.mpf("2e-3")
            worst = max(
                abs(psi_fluctuation(4, mp.mpf(i) / 31)) for i in range(31)
            )
            assert worst <= bound

    def test_lanczos_gamma_accuracy(self):
        with mp.workprec(256):
            for d in (mp.mpf(2), mp.e, mp.mpf(4)):
                for k in range(1, 11):
                    y = 2 * mp.pi * k / mp.log(d)
                    got = abs(complex_gamma(mp.mpc(0, y)))
                    closed = mp.sqrt(mp.pi / (y * mp.sinh(mp.pi * y)))
                    assert abs(got - closed) <= closed * mp.mpf(10) ** -12

    def test_lanczos_gamma_on_integers(self):
        with mp.workprec(256):
            from math import factorial

            for n in range(1, 9):
                assert abs(complex_gamma(n).real - factorial(n - 1)) < mp.mpf("1e-10")


class TestRhoH:
    def test_plane_matches_leading_term(self, plane):
        c = family_constants(plane)
        sol = solve_rho_h(plane, 12, 256)
        with mp.workprec(280):
            predicted = c.lambda1 * (1 - c.zeta) * c.zeta**13 / c.phi_tau
            ratio = (sol.rho_h - c.rho) / predicted
            assert abs(ratio - 1) < mp.mpf("0.01")

    def test_complete_binary_matches_leading_term(self, complete_binary):
        c = family_constants(complete_binary)
        sol = solve_rho_h(complete_binary, 3, 256)
        with mp.workprec(280):
            predicted = c.rho * c.kappa * c.mu ** (mp.mpf(2) ** 4)
            assert abs((sol.rho_h - c.rho) / predicted - 1) < mp.mpf("0.05")

    def test_solution_shape(self, plane):
        c = family_constants(plane)
        sol = solve_rho_h(plane, 6, 256)
        tol = mp.mpf(2) ** -120
        assert all(abs(r) < tol for r in sol.residuals)
        with mp.workprec(280):
            assert abs((sol.eta[0] - sol.eta[1]) - sol.rho_h) < mp.mpf(2) ** -240
            assert abs(sol.s - plane.phi_eval(sol.eta[6], 0)) < tol
        assert sol.rho_h > c.rho
        assert all(a >= b for a, b in zip(sol.eta, sol.eta[1:]))

    def test_decreasing_in_h(self, plane):
        rhos = [solve_rho_h(plane, h, 192).rho_h for h in (4, 6, 8)]
        assert rhos[0] > rhos[1] > rhos[2]

    def test_corollary_rates_at_h14(self, plane):
        c = family_constants(plane)
        sol = solve_rho_h(plane, 14, 256)
        with mp.workprec(280):
            lhs = sol.rho_h * plane.phi_eval(sol.eta[0], 1) - 1
            rhs = c.lambda2 * (1 - c.zeta) * c.zeta**14
            assert abs(lhs / rhs - 1) < mp.mpf("0.05")
            eta_target = c.lambda1 * (1 - c.zeta) * c.zeta**14
            assert abs(sol.eta[14] / eta_target - 1) < mp.mpf("0.05")

    def test_h_must_be_at_least_two(self, plane):
        with pytest.raises(ValueError):
            solve_rho_h(plane, 1, 128)


class TestCountAsymptotic:
    def test_plane_close_at_moderate_size(self, plane):
        c = family_constants(plane)
        est = count_asymptotic(c, 100)
        with mp.workprec(280):
            exact = fraction_to_mpf(bounded_count(plane, 99, 100))
            assert abs(est / exact - 1) < mp.mpf("0.01")

    def test_period_mismatch(self, complete_binary):
        with pytest.raises(PeriodMismatch):
            count_asymptotic(family_constants(complete_binary), 100)

    def test_periodic_factor(self, complete_binary):
        c = family_constants(complete_binary)
        est = count_asymptotic(c, 101)
        with mp.workprec(280):
            exact = fraction_to_mpf(bounded_count(complete_binary, 100, 101))
            assert abs(est / exact - 1) < mp.mpf("0.02")


class TestTwoPointPredictor:
    def test_large_size(self, complete_binary):
        c = family_constants(complete_binary)
        h_n, m = two_point_predictor(c, 205)
        assert h_n == 2
        assert close(m, "1.9413", mp.mpf("1e-3"))

    def test_small_size_rounds_down(self, complete_binary):
        c = family_constants(complete_binary)
        h_n, m = two_point_predictor(c, 17)
        assert h_n == 1
        assert close(m, "1.0312", mp.mpf("1e-3"))

    def test_half_boundary_takes_floor(self):
        assert _predictor_round(mp.mpf("2.5")) == 2
        assert _predictor_round(mp.mpf("2.500001")) == 3

    def test_monotone_in_size(self, complete_binary):
        c = family_constants(complete_binary)
        hs = [two_point_predictor(c, n)[0] for n in range(17, 4000, 120)]
        assert hs == sorted(hs)

    def test_wrong_regime(self, plane):
        with pytest.raises(WrongRegime):
            two_point_predictor(family_constants(plane), 100)

    def test_size_too_small(self, complete_binary):
        with pytest.raises(ValueError):
            two_point_predictor(family_constants(complete_binary), 4)
