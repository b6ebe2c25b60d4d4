#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conicricci/diagnostics.hpp"
#include "conicricci/numerics.hpp"
#include "conicricci/rotational.hpp"

using namespace conicricci;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("equal tips give the sine solution with C = 0") {
    const double beta = 0.55, rho = 2.0;
    const SolitonProfile prof = soliton_shoot(beta, beta, rho);
    CHECK(prof.C == 0.0);
    const double a = std::sqrt(2.0 / rho);
    CHECK(prof.L == doctest::Approx(kPi * a).epsilon(1e-10));
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.s.size(); ++i)
        worst = std::max(worst,
                         std::abs(prof.h[i] - beta * a * std::sin(prof.s[i] / a)));
    CHECK(worst < 1e-10);
    CHECK(prof.mu_norm < 1e-8);
    CHECK(prof.x_norm < 1e-8);
}

TEST_CASE("teardrop soliton closes with residuals below tolerance") {
    const SolitonProfile prof = soliton_shoot(0.7, 1.0, 2.0, 1e-8);
    CHECK(prof.C != 0.0);
    CHECK(prof.beta_far == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(prof.mu_norm < 1e-8);
    CHECK(prof.x_norm < 1e-8);
    // area consistency: the closed profile automatically satisfies
    // rho * A = 4 pi chi
    const double area = total_area(prof.as_state());
    const double chi = 2.0 + (0.7 - 1.0);
    CHECK(prof.rho * area == doctest::Approx(4.0 * kPi * chi).epsilon(1e-8));
}

TEST_CASE("football soliton and reflection symmetry") {
    const SolitonProfile ab = soliton_shoot(0.3, 0.9, 2.0, 1e-8);
    const SolitonProfile ba = soliton_shoot(0.9, 0.3, 2.0, 1e-8);
    CHECK(ab.C != 0.0);
    CHECK(ab.C == doctest::Approx(-ba.C).epsilon(1e-6));
    CHECK(ab.L == doctest::Approx(ba.L).epsilon(1e-8));
    // h_ab(s) = h_ba(L - s)
    const CubicSpline rev(ba.s, ba.h);
    double worst = 0.0;
    for (std::size_t i = 0; i < ab.s.size(); ++i)
        worst = std::max(worst, std::abs(ab.h[i] - rev(ab.L - ab.s[i])));
    CHECK(worst < 1e-7);
}

TEST_CASE("gauss-bonnet closes on shooting profiles") {
    const SolitonProfile prof = soliton_shoot(0.4, 0.8, 2.0, 1e-8);
    CHECK(gauss_bonnet_residual(prof.as_state()) < 1e-6);
}

TEST_CASE("potential two-route oracle") {
    // f from the shooting construction (f' = C h) against the potential
    // equation route (Delta f = R - rho by quadrature)
    const SolitonProfile prof = soliton_shoot(0.7, 1.0, 2.0, 1e-8);
    const PotentialResult pot = potential_solve(prof.as_state(), prof.rho);
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.s.size(); ++i)
        worst = std::max(worst, std::abs(pot.f[i] - prof.f[i]));
    CHECK(worst < 1e-6);
    CHECK(pot.grad_f_max > 0.0);
}

TEST_CASE("shooting failures are reported") {
    CHECK_THROWS_AS(soliton_shoot(0.0, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(soliton_shoot(0.5, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("soliton is a fixed point of the flow modulo translation") {
    const SolitonProfile prof = soliton_shoot(0.7, 1.0, 2.0, 1e-8);
    const CylinderState start = from_rotational(prof.as_state(), 4001, 2e-4);
    RotationalRunParams params;
    params.rho = prof.rho;
    params.dt_init = 1e-3;
    params.t_end = 0.5;
    params.record_every = 100;
    params.tol_curvature = 1e-14;
    const RotationalRunResult run = run_rotational(start, params);
    const CylinderState& fin = run.final_state;

    // the soliton translates in the conformal gauge at speed C; after
    // recentering by the best shift, R is unchanged
    const std::vector<double> R0 = cylinder_curvature(start);
    const std::vector<double> R1 = cylinder_curvature(fin);
    std::vector<double> x0(start.n());
    for (std::size_t i = 0; i < start.n(); ++i) x0[i] = start.x(i);
    const CubicSpline r1_of_x(x0, R1);  // same grid layout

    auto mismatch = [&](double shift) {
        double worst = 0.0;
        for (std::size_t i = 0; i < start.n(); ++i) {
            const double x = x0[i] + shift;
            if (x < x0.front() + 1.0 || x > x0.back() - 1.0) continue;
            worst = std::max(worst, std::abs(r1_of_x(x) - R0[i]));
        }
        return worst;
    };
    // golden-section search around the predicted drift C * t
    double lo = prof.C * params.t_end - 0.3, hi = prof.C * params.t_end + 0.3;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + 0.382 * (hi - lo);
        const double m2 = lo + 0.618 * (hi - lo);
        if (mismatch(m1) < mismatch(m2)) hi = m2;
        else lo = m1;
    }
    const double best_shift = 0.5 * (lo + hi);
    CHECK(mismatch(best_shift) < 5e-4);
    CHECK(best_shift == doctest::Approx(prof.C * params.t_end).epsilon(0.1));
    CHECK(mismatch(0.0) > mismatch(best_shift));
}
