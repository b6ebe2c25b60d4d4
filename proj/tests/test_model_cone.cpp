#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conicricci/model_cone.hpp"
#include "conicricci/numerics.hpp"

using namespace conicricci;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("indicial roots") {
    const auto r1 = indicial_roots({0.5, 1.0}, 4.0);
    REQUIRE(r1.size() == 3);
    CHECK(r1[0] == std::pair<double, int>{0.0, 0});
    CHECK(r1[1] == std::pair<double, int>{2.0, 1});
    CHECK(r1[2] == std::pair<double, int>{4.0, 2});

    const auto r2 = indicial_roots({2.0 / 3.0, 1.0}, 3.0);
    REQUIRE(r2.size() == 3);
    CHECK(r2[1].first == doctest::Approx(1.5));
    CHECK(r2[2].first == doctest::Approx(3.0));

    const auto r3 = indicial_roots({1.0, 1.0}, 2.0);
    REQUIRE(r3.size() == 3);
    CHECK(r3[1].first == doctest::Approx(1.0));
}

namespace {

std::vector<double> log_radial_grid(double r_min, double r_max, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
    r.back() = r_max;
    return r;
}

}  // namespace

TEST_CASE("mode 0 poisson with constant rhs is exact") {
    const ModelCone cone{0.63, 2.0};
    const auto r = log_radial_grid(2e-4, cone.r_max, 200);
    std::vector<double> rhs(r.size(), 1.0);
    // particular solution r^2/4; pick the boundary value accordingly
    const auto u = mode_poisson_solve(cone, 0, r, rhs, cone.r_max * cone.r_max / 4.0);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(u[i] == doctest::Approx(r[i] * r[i] / 4.0).epsilon(1e-10));
}

TEST_CASE("homogeneous mode 1 reproduces the indicial solution") {
    const ModelCone cone{0.8, 1.5};
    const auto r = log_radial_grid(1.5e-4, cone.r_max, 160);
    std::vector<double> rhs(r.size(), 0.0);
    const double bc = std::pow(cone.r_max, 1.0 / cone.beta);
    const auto u = mode_poisson_solve(cone, 1, r, rhs, bc);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(u[i] == doctest::Approx(std::pow(r[i], 1.0 / cone.beta)).epsilon(1e-12));
}

TEST_CASE("mode 1 with constant rhs carries the r^{1/beta} tip exponent") {
    const ModelCone cone{0.75, 1.0};
    const auto r = log_radial_grid(1e-5, cone.r_max, 400);
    std::vector<double> rhs(r.size(), 1.0);
    const auto u = mode_poisson_solve(cone, 1, r, rhs, 0.0);
    // log-log slope over the innermost decade
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 1e-4) {
            lx.push_back(std::log(r[i]));
            ly.push_back(std::log(std::abs(u[i])));
        }
    }
    const LineFit fit = fit_line(lx, ly);
    CHECK(fit.slope == doctest::Approx(1.0 / cone.beta).epsilon(0.01));
}

TEST_CASE("mode poisson rejects bad input") {
    const ModelCone cone{0.5, 1.0};
    const auto r = log_radial_grid(1e-3, 1.0, 50);
    std::vector<double> rhs(r.size(), 1.0);
    CHECK_THROWS_AS(mode_poisson_solve(cone, -1, r, rhs, 0.0), std::domain_error);
    rhs[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(mode_poisson_solve(cone, 0, r, rhs, 0.0), std::invalid_argument);
}

TEST_CASE("manufactured solution: operator applied to solve output returns rhs") {
    const ModelCone cone{0.7, 1.0};
    const auto r = log_radial_grid(1e-4, 1.0, 600);
    std::vector<double> rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = std::cos(3.0 * r[i]);
    const int mode = 1;
    const auto u = mode_poisson_solve(cone, mode, r, rhs, 0.3);
    const double nu = mode / cone.beta;
    double worst = 0.0;
    for (std::size_t i = 5; i + 5 < r.size(); i += 7) {
        const double x0 = r[i];
        const auto xs = std::span(r).subspan(i - 2, 5);
        const auto w2 = fd_weights(x0, xs, 2);
        const auto w1 = fd_weights(x0, xs, 1);
        double upp = 0.0, up = 0.0;
        for (int k = 0; k < 5; ++k) {
            upp += w2[k] * u[i - 2 + k];
            up += w1[k] * u[i - 2 + k];
        }
        const double lhs = upp + up / x0 - nu * nu * u[i] / (x0 * x0);
        worst = std::max(worst, std::abs(lhs - rhs[i]));
    }
    CHECK(worst < 5e-4);
}

TEST_CASE("heat kernel matches the Euclidean plane at beta = 1") {
    const ModelCone cone{1.0, 1.0};
    const HeatKernelConfig cfg;
    for (const auto& [t, r, y, r2, y2] :
         {std::array<double, 5>{0.3, 0.4, 0.7, 0.55, 2.9},
          std::array<double, 5>{0.05, 0.9, 0.0, 0.3, 3.1},
          std::array<double, 5>{0.8, 0.2, 5.5, 0.8, 1.0}}) {
        const double d2 = r * r + r2 * r2 - 2.0 * r * r2 * std::cos(y - y2);
        const double expected = std::exp(-d2 / (4.0 * t)) / (4.0 * kPi * t);
        CHECK(heat_kernel_eval(cone, cfg, t, r, y, r2, y2) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("heat kernel symmetry and positivity") {
    const ModelCone cone{0.6, 1.0};
    const HeatKernelConfig cfg;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ur(0.05, 1.0), uy(0.0, 2.0 * kPi), ut(0.02, 0.6);
    for (int k = 0; k < 120; ++k) {
        const double t = ut(rng), r = ur(rng), r2 = ur(rng), y = uy(rng), y2 = uy(rng);
        const double a = heat_kernel_eval(cone, cfg, t, r, y, r2, y2);
        const double b = heat_kernel_eval(cone, cfg, t, r2, y2, r, y);
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
        CHECK(a > 0.0);
    }
}

TEST_CASE("heat kernel scaling law") {
    const ModelCone cone{0.5, 1.0};
    const HeatKernelConfig cfg;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ur(0.05, 1.0), uy(0.0, 2.0 * kPi), ut(0.05, 0.5);
    std::vector<KernelSample> samples;
    for (int k = 0; k < 100; ++k)
        samples.push_back({ut(rng), ur(rng), uy(rng), ur(rng), uy(rng)});

    CHECK(scaling_residual(cone, cfg, 1.0, samples) == 0.0);
    CHECK(scaling_residual(cone, cfg, 2.0, samples) < 1e-8);

    // lambda = 1/2 on pre-scaled samples agrees with lambda = 2
    std::vector<KernelSample> prescaled;
    for (const auto& s : samples)
        prescaled.push_back({4.0 * s.t, 2.0 * s.r, s.y, 2.0 * s.r2, s.y2});
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = prescaled[i];
        const double va = heat_kernel_eval(cone, cfg, a.t, a.r, a.y, a.r2, a.y2);
        const double vb = heat_kernel_eval(cone, cfg, b.t, b.r, b.y, b.r2, b.y2);
        worst = std::max(worst, std::abs(0.25 * va - vb) / 0.25);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("heat kernel error paths") {
    const ModelCone cone{0.5, 1.0};
    HeatKernelConfig cfg;
    CHECK_THROWS_AS(heat_kernel_eval(cone, cfg, -0.1, 0.5, 0.0, 0.5, 0.0), std::domain_error);
    cfg.max_angular_mode = 2;
    // strong diagonal peak needs many modes; must fail loudly, not silently
    CHECK_THROWS_AS(heat_kernel_eval(cone, cfg, 1e-5, 0.9, 0.0, 0.9, 0.0), TruncationError);
}

namespace {

PolarField bump_field(const ModelCone& cone, std::size_t nr, std::size_t ny, double r0, double w,
                      bool with_mode1) {
    PolarField f = PolarField::log_grid(cone, nr, ny, 1e-4);
    for (std::size_t i = 0; i < f.nr(); ++i) {
        const double g = std::exp(-std::pow((f.r[i] - r0) / w, 2));
        for (std::size_t j = 0; j < f.ny(); ++j) {
            double v = g;
            if (with_mode1) v *= 1.0 + 0.6 * std::cos(f.y[j]) + 0.3 * std::sin(2.0 * f.y[j]);
            f.at(i, j) = v;
        }
    }
    return f;
}

}  // namespace

TEST_CASE("heat_apply conserves mass") {
    const ModelCone cone{0.7, 1.0};
    const HeatKernelConfig cfg;
    PolarField f = bump_field(cone, 201, 32, 0.45, 0.08, true);
    const double m0 = polar_mass(cone, f);
    const PolarField g = heat_apply(cone, cfg, 6e-4, f);
    const double m1 = polar_mass(cone, g);
    CHECK(std::abs(m1 - m0) / std::abs(m0) < 1e-6);
}

TEST_CASE("heat_apply approximate identity as t -> 0") {
    const ModelCone cone{0.8, 1.0};
    const HeatKernelConfig cfg;
    PolarField f = bump_field(cone, 241, 16, 0.5, 0.22, true);
    const PolarField g = heat_apply(cone, cfg, 1e-6, f);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.nr(); ++i) {
        if (f.r[i] < 0.3 || f.r[i] > 0.7) continue;  // fixed annulus
        for (std::size_t j = 0; j < f.ny(); ++j)
            worst = std::max(worst, std::abs(g.at(i, j) - f.at(i, j)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("heat_apply semigroup property") {
    const ModelCone cone{0.6, 1.0};
    const HeatKernelConfig cfg;
    // narrow bump: negligible tail at r_max, so domain truncation cannot
    // pollute the two-route comparison
    PolarField f = bump_field(cone, 801, 32, 0.45, 0.1, true);
    const double t1 = 4e-4, t2 = 8e-4;
    const PolarField once = heat_apply(cone, cfg, t1 + t2, f);
    const PolarField twice = heat_apply(cone, cfg, t2, heat_apply(cone, cfg, t1, f));
    double worst = 0.0;
    for (std::size_t k = 0; k < once.values.size(); ++k)
        worst = std::max(worst, std::abs(once.values[k] - twice.values[k]));
    CHECK(worst < 1e-6);
}

TEST_CASE("expansion fit on exact synthetic input") {
    const ModelCone cone{0.75, 1.0};
    PolarField f = PolarField::log_grid(cone, 220, 16, 1e-4);
    for (std::size_t i = 0; i < f.nr(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j)
            f.at(i, j) = 3.0 + std::pow(f.r[i], 1.0 / cone.beta) * std::cos(f.y[j]);
    const ExpansionFit fit = expansion_fit(f, cone);
    CHECK(fit.a0 == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(fit.mode1_above_noise);
    CHECK(fit.mode1_exponent == doctest::Approx(1.0 / cone.beta).epsilon(1e-3));
    CHECK(fit.a11 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(fit.a12) < 1e-8);
}

TEST_CASE("expansion fit: even symmetry kills mode 1") {
    const ModelCone cone{0.7, 1.0};
    PolarField f = PolarField::log_grid(cone, 220, 16, 1e-4);
    // phi(y) = phi(pi - y): only even-in-(y - pi/2) content, no cos y / sin y
    for (std::size_t i = 0; i < f.nr(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j)
            f.at(i, j) = 1.0 + f.r[i] * f.r[i] * (0.5 + 0.25 * std::sin(2.0 * f.y[j]));
    const ExpansionFit fit = expansion_fit(f, cone);
    CHECK(!fit.mode1_above_noise);
    CHECK(fit.a11 == 0.0);
    CHECK(fit.a12 == 0.0);
    REQUIRE(fit.remainder_exponent.has_value());
    CHECK(*fit.remainder_exponent == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("expansion fit insufficient resolution is rejected") {
    const ModelCone cone{0.7, 1.0};
    PolarField f = PolarField::log_grid(cone, 30, 8, 0.5);  // half a decade only
    CHECK_THROWS_AS(expansion_fit(f, cone), std::invalid_argument);
}

TEST_CASE("heat solutions carry the regularity exponent") {
    // generic initial data, fit of the sub-leading tip exponent
    for (double beta : {0.75, 0.9}) {
        const ModelCone cone{beta, 1.0};
        const HeatKernelConfig cfg;
        PolarField f = bump_field(cone, 241, 16, 0.45, 0.12, true);
        const PolarField u = heat_apply(cone, cfg, 0.1, f);
        const ExpansionFit fit = expansion_fit(u, cone);
        REQUIRE(fit.mode1_above_noise);
        CHECK(fit.mode1_exponent == doctest::Approx(1.0 / beta).epsilon(0.01));
    }
    // orbifold branch: for beta <= 1/2 the sub-leading exponent is 2
    {
        const ModelCone cone{0.4, 1.0};
        const HeatKernelConfig cfg;
        PolarField f = bump_field(cone, 241, 16, 0.45, 0.12, true);
        const PolarField u = heat_apply(cone, cfg, 0.1, f);
        const ExpansionFit fit = expansion_fit(u, cone);
        REQUIRE(fit.remainder_exponent.has_value());
        CHECK(*fit.remainder_exponent == doctest::Approx(2.0).epsilon(0.02));
    }
}
