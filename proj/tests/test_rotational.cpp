#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conicricci/diagnostics.hpp"
#include "conicricci/rotational.hpp"

using namespace conicricci;

namespace {
constexpr double kPi = std::numbers::pi;

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}
}  // namespace

TEST_CASE("curvature profile closed forms") {
    SUBCASE("suspension has R = 2") {
        const RotationalState rs = suspension_metric(0.6, 2.0, 401);
        const std::vector<double> R = curvature_profile(rs);
        for (double v : R) CHECK(v == doctest::Approx(2.0).epsilon(2e-4));
    }
    SUBCASE("flat cone patch has R = 0") {
        RotationalState rs;
        rs.beta_tips = {0.5, 0.5};
        const std::size_t n = 101;
        // symmetric double cone h = 0.5 * min(s, L - s): flat away from the seam
        const double L = 2.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = L * static_cast<double>(i) / (n - 1);
            rs.s.push_back(s);
            rs.h.push_back(0.5 * std::min(s, L - s));
        }
        rs.h.front() = rs.h.back() = 0.0;
        const std::vector<double> R = curvature_profile(rs);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (std::abs(rs.s[i] - 1.0) < 0.05) continue;  // seam carries the defect
            CHECK(std::abs(R[i]) < 1e-10);
        }
        CHECK(std::abs(R.front()) < 1e-10);
    }
    SUBCASE("cigar-like tip: R(0) = 4 for h ~ tanh s") {
        RotationalState rs;
        const double L = 8.0;
        const std::size_t n = 1601;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = L * static_cast<double>(i) / (n - 1);
            rs.s.push_back(s);
            rs.h.push_back(std::tanh(s) * std::tanh(L - s));
        }
        rs.h.front() = rs.h.back() = 0.0;
        rs.beta_tips = {std::tanh(L), std::tanh(L)};
        const std::vector<double> R = curvature_profile(rs);
        CHECK(R.front() == doctest::Approx(4.0).epsilon(1e-3));
        // decays like 4 sech^2 s in the interior
        for (std::size_t i = 0; i < n; ++i) {
            if (rs.s[i] < 0.5 || rs.s[i] > 3.0) continue;
            const double sech = 1.0 / std::cosh(rs.s[i]);
            CHECK(R[i] == doctest::Approx(4.0 * sech * sech).epsilon(1e-3));
        }
    }
}

TEST_CASE("suspension metric closed form") {
    const RotationalState rs = suspension_metric(0.6, 2.0, 400);
    CHECK(rs.length() == doctest::Approx(kPi));
    CHECK(total_area(rs) == doctest::Approx(2.4 * kPi).epsilon(1e-6));
    for (std::size_t i = 0; i < rs.s.size(); ++i)
        CHECK(rs.h[i] == doctest::Approx(0.6 * std::sin(rs.s[i])).epsilon(1e-12));

    const RotationalState round = suspension_metric(1.0, 2.0, 400);
    CHECK(total_area(round) == doctest::Approx(4.0 * kPi).epsilon(1e-6));
}

TEST_CASE("cylinder suspension is curvature-exact and a flow fixed point") {
    const CylinderState cs = make_suspension_cylinder(0.6, 2.0, 3001, 1e-4);
    // raw conformal-gauge curvature is reliable away from the tips only
    const std::vector<double> R = cylinder_curvature(cs);
    for (std::size_t i = 0; i < cs.n(); ++i)
        if (std::exp(-2.0 * cs.w[i]) < 1e3)
            CHECK(R[i] == doctest::Approx(2.0).epsilon(2e-5));
    // resampled arc-length diagnostics cover the whole profile
    const RotationalState rs = resample_uniform_arclength(to_rotational(cs), 3001);
    for (double v : curvature_profile(rs)) CHECK(v == doctest::Approx(2.0).epsilon(2e-4));
    CHECK(cylinder_area(cs) == doctest::Approx(2.4 * kPi).epsilon(1e-6));

    const double dt = 1e-3;
    const CylinderState next = cylinder_step(cs, dt, 2.0, FlowScheme::semi_implicit);
    CHECK(sup_diff(next.w, cs.w) < dt * 1e-3);
}

TEST_CASE("dt = 0 is the identity") {
    const RotationalState rs = suspension_metric(0.7, 2.0, 201);
    const RotationalState out = flow_step_rotational(rs, 0.0, 2.0);
    CHECK(sup_diff(out.h, rs.h) == 0.0);
    CHECK(sup_diff(out.s, rs.s) == 0.0);
}

TEST_CASE("unnormalized flow shrinks a round sphere at rate 8 pi") {
    // rho = 0: dA/dt = -4 pi chi = -8 pi on the smooth sphere
    const CylinderState cs = make_suspension_cylinder(1.0, 2.0, 4001, 1e-4);
    auto rate_at = [&](double dt) {
        const CylinderState fwd = cylinder_step(cs, dt, 0.0, FlowScheme::semi_implicit);
        return (cylinder_area(fwd) - cylinder_area(cs)) / dt;
    };
    // Richardson extrapolation removes the first-order scheme bias
    const double rate = 2.0 * rate_at(5e-5) - rate_at(1e-4);
    CHECK(rate == doctest::Approx(-8.0 * kPi).epsilon(1e-3));
}

TEST_CASE("conversion round trip") {
    CylinderState cs = make_spindle_cylinder(0.7, 1.0, 2.0 * kPi * 1.7, 2001, 1e-4);
    const RotationalState rs = to_rotational(cs);
    rs.validate();
    CHECK(std::abs(total_area(rs) - cylinder_area(cs)) / cylinder_area(cs) < 1e-6);
    // x is a gauge coordinate (defined up to translation); compare the
    // arc-length profiles, which are geometric
    const CylinderState back = from_rotational(rs, cs.n(), 1.2e-4);
    const RotationalState rs2 = to_rotational(back);
    CHECK(rs2.length() == doctest::Approx(rs.length()).epsilon(1e-8));
    const RotationalState a = resample_uniform_arclength(rs, 2001);
    const RotationalState b = resample_uniform_arclength(rs2, 2001);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.s.size(); ++i)
        worst = std::max(worst, std::abs(a.h[i] - b.h[i] * rs.length() / rs2.length()));
    CHECK(worst < 1e-6);
}

TEST_CASE("area is conserved at the target rho and drifts at first order") {
    const double beta = 0.6;
    const double area = 4.0 * kPi * beta;  // chi = 2 beta, rho = 2
    CylinderState cs = make_spindle_cylinder(beta, beta, area, 3001, 1e-4);
    perturb_cylinder(cs, 0.08, 0.3);
    const double rho = 4.0 * kPi * (2.0 * beta) / cylinder_area(cs);

    auto drift = [&](double dt) {
        RotationalRunParams params;
        params.rho = rho;
        params.dt_init = dt;
        params.t_end = 1.0;
        params.record_every = 1000000;  // endpoints only
        params.tol_curvature = 1e-14;   // don't stop early
        const RotationalRunResult run = run_rotational(cs, params);
        const double a0 = run.trajectory.records.front().area;
        const double a1 = run.trajectory.records.back().area;
        return std::abs(a1 - a0) / a0;
    };
    const double d1 = drift(2e-3);
    const double d2 = drift(1e-3);
    CHECK(d1 < 1e-3);
    const double order = std::log2(d1 / d2);
    CHECK(order >= 0.9);
}

TEST_CASE("perturbed equal football relaxes toward the suspension") {
    const double beta = 0.6;
    CylinderState cs = make_spindle_cylinder(beta, beta, 4.0 * kPi * beta, 3001, 1e-4);
    perturb_cylinder(cs, 0.05, 0.2);

    RotationalRunParams params;
    params.rho = 4.0 * kPi * (2.0 * beta) / cylinder_area(cs);
    params.dt_init = 2e-3;
    params.t_end = 12.0;
    params.record_every = 50;
    params.tol_curvature = 1e-5;
    const RotationalRunResult run = run_rotational(cs, params);
    CHECK(run.trajectory.termination == TerminationReason::converged);

    // compare against the suspension at the flow's own scale
    const RotationalState fin = run.final_rotational;
    const double scale = std::sqrt(2.0 / params.rho);
    const double L = fin.length();
    CHECK(L == doctest::Approx(kPi * scale).epsilon(1e-4));
    double worst = 0.0;
    for (std::size_t i = 0; i < fin.s.size(); ++i)
        worst = std::max(worst, std::abs(fin.h[i] -
                                         beta * scale * std::sin(fin.s[i] / scale)));
    CHECK(worst < 1e-4);

    // residual trend: monotone decay of max|R - rho| over the recorded tail
    const auto& recs = run.trajectory.records;
    REQUIRE(recs.size() >= 4);
    for (std::size_t k = recs.size() / 2; k + 1 < recs.size(); ++k) {
        const double r0 = std::max(std::abs(recs[k].r_min - 2.0), std::abs(recs[k].r_max - 2.0));
        const double r1 =
            std::max(std::abs(recs[k + 1].r_min - 2.0), std::abs(recs[k + 1].r_max - 2.0));
        CHECK(r1 <= r0 * 1.05 + 1e-12);
    }
}

TEST_CASE("curvature evolution consistency: dR/dt = Lap R + R(R - rho)") {
    const double beta = 0.7;
    CylinderState cs = make_spindle_cylinder(beta, beta, 4.0 * kPi * beta, 3001, 1e-4);
    perturb_cylinder(cs, 0.05, 0.0);
    const double rho = 4.0 * kPi * (2.0 * beta) / cylinder_area(cs);
    const double dt = 5e-5;
    const CylinderState fwd = cylinder_step(cs, dt, rho, FlowScheme::semi_implicit);
    const CylinderState fwd2 = cylinder_step(fwd, dt, rho, FlowScheme::semi_implicit);

    const std::vector<double> R0 = cylinder_curvature(cs);
    const std::vector<double> R1 = cylinder_curvature(fwd);
    const std::vector<double> R2 = cylinder_curvature(fwd2);
    double worst = 0.0;
    for (std::size_t i = 10; i + 10 < cs.n(); ++i) {
        if (std::exp(-2.0 * fwd.w[i]) > 25.0) continue;  // tip-amplified noise
        const double dRdt = (R2[i] - R0[i]) / (2.0 * dt);
        const double lap =
            std::exp(-2.0 * fwd.w[i]) * (R1[i - 1] - 2.0 * R1[i] + R1[i + 1]) / (fwd.dx * fwd.dx);
        const double rhs = lap + R1[i] * (R1[i] - rho);
        worst = std::max(worst, std::abs(dRdt - rhs));
    }
    CHECK(worst < 2e-2);
}

TEST_CASE("R_min comparison holds along a positive-rho run") {
    const double beta = 0.65;
    CylinderState cs = make_spindle_cylinder(beta, beta, 4.0 * kPi * beta, 2001, 1e-4);
    perturb_cylinder(cs, 0.1, 0.5);
    RotationalRunParams params;
    params.rho = 4.0 * kPi * (2.0 * beta) / cylinder_area(cs);
    params.dt_init = 1e-3;
    params.t_end = 2.0;
    params.record_every = 20;
    params.tol_curvature = 1e-12;
    const RotationalRunResult run = run_rotational(cs, params);
    const RminReport rep = rmin_track(run.trajectory.records, params.rho, 10.0 * params.dt_init);
    CHECK(rep.violations == 0);
}
