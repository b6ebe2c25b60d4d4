#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "conicricci/cone_geometry.hpp"

using namespace conicricci;

TEST_CASE("conic euler characteristic") {
    CHECK(conic_euler_characteristic(make_spec(0, {0.5, 0.5, 0.5})) == doctest::Approx(0.5));
    CHECK(conic_euler_characteristic(make_spec(0, {})) == doctest::Approx(2.0));
    CHECK(conic_euler_characteristic(make_spec(2, {0.5})) == doctest::Approx(-2.5));
}

TEST_CASE("chi is additive in appended cone points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ub(0.01, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> betas;
        const int k = 1 + trial % 5;
        for (int j = 0; j < k; ++j) betas.push_back(ub(rng));
        const double chi0 = conic_euler_characteristic(make_spec(1, betas));
        const double extra = ub(rng);
        betas.push_back(extra);
        const double chi1 = conic_euler_characteristic(make_spec(1, betas));
        CHECK(chi1 == doctest::Approx(chi0 - (1.0 - extra)).epsilon(1e-15));
    }
}

TEST_CASE("target rho") {
    const double pi = 3.14159265358979323846;
    CHECK(target_rho(make_spec(0, {0.5, 0.5, 0.5}), 2.0 * pi) == doctest::Approx(1.0));
    CHECK(target_rho(make_spec(1, {}), 7.3) == doctest::Approx(0.0));
    // suspension with equal angles beta: area 4 pi beta gives rho = 2 (R = 2K = 2)
    const double beta = 0.37;
    CHECK(target_rho(make_spec(0, {beta, beta}), 4.0 * pi * beta) == doctest::Approx(2.0));
    CHECK_THROWS_AS(target_rho(make_spec(0, {0.5}), -1.0), std::domain_error);
    CHECK_THROWS_AS(target_rho(make_spec(0, {0.5}), 0.0), std::domain_error);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(make_spec(0, {1.0}), std::invalid_argument);   // beta = 1 rejected
    CHECK_THROWS_AS(make_spec(0, {1.2}), std::invalid_argument);
    CHECK_THROWS_AS(make_spec(0, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_spec(-1, {}), std::invalid_argument);
    ConicSurfaceSpec dup = make_spec(0, {0.4, 0.5});
    dup.cone_points[1].label = dup.cone_points[0].label;
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("troyanov check") {
    SUBCASE("symmetric three-point sphere satisfies TC") {
        const TroyanovReport rep = troyanov_check(make_spec(0, {0.5, 0.5, 0.5}));
        CHECK(rep.holds);
        CHECK(rep.sign_class == SignClass::positive);
        CHECK(rep.failing_indices.empty());
    }
    SUBCASE("sharp cone against two mild ones fails at index 0") {
        const TroyanovReport rep = troyanov_check(make_spec(0, {0.2, 0.9, 0.9}));
        CHECK(!rep.holds);
        CHECK(rep.chi_conic == doctest::Approx(1.0));
        REQUIRE(rep.failing_indices.size() == 1);
        CHECK(rep.failing_indices[0] == 0);
    }
    SUBCASE("teardrop fails at its only index") {
        const TroyanovReport rep = troyanov_check(make_spec(0, {0.5}));
        CHECK(!rep.holds);
        REQUIRE(rep.failing_indices.size() == 1);
        CHECK(rep.failing_indices[0] == 0);
    }
    SUBCASE("nonpositive chi always holds") {
        CHECK(troyanov_check(make_spec(1, {0.3})).holds);
        CHECK(troyanov_check(make_spec(3, {})).holds);
    }
}

TEST_CASE("troyanov check is permutation invariant") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ub(0.02, 0.98);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 3 + trial % 4;
        std::vector<double> betas(k);
        for (double& b : betas) b = ub(rng);
        const TroyanovReport base = troyanov_check(make_spec(0, betas));

        std::vector<int> perm(k);
        for (int j = 0; j < k; ++j) perm[j] = j;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled(k);
        for (int j = 0; j < k; ++j) shuffled[perm[j]] = betas[j];
        const TroyanovReport permuted = troyanov_check(make_spec(0, shuffled));

        CHECK(base.holds == permuted.holds);
        std::vector<int> mapped;
        for (int j : base.failing_indices) mapped.push_back(perm[j]);
        std::sort(mapped.begin(), mapped.end());
        std::vector<int> got = permuted.failing_indices;
        std::sort(got.begin(), got.end());
        CHECK(mapped == got);
    }
}

TEST_CASE("at most one failing index when k >= 3") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ub(0.01, 0.99);
    for (int trial = 0; trial < 400; ++trial) {
        const int k = 3 + trial % 5;
        std::vector<double> betas(k);
        for (double& b : betas) b = ub(rng);
        const TroyanovReport rep = troyanov_check(make_spec(0, betas));
        CHECK(rep.failing_indices.size() <= 1);
    }
}

TEST_CASE("limit classification") {
    CHECK(classify_limit(make_spec(0, {0.3, 0.7})).kind == LimitKind::soliton_football);
    CHECK(classify_limit(make_spec(0, {0.6, 0.6})).kind == LimitKind::constant_curvature);
    CHECK(classify_limit(make_spec(0, {0.2, 0.9, 0.9})).kind == LimitKind::blowup_expected);
    CHECK(classify_limit(make_spec(0, {0.5})).kind == LimitKind::soliton_teardrop);
    CHECK(classify_limit(make_spec(0, {})).kind == LimitKind::constant_curvature_modulo_mobius);
    CHECK(classify_limit(make_spec(1, {})).kind == LimitKind::constant_curvature_modulo_scale);
    CHECK(classify_limit(make_spec(2, {})).kind == LimitKind::constant_curvature);
    CHECK(classify_limit(make_spec(0, {0.5, 0.5, 0.5})).kind == LimitKind::constant_curvature);
}

TEST_CASE("constant curvature only with TC or nonpositive chi") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ub(0.01, 0.99);
    for (int trial = 0; trial < 300; ++trial) {
        const int genus = trial % 3;
        const int k = trial % 6;
        std::vector<double> betas(k);
        for (double& b : betas) b = ub(rng);
        const auto spec = make_spec(genus, betas);
        if (classify_limit(spec).kind == LimitKind::constant_curvature) {
            const TroyanovReport rep = troyanov_check(spec);
            CHECK((rep.holds || rep.chi_conic <= 0.0));
        }
    }
}
