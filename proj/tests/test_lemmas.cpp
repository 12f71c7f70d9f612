#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conelab/lemmas.hpp"

using namespace conelab;

TEST_CASE("limit profile u") {
    CHECK(std::abs(limit_profile_u(0.0) - std::sqrt(2 / std::numbers::pi)) < 1e-12);
    // u = phi / Phi solves u' = -xi u - u^2.
    for (double xi : {-20.0, -6.0, -1.5, 0.0, 0.7, 3.0, 9.0}) {
        const double h = 1e-5;
        const double du = (limit_profile_u(xi + h) - limit_profile_u(xi - h)) / (2 * h);
        const double u = limit_profile_u(xi);
        CAPTURE(xi);
        CHECK(du == doctest::Approx(-xi * u - u * u).epsilon(1e-6).scale(1e-12));
    }
    // u(xi) + xi ~ 1/|xi| - 2/|xi|^3 as xi -> -inf; u decays like a Gaussian as xi -> +inf.
    for (double xi : {-8.0, -32.0, -200.0}) {
        const double a = std::abs(xi);
        CHECK(limit_profile_u(xi) + xi == doctest::Approx(1 / a - 2 / (a * a * a)).epsilon(10 / (a * a * a * a) * a));
    }
    CHECK(limit_profile_u(6.0) < 1e-8);
    CHECK(limit_profile_u(6.0) > 0);
}

TEST_CASE("phi_c thresholds") {
    CHECK(phi_c_eval(3.0 / 5, 7.0 / 8) > 91.0 / 1090);
    CHECK(phi_c_eval(2.0 / 5, 9.0 / 10) > 1.0 / 10);
    CHECK(phi_c_eval(9.0 / 25, 15.0 / 16) > 91.0 / 1000);
    // phi_c(lam) equals u at the rescaled point, times the variance factor.
    const double lam = 0.3, c = 0.4, v = 2 * lam * (1 - lam);
    CHECK(phi_c_eval(lam, c) == doctest::Approx(std::sqrt(v) * limit_profile_u(c / std::sqrt(v))).epsilon(1e-12));
    CHECK_THROWS_AS(phi_c_eval(1.2, 0.1), Error);
}

TEST_CASE("root bound") {
    CHECK_THROWS_AS(root_bound_check(ConeParams(40, 20)), Error);
    CHECK_THROWS_AS(root_bound_check(ConeParams(100, 20)), Error);
    for (auto [n, k] : {std::pair{60, 20}, {100, 50}, {200, 175}, {200, 180}, {160, 150}}) {
        const auto b = root_bound_check(ConeParams(n, k));
        CAPTURE(n);
        CAPTURE(k);
        CHECK(b.passed);
        CHECK(b.name == "root_bound");
    }
    // At the shared endpoint k/n = 7/8 the tighter constant wins.
    CHECK(root_bound_check(ConeParams(200, 175)).parameters.at("c") == doctest::Approx(0.4));
}

TEST_CASE("boundary-layer constant") {
    const double z = estimate_z0(2000, 0.5);
    CHECK(z >= 0.74);
    CHECK(z <= 0.80);
    CHECK_THROWS_AS(estimate_z0(100, 0.5), Error);
}

TEST_CASE("overshoot disjunction") {
    for (int n : {60, 80, 100})
        for (int k = (n + 1) / 2; k <= n - 12; k += 3) CHECK(overshoot_check(ConeParams(n, k)).passed);
    for (int d = 4; d <= 11; ++d) {
        const auto b = overshoot_check(ConeParams(16 * d, 15 * d));
        CHECK(b.name == "overshoot_refined");
        CHECK(b.passed);
    }
    CHECK_THROWS_AS(overshoot_check(ConeParams(30, 27)), Error);
}

TEST_CASE("proof constants battery") {
    const auto checks = proof_constants_check();
    CHECK(checks.size() > 100);
    CHECK(std::is_sorted(checks.begin(), checks.end(),
                         [](const BoundCheck& a, const BoundCheck& b) { return a.name < b.name; }));
    for (const auto& c : checks) {
        CAPTURE(c.name);
        CHECK(c.passed);
    }
    auto find = [&](const std::string& name) {
        return std::find_if(checks.begin(), checks.end(), [&](const BoundCheck& c) { return c.name == name; });
    };
    REQUIRE(find("case_iii_quantity") != checks.end());
    REQUIRE(find("case_iv_ratio") != checks.end());
}
