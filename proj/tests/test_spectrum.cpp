#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "conelab/spectrum.hpp"

using namespace conelab;

TEST_CASE("indicial roots") {
    const auto r = indicial_roots(-5.0, 7);
    REQUIRE(r);
    CHECK(r->first + r->second == doctest::Approx(-5.0));
    CHECK(r->first * r->second == doctest::Approx(5.0));
    CHECK(!indicial_roots(-7.0, 7));
}

TEST_CASE("ground state of 7,1") {
    const ConeParams p(7, 1);
    const auto e = find_eigenvalue(p);
    CHECK(e.lambda == doctest::Approx(-5.698).epsilon(2e-4));
    CHECK(e.gamma_plus == doctest::Approx(-1.757).epsilon(5e-4));
    CHECK(e.zeros_interior == 0);
    CHECK(std::abs(e.bc_residual) < 1e-8);
    const auto g = indicial_roots(e.lambda, 7);
    REQUIRE(g);
    CHECK(e.gamma_minus == doctest::Approx(g->first));
    // The eigenfunction is positive on (0, t_nk].
    const auto prof = shoot_profile(p, find_root(p), e.lambda, Mode{});
    REQUIRE(prof.size() > 10);
    for (const auto& [t, phi] : prof) CHECK(phi > 0);
}

TEST_CASE("exact Robin eigenvalue at alpha = 4-n") {
    // rho^{4-n} g_{4-n} is not an eigenfunction, but lambda = alpha(alpha+n-2) with the
    // profile as initial data must reproduce g'/g at the boundary.
    for (auto [n, k] : {std::pair{7, 2}, {10, 5}}) {
        const ConeParams p(n, k);
        const auto root = find_root(p);
        const double alpha = 4.0 - n;
        const auto sr = shoot(p, root, alpha * (alpha + n - 2), Mode{});
        const auto pv = profile_g_with_deriv(p, alpha, root.t_nk);
        REQUIRE(sr.logderiv);
        CHECK(*sr.logderiv == doctest::Approx(pv.dg / pv.g).epsilon(1e-9));
    }
}

TEST_CASE("lambda = 0 and oscillation for large lambda") {
    const ConeParams p(9, 4);
    const auto z = shoot(p, 0.0, Mode{});
    REQUIRE(z.logderiv);
    CHECK(std::abs(*z.logderiv) < 1e-10);
    CHECK(z.zeros_interior == 0);
    CHECK(shoot(p, -400.0, Mode{}).zeros_interior == 0);
    CHECK(shoot(p, 400.0, Mode{}).zeros_interior >= 2);
}

TEST_CASE("higher eigenvalues have more zeros") {
    const ConeParams p(7, 3);
    const auto e0 = find_eigenvalue(p, Mode{}, 0);
    const auto e1 = find_eigenvalue(p, Mode{}, 1);
    const auto e2 = find_eigenvalue(p, Mode{}, 2);
    CHECK(e0.lambda < e1.lambda);
    CHECK(e1.lambda < e2.lambda);
    CHECK(e1.zeros_interior == 1);
    CHECK(e2.zeros_interior == 2);
}

TEST_CASE("angular modes") {
    const ConeParams p(7, 3);
    // Translations give zero eigenvalues in both factors.
    CHECK(std::abs(find_eigenvalue(p, Mode{1, 0}).lambda) < 1e-8);
    CHECK(std::abs(find_eigenvalue(p, Mode{0, 1}).lambda) < 1e-8);
    for (Mode m : {Mode{1, 1}, Mode{2, 0}, Mode{0, 2}}) {
        const double ls = find_eigenvalue(p, m).lambda;
        const double lf = fd_oracle_richardson(p, m, 200).extrapolated;
        CHECK(ls == doctest::Approx(lf).epsilon(1e-5));
    }
    CHECK(find_eigenvalue(p, Mode{1, 1}).lambda == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("finite-difference oracle converges at second order") {
    const auto r = fd_oracle_richardson(ConeParams(9, 4), Mode{}, 200);
    CHECK(r.observed_order == doctest::Approx(2.0).epsilon(0.1));
    const double ls = find_eigenvalue(ConeParams(9, 4)).lambda;
    CHECK(std::abs(r.extrapolated - ls) < 1e-6 * std::abs(ls));
    CHECK(std::abs(r.finest - ls) < std::abs(r.coarse - ls));
}

TEST_CASE("configuration") {
    const ConeParams p(8, 3);
    ShootingConfig c;
    c.lambda_bracket = std::make_pair(100.0, 101.0);
    CHECK_THROWS_AS(find_eigenvalue(p, Mode{}, 0, c), Error);
    ShootingConfig bad;
    bad.t_launch = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    // Halving the launch point does not move the eigenvalue.
    ShootingConfig half;
    half.t_launch = 5e-7;
    const double a = find_eigenvalue(p).lambda, b = find_eigenvalue(p, Mode{}, 0, half).lambda;
    CHECK(std::abs(a - b) < 1e-11 * std::abs(a) + 1e-11);
}

TEST_CASE("family scan is deterministic across thread counts") {
    const auto a = family_scan(7, 10, 1);
    const auto b = family_scan(7, 10, 4);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].n == b.rows[i].n);
        CHECK(a.rows[i].k == b.rows[i].k);
        CHECK(a.rows[i].lambda1 == b.rows[i].lambda1);
    }
    CHECK(a.all_ok());
    CHECK_THROWS_AS(family_scan(2, 10), Error);
    CHECK(default_threads() >= 1);
}
