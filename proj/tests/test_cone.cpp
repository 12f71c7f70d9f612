#include <doctest.h>

#include <cmath>
#include <vector>

#include "conelab/cone.hpp"
#include "conelab/quad.hpp"

using namespace conelab;

namespace {

// (1-t^2) g'' + ((k-1)/t - (n-1) t) g' + lambda g, second differences.
template <class G>
double ode_residual(const ConeParams& p, double lambda, double t, G g) {
    const double h = 1e-4;
    const double g0 = g(t), gp = g(t + h), gm = g(t - h);
    const double d1 = (gp - gm) / (2 * h), d2 = (gp - 2 * g0 + gm) / (h * h);
    const double a = (1 - t * t) * d2, b = ((p.k - 1) / t - (p.n - 1) * t) * d1, c = lambda * g0;
    return std::abs(a + b + c) / (std::abs(a) + std::abs(b) + std::abs(c));
}

// u(x) with x = (y, z), y in R^k, z in R^{n-k}.
double u_at(const ConeParams& p, double alpha, const std::vector<double>& x) {
    double ry = 0, rr = 0;
    for (int i = 0; i < p.n; ++i) {
        rr += x[i] * x[i];
        if (i < p.k) ry += x[i] * x[i];
    }
    const double rho = std::sqrt(rr);
    return eval_homogeneous(p, alpha, 1.0, rho, std::sqrt(ry) / rho);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ConeParams(2, 1), Error);
    CHECK_THROWS_AS(ConeParams(7, 0), Error);
    CHECK_THROWS_AS(ConeParams(7, 6), Error);
    CHECK(ConeParams(7, 5).d() == 2);
    CHECK_THROWS_AS(profile_f(ConeParams(7, 1), 1.0), Error);
    CHECK_THROWS_AS(eval_homogeneous(ConeParams(7, 1), 1.0, 1.0, 0.0, 0.5), Error);
}

TEST_CASE("closed-form profiles") {
    const ConeParams p71(7, 1), p81(8, 1);
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double t2 = t * t;
        const double f7 = -15.0 / 8 * t * std::atanh(t) + (15.0 / 8 * t2 * t2 - 25.0 / 8 * t2 + 1) / ((1 - t2) * (1 - t2));
        const double f8 = std::pow(1 - t2, -2.5) * (1 - 6 * t2 + 8 * t2 * t2 - 3.2 * t2 * t2 * t2);
        CHECK(profile_f(p71, t) == doctest::Approx(f7).epsilon(1e-12));
        CHECK(profile_f(p81, t) == doctest::Approx(f8).epsilon(1e-12));
    }
}

TEST_CASE("k = 1 integral form") {
    // f(t) = 1 - t * int_0^t s^{-2} ((1-s^2)^{-(n-1)/2} - 1) ds
    for (int n : {5, 9, 14}) {
        const ConeParams p(n, 1);
        for (double t : {0.2, 0.45, 0.6}) {
            const auto q = quad::integrate(
                [&](double s) {
                    return s == 0 ? 0.5 * (n - 1) : std::expm1(-0.5 * (n - 1) * std::log1p(-s * s)) / (s * s);
                },
                0.0, t, 1e-16, 1e-14);
            CHECK(profile_f(p, t) == doctest::Approx(1 - t * q.value).epsilon(1e-11));
        }
    }
}

TEST_CASE("profiles solve the link ODE") {
    for (auto [n, k] : {std::pair{7, 1}, {7, 3}, {10, 8}, {15, 6}})
        for (double alpha : {1.0, 4.0 - n, -1.3, 2.5}) {
            const ConeParams p(n, k);
            const double lam = alpha * (alpha + n - 2);
            for (double t : {0.2, 0.5, 0.8}) {
                CAPTURE(n);
                CAPTURE(k);
                CAPTURE(alpha);
                CHECK(ode_residual(p, lam, t, [&](double x) { return profile_g(p, alpha, x); }) < 1e-6);
            }
        }
}

TEST_CASE("odd companion solution") {
    for (int k : {2, 3, 4, 5, 6, 8}) {
        const ConeParams p(11, k);
        for (double t : {0.3, 0.6, 0.85}) {
            CAPTURE(k);
            CAPTURE(t);
            CHECK(ode_residual(p, p.n - 1.0, t, [&](double x) { return profile_f_odd(p, x); }) < 1e-6);
        }
        // Independent of the even solution: the Wronskian is non-zero.
        const double t = 0.5, h = 1e-5;
        const double fe = profile_f(p, t), fo = profile_f_odd(p, t);
        const double de = (profile_f(p, t + h) - profile_f(p, t - h)) / (2 * h);
        const double dO = (profile_f_odd(p, t + h) - profile_f_odd(p, t - h)) / (2 * h);
        CHECK(std::abs(fe * dO - fo * de) > 1e-3);
    }
}

TEST_CASE("homogeneous extension is harmonic") {
    const ConeParams p(7, 3);
    const std::vector<double> x0 = {0.2, -0.1, 0.3, 0.5, 0.4, -0.2, 0.35};
    for (double alpha : {1.0, -3.0, -1.6}) {
        const double h = 1e-3;
        double lap = 0, scale = 0;
        for (int i = 0; i < p.n; ++i) {
            auto xp = x0, xm = x0;
            xp[i] += h;
            xm[i] -= h;
            const double up = u_at(p, alpha, xp), um = u_at(p, alpha, xm), u0 = u_at(p, alpha, x0);
            lap += (up - 2 * u0 + um) / (h * h);
            scale += std::abs(up - 2 * u0 + um) / (h * h);
        }
        CAPTURE(alpha);
        CHECK(std::abs(lap) < 1e-4 * scale);
    }
}

TEST_CASE("free-boundary root") {
    const auto r = find_root(ConeParams(7, 1));
    CHECK(r.t_nk == doctest::Approx(0.517331).epsilon(1e-6));
    CHECK(r.s_nk == doctest::Approx(r.t_nk * r.t_nk));
    CHECK(r.bracket.first <= r.t_nk);
    CHECK(r.t_nk <= r.bracket.second);
    CHECK(r.residual < 1e-12);
    for (int n = 7; n <= 30; ++n)
        CHECK(std::abs(find_root(ConeParams(n, n - 3)).t_nk - std::sqrt((n - 3.0) / (n - 2.0))) < 1e-10);
    CHECK(std::abs(find_root(ConeParams(9, 6)).t_nk - std::sqrt(6.0 / 7)) < 1e-10);
    // Large dimensions where f overflows near t = 1.
    for (auto [n, k] : {std::pair{200, 100}, {400, 360}, {96, 56}}) {
        const ConeParams p(n, k);
        const auto rr = find_root(p);
        CHECK(std::abs(profile_f(p, rr.t_nk)) < 1e-9);
        CHECK(profile_f(p, 0.99 * rr.t_nk) > 0);
    }
}

TEST_CASE("gradient normalization on the free boundary") {
    const ConeParams p(8, 3);
    const auto r = find_root(p);
    const double c = normalization_c(p, r);
    // Point on the free boundary with rho = 1: |y| = t, |z| = sqrt(1-t^2).
    std::vector<double> x(p.n, 0.0);
    x[0] = r.t_nk;
    x[p.k] = std::sqrt(1 - r.s_nk);
    double g2 = 0;
    const double h = 1e-6;
    for (int i = 0; i < p.n; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double d = c * (u_at(p, 1.0, xp) - u_at(p, 1.0, xm)) / (2 * h);
        g2 += d * d;
    }
    CHECK(std::sqrt(g2) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("verdicts and admissible interval") {
    for (int n = 3; n <= 6; ++n)
        for (int k = 1; k <= n - 2; ++k) CHECK(verdict(ConeParams(n, k)).verdict == Verdict::Unstable);
    const auto rep = verdict(ConeParams(7, 1));
    CHECK(rep.verdict == Verdict::StrictlyStable);
    REQUIRE(rep.admissible);
    CHECK(rep.admissible->lo + rep.admissible->hi == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(rep.admissible->hi == doctest::Approx(-1.757).epsilon(1e-3));
    CHECK(rep.margin == doctest::Approx(rep.lhs - rep.rhs));
    // Inside the interval the margin is positive, outside it is negative.
    const ConeParams p(7, 1);
    const auto r = find_root(p);
    CHECK(stability_margin(p, -2.5, r) > 0);
    CHECK(stability_margin(p, -0.5, r) < 0);
    CHECK(!admissible_interval(ConeParams(5, 2)));
    CHECK(std::string(to_string(Verdict::BorderlineStable)) == "borderline_stable");
}
