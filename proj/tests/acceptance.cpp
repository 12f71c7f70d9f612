// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "conelab/cone.hpp"
#include "conelab/lemmas.hpp"
#include "conelab/riccati.hpp"
#include "conelab/spectrum.hpp"

using namespace conelab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double gamma_plus_of(double lambda, int n) {
    const double h = 0.5 * (n - 2);
    return -h + std::sqrt(h * h + lambda);
}

// Published table, n = 7..12: t, -lambda_1, -gamma_+.
struct Ref {
    int n, k;
    double t, neg_l, neg_g;
};
const Ref kTable[] = {
    {7, 1, .52, 5.698, 1.757},   {7, 2, .69, 5.639, 1.718},   {7, 3, .81, 5.607, 1.698},
    {7, 4, .89, 5.581, 1.682},   {7, 5, .96, 5.551, 1.664},   {8, 1, .48, 6.699, 1.483},
    {8, 2, .65, 6.642, 1.464},   {8, 3, .78, 6.613, 1.455},   {8, 4, .87, 6.591, 1.448},
    {8, 5, .91, 6.571, 1.441},   {8, 6, .97, 6.544, 1.433},   {9, 1, .45, 7.701, 1.367},
    {9, 2, .61, 7.645, 1.354},   {9, 3, .75, 7.618, 1.348},   {9, 4, .84, 7.599, 1.343},
    {9, 5, .89, 7.582, 1.339},   {9, 6, .94, 7.564, 1.335},   {9, 7, .98, 7.540, 1.330},
    {10, 1, .43, 8.702, 1.298},  {10, 2, .57, 8.647, 1.288},  {10, 3, .68, 8.621, 1.283},
    {10, 4, .76, 8.604, 1.280},  {10, 5, .83, 8.589, 1.278},  {10, 6, .89, 8.575, 1.275},
    {10, 7, .94, 8.559, 1.272},  {10, 8, .98, 8.536, 1.228},  {11, 1, .41, 9.702, 1.252},
    {11, 2, .55, 9.649, 1.244},  {11, 3, .65, 9.624, 1.240},  {11, 4, .72, 9.607, 1.238},
    {11, 5, .79, 9.594, 1.236},  {11, 6, .85, 9.582, 1.234},  {11, 7, .90, 9.570, 1.232},
    {11, 8, .94, 9.555, 1.230},  {11, 9, .98, 9.533, 1.226},  {12, 1, .38, 10.703, 1.219},
    {12, 2, .53, 10.650, 1.212}, {12, 3, .67, 10.626, 1.209}, {12, 4, .69, 10.610, 1.207},
    {12, 5, .76, 10.598, 1.205}, {12, 6, .82, 10.587, 1.204}, {12, 7, .87, 10.577, 1.202},
    {12, 8, .91, 10.566, 1.201}, {12, 9, .95, 10.552, 1.199}, {12, 10, .98, 10.531, 1.196},
};

Outcome table_regression() {
    constexpr double tol_t = 0.01, tol_v = 0.005, tol_exact = 1e-10, max_seconds = 60;
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream misses;
    int n_miss = 0;
    bool flagged_ok = true;
    for (const auto& r : kTable) {
        const ConeParams p(r.n, r.k);
        const auto root = find_root(p);
        const auto e = find_eigenvalue(p, root, Mode{}, 0);
        const bool ft = (r.n == 9 && r.k == 6) || (r.n == 12 && r.k == 3);
        const bool fg = r.n == 10 && r.k == 8;
        if (ft) {
            // The exact root must be reproduced instead of the printed digits.
            const double res = profile_f(p, root.t_nk);
            if (r.n == 9) flagged_ok &= std::abs(root.t_nk - std::sqrt(6.0 / 7.0)) <= tol_exact;
            flagged_ok &= std::abs(res) <= tol_exact;
        } else if (std::abs(root.t_nk - r.t) > tol_t) {
            ++n_miss;
            misses << " t(" << r.n << "," << r.k << ")=" << root.t_nk << " vs " << r.t;
        }
        if (std::abs(-e.lambda - r.neg_l) > tol_v) {
            ++n_miss;
            misses << " lambda1(" << r.n << "," << r.k << ")";
        }
        if (fg) {
            flagged_ok &= std::abs(e.gamma_plus - gamma_plus_of(e.lambda, r.n)) <= tol_exact;
        } else if (std::abs(-e.gamma_plus - r.neg_g) > tol_v) {
            ++n_miss;
            misses << " gamma+(" << r.n << "," << r.k << ")";
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream d;
    d << "unflagged misses=" << n_miss << misses.str() << "; flagged entries "
      << (flagged_ok ? "reproduced" : "NOT reproduced") << "; " << secs << " s";
    return {n_miss == 0 && flagged_ok && secs <= max_seconds, d.str()};
}

Outcome closed_form_roots() {
    constexpr double tol = 1e-10;
    double worst = 0;
    for (int n = 7; n <= 30; ++n) {
        const double t = find_root(ConeParams(n, n - 3)).t_nk;
        worst = std::max(worst, std::abs(t - std::sqrt((n - 3.0) / (n - 2.0))));
    }
    return {worst <= tol, "max |t - sqrt((n-3)/(n-2))| = " + sci(worst)};
}

Outcome verdicts() {
    int bad = 0, count = 0;
    for (int n = 3; n <= 6; ++n)
        for (int k = 1; k <= n - 2; ++k, ++count)
            if (verdict(ConeParams(n, k)).verdict != Verdict::Unstable) ++bad;
    const int low = count;
    for (int n = 7; n <= 12; ++n)
        for (int k = 1; k <= n - 2; ++k, ++count)
            if (verdict(ConeParams(n, k)).verdict != Verdict::StrictlyStable) ++bad;
    return {bad == 0 && low == 10,
            std::to_string(low) + " low-dimensional cones, " + std::to_string(count) + " total, wrong=" +
                std::to_string(bad)};
}

Outcome subsolution_margin() {
    constexpr double margin_min = 3e-2;
    double worst = 1e300;
    for (int k = 1; k <= 5; ++k) worst = std::min(worst, check_4_minus_n(ConeParams(7, k)).margin);
    int bad = 0;
    for (int n = 7; n <= 20; ++n)
        for (int k = 1; k <= n - 2; ++k)
            if (!check_4_minus_n(ConeParams(n, k)).ok) ++bad;
    return {worst > margin_min && bad == 0,
            "min n=7 margin " + sci(worst) + ", non-admissible cells " + std::to_string(bad)};
}

Outcome duality() {
    constexpr double tol_end = 1e-6, tol_sum = 1e-8;
    double worst_end = 0, worst_sum = 0;
    for (int n = 7; n <= 15; ++n)
        for (int k = 1; k <= n - 2; ++k) {
            const ConeParams p(n, k);
            const auto root = find_root(p);
            const auto iv = admissible_interval(p, root);
            const auto e = find_eigenvalue(p, root, Mode{}, 0);
            if (!iv) return {false, "empty interval at n=" + std::to_string(n) + " k=" + std::to_string(k)};
            worst_end = std::max({worst_end, std::abs(iv->lo - e.gamma_minus), std::abs(iv->hi - e.gamma_plus)});
            worst_sum = std::max(worst_sum, std::abs(iv->lo + iv->hi - (2.0 - n)));
        }
    std::ostringstream d;
    d << "endpoint error " << worst_end << ", midpoint error " << worst_sum;
    return {worst_end <= tol_end && worst_sum <= tol_sum, d.str()};
}

Outcome spectral_bounds() {
    int bad = 0;
    for (int n = 7; n <= 20; ++n)
        for (int k = 1; k <= n - 2; ++k) {
            const auto e = find_eigenvalue(ConeParams(n, k));
            const bool ok = e.lambda > 8.0 - 2 * n && e.gamma_minus > 2.0 - n && e.gamma_minus < 4.0 - n &&
                            e.gamma_plus > -2 && e.gamma_plus < 0;
            bad += !ok;
        }
    return {bad == 0, "violations " + std::to_string(bad)};
}

Outcome trends() {
    const auto rep = family_scan(7, 15);
    std::ostringstream d;
    d << "increasing_in_k=" << rep.increasing_in_k << " lambda_bar_decreasing=" << rep.lambda_bar_decreasing
      << " gamma_bar_increasing=" << rep.gamma_bar_increasing << " gamma_bar_range=" << rep.gamma_bar_range;
    return {rep.increasing_in_k && rep.lambda_bar_decreasing && rep.gamma_bar_increasing && rep.gamma_bar_range,
            d.str()};
}

Outcome oracle_equivalence() {
    constexpr double tol = 1e-4;
    constexpr int grid = 200;
    double worst = 0;
    for (auto [n, k] : {std::pair{7, 1}, {7, 5}, {9, 4}, {12, 6}, {15, 13}}) {
        const ConeParams p(n, k);
        const double ls = find_eigenvalue(p).lambda;
        const double lf = fd_oracle_richardson(p, Mode{}, grid).extrapolated;
        worst = std::max(worst, std::abs(ls - lf) / std::abs(ls));
    }
    return {worst <= tol, "max relative difference " + sci(worst)};
}

Outcome specfun_cross_validation() {
    constexpr double tol_int = 1e-9, tol_ode = 1e-8;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-4.0, 10.0), ub(0.2, 6.0), ugap(0.2, 6.0), us(-0.95, 0.95);
    double worst_int = 0, worst_ode = 0;
    auto residual = [](double a, double b, double c, double x) {
        const HypParams p(a, b, c);
        const double f = hyp2f1(p, x).value, d1 = hyp2f1_deriv(p, x, 1).value, d2 = hyp2f1_deriv(p, x, 2).value;
        const double t1 = x * (1 - x) * d2, t2 = (c - (a + b + 1) * x) * d1, t3 = a * b * f;
        return std::abs(t1 + t2 - t3) / (std::abs(t1) + std::abs(t2) + std::abs(t3));
    };
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng), b = ub(rng), c = b + ugap(rng), x = us(rng);
        const HypParams p(a, b, c);
        const double f = hyp2f1(p, x).value, g = hyp2f1_integral(p, x).value;
        worst_int = std::max(worst_int, std::abs(f - g) / std::abs(g));
        worst_ode = std::max(worst_ode, residual(a, b, c, x));
    }
    // The profile calls used by the cone code, including the large-parameter regime.
    for (auto [n, k] : {std::pair{7, 1}, {12, 5}, {40, 20}, {100, 60}, {400, 390}}) {
        const double t = find_root(ConeParams(n, k)).t_nk;
        for (double alpha : {1.0, 4.0 - n})
            worst_ode = std::max(worst_ode, residual(0.5 * (n + alpha - 2), -0.5 * alpha, 0.5 * k, 0.9 * t * t));
    }
    std::ostringstream d;
    d << "integral rel err " << worst_int << ", Euler residual " << worst_ode;
    return {worst_int <= tol_int && worst_ode <= tol_ode, d.str()};
}

Outcome threshold_battery() {
    constexpr double tol_u = 1e-12;
    const auto checks = proof_constants_check();
    int bad = 0;
    for (const auto& c : checks) bad += !c.passed;
    const bool extra = phi_c_eval(3.0 / 5, 7.0 / 8) > 91.0 / 1090 && phi_c_eval(2.0 / 5, 9.0 / 10) > 0.1 &&
                       phi_c_eval(9.0 / 25, 15.0 / 16) > 91.0 / 1000;
    const double du = std::abs(limit_profile_u(0.0) - std::sqrt(2 / std::numbers::pi));
    std::ostringstream d;
    d << checks.size() << " constants, failed " << bad << "; |u(0)-sqrt(2/pi)| = " << du;
    return {bad == 0 && extra && du <= tol_u, d.str()};
}

Outcome asymptotic_roots() {
    constexpr double z_lo = 0.74, z_hi = 0.80;
    int sampled = 0, bad = 0;
    // Twenty cells spread over the lambda range covered by the three constants.
    const double lams[] = {0.34, 0.38, 0.42, 0.46, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.93};
    for (int n : {60, 100, 200})
        for (double lam : lams) {
            if (sampled >= 20) break;
            const int k = static_cast<int>(std::lround(lam * n));
            if (3 * k < n || 16 * k > 15 * n) continue;
            ++sampled;
            bad += !root_bound_check(ConeParams(n, k)).passed;
        }
    int disj = 0, disj_bad = 0;
    for (int n : {60, 80, 100})
        for (int k = (n + 1) / 2; k <= n - 12; ++k, ++disj) disj_bad += !overshoot_check(ConeParams(n, k)).passed;
    const double z = estimate_z0(2000, 0.5);
    std::ostringstream d;
    d << sampled << " root bounds (" << bad << " failed), " << disj << " disjunctions (" << disj_bad
      << " failed), z0=" << z;
    return {sampled == 20 && bad == 0 && disj_bad == 0 && z >= z_lo && z <= z_hi, d.str()};
}

Outcome barriers() {
    constexpr double delta_min = 1.01;
    std::ostringstream fails;
    int cells = 0, bad = 0;
    for (int n : {96, 200, 400})
        for (int d : {6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 20, 40}) {
            ++cells;
            const auto r = verify_barrier(ConeParams(n, n - d));
            const bool ok = r.passed && (r.variant != BarrierVariant::SmallD || (r.delta && *r.delta > delta_min));
            if (!ok) {
                ++bad;
                fails << " (n=" << n << ",d=" << d << ": R_ok=" << r.R_ok << " jump=" << r.jump_decreasing
                      << " [" << r.left_limit << " -> " << r.value_at_knot << "] cmp=" << r.comparison_ok << ")";
            }
        }
    return {bad == 0, std::to_string(cells) + " cells, failed " + std::to_string(bad) + fails.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"table_regression", table_regression},
        {"closed_form_roots", closed_form_roots},
        {"verdicts", verdicts},
        {"subsolution_margin", subsolution_margin},
        {"interval_spectrum_duality", duality},
        {"spectral_bounds", spectral_bounds},
        {"monotone_trends", trends},
        {"oracle_equivalence", oracle_equivalence},
        {"specfun_cross_validation", specfun_cross_validation},
        {"threshold_battery", threshold_battery},
        {"asymptotic_roots", asymptotic_roots},
        {"barrier_verification", barriers},
    };
    int failed = 0, idx = 0;
    for (const auto& [name, fn] : criteria) {
        ++idx;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%-4s %2d %-26s %s\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
