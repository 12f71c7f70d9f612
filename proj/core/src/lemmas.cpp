#include "conelab/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace conelab {

namespace {

constexpr double kEuler = 0.57721566490153286061;

BoundCheck upper(std::string name, std::map<std::string, double> params, double claimed, double computed) {
    return {std::move(name), std::move(params), claimed, computed, computed < claimed};
}

BoundCheck lower(std::string name, std::map<std::string, double> params, double claimed, double computed) {
    return {std::move(name), std::move(params), claimed, computed, computed > claimed};
}

// I_p(rho) ratio used by the k = n-2 and k = n-3 estimates.
double case_iii_quantity(double rho) {
    return laplace_quad(rho, 2, false) / laplace_quad(rho, 1, false) - (1 - rho) / (2 * rho);
}

double case_iv_quantity(double shift) {
    return 2 * laplace_quad(1 + shift, 2, true) / laplace_quad(1 + shift, 1, true);
}

}  // namespace

BoundCheck root_bound_check(const ConeParams& p) {
    const double lam = static_cast<double>(p.k) / p.n;
    if (p.n < 60 || lam < 1.0 / 3 || lam > 15.0 / 16)
        throw Error(ErrorCode::RangeUnsupported, "root bound needs n >= 60 and k/n in [1/3, 15/16]");
    double c = INFINITY;
    if (lam <= 7.0 / 8) c = std::min(c, 3.0 / 5);
    if (lam >= 7.0 / 8 && lam <= 9.0 / 10) c = std::min(c, 2.0 / 5);
    if (lam >= 9.0 / 10) c = std::min(c, 9.0 / 25);
    const double s = find_root(p).s_nk;
    const double bound = lam + c / std::sqrt(static_cast<double>(p.n));
    return {"root_bound",
            {{"n", static_cast<double>(p.n)}, {"k", static_cast<double>(p.k)}, {"c", c}},
            bound,
            s,
            s < lam || s <= bound};
}

double limit_profile_u(double xi) {
    if (xi <= 0) return 1.0 / mills_ratio(-xi);
    return std::exp(-0.5 * xi * xi) / gaussian_tail(xi, 1.0);
}

double estimate_z0(int n_large, double lam) {
    if (n_large < 500) throw Error(ErrorCode::DomainError, "estimate_z0 needs n >= 500");
    if (!(lam >= 1.0 / 3 && lam <= 15.0 / 16)) throw Error(ErrorCode::DomainError, "lam must lie in [1/3, 15/16]");
    const int k = static_cast<int>(std::lround(lam * n_large));
    const ConeParams p(n_large, k);
    const double l = static_cast<double>(k) / n_large;
    const double s = find_root(p).s_nk;
    return (s - l) * std::sqrt(static_cast<double>(n_large)) / std::sqrt(2 * l * (1 - l));
}

double phi_c_eval(double lam, double c) {
    if (!(lam > 0 && lam < 1)) throw Error(ErrorCode::DomainError, "lam must lie in (0, 1)");
    const double v = 2 * lam * (1 - lam);
    return v * std::exp(-c * c / (2 * v)) / gaussian_tail(c, v);
}

BoundCheck overshoot_check(const ConeParams& p) {
    const int d = p.d();
    const double n = p.n;
    const double r = std::sqrt(2.0 * d + 1);
    const double lam = static_cast<double>(p.k) / p.n;
    if (2 * p.k >= p.n && d >= 12) {
        const double s = find_root(p).s_nk;
        const double lhs = (n * s - p.k) * (n * s - p.k);
        const double rhs = 2 * n * (1 - s);
        const double s_star = 1 - (d + 1 - r) / n;
        return {"overshoot",
                {{"n", n}, {"k", static_cast<double>(p.k)}, {"s_nk", s}, {"s_star", s_star}, {"quadratic_lhs", lhs},
                 {"quadratic_rhs", rhs}},
                rhs,
                lhs,
                s < lam || lhs <= rhs};
    }
    if (d >= 4 && d <= 11 && p.n >= 16 * d) {
        const double s = find_root(p).s_nk;
        const double s_star = 1 - (2 * d + 1 - 2 * r) / (2 * n);
        return {"overshoot_refined", {{"n", n}, {"k", static_cast<double>(p.k)}}, s_star, s, s < lam || s < s_star};
    }
    throw Error(ErrorCode::RangeUnsupported, "overshoot bound needs n/2 <= k <= n-12, or 4 <= d <= 11 with n >= 16d");
}

std::vector<BoundCheck> proof_constants_check() {
    std::vector<BoundCheck> out;

    // log(s - 1/2) < psi(s) < log(s) for s > 1/2.
    for (double s : {0.51, 0.75, 1.0, 1.5, 2.0, 3.0, 4.5, 10.0, 50.0, 1000.0}) {
        const double ps = digamma(s);
        out.push_back(lower("digamma_lower", {{"s", s}}, std::log(s - 0.5), ps));
        out.push_back(upper("digamma_upper", {{"s", s}}, std::log(s), ps));
    }
    out.push_back(lower("digamma_3_lower", {}, std::log(2.5), digamma(3.0)));
    out.push_back(upper("digamma_3_upper", {}, std::log(3.0), digamma(3.0)));
    {
        const double half = -kEuler - 2 * std::numbers::ln2;
        const double e1 = std::abs(digamma(1.0) + kEuler);
        const double e2 = std::abs(digamma(0.5) - half);
        const double e3 = std::abs(digamma(-0.5) - (half + 2));
        out.push_back(upper("digamma_special_values", {}, 1e-13, std::max({e1, e2, e3})));
        out.push_back(upper("digamma_shift_constant", {}, 0.62, digamma(-0.5) - digamma(1.0)));
    }
    // log x - 1/x < psi(x) < log x - 1/(2x) at x = (n-1)/2. The Case III
    // positivity is then checked with the lower side only.
    for (int n = 10; n <= 40; ++n) {
        const double x = 0.5 * (n - 1);
        const double px = digamma(x);
        out.push_back(lower("digamma_half_integer_lower", {{"n", double(n)}}, std::log(x) - 1 / x, px));
        out.push_back(upper("digamma_half_integer_upper", {{"n", double(n)}}, std::log(x) - 1 / (2 * x), px));
        const double q = -std::log(n / 4.0) + std::log(x) - 1 / x + digamma(-0.5) - 2 * digamma(1.0);
        out.push_back(lower("case_iii_digamma_lower_bound", {{"n", double(n)}}, 0.0, q));
    }

    // g_{n,k,alpha} > 0 on [0, t_{n,k}] for alpha in (1-n, 1).
    for (auto [n, k] : {std::pair{3, 1}, {5, 2}, {7, 1}, {7, 5}, {10, 4}, {12, 10}, {15, 7}, {20, 18}}) {
        const ConeParams p(n, k);
        const double t_nk = find_root(p).t_nk;
        double min_g = INFINITY;
        for (int i = 1; i < 12; ++i) {
            const double alpha = (1.0 - n) + n * i / 12.0;
            for (int j = 0; j <= 64; ++j) min_g = std::min(min_g, profile_g(p, alpha, t_nk * j / 64.0));
        }
        out.push_back(lower("g_positive", {{"n", double(n)}, {"k", double(k)}}, 0.0, min_g));
    }

    // g'/g - (n-2) t/(1-t^2) at t_{n,1}, alpha = 4-n.
    for (int n = 7; n <= 10; ++n) {
        const ConeParams p(n, 1);
        const double m = stability_margin(p, 4.0 - n, find_root(p));
        out.push_back(lower("case_i_margin", {{"n", double(n)}}, 0.05, m));
    }

    // k = n-2: f_{n,n-2}(sqrt(1 - 1/(4n))) < 0 via the sign of
    // -log(n/4) + psi((n-1)/2) + psi(-1/2) - 2 psi(1), and the resulting rho > 1/4.
    for (int n = 10; n <= 40; ++n) {
        const double q = -std::log(n / 4.0) + digamma(0.5 * (n - 1)) + digamma(-0.5) - 2 * digamma(1.0);
        out.push_back(lower("case_iii_digamma", {{"n", double(n)}}, 0.0, q));
        const ConeParams p(n, n - 2);
        const double t = find_root(p).t_nk;
        out.push_back(lower("case_iii_rho", {{"n", double(n)}}, 0.25, n * (1 - t * t)));
    }
    for (double rho : {0.25, 0.3, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        out.push_back(lower("case_iii_quantity", {{"rho", rho}}, 0.15, case_iii_quantity(rho)));
    }

    // k = n-3: the weighted ratio is decreasing in the shift and exceeds 7/5 at 1/10.
    out.push_back(lower("case_iv_ratio", {{"shift", 0.1}}, 1.4, case_iv_quantity(0.1)));
    {
        double prev = INFINITY;
        bool mono = true;
        for (int i = 0; i <= 20; ++i) {
            const double v = case_iv_quantity(0.005 * i + 1e-3);
            mono = mono && v < prev;
            prev = v;
        }
        out.push_back({"case_iv_decreasing", {}, 1.0, mono ? 1.0 : 0.0, mono});
    }

    // Large-d barrier constants. With A = sqrt(2d+1) - 1 >= 4 the exponent
    // 16/15 - 1/(2A) + 19/(12 A^2) equals 333/320 at A = 4, stays below 16/15
    // for all A, and so below log 3.
    {
        auto expo = [](double A) { return 16.0 / 15 - 1 / (2 * A) + 19 / (12 * A * A); };
        out.push_back({"exponent_at_A4", {{"A", 4.0}}, 333.0 / 320, expo(4.0), expo(4.0) <= 333.0 / 320 + 1e-15});
        double sup = 0.0;
        for (double A = 4.0; A <= 1e6; A *= 1.05) sup = std::max(sup, expo(A));
        out.push_back(upper("exponent_sup", {}, std::log(3.0), sup));
        out.push_back(upper("exp_1_05", {}, 2.9, std::exp(1.05)));
    }

    // Small-d barrier: b_1(6) = 169/2 - 22 sqrt(13) < 52/10 and the Delta
    // lower bound at n = 96 (it increases with n).
    {
        const double r13 = std::sqrt(13.0);
        const double b16 = 84.5 - 22 * r13;
        out.push_back(upper("b1_at_6", {}, 5.2, b16));
        const double n = 96;
        const double delta = (r13 - 2.5) * (r13 - 2.5) - 4 * b16 / n + 104 / (n * n);
        out.push_back(lower("delta_lower_bound", {{"n", n}}, 1.01, delta));
    }

    // phi_c thresholds and the location of the minima on each sub-interval.
    out.push_back(lower("phi_c", {{"lam", 7.0 / 8}, {"c", 0.6}}, 91.0 / 1090, phi_c_eval(7.0 / 8, 0.6)));
    out.push_back(lower("phi_c", {{"lam", 9.0 / 10}, {"c", 0.4}}, 0.1, phi_c_eval(9.0 / 10, 0.4)));
    out.push_back(lower("phi_c", {{"lam", 15.0 / 16}, {"c", 0.36}}, 0.091, phi_c_eval(15.0 / 16, 0.36)));
    for (auto [lo, hi, c] : {std::tuple{1.0 / 3, 7.0 / 8, 0.6}, {7.0 / 8, 0.9, 0.4}, {0.9, 15.0 / 16, 0.36}}) {
        double mn = INFINITY;
        for (int i = 0; i <= 200; ++i) mn = std::min(mn, phi_c_eval(lo + (hi - lo) * i / 200.0, c));
        out.push_back({"phi_c_min_at_right_end",
                       {{"lam_lo", lo}, {"lam_hi", hi}, {"c", c}},
                       phi_c_eval(hi, c),
                       mn,
                       mn >= phi_c_eval(hi, c)});
    }

    std::stable_sort(out.begin(), out.end(), [](const BoundCheck& a, const BoundCheck& b) { return a.name < b.name; });
    return out;
}

}  // namespace conelab
