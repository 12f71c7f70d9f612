#include "conelab/cone.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace conelab {

ConeParams::ConeParams(int n_, int k_) : n(n_), k(k_) {
    if (n < 3 || k < 1 || k > n - 2)
        throw Error(ErrorCode::InvalidParams,
                    "need n >= 3 and 1 <= k <= n-2 (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Unstable: return "unstable";
        case Verdict::BorderlineStable: return "borderline_stable";
        case Verdict::StrictlyStable: return "strictly_stable";
    }
    return "unknown";
}

namespace {

HypParams g_params(const ConeParams& p, double alpha) {
    return HypParams(0.5 * (p.n + alpha - 2), -0.5 * alpha, 0.5 * p.k);
}

// Even k: the Euler equation for f has c = m + 1 with m = k/2 - 1, the
// exponents 0 and -m differ by an integer and the second solution carries a
// logarithm: C y1(s) log s + sum_j d_j s^{j-m}, d_0 = 1 and d_m = 0 (m >= 1),
// or C = 1 and d_0 = 0 when m = 0.
double odd_log_branch(const ConeParams& p, double s) {
    const double a = 0.5 * (p.n - 1), b = -0.5;
    const int m = p.k / 2 - 1;
    const double c = m + 1.0;
    std::vector<double> e{1.0};  // coefficients of y1
    auto e_at = [&](int j) {
        while (static_cast<int>(e.size()) <= j) {
            const int i = static_cast<int>(e.size());
            e.push_back(e.back() * (a + i - 1) * (b + i - 1) / ((c + i - 1) * i));
        }
        return e[j];
    };
    // L[y1 log s] = sum_j G_j s^{j-1}.
    auto G = [&](int j) { return (2.0 * j + m) * e_at(j) - (j == 0 ? 0.0 : (2.0 * j - 2 + a + b) * e_at(j - 1)); };
    double d = m == 0 ? 0.0 : 1.0, C = m == 0 ? 1.0 : 0.0;
    double sum = d, pw = 1.0;
    int quiet = 0;
    for (int i = 1; i < 200000; ++i) {
        const double prev = d * (i - 1 - m + a) * (i - 1 - m + b);
        if (i < m) {
            d = prev / (static_cast<double>(i) * (i - m));
        } else if (i == m) {
            C = prev / m;
            d = 0.0;
        } else {
            d = (prev - C * G(i - m)) / (static_cast<double>(i) * (i - m));
        }
        pw *= s;
        const double term = d * pw;
        sum += term;
        quiet = std::abs(term) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
        if (quiet >= 3 && i > m) break;
        if (i == 199999) throw Error(ErrorCode::NonConvergence, "odd solution series did not converge");
    }
    const double y1 = hyp2f1(HypParams(a, b, c), s).value;
    return C * y1 * std::log(s) + std::pow(s, -m) * sum;
}

}  // namespace

double profile_g(const ConeParams& p, double alpha, double t, const SeriesControl& ctrl) {
    if (!(t >= 0 && t < 1)) throw Error(ErrorCode::DomainError, "profile_g needs t in [0, 1)");
    if (alpha == 0.0) return 1.0;
    return hyp2f1(g_params(p, alpha), t * t, ctrl).value;
}

ProfileValue profile_g_with_deriv(const ConeParams& p, double alpha, double t, const SeriesControl& ctrl) {
    if (!(t >= 0 && t < 1)) throw Error(ErrorCode::DomainError, "profile_g needs t in [0, 1)");
    if (alpha == 0.0) return {1.0, 0.0};
    const auto v = hyp2f1_with_deriv(g_params(p, alpha), t * t, ctrl);
    return {v.f, 2 * t * v.df};
}

double profile_f_odd(const ConeParams& p, double t) {
    const double a = 0.5 * (p.n - p.k + 1), b = 0.5 * (1 - p.k), c = 2 - 0.5 * p.k;
    const double s = t * t;
    if (p.k % 2 == 0) return odd_log_branch(p, s);
    if (c > 0) return std::pow(t, 2 - p.k) * hyp2f1(HypParams(a, b, c), s).value;
    // Odd k >= 5: b is a non-positive integer and c + m never vanishes, so the
    // hypergeometric factor is a polynomial in s.
    double sum = 1.0, term = 1.0;
    for (int m = 0; b + m != 0.0; ++m) {
        term *= (a + m) * (b + m) / ((c + m) * (m + 1)) * s;
        sum += term;
    }
    return std::pow(t, 2 - p.k) * sum;
}

RootResult find_root(const ConeParams& p, const SeriesControl& ctrl) {
    // For d >= 2, f -> -inf as t -> 1 like (1-t^2)^{1-d/2} (log for d = 2).
    // At large d it leaves the double range well before t = 1; an overflowed
    // evaluation is then read as negative, which is all the bracketing needs.
    auto f = [&](double t) {
        double v;
        try {
            v = profile_f(p, t, ctrl);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonConvergence) throw;
            return -std::numeric_limits<double>::infinity();
        }
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    const double t_hi = std::min(std::sqrt(2.0 * p.k / (p.n - 1)), 1.0 - 1e-9);
    double hi = t_hi, fhi = f(hi);
    if (fhi > 0) throw Error(ErrorCode::BracketFailure, "f positive at the upper bracket end");
    double lo = hi, flo = fhi;
    constexpr int kScan = 32;
    for (int j = 1; j <= kScan; ++j) {
        lo = t_hi * (1.0 - static_cast<double>(j) / kScan);
        flo = lo == 0.0 ? 1.0 : f(lo);
        if (flo > 0) break;
        hi = lo;
        fhi = flo;
    }
    if (!(flo > 0)) throw Error(ErrorCode::BracketFailure, "no sign change of f found");
    const std::pair<double, double> bracket{lo, hi};
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (fm == 0.0) {
            lo = hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    // One Newton polish; keep it only if it stays in the bisection bracket.
    const auto pv = profile_g_with_deriv(p, 1.0, t, ctrl);
    if (pv.dg != 0.0) {
        const double tn = t - pv.g / pv.dg;
        if (tn >= lo - 1e-13 && tn <= hi + 1e-13 && std::abs(f(tn)) <= std::abs(pv.g)) t = tn;
    }
    return {t, t * t, bracket, std::abs(f(t))};
}

double normalization_c(const ConeParams& p, const RootResult& r, const SeriesControl& ctrl) {
    const auto pv = profile_g_with_deriv(p, 1.0, r.t_nk, ctrl);
    return 1.0 / (std::sqrt(1.0 - r.s_nk) * std::abs(pv.dg));
}

BoundaryTerms boundary_rhs(const ConeParams& p, const RootResult& r) {
    const double t = r.t_nk;
    const double num = (p.n - 2) * t - (p.k - 1) / t;
    return {num / std::sqrt(1.0 - t * t), num / (1.0 - t * t)};
}

double stability_margin(const ConeParams& p, double alpha, const RootResult& r, const SeriesControl& ctrl) {
    const auto pv = profile_g_with_deriv(p, alpha, r.t_nk, ctrl);
    if (!(pv.g > 0))
        throw Error(ErrorCode::PoleEncountered, "g_alpha is not positive at t_{n,k}");
    return pv.dg / pv.g - boundary_rhs(p, r).rhs;
}

std::optional<Interval> admissible_interval(const ConeParams& p, const RootResult& r, const SeriesControl& ctrl) {
    const double mid = 0.5 * (2 - p.n);
    if (!(stability_margin(p, mid, r, ctrl) > 0)) return std::nullopt;
    // margin > 0 at the midpoint and margin = -rhs < 0 at alpha = 0.
    double lo = mid, hi = 0.0;
    while (hi - lo > 1e-14) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        if (stability_margin(p, m, r, ctrl) > 0) {
            lo = m;
        } else {
            hi = m;
        }
    }
    const double a_hi = 0.5 * (lo + hi);
    return Interval{2.0 - p.n - a_hi, a_hi};
}

std::optional<Interval> admissible_interval(const ConeParams& p, const SeriesControl& ctrl) {
    return admissible_interval(p, find_root(p, ctrl), ctrl);
}

StabilityReport verdict(const ConeParams& p, const SeriesControl& ctrl) {
    const auto r = find_root(p, ctrl);
    const auto bt = boundary_rhs(p, r);
    const double alpha = 0.5 * (2 - p.n);
    const auto pv = profile_g_with_deriv(p, alpha, r.t_nk, ctrl);
    const double lhs = pv.dg / pv.g;
    const double margin = lhs - bt.rhs;
    Verdict v = Verdict::BorderlineStable;
    if (margin > kBorderlineBand) v = Verdict::StrictlyStable;
    if (margin < -kBorderlineBand) v = Verdict::Unstable;
    StabilityReport rep{r.t_nk, normalization_c(p, r, ctrl), bt.link_H, lhs, bt.rhs, margin, v, std::nullopt};
    if (v == Verdict::StrictlyStable) rep.admissible = admissible_interval(p, r, ctrl);
    return rep;
}

double eval_homogeneous(const ConeParams& p, double alpha, double scale, double rho, double t,
                        const SeriesControl& ctrl) {
    if (!(rho > 0)) throw Error(ErrorCode::DomainError, "rho must be positive");
    return scale * std::pow(rho, alpha) * profile_g(p, alpha, t, ctrl);
}

}  // namespace conelab
