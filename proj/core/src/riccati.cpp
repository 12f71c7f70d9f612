#include "conelab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conelab {

namespace {

constexpr double kOdeEnd = 1.0 - 1e-6;
constexpr double kLaunch = 1e-4;
constexpr int kLaunchTerms = 16;

double kd(const ConeParams& p) { return static_cast<double>(p.k); }
double nd(const ConeParams& p) { return static_cast<double>(p.n); }

// P_k at alpha = 4-n: (k-1) + (8-n-2k) s + 2(n-4) s^2.
struct Quad {
    double c0, c1, c2;
    double operator()(double s) const { return c0 + s * (c1 + s * c2); }
    // P(s) - P(r) without cancellation.
    double diff(double s, double r) const { return (s - r) * (c1 + c2 * (s + r)); }
};

Quad P4(const ConeParams& p) {
    return {kd(p) - 1, 8 - nd(p) - 2 * kd(p), 2 * (nd(p) - 4)};
}

double eval_series(const std::vector<double>& l, double s) {
    double v = 0.0;
    for (auto it = l.rbegin(); it != l.rend(); ++it) v = v * s + *it;
    return v;
}

}  // namespace

const char* to_string(BarrierVariant v) noexcept {
    switch (v) {
        case BarrierVariant::LinearOnly: return "LinearOnly";
        case BarrierVariant::LargeD: return "LargeD";
        case BarrierVariant::SmallD: return "SmallD";
    }
    return "Unknown";
}

double P_poly(const ConeParams& p, double ah, double s) {
    return (nd(p) - 2 * kd(p)) * s + ah * s * (1 - s) + (kd(p) - 1);
}

std::vector<double> P_roots_in_unit(const ConeParams& p, double ah) {
    // -ah s^2 + (n - 2k + ah) s + (k-1)
    const double a2 = -ah, a1 = nd(p) - 2 * kd(p) + ah, a0 = kd(p) - 1;
    std::vector<double> out;
    auto keep = [&](double r) {
        if (r > 0 && r < 1) out.push_back(r);
    };
    if (a2 == 0.0) {
        if (a1 != 0.0) keep(-a0 / a1);
        return out;
    }
    const double disc = a1 * a1 - 4 * a2 * a0;
    if (disc < 0) return out;
    const double sq = std::sqrt(disc);
    const double qv = -0.5 * (a1 + std::copysign(sq, a1));
    if (qv != 0.0) {
        keep(qv / a2);
        keep(a0 / qv);
    } else {
        keep(0.0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double L_direct(const ConeParams& p, double alpha, double s, const SeriesControl& ctrl) {
    if (!(s >= 0 && s < 1)) throw Error(ErrorCode::DomainError, "L needs s in [0, 1)");
    if (s == 0.0) return kd(p) - 1;
    const HypParams hp(0.5 * (p.n + alpha - 2), -0.5 * alpha, 0.5 * p.k);
    const auto v = hyp2f1_with_deriv(hp, s, ctrl);
    if (!(v.f > 0)) throw Error(ErrorCode::PoleEncountered, "g vanishes before s");
    return 2 * s * (1 - s) * v.df / v.f - (nd(p) - 2) * s + (kd(p) - 1);
}

std::vector<double> L_taylor(const ConeParams& p, double ah, int count) {
    // l_j (2j+k-2) = -[sum_{i=1}^{j-1} l_i l_{j-i} - 2(j-1) l_{j-1} + n l_{j-1} + P_j]
    const double P[3] = {kd(p) - 1, nd(p) - 2 * kd(p) + ah, -ah};
    std::vector<double> l(count, 0.0);
    l[0] = kd(p) - 1;
    for (int j = 1; j < count; ++j) {
        double acc = 0.0;
        for (int i = 1; i < j; ++i) acc += l[i] * l[j - i];
        acc += (nd(p) - 2 * (j - 1)) * l[j - 1];
        if (j < 3) acc += P[j];
        l[j] = -acc / (2 * j + kd(p) - 2);
    }
    return l;
}

std::vector<double> L_ode(const ConeParams& p, double alpha, const std::vector<double>& s_values,
                          const ode::Options& opt) {
    const double ah = alpha_hat(p, alpha);
    const auto l = L_taylor(p, ah, kLaunchTerms);
    std::vector<double> out;
    out.reserve(s_values.size());
    auto rhs = [&](double s, const std::array<double, 1>& y) {
        const double L = y[0];
        return std::array<double, 1>{-(L * L + (nd(p) * s - kd(p)) * L + P_poly(p, ah, s)) / (2 * s * (1 - s))};
    };
    // Shrink the launch point until the truncated series tail is negligible;
    // for large n, L can have a pole at small negative s.
    double s_launch = kLaunch;
    for (int it = 0; it < 12; ++it) {
        const double t1 = std::abs(l[kLaunchTerms - 1]) * std::pow(s_launch, kLaunchTerms - 1);
        const double t2 = std::abs(l[kLaunchTerms - 2]) * std::pow(s_launch, kLaunchTerms - 2);
        if (t1 + t2 <= 1e-16 * (1 + std::abs(l[0]))) break;
        s_launch *= 0.3;
    }
    std::array<double, 1> y{eval_series(l, s_launch)};
    double s_cur = s_launch;
    ode::Options o = opt;
    for (double s : s_values) {
        if (s > kOdeEnd) throw Error(ErrorCode::DomainError, "OdeIntegrate stops at s = 1 - 1e-6");
        if (s <= s_launch) {
            out.push_back(eval_series(l, s));
            continue;
        }
        if (s < s_cur) throw Error(ErrorCode::DomainError, "s_values must be ascending");
        if (s > s_cur) {
            ode::integrate<1>(
                rhs, s_cur, s, y, o,
                [&](double, const std::array<double, 1>& yy) {
                    if (!std::isfinite(yy[0]) || std::abs(yy[0]) > 1e12)
                        throw Error(ErrorCode::PoleEncountered, "L blows up during integration");
                    return true;
                },
                [&](double x, const std::array<double, 1>&) { return 0.5 * (1 - x); });
            s_cur = s;
        }
        out.push_back(y[0]);
    }
    return out;
}

double L_eval(const ConeParams& p, double alpha, double s, LMode mode) {
    if (mode == LMode::OdeIntegrate) return L_ode(p, alpha, {s}).front();
    return L_direct(p, alpha, s);
}

RiccatiTrace L_cross_check(const ConeParams& p, double alpha, const std::vector<double>& grid) {
    RiccatiTrace tr{alpha_hat(p, alpha), grid, {}, {}, 0.0};
    tr.values_direct.reserve(grid.size());
    for (double s : grid) tr.values_direct.push_back(L_direct(p, alpha, s));
    tr.values_ode = L_ode(p, alpha, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        tr.max_discrepancy = std::max(tr.max_discrepancy, std::abs(tr.values_direct[i] - tr.values_ode[i]));
    return tr;
}

double Barrier::left_limit_at_knot() const noexcept { return 4.0 * p_.k / p_.n - 1.0; }

double Barrier::operator()(double s) const {
    if (s < knot() || spec_.variant == BarrierVariant::LinearOnly) return (kd(p_) - 1) - (nd(p_) - 4) * s;
    const double qe = std::pow(spec_.q_coeff * (1 - s) / s, spec_.exponent);
    if (spec_.variant == BarrierVariant::LargeD) {
        const double am1 = spec_.A - 1;
        return am1 * (qe - 1) / (am1 - qe);
    }
    const auto [rm, rp] = *spec_.roots;
    return rp * rm * (qe - 1) / (rp * qe - rm);
}

double Barrier::derivative(double s) const {
    if (s < knot() || spec_.variant == BarrierVariant::LinearOnly) return -(nd(p_) - 4);
    const double ph = (*this)(s);
    return -(ph * ph + spec_.B * ph + spec_.C) / (2 * s * (1 - s));
}

double Barrier::residual(double s) const {
    const Quad P = P4(p_);
    const double ph = (*this)(s);
    if (s < knot() || spec_.variant == BarrierVariant::LinearOnly) {
        return 2 * s * (1 - s) * derivative(s) + ph * ph + (nd(p_) * s - kd(p_)) * ph + P(s);
    }
    // The closed form solves the frozen-coefficient equation exactly, so
    // R[phi] = (ns - k - B) phi + P(s) - C.
    return (nd(p_) * s - kd(p_) - spec_.B) * ph + P.diff(s, spec_.s_star) + (P(spec_.s_star) - spec_.C);
}

Barrier barrier_phi(const ConeParams& p) {
    const int d = p.d();
    if (d <= 5) throw Error(ErrorCode::VariantUnavailable, "barrier needs d = n-k >= 6 (linear barrier only)");
    const double sq = std::sqrt(2.0 * d + 1);
    const double A = sq - 1;
    const Quad P = P4(p);
    BarrierSpec sp{};
    sp.A = A;
    if (d >= 12) {
        sp.variant = BarrierVariant::LargeD;
        sp.s_star = 1.0 - (d + 1 - sq) / nd(p);
        sp.exponent = 0.5 * (sq - 3);
        sp.B = A;
        sp.C = A - 1;
        sp.roots = std::make_pair(-(A - 1), -1.0);
    } else {
        sp.variant = BarrierVariant::SmallD;
        sp.s_star = 1.0 - (A * A - 1) / (2 * nd(p));
        const double Ps = P(sp.s_star);
        const double delta = (A + 0.5) * (A + 0.5) - 4 * Ps;
        sp.delta = delta;
        if (!(delta > 1)) throw Error(ErrorCode::VariantUnavailable, "discriminant Delta <= 1");
        const double rd = std::sqrt(delta);
        sp.roots = std::make_pair(0.5 * (-(A + 0.5) - rd), 0.5 * (-(A + 0.5) + rd));
        sp.exponent = 0.5 * rd;
        sp.B = nd(p) * sp.s_star - kd(p);
        sp.C = Ps;
    }
    sp.q_coeff = sp.s_star / (1 - sp.s_star);
    return Barrier(p, sp);
}

BarrierReport verify_barrier(const ConeParams& p, int grid_size) {
    const Barrier phi = barrier_phi(p);
    const auto& sp = phi.spec();
    const double kn = phi.knot(), ss = sp.s_star;
    const double alpha = 4.0 - p.n;
    BarrierReport r{};
    r.variant = sp.variant;
    r.s_star = ss;
    r.delta = sp.delta;
    r.max_R_lower = -INFINITY;
    r.max_R_upper = -INFINITY;
    r.min_L_minus_phi = INFINITY;
    // Chebyshev nodes of the first kind: interior points clustered at both ends.
    auto cheb = [&](double a, double b, int j) {
        const double x = std::cos(std::numbers::pi * (2.0 * j + 1) / (2.0 * grid_size));
        return 0.5 * (a + b) - 0.5 * (b - a) * x;
    };
    for (int j = 0; j < grid_size; ++j) {
        const double s = cheb(0.0, kn, j);
        r.max_R_lower = std::max(r.max_R_lower, phi.residual(s));
        r.min_L_minus_phi = std::min(r.min_L_minus_phi, L_direct(p, alpha, s) - phi(s));
    }
    for (int j = 0; j < grid_size; ++j) {
        const double s = cheb(kn, ss, j);
        r.max_R_upper = std::max(r.max_R_upper, phi.residual(s));
        r.min_L_minus_phi = std::min(r.min_L_minus_phi, L_direct(p, alpha, s) - phi(s));
    }
    r.left_limit = phi.left_limit_at_knot();
    r.value_at_knot = phi(kn);
    r.jump_decreasing = r.value_at_knot < r.left_limit;
    r.L_at_s_star = L_direct(p, alpha, ss);
    r.min_L_minus_phi = std::min({r.min_L_minus_phi, L_direct(p, alpha, kn) - r.value_at_knot, r.L_at_s_star});
    r.R_ok = r.max_R_lower < 0 && r.max_R_upper < 0;
    r.comparison_ok = r.min_L_minus_phi >= -kComparisonSlack;
    r.passed = r.R_ok && r.jump_decreasing && r.comparison_ok && r.L_at_s_star > 0;
    return r;
}

Check4 check_4_minus_n(const ConeParams& p, const RootResult& r, const SeriesControl& ctrl) {
    if (p.n < 5) throw Error(ErrorCode::RangeUnsupported, "alpha = 4-n lies in (2-n, 0) only for n >= 5");
    const double m = L_direct(p, 4.0 - p.n, r.s_nk, ctrl);
    return {m > 0, m};
}

Check4 check_4_minus_n(const ConeParams& p, const SeriesControl& ctrl) {
    return check_4_minus_n(p, find_root(p, ctrl), ctrl);
}

}  // namespace conelab
