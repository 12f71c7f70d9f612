#include "conelab/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "conelab/quad.hpp"

namespace conelab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpos_int(double x) { return x <= 0.0 && x == std::floor(x); }

// Distance from x to the nearest integer.
double int_dist(double x) { return std::abs(x - std::nearbyint(x)); }

// log|Gamma(x)| and sign(Gamma(x)), x not a non-positive integer.
double lgamma_sign(double x, int& sign) {
    if (x > 0) {
        sign = 1;
    } else {
        sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
    }
    return std::lgamma(x);
}

// prod Gamma(num) / prod Gamma(den). Denominator poles give 0. err_rel
// accumulates the conditioning of exp() of the lgamma sum.
template <std::size_t N, std::size_t M>
double gamma_ratio(const std::array<double, N>& num, const std::array<double, M>& den, double& err_rel) {
    double lg = 0.0, mag = 0.0;
    int sign = 1;
    for (double x : den)
        if (is_nonpos_int(x)) {
            err_rel = 0.0;
            return 0.0;
        }
    for (double x : num) {
        if (is_nonpos_int(x)) throw Error(ErrorCode::DomainError, "gamma pole in numerator");
        int s;
        const double l = lgamma_sign(x, s);
        lg += l;
        mag += std::abs(l);
        sign *= s;
    }
    for (double x : den) {
        int s;
        const double l = lgamma_sign(x, s);
        lg -= l;
        mag += std::abs(l);
        sign *= s;
    }
    err_rel = 4 * kEps * (1.0 + mag);
    return sign * std::exp(lg);
}

struct SeriesOut {
    double value;
    double err;
    int terms;
};

// Plain Gauss series with Kahan summation. Terminates exactly when a or b is
// a non-positive integer.
SeriesOut raw_series(double a, double b, double c, double z, const SeriesControl& ctrl) {
    double sum = 1.0, comp = 0.0, abs_sum = 1.0, term = 1.0;
    int small_run = 0;
    for (int m = 0; m < ctrl.max_terms; ++m) {
        const double cm = c + m;
        const double num = (a + m) * (b + m);
        if (num == 0.0) return {sum, 4 * kEps * abs_sum, m + 1};
        if (cm == 0.0) throw Error(ErrorCode::DomainError, "series hits c + m = 0");
        const double ratio = num / (cm * (m + 1)) * z;
        term *= ratio;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_sum += std::abs(term);
        const double r = std::abs(ratio);
        const double tail = r < 1.0 ? std::abs(term) * r / (1.0 - r) : std::abs(term);
        const double tol = std::max({ctrl.rel_tol * std::abs(sum), 2 * kEps * abs_sum, ctrl.abs_tol});
        if (r < 1.0 && tail <= tol) {
            if (++small_run >= 2) return {sum, tail + 4 * kEps * abs_sum, m + 2};
        } else {
            small_run = 0;
        }
    }
    throw Error(ErrorCode::NonConvergence, "hypergeometric series exceeded max_terms");
}

// Result of continuing Euler's ODE from the switch point.
struct OdeOut {
    double f, df, err;
    int terms;
};

// Taylor re-expansion of Euler's equation. With x = s - s0 and F = sum u_j x^j:
//   A0 (j+1)(j+2) u_{j+2} = (j+a)(j+b) u_j - (j+1)(A1 j + B0) u_{j+1},
// A0 = s0(1-s0), A1 = 1-2 s0, B0 = c-(a+b+1) s0. We carry v_j = u_j h^j to
// keep the recurrence in range. The step is halved until the local series
// converges without heavy cancellation.
OdeOut ode_continue(double a, double b, double c, double s_target, const SeriesControl& ctrl) {
    double s0 = std::min(ctrl.switch_point, s_target);
    auto f0 = raw_series(a, b, c, s0, ctrl);
    auto d0 = raw_series(a + 1, b + 1, c + 1, s0, ctrl);
    double F = f0.value, D = a * b / c * d0.value;
    double rel_err = (f0.err / std::max(std::abs(F), 1e-300)) + (d0.err / std::max(std::abs(d0.value), 1e-300));
    rel_err = std::min(rel_err, 1e-6);
    int terms = f0.terms + d0.terms;
    double h = (1.0 - s0) / 2;
    constexpr int kMaxLocal = 600;
    int steps = 0;
    double last_scale = std::max(std::abs(F), std::abs(D) * h);
    while (s0 < s_target) {
        if (++steps > 100000) throw Error(ErrorCode::NonConvergence, "ODE continuation step budget");
        const double radius = std::min(s0, 1.0 - s0);
        h = std::min({h, 0.5 * radius, s_target - s0});
        bool done = false;
        for (int attempt = 0; attempt < 60 && !done; ++attempt) {
            const double A0 = s0 * (1 - s0), A1 = 1 - 2 * s0, B0 = c - (a + b + 1) * s0;
            double vm = F, vn = D * h;  // v_j, v_{j+1}
            double sF = vm + vn, sD = vn / h, absF = std::abs(vm) + std::abs(vn);
            int small = 0, j = 0;
            bool conv = false;
            for (; j < kMaxLocal; ++j) {
                const double v2 = ((j + a) * (j + b) * vm * h * h - (j + 1) * (A1 * j + B0) * vn * h) /
                                  (A0 * (j + 1) * (j + 2));
                sF += v2;
                sD += (j + 2) * v2 / h;
                absF += std::abs(v2);
                vm = vn;
                vn = v2;
                const double scale = std::max({std::abs(sF), std::abs(sD) * h, std::abs(F), std::abs(D) * h});
                if (std::abs(v2) * (j + 3) <= 0.5 * kEps * scale) {
                    if (++small >= 3) {
                        conv = true;
                        break;
                    }
                } else {
                    small = 0;
                }
                if (!std::isfinite(v2)) break;
            }
            const double scale = std::max({std::abs(sF), std::abs(sD) * h, std::abs(F), std::abs(D) * h});
            if (conv && absF <= 64.0 * scale) {
                rel_err += 2 * kEps * absF / scale;
                last_scale = scale;
                F = sF;
                D = sD;
                s0 = (h == s_target - s0) ? s_target : s0 + h;
                terms += j + 2;
                done = true;
                if (j < 20) h *= 2.0;
            } else {
                h *= 0.5;
                if (h < 1e-14) throw Error(ErrorCode::NonConvergence, "ODE continuation step underflow");
            }
        }
        if (!done) throw Error(ErrorCode::NonConvergence, "ODE continuation failed to converge");
    }
    return {F, D, rel_err * std::max(std::abs(F), last_scale), terms};
}

EvalResult evaluate(double a, double b, double c, double s, const SeriesControl& ctrl);

EvalResult via_ode(double a, double b, double c, double s, const SeriesControl& ctrl) {
    auto o = ode_continue(a, b, c, s, ctrl);
    return {o.f, o.err, std::min(o.terms, ctrl.max_terms), Strategy::OdeContinuation};
}

EvalResult evaluate(double a, double b, double c, double s, const SeriesControl& ctrl) {
    if (!(s > -1.0 && s <= 1.0)) throw Error(ErrorCode::DomainError, "argument outside (-1, 1]");
    if (s == 0.0) return {1.0, 0.0, 1, Strategy::DirectSeries};
    const double cab = c - a - b;

    // Polynomial cases.
    if (is_nonpos_int(a) || is_nonpos_int(b)) {
        auto r = raw_series(a, b, c, s, ctrl);
        return {r.value, r.err, r.terms, Strategy::DirectSeries};
    }
    if (is_nonpos_int(c - a) || is_nonpos_int(c - b)) {
        auto r = raw_series(c - a, c - b, c, s, ctrl);
        if (s == 1.0) {
            if (cab <= 0) throw Error(ErrorCode::DomainError, "s = 1 requires c - a - b > 0");
            return {0.0, 0.0, r.terms, Strategy::EulerTransform};
        }
        // The polynomial alternates for s > 0 and large degree; fall through
        // to the general cascade when it cancels badly.
        if (r.err <= 1e-13 * std::abs(r.value)) {
            const double pre = std::pow(1.0 - s, cab);
            return {pre * r.value, std::abs(pre) * r.err, r.terms, Strategy::EulerTransform};
        }
    }

    if (s < -0.5) {
        // Pfaff: F(a,b;c;s) = (1-s)^{-a} F(a, c-b; c; s/(s-1)).
        auto r = raw_series(a, c - b, c, s / (s - 1.0), ctrl);
        const double pre = std::pow(1.0 - s, -a);
        return {pre * r.value, std::abs(pre) * r.err, r.terms, Strategy::EulerTransform};
    }
    if (s <= ctrl.switch_point) {
        auto r = raw_series(a, b, c, s, ctrl);
        return {r.value, r.err, r.terms, Strategy::DirectSeries};
    }
    if (s == 1.0) {
        if (cab <= 0) throw Error(ErrorCode::DomainError, "s = 1 requires c - a - b > 0");
        double er;
        const double v = gamma_ratio<2, 2>({c, cab}, {c - a, c - b}, er);
        return {v, std::abs(v) * er, 0, Strategy::ConnectionAt1};
    }

    const double tol = std::max(ctrl.rel_tol, 1e-13);
    if (int_dist(cab) > 0.05) {
        // Connection to the singular point s = 1.
        const double w = 1.0 - s;
        double e1, e2;
        const double g1 = gamma_ratio<2, 2>({c, cab}, {c - a, c - b}, e1);
        const double g2 = gamma_ratio<2, 2>({c, -cab}, {a, b}, e2);
        auto f1 = raw_series(a, b, 1.0 - cab, w, ctrl);
        auto f2 = raw_series(c - a, c - b, 1.0 + cab, w, ctrl);
        const double pre = std::pow(w, cab);
        const double t1 = g1 * f1.value, t2 = pre * g2 * f2.value;
        const double v = t1 + t2;
        const double mag = std::abs(t1) + std::abs(t2);
        const double err = std::abs(t1) * e1 + std::abs(t2) * e2 + std::abs(g1) * f1.err +
                           std::abs(pre * g2) * f2.err + 4 * kEps * mag;
        if (mag <= 1e3 * std::abs(v) && err <= tol * std::abs(v))
            return {v, err, f1.terms + f2.terms, Strategy::ConnectionAt1};
    }
    return via_ode(a, b, c, s, ctrl);
}

}  // namespace

const char* to_string(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::PoleError: return "PoleError";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::BracketExhausted: return "BracketExhausted";
        case ErrorCode::IntegrationFailure: return "IntegrationFailure";
        case ErrorCode::PoleEncountered: return "PoleEncountered";
        case ErrorCode::VariantUnavailable: return "VariantUnavailable";
        case ErrorCode::RangeUnsupported: return "RangeUnsupported";
        case ErrorCode::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

const char* to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::DirectSeries: return "DirectSeries";
        case Strategy::EulerTransform: return "EulerTransform";
        case Strategy::ConnectionAt1: return "ConnectionAt1";
        case Strategy::IntegralRep: return "IntegralRep";
        case Strategy::OdeContinuation: return "OdeContinuation";
    }
    return "Unknown";
}

void SeriesControl::validate() const {
    if (!(rel_tol > 0 && rel_tol < 1e-3)) throw Error(ErrorCode::DomainError, "rel_tol must lie in (0, 1e-3)");
    if (max_terms < 64) throw Error(ErrorCode::DomainError, "max_terms must be >= 64");
    if (!(switch_point > 0 && switch_point < 1)) throw Error(ErrorCode::DomainError, "switch_point must lie in (0, 1)");
    if (!(abs_tol >= 0)) throw Error(ErrorCode::DomainError, "abs_tol must be non-negative");
}

HypParams::HypParams(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!(c > 0)) throw Error(ErrorCode::DomainError, "HypParams requires c > 0");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw Error(ErrorCode::DomainError, "HypParams requires finite parameters");
}

double pochhammer(double q, unsigned m) {
    if (m == 0) return 1.0;
    if (m < 150) {
        double p = 1.0;
        for (unsigned i = 0; i < m; ++i) p *= q + i;
        return p;
    }
    if (is_nonpos_int(q) && -q < m) return 0.0;
    if (is_nonpos_int(q + m)) {
        // Only reachable when q is a non-positive integer handled above.
        return 0.0;
    }
    int s1, s2;
    const double l = lgamma_sign(q + m, s1) - lgamma_sign(q, s2);
    return s1 * s2 * std::exp(l);
}

double digamma(double x) {
    if (is_nonpos_int(x)) throw Error(ErrorCode::PoleError, "digamma pole at non-positive integer");
    if (x < 0) {
        // psi(x) = psi(1-x) - pi cot(pi x); reduce the angle first.
        const double fr = x - std::floor(x);
        return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * fr);
    }
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    // Bernoulli tail: B_{2k} / (2k x^{2k}).
    const double tail =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return acc + std::log(x) - 0.5 / x - tail;
}

EvalResult hyp2f1(const HypParams& p, double s, const SeriesControl& ctrl) {
    ctrl.validate();
    return evaluate(p.a(), p.b(), p.c(), s, ctrl);
}

ValueDeriv hyp2f1_with_deriv(const HypParams& p, double s, const SeriesControl& ctrl) {
    ctrl.validate();
    const double a = p.a(), b = p.b(), c = p.c();
    const bool poly = is_nonpos_int(a) || is_nonpos_int(b) || is_nonpos_int(c - a) || is_nonpos_int(c - b);
    if (s > ctrl.switch_point && s < 1.0 && !poly && int_dist(c - a - b) <= 0.05) {
        auto o = ode_continue(a, b, c, s, ctrl);
        return {o.f, o.df, o.err, Strategy::OdeContinuation};
    }
    if (s > ctrl.switch_point && s < 1.0) {
        const auto f = evaluate(a, b, c, s, ctrl);
        if (f.strategy == Strategy::OdeContinuation) {
            auto o = ode_continue(a, b, c, s, ctrl);
            return {o.f, o.df, o.err, Strategy::OdeContinuation};
        }
        const auto d = evaluate(a + 1, b + 1, c + 1, s, ctrl);
        return {f.value, a * b / c * d.value, f.err_estimate, f.strategy};
    }
    const auto f = evaluate(a, b, c, s, ctrl);
    const double fac = a * b / c;
    if (fac == 0.0) return {f.value, 0.0, f.err_estimate, f.strategy};
    const auto d = evaluate(a + 1, b + 1, c + 1, s, ctrl);
    return {f.value, fac * d.value, f.err_estimate, f.strategy};
}

EvalResult hyp2f1_deriv(const HypParams& p, double s, unsigned m, const SeriesControl& ctrl) {
    ctrl.validate();
    if (m == 0) return hyp2f1(p, s, ctrl);
    const double fac = pochhammer(p.a(), m) * pochhammer(p.b(), m) / pochhammer(p.c(), m);
    if (fac == 0.0) return {0.0, 0.0, 0, Strategy::DirectSeries};
    auto r = evaluate(p.a() + m, p.b() + m, p.c() + m, s, ctrl);
    r.value *= fac;
    r.err_estimate *= std::abs(fac);
    return r;
}

EvalResult hyp2f1_integral(const HypParams& p, double s, double quad_tol) {
    const double a = p.a(), b = p.b(), c = p.c();
    if (!(c > b && b > 0)) throw Error(ErrorCode::DomainError, "integral representation needs c > b > 0");
    if (!(s < 1.0)) throw Error(ErrorCode::DomainError, "integral representation needs s < 1");
    const double beta = c - b;
    const double lognorm = std::lgamma(c) - std::lgamma(b) - std::lgamma(beta);
    auto kernel = [a, s](double tau) { return std::pow(1.0 - tau * s, -a); };

    // Left half: tau = u^{1/b} absorbs tau^{b-1} when b < 1.
    quad::Result left, right;
    if (b < 1.0) {
        const double ub = std::pow(0.5, b);
        left = quad::integrate(
            [&](double u) {
                const double tau = std::pow(u, 1.0 / b);
                return std::pow(1.0 - tau, beta - 1.0) * kernel(tau) / b;
            },
            0.0, ub, 0.0, quad_tol * 0.25);
    } else {
        left = quad::integrate(
            [&](double tau) { return std::pow(tau, b - 1.0) * std::pow(1.0 - tau, beta - 1.0) * kernel(tau); },
            0.0, 0.5, 0.0, quad_tol * 0.25);
    }
    // Right half: 1 - tau = v^{1/beta} absorbs (1-tau)^{beta-1} when beta < 1.
    if (beta < 1.0) {
        const double vb = std::pow(0.5, beta);
        right = quad::integrate(
            [&](double v) {
                const double tau = 1.0 - std::pow(v, 1.0 / beta);
                return std::pow(tau, b - 1.0) * kernel(tau) / beta;
            },
            0.0, vb, 0.0, quad_tol * 0.25);
    } else {
        right = quad::integrate(
            [&](double tau) { return std::pow(tau, b - 1.0) * std::pow(1.0 - tau, beta - 1.0) * kernel(tau); },
            0.5, 1.0, 0.0, quad_tol * 0.25);
    }
    const double norm = std::exp(lognorm);
    const double v = norm * (left.value + right.value);
    const double err = norm * (left.err + right.err) + 8 * kEps * (1 + std::abs(lognorm)) * std::abs(v);
    return {v, err, left.evaluations + right.evaluations, Strategy::IntegralRep};
}

double mills_ratio(double x) {
    if (x < 0) throw Error(ErrorCode::DomainError, "mills_ratio expects x >= 0");
    if (x < 6.0) return std::sqrt(std::numbers::pi / 2) * std::exp(0.5 * x * x) * std::erfc(x / std::numbers::sqrt2);
    // R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
    double t = x;
    for (int j = 80; j >= 1; --j) t = x + j / t;
    return 1.0 / t;
}

double gaussian_tail(double c_upper, double variance) {
    if (!(variance > 0)) throw Error(ErrorCode::DomainError, "variance must be positive");
    const double sd = std::sqrt(variance);
    if (std::isinf(c_upper)) return c_upper > 0 ? std::sqrt(2 * std::numbers::pi * variance) : 0.0;
    const double x = c_upper / sd;
    if (x < -6.0) {
        // Far left tail: exp(-x^2/2) R(|x|), kept in product form.
        return sd * std::exp(-0.5 * x * x) * mills_ratio(-x);
    }
    return std::sqrt(std::numbers::pi * variance / 2) * std::erfc(-x / std::numbers::sqrt2);
}

double laplace_quad(double rho, int power, bool half_weight) {
    if (!(rho > 0)) throw Error(ErrorCode::DomainError, "rho must be positive");
    if (power != 1 && power != 2) throw Error(ErrorCode::DomainError, "power must be 1 or 2");
    auto body = [=](double tau) { return std::exp(-0.5 * tau) * std::pow(tau + rho, -power); };
    constexpr double tol = 1e-14;
    quad::Result head;
    if (half_weight) {
        // tau = w^2 removes the tau^{-1/2} endpoint singularity.
        head = quad::integrate([&](double w) { return 2.0 * body(w * w); }, 0.0, 1.0, 0.0, tol);
    } else {
        head = quad::integrate(body, 0.0, 1.0, 0.0, tol);
    }
    // tau = 1 + u/(1-u) on the tail, u in [0, 1).
    auto tail = quad::integrate(
        [&](double u) {
            if (u >= 1.0) return 0.0;
            const double om = 1.0 - u;
            const double tau = 1.0 + u / om;
            const double w = half_weight ? 1.0 / std::sqrt(tau) : 1.0;
            return body(tau) * w / (om * om);
        },
        0.0, 1.0, 0.0, tol);
    return head.value + tail.value;
}

}  // namespace conelab
