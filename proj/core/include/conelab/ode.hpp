// Dormand-Prince 5(4) with embedded error control.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "conelab/error.hpp"

namespace conelab::ode {

struct Options {
    double rtol = 1e-11;
    double atol = 1e-13;
    double h0 = 0.0;        // 0 picks h = 1e-3 * span
    double h_max = 0.0;     // 0 means unbounded
    double h_min_rel = 1e-15;
    long max_steps = 2000000;
    // Use one scale (the largest component) for all components. Suits linear
    // systems whose components pass through zero.
    bool shared_scale = false;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
};

// Integrates y' = rhs(x, y) from x0 to x1 (x1 > x0). Calls on_step(x, y)
// after every accepted step; returning false stops early. max_step(x, y) may
// further cap the step (used by the shooting code to bound phase advance).
template <std::size_t N, class Rhs, class OnStep, class MaxStep>
Stats integrate(Rhs&& rhs, double x0, double x1, std::array<double, N>& y, const Options& opt,
                OnStep&& on_step, MaxStep&& max_step) {
    using V = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // error coefficients b - b*
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Stats st;
    const double span = x1 - x0;
    double h = opt.h0 > 0 ? opt.h0 : 1e-3 * span;
    double x = x0;
    V k1, k2, k3, k4, k5, k6, k7, yt, ynew;
    k1 = rhs(x, y);
    auto axpy = [](V& out, const V& base, double h, std::initializer_list<std::pair<double, const V*>> terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (auto& [c, v] : terms) s += c * (*v)[i];
            out[i] = base[i] + h * s;
        }
    };
    while (x < x1) {
        if (st.accepted + st.rejected > opt.max_steps)
            throw Error(ErrorCode::IntegrationFailure, "step budget exhausted");
        double hcap = x1 - x;
        if (opt.h_max > 0) hcap = std::min(hcap, opt.h_max);
        hcap = std::min(hcap, max_step(x, y));
        h = std::min(h, hcap);
        if (h <= opt.h_min_rel * std::max(std::abs(x), std::abs(span)))
            throw Error(ErrorCode::IntegrationFailure, "step size collapsed");
        axpy(yt, y, h, {{a21, &k1}});
        k2 = rhs(x + c2 * h, yt);
        axpy(yt, y, h, {{a31, &k1}, {a32, &k2}});
        k3 = rhs(x + c3 * h, yt);
        axpy(yt, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        k4 = rhs(x + c4 * h, yt);
        axpy(yt, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        k5 = rhs(x + c5 * h, yt);
        axpy(yt, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        const double xn = (h == x1 - x) ? x1 : x + h;
        k6 = rhs(xn, yt);
        axpy(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        k7 = rhs(xn, ynew);
        double err = 0.0;
        double shared = 0.0;
        if (opt.shared_scale)
            for (std::size_t i = 0; i < N; ++i)
                shared = std::max({shared, std::abs(y[i]), std::abs(ynew[i])});
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double mag = opt.shared_scale ? shared : std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double sc = opt.atol + opt.rtol * mag;
            err = std::max(err, std::abs(ei) / sc);
        }
        if (!std::isfinite(err)) {
            ++st.rejected;
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            ++st.accepted;
            x = xn;
            y = ynew;
            k1 = k7;  // FSAL
            if (!on_step(x, y)) return st;
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            ++st.rejected;
            h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
        }
    }
    return st;
}

template <std::size_t N, class Rhs>
Stats integrate(Rhs&& rhs, double x0, double x1, std::array<double, N>& y, const Options& opt) {
    return integrate<N>(
        rhs, x0, x1, y, opt, [](double, const std::array<double, N>&) { return true; },
        [](double, const std::array<double, N>&) { return 1e300; });
}

}  // namespace conelab::ode
