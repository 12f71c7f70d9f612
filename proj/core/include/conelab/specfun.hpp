// Gauss hypergeometric function and the gamma-family helpers used by the
// cone computations. Everything is binary64; see hyp2f1() for the strategy
// selection.
#pragma once

#include <cstdint>

#include "conelab/error.hpp"

namespace conelab {

struct SeriesControl {
    double rel_tol = 1e-15;
    double abs_tol = 1e-300;
    int max_terms = 20000;
    double switch_point = 0.5;

    // Throws DomainError when the invariants do not hold.
    void validate() const;
};

enum class Strategy { DirectSeries, EulerTransform, ConnectionAt1, IntegralRep, OdeContinuation };

const char* to_string(Strategy s) noexcept;

struct EvalResult {
    double value = 0.0;
    double err_estimate = 0.0;
    int terms_used = 0;
    Strategy strategy = Strategy::DirectSeries;
};

class HypParams {
public:
    HypParams(double a, double b, double c);
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }

private:
    double a_, b_, c_;
};

// Rising factorial (q)_m. Large m goes through lgamma with sign tracking.
double pochhammer(double q, unsigned m);

// psi(x). Throws PoleError at non-positive integers.
double digamma(double x);

// 2F1(a,b;c;s) for s in (-1, 1].
EvalResult hyp2f1(const HypParams& p, double s, const SeriesControl& ctrl = {});

// Value and first s-derivative together; cheaper than two calls when the
// evaluation goes through ODE continuation.
struct ValueDeriv {
    double f = 0.0;
    double df = 0.0;
    double err_estimate = 0.0;
    Strategy strategy = Strategy::DirectSeries;
};
ValueDeriv hyp2f1_with_deriv(const HypParams& p, double s, const SeriesControl& ctrl = {});

// d^m/ds^m 2F1 via (a)_m (b)_m / (c)_m * 2F1(a+m, b+m; c+m; s).
EvalResult hyp2f1_deriv(const HypParams& p, double s, unsigned m, const SeriesControl& ctrl = {});

// Euler integral representation, evaluated by adaptive Gauss-Kronrod.
// Requires c > b > 0 and s < 1.
EvalResult hyp2f1_integral(const HypParams& p, double s, double quad_tol = 1e-13);

// Integral of exp(-r^2 / (2 variance)) over (-inf, c_upper].
double gaussian_tail(double c_upper, double variance);

// exp(x^2/2) * integral_{-inf}^{-x} exp(-r^2/2) dr for x >= 0, i.e. the Mills ratio.
// Stable for large x where the integral underflows.
double mills_ratio(double x);

// Integral over (0, inf) of exp(-tau/2) tau^{-1/2 [half_weight]} (tau + rho)^{-power}.
double laplace_quad(double rho, int power, bool half_weight);

}  // namespace conelab
