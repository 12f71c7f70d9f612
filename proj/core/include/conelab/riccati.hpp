// Riccati form of the stability criterion and the barrier constructions
// used to show 4-n lies in the admissible interval.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conelab/cone.hpp"
#include "conelab/ode.hpp"

namespace conelab {

enum class LMode { Direct, OdeIntegrate, CrossCheck };

struct RiccatiTrace {
    double alpha_hat;
    std::vector<double> grid;
    std::vector<double> values_direct;
    std::vector<double> values_ode;
    double max_discrepancy;
};

inline double alpha_hat(const ConeParams& p, double alpha) { return alpha * (alpha + p.n - 2); }

// L(s) = 2 s (1-s) F'/F - (n-2) s + (k-1) with F = g_{n,k,alpha} in s = t^2.
double L_direct(const ConeParams& p, double alpha, double s, const SeriesControl& ctrl = {});

// Integrates 2s(1-s)L' + L^2 + (ns-k)L + P = 0 from a Taylor launch at s=0.
// Returns L at each requested s (sorted ascending, all <= 1 - 1e-6).
std::vector<double> L_ode(const ConeParams& p, double alpha, const std::vector<double>& s_values,
                          const ode::Options& opt = {});

double L_eval(const ConeParams& p, double alpha, double s, LMode mode);
RiccatiTrace L_cross_check(const ConeParams& p, double alpha, const std::vector<double>& grid);

// Taylor coefficients l_0..l_{count-1} of L at s = 0.
std::vector<double> L_taylor(const ConeParams& p, double alpha_hat, int count);

// P(s) = (n-2k) s + alpha_hat s (1-s) + (k-1).
double P_poly(const ConeParams& p, double alpha_hat, double s);

// Roots of P strictly inside (0,1), ascending.
std::vector<double> P_roots_in_unit(const ConeParams& p, double alpha_hat);

enum class BarrierVariant { LinearOnly, LargeD, SmallD };
const char* to_string(BarrierVariant v) noexcept;

struct BarrierSpec {
    BarrierVariant variant;
    double s_star;
    double q_coeff;       // Q(s) = q_coeff * (1-s)/s
    double exponent;      // Q^exponent in the closed form
    std::optional<std::pair<double, double>> roots;  // (r_minus, r_plus)
    std::optional<double> delta;
    double A;
    // Constant-coefficient Riccati solved on the upper piece:
    // 2s(1-s) phi' + phi^2 + B phi + C = 0.
    double B;
    double C;
};

class Barrier {
public:
    Barrier(const ConeParams& p, BarrierSpec spec) : p_(p), spec_(spec) {}
    const BarrierSpec& spec() const noexcept { return spec_; }
    const ConeParams& params() const noexcept { return p_; }
    double knot() const noexcept { return static_cast<double>(p_.k) / p_.n; }
    double operator()(double s) const;
    double derivative(double s) const;
    // Limit from the left at k/n, i.e. the linear piece: 4k/n - 1.
    double left_limit_at_knot() const noexcept;
    // R[phi](s) = 2s(1-s)phi' + phi^2 + (ns-k) phi + P_k(s) at alpha = 4-n.
    double residual(double s) const;

private:
    ConeParams p_;
    BarrierSpec spec_;
};

// Throws VariantUnavailable when d <= 5 or when Delta <= 1.
Barrier barrier_phi(const ConeParams& p);

struct BarrierReport {
    BarrierVariant variant;
    double s_star;
    double max_R_lower;     // max over the linear piece
    double max_R_upper;     // max over [k/n, s*]
    double left_limit;
    double value_at_knot;
    bool jump_decreasing;
    double min_L_minus_phi;
    double L_at_s_star;
    std::optional<double> delta;
    bool R_ok;
    bool comparison_ok;
    bool passed;
};

inline constexpr double kComparisonSlack = 1e-9;

BarrierReport verify_barrier(const ConeParams& p, int grid_size = 512);

struct Check4 {
    bool ok;
    double margin;  // L(s_{n,k}) at alpha = 4-n
};
Check4 check_4_minus_n(const ConeParams& p, const SeriesControl& ctrl = {});
Check4 check_4_minus_n(const ConeParams& p, const RootResult& r, const SeriesControl& ctrl = {});

}  // namespace conelab
