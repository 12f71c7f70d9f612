// Profiles g_{n,k,alpha}, the free-boundary root t_{n,k} and the
// strict-stability criterion for the O(n-k) x O(k) invariant cones.
#pragma once

#include <optional>
#include <utility>

#include "conelab/specfun.hpp"

namespace conelab {

struct ConeParams {
    int n;
    int k;

    ConeParams(int n_, int k_);
    int d() const noexcept { return n - k; }
};

struct RootResult {
    double t_nk;
    double s_nk;
    std::pair<double, double> bracket;
    double residual;
};

enum class Verdict { Unstable, BorderlineStable, StrictlyStable };
const char* to_string(Verdict v) noexcept;

struct Interval {
    double lo;
    double hi;
};

struct StabilityReport {
    double t_nk;
    double c_nk;
    double link_H;
    double lhs;
    double rhs;
    double margin;
    Verdict verdict;
    std::optional<Interval> admissible;
};

inline constexpr double kBorderlineBand = 1e-9;

// 2F1((n+alpha-2)/2, -alpha/2; k/2; t^2).
double profile_g(const ConeParams& p, double alpha, double t, const SeriesControl& ctrl = {});
inline double profile_f(const ConeParams& p, double t, const SeriesControl& ctrl = {}) {
    return profile_g(p, 1.0, t, ctrl);
}

// g and dg/dt together.
struct ProfileValue {
    double g;
    double dg;
};
ProfileValue profile_g_with_deriv(const ConeParams& p, double alpha, double t, const SeriesControl& ctrl = {});

// The odd companion solution t^{2-k} 2F1((n-k+1)/2, (1-k)/2; 2-k/2; t^2) of
// L_{n,k} f = 0 (t > 0), valid as written for odd k. For even k that formula
// degenerates into a multiple of f, and the logarithmic Frobenius solution
// t^{2-k} (1 + ...) + C f log t^2 is returned instead.
double profile_f_odd(const ConeParams& p, double t);

RootResult find_root(const ConeParams& p, const SeriesControl& ctrl = {});

double normalization_c(const ConeParams& p, const RootResult& r, const SeriesControl& ctrl = {});

struct BoundaryTerms {
    double link_H;
    double rhs;
};
BoundaryTerms boundary_rhs(const ConeParams& p, const RootResult& r);

// g'/g - rhs at t_{n,k}.
double stability_margin(const ConeParams& p, double alpha, const RootResult& r, const SeriesControl& ctrl = {});

StabilityReport verdict(const ConeParams& p, const SeriesControl& ctrl = {});

std::optional<Interval> admissible_interval(const ConeParams& p, const RootResult& r,
                                            const SeriesControl& ctrl = {});
std::optional<Interval> admissible_interval(const ConeParams& p, const SeriesControl& ctrl = {});

// scale * rho^alpha * g_{n,k,alpha}(t).
double eval_homogeneous(const ConeParams& p, double alpha, double scale, double rho, double t,
                        const SeriesControl& ctrl = {});

}  // namespace conelab
