// Numerical checks of the root estimates, the boundary-layer profile and the
// constants that the stability proofs rely on.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "conelab/cone.hpp"

namespace conelab {

struct BoundCheck {
    std::string name;
    std::map<std::string, double> parameters;
    double claimed;   // the bound
    double computed;  // the quantity being bounded
    bool passed;
};

// s_{n,k} <= k/n + c/sqrt(n) with c = 3/5, 2/5, 9/25 on [1/3, 7/8], [7/8, 9/10],
// [9/10, 15/16]. At a shared endpoint every applicable bound is tested and
// `claimed` carries the tightest. Requires n >= 60 and k/n in [1/3, 15/16].
BoundCheck root_bound_check(const ConeParams& p);

// u(xi) = exp(-xi^2/2) / int_{-inf}^{xi} exp(-r^2/2) dr.
double limit_profile_u(double xi);

// (s_{n,k} - k/n) sqrt(n) / sqrt(2 lambda (1-lambda)) with k = round(lam n)
// and lambda = k/n.
double estimate_z0(int n_large, double lam);

// 2 lam (1-lam) exp(-c^2 / (4 lam (1-lam))) / int_{-inf}^{c} exp(-r^2 / (4 lam (1-lam))) dr.
double phi_c_eval(double lam, double c);

// For n/2 <= k <= n-12: s_{n,k} < k/n or (n s - k)^2 <= 2 n (1 - s).
// For 4 <= d <= 11 with n >= 16 d: s_{n,k} < 1 - (2d+1 - 2 sqrt(2d+1)) / (2n).
BoundCheck overshoot_check(const ConeParams& p);

// Fixed battery, sorted by name.
std::vector<BoundCheck> proof_constants_check();

}  // namespace conelab
