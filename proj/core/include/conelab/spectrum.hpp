// Robin eigenvalue problem on the link, reduced by symmetry to a singular
// Sturm-Liouville problem on (0, t_{n,k}].
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conelab/cone.hpp"

namespace conelab {

struct Mode {
    int p = 0;
    int q = 0;
};

struct EigenResult {
    double lambda;
    int zeros_interior;
    double gamma_minus;  // NaN when the indicial roots are complex
    double gamma_plus;
    double bc_residual;
};

struct ShootingConfig {
    double t_launch = 1e-6;
    double ode_tol = 1e-12;
    // Empty means [-(n-2)^2, 0].
    std::optional<std::pair<double, double>> lambda_bracket;
    int max_bisections = 200;

    void validate() const;
};

struct ShootResult {
    double phi;
    double dphi;
    std::optional<double> logderiv;  // empty at a pole (phi(t_nk) == 0)
    int zeros_interior;
};

ShootResult shoot(const ConeParams& pars, const RootResult& root, double lambda, Mode mode,
                  const ShootingConfig& cfg = {});
ShootResult shoot(const ConeParams& pars, double lambda, Mode mode, const ShootingConfig& cfg = {});

EigenResult find_eigenvalue(const ConeParams& pars, const RootResult& root, Mode mode, int index,
                            const ShootingConfig& cfg = {});
EigenResult find_eigenvalue(const ConeParams& pars, Mode mode = {}, int index = 0, const ShootingConfig& cfg = {});

// (gamma_minus, gamma_plus), empty when ((n-2)/2)^2 + lambda < 0.
std::optional<std::pair<double, double>> indicial_roots(double lambda, int n);

// Samples Phi on (0, t_nk] at the given lambda; used for positivity checks.
std::vector<std::pair<double, double>> shoot_profile(const ConeParams& pars, const RootResult& root, double lambda,
                                                     Mode mode, const ShootingConfig& cfg = {});

// Smallest eigenvalue of a vertex-centred finite-volume discretization with
// grid_n cells. Independent of the shooting code.
double fd_oracle_lambda1(const ConeParams& pars, Mode mode, int grid_n);

struct FdRichardson {
    double coarse;        // grid_n
    double fine;          // 2 grid_n
    double finest;        // 4 grid_n
    double extrapolated;  // second-order Richardson on the two finest grids
    double observed_order;
};
FdRichardson fd_oracle_richardson(const ConeParams& pars, Mode mode, int grid_n);

struct ScanRow {
    int n;
    int k;
    double t_nk;
    double lambda1;
    double gamma_plus;
    double gamma_minus;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    bool increasing_in_k = true;       // lambda_1(n, .) strictly increasing, every n >= 7
    bool lambda_bound = true;          // lambda_1 > 8 - 2n
    bool gamma_minus_bound = true;     // gamma_- in (2-n, 4-n)
    bool gamma_plus_bound = true;      // gamma_+ in (-2, 0)
    bool gamma_bar_increasing = true;  // gamma_+(n, n-2) increasing in n
    bool gamma_bar_range = true;       // gamma_+(n, n-2) in (-2, -1)
    bool lambda_bar_decreasing = true; // lambda_1(n, n-2) strictly decreasing in n
    bool all_ok() const noexcept {
        return increasing_in_k && lambda_bound && gamma_minus_bound && gamma_plus_bound && gamma_bar_increasing &&
               gamma_bar_range && lambda_bar_decreasing;
    }
};

// Cells are independent; threads <= 0 uses CONELAB_THREADS or hardware
// concurrency. Row order is (n, k) lexicographic regardless of scheduling.
ScanReport family_scan(int n_lo, int n_hi, int threads = 0, const SeriesControl& ctrl = {},
                       const ShootingConfig& cfg = {});

// Hardware concurrency, capped by CONELAB_THREADS when set.
int default_threads();

}  // namespace conelab
