#include "conelab/spectrum.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "conelab/ode.hpp"

namespace conelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Coeffs {
    double n, k, Pp, Qq;
};

Coeffs coeffs(const ConeParams& pars, Mode m) {
    return {static_cast<double>(pars.n), static_cast<double>(pars.k),
            static_cast<double>(m.p) * (m.p + pars.n - pars.k - 2), static_cast<double>(m.q) * (m.q + pars.k - 2)};
}

// Frobenius series Phi = sum a_m t^{q+m} of the ODE multiplied by t^2 (1-t^2):
//   A = t^2 (1-t^2)^2, B = t (1-t^2)((k-1) - (n-1) t^2),
//   C = lambda t^2 (1-t^2) - Pp t^2 - Qq (1-t^2).
// D_e(r) = A_{e+2} r(r-1) + B_{e+1} r + C_e, and
//   a_m D_0(q+m) = -sum_{e=2,4} D_e(q+m-e) a_{m-e},  D_0(q+m) = m (2q+m+k-2).
// Odd coefficients vanish; a_m is set to 0 whenever D_0 does.
std::pair<double, double> frobenius_launch(const Coeffs& c, int q, double lambda, double t) {
    constexpr int kTerms = 12;
    std::array<double, kTerms + 1> a{};
    a[0] = 1.0;
    auto D2 = [&](double r) { return -2 * r * (r - 1) - (c.n + c.k - 2) * r + lambda - c.Pp + c.Qq; };
    auto D4 = [&](double r) { return r * (r - 1) + (c.n - 1) * r - lambda; };
    for (int m = 2; m <= kTerms; m += 2) {
        const double d0 = m * (2.0 * q + m + c.k - 2);
        if (d0 == 0.0) continue;
        double acc = D2(q + m - 2.0) * a[m - 2];
        if (m >= 4) acc += D4(q + m - 4.0) * a[m - 4];
        a[m] = -acc / d0;
    }
    double phi = 0.0, dphi = 0.0;
    for (int m = 0; m <= kTerms; m += 2) {
        phi += a[m] * std::pow(t, q + m);
        if (q + m > 0) dphi += (q + m) * a[m] * std::pow(t, q + m - 1);
    }
    return {phi, dphi};
}

struct ShootCore {
    double phi, dphi;
    int zeros;
};

template <class OnStep>
ShootCore shoot_core(const ConeParams& pars, double t_end, double lambda, Mode mode, const ShootingConfig& cfg,
                     OnStep&& on_step) {
    const Coeffs c = coeffs(pars, mode);
    const double t0 = cfg.t_launch;
    auto [phi0, dphi0] = frobenius_launch(c, mode.q, lambda, t0);
    // Normalize so the launch state has unit size; the ODE is linear.
    const double sc = 1.0 / std::max(std::abs(phi0), std::abs(dphi0) * t0);
    std::array<double, 2> y{phi0 * sc, dphi0 * sc};
    auto rhs = [&](double t, const std::array<double, 2>& v) {
        const double omt = 1.0 - t * t;
        const double pot = lambda - c.Pp / omt - c.Qq / (t * t);
        return std::array<double, 2>{v[1], -(((c.k - 1) / t - (c.n - 1) * t) * v[1] + pot * v[0]) / omt};
    };
    // Cap the phase advance per step so no sign change of Phi can hide
    // inside one step.
    auto max_step = [&](double t, const std::array<double, 2>&) {
        const double omt = 1.0 - t * t;
        const double w2 = (lambda - c.Pp / omt - c.Qq / (t * t)) / omt;
        const double cap_t = 0.5 * t + 1e-300;  // geometric growth near the singular endpoint
        return w2 > 0 ? std::min(cap_t, 0.5 / std::sqrt(w2)) : cap_t;
    };
    int zeros = 0;
    double prev = y[0];
    ode::Options opt;
    opt.rtol = cfg.ode_tol;
    opt.atol = 1e-300;
    opt.shared_scale = true;
    opt.h0 = 0.1 * t0;
    ode::integrate<2>(
        rhs, t0, t_end, y, opt,
        [&](double t, const std::array<double, 2>& v) {
            if (t < t_end && ((prev > 0 && v[0] < 0) || (prev < 0 && v[0] > 0))) ++zeros;
            if (t < t_end && v[0] != 0.0) prev = v[0];
            on_step(t, v);
            return true;
        },
        max_step);
    return {y[0], y[1], zeros};
}

// True when lambda lies above the index-th eigenvalue. Theta(t_nk) grows
// with lambda, so: more zeros, or the same count with Phi'/Phi below beta.
bool above(const ShootCore& s, int index, double beta) {
    if (s.zeros != index) return s.zeros > index;
    return (s.dphi - beta * s.phi) * s.phi < 0;
}

}  // namespace

void ShootingConfig::validate() const {
    if (!(t_launch > 0 && t_launch <= 1e-4)) throw Error(ErrorCode::DomainError, "t_launch must lie in (0, 1e-4]");
    if (!(ode_tol > 0 && ode_tol <= 1e-10)) throw Error(ErrorCode::DomainError, "ode_tol must lie in (0, 1e-10]");
    if (max_bisections < 1) throw Error(ErrorCode::DomainError, "max_bisections must be positive");
    if (lambda_bracket && !(lambda_bracket->first < lambda_bracket->second))
        throw Error(ErrorCode::DomainError, "lambda_bracket must be increasing");
}

ShootResult shoot(const ConeParams& pars, const RootResult& root, double lambda, Mode mode,
                  const ShootingConfig& cfg) {
    cfg.validate();
    const auto s = shoot_core(pars, root.t_nk, lambda, mode, cfg, [](double, const std::array<double, 2>&) {});
    ShootResult r{s.phi, s.dphi, std::nullopt, s.zeros};
    if (s.phi != 0.0 && std::abs(s.phi) > 1e-300 * std::abs(s.dphi)) r.logderiv = s.dphi / s.phi;
    return r;
}

ShootResult shoot(const ConeParams& pars, double lambda, Mode mode, const ShootingConfig& cfg) {
    return shoot(pars, find_root(pars), lambda, mode, cfg);
}

std::vector<std::pair<double, double>> shoot_profile(const ConeParams& pars, const RootResult& root, double lambda,
                                                     Mode mode, const ShootingConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<double, double>> out;
    shoot_core(pars, root.t_nk, lambda, mode, cfg,
               [&](double t, const std::array<double, 2>& v) { out.emplace_back(t, v[0]); });
    return out;
}

std::optional<std::pair<double, double>> indicial_roots(double lambda, int n) {
    const double h = 0.5 * (n - 2);
    const double rad = h * h + lambda;
    if (rad < 0) return std::nullopt;
    const double sq = std::sqrt(rad);
    return std::make_pair(-h - sq, -h + sq);
}

EigenResult find_eigenvalue(const ConeParams& pars, const RootResult& root, Mode mode, int index,
                            const ShootingConfig& cfg) {
    cfg.validate();
    if (index < 0) throw Error(ErrorCode::DomainError, "index must be non-negative");
    const double beta = boundary_rhs(pars, root).rhs;
    auto eval = [&](double lam) {
        return shoot_core(pars, root.t_nk, lam, mode, cfg, [](double, const std::array<double, 2>&) {});
    };
    const double nn = pars.n - 2.0;
    double lo = cfg.lambda_bracket ? cfg.lambda_bracket->first : -nn * nn;
    double hi = cfg.lambda_bracket ? cfg.lambda_bracket->second : 0.0;
    // Auto-widen twice before giving up.
    for (int widen = 0;; ++widen) {
        const bool lo_ok = !above(eval(lo), index, beta);
        const bool hi_ok = above(eval(hi), index, beta);
        if (lo_ok && hi_ok) break;
        if (widen == 2) throw Error(ErrorCode::BracketExhausted, "lambda bracket does not straddle the eigenvalue");
        const double w = std::max(hi - lo, 1.0);
        if (!lo_ok) lo -= 4 * w;
        if (!hi_ok) hi += 4 * w * (1 + index) + 4.0 * (mode.p + 1) * (mode.q + 1) * (pars.n);
    }
    for (int it = 0; it < cfg.max_bisections && hi - lo > 4e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (above(eval(mid), index, beta)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double lam = 0.5 * (lo + hi);
    const auto s = eval(lam);
    const double resid = s.phi != 0.0 ? std::abs(s.dphi / s.phi - beta) : INFINITY;
    EigenResult r{lam, s.zeros, kNaN, kNaN, resid};
    if (auto g = indicial_roots(lam, pars.n)) {
        r.gamma_minus = g->first;
        r.gamma_plus = g->second;
    }
    return r;
}

EigenResult find_eigenvalue(const ConeParams& pars, Mode mode, int index, const ShootingConfig& cfg) {
    return find_eigenvalue(pars, find_root(pars), mode, index, cfg);
}

namespace {

// Smallest eigenvalue of the symmetric tridiagonal (diag, off) by Sturm
// bisection.
double smallest_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t N = diag.size();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < N ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    auto count_below = [&](double x) {
        int cnt = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double b2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
            d = (diag[i] - x) - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0) ++cnt;
        }
        return cnt;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_below(mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// 4-point Gauss-Legendre on [a, b].
template <class F>
double gl4(F&& f, double a, double b) {
    static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                    0.8611363115940526};
    static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                    0.3478548451374538};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
}

}  // namespace

double fd_oracle_lambda1(const ConeParams& pars, Mode mode, int grid_n) {
    if (grid_n < 200) throw Error(ErrorCode::DomainError, "grid_n must be >= 200");
    const RootResult root = find_root(pars);
    const double ts = root.t_nk;
    const double beta = boundary_rhs(pars, root).rhs;
    const Coeffs c = coeffs(pars, mode);
    auto weight = [&](double t) { return std::pow(t, c.k - 1) * std::pow(1 - t * t, 0.5 * (c.n - c.k)); };
    auto mass_density = [&](double t) { return weight(t) / (1 - t * t); };
    auto pot_density = [&](double t) {
        const double omt = 1 - t * t;
        return weight(t) / omt * (c.Pp / omt + (t > 0 ? c.Qq / (t * t) : 0.0));
    };
    // Weak form: a(u) = int p u'^2 + int p V u^2/(1-t^2) - p(t*) beta u(t*)^2,
    //            m(u) = int p u^2 / (1-t^2).
    // Vertices t_i = i h, dual cells with lumped mass; q > 0 pins u(0) = 0.
    const int N = grid_n;
    const double h = ts / N;
    const int first = mode.q > 0 ? 1 : 0;
    const int M = N + 1 - first;
    std::vector<double> K(M, 0.0), off(std::max(M - 1, 0), 0.0), Ms(M, 0.0);
    for (int i = 0; i < N; ++i) {
        const double a = i * h, b = (i + 1) * h, m = 0.5 * (a + b);
        const double kc = weight(m) / h;
        const double mass_l = gl4(mass_density, a, m), mass_r = gl4(mass_density, m, b);
        const double pot_l = gl4(pot_density, a, m), pot_r = gl4(pot_density, m, b);
        const int il = i - first, ir = i + 1 - first;
        if (il >= 0) {
            K[il] += kc + pot_l;
            Ms[il] += mass_l;
            off[il] = -kc;
        }
        K[ir] += kc + pot_r;
        Ms[ir] += mass_r;
    }
    K[M - 1] -= weight(ts) * beta;
    std::vector<double> diag(M), offs(std::max(M - 1, 0));
    for (int i = 0; i < M; ++i) diag[i] = K[i] / Ms[i];
    for (int i = 0; i + 1 < M; ++i) offs[i] = off[i] / std::sqrt(Ms[i] * Ms[i + 1]);
    return smallest_eigenvalue(diag, offs);
}

FdRichardson fd_oracle_richardson(const ConeParams& pars, Mode mode, int grid_n) {
    FdRichardson r{};
    r.coarse = fd_oracle_lambda1(pars, mode, grid_n);
    r.fine = fd_oracle_lambda1(pars, mode, 2 * grid_n);
    r.finest = fd_oracle_lambda1(pars, mode, 4 * grid_n);
    r.extrapolated = (4 * r.finest - r.fine) / 3;
    const double d1 = r.coarse - r.fine, d2 = r.fine - r.finest;
    r.observed_order = (d1 != 0 && d2 != 0) ? std::log2(std::abs(d1 / d2)) : kNaN;
    return r;
}

int default_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("CONELAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, hw);
    }
    return hw;
}

ScanReport family_scan(int n_lo, int n_hi, int threads, const SeriesControl& ctrl, const ShootingConfig& cfg) {
    if (n_lo < 3 || n_hi > 40 || n_lo > n_hi) throw Error(ErrorCode::DomainError, "n range must lie within [3, 40]");
    ScanReport rep;
    for (int n = n_lo; n <= n_hi; ++n)
        for (int k = 1; k <= n - 2; ++k) rep.rows.push_back({n, k, kNaN, kNaN, kNaN, kNaN});
    if (threads <= 0) threads = default_threads();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(rep.rows.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < rep.rows.size();) {
            auto& row = rep.rows[i];
            const ConeParams p(row.n, row.k);
            const auto root = find_root(p, ctrl);
            const auto e = find_eigenvalue(p, root, Mode{}, 0, cfg);
            row.t_nk = root.t_nk;
            row.lambda1 = e.lambda;
            row.gamma_plus = e.gamma_plus;
            row.gamma_minus = e.gamma_minus;
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Flags only cover n >= 7, where the claims are made.
    double prev_gbar = kNaN, prev_lbar = kNaN;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        if (r.n < 7) continue;
        if (i > 0 && rep.rows[i - 1].n == r.n && !(r.lambda1 > rep.rows[i - 1].lambda1)) rep.increasing_in_k = false;
        if (!(r.lambda1 > 8.0 - 2 * r.n)) rep.lambda_bound = false;
        if (!(r.gamma_minus > 2.0 - r.n && r.gamma_minus < 4.0 - r.n)) rep.gamma_minus_bound = false;
        if (!(r.gamma_plus > -2.0 && r.gamma_plus < 0.0)) rep.gamma_plus_bound = false;
        if (r.k == r.n - 2) {
            if (!(r.gamma_plus > -2.0 && r.gamma_plus < -1.0)) rep.gamma_bar_range = false;
            if (std::isfinite(prev_gbar) && !(r.gamma_plus > prev_gbar)) rep.gamma_bar_increasing = false;
            if (std::isfinite(prev_lbar) && !(r.lambda1 < prev_lbar)) rep.lambda_bar_decreasing = false;
            prev_gbar = r.gamma_plus;
            prev_lbar = r.lambda1;
        }
    }
    return rep;
}

}  // namespace conelab
