#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "conelab/riccati.hpp"

namespace conelab::cli {

using nlohmann::json;

namespace {

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + v);
    }
    if (pos != v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int x;
    try {
        x = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + key + ": " + v);
    }
    if (pos != v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return x;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt6(double x) {
    if (!std::isfinite(x)) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

json record_json(const OutputRecord& r) {
    return {{"n", r.n},
            {"k", r.k},
            {"t_nk", num_or_null(r.t_nk)},
            {"lambda1", num_or_null(r.lambda1)},
            {"gamma_plus", num_or_null(r.gamma_plus)},
            {"gamma_minus", num_or_null(r.gamma_minus)},
            {"verdict", r.verdict},
            {"margin_4_minus_n", r.margin_4_minus_n ? num_or_null(*r.margin_4_minus_n) : json(nullptr)},
            {"flags", r.flags}};
}

json check_json(const BoundCheck& c) {
    json params = json::object();
    for (const auto& [k, v] : c.parameters) params[k] = num_or_null(v);
    return {{"name", c.name},
            {"parameters", params},
            {"claimed", num_or_null(c.claimed)},
            {"computed", num_or_null(c.computed)},
            {"passed", c.passed}};
}

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
    if (key == "rel_tol") {
        s.series.rel_tol = parse_double(key, value);
    } else if (key == "abs_tol") {
        s.series.abs_tol = parse_double(key, value);
    } else if (key == "max_terms") {
        s.series.max_terms = parse_int(key, value);
    } else if (key == "switch_point") {
        s.series.switch_point = parse_double(key, value);
    } else if (key == "t_launch") {
        s.shooting.t_launch = parse_double(key, value);
    } else if (key == "ode_tol") {
        s.shooting.ode_tol = parse_double(key, value);
    } else if (key == "max_bisections") {
        s.shooting.max_bisections = parse_int(key, value);
    } else if (key == "threads") {
        s.threads = parse_int(key, value);
    } else if (key == "table_tol_t") {
        s.table_tol_t = parse_double(key, value);
    } else if (key == "table_tol_value") {
        s.table_tol_value = parse_double(key, value);
    } else {
        throw std::invalid_argument("unknown setting: " + key);
    }
}

void load_config_file(Settings& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_setting(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

OutputRecord analyze_cone(const ConeParams& p, const Settings& s) {
    const auto root = find_root(p, s.series);
    const auto rep = verdict(p, s.series);
    const auto e = find_eigenvalue(p, root, Mode{}, 0, s.shooting);
    OutputRecord r{p.n, p.k, root.t_nk, e.lambda, e.gamma_plus, e.gamma_minus, to_string(rep.verdict), std::nullopt, {}};
    if (!std::isfinite(e.gamma_plus)) r.flags.push_back("complex_indicial_roots");
    if (p.n >= 5) {
        try {
            const auto c = check_4_minus_n(p, root, s.series);
            r.margin_4_minus_n = c.margin;
            if (!c.ok) r.flags.push_back("four_minus_n_not_admissible");
        } catch (const Error&) {
            // g_{4-n} vanishes before t_{n,k}: no finite margin.
            r.flags.push_back("four_minus_n_pole");
        }
    }
    return r;
}

std::vector<OutputRecord> analyze_grid(int n_min, int n_max, const Settings& s) {
    std::vector<ConeParams> cells;
    for (int n = n_min; n <= n_max; ++n)
        for (int k = 1; k <= n - 2; ++k) cells.emplace_back(n, k);
    std::vector<std::optional<OutputRecord>> out(cells.size());
    int threads = s.threads > 0 ? s.threads : default_threads();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) out[i] = analyze_cone(cells[i], s);
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<OutputRecord> rows;
    rows.reserve(out.size());
    for (auto& r : out) rows.push_back(std::move(*r));
    return rows;
}

std::string csv_header() {
    return "n,k,t_nk,neg_lambda1,neg_gamma_plus,lambda1,gamma_plus,gamma_minus,verdict,margin_4_minus_n,flags";
}

std::string to_csv_row(const OutputRecord& r) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    std::ostringstream os;
    os << r.n << ',' << r.k << ',' << fmt6(r.t_nk) << ',' << fmt6(-r.lambda1) << ',' << fmt6(-r.gamma_plus) << ','
       << fmt6(r.lambda1) << ',' << fmt6(r.gamma_plus) << ',' << fmt6(r.gamma_minus) << ',' << r.verdict << ','
       << (r.margin_4_minus_n ? fmt6(*r.margin_4_minus_n) : std::string{}) << ',' << flags;
    return os.str();
}

const std::vector<ReferenceEntry>& reference_table() {
    static const std::vector<ReferenceEntry> table = {
        {7, 1, .52, 5.698, 1.757},   {7, 2, .69, 5.639, 1.718},   {7, 3, .81, 5.607, 1.698},
        {7, 4, .89, 5.581, 1.682},   {7, 5, .96, 5.551, 1.664},   {8, 1, .48, 6.699, 1.483},
        {8, 2, .65, 6.642, 1.464},   {8, 3, .78, 6.613, 1.455},   {8, 4, .87, 6.591, 1.448},
        {8, 5, .91, 6.571, 1.441},   {8, 6, .97, 6.544, 1.433},   {9, 1, .45, 7.701, 1.367},
        {9, 2, .61, 7.645, 1.354},   {9, 3, .75, 7.618, 1.348},   {9, 4, .84, 7.599, 1.343},
        {9, 5, .89, 7.582, 1.339},   {9, 6, .94, 7.564, 1.335},   {9, 7, .98, 7.540, 1.330},
        {10, 1, .43, 8.702, 1.298},  {10, 2, .57, 8.647, 1.288},  {10, 3, .68, 8.621, 1.283},
        {10, 4, .76, 8.604, 1.280},  {10, 5, .83, 8.589, 1.278},  {10, 6, .89, 8.575, 1.275},
        {10, 7, .94, 8.559, 1.272},  {10, 8, .98, 8.536, 1.228},  {11, 1, .41, 9.702, 1.252},
        {11, 2, .55, 9.649, 1.244},  {11, 3, .65, 9.624, 1.240},  {11, 4, .72, 9.607, 1.238},
        {11, 5, .79, 9.594, 1.236},  {11, 6, .85, 9.582, 1.234},  {11, 7, .90, 9.570, 1.232},
        {11, 8, .94, 9.555, 1.230},  {11, 9, .98, 9.533, 1.226},  {12, 1, .38, 10.703, 1.219},
        {12, 2, .53, 10.650, 1.212}, {12, 3, .67, 10.626, 1.209}, {12, 4, .69, 10.610, 1.207},
        {12, 5, .76, 10.598, 1.205}, {12, 6, .82, 10.587, 1.204}, {12, 7, .87, 10.577, 1.202},
        {12, 8, .91, 10.566, 1.201}, {12, 9, .95, 10.552, 1.199}, {12, 10, .98, 10.531, 1.196},
    };
    return table;
}

bool is_flagged_entry(int n, int k, const std::string& quantity) {
    return (quantity == "t" && ((n == 9 && k == 6) || (n == 12 && k == 3))) ||
           (quantity == "neg_gamma_plus" && n == 10 && k == 8);
}

std::vector<Comparison> compare_with_reference(const std::vector<OutputRecord>& rows, const Settings& s) {
    std::vector<Comparison> out;
    for (const auto& ref : reference_table()) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const OutputRecord& r) {
            return r.n == ref.n && r.k == ref.k;
        });
        if (it == rows.end()) continue;
        const std::pair<const char*, std::pair<double, double>> items[] = {
            {"t", {ref.t, it->t_nk}},
            {"neg_lambda1", {ref.neg_lambda1, -it->lambda1}},
            {"neg_gamma_plus", {ref.neg_gamma_plus, -it->gamma_plus}},
        };
        for (const auto& [q, vals] : items) {
            const double tol = std::string(q) == "t" ? s.table_tol_t : s.table_tol_value;
            const bool flagged = is_flagged_entry(ref.n, ref.k, q);
            out.push_back({ref.n, ref.k, q, vals.first, vals.second, tol, flagged,
                           std::abs(vals.first - vals.second) <= tol});
        }
    }
    return out;
}

namespace {

void add(std::vector<BoundCheck>& out, std::string name, std::map<std::string, double> params, double claimed,
         double computed, bool passed) {
    out.push_back({std::move(name), std::move(params), claimed, computed, passed});
}

void suite_specfun(std::vector<BoundCheck>& out, const Settings& s) {
    // Series/continuation against the Euler integral, c > b > 0, s < 1.
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> ua(-4.0, 10.0), ub(0.2, 6.0), ugap(0.2, 6.0), us(-0.95, 0.95);
    double worst_rel = 0.0, worst_ode = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng), b = ub(rng), c = b + ugap(rng), x = us(rng);
        const HypParams p(a, b, c);
        const double f = hyp2f1(p, x, s.series).value;
        const double g = hyp2f1_integral(p, x).value;
        worst_rel = std::max(worst_rel, std::abs(f - g) / std::abs(g));
        const double d1 = hyp2f1_deriv(p, x, 1, s.series).value;
        const double d2 = hyp2f1_deriv(p, x, 2, s.series).value;
        const double t1 = x * (1 - x) * d2, t2 = (c - (a + b + 1) * x) * d1, t3 = a * b * f;
        worst_ode = std::max(worst_ode, std::abs(t1 + t2 - t3) / (std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    add(out, "hyp2f1_vs_integral", {{"draws", 200}}, 1e-9, worst_rel, worst_rel <= 1e-9);
    add(out, "hyp2f1_euler_residual", {{"draws", 200}}, 1e-8, worst_ode, worst_ode <= 1e-8);

    // Closed forms: 2F1(1,1;2;s) = -log(1-s)/s, 2F1(a,b;b;s) = (1-s)^{-a}.
    double worst_cf = 0.0;
    for (double x : {-0.9, -0.3, 0.2, 0.6, 0.9, 0.99}) {
        const double v1 = hyp2f1(HypParams(1, 1, 2), x, s.series).value;
        worst_cf = std::max(worst_cf, std::abs(v1 / (-std::log1p(-x) / x) - 1));
        const double v2 = hyp2f1(HypParams(2.5, 1.5, 1.5), x, s.series).value;
        worst_cf = std::max(worst_cf, std::abs(v2 / std::pow(1 - x, -2.5) - 1));
    }
    add(out, "hyp2f1_closed_forms", {}, 1e-12, worst_cf, worst_cf <= 1e-12);
    // Gauss summation at s = 1.
    {
        const double v = hyp2f1(HypParams(0.5, 0.25, 2.0), 1.0, s.series).value;
        const double ex = std::tgamma(2.0) * std::tgamma(1.25) / (std::tgamma(1.5) * std::tgamma(1.75));
        add(out, "hyp2f1_gauss_sum", {}, 1e-13, std::abs(v / ex - 1), std::abs(v / ex - 1) <= 1e-13);
    }
    const double euler = 0.57721566490153286061;
    add(out, "digamma_one", {}, 1e-14, std::abs(digamma(1.0) + euler), std::abs(digamma(1.0) + euler) <= 1e-14);
    const double u0 = limit_profile_u(0.0);
    add(out, "u_at_zero", {}, 1e-12, std::abs(u0 - std::sqrt(2 / std::numbers::pi)),
        std::abs(u0 - std::sqrt(2 / std::numbers::pi)) <= 1e-12);
}

void suite_riccati(std::vector<BoundCheck>& out, const Settings& s) {
    // Direct evaluation against the integrated Riccati equation.
    const std::vector<double> grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    for (auto [n, k] : {std::pair{7, 1}, {7, 5}, {10, 4}, {15, 13}}) {
        const ConeParams p(n, k);
        const double sn = find_root(p, s.series).s_nk;
        std::vector<double> g;
        for (double x : grid) g.push_back(x * sn);
        const auto tr = L_cross_check(p, 4.0 - n, g);
        add(out, "riccati_cross_check", {{"n", double(n)}, {"k", double(k)}}, 1e-8, tr.max_discrepancy,
            tr.max_discrepancy <= 1e-8);
    }
    for (int n = 7; n <= 20; ++n)
        for (int k = 1; k <= n - 2; ++k) {
            const ConeParams p(n, k);
            const auto c = check_4_minus_n(p, s.series);
            add(out, "four_minus_n_admissible", {{"n", double(n)}, {"k", double(k)}}, 0.0, c.margin, c.ok);
        }
    for (int k = 1; k <= 5; ++k) {
        const auto c = check_4_minus_n(ConeParams(7, k), s.series);
        add(out, "subsolution_margin_n7", {{"k", double(k)}}, 0.03, c.margin, c.margin > 0.03);
    }
}

void suite_lemmas(std::vector<BoundCheck>& out, const Settings&) {
    for (auto& c : proof_constants_check()) out.push_back(std::move(c));
    for (int n : {60, 100, 200})
        for (int k = (n + 2) / 3; 16 * k <= 15 * n; k += std::max(1, n / 25)) out.push_back(root_bound_check(ConeParams(n, k)));
    for (int n : {60, 80, 100})
        for (int k = (n + 1) / 2; k <= n - 12; ++k) out.push_back(overshoot_check(ConeParams(n, k)));
    for (int d = 4; d <= 11; ++d) out.push_back(overshoot_check(ConeParams(16 * d, 15 * d)));
    const double z = estimate_z0(2000, 0.5);
    add(out, "z0_estimate", {{"n", 2000}, {"lam", 0.5}}, 0.80, z, z >= 0.74 && z <= 0.80);
}

void suite_barriers(std::vector<BoundCheck>& out, const Settings&) {
    // Cells inside the lemma hypotheses: d >= 6 and n >= 16 d.
    for (int n : {96, 200, 400})
        for (int d : {6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 20, 40}) {
            if (n < 16 * d) continue;
            const ConeParams p(n, n - d);
            const auto r = verify_barrier(p);
            std::map<std::string, double> params{{"n", double(n)}, {"d", double(d)}};
            add(out, std::string("barrier_") + to_string(r.variant), params, 0.0,
                std::max(r.max_R_lower, r.max_R_upper), r.passed);
            if (r.delta) add(out, "barrier_delta", params, 1.01, *r.delta, *r.delta > 1.01);
        }
}

}  // namespace

std::vector<BoundCheck> run_suite(const std::string& suite, const Settings& s) {
    std::vector<BoundCheck> out;
    const bool all = suite == "all";
    if (!all && suite != "specfun" && suite != "riccati" && suite != "lemmas" && suite != "barriers")
        throw std::invalid_argument("unknown suite: " + suite);
    if (all || suite == "specfun") suite_specfun(out, s);
    if (all || suite == "riccati") suite_riccati(out, s);
    if (all || suite == "lemmas") suite_lemmas(out, s);
    if (all || suite == "barriers") suite_barriers(out, s);
    return out;
}

int emit_verify(const std::vector<BoundCheck>& checks, const std::string& format, std::ostream& out,
                std::ostream& err) {
    std::vector<std::string> failed;
    for (const auto& c : checks)
        if (!c.passed) failed.push_back(c.name);
    if (format == "text") {
        for (const auto& c : checks) {
            out << (c.passed ? "ok   " : "FAIL ") << c.name;
            for (const auto& [k, v] : c.parameters) out << ' ' << k << '=' << v;
            out << " computed=" << c.computed << " claimed=" << c.claimed << '\n';
        }
        out << checks.size() - failed.size() << '/' << checks.size() << " checks passed\n";
    } else {
        json rows = json::array();
        for (const auto& c : checks) rows.push_back(check_json(c));
        out << json{{"schema_version", 1}, {"rows", rows}, {"flags", failed}}.dump(2) << '\n';
    }
    for (const auto& f : failed) err << "failed: " << f << '\n';
    return failed.empty() ? kExitOk : kExitCheckFailed;
}

namespace {

// A t entry that misses while the same row's eigenvalue data match: the
// reference row disagrees with itself.
bool row_consistent_miss(const std::vector<Comparison>& cmp, const Comparison& c) {
    if (c.ok || c.quantity != "t") return false;
    for (const auto& o : cmp)
        if (o.n == c.n && o.k == c.k && o.quantity != "t" && !o.ok) return false;
    return true;
}

void emit_rows(const std::vector<OutputRecord>& rows, const std::vector<std::string>& flags, const std::string& format,
               std::ostream& out, const json& extra = json::object()) {
    if (format == "csv") {
        out << csv_header() << '\n';
        for (const auto& r : rows) out << to_csv_row(r) << '\n';
        return;
    }
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(record_json(r));
    json doc{{"schema_version", 1}, {"rows", arr}, {"flags", flags}};
    for (const auto& [k, v] : extra.items()) doc[k] = v;
    out << doc.dump(2) << '\n';
}

void emit_text(const OutputRecord& r, const StabilityReport& rep, std::ostream& out) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "cone (n, k) = (%d, %d)\n"
                  "  t_nk            %.12f\n"
                  "  verdict         %s\n"
                  "  margin          %.6e\n"
                  "  lambda1         %.10f\n",
                  r.n, r.k, r.t_nk, r.verdict.c_str(), rep.margin, r.lambda1);
    out << buf;
    if (std::isfinite(r.gamma_plus)) {
        std::snprintf(buf, sizeof buf, "  gamma_minus     %.10f\n  gamma_plus      %.10f\n", r.gamma_minus,
                      r.gamma_plus);
        out << buf;
    } else {
        out << "  gamma           complex\n";
    }
    if (rep.admissible) {
        std::snprintf(buf, sizeof buf, "  admissible      (%.10f, %.10f)\n", rep.admissible->lo, rep.admissible->hi);
        out << buf;
    }
    if (r.margin_4_minus_n) {
        std::snprintf(buf, sizeof buf, "  L(s_nk), 4-n    %.6e\n", *r.margin_4_minus_n);
        out << buf;
    }
    for (const auto& f : r.flags) out << "  flag            " << f << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability and spectrum of the O(n-k) x O(k) one-phase cones", "conelab"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value settings file");
    app.add_option("--tol-override", overrides, "KEY=VAL, overrides the config file")->take_all();

    int a_n = 0, a_k = 0;
    std::string a_format = "text";
    auto* analyze = app.add_subcommand("analyze", "Full report for one cone");
    analyze->add_option("--n", a_n, "ambient dimension")->required();
    analyze->add_option("--k", a_k, "O(k) factor")->required();
    analyze->add_option("--format", a_format)->check(CLI::IsMember({"json", "text"}));

    std::vector<int> t_range;
    std::string t_format = "csv";
    bool t_compare = false;
    auto* table = app.add_subcommand("table", "Regenerate the (n, k) grid");
    table->add_option("--n", t_range, "n_min n_max")->expected(2)->required();
    table->add_option("--format", t_format)->check(CLI::IsMember({"csv", "json"}));
    table->add_flag("--compare", t_compare, "diff against the reference table (n = 7..12)");

    std::string v_suite = "all", v_format = "json";
    auto* verify = app.add_subcommand("verify", "Run a verification battery");
    verify->add_option("--suite", v_suite)->check(CLI::IsMember({"all", "specfun", "riccati", "lemmas", "barriers"}));
    verify->add_option("--format", v_format)->check(CLI::IsMember({"json", "text"}));

    int s_nmax = 15;
    std::string s_format = "csv";
    auto* scan = app.add_subcommand("scan", "Family scan with monotonicity and bound flags");
    scan->add_option("--n-max", s_nmax)->check(CLI::Range(3, 40));
    scan->add_option("--format", s_format)->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    Settings settings;
    try {
        if (!config_path.empty()) load_config_file(settings, config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--tol-override expects KEY=VAL: " + kv);
            apply_setting(settings, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        settings.series.validate();
        settings.shooting.validate();
    } catch (const std::exception& e) {
        err << "conelab: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*analyze) {
            std::optional<ConeParams> p;
            try {
                p.emplace(a_n, a_k);
            } catch (const Error& e) {
                err << "conelab: " << e.what() << '\n';
                return kExitUsage;
            }
            const auto rec = analyze_cone(*p, settings);
            if (a_format == "json") {
                emit_rows({rec}, {}, "json", out);
            } else {
                emit_text(rec, verdict(*p, settings.series), out);
            }
            return kExitOk;
        }
        if (*table) {
            const int lo = t_range[0], hi = t_range[1];
            if (!(3 <= lo && lo <= hi && hi <= 40)) {
                err << "conelab: table needs 3 <= n_min <= n_max <= 40\n";
                return kExitUsage;
            }
            const auto rows = analyze_grid(lo, hi, settings);
            if (!t_compare) {
                emit_rows(rows, {}, t_format, out);
                return kExitOk;
            }
            const auto cmp = compare_with_reference(rows, settings);
            bool ok = true;
            std::vector<std::string> flags;
            for (const auto& c : cmp) {
                if (c.flagged) {
                    flags.push_back("suspected_typo:" + c.quantity + "(" + std::to_string(c.n) + "," +
                                    std::to_string(c.k) + ")");
                } else if (!c.ok) {
                    ok = false;
                }
            }
            if (t_format == "csv") {
                out << "n,k,quantity,reference,computed,deviation,tolerance,status\n";
                for (const auto& c : cmp) {
                    const char* st = c.flagged ? "flagged" : (c.ok ? "ok" : (row_consistent_miss(cmp, c) ? "fail_row_inconsistent" : "fail"));
                    out << c.n << ',' << c.k << ',' << c.quantity << ',' << fmt6(c.reference) << ','
                        << fmt6(c.computed) << ',' << fmt6(c.computed - c.reference) << ',' << fmt6(c.tolerance)
                        << ',' << st << '\n';
                }
            } else {
                json arr = json::array();
                for (const auto& c : cmp)
                    arr.push_back({{"n", c.n},
                                   {"k", c.k},
                                   {"quantity", c.quantity},
                                   {"reference", c.reference},
                                   {"computed", c.computed},
                                   {"deviation", c.computed - c.reference},
                                   {"tolerance", c.tolerance},
                                   {"flagged", c.flagged},
                                   {"ok", c.ok}});
                emit_rows(rows, flags, "json", out, json{{"comparison", arr}});
            }
            // Flagged entries are never fatal, but always surfaced.
            for (const auto& c : cmp)
                if (c.flagged) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "flagged %s(%d,%d): reference %.3f, computed %.6f\n",
                                  c.quantity.c_str(), c.n, c.k, c.reference, c.computed);
                    err << buf;
                }
            for (const auto& c : cmp)
                if (!c.flagged && !c.ok) {
                    char buf[200];
                    std::snprintf(buf, sizeof buf, "mismatch %s(%d,%d): reference %.3f, computed %.6f%s\n",
                                  c.quantity.c_str(), c.n, c.k, c.reference, c.computed,
                                  row_consistent_miss(cmp, c) ? " (rest of the row matches)" : "");
                    err << buf;
                }
            return ok ? kExitOk : kExitCheckFailed;
        }
        if (*verify) return emit_verify(run_suite(v_suite, settings), v_format, out, err);
        if (*scan) {
            const auto rep = family_scan(3, s_nmax, settings.threads, settings.series, settings.shooting);
            const auto rows = analyze_grid(3, s_nmax, settings);
            const std::pair<const char*, bool> named[] = {
                {"increasing_in_k", rep.increasing_in_k},
                {"lambda_bound", rep.lambda_bound},
                {"gamma_bar_range", rep.gamma_bar_range},
                {"gamma_minus_bound", rep.gamma_minus_bound},
                {"gamma_plus_bound", rep.gamma_plus_bound},
                {"gamma_bar_increasing", rep.gamma_bar_increasing},
                {"lambda_bar_decreasing", rep.lambda_bar_decreasing},
            };
            std::vector<std::string> flags;
            for (const auto& [name, v] : named) flags.push_back(std::string(name) + (v ? ":ok" : ":fail"));
            emit_rows(rows, flags, s_format, out);
            if (s_format == "csv")
                for (const auto& f : flags) err << f << '\n';
            // Exit status follows the three claims: monotone in k, the lower
            // bound on lambda_1, and the range of gamma_bar.
            const bool ok = rep.increasing_in_k && rep.lambda_bound && rep.gamma_bar_range;
            return ok ? kExitOk : kExitCheckFailed;
        }
    } catch (const Error& e) {
        err << "conelab: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        err << "conelab: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace conelab::cli
