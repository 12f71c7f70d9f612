// Command-line front end. Kept in a library so tests can drive it without
// spawning processes.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conelab/lemmas.hpp"
#include "conelab/spectrum.hpp"

namespace conelab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Settings {
    SeriesControl series;
    ShootingConfig shooting;
    int threads = 0;            // 0: CONELAB_THREADS or hardware concurrency
    double table_tol_t = 0.01;  // the reference t column has two decimals
    double table_tol_value = 0.005;
};

// Applies one key=value pair. Throws std::invalid_argument on unknown keys or
// malformed values.
void apply_setting(Settings& s, const std::string& key, const std::string& value);

// key=value lines; '#' starts a comment.
void load_config_file(Settings& s, const std::string& path);

struct OutputRecord {
    int n;
    int k;
    double t_nk;
    double lambda1;
    double gamma_plus;   // NaN when complex
    double gamma_minus;  // NaN when complex
    std::string verdict;
    std::optional<double> margin_4_minus_n;  // empty for n < 5
    std::vector<std::string> flags;
};

OutputRecord analyze_cone(const ConeParams& p, const Settings& s);
std::vector<OutputRecord> analyze_grid(int n_min, int n_max, const Settings& s);

std::string csv_header();
std::string to_csv_row(const OutputRecord& r);

// Reference values of the published table, n = 7..12.
struct ReferenceEntry {
    int n;
    int k;
    double t;
    double neg_lambda1;
    double neg_gamma_plus;
};
const std::vector<ReferenceEntry>& reference_table();

// Entries of the reference table known to be inconsistent with their own
// definitions: name -> quantity.
bool is_flagged_entry(int n, int k, const std::string& quantity);

struct Comparison {
    int n;
    int k;
    std::string quantity;  // "t", "neg_lambda1", "neg_gamma_plus"
    double reference;
    double computed;
    double tolerance;
    bool flagged;
    bool ok;
};
std::vector<Comparison> compare_with_reference(const std::vector<OutputRecord>& rows, const Settings& s);

// Verification suites: all, specfun, riccati, lemmas, barriers.
std::vector<BoundCheck> run_suite(const std::string& suite, const Settings& s);

// Writes the verify report and returns the exit code it implies.
int emit_verify(const std::vector<BoundCheck>& checks, const std::string& format, std::ostream& out,
                std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conelab::cli
