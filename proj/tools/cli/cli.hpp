#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "totcorr/roof.hpp"

namespace totcorr::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
    kResourceCap = 3,
};

/// Where a command takes its state from: a named state or a state file.
struct StateSource {
    std::string name; ///< ghz, w, wbar, cluster, epr, epr_power, family1, family2, werner, classical
    std::optional<int> n;
    std::optional<double> x;
    std::optional<double> p; ///< werner mixing weight
    std::string file;
};

State load_state(const StateSource& source);

/// Fixed-precision number formatting shared by every output format.
std::string format_number(double value);

std::string report_json(const MeasureReport& report);
std::string report_csv(const MeasureReport& report);

enum class Family { ghz, cluster, w, wbar, epr_power, family1, family2 };

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);
/// Smallest n the family accepts and whether n must be even.
int family_min_n(Family family);
bool family_needs_even(Family family);
bool family_uses_x(Family family);

struct SweepSpec {
    std::vector<Family> families;
    std::vector<int> n_range;
    std::vector<double> x_grid;
    bool normalize_to_ghz = true;
};

/// Default sweep: every family, n = 2..12, x = 0.00, 0.05, ..., 1.00.
SweepSpec default_sweep();
std::vector<double> x_grid(double step);

struct ReportRow {
    Family family;
    int n;
    std::optional<double> x;
    double O, M, S, MW;
    double O_rel, M_rel, S_rel;
};

/// Evaluates every grid point; rows come back ordered by (family, n, x).
std::vector<ReportRow> run_sweep(const SweepSpec& spec, unsigned threads = 0);
std::string sweep_csv(const std::vector<ReportRow>& rows);

std::string roof_json(const RoofResult& result, MeasureKind kind, const RoofConfig& config);

enum class Suite { entropy, bounds, additivity, flags, pcrc, form2 };

std::string_view to_string(Suite suite);
std::optional<Suite> parse_suite(std::string_view name);

struct CheckFailure {
    int trial;
    double residual;
    std::string instance; ///< state document for replay
};

struct CheckResult {
    std::string name;
    int trials = 0;
    int passed = 0;
    double worst_residual = 0.0;
    double threshold = 0.0;
    std::vector<CheckFailure> failures;
    bool ok() const { return passed == trials; }
};

struct VerifySummary {
    Suite suite;
    std::vector<CheckResult> checks;
    bool ok() const;
};

/// Runs one verification suite. `trials` of 0 uses the suite default.
VerifySummary run_verify(Suite suite, std::uint64_t seed, int trials, const RoofConfig& roof = {});

std::string verify_json(const VerifySummary& summary);
std::string verify_csv(const VerifySummary& summary);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace totcorr::cli
