#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "totcorr/errors.hpp"
#include "totcorr/parallel.hpp"
#include "totcorr/state_io.hpp"

namespace totcorr::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

int require_n(const StateSource& s) {
    if (!s.n) throw ArgumentError("state '" + s.name + "' requires --n");
    return *s.n;
}

double require_x(const StateSource& s) {
    if (!s.x) throw ArgumentError("state '" + s.name + "' requires --x");
    return *s.x;
}

DensityMatrix werner(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("werner weight --p must lie in [0, 1]");
    const RegisterShape shape({2, 2});
    Matrix m = p * dm(epr()).matrix() + (1.0 - p) * DensityMatrix::maximally_mixed(shape).matrix();
    return DensityMatrix(shape, std::move(m));
}

DensityMatrix classical_pair() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 0.5;
    m(3, 3) = 0.5;
    return DensityMatrix(RegisterShape({2, 2}), std::move(m));
}

double json_number(double v) { return std::stod(format_number(v)); }

ordered_json state_json(const State& state) {
    ordered_json doc;
    doc["dims"] = shape_of(state).dims();
    auto pair = [](Complex z) { return ordered_json::array({json_number(z.real()), json_number(z.imag())}); };
    if (const auto* psi = std::get_if<PureState>(&state)) {
        ordered_json amps = ordered_json::array();
        for (Eigen::Index i = 0; i < psi->amplitudes().size(); ++i) amps.push_back(pair(psi->amplitudes()(i)));
        doc["amplitudes"] = std::move(amps);
    } else {
        const auto& m = std::get<DensityMatrix>(state).matrix();
        ordered_json rows = ordered_json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(pair(m(i, j)));
            rows.push_back(std::move(row));
        }
        doc["matrix"] = std::move(rows);
    }
    return doc;
}

} // namespace

State load_state(const StateSource& s) {
    if (!s.file.empty()) {
        if (!s.name.empty()) throw ArgumentError("use either --state or --file, not both");
        return read_state_file(s.file);
    }
    const auto& name = s.name;
    if (name.empty()) throw ArgumentError("a state is required: --state <name> or --file <path>");
    if (name == "ghz") return ghz(require_n(s));
    if (name == "w") return w(require_n(s));
    if (name == "wbar") return wbar(require_n(s));
    if (name == "cluster") return cluster(require_n(s));
    if (name == "epr") return epr();
    if (name == "epr_power") return epr_power(require_n(s));
    if (name == "family1") return family1(require_x(s), require_n(s));
    if (name == "family2") return family2(require_x(s), require_n(s));
    if (name == "werner") {
        if (!s.p) throw ArgumentError("state 'werner' requires --p");
        return werner(*s.p);
    }
    if (name == "classical") return classical_pair();
    throw ArgumentError("unknown state name: " + name);
}

std::string format_number(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    // Round-off residue of exact zeros prints as 0.
    if (std::abs(value) < 1e-12) value = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string report_json(const MeasureReport& report) {
    ordered_json doc;
    doc["shape"] = report.shape.dims();
    ordered_json pairs = ordered_json::array();
    for (const auto& p : report.pairs) {
        ordered_json entry;
        entry["i"] = p.i;
        entry["j"] = p.j;
        entry["P"] = json_number(p.value);
        pairs.push_back(std::move(entry));
    }
    doc["pairs"] = std::move(pairs);
    doc["O"] = json_number(report.O);
    doc["M"] = json_number(report.M);
    doc["S"] = json_number(report.S);
    doc["MW"] = json_number(report.MW);
    doc["bound_M"] = json_number(report.bound_M);
    doc["bound_S"] = json_number(report.bound_S);
    return doc.dump(2) + "\n";
}

std::string report_csv(const MeasureReport& report) {
    std::string dims;
    for (std::size_t i = 0; i < report.shape.size(); ++i) dims += (i ? "x" : "") + std::to_string(report.shape.dim(i));
    std::ostringstream os;
    os << "shape,O,M,S,MW,bound_M,bound_S\n"
       << dims << ',' << format_number(report.O) << ',' << format_number(report.M) << ','
       << format_number(report.S) << ',' << format_number(report.MW) << ',' << format_number(report.bound_M) << ','
       << format_number(report.bound_S) << '\n';
    return os.str();
}

std::string_view to_string(Family family) {
    switch (family) {
    case Family::ghz: return "ghz";
    case Family::cluster: return "cluster";
    case Family::w: return "w";
    case Family::wbar: return "wbar";
    case Family::epr_power: return "epr_power";
    case Family::family1: return "family1";
    case Family::family2: return "family2";
    }
    return "?";
}

std::optional<Family> parse_family(std::string_view name) {
    for (auto f : {Family::ghz, Family::cluster, Family::w, Family::wbar, Family::epr_power, Family::family1,
                   Family::family2})
        if (to_string(f) == name) return f;
    return std::nullopt;
}

int family_min_n(Family family) {
    switch (family) {
    case Family::cluster: return 4;
    case Family::family1:
    case Family::family2: return 3;
    default: return 2;
    }
}

bool family_needs_even(Family family) { return family == Family::cluster || family == Family::epr_power; }
bool family_uses_x(Family family) { return family == Family::family1 || family == Family::family2; }

std::vector<double> x_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw ArgumentError("x step must lie in (0, 1]");
    std::vector<double> grid;
    const auto count = static_cast<int>(std::floor(1.0 / step + 1e-9));
    for (int i = 0; i <= count; ++i) grid.push_back(std::round(i * step * 100.0) / 100.0);
    if (grid.back() < 1.0) grid.push_back(1.0);
    return grid;
}

SweepSpec default_sweep() {
    SweepSpec spec;
    spec.families = {Family::ghz, Family::cluster, Family::w, Family::wbar, Family::epr_power, Family::family1,
                     Family::family2};
    for (int n = 2; n <= 12; ++n) spec.n_range.push_back(n);
    spec.x_grid = x_grid(0.05);
    return spec;
}

namespace {

PureState family_state(Family family, int n, double x) {
    switch (family) {
    case Family::ghz: return ghz(n);
    case Family::cluster: return cluster(n);
    case Family::w: return w(n);
    case Family::wbar: return wbar(n);
    case Family::epr_power: return epr_power(n);
    case Family::family1: return family1(x, n);
    case Family::family2: return family2(x, n);
    }
    throw ArgumentError("unknown family");
}

struct Point {
    Family family;
    int n;
    std::optional<double> x;
};

} // namespace

std::vector<ReportRow> run_sweep(const SweepSpec& spec, unsigned threads) {
    for (double x : spec.x_grid)
        if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("x grid values must lie in [0, 1]");
    auto families = spec.families;
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
    auto ns = spec.n_range;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    auto xs = spec.x_grid;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<Point> points;
    for (auto f : families)
        for (int n : ns) {
            if (n < family_min_n(f) || (family_needs_even(f) && n % 2 != 0)) continue;
            if (family_uses_x(f)) {
                for (double x : xs) points.push_back({f, n, x});
            } else {
                points.push_back({f, n, std::nullopt});
            }
        }

    // GHZ_n reference values per n (same measure).
    std::map<int, MeasureReport> ghz_ref;
    if (spec.normalize_to_ghz)
        for (const auto& p : points)
            if (!ghz_ref.count(p.n)) ghz_ref.emplace(p.n, measure_report(ghz(p.n)));

    std::vector<std::optional<ReportRow>> rows(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const auto& p = points[i];
        const auto report = measure_report(family_state(p.family, p.n, p.x.value_or(0.0)));
        ReportRow row{p.family, p.n, p.x, report.O, report.M, report.S, report.MW, 1.0, 1.0, 1.0};
        if (spec.normalize_to_ghz) {
            const auto& ref = ghz_ref.at(p.n);
            row.O_rel = report.O / ref.O;
            row.M_rel = report.M / ref.M;
            row.S_rel = report.S / ref.S;
        } else {
            row.O_rel = row.O;
            row.M_rel = row.M;
            row.S_rel = row.S;
        }
        rows[i] = row;
    });
    std::vector<ReportRow> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(*r);
    return out;
}

std::string sweep_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "family,n,x,O,M,S,MW,O_rel,M_rel,S_rel\n";
    for (const auto& r : rows) {
        os << to_string(r.family) << ',' << r.n << ',';
        if (r.x) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", *r.x);
            os << buf;
        }
        os << ',' << format_number(r.O) << ',' << format_number(r.M) << ',' << format_number(r.S) << ','
           << format_number(r.MW) << ',' << format_number(r.O_rel) << ',' << format_number(r.M_rel) << ','
           << format_number(r.S_rel) << '\n';
    }
    return os.str();
}

std::string roof_json(const RoofResult& result, MeasureKind kind, const RoofConfig& config) {
    ordered_json doc;
    doc["measure"] = std::string(to_string(kind));
    doc["strategy"] = std::string(to_string(config.strategy));
    doc["value"] = json_number(result.value);
    doc["converged"] = result.converged;
    doc["rank"] = result.rank;
    doc["ensemble_size"] = result.ensemble_size;
    ordered_json restarts = ordered_json::array();
    for (double v : result.per_restart_values) restarts.push_back(json_number(v));
    doc["per_restart_values"] = std::move(restarts);
    ordered_json weights = ordered_json::array();
    ordered_json members = ordered_json::array();
    for (std::size_t i = 0; i < result.ensemble.size(); ++i) {
        weights.push_back(json_number(result.ensemble.weights()[i]));
        members.push_back(state_json(result.ensemble.members()[i]));
    }
    doc["ensemble"] = {{"weights", std::move(weights)}, {"members", std::move(members)}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// verify

std::string_view to_string(Suite suite) {
    switch (suite) {
    case Suite::entropy: return "entropy";
    case Suite::bounds: return "bounds";
    case Suite::additivity: return "additivity";
    case Suite::flags: return "flags";
    case Suite::pcrc: return "pcrc";
    case Suite::form2: return "form2";
    }
    return "?";
}

std::optional<Suite> parse_suite(std::string_view name) {
    for (auto s : {Suite::entropy, Suite::bounds, Suite::additivity, Suite::flags, Suite::pcrc, Suite::form2})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

bool VerifySummary::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok(); });
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t salt, int trial) {
    return seed * 0x9E3779B97F4A7C15ULL + salt * 1000003ULL + static_cast<std::uint64_t>(trial);
}

// Tracks one check: `upper` checks require residual <= threshold, the others
// residual >= threshold.
class Check {
public:
    Check(std::string name, double threshold, bool upper) : upper_(upper) {
        result_.name = std::move(name);
        result_.threshold = threshold;
        result_.worst_residual = upper ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
    }

    void record(int trial, double residual, const State& instance, bool waived = false) {
        ++result_.trials;
        result_.worst_residual = upper_ ? std::max(result_.worst_residual, residual)
                                        : std::min(result_.worst_residual, residual);
        const bool pass = upper_ ? residual <= result_.threshold : residual >= result_.threshold;
        if (pass || waived) {
            ++result_.passed;
            return;
        }
        result_.failures.push_back({trial, residual, state_json(instance).dump()});
    }

    CheckResult take() { return std::move(result_); }

private:
    CheckResult result_;
    bool upper_;
};

int or_default(int trials, int fallback) { return trials > 0 ? trials : fallback; }

std::vector<CheckResult> verify_entropy(std::uint64_t seed, int trials) {
    Check ssa("ssa_residual_3qubit", -1e-8, false);
    Check range("entropy_in_0_log2D", 1e-9, true);
    for (int t = 0; t < or_default(trials, 200); ++t) {
        const auto rho = random_density(RegisterShape::qubits(3), 1 + t % 8, trial_seed(seed, 1, t));
        ssa.record(t, ssa_check(rho), rho);
        const double s = von_neumann_entropy(rho);
        range.record(t, std::max(-s, s - 3.0), rho);
    }
    return {ssa.take(), range.take()};
}

std::vector<CheckResult> verify_bounds(std::uint64_t seed, int trials) {
    Check attain("ghz_attains_bound_M_n2to8", 1e-9, true);
    for (int n = 2; n <= 8; ++n) {
        const auto psi = ghz(n);
        attain.record(n, std::abs(measure_M(psi) - bound_M(n, 2)), psi);
    }
    std::vector<CheckResult> out{attain.take()};
    for (int n = 3; n <= 5; ++n) {
        Check m("M_le_bound_M_N" + std::to_string(n), 1e-9, true);
        Check s("S_le_bound_S_N" + std::to_string(n), 1e-9, true);
        for (int t = 0; t < or_default(trials, 500); ++t) {
            const auto psi = random_pure(RegisterShape::qubits(n), trial_seed(seed, 10 + n, t));
            const auto report = measure_report(psi);
            m.record(t, report.M - report.bound_M, psi);
            s.record(t, report.S - report.bound_S, psi);
        }
        out.push_back(m.take());
        out.push_back(s.take());
    }
    return out;
}

std::vector<CheckResult> verify_additivity(std::uint64_t seed, int trials) {
    const MeasureKind kinds[] = {MeasureKind::M, MeasureKind::O, MeasureKind::S};
    std::vector<Check> add, ssa;
    for (auto k : kinds) {
        add.emplace_back("add_" + std::string(to_string(k)) + "_2x2", 1e-8, true);
        ssa.emplace_back("ssa_" + std::string(to_string(k)) + "_4qubit", -1e-8, false);
    }
    const auto two = RegisterShape::qubits(2);
    for (int t = 0; t < or_default(trials, 100); ++t) {
        const auto sigma = random_pure(two, trial_seed(seed, 20, t));
        const auto eta = random_pure(two, trial_seed(seed, 21, t));
        const PureState parts[] = {sigma, eta};
        const auto joint = product(parts);
        const auto psi4 = random_pure(RegisterShape::qubits(4), trial_seed(seed, 22, t));
        const int left[] = {0, 1};
        const int right[] = {2, 3};
        const State rho12 = marginal(psi4, left);
        const State rho34 = marginal(psi4, right);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto k = kinds[i];
            add[i].record(t, std::abs(evaluate(k, joint) - evaluate(k, sigma) - evaluate(k, eta)), joint);
            ssa[i].record(t, evaluate(k, psi4) - evaluate(k, rho12) - evaluate(k, rho34), psi4);
        }
    }
    std::vector<CheckResult> out;
    for (auto& c : add) out.push_back(c.take());
    for (auto& c : ssa) out.push_back(c.take());
    return out;
}

std::vector<CheckResult> verify_flags(std::uint64_t seed, int trials, const RoofConfig& roof) {
    Check flags("flags_residual_M_2member", 5e-3, true);
    const auto two = RegisterShape::qubits(2);
    for (int t = 0; t < or_default(trials, 10); ++t) {
        std::mt19937_64 rng(trial_seed(seed, 30, t));
        const double p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        Ensemble e({p, 1.0 - p}, {random_pure(two, trial_seed(seed, 31, t)), random_pure(two, trial_seed(seed, 32, t))});
        RoofConfig cfg = roof;
        cfg.seed = trial_seed(seed, 33, t);
        flags.record(t, flags_residual(e, MeasureKind::M, cfg), flagged_mixture(e));
    }
    return {flags.take()};
}

std::vector<CheckResult> verify_pcrc(std::uint64_t seed, int trials, const RoofConfig& roof) {
    const int two_count = or_default(trials, 100);
    const int three_count = std::max(1, (two_count * 3) / 10);
    Check two("pcrc_gap_M_2qubit", -1e-6, false);
    Check three("pcrc_gap_M_3qubit", -1e-6, false);
    auto run = [&](Check& check, int qubits, int count, std::uint64_t salt) {
        const auto shape = RegisterShape::qubits(qubits);
        for (int t = 0; t < count; ++t) {
            const auto rho = random_density(shape, static_cast<int>(shape.total()), trial_seed(seed, salt, t));
            RoofConfig cfg = roof;
            cfg.seed = trial_seed(seed, salt + 1, t);
            const auto report = pcrc_report(rho, MeasureKind::M, cfg);
            // Only converged optimizer runs can witness a violation.
            check.record(t, report.gap, rho, !report.roof.converged);
        }
    };
    run(two, 2, two_count, 40);
    run(three, 3, three_count, 50);
    return {two.take(), three.take()};
}

std::vector<CheckResult> verify_form2(std::uint64_t seed, int trials) {
    Check form2("form2_equals_S", 1e-8, true);
    for (int t = 0; t < or_default(trials, 100); ++t) {
        const auto psi = random_pure(RegisterShape::qubits(3 + t % 3), trial_seed(seed, 60, t));
        form2.record(t, std::abs(measure_S_form2(psi) - measure_S(psi)), psi);
    }
    return {form2.take()};
}

} // namespace

VerifySummary run_verify(Suite suite, std::uint64_t seed, int trials, const RoofConfig& roof) {
    VerifySummary summary{suite, {}};
    switch (suite) {
    case Suite::entropy: summary.checks = verify_entropy(seed, trials); break;
    case Suite::bounds: summary.checks = verify_bounds(seed, trials); break;
    case Suite::additivity: summary.checks = verify_additivity(seed, trials); break;
    case Suite::flags: summary.checks = verify_flags(seed, trials, roof); break;
    case Suite::pcrc: summary.checks = verify_pcrc(seed, trials, roof); break;
    case Suite::form2: summary.checks = verify_form2(seed, trials); break;
    }
    return summary;
}

std::string verify_json(const VerifySummary& summary) {
    ordered_json doc;
    doc["suite"] = std::string(to_string(summary.suite));
    doc["pass"] = summary.ok();
    ordered_json checks = ordered_json::array();
    for (const auto& c : summary.checks) {
        ordered_json entry;
        entry["name"] = c.name;
        entry["trials"] = c.trials;
        entry["passed"] = c.passed;
        entry["worst_residual"] = json_number(c.worst_residual);
        entry["threshold"] = c.threshold;
        ordered_json failures = ordered_json::array();
        for (const auto& f : c.failures) {
            ordered_json fe;
            fe["trial"] = f.trial;
            fe["residual"] = json_number(f.residual);
            fe["instance"] = ordered_json::parse(f.instance);
            failures.push_back(std::move(fe));
        }
        entry["failures"] = std::move(failures);
        checks.push_back(std::move(entry));
    }
    doc["checks"] = std::move(checks);
    return doc.dump(2) + "\n";
}

std::string verify_csv(const VerifySummary& summary) {
    std::ostringstream os;
    os << "suite,check,trials,passed,worst_residual,threshold,pass\n";
    for (const auto& c : summary.checks)
        os << to_string(summary.suite) << ',' << c.name << ',' << c.trials << ',' << c.passed << ','
           << format_number(c.worst_residual) << ',' << format_number(c.threshold) << ',' << (c.ok() ? "true" : "false")
           << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// command line

namespace {

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stoi(item));
            } else {
                const int lo = std::stoi(item.substr(0, dots));
                const int hi = std::stoi(item.substr(dots + 2));
                if (hi < lo) throw ArgumentError("empty n range: " + item);
                for (int n = lo; n <= hi; ++n) out.push_back(n);
            }
        } catch (const std::logic_error&) {
            throw ArgumentError("bad --n value: " + item);
        }
    }
    if (out.empty()) throw ArgumentError("--n list is empty");
    return out;
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
    if (output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(output);
    if (!file) throw ArgumentError("cannot write output file: " + output);
    file << text;
    if (!file) throw ArgumentError("failed writing output file: " + output);
}

void add_state_options(CLI::App* cmd, StateSource& source) {
    cmd->add_option("--state", source.name, "Named state (ghz, w, wbar, cluster, epr, epr_power, family1, family2, "
                                            "werner, classical)");
    cmd->add_option("--n", source.n, "Number of qubits for named families");
    cmd->add_option("--x", source.x, "Family parameter x in [0, 1]");
    cmd->add_option("--p", source.p, "Werner weight p in [0, 1]");
    cmd->add_option("--file", source.file, "State JSON file");
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Total-correlation measures for multipartite qudit states"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string format = "json";
    std::string output;
    app.add_option("--seed", seed, "Base random seed");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", output, "Write output to this path instead of stdout");

    StateSource measure_src;
    auto* measure_cmd = app.add_subcommand("measure", "Evaluate all measures on one state");
    add_state_options(measure_cmd, measure_src);

    std::vector<std::string> families;
    std::string n_list = "2..12";
    double x_step = 0.05;
    std::vector<double> x_values;
    bool no_normalize = false;
    unsigned threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate measures over state families (CSV)");
    sweep_cmd->add_option("--family", families, "Families to sweep (default: all)")->delimiter(',');
    sweep_cmd->add_option("--n", n_list, "n values, e.g. 2..12 or 4,6,8");
    sweep_cmd->add_option("--x-step", x_step, "Step of the x grid for family1/family2");
    sweep_cmd->add_option("--x", x_values, "Explicit x values (overrides --x-step)")->delimiter(',');
    sweep_cmd->add_flag("--no-normalize", no_normalize, "Report raw values in the *_rel columns");
    sweep_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");

    StateSource roof_src;
    RoofConfig roof_cfg;
    std::string measure_name = "M";
    std::string strategy = "pure_roof";
    int ensemble_size = 0;
    auto* roof_cmd = app.add_subcommand("roof", "Convex-roof minimization on a mixed state");
    add_state_options(roof_cmd, roof_src);
    roof_cmd->add_option("--measure", measure_name, "M, O, S or MW")->check(CLI::IsMember({"M", "O", "S", "MW"}));
    roof_cmd->add_option("--strategy", strategy)->check(CLI::IsMember({"pure_roof", "mixed_roof"}));
    roof_cmd->add_option("--restarts", roof_cfg.restarts);
    roof_cmd->add_option("--max-iterations", roof_cfg.max_iterations);
    roof_cmd->add_option("--tolerance", roof_cfg.tolerance);
    roof_cmd->add_option("--ensemble-size", ensemble_size, "Members m (default rank^2)");
    roof_cmd->add_option("--max-dimension", roof_cfg.max_dimension);
    roof_cmd->add_option("--threads", roof_cfg.threads);

    std::string suite_name;
    int trials = 0;
    auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
    verify_cmd->add_option("suite", suite_name, "entropy, bounds, additivity, flags, pcrc or form2")
        ->required()
        ->check(CLI::IsMember({"entropy", "bounds", "additivity", "flags", "pcrc", "form2"}));
    verify_cmd->add_option("--trials", trials, "Trials per check (0 = suite default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*measure_cmd) {
            const auto report = measure_report(load_state(measure_src));
            emit(format == "csv" ? report_csv(report) : report_json(report), output, out);
            return kSuccess;
        }
        if (*sweep_cmd) {
            SweepSpec spec;
            if (families.empty()) {
                spec.families = default_sweep().families;
            } else {
                for (const auto& f : families) {
                    auto parsed = parse_family(f);
                    if (!parsed) throw ArgumentError("unknown family: " + f);
                    spec.families.push_back(*parsed);
                }
            }
            spec.n_range = parse_n_list(n_list);
            spec.x_grid = x_values.empty() ? x_grid(x_step) : x_values;
            spec.normalize_to_ghz = !no_normalize;
            emit(sweep_csv(run_sweep(spec, threads)), output, out);
            return kSuccess;
        }
        if (*roof_cmd) {
            const auto kind = *parse_measure(measure_name);
            roof_cfg.strategy = *parse_strategy(strategy);
            roof_cfg.seed = seed;
            if (ensemble_size > 0) roof_cfg.ensemble_size = ensemble_size;
            const auto state = load_state(roof_src);
            const auto rho = to_density(state);
            if (rho.dimension() > roof_cfg.max_dimension)
                throw ResourceError("dimension " + std::to_string(rho.dimension()) + " exceeds --max-dimension " +
                                    std::to_string(roof_cfg.max_dimension));
            const auto result = roof_minimize(rho, kind, roof_cfg);
            emit(roof_json(result, kind, roof_cfg), output, out);
            return kSuccess;
        }
        if (*verify_cmd) {
            const auto summary = run_verify(*parse_suite(suite_name), seed, trials);
            emit(format == "csv" ? verify_csv(summary) : verify_json(summary), output, out);
            if (!summary.ok()) {
                err << "verify " << suite_name << ": FAILED\n";
                return kVerificationFailed;
            }
            return kSuccess;
        }
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kResourceCap;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

} // namespace totcorr::cli
