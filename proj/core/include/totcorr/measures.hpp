#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "totcorr/states.hpp"

namespace totcorr {

// All entropies are in bits. Mixed inputs are validated (tolerance 1e-10)
// and evaluated directly; convex-roof values live in roof.hpp.

/// Eigenvalues below this are treated as exact zeros in entropy sums.
inline constexpr double kEigenvalueClamp = 1e-12;

enum class MeasureKind { M, O, S, MW };

std::string_view to_string(MeasureKind kind);
std::optional<MeasureKind> parse_measure(std::string_view name);

/// -sum lambda log2 lambda over a (possibly unnormalized) spectrum.
double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues);

double von_neumann_entropy(const DensityMatrix& rho);
double linear_entropy(const DensityMatrix& rho);

/// I(A:B) = S(A) + S(B) - S(AB) on the reduced state of A u B.
double mutual_information(const State& state, std::span<const int> a, std::span<const int> b);

/// P(i, j) = I(i:j) / 2.
double pairwise_probe(const State& state, int i, int j);

/// Sum of P(i, j) over unordered pairs i < j.
double measure_M(const State& state);
/// (sum_i S(rho_i) - S(rho)) / 2.
double measure_O(const State& state);
/// (O + M) / 2.
double measure_S(const State& state);
/// Meyer-Wallach form: sum_i of single-site linear entropies.
double measure_MW(const State& state);

double evaluate(MeasureKind kind, const State& state);

/// S(R) + S(R^c) - S(all) for a proper non-empty subset R.
double bipartite_correlation(const State& state, std::span<const int> part);

/// Sum of bipartite_correlation over the 2^(N-1) - 1 bipartitions (each
/// subset/complement pair once). Throws ResourceError for N > 12.
double subset_correlation_sum(const State& state);

/// Tr rho (log2 rho - log2 sigma). Throws DomainError when rho has weight
/// outside the support of sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// [sum_{i<j} S(rho_ij || rho_i (x) rho_j) + S(rho || rho_1 (x) ... (x) rho_N)] / 4.
double measure_S_form2(const State& state);

/// C(n,2) / (2 - delta_{n,2}) * log2 d.
double bound_M(int n, int d);
/// (C(n,2) / (2 - delta_{n,2}) + n / 2) / 2 * log2 d.
double bound_S(int n, int d);

/// S(XY) + S(YZ) - S(Y) - S(XYZ) for a three-subsystem state (X, Y, Z) =
/// (0, 1, 2). Non-negative by strong subadditivity.
double ssa_check(const DensityMatrix& rho);

struct PairValue {
    int i;
    int j;
    double value;
};

struct MeasureReport {
    RegisterShape shape;
    std::vector<PairValue> pairs;
    double O = 0.0;
    double M = 0.0;
    double S = 0.0;
    double MW = 0.0;
    double bound_M = 0.0;
    double bound_S = 0.0;
};

/// Evaluates every measure once; bounds use the largest local dimension.
MeasureReport measure_report(const State& state);

/// A measure written as sum_t weight_t * H_t(rho_{subsystems_t}), with H the
/// von Neumann entropy or, when `linear`, the linear entropy.
struct EntropyTerm {
    std::vector<int> subsystems;
    double weight = 0.0;
    bool linear = false;
};

std::vector<EntropyTerm> entropy_terms(MeasureKind kind, const RegisterShape& shape);

} // namespace totcorr
