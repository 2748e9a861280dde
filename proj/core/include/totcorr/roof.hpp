#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "totcorr/measures.hpp"

namespace totcorr {

enum class RoofStrategy { pure_roof, mixed_roof };

std::string_view to_string(RoofStrategy strategy);
std::optional<RoofStrategy> parse_strategy(std::string_view name);

struct RoofConfig {
    /// Number of ensemble members m; defaults to rank(rho)^2.
    std::optional<int> ensemble_size;
    int restarts = 20;
    /// Per restart; one iteration is a rotation sweep or a gradient step.
    int max_iterations = 2000;
    /// Stop once an iteration improves the objective by less than this.
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    RoofStrategy strategy = RoofStrategy::pure_roof;
    /// Hard cap on the Hilbert-space dimension D.
    std::size_t max_dimension = 256;
    /// Worker threads for restarts; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct RoofResult {
    /// Upper bound on the convex roof: sum_i p_i measure(member_i).
    double value = 0.0;
    Ensemble ensemble;
    std::vector<double> per_restart_values;
    bool converged = false;
    /// Best objective after each iteration, one trace per restart.
    std::vector<std::vector<double>> histories;
    int rank = 0;
    int ensemble_size = 0;
};

/// Rank of a density matrix: eigenvalues above 1e-12.
int density_rank(const DensityMatrix& rho);

/// sum_j sqrt(lambda_j) |e_j>|j> on shape + ancilla of dimension max(rank, 2).
PureState purify(const DensityMatrix& rho);

/// Pure decomposition |psi_k~> = sum_j V_kj sqrt(lambda_j) |e_j> for an
/// m x rank(rho) isometry V (V^dagger V = I within 1e-8). Zero-weight members
/// are dropped.
Ensemble ensemble_from_isometry(const DensityMatrix& rho, const Matrix& isometry);

/// Numerical convex-roof extension of `kind` to mixed states.
///
/// Decompositions are parameterized by m x r isometries acting on the
/// eigen-ensemble of rho. Each restart starts from a random isometry
/// (seed + restart index) and alternates greedy complex plane rotations
/// between pairs of members with Riemannian gradient steps (step halving
/// until Armijo decrease). The reported value is attained by the returned
/// ensemble, so it always bounds the true roof from above.
///
/// mixed_roof additionally groups the m members into k balanced blocks
/// (k = 1..m), mixes within blocks, and minimizes the grouped objective;
/// the k = m case is the pure roof, so the result never exceeds it.
///
/// Throws ResourceError when D exceeds config.max_dimension.
RoofResult roof_minimize(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config = {});

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

/// h((1 + sqrt(1 - C^2)) / 2) in bits.
double eof_two_qubit(const DensityMatrix& rho);

struct PcrcReport {
    double direct = 0.0;
    RoofResult roof;
    double gap = 0.0; ///< direct - roof.value
};

PcrcReport pcrc_report(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config = {});

/// direct(rho) - roof(rho). Negative values beyond the optimizer tolerance
/// are counterexamples to pure-roof consistency, not errors.
double pcrc_gap(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config = {});

/// |roof(flagged_mixture(e)) - sum_i p_i roof(member_i)|. Pure members use
/// their direct value.
double flags_residual(const Ensemble& ensemble, MeasureKind kind, const RoofConfig& config = {});

/// roof(sigma (x) eta) - roof(sigma) - roof(eta).
double roof_additivity_gap(const DensityMatrix& sigma, const DensityMatrix& eta, MeasureKind kind,
                           const RoofConfig& config = {});

/// Roof value with the pure shortcut: rank-one inputs return the direct value.
double roof_value(const State& state, MeasureKind kind, const RoofConfig& config = {});

namespace detail {

/// Objective sum_k F(psi_k~) over members generated by an isometry, with
/// members partitioned into groups that are mixed before the measure is
/// applied. Exposed for gradient tests.
class DecompositionObjective {
public:
    DecompositionObjective(const DensityMatrix& rho, MeasureKind kind, std::vector<std::vector<int>> groups);

    int rank() const noexcept { return static_cast<int>(weights_.cols()); }
    int members() const noexcept { return members_; }

    double value(const Matrix& isometry) const;
    /// Euclidean gradient d f / d Re V + i d f / d Im V.
    Matrix gradient(const Matrix& isometry, double* value = nullptr) const;

    /// Columns sum_j V_kj sqrt(lambda_j) e_j.
    std::vector<Vector> member_vectors(const Matrix& isometry) const;
    double group_value(const std::vector<const Vector*>& columns, bool singleton) const;
    const std::vector<std::vector<int>>& groups() const noexcept { return groups_; }
    const std::vector<int>& group_of() const noexcept { return group_of_; }

private:
    struct Term {
        double weight;
        bool linear;
        bool covers_all;
        IndexSplit split;
        IndexSplit complement_split;
        bool complement_smaller;
    };

    double term_value(const Term& term, const std::vector<const Vector*>& columns, bool singleton) const;
    void term_gradient(const Term& term, const std::vector<const Vector*>& columns, bool singleton,
                       std::vector<Vector*>& grads, double& value) const;

    RegisterShape shape_;
    Matrix weights_; ///< D x r, columns sqrt(lambda_j) e_j
    std::vector<Term> terms_;
    std::vector<Term> pure_terms_; ///< merged terms for single-member groups
    std::vector<std::vector<int>> groups_;
    std::vector<int> group_of_;
    int members_ = 0;
};

/// Random m x r isometry from a complex Gaussian matrix.
Matrix random_isometry(int rows, int cols, std::uint64_t seed);
/// Closest isometry (polar factor).
Matrix orthonormalize(const Matrix& a);

} // namespace detail

} // namespace totcorr
