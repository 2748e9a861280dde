#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "totcorr/tensor.hpp"

namespace totcorr {

/// Normalized amplitude vector over a register.
class PureState {
public:
    /// Throws ArgumentError unless the length matches and |norm - 1| <= tol.
    PureState(RegisterShape shape, Vector amplitudes, double tol = kDefaultTolerance);

    /// Rescales `amplitudes` to unit norm; rejects the zero vector.
    static PureState normalized(RegisterShape shape, Vector amplitudes);
    /// Computational basis state |digits_0 digits_1 ...>.
    static PureState basis(RegisterShape shape, std::span<const int> digits);

    const RegisterShape& shape() const noexcept { return shape_; }
    const Vector& amplitudes() const noexcept { return amplitudes_; }

private:
    RegisterShape shape_;
    Vector amplitudes_;
};

using State = std::variant<PureState, DensityMatrix>;

const RegisterShape& shape_of(const State& state);

/// Probability-weighted decomposition {p_i, member_i}.
class Ensemble {
public:
    /// Weights must be non-negative and sum to 1 within 1e-10; all members
    /// must share one shape.
    Ensemble(std::vector<double> weights, std::vector<State> members);

    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<State>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    const RegisterShape& shape() const { return shape_of(members_.front()); }

private:
    std::vector<double> weights_;
    std::vector<State> members_;
};

// Named qubit states. Subsystem 0 is the leftmost ket digit.
PureState ghz(int n);
PureState epr();
PureState w(int n);
PureState wbar(int n);
/// 1/2 (|0..0> + |0..0 1..1> + |1..1 0..0> - |1..1>) for even n >= 4.
PureState cluster(int n);
/// EPR^{(n/2)} on n qubits, pairs (0,1), (2,3), ...
PureState epr_power(int n);
/// sqrt(x) GHZ_n + sqrt(1-x) W_n.
PureState family1(double x, int n);
/// sqrt(x) W_n + sqrt(1-x) Wbar_n, n >= 3.
PureState family2(double x, int n);

PureState product(std::span<const PureState> states);
DensityMatrix dm(const PureState& psi);
DensityMatrix to_density(const State& state);
DensityMatrix mix(const Ensemble& ensemble);

/// sum_i p_i rho_i (x) |i><i| with a flag subsystem of dimension k appended.
DensityMatrix flagged_mixture(const Ensemble& ensemble);

/// Reduced state of a pure state on `keep`, contracted from amplitudes.
DensityMatrix marginal(const PureState& psi, std::span<const int> keep);
DensityMatrix marginal(const State& state, std::span<const int> keep);

/// Haar-random pure state (normalized complex Gaussian vector).
PureState random_pure(const RegisterShape& shape, std::uint64_t seed);
/// Normalized G G^dagger for a complex Gaussian D x rank matrix G.
DensityMatrix random_density(const RegisterShape& shape, int rank, std::uint64_t seed);
/// Haar-random d x d unitary.
Matrix random_unitary(int d, std::uint64_t seed);

/// (U_0 (x) U_1 (x) ...) applied to a state; one unitary per subsystem.
PureState apply_local(const PureState& psi, std::span<const Matrix> unitaries);
DensityMatrix apply_local(const DensityMatrix& rho, std::span<const Matrix> unitaries);

} // namespace totcorr
