#include "totcorr/states.hpp"

#include <cmath>
#include <random>
#include <string>

#include "totcorr/errors.hpp"

namespace totcorr {

PureState::PureState(RegisterShape shape, Vector amplitudes, double tol)
    : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != shape_.total())
        throw ArgumentError("amplitude vector length " + std::to_string(amplitudes_.size()) +
                            " does not match shape " + shape_.to_string());
    if (!amplitudes_.allFinite()) throw ArgumentError("amplitudes must be finite");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tol)
        throw ArgumentError("pure state is not normalized (norm = " + std::to_string(norm) + ")");
}

PureState PureState::normalized(RegisterShape shape, Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ArgumentError("cannot normalize a zero or non-finite vector");
    amplitudes /= norm;
    return PureState(std::move(shape), std::move(amplitudes));
}

PureState PureState::basis(RegisterShape shape, std::span<const int> digits) {
    if (digits.size() != shape.size()) throw ArgumentError("basis state needs one digit per subsystem");
    std::size_t index = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < 0 || digits[i] >= shape.dim(i)) throw ArgumentError("basis digit out of range");
        index += static_cast<std::size_t>(digits[i]) * shape.stride(i);
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(shape.total()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(shape), std::move(v));
}

const RegisterShape& shape_of(const State& state) {
    return std::visit([](const auto& s) -> const RegisterShape& { return s.shape(); }, state);
}

Ensemble::Ensemble(std::vector<double> weights, std::vector<State> members)
    : weights_(std::move(weights)), members_(std::move(members)) {
    if (members_.empty()) throw ArgumentError("ensemble must have at least one member");
    if (weights_.size() != members_.size()) throw ArgumentError("ensemble weights and members differ in length");
    double total = 0.0;
    for (double p : weights_) {
        if (!(p >= 0.0)) throw ArgumentError("ensemble weights must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ArgumentError("ensemble weights must sum to 1");
    const auto& first = shape_of(members_.front());
    for (const auto& m : members_)
        if (!(shape_of(m) == first)) throw ArgumentError("ensemble members must share one shape");
}

namespace {

void require_min_qubits(int n, int minimum, const char* name) {
    if (n < minimum) throw ArgumentError(std::string(name) + " requires n >= " + std::to_string(minimum));
}

// Index of the n-qubit basis state whose leftmost `ones` digits are 1 (rest 0).
std::size_t leading_ones(int n, int ones) {
    std::size_t idx = 0;
    for (int k = 0; k < ones; ++k) idx |= std::size_t{1} << (n - 1 - k);
    return idx;
}

Vector hamming_weight_superposition(int n, bool complement) {
    const auto dim = std::size_t{1} << n;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    const std::size_t all = dim - 1;
    for (int k = 0; k < n; ++k) {
        const std::size_t one_hot = std::size_t{1} << k;
        v(static_cast<Eigen::Index>(complement ? (all ^ one_hot) : one_hot)) = amp;
    }
    return v;
}

void check_fraction(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("family parameter x must lie in [0, 1]");
}

} // namespace

PureState ghz(int n) {
    require_min_qubits(n, 2, "ghz");
    auto shape = RegisterShape::qubits(n);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(shape.total()));
    v(0) = v(static_cast<Eigen::Index>(shape.total() - 1)) = 1.0 / std::sqrt(2.0);
    return PureState(std::move(shape), std::move(v));
}

PureState epr() { return ghz(2); }

PureState w(int n) {
    require_min_qubits(n, 2, "w");
    return PureState(RegisterShape::qubits(n), hamming_weight_superposition(n, false));
}

PureState wbar(int n) {
    require_min_qubits(n, 2, "wbar");
    return PureState(RegisterShape::qubits(n), hamming_weight_superposition(n, true));
}

PureState cluster(int n) {
    if (n < 4 || n % 2 != 0) throw ArgumentError("cluster requires an even n >= 4");
    auto shape = RegisterShape::qubits(n);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(shape.total()));
    const int half = n / 2;
    v(0) = 0.5;
    v(static_cast<Eigen::Index>((std::size_t{1} << half) - 1)) = 0.5; // |0..0 1..1>
    v(static_cast<Eigen::Index>(leading_ones(n, half))) = 0.5;        // |1..1 0..0>
    v(static_cast<Eigen::Index>(shape.total() - 1)) = -0.5;
    return PureState(std::move(shape), std::move(v));
}

PureState epr_power(int n) {
    if (n < 2 || n % 2 != 0) throw ArgumentError("epr_power requires an even n >= 2");
    std::vector<PureState> pairs(static_cast<std::size_t>(n / 2), epr());
    return product(pairs);
}

PureState family1(double x, int n) {
    check_fraction(x);
    require_min_qubits(n, 3, "family1");
    Vector v = std::sqrt(x) * ghz(n).amplitudes() + std::sqrt(1.0 - x) * w(n).amplitudes();
    return PureState(RegisterShape::qubits(n), std::move(v));
}

PureState family2(double x, int n) {
    check_fraction(x);
    require_min_qubits(n, 3, "family2");
    Vector v = std::sqrt(x) * w(n).amplitudes() + std::sqrt(1.0 - x) * wbar(n).amplitudes();
    return PureState(RegisterShape::qubits(n), std::move(v));
}

PureState product(std::span<const PureState> states) {
    if (states.empty()) throw ArgumentError("product of an empty list");
    RegisterShape shape = states.front().shape();
    Vector v = states.front().amplitudes();
    for (std::size_t i = 1; i < states.size(); ++i) {
        shape = shape.concat(states[i].shape());
        v = kron(Matrix(v), Matrix(states[i].amplitudes()));
    }
    return PureState::normalized(std::move(shape), std::move(v));
}

DensityMatrix dm(const PureState& psi) {
    return DensityMatrix(psi.shape(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix to_density(const State& state) {
    if (const auto* psi = std::get_if<PureState>(&state)) return dm(*psi);
    return std::get<DensityMatrix>(state);
}

DensityMatrix mix(const Ensemble& ensemble) {
    const auto& shape = ensemble.shape();
    const auto d = static_cast<Eigen::Index>(shape.total());
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const double p = ensemble.weights()[i];
        if (const auto* psi = std::get_if<PureState>(&ensemble.members()[i]))
            acc.noalias() += p * psi->amplitudes() * psi->amplitudes().adjoint();
        else
            acc += p * std::get<DensityMatrix>(ensemble.members()[i]).matrix();
    }
    return DensityMatrix(shape, std::move(acc));
}

DensityMatrix flagged_mixture(const Ensemble& ensemble) {
    const auto k = static_cast<int>(ensemble.size());
    const auto& base = ensemble.shape();
    if (k < 2) {
        // A one-dimensional flag is not a register factor; use a qubit flag
        // with the single member on |0>.
        Matrix flag = Matrix::Zero(2, 2);
        flag(0, 0) = 1.0;
        return DensityMatrix(base.concat(RegisterShape({2})),
                             kron(to_density(ensemble.members().front()).matrix(), flag));
    }
    const auto d = static_cast<Eigen::Index>(base.total());
    Matrix out = Matrix::Zero(d * k, d * k);
    // Flag is the last (least significant) subsystem: index = base_index * k + flag.
    for (int i = 0; i < k; ++i) {
        const Matrix block = ensemble.weights()[static_cast<std::size_t>(i)] *
                             to_density(ensemble.members()[static_cast<std::size_t>(i)]).matrix();
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b) out(a * k + i, b * k + i) = block(a, b);
    }
    return DensityMatrix(base.concat(RegisterShape({k})), std::move(out));
}

DensityMatrix marginal(const PureState& psi, std::span<const int> keep) {
    const auto& shape = psi.shape();
    auto kept = normalize_subset(shape, keep);
    return DensityMatrix(shape.restrict(kept), contract_marginal(shape, psi.amplitudes(), kept));
}

DensityMatrix marginal(const State& state, std::span<const int> keep) {
    if (const auto* psi = std::get_if<PureState>(&state)) return marginal(*psi, keep);
    return partial_trace(std::get<DensityMatrix>(state), keep);
}

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    // Column-major fill order is part of the seed contract.
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

} // namespace

PureState random_pure(const RegisterShape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix g = gaussian_matrix(static_cast<Eigen::Index>(shape.total()), 1, rng);
    return PureState::normalized(shape, g.col(0));
}

DensityMatrix random_density(const RegisterShape& shape, int rank, std::uint64_t seed) {
    const auto d = static_cast<Eigen::Index>(shape.total());
    if (rank < 1 || rank > d) throw ArgumentError("random_density rank must be in [1, D]");
    std::mt19937_64 rng(seed);
    Matrix g = gaussian_matrix(d, rank, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(shape, std::move(rho));
}

Matrix random_unitary(int d, std::uint64_t seed) {
    if (d < 1) throw ArgumentError("unitary dimension must be >= 1");
    std::mt19937_64 rng(seed);
    Matrix g = gaussian_matrix(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix column phases so the distribution is Haar.
    for (Eigen::Index j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) q.col(j) *= rjj / mag;
    }
    return q;
}

namespace {

Matrix local_operator(const RegisterShape& shape, std::span<const Matrix> unitaries) {
    if (unitaries.size() != shape.size()) throw ArgumentError("need one local unitary per subsystem");
    Matrix op = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < unitaries.size(); ++i) {
        if (unitaries[i].rows() != shape.dim(i) || unitaries[i].cols() != shape.dim(i))
            throw ArgumentError("local unitary dimension mismatch at subsystem " + std::to_string(i));
        op = kron(op, unitaries[i]);
    }
    return op;
}

} // namespace

PureState apply_local(const PureState& psi, std::span<const Matrix> unitaries) {
    Matrix op = local_operator(psi.shape(), unitaries);
    return PureState::normalized(psi.shape(), op * psi.amplitudes());
}

DensityMatrix apply_local(const DensityMatrix& rho, std::span<const Matrix> unitaries) {
    Matrix op = local_operator(rho.shape(), unitaries);
    return DensityMatrix(rho.shape(), op * rho.matrix() * op.adjoint());
}

} // namespace totcorr
