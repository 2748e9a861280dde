#include "totcorr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "totcorr/errors.hpp"

namespace totcorr {

RegisterShape::RegisterShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ArgumentError("register shape must have at least one subsystem");
    for (int d : dims_) {
        if (d < 2) throw ArgumentError("local dimension must be >= 2, got " + std::to_string(d));
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 0;) {
        strides_[i] = total_;
        total_ *= static_cast<std::size_t>(dims_[i]);
    }
}

RegisterShape RegisterShape::qubits(int n) {
    if (n < 1) throw ArgumentError("qubit register needs n >= 1");
    return RegisterShape(std::vector<int>(static_cast<std::size_t>(n), 2));
}

RegisterShape RegisterShape::restrict(std::span<const int> keep) const {
    auto sorted = normalize_subset(*this, keep);
    std::vector<int> dims;
    dims.reserve(sorted.size());
    for (int i : sorted) dims.push_back(dims_[static_cast<std::size_t>(i)]);
    return RegisterShape(std::move(dims));
}

RegisterShape RegisterShape::concat(const RegisterShape& other) const {
    auto dims = dims_;
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    return RegisterShape(std::move(dims));
}

std::vector<int> RegisterShape::all_indices() const {
    std::vector<int> out(dims_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
    return out;
}

std::vector<int> RegisterShape::complement(std::span<const int> subset) const {
    std::vector<bool> in(dims_.size(), false);
    for (int i : subset) {
        if (i < 0 || static_cast<std::size_t>(i) >= dims_.size())
            throw ArgumentError("subsystem index out of range: " + std::to_string(i));
        in[static_cast<std::size_t>(i)] = true;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < dims_.size(); ++i)
        if (!in[i]) out.push_back(static_cast<int>(i));
    return out;
}

std::string RegisterShape::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
    os << ']';
    return os.str();
}

std::vector<int> normalize_subset(const RegisterShape& shape, std::span<const int> subset) {
    if (subset.empty()) throw ArgumentError("subsystem set must be non-empty");
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k] < 0 || static_cast<std::size_t>(sorted[k]) >= shape.size())
            throw ArgumentError("subsystem index out of range: " + std::to_string(sorted[k]));
        if (k > 0 && sorted[k] == sorted[k - 1])
            throw ArgumentError("repeated subsystem index: " + std::to_string(sorted[k]));
    }
    return sorted;
}

namespace {

std::vector<std::size_t> enumerate_offsets(const RegisterShape& shape, const std::vector<int>& indices) {
    std::vector<std::size_t> offsets{0};
    // Most significant subsystem first so offsets come out in lexicographic order.
    for (int i : indices) {
        const auto d = static_cast<std::size_t>(shape.dim(static_cast<std::size_t>(i)));
        const auto s = shape.stride(static_cast<std::size_t>(i));
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * d);
        for (std::size_t base : offsets)
            for (std::size_t v = 0; v < d; ++v) next.push_back(base + v * s);
        offsets.swap(next);
    }
    return offsets;
}

} // namespace

IndexSplit split_offsets(const RegisterShape& shape, std::span<const int> keep) {
    auto kept = normalize_subset(shape, keep);
    auto traced = shape.complement(kept);
    return {enumerate_offsets(shape, kept), enumerate_offsets(shape, traced)};
}

DensityMatrix::DensityMatrix(RegisterShape shape, Matrix data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    const auto d = static_cast<Eigen::Index>(shape_.total());
    if (data_.rows() != d || data_.cols() != d)
        throw ArgumentError("density matrix must be " + std::to_string(d) + "x" + std::to_string(d) +
                            " for shape " + shape_.to_string());
    if (!data_.allFinite()) throw ArgumentError("density matrix has non-finite entries");
}

DensityMatrix DensityMatrix::maximally_mixed(RegisterShape shape) {
    const auto d = static_cast<Eigen::Index>(shape.total());
    Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(std::move(shape), std::move(m));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(a.shape().concat(b.shape()), kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const auto& shape = rho.shape();
    auto kept = normalize_subset(shape, keep);
    if (kept.size() == shape.size()) return rho;

    const auto split = split_offsets(shape, kept);
    const auto dk = static_cast<Eigen::Index>(split.kept.size());
    const Matrix& m = rho.matrix();
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            Complex acc{0.0, 0.0};
            const auto ra = split.kept[static_cast<std::size_t>(a)];
            const auto rb = split.kept[static_cast<std::size_t>(b)];
            for (std::size_t t : split.traced)
                acc += m(static_cast<Eigen::Index>(ra + t), static_cast<Eigen::Index>(rb + t));
            out(a, b) = acc;
        }
    }
    return DensityMatrix(shape.restrict(kept), std::move(out));
}

Matrix contract_marginal(const Vector& amplitudes, const IndexSplit& split) {
    const auto dk = static_cast<Eigen::Index>(split.kept.size());
    const auto dt = static_cast<Eigen::Index>(split.traced.size());
    Matrix x(dk, dt);
    for (Eigen::Index a = 0; a < dk; ++a)
        for (Eigen::Index t = 0; t < dt; ++t)
            x(a, t) = amplitudes(static_cast<Eigen::Index>(split.kept[static_cast<std::size_t>(a)] +
                                                           split.traced[static_cast<std::size_t>(t)]));
    return x * x.adjoint();
}

Matrix contract_marginal(const RegisterShape& shape, const Vector& amplitudes, std::span<const int> keep) {
    if (static_cast<std::size_t>(amplitudes.size()) != shape.total())
        throw ArgumentError("amplitude vector length does not match shape " + shape.to_string());
    return contract_marginal(amplitudes, split_offsets(shape, keep));
}

bool is_hermitian(const Matrix& h, double tol) {
    if (h.rows() != h.cols()) return false;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

Eigen::VectorXd spectrum(const Matrix& h) {
    if (h.rows() == 1) return Eigen::VectorXd::Constant(1, h(0, 0).real());
    if (h.rows() == 2) {
        const double a = h(0, 0).real();
        const double d = h(1, 1).real();
        const double mean = 0.5 * (a + d);
        const double r = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        Eigen::VectorXd v(2);
        v << mean - r, mean + r;
        return v;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

} // namespace detail

std::vector<double> hermitian_eigenvalues(const Matrix& h, double tol) {
    if (!is_hermitian(h, tol)) throw ArgumentError("matrix is not Hermitian within tolerance");
    const Eigen::VectorXd v = detail::spectrum(h);
    return {v.data(), v.data() + v.size()};
}

EigenSystem hermitian_eigensystem(const Matrix& h, double tol) {
    if (!is_hermitian(h, tol)) throw ArgumentError("matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ValidationReport validate_density(const DensityMatrix& rho, double tol) {
    ValidationReport report;
    const Matrix& m = rho.matrix();
    report.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    report.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
    if (report.hermiticity_error > tol) {
        report.violations.push_back("hermiticity: max |rho - rho^dagger| = " +
                                    std::to_string(report.hermiticity_error));
    }
    if (report.trace_error > tol) {
        report.violations.push_back("trace: |tr rho - 1| = " + std::to_string(report.trace_error));
    }
    // Spectrum of the Hermitian part so a tiny asymmetry does not mask negativity.
    const Matrix herm = 0.5 * (m + m.adjoint());
    report.min_eigenvalue = detail::spectrum(herm).minCoeff();
    if (report.min_eigenvalue < -tol) {
        report.violations.push_back("negativity: min eigenvalue = " + std::to_string(report.min_eigenvalue));
    }
    report.ok = report.violations.empty();
    return report;
}

void require_valid(const DensityMatrix& rho, double tol) {
    auto report = validate_density(rho, tol);
    if (report) return;
    std::string msg = "invalid density matrix:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw ArgumentError(msg);
}

} // namespace totcorr
