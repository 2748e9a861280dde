#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace totcorr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTolerance = 1e-10;

/// Ordered list of local dimensions of a multipartite register.
///
/// Subsystem 0 is the most significant digit of the computational-basis
/// index, so |i_0 i_1 ... i_{N-1}> has index sum_k i_k * stride(k).
class RegisterShape {
public:
    explicit RegisterShape(std::vector<int> dims);

    static RegisterShape qubits(int n);

    std::size_t size() const noexcept { return dims_.size(); }
    int dim(std::size_t i) const { return dims_.at(i); }
    const std::vector<int>& dims() const noexcept { return dims_; }
    /// Product of all local dimensions.
    std::size_t total() const noexcept { return total_; }
    std::size_t stride(std::size_t i) const { return strides_.at(i); }

    /// Shape of the subsystems in `keep` (register order).
    RegisterShape restrict(std::span<const int> keep) const;
    /// Tensor-product shape: this register followed by `other`.
    RegisterShape concat(const RegisterShape& other) const;

    std::vector<int> all_indices() const;
    /// Indices not in `subset`, ascending.
    std::vector<int> complement(std::span<const int> subset) const;

    bool operator==(const RegisterShape& other) const noexcept { return dims_ == other.dims_; }

    std::string to_string() const;

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

/// Validates `subset` against `shape` and returns it sorted ascending.
/// Throws ArgumentError on out-of-range or repeated indices, or when empty.
std::vector<int> normalize_subset(const RegisterShape& shape, std::span<const int> subset);

/// Basis-index offsets splitting a register into a kept part and a traced
/// part: full index = kept[a] + traced[t].
struct IndexSplit {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> traced;
};

IndexSplit split_offsets(const RegisterShape& shape, std::span<const int> keep);

/// Dense operator on a register. Construction only checks dimensions and
/// finiteness; use validate_density() for the physical invariants.
class DensityMatrix {
public:
    DensityMatrix(RegisterShape shape, Matrix data);

    static DensityMatrix maximally_mixed(RegisterShape shape);

    const RegisterShape& shape() const noexcept { return shape_; }
    const Matrix& matrix() const noexcept { return data_; }
    std::size_t dimension() const noexcept { return shape_.total(); }

private:
    RegisterShape shape_;
    Matrix data_;
};

Matrix kron(const Matrix& a, const Matrix& b);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on `keep`; kept subsystems stay in register order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Marginal |psi><psi| reduced to `keep`, contracted directly from the
/// amplitude vector. No normalization is applied.
Matrix contract_marginal(const RegisterShape& shape, const Vector& amplitudes,
                         std::span<const int> keep);

/// Same as above with precomputed offsets.
Matrix contract_marginal(const Vector& amplitudes, const IndexSplit& split);

bool is_hermitian(const Matrix& h, double tol = kDefaultTolerance);

/// Real spectrum of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const Matrix& h, double tol = kDefaultTolerance);

struct EigenSystem {
    Eigen::VectorXd values; ///< ascending
    Matrix vectors;         ///< columns are eigenvectors
};

EigenSystem hermitian_eigensystem(const Matrix& h, double tol = kDefaultTolerance);

namespace detail {
// Unchecked spectrum; 2x2 handled in closed form.
Eigen::VectorXd spectrum(const Matrix& h);
} // namespace detail

struct ValidationReport {
    bool ok = true;
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    std::vector<std::string> violations;

    explicit operator bool() const noexcept { return ok; }
};

ValidationReport validate_density(const DensityMatrix& rho, double tol = kDefaultTolerance);

/// Throws ArgumentError when any density invariant fails at `tol`.
void require_valid(const DensityMatrix& rho, double tol = kDefaultTolerance);

} // namespace totcorr
