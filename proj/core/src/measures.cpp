#include "totcorr/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "totcorr/errors.hpp"

namespace totcorr {

std::string_view to_string(MeasureKind kind) {
    switch (kind) {
    case MeasureKind::M: return "M";
    case MeasureKind::O: return "O";
    case MeasureKind::S: return "S";
    case MeasureKind::MW: return "MW";
    }
    return "?";
}

std::optional<MeasureKind> parse_measure(std::string_view name) {
    if (name == "M") return MeasureKind::M;
    if (name == "O") return MeasureKind::O;
    if (name == "S") return MeasureKind::S;
    if (name == "MW") return MeasureKind::MW;
    return std::nullopt;
}

double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double l = eigenvalues(i);
        if (l > kEigenvalueClamp) h -= l * std::log2(l);
    }
    return h;
}

namespace {

double linear_entropy_of(const Matrix& m) {
    // tr(m^2) for Hermitian m is the squared Frobenius norm.
    return 1.0 - m.squaredNorm();
}

// Reduced states of one validated state, pure or mixed.
class Marginals {
public:
    explicit Marginals(const State& state) : state_(state), shape_(shape_of(state)) {
        if (const auto* rho = std::get_if<DensityMatrix>(&state)) require_valid(*rho);
        pure_ = std::holds_alternative<PureState>(state);
    }

    const RegisterShape& shape() const { return shape_; }
    std::size_t size() const { return shape_.size(); }

    Matrix reduced(std::span<const int> subset) const {
        if (pure_) return contract_marginal(shape_, std::get<PureState>(state_).amplitudes(), subset);
        return partial_trace(std::get<DensityMatrix>(state_), subset).matrix();
    }

    double entropy(std::span<const int> subset) const {
        auto sorted = normalize_subset(shape_, subset);
        if (pure_) {
            if (sorted.size() == shape_.size()) return 0.0;
            // Complementary marginals of a pure state share their spectrum.
            auto other = shape_.complement(sorted);
            if (shape_.restrict(other).total() < shape_.restrict(sorted).total()) sorted = std::move(other);
        }
        return entropy_of_spectrum(detail::spectrum(reduced(sorted)));
    }

    double linear(std::span<const int> subset) const { return linear_entropy_of(reduced(subset)); }

    std::vector<double> single_entropies() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            const int idx[] = {static_cast<int>(i)};
            out[i] = entropy(idx);
        }
        return out;
    }

    double total_entropy() const {
        if (pure_) return 0.0;
        return entropy_of_spectrum(detail::spectrum(std::get<DensityMatrix>(state_).matrix()));
    }

private:
    const State& state_;
    RegisterShape shape_;
    bool pure_ = false;
};

void require_pairs(const RegisterShape& shape) {
    if (shape.size() < 2) throw ArgumentError("pairwise measures need at least two subsystems");
}

std::vector<PairValue> pair_values(const Marginals& marg) {
    require_pairs(marg.shape());
    const auto singles = marg.single_entropies();
    std::vector<PairValue> out;
    const int n = static_cast<int>(marg.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int pair[] = {i, j};
            const double mi = singles[static_cast<std::size_t>(i)] + singles[static_cast<std::size_t>(j)] -
                              marg.entropy(pair);
            out.push_back({i, j, 0.5 * mi});
        }
    return out;
}

double sum_pairs(const std::vector<PairValue>& pairs) {
    double m = 0.0;
    for (const auto& p : pairs) m += p.value;
    return m;
}

double global_correlation(const Marginals& marg) {
    double sum = 0.0;
    for (double s : marg.single_entropies()) sum += s;
    return 0.5 * (sum - marg.total_entropy());
}

double meyer_wallach(const Marginals& marg) {
    double sum = 0.0;
    for (std::size_t i = 0; i < marg.size(); ++i) {
        const int idx[] = {static_cast<int>(i)};
        sum += marg.linear(idx);
    }
    return sum;
}

double binomial2(int n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

} // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    require_valid(rho);
    return entropy_of_spectrum(detail::spectrum(rho.matrix()));
}

double linear_entropy(const DensityMatrix& rho) {
    require_valid(rho);
    return linear_entropy_of(rho.matrix());
}

double mutual_information(const State& state, std::span<const int> a, std::span<const int> b) {
    Marginals marg(state);
    auto sa = normalize_subset(marg.shape(), a);
    auto sb = normalize_subset(marg.shape(), b);
    std::vector<int> both = sa;
    both.insert(both.end(), sb.begin(), sb.end());
    std::sort(both.begin(), both.end());
    if (std::adjacent_find(both.begin(), both.end()) != both.end())
        throw ArgumentError("mutual_information subsystem sets must be disjoint");
    return marg.entropy(sa) + marg.entropy(sb) - marg.entropy(both);
}

double pairwise_probe(const State& state, int i, int j) {
    const int a[] = {i};
    const int b[] = {j};
    return 0.5 * mutual_information(state, a, b);
}

double measure_M(const State& state) {
    Marginals marg(state);
    return sum_pairs(pair_values(marg));
}

double measure_O(const State& state) { return global_correlation(Marginals(state)); }

double measure_S(const State& state) {
    Marginals marg(state);
    return 0.5 * (global_correlation(marg) + sum_pairs(pair_values(marg)));
}

double measure_MW(const State& state) { return meyer_wallach(Marginals(state)); }

double evaluate(MeasureKind kind, const State& state) {
    switch (kind) {
    case MeasureKind::M: return measure_M(state);
    case MeasureKind::O: return measure_O(state);
    case MeasureKind::S: return measure_S(state);
    case MeasureKind::MW: return measure_MW(state);
    }
    throw ArgumentError("unknown measure");
}

double bipartite_correlation(const State& state, std::span<const int> part) {
    Marginals marg(state);
    auto r = normalize_subset(marg.shape(), part);
    if (r.size() == marg.size()) throw ArgumentError("bipartition must be a proper subset");
    auto rc = marg.shape().complement(r);
    return marg.entropy(r) + marg.entropy(rc) - marg.total_entropy();
}

double subset_correlation_sum(const State& state) {
    Marginals marg(state);
    const auto n = marg.size();
    if (n > 12) throw ResourceError("subset_correlation_sum supports at most 12 subsystems");
    if (n < 2) return 0.0;
    const double total = marg.total_entropy();
    double sum = 0.0;
    // Subsets that exclude the last subsystem enumerate each bipartition once.
    const std::size_t limit = std::size_t{1} << (n - 1);
    for (std::size_t mask = 1; mask < limit; ++mask) {
        std::vector<int> r;
        for (std::size_t k = 0; k + 1 < n; ++k)
            if (mask & (std::size_t{1} << k)) r.push_back(static_cast<int>(k));
        auto rc = marg.shape().complement(r);
        sum += marg.entropy(r) + marg.entropy(rc) - total;
    }
    return sum;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_valid(rho);
    require_valid(sigma);
    if (rho.dimension() != sigma.dimension()) throw ArgumentError("relative_entropy dimension mismatch");
    constexpr double support_tol = 1e-10;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma.matrix() + sigma.matrix().adjoint()));
    const Matrix& v = eig.eigenvectors();
    double cross = 0.0; // Tr rho log2 sigma
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double overlap = (v.col(k).adjoint() * rho.matrix() * v.col(k))(0, 0).real();
        const double mu = eig.eigenvalues()(k);
        if (mu <= support_tol) {
            if (overlap > support_tol)
                throw DomainError("relative_entropy: rho is not supported within the support of sigma");
            continue;
        }
        cross += overlap * std::log2(mu);
    }
    return -entropy_of_spectrum(detail::spectrum(rho.matrix())) - cross;
}

double measure_S_form2(const State& state) {
    Marginals marg(state);
    require_pairs(marg.shape());
    const int n = static_cast<int>(marg.size());
    const auto& shape = marg.shape();

    std::vector<DensityMatrix> singles;
    for (int i = 0; i < n; ++i) {
        const int idx[] = {i};
        singles.emplace_back(shape.restrict(idx), marg.reduced(idx));
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int pair[] = {i, j};
            DensityMatrix joint(shape.restrict(pair), marg.reduced(pair));
            sum += relative_entropy(joint, kron(singles[static_cast<std::size_t>(i)],
                                                singles[static_cast<std::size_t>(j)]));
        }
    DensityMatrix product = singles.front();
    for (int i = 1; i < n; ++i) product = kron(product, singles[static_cast<std::size_t>(i)]);
    sum += relative_entropy(to_density(state), product);
    return 0.25 * sum;
}

double bound_M(int n, int d) {
    if (n < 2 || d < 2) throw ArgumentError("bound_M needs n >= 2 and d >= 2");
    const double pairs = binomial2(n) / (n == 2 ? 1.0 : 2.0);
    return pairs * std::log2(static_cast<double>(d));
}

double bound_S(int n, int d) {
    if (n < 2 || d < 2) throw ArgumentError("bound_S needs n >= 2 and d >= 2");
    const double pairs = binomial2(n) / (n == 2 ? 1.0 : 2.0);
    return 0.5 * (pairs + 0.5 * n) * std::log2(static_cast<double>(d));
}

double ssa_check(const DensityMatrix& rho) {
    if (rho.shape().size() != 3) throw ArgumentError("ssa_check needs exactly three subsystems");
    const State state = rho;
    Marginals marg(state);
    const int xy[] = {0, 1};
    const int yz[] = {1, 2};
    const int y[] = {1};
    return marg.entropy(xy) + marg.entropy(yz) - marg.entropy(y) - marg.total_entropy();
}

MeasureReport measure_report(const State& state) {
    Marginals marg(state);
    const auto& shape = marg.shape();
    MeasureReport report{shape, pair_values(marg)};
    report.M = sum_pairs(report.pairs);
    report.O = global_correlation(marg);
    report.S = 0.5 * (report.O + report.M);
    report.MW = meyer_wallach(marg);
    const int n = static_cast<int>(shape.size());
    const int d = *std::max_element(shape.dims().begin(), shape.dims().end());
    report.bound_M = bound_M(n, d);
    report.bound_S = bound_S(n, d);
    return report;
}

std::vector<EntropyTerm> entropy_terms(MeasureKind kind, const RegisterShape& shape) {
    const int n = static_cast<int>(shape.size());
    if (n < 2) throw ArgumentError("measures need at least two subsystems");
    std::vector<EntropyTerm> terms;
    auto add = [&terms](std::vector<int> set, double weight, bool linear) {
        for (auto& t : terms) {
            if (t.subsystems == set && t.linear == linear) {
                t.weight += weight;
                return;
            }
        }
        terms.push_back({std::move(set), weight, linear});
    };
    const auto all = shape.all_indices();
    // M = (n-1)/2 sum_i S_i - 1/2 sum_{i<j} S_ij ; O = 1/2 sum_i S_i - 1/2 S_all
    const double m_single = 0.5 * (n - 1);
    switch (kind) {
    case MeasureKind::M:
        for (int i = 0; i < n; ++i) add({i}, m_single, false);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) add({i, j}, -0.5, false);
        break;
    case MeasureKind::O:
        for (int i = 0; i < n; ++i) add({i}, 0.5, false);
        add(all, -0.5, false);
        break;
    case MeasureKind::S:
        for (int i = 0; i < n; ++i) add({i}, 0.5 * (m_single + 0.5), false);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) add({i, j}, -0.25, false);
        add(all, -0.25, false);
        break;
    case MeasureKind::MW:
        for (int i = 0; i < n; ++i) add({i}, 1.0, true);
        break;
    }
    return terms;
}

} // namespace totcorr
