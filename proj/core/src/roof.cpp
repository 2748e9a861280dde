#include "totcorr/roof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "totcorr/parallel.hpp"
#include "totcorr/errors.hpp"

namespace totcorr {

std::string_view to_string(RoofStrategy strategy) {
    return strategy == RoofStrategy::pure_roof ? "pure_roof" : "mixed_roof";
}

std::optional<RoofStrategy> parse_strategy(std::string_view name) {
    if (name == "pure_roof") return RoofStrategy::pure_roof;
    if (name == "mixed_roof") return RoofStrategy::mixed_roof;
    return std::nullopt;
}

namespace {

constexpr double kRankTolerance = 1e-12;
constexpr double kLogFloor = 1e-300;

struct Spectral {
    Eigen::VectorXd values;
    Matrix vectors;
};

Spectral eigen_hermitian(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// f(h) for Hermitian h given f on the spectrum; 2x2 via spectral projectors.
template <typename F>
Matrix hermitian_function(const Matrix& h, F&& f) {
    if (h.rows() == 2) {
        const Eigen::VectorXd lam = detail::spectrum(h);
        const double lo = lam(0), hi = lam(1);
        const double flo = f(lo), fhi = f(hi);
        const double gap = hi - lo;
        if (gap <= 1e-14 * std::max(1.0, std::abs(hi))) return Matrix::Identity(2, 2) * (0.5 * (flo + fhi));
        // P_hi = (h - lo I) / gap, P_lo = I - P_hi
        Matrix p_hi = (h - lo * Matrix::Identity(2, 2)) / gap;
        return flo * Matrix::Identity(2, 2) + (fhi - flo) * p_hi;
    }
    const Spectral s = eigen_hermitian(h);
    Eigen::VectorXd fv(s.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(s.values(i));
    return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

Matrix gather(const Vector& psi, const IndexSplit& split) {
    const auto dk = static_cast<Eigen::Index>(split.kept.size());
    const auto dt = static_cast<Eigen::Index>(split.traced.size());
    Matrix x(dk, dt);
    for (Eigen::Index t = 0; t < dt; ++t) {
        const auto off = split.traced[static_cast<std::size_t>(t)];
        for (Eigen::Index a = 0; a < dk; ++a)
            x(a, t) = psi(static_cast<Eigen::Index>(split.kept[static_cast<std::size_t>(a)] + off));
    }
    return x;
}

void scatter_add(Vector& out, const Matrix& x, const IndexSplit& split, double scale) {
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
        const auto off = split.traced[static_cast<std::size_t>(t)];
        for (Eigen::Index a = 0; a < x.rows(); ++a)
            out(static_cast<Eigen::Index>(split.kept[static_cast<std::size_t>(a)] + off)) += scale * x(a, t);
    }
}

struct EigenData {
    Eigen::VectorXd values; // descending not required
    Matrix vectors;         // columns
};

EigenData eigen_data(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho.matrix() + rho.matrix().adjoint()));
    // Descending order so the dominant component comes first.
    const auto n = solver.eigenvalues().size();
    EigenData out{Eigen::VectorXd(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Matrix eigen_weights(const DensityMatrix& rho) {
    const auto eig = eigen_data(rho);
    int r = 0;
    while (r < eig.values.size() && eig.values(r) > kRankTolerance) ++r;
    Matrix phi(eig.vectors.rows(), r);
    for (int j = 0; j < r; ++j) phi.col(j) = std::sqrt(eig.values(j)) * eig.vectors.col(j);
    return phi;
}

// Allocation-free path for two-level marginals: the hot loop of the
// rotation sweeps on qubit registers.
double qubit_term_value(bool linear, const std::vector<const Vector*>& columns, const IndexSplit& split) {
    const auto k0 = static_cast<Eigen::Index>(split.kept[0]);
    const auto k1 = static_cast<Eigen::Index>(split.kept[1]);
    double a = 0.0, b = 0.0;
    Complex c = 0.0;
    for (const Vector* col : columns) {
        const Vector& v = *col;
        for (const auto off : split.traced) {
            const Complex x0 = v(k0 + static_cast<Eigen::Index>(off));
            const Complex x1 = v(k1 + static_cast<Eigen::Index>(off));
            a += std::norm(x0);
            b += std::norm(x1);
            c += x0 * std::conj(x1);
        }
    }
    const double p = a + b;
    if (!(p > 1e-300)) return 0.0;
    if (linear) return p - (a * a + b * b + 2.0 * std::norm(c)) / p;
    const double r = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(c));
    double h = 0.0;
    for (const double lam : {0.5 * p + r, std::max(0.5 * p - r, 0.0)}) {
        const double q = lam / p;
        if (q > kEigenvalueClamp) h -= lam * std::log2(q);
    }
    return h;
}

} // namespace

namespace detail {

Matrix orthonormalize(const Matrix& a) {
    const Matrix gram = a.adjoint() * a;
    const Matrix inv_sqrt = hermitian_function(gram, [](double x) { return 1.0 / std::sqrt(std::max(x, 1e-300)); });
    return a * inv_sqrt;
}

Matrix random_isometry(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return orthonormalize(g);
}

DecompositionObjective::DecompositionObjective(const DensityMatrix& rho, MeasureKind kind,
                                               std::vector<std::vector<int>> groups)
    : shape_(rho.shape()), weights_(eigen_weights(rho)), groups_(std::move(groups)) {
    for (const auto& g : groups_) members_ += static_cast<int>(g.size());
    group_of_.assign(static_cast<std::size_t>(members_), -1);
    for (std::size_t gi = 0; gi < groups_.size(); ++gi)
        for (int k : groups_[gi]) {
            if (k < 0 || k >= members_ || group_of_[static_cast<std::size_t>(k)] != -1)
                throw ArgumentError("groups must partition the ensemble members");
            group_of_[static_cast<std::size_t>(k)] = static_cast<int>(gi);
        }
    // Pure members: S(A) = S(complement) for both entropies, so terms are
    // keyed by the smaller side and merged; full-register terms vanish.
    std::map<std::pair<std::vector<int>, bool>, double> pure;
    for (auto& t : entropy_terms(kind, shape_)) {
        Term term{t.weight, t.linear, t.subsystems.size() == shape_.size(), split_offsets(shape_, t.subsystems), {}, false};
        if (!term.covers_all) {
            const auto comp = shape_.complement(t.subsystems);
            term.complement_split = split_offsets(shape_, comp);
            term.complement_smaller = term.complement_split.kept.size() < term.split.kept.size();
            const bool swap = term.complement_smaller ||
                              (term.complement_split.kept.size() == term.split.kept.size() && comp < t.subsystems);
            pure[{swap ? comp : t.subsystems, t.linear}] += t.weight;
        }
        terms_.push_back(std::move(term));
    }
    for (const auto& [key, weight] : pure) {
        if (weight == 0.0) continue;
        pure_terms_.push_back(Term{weight, key.second, false, split_offsets(shape_, key.first), {}, false});
    }
}

std::vector<Vector> DecompositionObjective::member_vectors(const Matrix& isometry) const {
    const Matrix psi = weights_ * isometry.transpose();
    std::vector<Vector> out(static_cast<std::size_t>(psi.cols()));
    for (Eigen::Index k = 0; k < psi.cols(); ++k) out[static_cast<std::size_t>(k)] = psi.col(k);
    return out;
}

double DecompositionObjective::term_value(const Term& term, const std::vector<const Vector*>& columns,
                                          bool singleton) const {
    if (singleton && term.covers_all) return 0.0; // every entropy of a pure state's full register vanishes
    const IndexSplit& split = (singleton && term.complement_smaller) ? term.complement_split : term.split;
    if (split.kept.size() == 2) return qubit_term_value(term.linear, columns, split);
    Matrix sigma;
    for (const Vector* c : columns) {
        const Matrix x = gather(*c, split);
        if (sigma.size() == 0)
            sigma = x * x.adjoint();
        else
            sigma.noalias() += x * x.adjoint();
    }
    const double p = sigma.trace().real();
    if (!(p > 1e-300)) return 0.0;
    if (term.linear) return p - sigma.squaredNorm() / p;
    const Eigen::VectorXd lam = detail::spectrum(sigma);
    double h = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double q = lam(i) / p;
        if (q > kEigenvalueClamp) h -= lam(i) * std::log2(q);
    }
    return h;
}

void DecompositionObjective::term_gradient(const Term& term, const std::vector<const Vector*>& columns,
                                           bool singleton, std::vector<Vector*>& grads, double& value) const {
    if (singleton && term.covers_all) return;
    const IndexSplit& split = (singleton && term.complement_smaller) ? term.complement_split : term.split;
    std::vector<Matrix> xs;
    xs.reserve(columns.size());
    Matrix sigma;
    for (const Vector* c : columns) {
        xs.push_back(gather(*c, split));
        if (sigma.size() == 0)
            sigma = xs.back() * xs.back().adjoint();
        else
            sigma.noalias() += xs.back() * xs.back().adjoint();
    }
    const double p = sigma.trace().real();
    if (!(p > 1e-300)) return;
    Matrix k;
    if (term.linear) {
        const double purity = sigma.squaredNorm();
        value += term.weight * (p - purity / p);
        k = (1.0 + purity / (p * p)) * Matrix::Identity(sigma.rows(), sigma.cols()) - (2.0 / p) * sigma;
    } else {
        const Eigen::VectorXd lam = detail::spectrum(sigma);
        double h = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            const double q = lam(i) / p;
            if (q > kEigenvalueClamp) h -= lam(i) * std::log2(q);
        }
        value += term.weight * h;
        k = hermitian_function(sigma, [p](double l) { return -std::log2(std::max(l / p, kLogFloor)); });
    }
    for (std::size_t c = 0; c < xs.size(); ++c) scatter_add(*grads[c], k * xs[c], split, term.weight);
}

double DecompositionObjective::group_value(const std::vector<const Vector*>& columns, bool singleton) const {
    double v = 0.0;
    for (const auto& t : singleton ? pure_terms_ : terms_) v += t.weight * term_value(t, columns, singleton);
    return v;
}

double DecompositionObjective::value(const Matrix& isometry) const {
    const auto psi = member_vectors(isometry);
    double v = 0.0;
    for (const auto& g : groups_) {
        std::vector<const Vector*> cols;
        for (int k : g) cols.push_back(&psi[static_cast<std::size_t>(k)]);
        v += group_value(cols, g.size() == 1);
    }
    return v;
}

Matrix DecompositionObjective::gradient(const Matrix& isometry, double* value) const {
    const auto psi = member_vectors(isometry);
    const auto d = static_cast<Eigen::Index>(shape_.total());
    std::vector<Vector> g(psi.size(), Vector::Zero(d));
    double v = 0.0;
    for (const auto& group : groups_) {
        std::vector<const Vector*> cols;
        std::vector<Vector*> grads;
        for (int k : group) {
            cols.push_back(&psi[static_cast<std::size_t>(k)]);
            grads.push_back(&g[static_cast<std::size_t>(k)]);
        }
        const bool singleton = group.size() == 1;
        for (const auto& t : singleton ? pure_terms_ : terms_) term_gradient(t, cols, singleton, grads, v);
    }
    if (value) *value = v;
    // Gamma_kj = 2 <phi_j | g_k>
    Matrix gamma(static_cast<Eigen::Index>(psi.size()), weights_.cols());
    for (std::size_t k = 0; k < g.size(); ++k)
        gamma.row(static_cast<Eigen::Index>(k)) = 2.0 * (weights_.adjoint() * g[k]).transpose();
    return gamma;
}

} // namespace detail

int density_rank(const DensityMatrix& rho) {
    const auto eig = eigen_data(rho);
    int r = 0;
    while (r < eig.values.size() && eig.values(r) > kRankTolerance) ++r;
    return r;
}

PureState purify(const DensityMatrix& rho) {
    require_valid(rho);
    const auto eig = eigen_data(rho);
    int r = 0;
    while (r < eig.values.size() && eig.values(r) > kRankTolerance) ++r;
    const int anc = std::max(r, 2);
    const auto d = static_cast<Eigen::Index>(rho.dimension());
    Vector v = Vector::Zero(d * anc);
    for (int j = 0; j < r; ++j) {
        const Vector col = std::sqrt(eig.values(j)) * eig.vectors.col(j);
        for (Eigen::Index a = 0; a < d; ++a) v(a * anc + j) = col(a);
    }
    return PureState::normalized(rho.shape().concat(RegisterShape({anc})), std::move(v));
}

namespace {

Ensemble ensemble_from_members(const RegisterShape& shape, const std::vector<Vector>& psi,
                               const std::vector<std::vector<int>>& groups) {
    constexpr double drop = 1e-14;
    std::vector<double> weights;
    std::vector<State> members;
    for (const auto& g : groups) {
        if (g.size() == 1) {
            const Vector& v = psi[static_cast<std::size_t>(g.front())];
            const double p = v.squaredNorm();
            if (p <= drop) continue;
            weights.push_back(p);
            members.emplace_back(PureState::normalized(shape, v));
            continue;
        }
        const auto d = static_cast<Eigen::Index>(shape.total());
        Matrix sigma = Matrix::Zero(d, d);
        for (int k : g) sigma.noalias() += psi[static_cast<std::size_t>(k)] * psi[static_cast<std::size_t>(k)].adjoint();
        const double p = sigma.trace().real();
        if (p <= drop) continue;
        weights.push_back(p);
        members.emplace_back(DensityMatrix(shape, sigma / p));
    }
    double total = 0.0;
    for (double p : weights) total += p;
    for (double& p : weights) p /= total;
    return Ensemble(std::move(weights), std::move(members));
}

} // namespace

Ensemble ensemble_from_isometry(const DensityMatrix& rho, const Matrix& isometry) {
    require_valid(rho);
    const int r = density_rank(rho);
    if (isometry.cols() != r)
        throw ArgumentError("isometry must have rank(rho) = " + std::to_string(r) + " columns");
    if (isometry.rows() < isometry.cols()) throw ArgumentError("isometry needs at least as many rows as columns");
    const Matrix gram = isometry.adjoint() * isometry;
    if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8)
        throw ArgumentError("matrix is not an isometry (V^dagger V != I)");
    const Matrix phi = eigen_weights(rho);
    const Matrix psi = phi * isometry.transpose();
    std::vector<Vector> cols(static_cast<std::size_t>(psi.cols()));
    std::vector<std::vector<int>> singles(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        cols[k] = psi.col(static_cast<Eigen::Index>(k));
        singles[k] = {static_cast<int>(k)};
    }
    return ensemble_from_members(rho.shape(), cols, singles);
}

namespace {

struct RestartOutcome {
    Matrix isometry;
    double objective = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::vector<double> history;
};

class RestartOptimizer {
public:
    RestartOptimizer(const detail::DecompositionObjective& objective, const RoofConfig& config)
        : obj_(objective), config_(config) {}

    RestartOutcome run(Matrix v) const {
        RestartOutcome out;
        auto psi = obj_.member_vectors(v);
        std::vector<double> gvals(obj_.groups().size());
        for (std::size_t gi = 0; gi < gvals.size(); ++gi) gvals[gi] = eval_group(psi, gi);
        double f = sum(gvals);
        out.history.push_back(f);

        double angle = 0.25 * std::numbers::pi;
        double step = 1.0;
        bool rotation_mode = true;
        bool other_stalled = false;
        for (int it = 0; it < config_.max_iterations; ++it) {
            const double before = f;
            if (rotation_mode) {
                rotation_sweep(v, psi, gvals, angle);
                f = sum(gvals);
            } else {
                f = gradient_step(v, f, step);
                psi = obj_.member_vectors(v);
                for (std::size_t gi = 0; gi < gvals.size(); ++gi) gvals[gi] = eval_group(psi, gi);
                f = sum(gvals);
            }
            out.history.push_back(f);
            if (before - f < config_.tolerance) {
                if (other_stalled) {
                    out.converged = true;
                    break;
                }
                other_stalled = true;
                rotation_mode = !rotation_mode;
                if (rotation_mode) angle = 0.25 * std::numbers::pi;
            } else {
                other_stalled = false;
            }
        }
        out.isometry = std::move(v);
        out.objective = f;
        return out;
    }

private:
    static double sum(const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }

    double eval_group(const std::vector<Vector>& psi, std::size_t gi) const {
        const auto& g = obj_.groups()[gi];
        std::vector<const Vector*> cols;
        cols.reserve(g.size());
        for (int k : g) cols.push_back(&psi[static_cast<std::size_t>(k)]);
        return obj_.group_value(cols, g.size() == 1);
    }

    double eval_group_with(const std::vector<Vector>& psi, std::size_t gi, int k, const Vector& vk, int l,
                           const Vector& vl) const {
        const auto& g = obj_.groups()[gi];
        std::vector<const Vector*> cols;
        cols.reserve(g.size());
        for (int idx : g) {
            if (idx == k)
                cols.push_back(&vk);
            else if (idx == l)
                cols.push_back(&vl);
            else
                cols.push_back(&psi[static_cast<std::size_t>(idx)]);
        }
        return obj_.group_value(cols, g.size() == 1);
    }

    // One greedy pass of complex plane rotations over all member pairs.
    void rotation_sweep(Matrix& v, std::vector<Vector>& psi, std::vector<double>& gvals, double& angle) const {
        const int m = obj_.members();
        const auto& group_of = obj_.group_of();
        int accepted = 0, tried = 0;
        for (int k = 0; k < m; ++k) {
            for (int l = k + 1; l < m; ++l) {
                const auto gk = static_cast<std::size_t>(group_of[static_cast<std::size_t>(k)]);
                const auto gl = static_cast<std::size_t>(group_of[static_cast<std::size_t>(l)]);
                if (gk == gl) continue; // mixing inside a group leaves the group state unchanged
                ++tried;
                const double current = gvals[gk] + gvals[gl];
                double best = current;
                double best_theta = 0.0, best_phase = 0.0, best_vk = 0.0, best_vl = 0.0;
                Vector nk, nl;
                auto trial = [&](double theta, double phase, double& val_k, double& val_l) {
                    const double c = std::cos(theta), s = std::sin(theta);
                    const Complex e = std::polar(1.0, phase);
                    nk = c * psi[static_cast<std::size_t>(k)] - s * e * psi[static_cast<std::size_t>(l)];
                    nl = s * std::conj(e) * psi[static_cast<std::size_t>(k)] + c * psi[static_cast<std::size_t>(l)];
                    val_k = eval_group_with(psi, gk, k, nk, l, nl);
                    val_l = eval_group_with(psi, gl, k, nk, l, nl);
                    return val_k + val_l;
                };
                for (int q = 0; q < 4; ++q) {
                    const double phase = 0.5 * std::numbers::pi * q;
                    double vk = 0.0, vl = 0.0;
                    const double t = trial(angle, phase, vk, vl);
                    if (t < best) {
                        best = t;
                        best_theta = angle;
                        best_phase = phase;
                        best_vk = vk;
                        best_vl = vl;
                    }
                }
                if (best_theta == 0.0) continue;
                // Extend along the accepted direction while it keeps improving.
                for (int ext = 0; ext < 3; ++ext) {
                    double vk = 0.0, vl = 0.0;
                    const double t = trial(2.0 * best_theta, best_phase, vk, vl);
                    if (!(t < best)) break;
                    best = t;
                    best_theta *= 2.0;
                    best_vk = vk;
                    best_vl = vl;
                }
                apply_rotation(v, psi, k, l, best_theta, best_phase);
                gvals[gk] = best_vk;
                gvals[gl] = best_vl;
                ++accepted;
            }
        }
        if (tried == 0) return;
        const double rate = static_cast<double>(accepted) / tried;
        if (rate < 0.2) angle = std::max(0.5 * angle, 1e-7);
        else if (rate > 0.6) angle = std::min(2.0 * angle, 0.25 * std::numbers::pi);
    }

    static void apply_rotation(Matrix& v, std::vector<Vector>& psi, int k, int l, double theta, double phase) {
        const double c = std::cos(theta), s = std::sin(theta);
        const Complex e = std::polar(1.0, phase);
        const Eigen::RowVectorXcd rk = v.row(k), rl = v.row(l);
        v.row(k) = c * rk - s * e * rl;
        v.row(l) = s * std::conj(e) * rk + c * rl;
        const Vector pk = psi[static_cast<std::size_t>(k)], pl = psi[static_cast<std::size_t>(l)];
        psi[static_cast<std::size_t>(k)] = c * pk - s * e * pl;
        psi[static_cast<std::size_t>(l)] = s * std::conj(e) * pk + c * pl;
    }

    // Riemannian steepest descent on the complex Stiefel manifold with polar
    // retraction; the step is halved until the Armijo condition holds.
    double gradient_step(Matrix& v, double f, double& step) const {
        double fv = 0.0;
        const Matrix gamma = obj_.gradient(v, &fv);
        const Matrix vg = v.adjoint() * gamma;
        const Matrix xi = gamma - v * (0.5 * (vg + vg.adjoint()));
        const double slope = xi.squaredNorm();
        if (!(slope > 0.0) || !std::isfinite(slope)) return f;
        double t = step;
        for (int halving = 0; halving < 40; ++halving) {
            const Matrix candidate = detail::orthonormalize(v - t * xi);
            const double fc = obj_.value(candidate);
            if (fc <= f - 1e-4 * t * slope) {
                v = candidate;
                step = std::min(4.0 * t, 1e3);
                return fc;
            }
            t *= 0.5;
        }
        step = std::max(t, 1e-12);
        return f;
    }

    const detail::DecompositionObjective& obj_;
    const RoofConfig& config_;
};

std::vector<std::vector<int>> balanced_groups(int members, int count) {
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(count));
    const int base = members / count, extra = members % count;
    int next = 0;
    for (int g = 0; g < count; ++g) {
        const int size = base + (g < extra ? 1 : 0);
        for (int i = 0; i < size; ++i) groups[static_cast<std::size_t>(g)].push_back(next++);
    }
    return groups;
}

void check_config(const RoofConfig& config) {
    if (config.restarts < 1) throw ArgumentError("roof restarts must be >= 1");
    if (!(config.tolerance > 0.0)) throw ArgumentError("roof tolerance must be > 0");
    if (config.max_iterations < 1) throw ArgumentError("roof max_iterations must be >= 1");
}

double ensemble_value(const Ensemble& e, MeasureKind kind) {
    double v = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) v += e.weights()[i] * evaluate(kind, e.members()[i]);
    return v;
}

struct GroupedSearch {
    std::vector<RestartOutcome> outcomes;
    std::vector<double> values; // recomputed from ensembles
    std::vector<Ensemble> ensembles;
};

GroupedSearch run_restarts(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config,
                           const std::vector<std::vector<int>>& groups, int m, int r, std::uint64_t seed_base,
                           const Matrix* warm_start) {
    const detail::DecompositionObjective objective(rho, kind, groups);
    const RestartOptimizer optimizer(objective, config);
    const auto n = static_cast<std::size_t>(config.restarts);
    std::vector<RestartOutcome> outcomes(n);
    std::vector<std::optional<Ensemble>> ensembles(n);
    std::vector<double> values(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
        Matrix start = (i == 0 && warm_start) ? *warm_start
                                              : detail::random_isometry(m, r, seed_base + static_cast<std::uint64_t>(i));
        outcomes[i] = optimizer.run(std::move(start));
        ensembles[i] = ensemble_from_members(rho.shape(), objective.member_vectors(outcomes[i].isometry), groups);
        values[i] = ensemble_value(*ensembles[i], kind);
    });
    GroupedSearch out;
    out.outcomes = std::move(outcomes);
    out.values = std::move(values);
    for (auto& e : ensembles) out.ensembles.push_back(std::move(*e));
    return out;
}

std::size_t best_index(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best]) best = i; // strict: lowest index wins ties
    return best;
}

} // namespace

RoofResult roof_minimize(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config) {
    check_config(config);
    if (rho.shape().size() < 2) throw ArgumentError("roof needs at least two subsystems");
    if (rho.dimension() > config.max_dimension)
        throw ResourceError("roof: dimension " + std::to_string(rho.dimension()) + " exceeds cap " +
                            std::to_string(config.max_dimension));
    require_valid(rho);

    const int r = density_rank(rho);
    if (r == 1) {
        // The only decomposition of a pure state is the state itself.
        const Matrix phi = eigen_weights(rho);
        PureState psi = PureState::normalized(rho.shape(), phi.col(0));
        const double v = evaluate(kind, psi);
        Ensemble e({1.0}, {State(std::move(psi))});
        return RoofResult{v, std::move(e), std::vector<double>(static_cast<std::size_t>(config.restarts), v), true,
                          std::vector<std::vector<double>>(static_cast<std::size_t>(config.restarts), {v}), 1, 1};
    }
    const int m = config.ensemble_size.value_or(r * r);
    if (m < r) throw ArgumentError("ensemble_size must be >= rank(rho) = " + std::to_string(r));

    std::vector<std::vector<int>> singles(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) singles[static_cast<std::size_t>(k)] = {k};
    auto pure = run_restarts(rho, kind, config, singles, m, r, config.seed, nullptr);
    std::size_t best = best_index(pure.values);

    RoofResult result{pure.values[best], pure.ensembles[best], pure.values, pure.outcomes[best].converged, {}, r, m};
    for (auto& o : pure.outcomes) result.histories.push_back(std::move(o.history));
    if (config.strategy == RoofStrategy::pure_roof) return result;

    // Mixed roof: k = 1 is the state itself, k = m is the pure roof above.
    const double direct = evaluate(kind, State(rho));
    if (direct < result.value) {
        result.value = direct;
        result.ensemble = Ensemble({1.0}, {State(rho)});
        result.converged = true;
    }
    const Matrix warm = pure.outcomes[best].isometry;
    for (int k = 2; k < m; ++k) {
        const auto groups = balanced_groups(m, k);
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(config.restarts);
        auto grouped = run_restarts(rho, kind, config, groups, m, r, seed, &warm);
        const std::size_t gbest = best_index(grouped.values);
        result.per_restart_values.insert(result.per_restart_values.end(), grouped.values.begin(), grouped.values.end());
        for (auto& o : grouped.outcomes) result.histories.push_back(std::move(o.history));
        if (grouped.values[gbest] < result.value) {
            result.value = grouped.values[gbest];
            result.ensemble = grouped.ensembles[gbest];
            result.converged = grouped.outcomes[gbest].converged;
        }
    }
    return result;
}

double concurrence(const DensityMatrix& rho) {
    if (!(rho.shape() == RegisterShape({2, 2}))) throw ArgumentError("concurrence needs a two-qubit state");
    require_valid(rho);
    Matrix yy = Matrix::Zero(4, 4);
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Matrix& m = rho.matrix();
    const Matrix flipped = yy * m.conjugate() * yy;
    const Matrix root = hermitian_function(0.5 * (m + m.adjoint()), [](double x) { return std::sqrt(std::max(x, 0.0)); });
    const Matrix r = root * flipped * root;
    Eigen::VectorXd lam = detail::spectrum(0.5 * (r + r.adjoint()));
    std::vector<double> s;
    for (Eigen::Index i = 0; i < lam.size(); ++i) s.push_back(std::sqrt(std::max(lam(i), 0.0)));
    std::sort(s.begin(), s.end(), std::greater<>());
    return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

double eof_two_qubit(const DensityMatrix& rho) {
    const double c = concurrence(rho);
    const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
    auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    return term(x) + term(1.0 - x);
}

double roof_value(const State& state, MeasureKind kind, const RoofConfig& config) {
    if (const auto* psi = std::get_if<PureState>(&state)) return evaluate(kind, *psi);
    return roof_minimize(std::get<DensityMatrix>(state), kind, config).value;
}

PcrcReport pcrc_report(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config) {
    const double direct = evaluate(kind, State(rho));
    auto roof = roof_minimize(rho, kind, config);
    const double gap = direct - roof.value;
    return PcrcReport{direct, std::move(roof), gap};
}

double pcrc_gap(const DensityMatrix& rho, MeasureKind kind, const RoofConfig& config) {
    return pcrc_report(rho, kind, config).gap;
}

double flags_residual(const Ensemble& ensemble, MeasureKind kind, const RoofConfig& config) {
    const DensityMatrix flagged = flagged_mixture(ensemble);
    const double joint = roof_minimize(flagged, kind, config).value;
    double parts = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i)
        parts += ensemble.weights()[i] * roof_value(ensemble.members()[i], kind, config);
    return std::abs(joint - parts);
}

double roof_additivity_gap(const DensityMatrix& sigma, const DensityMatrix& eta, MeasureKind kind,
                           const RoofConfig& config) {
    const double joint = roof_minimize(kron(sigma, eta), kind, config).value;
    return joint - roof_minimize(sigma, kind, config).value - roof_minimize(eta, kind, config).value;
}

} // namespace totcorr
