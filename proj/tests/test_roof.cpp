#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "totcorr/errors.hpp"
#include "totcorr/roof.hpp"

using namespace totcorr;

namespace {

DensityMatrix werner(double p) {
    Matrix m = p * dm(epr()).matrix() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
    return DensityMatrix(RegisterShape::qubits(2), m);
}

DensityMatrix classical_pair() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = 0.5;
    return DensityMatrix(RegisterShape::qubits(2), m);
}

PureState basis2(int a, int b) {
    const int digits[] = {a, b};
    return PureState::basis(RegisterShape::qubits(2), digits);
}

RoofConfig quick(std::uint64_t seed = 0) {
    RoofConfig c;
    c.restarts = 4;
    c.seed = seed;
    c.threads = 1;
    return c;
}

double ensemble_value(const Ensemble& e, MeasureKind kind) {
    double v = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) v += e.weights()[i] * evaluate(kind, e.members()[i]);
    return v;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

} // namespace

TEST(Purify, RoundTrip) {
    const auto rho = random_density(RegisterShape({2, 3}), 3, 4);
    EXPECT_EQ(density_rank(rho), 3);
    const auto psi = purify(rho);
    EXPECT_EQ(psi.shape(), RegisterShape({2, 3, 3}));
    const Matrix back = oracle::partial_trace(oracle::projector(psi.amplitudes()), {2, 3, 3}, {0, 1});
    EXPECT_LE(max_abs(back - rho.matrix()), 1e-10);
}

TEST(Purify, PureAndMaximallyMixed) {
    const auto phi = random_pure(RegisterShape::qubits(2), 3);
    const auto psi = purify(dm(phi));
    EXPECT_EQ(psi.shape(), RegisterShape::qubits(3));
    // Up to a global phase, psi = phi (x) |0>.
    const int zero[] = {0};
    const PureState parts[] = {phi, PureState::basis(RegisterShape({2}), zero)};
    EXPECT_NEAR(std::abs(psi.amplitudes().dot(product(parts).amplitudes())), 1.0, 1e-10);

    const auto bell = purify(DensityMatrix::maximally_mixed(RegisterShape({2, 2})));
    const int sys[] = {0, 1};
    EXPECT_NEAR(von_neumann_entropy(marginal(bell, sys)), 2.0, 1e-10);
}

TEST(Isometry, IdentityGivesEigenEnsemble) {
    const auto rho = random_density(RegisterShape::qubits(2), 3, 8);
    const auto e = ensemble_from_isometry(rho, Matrix::Identity(3, 3));
    ASSERT_EQ(e.size(), 3u);
    const auto es = hermitian_eigensystem(rho.matrix());
    std::vector<double> eig{es.values(1), es.values(2), es.values(3)};
    std::vector<double> w = e.weights();
    std::sort(w.begin(), w.end());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(w[i], eig[i], 1e-12);
}

TEST(Isometry, AnyIsometryReconstructs) {
    const auto rho = random_density(RegisterShape({2, 3}), 4, 9);
    for (int m : {4, 7, 16}) {
        const Matrix v = detail::random_isometry(m, 4, 100 + m);
        EXPECT_LE(max_abs(v.adjoint() * v - Matrix::Identity(4, 4)), 1e-12);
        EXPECT_LE(max_abs(mix(ensemble_from_isometry(rho, v)).matrix() - rho.matrix()), 1e-8);
    }
}

TEST(Isometry, PureAndErrors) {
    const auto psi = random_pure(RegisterShape::qubits(2), 5);
    const auto e = ensemble_from_isometry(dm(psi), Matrix::Identity(1, 1));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_NEAR(std::abs(std::get<PureState>(e.members()[0]).amplitudes().dot(psi.amplitudes())), 1.0, 1e-10);

    const auto rho = random_density(RegisterShape::qubits(2), 2, 1);
    EXPECT_THROW(ensemble_from_isometry(rho, Matrix::Ones(3, 2)), ArgumentError);
    EXPECT_THROW(ensemble_from_isometry(rho, Matrix::Identity(3, 3)), ArgumentError);
}

TEST(Isometry, ZeroWeightMembersDropped) {
    const auto rho = random_density(RegisterShape::qubits(2), 2, 1);
    Matrix v = Matrix::Zero(3, 2);
    v(0, 0) = 1.0;
    v(2, 1) = 1.0;
    EXPECT_EQ(ensemble_from_isometry(rho, v).size(), 2u);
}

TEST(Wootters, Examples) {
    EXPECT_NEAR(eof_two_qubit(dm(epr())), 1.0, 1e-10);
    EXPECT_NEAR(eof_two_qubit(DensityMatrix::maximally_mixed(RegisterShape::qubits(2))), 0.0, 1e-12);
    const double c = (3 * 0.9 - 1) / 2;
    EXPECT_NEAR(concurrence(werner(0.9)), c, 1e-10);
    EXPECT_NEAR(eof_two_qubit(werner(0.9)), oracle::h2(0.5 * (1 + std::sqrt(1 - c * c))), 1e-10);
    EXPECT_THROW(concurrence(dm(ghz(3))), ArgumentError);
}

TEST(Wootters, MatchesNonHermitianOracle) {
    for (int t = 0; t < 30; ++t) {
        const auto rho = random_density(RegisterShape::qubits(2), 1 + t % 4, 700 + t);
        EXPECT_NEAR(concurrence(rho), oracle::concurrence(rho.matrix()), 1e-7);
        EXPECT_NEAR(eof_two_qubit(rho), oracle::eof(rho.matrix()), 1e-6);
    }
}

TEST(Gradient, MatchesFiniteDifferences) {
    const auto rho = random_density(RegisterShape({2, 3}), 3, 21);
    for (auto kind : {MeasureKind::M, MeasureKind::O, MeasureKind::S, MeasureKind::MW}) {
        for (bool grouped : {false, true}) {
            std::vector<std::vector<int>> groups = grouped ? std::vector<std::vector<int>>{{0, 1}, {2, 3, 4}}
                                                           : std::vector<std::vector<int>>{{0}, {1}, {2}, {3}, {4}};
            const detail::DecompositionObjective f(rho, kind, groups);
            const Matrix v = detail::random_isometry(5, 3, 4);
            double value = 0.0;
            const Matrix g = f.gradient(v, &value);
            EXPECT_NEAR(value, f.value(v), 1e-12);
            // The objective is evaluated off the manifold too, so plain
            // coordinate differences apply.
            const Matrix num = oracle::numeric_gradient([&](const Matrix& x) { return f.value(x); }, v);
            EXPECT_LE(max_abs(g - num), 1e-5) << to_string(kind) << (grouped ? " grouped" : "");
        }
    }
}

TEST(Objective, ValueEqualsEnsembleValue) {
    const auto rho = random_density(RegisterShape::qubits(3), 2, 6);
    const detail::DecompositionObjective f(rho, MeasureKind::S, {{0}, {1}, {2}, {3}});
    const Matrix v = detail::random_isometry(4, 2, 1);
    EXPECT_NEAR(f.value(v), ensemble_value(ensemble_from_isometry(rho, v), MeasureKind::S), 1e-10);
}

TEST(Roof, PureInputIsExact) {
    const auto psi = random_pure(RegisterShape::qubits(3), 2);
    const auto r = roof_minimize(dm(psi), MeasureKind::S, quick());
    EXPECT_NEAR(r.value, measure_S(psi), 1e-10);
    EXPECT_EQ(r.ensemble.size(), 1u);
    EXPECT_DOUBLE_EQ(r.ensemble.weights()[0], 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(roof_value(psi, MeasureKind::M), measure_M(psi));
}

TEST(Roof, SeparableWerner) {
    EXPECT_LE(roof_minimize(werner(0.2), MeasureKind::M, quick()).value, 1e-3);
}

TEST(Roof, MatchesEofOnRandomStates) {
    RoofConfig cfg;
    cfg.threads = 1;
    for (int t = 0; t < 3; ++t) {
        const auto rho = random_density(RegisterShape::qubits(2), 2 + t, 900 + t);
        EXPECT_NEAR(roof_minimize(rho, MeasureKind::M, cfg).value, oracle::eof(rho.matrix()), 5e-3);
    }
}

TEST(Roof, ResultInvariants) {
    const auto rho = random_density(RegisterShape::qubits(3), 2, 31);
    for (auto strategy : {RoofStrategy::pure_roof, RoofStrategy::mixed_roof}) {
        auto cfg = quick(5);
        cfg.strategy = strategy;
        const auto r = roof_minimize(rho, MeasureKind::M, cfg);
        EXPECT_NEAR(r.value, ensemble_value(r.ensemble, MeasureKind::M), 1e-9);
        EXPECT_LE(r.value, *std::min_element(r.per_restart_values.begin(), r.per_restart_values.end()) + 1e-12);
        EXPECT_LE(max_abs(mix(r.ensemble).matrix() - rho.matrix()), 1e-8);
        EXPECT_EQ(r.rank, 2);
        EXPECT_EQ(r.ensemble_size, 4);
    }
}

TEST(Roof, Errors) {
    const auto rho = random_density(RegisterShape::qubits(2), 2, 0);
    auto cfg = quick();
    cfg.restarts = 0;
    EXPECT_THROW(roof_minimize(rho, MeasureKind::M, cfg), ArgumentError);
    cfg = quick();
    cfg.tolerance = 0;
    EXPECT_THROW(roof_minimize(rho, MeasureKind::M, cfg), ArgumentError);
    cfg = quick();
    cfg.ensemble_size = 1;
    EXPECT_THROW(roof_minimize(rho, MeasureKind::M, cfg), ArgumentError);
    cfg = quick();
    cfg.max_dimension = 2;
    EXPECT_THROW(roof_minimize(rho, MeasureKind::M, cfg), ResourceError);
    EXPECT_THROW(roof_minimize(DensityMatrix::maximally_mixed(RegisterShape({4})), MeasureKind::M, quick()),
                 ArgumentError);
}

TEST(Roof, ReportsNonConvergence) {
    auto cfg = quick();
    cfg.max_iterations = 1;
    const auto r = roof_minimize(random_density(RegisterShape::qubits(2), 4, 3), MeasureKind::M, cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(std::isfinite(r.value));
}

TEST(Roof, StrategyNames) {
    EXPECT_EQ(parse_strategy("mixed_roof"), RoofStrategy::mixed_roof);
    EXPECT_EQ(to_string(RoofStrategy::pure_roof), "pure_roof");
    EXPECT_FALSE(parse_strategy("other").has_value());
}

TEST(Pcrc, Examples) {
    EXPECT_NEAR(pcrc_gap(dm(random_pure(RegisterShape::qubits(2), 1)), MeasureKind::M, quick()), 0.0, 1e-12);
    // Direct M is 1/2 I(A:B) = 1/2; the roof vanishes on this separable state.
    const auto report = pcrc_report(classical_pair(), MeasureKind::M, quick());
    EXPECT_NEAR(report.direct, 0.5, 1e-12);
    EXPECT_NEAR(report.roof.value, 0.0, 1e-6);
    EXPECT_NEAR(report.gap, 0.5, 1e-6);
}

TEST(Pcrc, WernerCounterexample) {
    // Direct M of Werner(0.9) is below its entanglement of formation, so no
    // decomposition can attain it: the gap is genuinely negative.
    const auto rho = werner(0.9);
    const auto report = pcrc_report(rho, MeasureKind::M, quick());
    EXPECT_NEAR(report.direct, measure_M(rho), 0.0);
    EXPECT_NEAR(report.roof.value, oracle::eof(rho.matrix()), 1e-4);
    EXPECT_LT(report.gap, -0.03);
    EXPECT_TRUE(report.roof.converged);
}

TEST(Flags, Examples) {
    const Ensemble single({1.0}, {random_pure(RegisterShape::qubits(2), 4)});
    EXPECT_NEAR(flags_residual(single, MeasureKind::M, quick()), 0.0, 1e-6);

    const Ensemble bell_and_zero({0.5, 0.5}, {epr(), basis2(0, 0)});
    EXPECT_LE(flags_residual(bell_and_zero, MeasureKind::M, quick()), 5e-3);

    const Ensemble products({0.4, 0.6}, {basis2(0, 1), basis2(1, 1)});
    EXPECT_NEAR(flags_residual(products, MeasureKind::M, quick()), 0.0, 1e-6);
}

TEST(Additivity, Examples) {
    const auto a = random_pure(RegisterShape::qubits(2), 1);
    const auto b = random_pure(RegisterShape::qubits(2), 2);
    EXPECT_NEAR(roof_additivity_gap(dm(a), dm(b), MeasureKind::S, quick()), 0.0, 1e-8);

    EXPECT_NEAR(roof_additivity_gap(dm(epr()), classical_pair(), MeasureKind::M, quick()), 0.0, 5e-3);

    // Product of maximally mixed singles next to a product pure state.
    const auto mixed = DensityMatrix::maximally_mixed(RegisterShape({2}));
    EXPECT_NEAR(roof_additivity_gap(kron(mixed, mixed), dm(basis2(0, 1)), MeasureKind::M, quick()), 0.0, 1e-3);
}
