#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "totcorr/errors.hpp"
#include "totcorr/measures.hpp"

using namespace totcorr;

namespace {

PureState product_of_random(int n, std::uint64_t seed) {
    std::vector<PureState> parts;
    for (int i = 0; i < n; ++i) parts.push_back(random_pure(RegisterShape({2}), seed + i));
    return product(parts);
}

DensityMatrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return DensityMatrix(RegisterShape({2}), m);
}

const DensityMatrix kMixedQubit = DensityMatrix::maximally_mixed(RegisterShape({2}));

} // namespace

TEST(Entropy, Examples) {
    EXPECT_NEAR(von_neumann_entropy(kMixedQubit), 1.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(dm(random_pure(RegisterShape::qubits(3), 2))), 0.0, 1e-9);
    EXPECT_NEAR(von_neumann_entropy(diag2(1.0 / 3, 2.0 / 3)), oracle::h2(1.0 / 3), 1e-14);
}

TEST(Entropy, MatchesOracleAndRange) {
    for (int t = 0; t < 20; ++t) {
        const auto rho = random_density(RegisterShape({2, 3}), 1 + t % 6, 100 + t);
        const double s = von_neumann_entropy(rho);
        EXPECT_NEAR(s, oracle::entropy(rho.matrix()), 1e-10);
        EXPECT_GE(s, -1e-12);
        EXPECT_LE(s, std::log2(6.0) + 1e-9);
    }
}

TEST(Entropy, RejectsInvalid) {
    EXPECT_THROW(von_neumann_entropy(diag2(1.5, -0.5)), ArgumentError);
    EXPECT_THROW(linear_entropy(diag2(1.0, 1.0)), ArgumentError);
}

TEST(LinearEntropy, Examples) {
    EXPECT_NEAR(linear_entropy(kMixedQubit), 0.5, 1e-15);
    EXPECT_NEAR(linear_entropy(dm(epr())), 0.0, 1e-15);
    EXPECT_NEAR(linear_entropy(diag2(0.75, 0.25)), 0.375, 1e-15);
}

TEST(MutualInformation, Examples) {
    const int a[] = {0};
    const int b[] = {1};
    EXPECT_NEAR(mutual_information(dm(epr()), a, b), 2.0, 1e-12);
    EXPECT_NEAR(mutual_information(product_of_random(2, 3), a, b), 0.0, 1e-9);
    EXPECT_NEAR(mutual_information(dm(ghz(3)), a, b), 1.0, 1e-12);
    const int overlap[] = {0, 1};
    EXPECT_THROW(mutual_information(dm(ghz(3)), a, overlap), ArgumentError);
    EXPECT_THROW(mutual_information(dm(ghz(3)), a, std::span<const int>{}), ArgumentError);
}

TEST(MutualInformation, GroupsMatchOracle) {
    const auto rho = random_density(RegisterShape::qubits(4), 5, 12);
    const int a[] = {0, 2};
    const int b[] = {3};
    const std::vector<int> dims{2, 2, 2, 2};
    const double want = oracle::entropy(oracle::partial_trace(rho.matrix(), dims, {0, 2})) +
                        oracle::entropy(oracle::partial_trace(rho.matrix(), dims, {3})) -
                        oracle::entropy(oracle::partial_trace(rho.matrix(), dims, {0, 2, 3}));
    EXPECT_NEAR(mutual_information(rho, a, b), want, 1e-10);
}

TEST(PairwiseProbe, Examples) {
    EXPECT_NEAR(pairwise_probe(epr(), 0, 1), 1.0, 1e-12);
    EXPECT_NEAR(pairwise_probe(product_of_random(2, 5), 0, 1), 0.0, 1e-9);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(pairwise_probe(ghz(4), i, j), 0.5, 1e-12);
}

TEST(MeasureM, Examples) {
    EXPECT_NEAR(measure_M(dm(ghz(3))), 1.5, 1e-12);
    EXPECT_NEAR(measure_M(product_of_random(4, 9)), 0.0, 1e-9);
    EXPECT_NEAR(measure_M(dm(epr_power(4))), 2.0, 1e-12);
    EXPECT_THROW(measure_M(random_pure(RegisterShape({4}), 0)), ArgumentError);
}

TEST(MeasureO, Examples) {
    for (int n = 2; n <= 6; ++n) EXPECT_NEAR(measure_O(dm(ghz(n))), n / 2.0, 1e-12);
    EXPECT_NEAR(measure_O(dm(epr_power(4))), 2.0, 1e-12);
    EXPECT_NEAR(measure_O(product_of_random(3, 1)), 0.0, 1e-9);
}

TEST(MeasureS, Examples) {
    EXPECT_NEAR(measure_S(dm(ghz(4))), 2.5, 1e-12);
    EXPECT_NEAR(measure_S(dm(epr_power(4))), 2.0, 1e-12);
    EXPECT_NEAR(measure_S(dm(cluster(4))), 1.5, 1e-12);
    EXPECT_NEAR(measure_S(product_of_random(3, 4)), 0.0, 1e-9);
    EXPECT_NEAR(measure_S(dm(epr())), 1.0, 1e-12);
}

TEST(MeasureMW, Examples) {
    for (int n = 2; n <= 5; ++n) EXPECT_NEAR(measure_MW(ghz(n)), n / 2.0, 1e-12);
    EXPECT_NEAR(measure_MW(product_of_random(3, 6)), 0.0, 1e-12);
    EXPECT_NEAR(measure_MW(w(3)), 3.0 * 4.0 / 9.0, 1e-12);
}

TEST(Measures, PureAndDensityInputsAgreeWithOracle) {
    const std::vector<int> dims{2, 3, 2};
    for (int t = 0; t < 5; ++t) {
        const auto psi = random_pure(RegisterShape(dims), 40 + t);
        const Matrix full = oracle::projector(psi.amplitudes());
        EXPECT_NEAR(measure_M(psi), oracle::measure_M(full, dims), 1e-10);
        EXPECT_NEAR(measure_O(psi), oracle::measure_O(full, dims), 1e-10);
        EXPECT_NEAR(measure_S(psi), oracle::measure_S(full, dims), 1e-10);
        EXPECT_NEAR(measure_M(dm(psi)), measure_M(psi), 1e-10);
        EXPECT_NEAR(measure_O(dm(psi)), measure_O(psi), 1e-10);
        const auto rho = random_density(RegisterShape(dims), 3, 50 + t);
        EXPECT_NEAR(measure_M(rho), oracle::measure_M(rho.matrix(), dims), 1e-10);
        EXPECT_NEAR(measure_O(rho), oracle::measure_O(rho.matrix(), dims), 1e-10);
    }
}

TEST(Measures, EvaluateDispatch) {
    const auto psi = random_pure(RegisterShape::qubits(3), 77);
    EXPECT_EQ(evaluate(MeasureKind::M, psi), measure_M(psi));
    EXPECT_EQ(evaluate(MeasureKind::O, psi), measure_O(psi));
    EXPECT_EQ(evaluate(MeasureKind::S, psi), measure_S(psi));
    EXPECT_EQ(evaluate(MeasureKind::MW, psi), measure_MW(psi));
    EXPECT_EQ(parse_measure("MW"), MeasureKind::MW);
    EXPECT_FALSE(parse_measure("Q").has_value());
    EXPECT_EQ(to_string(MeasureKind::S), "S");
}

TEST(Measures, EntropyTermsReproduceMeasures) {
    const auto psi = random_pure(RegisterShape::qubits(4), 21);
    for (auto kind : {MeasureKind::M, MeasureKind::O, MeasureKind::S, MeasureKind::MW}) {
        double total = 0.0;
        for (const auto& term : entropy_terms(kind, psi.shape())) {
            const auto rho = marginal(psi, term.subsystems);
            total += term.weight * (term.linear ? linear_entropy(rho) : von_neumann_entropy(rho));
        }
        EXPECT_NEAR(total, evaluate(kind, psi), 1e-10) << to_string(kind);
    }
}

TEST(Bipartite, Examples) {
    const int half[] = {0, 1};
    EXPECT_NEAR(bipartite_correlation(ghz(4), half), 2.0, 1e-12);
    EXPECT_NEAR(bipartite_correlation(product_of_random(4, 2), half), 0.0, 1e-9);
    const int cross[] = {0, 2};
    EXPECT_NEAR(bipartite_correlation(epr_power(4), cross), 4.0, 1e-12);
    const int all[] = {0, 1, 2, 3};
    EXPECT_THROW(bipartite_correlation(ghz(4), all), ArgumentError);
}

TEST(SubsetSum, Examples) {
    EXPECT_NEAR(subset_correlation_sum(product_of_random(3, 8)), 0.0, 1e-9);
    EXPECT_NEAR(subset_correlation_sum(ghz(3)), 6.0, 1e-12);
    EXPECT_NEAR(subset_correlation_sum(epr()), 2.0, 1e-12);
    EXPECT_THROW(subset_correlation_sum(ghz(13)), ResourceError);
}

TEST(RelativeEntropy, Examples) {
    const auto rho = random_density(RegisterShape::qubits(2), 3, 4);
    EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-9);
    EXPECT_NEAR(relative_entropy(dm(epr()), DensityMatrix::maximally_mixed(RegisterShape::qubits(2))), 2.0, 1e-12);
    EXPECT_THROW(relative_entropy(kMixedQubit, diag2(1.0, 0.0)), DomainError);
}

TEST(RelativeEntropy, EqualsMutualInformation) {
    const int a[] = {0};
    const int b[] = {1};
    for (int t = 0; t < 10; ++t) {
        const auto rho = random_density(RegisterShape::qubits(2), 4, 300 + t);
        const auto prod = kron(partial_trace(rho, a), partial_trace(rho, b));
        EXPECT_NEAR(relative_entropy(rho, prod), mutual_information(rho, a, b), 1e-9);
    }
}

TEST(Form2, Examples) {
    EXPECT_NEAR(measure_S_form2(ghz(3)), 1.5, 1e-8);
    EXPECT_NEAR(measure_S_form2(product_of_random(3, 0)), 0.0, 1e-8);
    EXPECT_NEAR(measure_S_form2(w(4)), measure_S(w(4)), 1e-8);
}

TEST(Bounds, Examples) {
    EXPECT_DOUBLE_EQ(bound_M(2, 2), 1.0);
    EXPECT_DOUBLE_EQ(bound_M(5, 2), 5.0);
    EXPECT_DOUBLE_EQ(bound_S(4, 2), 2.5);
    EXPECT_DOUBLE_EQ(bound_M(3, 4), 3.0);  // 3 pairs / 2 * log2(4)
    EXPECT_THROW(bound_M(1, 2), ArgumentError);
}

TEST(Ssa, Examples) {
    EXPECT_NEAR(ssa_check(dm(product_of_random(3, 10))), 0.0, 1e-9);
    EXPECT_NEAR(ssa_check(dm(ghz(3))), 1.0, 1e-12);
    EXPECT_THROW(ssa_check(dm(ghz(4))), ArgumentError);
}

TEST(Report, ConsistentFields) {
    const auto psi = random_pure(RegisterShape::qubits(5), 33);
    const auto r = measure_report(psi);
    double sum = 0.0;
    for (const auto& p : r.pairs) sum += p.value;
    EXPECT_EQ(r.pairs.size(), 10u);
    EXPECT_NEAR(r.M, sum, 1e-10);
    EXPECT_NEAR(r.S, 0.5 * (r.O + r.M), 1e-10);
    EXPECT_NEAR(r.M, measure_M(psi), 1e-10);
    EXPECT_NEAR(r.MW, measure_MW(psi), 1e-10);
    EXPECT_DOUBLE_EQ(r.bound_M, bound_M(5, 2));
    EXPECT_DOUBLE_EQ(r.bound_S, bound_S(5, 2));
}

TEST(Report, BoundsUseLargestLocalDimension) {
    const auto r = measure_report(random_pure(RegisterShape({2, 3, 2}), 1));
    EXPECT_DOUBLE_EQ(r.bound_M, bound_M(3, 3));
}
