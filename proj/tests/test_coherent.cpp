#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qrbf/coherent.hpp"
#include "qrbf/error.hpp"

using namespace qrbf;

namespace {

// Normalized truncated coherent amplitudes, computed from log-factorials.
Eigen::VectorXd reference_amplitudes(double ratio, int order) {
    Eigen::VectorXd v(order);
    for (int k = 0; k < order; ++k) {
        v(k) = ratio == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::exp(k * std::log(ratio) - 0.5 * std::lgamma(k + 1.0));
    }
    return v.normalized();
}

}  // namespace

TEST(Coherent, TwoLevelAmplitudes) {
    const TruncatedCoherent s = coherent_state(1.0, 1.0, 2);
    ASSERT_EQ(s.amplitudes.size(), 2);
    EXPECT_NEAR(s.amplitudes(0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.amplitudes(1), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.partial_norm, 2.0, 1e-15);
    EXPECT_NEAR(s.full_norm, std::exp(1.0), 1e-14);
}

TEST(Coherent, MatchesReferenceAmplitudes) {
    for (double ratio : {0.0, 0.3, 1.0, 2.5}) {
        for (int order : {1, 5, 20}) {
            const TruncatedCoherent s = coherent_state(ratio * 0.7, 0.7, order);
            EXPECT_LT((s.amplitudes - reference_amplitudes(ratio, order)).norm(), 1e-13);
        }
    }
}

TEST(Coherent, HighOrderConverges) {
    const Eigen::VectorXd a = coherent_state(1.0, 1.0, 30).amplitudes;
    const Eigen::VectorXd b = coherent_state(1.0, 1.0, 60).amplitudes;
    EXPECT_GE(a.dot(b.head(30)), 1.0 - 1e-12);
}

TEST(Coherent, TruncationBoundValue) {
    EXPECT_NEAR(truncation_bound(1.0, 1.0, 10), std::sqrt(2.0 / 3628800.0), 1e-18);
    EXPECT_NEAR(truncation_bound(1.0, 1.0, 10), 7.4239e-4, 5e-9);
    EXPECT_EQ(min_order(1.0, 7.5e-4), 10);
    EXPECT_EQ(min_order(0.0, 1e-6), 1);
    int prev = 1;
    for (double delta : {1e-1, 1e-2, 1e-4, 1e-8, 1e-12}) {
        const int n = min_order(1.5, delta);
        EXPECT_GE(n, prev);
        EXPECT_LE(truncation_bound(1.5, 1.0, n), delta);
        EXPECT_GT(truncation_bound(1.5, 1.0, n - 1), delta);
        prev = n;
    }
}

TEST(Coherent, MeasuredErrorBelowBound) {
    for (double ratio : {0.1, 0.5, 1.0, 1.5, 2.0}) {
        for (int order : {2, 4, 8, 16}) {
            const double measured = measured_truncation_error(ratio, 1.0, order);
            // Independent: distance to a long reference vector.
            const Eigen::VectorXd full = reference_amplitudes(ratio, order + 150);
            Eigen::VectorXd trunc = Eigen::VectorXd::Zero(order + 150);
            trunc.head(order) = reference_amplitudes(ratio, order);
            EXPECT_NEAR(measured, (full - trunc).norm(), 1e-12);
            EXPECT_LE(measured, truncation_bound(ratio, 1.0, order));
        }
    }
}

TEST(Coherent, DisplacedVacuumAgrees) {
    const Eigen::VectorXd v = displaced_vacuum(0.8, 40);
    const Eigen::VectorXd ref = reference_amplitudes(0.8, 40);
    EXPECT_LT((v.head(10) - ref.head(10)).norm(), 1e-10);
}

TEST(Coherent, ProductStateAtOrigin) {
    const ProductCoherent p = product_state(Eigen::Vector2d::Zero(), 0.5, 3);
    EXPECT_EQ(p.total_dim(), 9);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(9);
    e0(0) = 1.0;
    EXPECT_LT((p.amplitudes() - e0).norm(), 1e-15);
}

TEST(Coherent, InnerProducts) {
    const Eigen::Vector3d x(0.1, -0.2, 0.3);
    EXPECT_NEAR(coherent_inner(x, x, 0.4, 12), 1.0, 1e-14);
    // d = 1: <psi(0)|psi(sigma)> tends to exp(-1/2).
    const int order = 8;
    const double sigma = 0.6;
    const double delta = truncation_bound(sigma, sigma, order);
    const double ip = coherent_inner(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, sigma), sigma, order);
    EXPECT_NEAR(ip, std::exp(-0.5), 2.0 * delta);
    // Product over coordinates equals the flattened inner product.
    const Eigen::Vector3d y(0.0, 0.25, -0.1);
    EXPECT_NEAR(coherent_inner(x, y, 0.4, 5),
                product_state(x, 0.4, 5).amplitudes().dot(product_state(y, 0.4, 5).amplitudes()), 1e-14);
}

TEST(Coherent, GramSingleSite) {
    Eigen::MatrixXd x(1, 2);
    x << 0.2, 0.1;
    const CoherentGram g = gram_coherent(DataSet(x, Eigen::VectorXd::Ones(1)), 0.5, 6);
    EXPECT_NEAR(g.matrix.entry(0, 0), 1.0, 1e-14);
}

TEST(Coherent, GramWithinBound) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(6, 2);
    for (int i = 0; i < 12; ++i) x(i) = u(rng);
    const DataSet data(x, Eigen::VectorXd::Ones(6));
    const double sigma = 0.5;
    const int order = 8;
    const CoherentGram g = gram_coherent(data, sigma, order);
    Eigen::MatrixXd exact(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            exact(i, j) = std::exp(-(data.site(i) - data.site(j)).squaredNorm() / (2 * sigma * sigma)) / 6.0;
    EXPECT_LT((g.exact - exact).norm(), 1e-14);
    EXPECT_NEAR(g.frobenius_error, (g.matrix.to_dense() - exact).norm(), 1e-14);
    EXPECT_NEAR(g.bound, 4.0 * dataset_delta(data, sigma, order), 1e-15);
    EXPECT_TRUE(g.within_bound());
}

TEST(Coherent, SuperpositionPartialTrace) {
    Eigen::MatrixXd x(2, 1);
    x << 0.2, 0.9;
    const DataSet data(x, Eigen::VectorXd::Ones(2));
    const SuperpositionCheck s = superposition_gram_check(data, 0.7, 4);
    EXPECT_EQ(s.state_dim, 8);
    EXPECT_NEAR(s.trace, 1.0, 1e-14);
    EXPECT_LE(s.max_deviation, 1e-12);
    const CoherentGram g = gram_coherent(data, 0.7, 4);
    EXPECT_LT((s.reduced - g.matrix.to_dense()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW((void)superposition_gram_check(data, 0.7, 4, 7), CapExceeded);
}
