#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qrbf/dataset.hpp"
#include "qrbf/error.hpp"
#include "qrbf/interpolation.hpp"

using namespace qrbf;

namespace {

DataSet two_sites() {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 1.0;
    return DataSet(x, Eigen::Vector2d(0.5, 0.5 * std::exp(-0.5)));
}

DataSet random_sites(Eigen::Index m, Eigen::Index d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(m, d);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) x(i, k) = u(rng);
        y(i) = u(rng) - 0.5;
    }
    return DataSet(x, y);
}

}  // namespace

TEST(DataSet, RejectsDuplicatesAndNonFinite) {
    Eigen::MatrixXd x(2, 2);
    x << 0.1, 0.2, 0.1, 0.2;
    EXPECT_THROW(DataSet(x, Eigen::Vector2d(1, 2)), InvalidArgument);
    x(1, 1) = std::nan("");
    EXPECT_THROW(DataSet(x, Eigen::Vector2d(1, 2)), InvalidArgument);
    EXPECT_THROW(DataSet(Eigen::MatrixXd(2, 2), Eigen::Vector3d(1, 2, 3)), DimensionMismatch);
}

TEST(DataSet, CsvRoundTrip) {
    const DataSet data = random_sites(5, 3, 4);
    std::stringstream buf;
    write_dataset_csv(buf, data);
    const DataSet back = read_dataset_csv(buf);
    EXPECT_EQ(back.sites(), data.sites());
    EXPECT_EQ(back.values(), data.values());
    std::istringstream bad("x1,y\n0.1,abc\n");
    EXPECT_THROW((void)read_dataset_csv(bad), InvalidArgument);
}

TEST(Assemble, NormalizedTwoByTwo) {
    const InterpMatrix a = assemble(two_sites(), Kernel::gaussian_sigma(1.0), {.normalized = true});
    const double off = 0.5 * std::exp(-0.5);
    EXPECT_NEAR(a.entry(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(a.entry(1, 1), 0.5, 1e-15);
    EXPECT_NEAR(a.entry(0, 1), off, 1e-15);
    EXPECT_NEAR(a.entry(1, 0), off, 1e-15);
    EXPECT_TRUE(a.normalized());
}

TEST(Assemble, SingleSite) {
    Eigen::MatrixXd x(1, 2);
    x << 0.3, -0.4;
    const InterpMatrix a = assemble(DataSet(x, Eigen::VectorXd::Ones(1)), Kernel::matern_c2(2.0));
    EXPECT_EQ(a.order(), 1);
    EXPECT_DOUBLE_EQ(a.entry(0, 0), 1.0);
}

TEST(Assemble, CompactBelowSeparationIsDiagonal) {
    const DataSet data = random_sites(12, 2, 9);
    const Kernel k = Kernel::wendland({3, 2}, 0.5 * data.min_separation());
    const InterpMatrix a = assemble(data, k);
    EXPECT_EQ(a.storage(), InterpMatrix::Storage::Sparse);
    EXPECT_EQ(a.sparsity(), 1);
    EXPECT_TRUE(a.to_dense().isApprox(Eigen::MatrixXd::Identity(12, 12)));
}

TEST(Assemble, SparseMatchesDense) {
    const DataSet data = random_sites(30, 2, 11);
    const Kernel k = Kernel::wendland({3, 4}, 0.35);
    const InterpMatrix sparse = assemble(data, k);
    const InterpMatrix dense = assemble(data, k, {.force_dense = true});
    Eigen::MatrixXd direct(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) direct(i, j) = k((data.site(i) - data.site(j)).norm());
    EXPECT_LT((sparse.to_dense() - direct).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((dense.to_dense() - direct).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(30, -1.0, 1.0);
    EXPECT_LT((sparse.multiply(v) - direct * v).norm(), 1e-13);
    Eigen::Index widest = 0;
    for (int i = 0; i < 30; ++i) widest = std::max<Eigen::Index>(widest, (direct.row(i).array() != 0.0).count());
    EXPECT_EQ(sparse.sparsity(), widest);
}

TEST(Assemble, MultiquadricNeedsOptIn) {
    const DataSet data = random_sites(4, 1, 1);
    EXPECT_THROW((void)assemble(data, Kernel::multiquadric(1.0)), InvalidArgument);
    EXPECT_NO_THROW((void)assemble(data, Kernel::multiquadric(1.0), {.allow_non_pd = true}));
}

TEST(Solve, KnownCoefficients) {
    const DataSet data = two_sites();
    const InterpMatrix a = assemble(data, Kernel::gaussian_sigma(1.0), {.normalized = true});
    const Coefficients c = solve(a, data.values());
    EXPECT_NEAR(c.c(0), 1.0, 1e-12);
    EXPECT_NEAR(c.c(1), 0.0, 1e-12);
    EXPECT_NEAR(c.norm, 1.0, 1e-12);
}

TEST(Solve, RandomSpdResidual) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXd b(8, 8);
    for (int i = 0; i < 64; ++i) b(i) = g(rng);
    const Eigen::MatrixXd a = b * b.transpose() + Eigen::MatrixXd::Identity(8, 8);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) y(i) = g(rng);
    const Coefficients c = solve_dense(a, y);
    EXPECT_LE((a * c.c - y).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((c.c - a.ldlt().solve(y)).norm(), 1e-10);
}

TEST(Solve, SparseConjugateGradientMatchesCholesky) {
    const DataSet data = random_sites(40, 2, 17);
    const Kernel k = Kernel::wendland({3, 2}, 0.3);
    const Coefficients cg = solve(assemble(data, k), data.values());
    const Coefficients chol = solve(assemble(data, k, {.force_dense = true}), data.values());
    EXPECT_LT((cg.c - chol.c).norm(), 1e-9 * chol.norm);
    EXPECT_LE(site_residual(cg.c, data, k), 1e-9);
}

TEST(Solve, RejectsIndefinite) {
    Eigen::Matrix2d a;
    a << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW((void)solve_dense(a, Eigen::Vector2d(1, 1)), NotPositiveDefinite);
    EXPECT_THROW((void)solve_dense(a, Eigen::Vector3d(1, 1, 1)), DimensionMismatch);
}

TEST(Evaluate, SingleSite) {
    Eigen::MatrixXd x(1, 2);
    x << 0.0, 0.0;
    const DataSet data(x, Eigen::VectorXd::Ones(1));
    const double f = evaluate(Eigen::VectorXd::Constant(1, 2.0), data, Kernel::gaussian_sigma(1.0),
                              Eigen::Vector2d(0.6, 0.8));
    EXPECT_NEAR(f, 2.0 * std::exp(-0.5), 1e-15);
}

TEST(Evaluate, InterpolatesAtSites) {
    const DataSet data = random_sites(15, 3, 23);
    const Kernel k = Kernel::inverse_multiquadric(2.0);
    const Coefficients c = solve(assemble(data, k), data.values());
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        EXPECT_NEAR(evaluate(c, data, k, data.site(j)), data.values()(j), 1e-9);
    }
    const Eigen::VectorXd q = Eigen::Vector3d(0.2, 0.4, 0.6);
    EXPECT_NEAR(feature_vector(data, k, q).dot(c.c), evaluate(c, data, k, q), 1e-13);
}

TEST(Spectrum, TwoByTwo) {
    const Spectrum s = spectrum(assemble(two_sites(), Kernel::gaussian_sigma(1.0), {.normalized = true}));
    EXPECT_NEAR(s.max, 0.5 * (1.0 + std::exp(-0.5)), 1e-14);
    EXPECT_NEAR(s.min, 0.5 * (1.0 - std::exp(-0.5)), 1e-14);
    EXPECT_NEAR(s.kappa, (1.0 + std::exp(-0.5)) / (1.0 - std::exp(-0.5)), 1e-12);
}

TEST(Perturbation, ZeroPerturbation) {
    const Eigen::MatrixXd a = assemble(two_sites(), Kernel::gaussian_sigma(1.0)).to_dense();
    const PerturbationReport r = perturbation_check(a, Eigen::MatrixXd::Zero(2, 2));
    EXPECT_EQ(r.r, 0.0);
    EXPECT_LE(r.inverse_change, 1e-15);
    EXPECT_LE(r.max_eigen_shift, 1e-15);
    EXPECT_TRUE(r.holds());
}

TEST(Perturbation, ScaledIdentity) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    const PerturbationReport r = perturbation_check(a, 0.1 * a);
    EXPECT_NEAR(r.r, 0.1, 1e-15);
    // (1.1)^-1 - 1 and the bound 0.1 / 0.9.
    EXPECT_NEAR(r.inverse_change, 1.0 - 1.0 / 1.1, 1e-14);
    EXPECT_NEAR(r.inverse_bound, 0.1 / 0.9, 1e-14);
    EXPECT_NEAR(r.max_eigen_shift, 0.1, 1e-14);
    EXPECT_TRUE(r.holds());
}

TEST(Perturbation, RandomSymmetricHolds) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd b(6, 6), e(6, 6);
        for (int i = 0; i < 36; ++i) b(i) = g(rng), e(i) = 0.05 * g(rng);
        const Eigen::MatrixXd a = b * b.transpose() + Eigen::MatrixXd::Identity(6, 6);
        const PerturbationReport r = perturbation_check(a, 0.5 * (e + e.transpose()));
        EXPECT_TRUE(r.holds());
    }
}
