#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>

#include "qrbf/error.hpp"
#include "qrbf/qinvert.hpp"

using namespace qrbf;

namespace {

Eigen::MatrixXd random_spd(Eigen::Index m, double lo, double hi, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd b(m, m);
    for (Eigen::Index i = 0; i < m * m; ++i) b(i) = g(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd lam(m);
    for (Eigen::Index i = 0; i < m; ++i) lam(i) = u(rng);
    return q * lam.asDiagonal() * q.transpose();
}

Eigen::VectorXd random_rhs(Eigen::Index m, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = g(rng);
    return y;
}

double aligned_distance(const CVector& a, const CVector& b) {
    const cplx ov = a.dot(b);
    const cplx ph = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
    return (a * ph - b).norm();
}

struct Reference {
    CVector state;
    double post_select = 0.0;
};

// Phase estimation written out on the full clock (x) system space: one
// block-diagonal controlled evolution, a dense Fourier matrix, the keyed
// rotation, and the mirror-image uncompute.
Reference reference_phase_estimation(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double t0, int bits,
                                     double c) {
    const Eigen::Index t = Eigen::Index{1} << bits;
    const Eigen::Index m = a.rows();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const CMatrix v = es.eigenvectors().cast<cplx>();
    const cplx i(0.0, 1.0);

    CMatrix controlled = CMatrix::Zero(t * m, t * m);
    for (Eigen::Index k = 0; k < t; ++k) {
        const CVector ph = (es.eigenvalues().cast<cplx>() * (i * t0 * double(k) / double(t))).array().exp();
        controlled.block(k * m, k * m, m, m) = v * ph.asDiagonal() * v.adjoint();
    }
    CMatrix fourier(t, t);
    for (Eigen::Index j = 0; j < t; ++j)
        for (Eigen::Index k = 0; k < t; ++k)
            fourier(j, k) = std::exp(2.0 * std::numbers::pi * i * double(j * k) / double(t)) / std::sqrt(double(t));
    const CMatrix qft = Eigen::kroneckerProduct(fourier, CMatrix::Identity(m, m));
    CMatrix rotation = CMatrix::Zero(t * m, t * m);
    for (Eigen::Index k = 1; k < t; ++k) {
        const double lam = 2.0 * std::numbers::pi * double(k) / t0;
        rotation.block(k * m, k * m, m, m) = CMatrix::Identity(m, m) * std::min(1.0, c / lam);
    }
    CVector psi(t * m);
    const Eigen::VectorXd yu = y.normalized();
    for (Eigen::Index k = 0; k < t; ++k) psi.segment(k * m, m) = yu.cast<cplx>() / std::sqrt(double(t));
    psi = rotation * qft.adjoint() * controlled * psi;
    Reference out;
    out.post_select = psi.squaredNorm();
    psi = controlled.adjoint() * qft * psi;
    CVector sys = CVector::Zero(m);
    for (Eigen::Index k = 0; k < t; ++k) sys += psi.segment(k * m, m) / std::sqrt(double(t));
    out.state = sys.normalized();
    return out;
}

}  // namespace

TEST(Eigensolve, AscendingOrder) {
    const EigenSystem e = eigensolve(Eigen::Vector3d(3, 1, 2).asDiagonal());
    EXPECT_EQ(e.values, Eigen::Vector3d(1, 2, 3));
    const EigenSystem id = eigensolve(Eigen::MatrixXd::Identity(4, 4));
    EXPECT_LT((id.vectors.transpose() * id.vectors - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-14);
}

TEST(Filter, DropsSmallEigenvalues) {
    const SpectrumFilter f = filter_spectrum(Eigen::Vector3d(1e-9, 0.5, 1.0), 1e-6);
    EXPECT_EQ(f.kept, (std::vector<Eigen::Index>{1, 2}));
    EXPECT_DOUBLE_EQ(f.kappa_eff, 2.0);
    EXPECT_THROW((void)filter_spectrum(Eigen::Vector2d(0.1, 0.2), 1.0), EmptyResult);
    EXPECT_THROW((void)filter_spectrum(Eigen::Vector2d(0.1, 0.2), -1.0), InvalidArgument);
}

TEST(InvertIdeal, IdentityReturnsRhs) {
    const Eigen::Vector3d y(1, -2, 2);
    const SolveReport r = invert_ideal(Eigen::MatrixXd::Identity(3, 3), y, {});
    EXPECT_LT(aligned_distance(r.state_out.amplitudes(), (y / 3.0).cast<cplx>()), 1e-14);
    EXPECT_NEAR(r.post_select_prob, 1.0, 1e-14);
    EXPECT_NEAR(r.c_norm_est, 3.0, 1e-14);
}

TEST(InvertIdeal, DiagonalExample) {
    InversionConfig cfg;
    cfg.rotation_constant = 0.5;
    const SolveReport r = invert_ideal(Eigen::Vector2d(0.5, 1.0).asDiagonal(), Eigen::Vector2d(1, 0), cfg);
    EXPECT_NEAR(r.post_select_prob, 1.0, 1e-14);
    EXPECT_NEAR(r.c_norm_est, 2.0, 1e-14);
    EXPECT_NEAR(std::abs(r.state_out.amplitudes()(0)), 1.0, 1e-14);
}

TEST(InvertIdeal, RandomSpdMatchesDirectSolve) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd a = random_spd(8, 0.05, 1.0, rng);
        const Eigen::VectorXd y = random_rhs(8, rng);
        const SolveReport r = invert_ideal(a, y, {});
        const Eigen::VectorXd c = a.llt().solve(y);
        EXPECT_LT(aligned_distance(r.state_out.amplitudes(), c.normalized().cast<cplx>()), 1e-10);
        EXPECT_NEAR(r.c_norm_est, c.norm(), 1e-9 * c.norm());
        const double lmin = a.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
        EXPECT_NEAR(r.post_select_prob, std::pow(lmin * c.norm() / y.norm(), 2), 1e-10);
        EXPECT_GE(r.post_select_prob, (1 - 1e-12) / (r.kappa_eff * r.kappa_eff));
        EXPECT_GE(r.fidelity_vs_classical, 1 - 1e-10);
    }
}

TEST(InvertIdeal, RejectsBadInput) {
    EXPECT_THROW((void)invert_ideal(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Zero(), {}), InvalidArgument);
    EXPECT_THROW((void)invert_ideal(Eigen::Vector2d(-1, 1).asDiagonal(), Eigen::Vector2d(1, 1), {}),
                 NotPositiveDefinite);
    InversionConfig big;
    big.rotation_constant = 2.0;
    EXPECT_THROW((void)invert_ideal(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1), big), InvalidArgument);
}

TEST(InvertQuantized, OnGridIsExact) {
    // Grid spacing 2 pi / t0 = 1/4 with t0 = 8 pi.
    InversionConfig cfg;
    cfg.mode = InversionMode::Quantized;
    cfg.t0 = 8.0 * std::numbers::pi;
    cfg.clock_bits = 3;
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd q = random_spd(2, 0.1, 1.0, rng).householderQr().householderQ();
    const Eigen::MatrixXd a = q * Eigen::Vector2d(0.25, 0.5).asDiagonal() * q.transpose();
    const Eigen::Vector2d y(0.3, -1.1);
    const SolveReport r = invert_quantized(a, y, cfg);
    EXPECT_LE(r.deviation_from_ideal, 1e-10);
    EXPECT_NEAR(r.c_norm_est, a.llt().solve(y).norm(), 1e-10);
    EXPECT_NEAR(r.clock_return_prob, 1.0, 1e-10);
}

TEST(InvertQuantized, EigenvectorInputGivesEigenvector) {
    InversionConfig cfg;
    cfg.mode = InversionMode::Quantized;
    cfg.t0 = 8.0 * std::numbers::pi;
    cfg.clock_bits = 3;
    const SolveReport r = invert_quantized(Eigen::Vector3d(0.25, 0.5, 1.25).asDiagonal(), Eigen::Vector3d(0, 1, 0), cfg);
    EXPECT_NEAR(std::abs(r.state_out.amplitudes()(1)), 1.0, 1e-12);
}

TEST(InvertQuantized, MatchesFullSpaceReference) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd a = random_spd(3, 0.2, 1.0, rng);
        const Eigen::VectorXd y = random_rhs(3, rng);
        InversionConfig cfg;
        cfg.mode = InversionMode::Quantized;
        cfg.t0 = 2.0 * std::numbers::pi * 5.0;
        cfg.clock_bits = 4;
        cfg.rotation_constant = 0.15;
        const SolveReport r = invert_quantized(a, y, cfg);
        const Reference ref = reference_phase_estimation(a, y, cfg.t0, cfg.clock_bits, cfg.rotation_constant);
        EXPECT_LT(aligned_distance(r.state_out.amplitudes(), ref.state), 1e-10);
        EXPECT_NEAR(r.post_select_prob, ref.post_select, 1e-12);
    }
}

TEST(InvertQuantized, ErrorShrinksWithTime) {
    std::mt19937_64 rng(44);
    const Eigen::MatrixXd a = random_spd(4, 0.2, 1.0, rng);
    const Eigen::VectorXd y = random_rhs(4, rng);
    InversionConfig cfg;
    cfg.mode = InversionMode::Quantized;
    cfg.clock_bits = 9;
    cfg.t0 = 2.0 * std::numbers::pi * 8.0;
    const double coarse = invert_quantized(a, y, cfg).deviation_from_ideal;
    cfg.t0 = 2.0 * std::numbers::pi * 128.0;
    const double fine = invert_quantized(a, y, cfg).deviation_from_ideal;
    EXPECT_LT(fine, coarse);
}

TEST(InvertQuantized, Guards) {
    InversionConfig cfg;
    cfg.mode = InversionMode::Quantized;
    cfg.t0 = 8.0 * std::numbers::pi;
    cfg.clock_bits = 2;  // clock covers lambda < 1
    EXPECT_THROW((void)invert_quantized(Eigen::Vector2d(0.25, 1.5).asDiagonal(), Eigen::Vector2d(1, 1), cfg),
                 PhaseWraparound);
    cfg.clock_bits = 11;
    EXPECT_THROW((void)invert_quantized(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1), cfg), CapExceeded);
    cfg.clock_bits = 3;
    cfg.t0 = 0.0;
    EXPECT_THROW((void)invert_quantized(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1), cfg), InvalidArgument);
}

TEST(Sampling, EdgeProbabilities) {
    EXPECT_EQ(sample_probability(0.0, 1000, 1).estimate, 0.0);
    EXPECT_EQ(sample_probability(1.0, 1000, 1).estimate, 1.0);
    EXPECT_THROW((void)sample_probability(1.5, 10, 1), InvalidArgument);
    EXPECT_THROW((void)sample_probability(0.5, 0, 1), InvalidArgument);
    EXPECT_EQ(sample_probability(0.3, 5000, 9).estimate, sample_probability(0.3, 5000, 9).estimate);
}

TEST(Sampling, HalfWidthCoverage) {
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SampledProbability s = sample_probability(0.75, 1000000, seed);
        EXPECT_NEAR(s.half_width, 3.0 * std::sqrt(s.estimate * (1 - s.estimate) / 1e6), 1e-15);
        if (std::abs(s.estimate - 0.75) <= s.half_width) ++inside;
    }
    EXPECT_GE(inside, 99);
}

TEST(SwapTest, AnalyticValues) {
    const PureState e0 = PureState::normalized(Eigen::VectorXd(Eigen::Vector2d(1, 0)));
    const PureState e1 = PureState::normalized(Eigen::VectorXd(Eigen::Vector2d(0, 1)));
    const PureState plus = PureState::normalized(Eigen::VectorXd(Eigen::Vector2d(1, 1)));
    EXPECT_NEAR(swap_test(e0, e0), 1.0, 1e-15);
    EXPECT_NEAR(swap_test(e0, e1), 0.5, 1e-15);
    EXPECT_NEAR(swap_test(e0, plus), 0.75, 1e-15);
    EXPECT_NEAR(overlap_from_swap_probability(0.75), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(overlap_from_swap_probability(0.4), 0.0);
    EXPECT_NEAR(readout_value(2.0, 3.0, -0.5), -3.0, 1e-15);
    EXPECT_THROW((void)readout_value(-1.0, 1.0, 0.5), InvalidArgument);
}
