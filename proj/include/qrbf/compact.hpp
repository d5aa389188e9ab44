#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "qrbf/dataset.hpp"
#include "qrbf/interpolation.hpp"
#include "qrbf/kernels.hpp"
#include "qrbf/qcore.hpp"
#include "qrbf/qinvert.hpp"

namespace qrbf {

struct CompactOracleConfig {
    Kernel kernel = Kernel::wendland({3, 2}, 1.0);
    /// Amplitude-estimation precision; nullopt bypasses estimation (exact oracle).
    std::optional<int> ae_bits;
    /// State-preparation scaling; <= 0 selects 1 / phi(0).
    double c_hat = 0.0;
    /// Use the 1/m-normalized system (A/m) c = y/m instead of A c = y.
    bool normalized = false;
    std::uint64_t seed = 0;

    [[nodiscard]] double alpha() const { return kernel.support(); }
    [[nodiscard]] double effective_c_hat() const;
};

/// Deterministic per-call seed derived from (seed, i, j) so results do not
/// depend on evaluation order.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

/// (||x_i|| |+>|x_i> - ||x_j|| |->|x_j>) / sqrt(||x_i||^2 + ||x_j||^2) on a
/// qubit (x) C^d register; index = ancilla * d + coordinate.
[[nodiscard]] PureState pair_state(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

/// Norm of the ancilla-|0> component of a pair state.
[[nodiscard]] double zero_branch_amplitude(const PureState& pair);

/// ||x_i - x_j|| / sqrt(2 (||x_i||^2 + ||x_j||^2)), always in [0, 1].
[[nodiscard]] double distance_amplitude(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

struct AmplitudeEstimate {
    double estimate = 0.0;
    std::int64_t outcome = 0;  // grid index y, estimate = sin(pi y / 2^bits)
};

/// Canonical amplitude estimation at the outcome-distribution level: the phase
/// asin(a)/pi is read on a 2^bits grid, landing on one of the two bracketing
/// cells with probabilities proportional to the Fejer-kernel weights.
[[nodiscard]] AmplitudeEstimate amplitude_estimate(double a_true, int bits, std::uint64_t seed);

/// Error bound pi 2^-b + pi^2 2^-2b of a b-bit amplitude estimate.
[[nodiscard]] double amplitude_error_bound(int bits);

/// A_ij of the compact interpolation matrix, from an estimated (or exact) distance.
[[nodiscard]] double oracle_PA(Eigen::Index i, Eigen::Index j, const DataSet& data, const CompactOracleConfig& config);

inline constexpr Eigen::Index kOutOfBandRow = -1;

/// Row index of the ell-th (1-based) nonzero in column j; kOutOfBandRow past the
/// column's last nonzero. Throws for ell outside [1, s].
[[nodiscard]] Eigen::Index oracle_Pv(Eigen::Index j, Eigen::Index ell, const InterpMatrix& sparse);

/// Matrix built from oracle_PA over the classical sparsity pattern, symmetrized
/// as (P_A(i,j) + P_A(j,i)) / 2. Raw entries (no 1/m).
[[nodiscard]] Eigen::MatrixXd oracle_matrix(const DataSet& data, const InterpMatrix& pattern,
                                            const CompactOracleConfig& config);

struct PhiState {
    PureState state{CVector::Ones(1)};
    double success_prob = 0.0;
    double phi_norm_est = 0.0;
    Eigen::VectorXd phi;  // the vector the state encodes
};

/// Rotation-based preparation of |Phi(x)>; throws EmptyResult when x is
/// outside the support of every site.
[[nodiscard]] PhiState prepare_phi_state(const Eigen::VectorXd& x, const DataSet& data, const CompactOracleConfig& config);

struct CompactSolveReport {
    SolveReport inversion;
    Eigen::Index sparsity = 0;
    Spectrum spectrum;
    double oracle_frobenius_error = 0.0;  // ||A_hat - A||_F (raw entries)
    Eigen::VectorXd classical_c;
    double fidelity_vs_classical = 0.0;   // vs the conjugate-gradient sparse solve
    Eigen::VectorXd quantum_c;            // c_norm_est * state_out (real part)
    double quantum_site_residual = 0.0;
};

[[nodiscard]] CompactSolveReport solve_compact(const DataSet& data, const CompactOracleConfig& config,
                                               const InversionConfig& inversion);

}  // namespace qrbf
