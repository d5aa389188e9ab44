#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qrbf/qcore.hpp"

namespace qrbf {

enum class InversionMode { Ideal, Quantized };

struct InversionConfig {
    /// Rotation constant; <= 0 selects the default (lambda_min in ideal mode,
    /// smallest grid eigenvalue estimate in quantized mode).
    double rotation_constant = 0.0;
    InversionMode mode = InversionMode::Ideal;
    /// Total evolution time of phase estimation (quantized mode).
    double t0 = 0.0;
    /// Clock register width b (quantized mode).
    int clock_bits = 8;
    int max_clock_bits = 10;
    /// Eigenvalues <= delta_eff are dropped before inversion.
    std::optional<double> delta_eff;
    /// Sampling budgets for the normalization factor and swap-test probability; 0 disables.
    std::int64_t samples_F = 0;
    std::int64_t samples_p = 0;
    std::uint64_t seed = 0;
};

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Symmetric eigendecomposition with ascending eigenvalues.
[[nodiscard]] EigenSystem eigensolve(const Eigen::MatrixXd& a);

struct SpectrumFilter {
    std::vector<Eigen::Index> kept;
    double kappa_eff = 0.0;
};

/// Keeps eigenvalues strictly above delta_eff. Throws EmptyResult when none survive.
[[nodiscard]] SpectrumFilter filter_spectrum(const Eigen::VectorXd& eigenvalues, double delta_eff);

struct SampledProbability {
    double estimate = 0.0;
    /// 3 * sqrt(p_hat (1 - p_hat) / n)
    double half_width = 0.0;
    std::int64_t samples = 0;
};

/// p_hat from a seeded stream of n Bernoulli(p_true) draws.
[[nodiscard]] SampledProbability sample_probability(double p_true, std::int64_t samples, std::uint64_t seed);

struct SolveReport {
    InversionMode mode = InversionMode::Ideal;
    Eigen::VectorXd eigvals;
    Eigen::VectorXd overlaps;  // beta_j = <u_j|y>, y normalized
    std::vector<Eigen::Index> kept;
    double kappa_eff = 0.0;
    double rotation_constant = 0.0;

    double post_select_prob = 0.0;
    double normalization_factor = 0.0;  // F = sqrt(post_select_prob)
    double c_norm_est = 0.0;            // F ||y|| / C
    PureState state_out{CVector::Ones(1)};

    double classical_c_norm = 0.0;
    /// |<state_out | A^{-1}y / ||A^{-1}y||>|; NaN when the classical solve is unavailable.
    double fidelity_vs_classical = 0.0;
    /// ceil(1 / lambda_min) amplitude-amplification rounds (not executed).
    std::int64_t repetitions = 0;

    // Sampled normalization factor (samples_F > 0).
    std::optional<SampledProbability> sampled_post_select;
    double sampled_c_norm = 0.0;

    // Quantized mode only.
    int clock_bits = 0;
    double t0 = 0.0;
    double clock_return_prob = 0.0;   // probability the uncomputed clock reads 0
    double deviation_from_ideal = 0.0;  // ||state_out - ideal state||, phase aligned
};

/// Eigenvalue inversion with exact eigen-data: state ∝ sum_j beta_j C/lambda_j |u_j>.
[[nodiscard]] SolveReport invert_ideal(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config);

/// Statevector simulation of phase estimation with a b-bit clock driven by
/// powers of exp(i A t0 / 2^b), rotation keyed on the clock value, uncompute and
/// post-selection. Clock value k encodes lambda = 2 pi k / t0.
[[nodiscard]] SolveReport invert_quantized(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                           const InversionConfig& config);

/// Dispatches on config.mode.
[[nodiscard]] SolveReport invert(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config);

/// Success probability 1/2 + |<u|v>|^2 / 2 of the swap test.
[[nodiscard]] double swap_test(const PureState& u, const PureState& v);

/// f(x) ≈ ||c|| * ||Phi(x)|| * <c|Phi(x)>.
[[nodiscard]] double readout_value(double c_norm, double phi_norm, double overlap);

/// |<u|v>| recovered from a swap-test probability, clamped at 0.
[[nodiscard]] double overlap_from_swap_probability(double p);

[[nodiscard]] nlohmann::json to_json(const SolveReport& report);

}  // namespace qrbf
