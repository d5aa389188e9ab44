#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qrbf/dataset.hpp"
#include "qrbf/interpolation.hpp"

namespace qrbf {

/// Extra Fock levels used for the stand-in "exact" coherent state.
inline constexpr int kReferenceExtraOrder = 200;

/// Coherent state truncated to the first N Fock levels and renormalized:
/// amplitudes proportional to (r/sigma)^k / sqrt(k!), k = 0..N-1.
struct TruncatedCoherent {
    double ratio = 0.0;  // r / sigma
    int order = 1;       // N
    Eigen::VectorXd amplitudes;
    /// B = sum_{k<N} ratio^{2k} / k!
    double partial_norm = 1.0;
    /// script B = exp(ratio^2)
    double full_norm = 1.0;

    [[nodiscard]] double norm_gap() const { return full_norm - partial_norm; }
};

[[nodiscard]] TruncatedCoherent coherent_state(double r, double sigma, int order);

/// sqrt(2 (r/sigma)^{2N} / N!), the closed-form bound on the truncation error.
[[nodiscard]] double truncation_bound(double r, double sigma, int order);

/// ||psi_exact - psi_N|| with the exact state represented at order N + extra.
/// The difference is formed component-wise with the renormalization factor
/// rearranged so no cancellation occurs for tiny errors.
[[nodiscard]] double measured_truncation_error(double r, double sigma, int order, int extra = kReferenceExtraOrder);

/// Smallest N with truncation_bound(ratio_max * sigma, sigma, N) <= delta.
[[nodiscard]] int min_order(double ratio_max, double delta);

/// Tensor product of per-coordinate truncated coherent states.
struct ProductCoherent {
    std::vector<TruncatedCoherent> components;

    [[nodiscard]] Eigen::Index total_dim() const;
    /// Kronecker product of the component amplitude vectors (length N^d).
    [[nodiscard]] Eigen::VectorXd amplitudes() const;
};

[[nodiscard]] ProductCoherent product_state(const Eigen::VectorXd& x, double sigma, int order);

/// ||psi_exact(x) - psi_N(x)|| for the product state, exact side at order N + extra.
[[nodiscard]] double measured_product_error(const Eigen::VectorXd& x, double sigma, int order,
                                            int extra = kReferenceExtraOrder);

/// <psi_N(x) | psi_N(y)>, computed as the product of per-coordinate overlaps.
[[nodiscard]] double coherent_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma, int order);

/// max over every coordinate of every site of truncation_bound; the per-coordinate delta.
[[nodiscard]] double dataset_delta(const DataSet& data, double sigma, int order);

struct CoherentGram {
    InterpMatrix matrix;            // normalized, entries <psi_i|psi_j> / m
    Eigen::MatrixXd exact;          // normalized exact Gaussian matrix
    double delta = 0.0;             // per-coordinate truncation bound
    double bound = 0.0;             // 2 d delta
    double frobenius_error = 0.0;   // ||A - A_exact||_F
    double max_inner_error = 0.0;   // max_ij |<psi_i|psi_j> - exp(-|xi-xj|^2 / 2 sigma^2)|
    [[nodiscard]] bool within_bound() const { return frobenius_error <= bound && max_inner_error <= bound; }
};

/// Normalized Gram matrix of truncated coherent states, compared to the exact
/// Gaussian interpolation matrix.
[[nodiscard]] CoherentGram gram_coherent(const DataSet& data, double sigma, int order);

struct SuperpositionCheck {
    Eigen::MatrixXd reduced;   // tr_2 |Psi><Psi|, real part
    double max_deviation = 0.0;  // vs gram_coherent entries
    double trace = 0.0;
    Eigen::Index state_dim = 0;  // m * N^d
};

/// Builds |Psi> = m^{-1/2} sum_j |j>|psi_{x_j}>, forms |Psi><Psi| explicitly and
/// traces out the coherent register. Throws CapExceeded when m * N^d > cap.
[[nodiscard]] SuperpositionCheck superposition_gram_check(const DataSet& data, double sigma, int order,
                                                          Eigen::Index cap = 4096);

/// exp(ratio (a^dagger - a)) |0> on a Fock space truncated to `dim` levels.
[[nodiscard]] Eigen::VectorXd displaced_vacuum(double ratio, int dim);

}  // namespace qrbf
