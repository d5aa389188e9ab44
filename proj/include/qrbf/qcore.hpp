#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

namespace qrbf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Kronecker product a (x) b.
[[nodiscard]] CMatrix kron(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CVector kron(const CVector& a, const CVector& b);
[[nodiscard]] Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

[[nodiscard]] CMatrix commutator(const CMatrix& a, const CMatrix& b);
/// Sum of singular values.
[[nodiscard]] double trace_norm(const CMatrix& m);

/// Unit-trace Hermitian positive semidefinite operator over labeled subsystems.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kEigenFloor = -1e-10;

    /// Validates Hermiticity, unit trace and positivity at the tolerances above.
    DensityMatrix(std::vector<Eigen::Index> dims, CMatrix entries);
    /// Single subsystem of dimension entries.rows().
    explicit DensityMatrix(CMatrix entries);
    static DensityMatrix from_real(const Eigen::MatrixXd& entries);

    [[nodiscard]] const std::vector<Eigen::Index>& dims() const { return dims_; }
    [[nodiscard]] Eigen::Index dimension() const { return entries_.rows(); }
    [[nodiscard]] const CMatrix& matrix() const { return entries_; }
    [[nodiscard]] Eigen::VectorXd eigenvalues() const;

private:
    std::vector<Eigen::Index> dims_;
    CMatrix entries_;
};

/// Unit-norm amplitude vector over labeled subsystems.
class PureState {
public:
    static constexpr double kNormTol = 1e-12;

    PureState(std::vector<Eigen::Index> dims, CVector amplitudes);
    explicit PureState(CVector amplitudes);
    /// Normalizes `v` first; throws on a zero vector.
    static PureState normalized(const CVector& v);
    static PureState normalized(const Eigen::VectorXd& v);

    [[nodiscard]] const std::vector<Eigen::Index>& dims() const { return dims_; }
    [[nodiscard]] Eigen::Index dimension() const { return amplitudes_.size(); }
    [[nodiscard]] const CVector& amplitudes() const { return amplitudes_; }
    [[nodiscard]] cplx inner(const PureState& other) const;  // <this|other>
    [[nodiscard]] DensityMatrix density() const;

private:
    std::vector<Eigen::Index> dims_;
    CVector amplitudes_;
};

/// Trace over every subsystem except `keep` of a matrix laid out over `dims`
/// (first subsystem most significant). No validity requirements on `m`.
[[nodiscard]] CMatrix partial_trace(const CMatrix& m, const std::vector<Eigen::Index>& dims, std::size_t keep);
[[nodiscard]] DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep);

/// S = sum_{j,k} |j><k| (x) |k><j| on C^m (x) C^m.
[[nodiscard]] Eigen::MatrixXd swap_operator(Eigen::Index m);
/// exp(-i S dt) = cos(dt) I - i sin(dt) S, using S^2 = I.
[[nodiscard]] CMatrix swap_exponential(Eigen::Index m, double dt);

/// exp(-i H t) for Hermitian H via eigendecomposition.
[[nodiscard]] CMatrix hermitian_exponential(const CMatrix& h, double t);

/// exp(-i A t) rho exp(i A t).
[[nodiscard]] DensityMatrix exact_conjugation(const DensityMatrix& a, const DensityMatrix& rho, double t);

/// tr_1{ e^{-iS dt} (A (x) rho) e^{iS dt} }, evaluated by explicit m^2 x m^2 conjugation.
[[nodiscard]] DensityMatrix dme_step(const DensityMatrix& a, const DensityMatrix& rho, double dt);

struct DmeResult {
    DensityMatrix state;
    /// Distances to exp(-iAt) rho exp(iAt).
    double trace_error;
    double frobenius_error;
};

/// l applications of dme_step with dt = t / l.
[[nodiscard]] DmeResult dme_evolve(const DensityMatrix& a, const DensityMatrix& rho, double t, int steps);

/// Random full-rank density matrix G G^dagger / tr(G G^dagger) with Ginibre G.
[[nodiscard]] DensityMatrix random_density(Eigen::Index m, std::mt19937_64& rng);

}  // namespace qrbf
