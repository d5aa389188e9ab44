#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qrbf/dataset.hpp"
#include "qrbf/kernels.hpp"

namespace qrbf {

/// Extreme eigenvalues of a symmetric matrix and their ratio.
struct Spectrum {
    double max = 0.0;
    double min = 0.0;
    /// max/min; +inf when min <= 0.
    double kappa = 0.0;
};

/// Symmetric sparse storage: per-row sorted column lists (CSR layout).
struct SparseRows {
    Eigen::Index order = 0;
    std::vector<Eigen::Index> row_start;  // size order + 1
    std::vector<Eigen::Index> cols;
    std::vector<double> values;

    [[nodiscard]] Eigen::Index nonzeros_in_row(Eigen::Index i) const { return row_start[i + 1] - row_start[i]; }
    [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;
};

/// Interpolation matrix A_ij = phi(||x_i - x_j||), optionally carrying the 1/m factor.
class InterpMatrix {
public:
    enum class Storage { Dense, Sparse };

    static InterpMatrix from_dense(Eigen::MatrixXd dense, bool normalized);
    static InterpMatrix from_sparse(SparseRows sparse, bool normalized);

    [[nodiscard]] Storage storage() const { return storage_; }
    [[nodiscard]] Eigen::Index order() const { return order_; }
    [[nodiscard]] bool normalized() const { return normalized_; }
    /// Maximum number of nonzeros in any row.
    [[nodiscard]] Eigen::Index sparsity() const { return sparsity_; }

    [[nodiscard]] double entry(Eigen::Index i, Eigen::Index j) const;
    [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;
    [[nodiscard]] const SparseRows& sparse() const { return sparse_; }
    [[nodiscard]] const Eigen::MatrixXd& dense() const { return dense_; }

    [[nodiscard]] const std::optional<Spectrum>& spectrum() const { return spectrum_; }
    void set_spectrum(Spectrum s) { spectrum_ = s; }

    /// Dense CSV (one row per matrix row) or sparse "i,j,value" triples.
    void write_csv(std::ostream& out) const;

private:
    Storage storage_ = Storage::Dense;
    Eigen::Index order_ = 0;
    bool normalized_ = false;
    Eigen::Index sparsity_ = 0;
    Eigen::MatrixXd dense_;
    SparseRows sparse_;
    std::optional<Spectrum> spectrum_;
};

struct AssembleOptions {
    bool normalized = false;
    /// Accept non positive definite families (multiquadric).
    bool allow_non_pd = false;
    /// Force dense storage even for compact kernels.
    bool force_dense = false;
};

/// Builds the interpolation matrix. Compact kernels get sparse storage unless
/// force_dense is set; each unordered pair is evaluated once.
[[nodiscard]] InterpMatrix assemble(const DataSet& data, const Kernel& kernel, const AssembleOptions& options = {});

struct Coefficients {
    Eigen::VectorXd c;
    double norm = 0.0;
    /// max_j |(A c - y)_j| in the units of the solved system.
    double residual = 0.0;
    /// CG iterations (sparse path) or refinement sweeps (dense path).
    int iterations = 0;
};

struct SolveOptions {
    double cg_tolerance = 1e-12;
    /// 0 means 10*m.
    int cg_max_iterations = 0;
};

/// Solves A c = y: Cholesky with iterative refinement for dense storage,
/// conjugate gradients for sparse storage. Throws NotPositiveDefinite.
[[nodiscard]] Coefficients solve(const InterpMatrix& matrix, const Eigen::VectorXd& y, const SolveOptions& options = {});
[[nodiscard]] Coefficients solve_dense(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& y);

/// f(x) = sum_j c_j phi(||x - x_j||), skipping sites outside a compact support.
[[nodiscard]] double evaluate(const Eigen::VectorXd& c, const DataSet& data, const Kernel& kernel,
                              const Eigen::VectorXd& x);
[[nodiscard]] inline double evaluate(const Coefficients& coeffs, const DataSet& data, const Kernel& kernel,
                                     const Eigen::VectorXd& x) {
    return evaluate(coeffs.c, data, kernel, x);
}

/// Phi(x) = [phi(||x - x_1||), ..., phi(||x - x_m||)].
[[nodiscard]] Eigen::VectorXd feature_vector(const DataSet& data, const Kernel& kernel, const Eigen::VectorXd& x);

/// max_j |f(x_j) - y_j|.
[[nodiscard]] double site_residual(const Eigen::VectorXd& c, const DataSet& data, const Kernel& kernel);

/// Extreme eigenvalues via a full symmetric eigendecomposition.
[[nodiscard]] Spectrum spectrum(const InterpMatrix& matrix);
[[nodiscard]] Spectrum spectrum(const Eigen::MatrixXd& symmetric);

/// Inverse and eigenvalue perturbation bounds with their measured values, in the spectral norm.
struct PerturbationReport {
    /// r = ||A^{-1} E||_2.
    double r = 0.0;
    /// False when r >= 1; the inverse-perturbation fields are then NaN.
    bool inverse_branch = false;
    double inverse_change = 0.0;  // ||(A+E)^{-1} - A^{-1}||_2
    double inverse_bound = 0.0;   // ||E||_2 ||A^{-1}||_2^2 / (1 - r)
    bool inverse_holds = false;
    /// Allowance for floating-point error added to each bound before comparing.
    double inverse_slack = 0.0;

    double e_norm = 0.0;                  // ||E||_2
    std::vector<double> eigen_shifts;     // |lambda_k(A+E) - lambda_k(A)|, k in sorted order
    double max_eigen_shift = 0.0;
    bool eigen_holds = false;             // only meaningful for symmetric A, E
    double eigen_slack = 0.0;

    [[nodiscard]] bool holds() const { return eigen_holds && (!inverse_branch || inverse_holds); }
};

/// Spectral norm (largest singular value) of an arbitrary matrix.
[[nodiscard]] double spectral_norm(const Eigen::MatrixXd& m);

[[nodiscard]] PerturbationReport perturbation_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e);

}  // namespace qrbf
