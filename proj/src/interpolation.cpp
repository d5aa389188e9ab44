#include "qrbf/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qrbf/error.hpp"

namespace qrbf {

Eigen::VectorXd SparseRows::multiply(const Eigen::VectorXd& v) const {
    if (v.size() != order) throw DimensionMismatch("sparse multiply: vector length differs from matrix order");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(order);
    for (Eigen::Index i = 0; i < order; ++i) {
        double acc = 0.0;
        for (Eigen::Index k = row_start[i]; k < row_start[i + 1]; ++k) acc += values[k] * v(cols[k]);
        out(i) = acc;
    }
    return out;
}

Eigen::MatrixXd SparseRows::to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);
    for (Eigen::Index i = 0; i < order; ++i) {
        for (Eigen::Index k = row_start[i]; k < row_start[i + 1]; ++k) out(i, cols[k]) = values[k];
    }
    return out;
}

InterpMatrix InterpMatrix::from_dense(Eigen::MatrixXd dense, bool normalized) {
    if (dense.rows() != dense.cols()) throw DimensionMismatch("interpolation matrix must be square");
    InterpMatrix out;
    out.storage_ = Storage::Dense;
    out.order_ = dense.rows();
    out.normalized_ = normalized;
    Eigen::Index s = 0;
    for (Eigen::Index i = 0; i < dense.rows(); ++i) s = std::max(s, Eigen::Index((dense.row(i).array() != 0.0).count()));
    out.sparsity_ = s;
    out.dense_ = std::move(dense);
    return out;
}

InterpMatrix InterpMatrix::from_sparse(SparseRows sparse, bool normalized) {
    InterpMatrix out;
    out.storage_ = Storage::Sparse;
    out.order_ = sparse.order;
    out.normalized_ = normalized;
    Eigen::Index s = 0;
    for (Eigen::Index i = 0; i < sparse.order; ++i) s = std::max(s, sparse.nonzeros_in_row(i));
    out.sparsity_ = s;
    out.sparse_ = std::move(sparse);
    return out;
}

double InterpMatrix::entry(Eigen::Index i, Eigen::Index j) const {
    if (i < 0 || j < 0 || i >= order_ || j >= order_) throw InvalidArgument("matrix index out of range");
    if (storage_ == Storage::Dense) return dense_(i, j);
    const auto first = sparse_.cols.begin() + sparse_.row_start[i];
    const auto last = sparse_.cols.begin() + sparse_.row_start[i + 1];
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return sparse_.values[static_cast<std::size_t>(it - sparse_.cols.begin())];
}

Eigen::VectorXd InterpMatrix::multiply(const Eigen::VectorXd& v) const {
    if (storage_ == Storage::Dense) {
        if (v.size() != order_) throw DimensionMismatch("multiply: vector length differs from matrix order");
        return dense_ * v;
    }
    return sparse_.multiply(v);
}

Eigen::MatrixXd InterpMatrix::to_dense() const {
    return storage_ == Storage::Dense ? dense_ : sparse_.to_dense();
}

void InterpMatrix::write_csv(std::ostream& out) const {
    out << std::setprecision(17);
    if (storage_ == Storage::Dense) {
        for (Eigen::Index i = 0; i < order_; ++i) {
            for (Eigen::Index j = 0; j < order_; ++j) out << (j ? "," : "") << dense_(i, j);
            out << '\n';
        }
        return;
    }
    out << "i,j,value\n";
    for (Eigen::Index i = 0; i < order_; ++i) {
        for (Eigen::Index k = sparse_.row_start[i]; k < sparse_.row_start[i + 1]; ++k) {
            out << i << ',' << sparse_.cols[k] << ',' << sparse_.values[k] << '\n';
        }
    }
}

InterpMatrix assemble(const DataSet& data, const Kernel& kernel, const AssembleOptions& options) {
    if (!kernel.is_positive_definite() && !options.allow_non_pd) {
        throw InvalidArgument("kernel " + kernel.describe() + " is not positive definite; set allow_non_pd to override");
    }
    const Eigen::Index m = data.size();
    const double scale = options.normalized ? 1.0 / static_cast<double>(m) : 1.0;
    const double diag = kernel.at_zero() * scale;
    const auto& sites = data.sites();

    if (!kernel.is_compact() || options.force_dense) {
        Eigen::MatrixXd a(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            a(i, i) = diag;
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const double v = kernel((sites.row(i) - sites.row(j)).norm()) * scale;
                a(i, j) = v;
                a(j, i) = v;
            }
        }
        return InterpMatrix::from_dense(std::move(a), options.normalized);
    }

    // Compact support: gather upper-triangle nonzeros per row, then mirror.
    std::vector<std::vector<std::pair<Eigen::Index, double>>> rows(static_cast<std::size_t>(m));
    const double support = kernel.support();
    for (Eigen::Index i = 0; i < m; ++i) {
        rows[i].emplace_back(i, diag);
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double r = (sites.row(i) - sites.row(j)).norm();
            if (r > support) continue;
            const double v = kernel(r) * scale;
            if (v == 0.0) continue;
            rows[i].emplace_back(j, v);
            rows[j].emplace_back(i, v);
        }
    }
    SparseRows sparse;
    sparse.order = m;
    sparse.row_start.reserve(static_cast<std::size_t>(m) + 1);
    sparse.row_start.push_back(0);
    for (auto& row : rows) {
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [col, value] : row) {
            sparse.cols.push_back(col);
            sparse.values.push_back(value);
        }
        sparse.row_start.push_back(static_cast<Eigen::Index>(sparse.cols.size()));
    }
    return InterpMatrix::from_sparse(std::move(sparse), options.normalized);
}

namespace {

Coefficients finish(const Eigen::VectorXd& c, const Eigen::VectorXd& residual, int iterations) {
    Coefficients out;
    out.c = c;
    out.norm = c.norm();
    out.residual = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
    out.iterations = iterations;
    return out;
}

// Backward error of dense factorizations/eigensolvers is a small multiple of
// eps * ||A||; measured-vs-bound comparisons allow that much.
double rounding_slack(double scale, Eigen::Index order) {
    return 16.0 * static_cast<double>(order) * std::numeric_limits<double>::epsilon() * scale;
}

[[noreturn]] void report_not_pd(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    throw NotPositiveDefinite("matrix is not positive definite: smallest eigenvalue " + std::to_string(lo), lo, 0);
}

Coefficients conjugate_gradient(const InterpMatrix& a, const Eigen::VectorXd& y, const SolveOptions& options) {
    const Eigen::Index m = a.order();
    const int max_iter = options.cg_max_iterations > 0 ? options.cg_max_iterations : static_cast<int>(10 * m);
    const double y_norm = y.norm();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    if (y_norm == 0.0) return finish(c, Eigen::VectorXd::Zero(m), 0);

    Eigen::VectorXd r = y;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    int it = 0;
    for (; it < max_iter && std::sqrt(rr) > options.cg_tolerance * y_norm; ++it) {
        const Eigen::VectorXd ap = a.multiply(p);
        const double curvature = p.dot(ap);
        if (!(curvature > 0.0)) {
            throw NotPositiveDefinite("conjugate gradients met non-positive curvature " + std::to_string(curvature),
                                      curvature, it);
        }
        const double step = rr / curvature;
        c += step * p;
        r -= step * ap;
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    // Report the true residual, not the recurrence one.
    return finish(c, a.multiply(c) - y, it);
}

}  // namespace

Coefficients solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
    if (a.rows() != a.cols() || a.rows() != y.size()) throw DimensionMismatch("solve: matrix/vector sizes differ");
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) report_not_pd(a);
    const auto& l = llt.matrixL();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (!(l(i, i) > 0.0)) throw NotPositiveDefinite("Cholesky pivot not positive", l(i, i), i);
    }
    Eigen::VectorXd c = llt.solve(y);
    Eigen::VectorXd res = a * c - y;
    int sweeps = 0;
    for (; sweeps < 3 && res.norm() > 1e-14 * y.norm(); ++sweeps) {
        c -= llt.solve(res);
        res = a * c - y;
    }
    return finish(c, res, sweeps);
}

Coefficients solve(const InterpMatrix& matrix, const Eigen::VectorXd& y, const SolveOptions& options) {
    if (y.size() != matrix.order()) throw DimensionMismatch("solve: right-hand side length differs from matrix order");
    if (matrix.storage() == InterpMatrix::Storage::Dense) return solve_dense(matrix.dense(), y);
    return conjugate_gradient(matrix, y, options);
}

double evaluate(const Eigen::VectorXd& c, const DataSet& data, const Kernel& kernel, const Eigen::VectorXd& x) {
    if (x.size() != data.dim()) throw DimensionMismatch("evaluate: query dimension differs from dataset dimension");
    if (c.size() != data.size()) throw DimensionMismatch("evaluate: coefficient count differs from site count");
    const double support = kernel.support();
    double f = 0.0;
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        if (c(j) == 0.0) continue;
        const double r = (x - data.site(j)).norm();
        if (r > support) continue;
        f += c(j) * kernel(r);
    }
    return f;
}

Eigen::VectorXd feature_vector(const DataSet& data, const Kernel& kernel, const Eigen::VectorXd& x) {
    if (x.size() != data.dim()) throw DimensionMismatch("feature vector: query dimension differs from dataset dimension");
    Eigen::VectorXd phi(data.size());
    for (Eigen::Index j = 0; j < data.size(); ++j) phi(j) = kernel((x - data.site(j)).norm());
    return phi;
}

double site_residual(const Eigen::VectorXd& c, const DataSet& data, const Kernel& kernel) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        worst = std::max(worst, std::abs(evaluate(c, data, kernel, data.site(j)) - data.values()(j)));
    }
    return worst;
}

Spectrum spectrum(const Eigen::MatrixXd& symmetric) {
    if (symmetric.rows() != symmetric.cols()) throw DimensionMismatch("spectrum: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    Spectrum s;
    s.min = ev(0);
    s.max = ev(ev.size() - 1);
    s.kappa = s.min > 0.0 ? s.max / s.min : std::numeric_limits<double>::infinity();
    return s;
}

Spectrum spectrum(const InterpMatrix& matrix) { return spectrum(matrix.to_dense()); }

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

PerturbationReport perturbation_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e) {
    if (a.rows() != a.cols() || e.rows() != a.rows() || e.cols() != a.cols()) {
        throw DimensionMismatch("perturbation_check: A and E must be square of equal order");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw InvalidArgument("perturbation_check: A is singular");
    const Eigen::MatrixXd a_inv = lu.inverse();

    PerturbationReport rep;
    rep.e_norm = spectral_norm(e);
    rep.r = spectral_norm(a_inv * e);
    rep.inverse_branch = rep.r < 1.0;
    if (rep.inverse_branch) {
        const Eigen::MatrixXd perturbed_inv = Eigen::FullPivLU<Eigen::MatrixXd>(a + e).inverse();
        rep.inverse_change = spectral_norm(perturbed_inv - a_inv);
        const double a_inv_norm = spectral_norm(a_inv);
        rep.inverse_bound = rep.e_norm * a_inv_norm * a_inv_norm / (1.0 - rep.r);
        rep.inverse_slack = rounding_slack(a_inv_norm * a_inv_norm * (spectral_norm(a) + rep.e_norm), a.rows());
        rep.inverse_holds = rep.inverse_change <= rep.inverse_bound + rep.inverse_slack;
    } else {
        rep.inverse_change = std::numeric_limits<double>::quiet_NaN();
        rep.inverse_bound = std::numeric_limits<double>::quiet_NaN();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eae(a + e, Eigen::EigenvaluesOnly);
    rep.eigen_shifts.resize(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        rep.eigen_shifts[k] = std::abs(eae.eigenvalues()(k) - ea.eigenvalues()(k));
        rep.max_eigen_shift = std::max(rep.max_eigen_shift, rep.eigen_shifts[k]);
    }
    const double scale = std::max(ea.eigenvalues().cwiseAbs().maxCoeff(), eae.eigenvalues().cwiseAbs().maxCoeff());
    rep.eigen_slack = rounding_slack(scale, a.rows());
    rep.eigen_holds = rep.max_eigen_shift <= rep.e_norm + rep.eigen_slack;
    return rep;
}

}  // namespace qrbf
