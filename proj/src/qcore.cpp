#include "qrbf/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrbf/error.hpp"

namespace qrbf {

namespace {

Eigen::Index product(const std::vector<Eigen::Index>& dims) {
    return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
}

void check_dims(const std::vector<Eigen::Index>& dims, Eigen::Index total, const char* what) {
    if (dims.empty()) throw InvalidArgument(std::string(what) + ": no subsystems");
    for (auto d : dims) {
        if (d < 1) throw InvalidArgument(std::string(what) + ": subsystem dimension must be positive");
    }
    if (product(dims) != total) throw DimensionMismatch(std::string(what) + ": subsystem dimensions do not multiply to total");
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

double trace_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues().sum();
}

DensityMatrix::DensityMatrix(std::vector<Eigen::Index> dims, CMatrix entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("density matrix must be square");
    check_dims(dims_, entries_.rows(), "density matrix");
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) throw InvalidArgument("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const cplx tr = entries_.trace();
    if (std::abs(tr - cplx(1.0, 0.0)) > kTraceTol) throw InvalidArgument("density matrix trace differs from 1");
    const double lo = eigenvalues().minCoeff();
    if (lo < kEigenFloor) throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(lo));
}

DensityMatrix::DensityMatrix(CMatrix entries) : DensityMatrix(std::vector<Eigen::Index>{entries.rows()}, entries) {}

DensityMatrix DensityMatrix::from_real(const Eigen::MatrixXd& entries) {
    return DensityMatrix(entries.cast<cplx>());
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(entries_, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

PureState::PureState(std::vector<Eigen::Index> dims, CVector amplitudes)
    : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    check_dims(dims_, amplitudes_.size(), "pure state");
    if (std::abs(amplitudes_.norm() - 1.0) > kNormTol) throw InvalidArgument("pure state is not unit norm");
}

PureState::PureState(CVector amplitudes) : PureState(std::vector<Eigen::Index>{amplitudes.size()}, amplitudes) {}

PureState PureState::normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
    return PureState(v / n);
}

PureState PureState::normalized(const Eigen::VectorXd& v) { return normalized(CVector(v.cast<cplx>())); }

cplx PureState::inner(const PureState& other) const {
    if (other.dimension() != dimension()) throw DimensionMismatch("inner product of states with different dimensions");
    return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

DensityMatrix PureState::density() const {
    CMatrix rho = amplitudes_ * amplitudes_.adjoint();
    // Symmetrize away rounding in the outer product.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(dims_, std::move(rho));
}

CMatrix partial_trace(const CMatrix& m, const std::vector<Eigen::Index>& dims, std::size_t keep) {
    if (m.rows() != m.cols()) throw DimensionMismatch("partial trace: matrix must be square");
    check_dims(dims, m.rows(), "partial trace");
    if (keep >= dims.size()) throw InvalidArgument("partial trace: subsystem index out of range");

    // Index = (outer, kept, inner) with strides: inner = product of dims after keep.
    const Eigen::Index kept = dims[keep];
    Eigen::Index inner = 1;
    for (std::size_t k = keep + 1; k < dims.size(); ++k) inner *= dims[k];
    const Eigen::Index outer = m.rows() / (kept * inner);

    CMatrix out = CMatrix::Zero(kept, kept);
    for (Eigen::Index o = 0; o < outer; ++o) {
        for (Eigen::Index in = 0; in < inner; ++in) {
            for (Eigen::Index a = 0; a < kept; ++a) {
                const Eigen::Index row = (o * kept + a) * inner + in;
                for (Eigen::Index b = 0; b < kept; ++b) {
                    out(a, b) += m(row, (o * kept + b) * inner + in);
                }
            }
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
    if (rho.dims().size() < 2) throw InvalidArgument("partial trace needs at least two subsystems");
    CMatrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    return DensityMatrix(std::move(reduced));
}

Eigen::MatrixXd swap_operator(Eigen::Index m) {
    if (m < 1) throw InvalidArgument("swap operator needs m >= 1");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m * m, m * m);
    // |j>|k> -> |k>|j>
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) s(k * m + j, j * m + k) = 1.0;
    }
    return s;
}

CMatrix swap_exponential(Eigen::Index m, double dt) {
    const Eigen::Index n = m * m;
    CMatrix u = CMatrix::Identity(n, n) * std::cos(dt);
    u += cplx(0.0, -std::sin(dt)) * swap_operator(m).cast<cplx>();
    return u;
}

CMatrix hermitian_exponential(const CMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const CVector phases = (eig.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

DensityMatrix exact_conjugation(const DensityMatrix& a, const DensityMatrix& rho, double t) {
    if (a.dimension() != rho.dimension()) throw DimensionMismatch("exact_conjugation: operator and state dimensions differ");
    const CMatrix u = hermitian_exponential(a.matrix(), t);
    CMatrix out = u * rho.matrix() * u.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(rho.dims(), std::move(out));
}

DensityMatrix dme_step(const DensityMatrix& a, const DensityMatrix& rho, double dt) {
    if (a.dimension() != rho.dimension()) throw DimensionMismatch("dme_step: A and rho dimensions differ");
    const Eigen::Index m = a.dimension();
    const CMatrix u = swap_exponential(m, dt);
    const CMatrix joint = u * kron(a.matrix(), rho.matrix()) * u.adjoint();
    CMatrix reduced = partial_trace(joint, {m, m}, 1);
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    return DensityMatrix(rho.dims(), std::move(reduced));
}

DmeResult dme_evolve(const DensityMatrix& a, const DensityMatrix& rho, double t, int steps) {
    if (steps < 1) throw InvalidArgument("dme_evolve needs at least one step");
    const double dt = t / steps;
    DensityMatrix state = rho;
    for (int k = 0; k < steps; ++k) state = dme_step(a, state, dt);
    const CMatrix diff = state.matrix() - exact_conjugation(a, rho, t).matrix();
    return DmeResult{std::move(state), trace_norm(diff), diff.norm()};
}

DensityMatrix random_density(Eigen::Index m, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) g(i, j) = cplx(normal(rng), normal(rng));
    }
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

}  // namespace qrbf
