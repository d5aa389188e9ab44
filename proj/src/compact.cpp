#include "qrbf/compact.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "qrbf/error.hpp"

namespace qrbf {

namespace {

constexpr int kMaxAeBits = 30;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Probability weight of a grid cell at offset `cells` from the true phase.
double fejer_weight(double cells, double grid) {
    const double s = std::sin(std::numbers::pi * cells / grid);
    if (s == 0.0) return 1.0;
    const double num = std::sin(std::numbers::pi * cells);
    return (num * num) / (grid * grid * s * s);
}

void check_index(Eigen::Index i, Eigen::Index m) {
    if (i < 0 || i >= m) throw InvalidArgument("oracle index out of range");
}

double estimated_distance(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, int bits, std::uint64_t seed) {
    const double scale = std::sqrt(2.0 * (xi.squaredNorm() + xj.squaredNorm()));
    const double a = distance_amplitude(xi, xj);
    return amplitude_estimate(a, bits, seed).estimate * scale;
}

}  // namespace

double CompactOracleConfig::effective_c_hat() const { return c_hat > 0.0 ? c_hat : 1.0 / kernel.at_zero(); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    return splitmix64(splitmix64(splitmix64(seed) ^ i) ^ (j * 0xd1b54a32d192ed03ULL));
}

PureState pair_state(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
    if (xi.size() != xj.size()) throw DimensionMismatch("pair_state: vectors differ in dimension");
    const double total = xi.squaredNorm() + xj.squaredNorm();
    if (!(total > 0.0)) throw InvalidArgument("pair_state: both vectors are zero");
    const Eigen::Index d = xi.size();
    // ||x|| |+>|x/||x||> = (|0> + |1>) (x) x / sqrt(2); likewise |-> with a sign.
    const double scale = 1.0 / std::sqrt(2.0 * total);
    CVector amp(2 * d);
    amp.head(d) = ((xi - xj) * scale).cast<cplx>();
    amp.tail(d) = ((xi + xj) * scale).cast<cplx>();
    return PureState({2, d}, std::move(amp));
}

double zero_branch_amplitude(const PureState& pair) {
    if (pair.dims().size() != 2 || pair.dims()[0] != 2) throw InvalidArgument("zero_branch_amplitude: not a pair state");
    return pair.amplitudes().head(pair.dims()[1]).norm();
}

double distance_amplitude(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
    if (xi.size() != xj.size()) throw DimensionMismatch("distance_amplitude: vectors differ in dimension");
    const double total = xi.squaredNorm() + xj.squaredNorm();
    if (!(total > 0.0)) throw InvalidArgument("distance_amplitude: both vectors are zero");
    return std::min(1.0, (xi - xj).norm() / std::sqrt(2.0 * total));
}

double amplitude_error_bound(int bits) {
    const double step = std::ldexp(1.0, -bits);
    return std::numbers::pi * step + std::numbers::pi * std::numbers::pi * step * step;
}

AmplitudeEstimate amplitude_estimate(double a_true, int bits, std::uint64_t seed) {
    if (!(a_true >= 0.0 && a_true <= 1.0)) throw InvalidArgument("amplitude_estimate: amplitude must lie in [0, 1]");
    if (bits < 1 || bits > kMaxAeBits) throw InvalidArgument("amplitude_estimate: bits must lie in [1, 30]");
    const double grid = std::ldexp(1.0, bits);
    const double position = grid * std::asin(a_true) / std::numbers::pi;  // in [0, grid/2]
    const double lower = std::floor(position);
    const double frac = position - lower;

    double cell = lower;
    if (frac > 0.0) {
        const double w_lo = fejer_weight(frac, grid);
        const double w_hi = fejer_weight(1.0 - frac, grid);
        std::mt19937_64 rng(seed);
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        if (u * (w_lo + w_hi) >= w_lo) cell = lower + 1.0;
    }
    AmplitudeEstimate out;
    out.outcome = static_cast<std::int64_t>(cell);
    out.estimate = cell == 0.0 ? 0.0 : std::sin(std::numbers::pi * cell / grid);
    return out;
}

double oracle_PA(Eigen::Index i, Eigen::Index j, const DataSet& data, const CompactOracleConfig& config) {
    check_index(i, data.size());
    check_index(j, data.size());
    const Kernel& kernel = config.kernel;
    if (i == j) return kernel.at_zero();
    const Eigen::VectorXd xi = data.site(i);
    const Eigen::VectorXd xj = data.site(j);
    if (!config.ae_bits) return kernel((xi - xj).norm());
    const double r_hat = estimated_distance(xi, xj, *config.ae_bits,
                                            derive_seed(config.seed, static_cast<std::uint64_t>(i),
                                                        static_cast<std::uint64_t>(j)));
    return kernel(r_hat);
}

Eigen::Index oracle_Pv(Eigen::Index j, Eigen::Index ell, const InterpMatrix& sparse) {
    if (j < 0 || j >= sparse.order()) throw InvalidArgument("oracle_Pv: column index out of range");
    if (ell < 1 || ell > sparse.sparsity()) throw InvalidArgument("oracle_Pv: ell must lie in [1, s]");
    if (sparse.storage() == InterpMatrix::Storage::Sparse) {
        // Symmetric: the rows of column j are the columns of row j.
        const auto& rows = sparse.sparse();
        if (ell > rows.nonzeros_in_row(j)) return kOutOfBandRow;
        return rows.cols[static_cast<std::size_t>(rows.row_start[j] + ell - 1)];
    }
    Eigen::Index seen = 0;
    for (Eigen::Index i = 0; i < sparse.order(); ++i) {
        if (sparse.dense()(i, j) != 0.0 && ++seen == ell) return i;
    }
    return kOutOfBandRow;
}

Eigen::MatrixXd oracle_matrix(const DataSet& data, const InterpMatrix& pattern, const CompactOracleConfig& config) {
    const Eigen::Index m = data.size();
    if (pattern.order() != m) throw DimensionMismatch("oracle_matrix: pattern order differs from dataset size");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index ell = 1; ell <= pattern.sparsity(); ++ell) {
            const Eigen::Index i = oracle_Pv(j, ell, pattern);
            if (i == kOutOfBandRow) break;
            if (i < j) continue;
            const double v = i == j ? oracle_PA(i, i, data, config)
                                    : 0.5 * (oracle_PA(i, j, data, config) + oracle_PA(j, i, data, config));
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

PhiState prepare_phi_state(const Eigen::VectorXd& x, const DataSet& data, const CompactOracleConfig& config) {
    if (x.size() != data.dim()) throw DimensionMismatch("prepare_phi_state: query dimension differs from dataset");
    const double c_hat = config.effective_c_hat();
    const Kernel& kernel = config.kernel;
    if (c_hat * kernel.at_zero() > 1.0 + 1e-12) {
        throw InvalidArgument("prepare_phi_state: C_hat * phi(0) exceeds 1, rotation undefined");
    }
    const Eigen::Index m = data.size();
    Eigen::VectorXd phi(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd xj = data.site(j);
        double r = (x - xj).norm();
        if (config.ae_bits && x.squaredNorm() + xj.squaredNorm() > 0.0) {
            // Query pairs use a seed stream disjoint from the (i, j) site pairs.
            std::uint64_t hash = 0;
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                std::uint64_t bits = 0;
                const double v = x(k);
                std::memcpy(&bits, &v, sizeof bits);
                hash = splitmix64(hash ^ bits);
            }
            r = estimated_distance(x, xj, *config.ae_bits, derive_seed(config.seed ^ hash, ~std::uint64_t{0},
                                                                        static_cast<std::uint64_t>(j)));
        }
        phi(j) = kernel(r);
    }
    // Ancilla-0 amplitude C_hat phi_j on each |j>, uniform 1/sqrt(m) superposition.
    const double success = c_hat * c_hat * phi.squaredNorm() / static_cast<double>(m);
    if (!(success > 0.0)) throw EmptyResult("prepare_phi_state: query lies outside the support of every site");

    PhiState out;
    out.phi = phi;
    out.success_prob = success;
    out.phi_norm_est = std::sqrt(success * static_cast<double>(m)) / c_hat;
    out.state = PureState::normalized(phi);
    return out;
}

CompactSolveReport solve_compact(const DataSet& data, const CompactOracleConfig& config, const InversionConfig& inversion) {
    if (!config.kernel.is_compact()) throw InvalidArgument("solve_compact: kernel must be compactly supported");
    const Eigen::Index m = data.size();
    const double scale = config.normalized ? 1.0 / static_cast<double>(m) : 1.0;

    const InterpMatrix pattern = assemble(data, config.kernel);  // raw, sparse
    const Eigen::MatrixXd exact = pattern.to_dense();
    const Eigen::MatrixXd oracle = oracle_matrix(data, pattern, config);

    CompactSolveReport rep;
    rep.sparsity = pattern.sparsity();
    rep.oracle_frobenius_error = (oracle - exact).norm();

    const Eigen::VectorXd y = data.values() * scale;
    rep.spectrum = spectrum(Eigen::MatrixXd(oracle * scale));
    rep.inversion = invert(oracle * scale, y, inversion);

    const Coefficients classical = solve(pattern, data.values());
    rep.classical_c = classical.c;
    const CVector target = (classical.c / classical.norm).cast<cplx>();
    rep.fidelity_vs_classical = std::abs(rep.inversion.state_out.amplitudes().dot(target));

    // Undo the arbitrary global phase so the coefficients carry the right sign.
    const CVector& out = rep.inversion.state_out.amplitudes();
    const cplx align = out.dot(target);
    const cplx phase = std::abs(align) > 0.0 ? align / std::abs(align) : cplx(1.0, 0.0);
    rep.quantum_c = (out * phase).real() * rep.inversion.c_norm_est;
    rep.quantum_site_residual = site_residual(rep.quantum_c, data, config.kernel);
    return rep;
}

}  // namespace qrbf
