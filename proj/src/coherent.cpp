#include "qrbf/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrbf/error.hpp"
#include "qrbf/qcore.hpp"

namespace qrbf {

namespace {

// exp(ratio^2) must stay representable.
const double kMaxRatioSquared = std::log(std::numeric_limits<double>::max());

double checked_ratio(double r, double sigma, int order) {
    if (!(sigma > 0.0)) throw InvalidArgument("coherent state: sigma must be positive");
    if (order < 1) throw InvalidArgument("coherent state: truncation order must be >= 1");
    const double ratio = r / sigma;
    if (!std::isfinite(ratio) || ratio * ratio > kMaxRatioSquared) {
        throw InvalidArgument("coherent state: (r/sigma)^2 exceeds the representable exponent range");
    }
    return ratio;
}

// log of |ratio|^k / sqrt(k!)
double log_term(double log_abs_ratio, int k) { return k * log_abs_ratio - 0.5 * std::lgamma(k + 1.0); }

// Signed Taylor amplitudes ratio^k/sqrt(k!) for k < count, scaled by exp(-shift)
// where shift is the largest log term; returns the shift.
double scaled_terms(double ratio, int count, Eigen::VectorXd& out) {
    out.resize(count);
    const double lr = std::log(std::abs(ratio));
    double shift = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) shift = std::max(shift, log_term(lr, k));
    for (int k = 0; k < count; ++k) {
        const double mag = std::exp(log_term(lr, k) - shift);
        out(k) = (ratio < 0.0 && (k % 2 == 1)) ? -mag : mag;
    }
    return shift;
}

}  // namespace

TruncatedCoherent coherent_state(double r, double sigma, int order) {
    const double ratio = checked_ratio(r, sigma, order);
    TruncatedCoherent out;
    out.ratio = ratio;
    out.order = order;
    if (ratio == 0.0) {
        out.amplitudes = Eigen::VectorXd::Zero(order);
        out.amplitudes(0) = 1.0;
        out.partial_norm = 1.0;
        out.full_norm = 1.0;
        return out;
    }
    Eigen::VectorXd terms;
    const double shift = scaled_terms(ratio, order, terms);
    const double scaled_sq = terms.squaredNorm();
    out.amplitudes = terms / std::sqrt(scaled_sq);
    out.partial_norm = std::exp(2.0 * shift) * scaled_sq;
    out.full_norm = std::exp(ratio * ratio);
    return out;
}

double truncation_bound(double r, double sigma, int order) {
    const double ratio = checked_ratio(r, sigma, order);
    if (ratio == 0.0) return 0.0;
    const double log_sq = std::log(2.0) + 2.0 * order * std::log(std::abs(ratio)) - std::lgamma(order + 1.0);
    return std::exp(0.5 * log_sq);
}

double measured_truncation_error(double r, double sigma, int order, int extra) {
    const double ratio = checked_ratio(r, sigma, order);
    if (extra < 1) throw InvalidArgument("reference order must exceed the truncation order");
    if (ratio == 0.0) return 0.0;

    const int ref_order = order + extra;
    Eigen::VectorXd terms;
    scaled_terms(ratio, ref_order, terms);
    const double kept = terms.head(order).squaredNorm();       // B (scaled)
    const double tail = terms.tail(extra).squaredNorm();       // Delta B (scaled)
    const double ref = kept + tail;                            // reference normalization (scaled)
    const double z = tail / ref;
    // 1/sqrt(ref) - 1/sqrt(kept) = -(1/sqrt(kept)) * z / (1 + sqrt(1 - z))
    const double head_factor = -(z / (1.0 + std::sqrt(1.0 - z))) / std::sqrt(kept);

    Eigen::VectorXd diff(ref_order);
    diff.head(order) = terms.head(order) * head_factor;
    diff.tail(extra) = terms.tail(extra) / std::sqrt(ref);
    return diff.norm();
}

int min_order(double ratio_max, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("min_order: delta must be positive");
    constexpr int kMaxOrder = 100000;
    for (int n = 1; n <= kMaxOrder; ++n) {
        if (truncation_bound(ratio_max, 1.0, n) <= delta) return n;
    }
    throw CapExceeded("min_order: no truncation order up to 100000 meets the requested delta");
}

Eigen::Index ProductCoherent::total_dim() const {
    Eigen::Index dim = 1;
    for (const auto& c : components) dim *= c.order;
    return dim;
}

Eigen::VectorXd ProductCoherent::amplitudes() const {
    Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
    for (const auto& c : components) out = kron(out, c.amplitudes);
    return out;
}

ProductCoherent product_state(const Eigen::VectorXd& x, double sigma, int order) {
    ProductCoherent out;
    out.components.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index k = 0; k < x.size(); ++k) out.components.push_back(coherent_state(x(k), sigma, order));
    return out;
}

double measured_product_error(const Eigen::VectorXd& x, double sigma, int order, int extra) {
    // For unit vectors ||e - t||^2 = 2(1 - <e|t>) and <e|t> = prod_k (1 - eps_k^2 / 2).
    double log_overlap = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double eps = measured_truncation_error(x(k), sigma, order, extra);
        log_overlap += std::log1p(-0.5 * eps * eps);
    }
    return std::sqrt(std::max(0.0, -2.0 * std::expm1(log_overlap)));
}

double coherent_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma, int order) {
    if (x.size() != y.size()) throw DimensionMismatch("coherent_inner: vectors differ in dimension");
    double inner = 1.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        inner *= coherent_state(x(k), sigma, order).amplitudes.dot(coherent_state(y(k), sigma, order).amplitudes);
    }
    return inner;
}

double dataset_delta(const DataSet& data, double sigma, int order) {
    double delta = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index k = 0; k < data.dim(); ++k) {
            delta = std::max(delta, truncation_bound(data.sites()(i, k), sigma, order));
        }
    }
    return delta;
}

CoherentGram gram_coherent(const DataSet& data, double sigma, int order) {
    const Eigen::Index m = data.size();
    const Eigen::Index d = data.dim();

    // states[i * d + k]: amplitudes for coordinate k of site i
    std::vector<Eigen::VectorXd> states;
    states.reserve(static_cast<std::size_t>(m * d));
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) states.push_back(coherent_state(data.sites()(i, k), sigma, order).amplitudes);
    }

    const double inv_m = 1.0 / static_cast<double>(m);
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a(i, i) = inv_m;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double inner = 1.0;
            for (Eigen::Index k = 0; k < d; ++k) inner *= states[i * d + k].dot(states[j * d + k]);
            a(i, j) = inner * inv_m;
            a(j, i) = a(i, j);
        }
    }

    AssembleOptions opts;
    opts.normalized = true;
    Eigen::MatrixXd exact = assemble(data, Kernel::gaussian_sigma(sigma), opts).to_dense();

    CoherentGram out{InterpMatrix::from_dense(a, true), exact};
    out.delta = dataset_delta(data, sigma, order);
    out.bound = 2.0 * static_cast<double>(d) * out.delta;
    out.frobenius_error = (a - exact).norm();
    out.max_inner_error = (a - exact).cwiseAbs().maxCoeff() * static_cast<double>(m);
    return out;
}

SuperpositionCheck superposition_gram_check(const DataSet& data, double sigma, int order, Eigen::Index cap) {
    const Eigen::Index m = data.size();
    Eigen::Index coherent_dim = 1;
    for (Eigen::Index k = 0; k < data.dim(); ++k) {
        coherent_dim *= order;
        if (coherent_dim * m > cap) {
            throw CapExceeded("superposition check: m * N^d exceeds the configured cap of " + std::to_string(cap));
        }
    }

    CVector psi(m * coherent_dim);
    const double amp = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        psi.segment(j * coherent_dim, coherent_dim) = (product_state(data.site(j), sigma, order).amplitudes() * amp).cast<cplx>();
    }
    const CMatrix joint = psi * psi.adjoint();
    const CMatrix reduced = partial_trace(joint, {m, coherent_dim}, 0);

    SuperpositionCheck out;
    out.reduced = reduced.real();
    out.state_dim = psi.size();
    out.trace = reduced.trace().real();
    const Eigen::MatrixXd gram = gram_coherent(data, sigma, order).matrix.to_dense();
    out.max_deviation = std::max((out.reduced - gram).cwiseAbs().maxCoeff(), reduced.imag().cwiseAbs().maxCoeff());
    return out;
}

Eigen::VectorXd displaced_vacuum(double ratio, int dim) {
    if (dim < 1) throw InvalidArgument("displaced_vacuum: dimension must be >= 1");
    // i * ratio * (a^dagger - a) is Hermitian; exp(-i H) = exp(ratio (a^dagger - a)).
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double s = ratio * std::sqrt(k + 1.0);
        h(k + 1, k) = cplx(0.0, s);
        h(k, k + 1) = cplx(0.0, -s);
    }
    const CMatrix u = hermitian_exponential(h, 1.0);
    return u.col(0).real();
}

}  // namespace qrbf
