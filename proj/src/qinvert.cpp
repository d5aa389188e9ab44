#include "qrbf/qinvert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qrbf/error.hpp"
#include "qrbf/interpolation.hpp"

namespace qrbf {

namespace {

constexpr double kRotationSlack = 1e-12;

struct Prepared {
    EigenSystem eig;
    SpectrumFilter filter;
    Eigen::VectorXd y_unit;
    double y_norm = 0.0;
    Eigen::VectorXd beta;
};

Prepared prepare(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config) {
    if (a.rows() != a.cols() || a.rows() != y.size()) throw DimensionMismatch("inversion: matrix/vector sizes differ");
    Prepared p;
    p.y_norm = y.norm();
    if (!(p.y_norm > 0.0)) throw InvalidArgument("inversion: right-hand side must be nonzero");
    p.y_unit = y / p.y_norm;
    p.eig = eigensolve(a);
    if (config.delta_eff) {
        p.filter = filter_spectrum(p.eig.values, *config.delta_eff);
    } else {
        if (!(p.eig.values(0) > 0.0)) {
            throw NotPositiveDefinite("inversion: smallest eigenvalue " + std::to_string(p.eig.values(0)) +
                                          " is not positive and no delta_eff filter is set",
                                      p.eig.values(0), 0);
        }
        p.filter = filter_spectrum(p.eig.values, 0.0);
    }
    p.beta = p.eig.vectors.transpose() * p.y_unit;
    return p;
}

double smallest_kept(const Prepared& p) {
    double lo = std::numeric_limits<double>::infinity();
    for (auto j : p.filter.kept) lo = std::min(lo, p.eig.values(j));
    return lo;
}

void fill_classical(SolveReport& rep, const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
    try {
        const Coefficients c = solve_dense(a, y);
        rep.classical_c_norm = c.norm;
        const CVector target = (c.c / c.norm).cast<cplx>();
        rep.fidelity_vs_classical = std::abs(rep.state_out.amplitudes().dot(target));
    } catch (const NotPositiveDefinite&) {
        rep.classical_c_norm = std::numeric_limits<double>::quiet_NaN();
        rep.fidelity_vs_classical = std::numeric_limits<double>::quiet_NaN();
    }
}

void fill_sampling(SolveReport& rep, const InversionConfig& config, double y_norm) {
    if (config.samples_F <= 0) return;
    rep.sampled_post_select = sample_probability(std::min(1.0, rep.post_select_prob), config.samples_F, config.seed);
    rep.sampled_c_norm = std::sqrt(rep.sampled_post_select->estimate) * y_norm / rep.rotation_constant;
}

// Inverse (sign = -1) or forward (sign = +1) quantum Fourier transform along the
// clock index of a T x m array.
void clock_fourier(CMatrix& state, int sign) {
    const Eigen::Index t = state.rows();
    const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(t);
    CVector roots(t);
    for (Eigen::Index k = 0; k < t; ++k) roots(k) = std::polar(1.0, base * static_cast<double>(k));
    CMatrix kernel(t, t);
    for (Eigen::Index k = 0; k < t; ++k) {
        for (Eigen::Index tau = 0; tau < t; ++tau) kernel(k, tau) = roots((k * tau) % t);
    }
    state = (kernel * state / std::sqrt(static_cast<double>(t))).eval();
}

// For every clock bit q, applies exp(i A t0 2^q / T) (direction +1) or its
// inverse (direction -1) to rows whose clock value has bit q set.
void controlled_evolutions(CMatrix& state, const EigenSystem& eig, double t0, int bits, int direction) {
    const Eigen::Index t = state.rows();
    const CMatrix vectors = eig.vectors.cast<cplx>();
    for (int q = 0; q < bits; ++q) {
        const double time = direction * t0 * static_cast<double>(Eigen::Index{1} << q) / static_cast<double>(t);
        const CVector phases = (eig.values.cast<cplx>() * cplx(0.0, time)).array().exp();
        const CMatrix u = vectors * phases.asDiagonal() * vectors.adjoint();
        for (Eigen::Index k = 0; k < t; ++k) {
            if ((k >> q) & 1) state.row(k) = (u * state.row(k).transpose()).transpose();
        }
    }
}

}  // namespace

EigenSystem eigensolve(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("eigensolve: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.info() != Eigen::Success) throw InvalidArgument("eigensolve: decomposition failed");
    return {eig.eigenvalues(), eig.eigenvectors()};
}

SpectrumFilter filter_spectrum(const Eigen::VectorXd& eigenvalues, double delta_eff) {
    if (!(delta_eff >= 0.0)) throw InvalidArgument("filter_spectrum: delta_eff must be nonnegative");
    SpectrumFilter out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        if (eigenvalues(j) > delta_eff) {
            out.kept.push_back(j);
            lo = std::min(lo, eigenvalues(j));
            hi = std::max(hi, eigenvalues(j));
        }
    }
    if (out.kept.empty()) throw EmptyResult("filter_spectrum: no eigenvalue exceeds delta_eff");
    out.kappa_eff = hi / lo;
    return out;
}

SampledProbability sample_probability(double p_true, std::int64_t samples, std::uint64_t seed) {
    if (!(p_true >= 0.0 && p_true <= 1.0)) throw InvalidArgument("sample_probability: p must lie in [0, 1]");
    if (samples < 1) throw InvalidArgument("sample_probability: need at least one sample");
    std::mt19937_64 rng(seed);
    // Number of successes in n independent Bernoulli(p) trials.
    const std::int64_t hits = std::binomial_distribution<std::int64_t>(samples, p_true)(rng);
    SampledProbability out;
    out.samples = samples;
    out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    out.half_width = 3.0 * std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

SolveReport invert_ideal(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config) {
    const Prepared p = prepare(a, y, config);
    const double lambda_min = smallest_kept(p);
    const double c = config.rotation_constant > 0.0 ? config.rotation_constant : lambda_min;
    if (c > lambda_min + kRotationSlack) {
        throw InvalidArgument("inversion: rotation constant C exceeds the smallest kept eigenvalue");
    }

    SolveReport rep;
    rep.mode = InversionMode::Ideal;
    rep.eigvals = p.eig.values;
    rep.overlaps = p.beta;
    rep.kept = p.filter.kept;
    rep.kappa_eff = p.filter.kappa_eff;
    rep.rotation_constant = c;

    // Amplitudes of the ancilla-1 branch in the eigenbasis.
    Eigen::VectorXd branch = Eigen::VectorXd::Zero(p.beta.size());
    for (auto j : p.filter.kept) branch(j) = p.beta(j) * c / p.eig.values(j);
    rep.post_select_prob = branch.squaredNorm() / p.beta.squaredNorm();
    rep.normalization_factor = std::sqrt(rep.post_select_prob);
    rep.c_norm_est = rep.normalization_factor * p.y_norm / c;
    rep.state_out = PureState::normalized(Eigen::VectorXd(p.eig.vectors * branch));
    rep.repetitions = static_cast<std::int64_t>(std::ceil(1.0 / lambda_min));

    fill_classical(rep, a, y);
    fill_sampling(rep, config, p.y_norm);
    return rep;
}

SolveReport invert_quantized(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config) {
    const int bits = config.clock_bits;
    if (bits < 1) throw InvalidArgument("quantized inversion: clock needs at least one bit");
    if (bits > config.max_clock_bits) {
        throw CapExceeded("quantized inversion: " + std::to_string(bits) + " clock bits exceed the cap of " +
                          std::to_string(config.max_clock_bits));
    }
    if (!(config.t0 > 0.0)) throw InvalidArgument("quantized inversion: t0 must be positive");

    const Prepared p = prepare(a, y, config);
    const Eigen::Index clock = Eigen::Index{1} << bits;
    const double t0 = config.t0;
    const double grid_step = 2.0 * std::numbers::pi / t0;  // eigenvalue per clock value
    const double top = p.eig.values(p.eig.values.size() - 1) / grid_step;
    if (top >= static_cast<double>(clock)) {
        throw PhaseWraparound("quantized inversion: lambda_max * t0 / 2pi = " + std::to_string(top) +
                              " reaches the clock size " + std::to_string(clock));
    }
    if (p.eig.values(0) < -0.5 * grid_step) {
        throw PhaseWraparound("quantized inversion: negative eigenvalue would alias to the top of the clock");
    }

    const double floor = config.delta_eff.value_or(0.0);
    double c = config.rotation_constant;
    if (!(c > 0.0)) {
        c = std::numeric_limits<double>::infinity();
        for (auto j : p.filter.kept) {
            const double k = std::max(1.0, std::round(p.eig.values(j) / grid_step));
            c = std::min(c, k * grid_step);
        }
    }

    // Clock in uniform superposition, system in |y>.
    const Eigen::Index m = a.rows();
    CMatrix state(clock, m);
    const CVector y_c = p.y_unit.cast<cplx>() / std::sqrt(static_cast<double>(clock));
    for (Eigen::Index k = 0; k < clock; ++k) state.row(k) = y_c.transpose();

    controlled_evolutions(state, p.eig, t0, bits, +1);
    clock_fourier(state, -1);

    // Rotation keyed on the clock value; keep the ancilla-1 branch.
    for (Eigen::Index k = 0; k < clock; ++k) {
        const double estimate = static_cast<double>(k) * grid_step;
        double g = 0.0;
        if (k > 0 && estimate > floor) g = std::min(1.0, c / estimate);
        state.row(k) *= g;
    }
    const double post_select = state.squaredNorm();
    if (!(post_select > 0.0)) throw EmptyResult("quantized inversion: ancilla-1 branch has zero amplitude");

    clock_fourier(state, +1);
    controlled_evolutions(state, p.eig, t0, bits, -1);
    // Undo the clock Hadamards and project onto clock value 0.
    const CVector returned = state.colwise().sum().transpose() / std::sqrt(static_cast<double>(clock));

    SolveReport rep;
    rep.mode = InversionMode::Quantized;
    rep.eigvals = p.eig.values;
    rep.overlaps = p.beta;
    rep.kept = p.filter.kept;
    rep.kappa_eff = p.filter.kappa_eff;
    rep.rotation_constant = c;
    rep.clock_bits = bits;
    rep.t0 = t0;
    rep.post_select_prob = post_select;
    rep.normalization_factor = std::sqrt(post_select);
    rep.c_norm_est = rep.normalization_factor * p.y_norm / c;
    rep.clock_return_prob = returned.squaredNorm() / post_select;
    rep.state_out = PureState::normalized(returned);
    rep.repetitions = static_cast<std::int64_t>(std::ceil(1.0 / smallest_kept(p)));

    // Ideal reference with the same filter.
    InversionConfig ideal_cfg = config;
    ideal_cfg.mode = InversionMode::Ideal;
    ideal_cfg.rotation_constant = 0.0;
    ideal_cfg.samples_F = 0;
    const SolveReport ideal = invert_ideal(a, y, ideal_cfg);
    const cplx overlap = ideal.state_out.amplitudes().dot(rep.state_out.amplitudes());
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
    rep.deviation_from_ideal = (rep.state_out.amplitudes() * std::conj(phase) - ideal.state_out.amplitudes()).norm();

    fill_classical(rep, a, y);
    fill_sampling(rep, config, p.y_norm);
    return rep;
}

SolveReport invert(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const InversionConfig& config) {
    return config.mode == InversionMode::Ideal ? invert_ideal(a, y, config) : invert_quantized(a, y, config);
}

double swap_test(const PureState& u, const PureState& v) {
    if (u.dimension() != v.dimension()) throw DimensionMismatch("swap_test: states differ in dimension");
    const double overlap = std::abs(u.inner(v));
    return 0.5 + 0.5 * overlap * overlap;
}

double readout_value(double c_norm, double phi_norm, double overlap) {
    if (!(c_norm >= 0.0) || !(phi_norm >= 0.0)) throw InvalidArgument("readout_value: norms must be nonnegative");
    return c_norm * phi_norm * overlap;
}

double overlap_from_swap_probability(double p) { return std::sqrt(std::max(0.0, 2.0 * p - 1.0)); }

nlohmann::json to_json(const SolveReport& r) {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["mode"] = r.mode == InversionMode::Ideal ? "ideal" : "quantized";
    j["eigvals"] = vec(r.eigvals);
    j["overlaps"] = vec(r.overlaps);
    j["kept"] = r.kept;
    j["kappa_eff"] = r.kappa_eff;
    j["rotation_constant"] = r.rotation_constant;
    j["post_select_prob"] = r.post_select_prob;
    j["normalization_factor"] = r.normalization_factor;
    j["c_norm_est"] = r.c_norm_est;
    j["classical_c_norm"] = finite_or_null(r.classical_c_norm);
    j["fidelity_vs_classical"] = finite_or_null(r.fidelity_vs_classical);
    j["repetitions"] = r.repetitions;
    if (r.sampled_post_select) {
        j["sampling"] = {{"post_select_estimate", r.sampled_post_select->estimate},
                         {"half_width", r.sampled_post_select->half_width},
                         {"samples", r.sampled_post_select->samples},
                         {"c_norm", r.sampled_c_norm}};
    }
    if (r.mode == InversionMode::Quantized) {
        j["clock_bits"] = r.clock_bits;
        j["t0"] = r.t0;
        j["clock_return_prob"] = r.clock_return_prob;
        j["deviation_from_ideal"] = r.deviation_from_ideal;
    }
    return j;
}

}  // namespace qrbf
