#include "qrbf/harness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "qrbf/coherent.hpp"
#include "qrbf/compact.hpp"
#include "qrbf/harness/data_gen.hpp"
#include "qrbf/interpolation.hpp"
#include "qrbf/qcore.hpp"
#include "qrbf/qinvert.hpp"

namespace qrbf::harness {

using nlohmann::json;

namespace {

constexpr double kFidelityCeiling = 1.0 + 1e-9;
constexpr double kResidualTolerance = 1e-9;
constexpr double kReadoutTolerance = 1e-8;
constexpr double kMaxSamples = 1e15;

// Seed streams for the independent random draws of one run.
constexpr std::uint64_t kStreamDme = 1;
constexpr std::uint64_t kStreamSwap = 2;
constexpr std::uint64_t kStreamNorm = 3;

template <typename F>
auto staged(const char* stage, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

std::string params_of(const Eigen::VectorXd& x) {
    std::string s;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (k) s += ';';
        s += format_number(x(k));
    }
    return s;
}

double value_scale(const DataSet& data) { return std::max(1.0, data.values().cwiseAbs().maxCoeff()); }

json spectrum_json(const Spectrum& s) {
    return {{"max", s.max}, {"min", s.min}, {"kappa", std::isfinite(s.kappa) ? json(s.kappa) : json(nullptr)}};
}

// Phase-aligned real coefficients c_norm * |c>, signed like the classical solution.
Eigen::VectorXd aligned_coefficients(const PureState& state, double c_norm, const Eigen::VectorXd& classical) {
    const CVector& out = state.amplitudes();
    const cplx align = out.dot(classical.cast<cplx>());
    const cplx phase = std::abs(align) > 0.0 ? align / std::abs(align) : cplx(1.0, 0.0);
    return (out * phase).real() * c_norm;
}

std::int64_t norm_samples(double eps_F, double p_floor, std::int64_t configured) {
    if (configured > 0) return configured;
    const double n = std::ceil(9.0 / (eps_F * eps_F * std::max(p_floor, 1e-300)));
    return static_cast<std::int64_t>(std::min(n, kMaxSamples));
}

std::int64_t swap_samples(double eps_p, std::int64_t configured) {
    if (configured > 0) return configured;
    return static_cast<std::int64_t>(std::ceil(1.0 / (eps_p * eps_p)));
}

struct QuantumSolve {
    PureState state{CVector::Ones(1)};
    double c_norm_exact = 0.0;    // from the exact post-selection probability
    double c_norm_sampled = 0.0;  // from the sampled one
    json summary;
};

struct QueryReadout {
    double f_quantum = 0.0;
    double f_noiseless = 0.0;
    double budget = 0.0;
};

// Swap-test readout of f(x) = ||c|| ||Phi|| <c|Phi>. The test itself reveals
// only |<c|Phi>|; the sign is read from the simulated overlap.
QueryReadout swap_readout(const QuantumSolve& q, const Eigen::VectorXd& phi, double phi_norm,
                          const ExperimentConfig& config, std::uint64_t query_seed) {
    QueryReadout out;
    if (!(phi_norm > 0.0)) return out;
    const PureState phi_state = PureState::normalized(phi);
    const cplx overlap = q.state.inner(phi_state);
    out.f_noiseless = q.c_norm_exact * phi_norm * overlap.real();

    const std::int64_t n = swap_samples(config.budgets.eps_p, config.inversion.samples_p);
    const SampledProbability p_hat = sample_probability(swap_test(q.state, phi_state), n, query_seed);
    const double o_hat = overlap_from_swap_probability(p_hat.estimate);
    const double sign = overlap.real() < 0.0 ? -1.0 : 1.0;
    out.f_quantum = sign * readout_value(q.c_norm_sampled, phi_norm, o_hat);

    // |o - o_hat| <= 2|p - p_hat| / (o + o_hat), and <= sqrt(2|p - p_hat|).
    const double h = 1.5 / std::sqrt(static_cast<double>(n));
    const double eps_o = o_hat > 0.0 ? std::min(std::sqrt(2.0 * h), 2.0 * h / o_hat) : std::sqrt(2.0 * h);
    const Budgets& b = config.budgets;
    out.budget = phi_norm * q.c_norm_sampled * (2.0 * b.eps_c + b.eps_F + eps_o);
    return out;
}

void check_state(CheckTable& checks, const char* stage, const PureState& state, const Eigen::VectorXd& classical_c,
                 double eps_c) {
    const double fidelity = std::abs(state.amplitudes().dot((classical_c / classical_c.norm()).cast<cplx>()));
    checks.record(stage, "fidelity_ceiling", "", fidelity, kFidelityCeiling);
    checks.record(stage, "fidelity_vs_classical", "eps_c=" + format_number(eps_c), fidelity, 1.0 - eps_c, ">=");
    checks.note(stage, "state_error", "", std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(1.0, fidelity))));
}

InversionConfig inversion_config(const ExperimentConfig& config, const Spectrum& spec) {
    InversionConfig inv;
    inv.mode = config.inversion.mode;
    inv.rotation_constant = config.inversion.rotation_constant;
    inv.delta_eff = config.inversion.delta_eff;
    inv.max_clock_bits = config.inversion.max_clock_bits;
    inv.seed = config.seed;
    if (inv.mode == InversionMode::Quantized) {
        const double floor = config.inversion.delta_eff.value_or(0.0);
        const double lambda_min = std::max(spec.min, floor);
        if (!(lambda_min > 0.0)) throw InvalidArgument("quantized inversion needs a positive smallest eigenvalue");
        inv.t0 = config.inversion.t0 > 0.0 ? config.inversion.t0 : 1.0 / (lambda_min * config.budgets.eps_c);
        if (config.inversion.clock_bits > 0) {
            inv.clock_bits = config.inversion.clock_bits;
        } else {
            const double top = spec.max * inv.t0 / (2.0 * std::numbers::pi);
            inv.clock_bits = std::max(1, static_cast<int>(std::floor(std::log2(std::max(top, 1.0)))) + 1);
        }
    }
    return inv;
}

QuantumSolve finish_solve(const SolveReport& rep, const Eigen::VectorXd& y, const ExperimentConfig& config) {
    QuantumSolve q;
    q.state = rep.state_out;
    q.c_norm_exact = rep.c_norm_est;
    double lambda_max = 0.0;
    for (auto j : rep.kept) lambda_max = std::max(lambda_max, rep.eigvals(j));
    const double p_floor = std::pow(rep.rotation_constant / lambda_max, 2);
    const std::int64_t n = norm_samples(config.budgets.eps_F, p_floor, config.inversion.samples_F);
    const SampledProbability p_hat =
        sample_probability(std::min(1.0, rep.post_select_prob), n, derive_seed(config.seed, kStreamNorm, 0));
    q.c_norm_sampled = std::sqrt(p_hat.estimate) * y.norm() / rep.rotation_constant;
    q.summary = to_json(rep);
    q.summary["norm_sampling"] = {{"samples", n},
                                  {"post_select_estimate", p_hat.estimate},
                                  {"half_width", p_hat.half_width},
                                  {"c_norm", q.c_norm_sampled}};
    return q;
}

}  // namespace

json runtime_context(Pipeline pipeline) {
    json j;
    j["classical"] = {{"generator", "O(m^2 d)"}, {"solver", "O(m^2 sqrt(kappa) log(1/eps))"}};
    if (pipeline == Pipeline::QuantumGlobal) {
        j["quantum"] = {{"generator", "O(m d log(d / eps_A))"},
                        {"state", "O(kappa^3 eps^-3 m d log(d kappa^2 / eps))"},
                        {"readout", "O(kappa^3 eps^-5 m d log(d kappa^2 / eps))"}};
    } else if (pipeline == Pipeline::QuantumCompact) {
        j["quantum"] = {{"state", "O~(kappa^2 s^2 eps^-2 log m log^2 d)"},
                        {"readout", "O~(kappa^2 s^2 eps^-4 log m log^2 d)"}};
    }
    j["note"] = "asymptotic costs for context only; not checked";
    return j;
}

Eigen::MatrixXd load_queries(const ExperimentConfig& config, Eigen::Index d) {
    if (!config.queries.file.empty()) {
        Eigen::MatrixXd q = read_points_csv(std::filesystem::path(config.queries.file));
        if (q.cols() != d) throw DimensionMismatch("query file dimension differs from the dataset");
        return q;
    }
    return gen_points(config.queries.count, d, config.data.box_lo, config.data.box_hi, config.seed);
}

PipelineResult run_pipeline(const ExperimentConfig& config, const DataSet& data, const Eigen::MatrixXd& queries) {
    config.validate();
    if (queries.rows() > 0 && queries.cols() != data.dim()) {
        throw DimensionMismatch("query points and dataset differ in dimension");
    }
    const std::string hash = config.hash();
    const Eigen::Index m = data.size();
    const Eigen::Index d = data.dim();
    const bool quantum = config.pipeline != Pipeline::Classical;

    std::vector<std::string> query_header{"query"};
    for (Eigen::Index k = 0; k < d; ++k) query_header.push_back("x" + std::to_string(k + 1));
    for (const char* h : {"f_classical", "f_quantum", "f_noiseless", "abs_error", "budget", "pass", "seed", "config_hash"}) {
        query_header.push_back(h);
    }
    PipelineResult result{CheckTable(std::string(to_string(config.pipeline)), config.seed, hash), CsvTable(query_header),
                          CsvTable({"j", "c_classical", "c_quantum", "seed", "config_hash"}), json::object()};
    CheckTable& checks = result.checks;

    // Classical reference.
    const Kernel kernel = staged("kernel", [&] { return make_kernel(config.kernel, data.median_nearest_neighbor()); });
    AssembleOptions aopts;
    aopts.allow_non_pd = config.kernel.allow_non_pd;
    const InterpMatrix matrix = staged("assemble", [&] { return assemble(data, kernel, aopts); });
    const Coefficients coeffs = staged("classical-solve", [&] { return solve(matrix, data.values()); });
    const double residual = site_residual(coeffs.c, data, kernel);
    checks.record("classical", "site_residual", "", residual, kResidualTolerance * value_scale(data));

    json summary;
    summary["pipeline"] = to_string(config.pipeline);
    summary["seed"] = config.seed;
    summary["config_hash"] = hash;
    summary["config"] = config.to_json();
    summary["runtime_context"] = runtime_context(config.pipeline);
    summary["data"] = {{"m", m}, {"d", d}, {"min_separation", data.min_separation()}};
    summary["kernel"] = kernel.describe();
    summary["classical"] = {{"site_residual", residual}, {"c_norm", coeffs.norm}, {"iterations", coeffs.iterations}};

    Eigen::VectorXd quantum_c = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
    QuantumSolve qs;
    // Feature vector and its norm at a query point, as the quantum route prepares it.
    std::function<std::pair<Eigen::VectorXd, double>(const Eigen::VectorXd&, Eigen::Index)> features;

    if (config.pipeline == Pipeline::QuantumGlobal) {
        if (kernel.family() != KernelFamily::Gaussian) {
            throw StageError("quantum-global", "the coherent-state route needs the Gaussian kernel");
        }
        const double sigma = kernel.sigma();
        const Eigen::MatrixXd exact = matrix.to_dense() / static_cast<double>(m);
        const Spectrum exact_spec = spectrum(exact);
        const double eps_A = config.budgets.eps_A.value_or(config.budgets.eps_c / (exact_spec.kappa * exact_spec.kappa));
        const double ratio_max = data.sites().cwiseAbs().maxCoeff() / sigma;
        const int order = config.coherent.order > 0
                              ? config.coherent.order
                              : staged("coherent", [&] { return min_order(ratio_max, eps_A / (2.0 * static_cast<double>(d))); });
        const CoherentGram gram = staged("coherent", [&] { return gram_coherent(data, sigma, order); });
        const Eigen::MatrixXd a_hat = gram.matrix.to_dense();
        const Spectrum hat_spec = spectrum(a_hat);

        checks.record("coherent", "gram_frobenius", "N=" + std::to_string(order), gram.frobenius_error, gram.bound);
        checks.record("coherent", "gershgorin", "", hat_spec.max, 1.0 + 1e-12);
        try {
            const SuperpositionCheck sc = superposition_gram_check(data, sigma, order, config.coherent.density_cap);
            checks.record("coherent", "superposition_partial_trace", "dim=" + std::to_string(sc.state_dim),
                          sc.max_deviation, 1e-12);
        } catch (const CapExceeded&) {
            checks.note("coherent", "superposition_skipped_cap", "", static_cast<double>(config.coherent.density_cap));
        }

        json dme_json = nullptr;
        if (config.dme.enabled && m <= config.dme.max_dim) {
            const int steps = config.dme.steps > 0
                                  ? config.dme.steps
                                  : static_cast<int>(std::ceil(config.dme.t * config.dme.t / config.budgets.eps_E));
            const DmeResult dme = staged("dme", [&] {
                std::mt19937_64 rng(derive_seed(config.seed, kStreamDme, 0));
                const DensityMatrix rho = random_density(m, rng);
                return dme_evolve(DensityMatrix::from_real(a_hat), rho, config.dme.t, steps);
            });
            checks.note("dme", "trace_error", "t=" + format_number(config.dme.t) + ";l=" + std::to_string(steps),
                        dme.trace_error);
            dme_json = {{"t", config.dme.t}, {"steps", steps}, {"trace_error", dme.trace_error},
                        {"frobenius_error", dme.frobenius_error}, {"eps_E", config.budgets.eps_E}};
        }

        const Eigen::VectorXd y_hat = data.values() / static_cast<double>(m);
        const InversionConfig inv = staged("inversion", [&] { return inversion_config(config, hat_spec); });
        const SolveReport rep = staged("inversion", [&] { return invert(a_hat, y_hat, inv); });
        qs = finish_solve(rep, y_hat, config);
        check_state(checks, "inversion", qs.state, coeffs.c, config.budgets.eps_c);
        quantum_c = aligned_coefficients(qs.state, qs.c_norm_exact, coeffs.c);

        summary["quantum"] = {{"eps_A", eps_A},
                              {"order", order},
                              {"delta", gram.delta},
                              {"gram_bound", gram.bound},
                              {"gram_frobenius_error", gram.frobenius_error},
                              {"exact_spectrum", spectrum_json(exact_spec)},
                              {"coherent_spectrum", spectrum_json(hat_spec)},
                              {"dme", dme_json},
                              {"inversion", qs.summary}};
        const Kernel gauss = kernel;
        features = [&data, gauss](const Eigen::VectorXd& x, Eigen::Index) {
            Eigen::VectorXd phi = feature_vector(data, gauss, x);
            const double n = phi.norm();
            return std::make_pair(std::move(phi), n);
        };
    } else if (config.pipeline == Pipeline::QuantumCompact) {
        if (!kernel.is_compact()) throw StageError("quantum-compact", "the compact route needs a Wendland kernel");
        CompactOracleConfig oc;
        oc.kernel = kernel;
        oc.ae_bits = config.compact.ae_bits;
        oc.c_hat = config.compact.c_hat;
        oc.normalized = config.compact.normalized;
        oc.seed = config.seed;

        const Spectrum pre_spec = staged("compact", [&] {
            const Eigen::MatrixXd a = oracle_matrix(data, matrix, oc);
            return spectrum(Eigen::MatrixXd(oc.normalized ? a / static_cast<double>(m) : a));
        });
        const InversionConfig inv = staged("inversion", [&] { return inversion_config(config, pre_spec); });
        const CompactSolveReport rep = staged("compact", [&] { return solve_compact(data, oc, inv); });
        const Eigen::VectorXd y_used = oc.normalized ? Eigen::VectorXd(data.values() / static_cast<double>(m))
                                                     : data.values();
        qs = finish_solve(rep.inversion, y_used, config);
        check_state(checks, "compact", qs.state, coeffs.c, config.budgets.eps_c);
        const bool exact_route = !oc.ae_bits && inv.mode == InversionMode::Ideal;
        if (exact_route) {
            checks.record("compact", "quantum_site_residual", "", rep.quantum_site_residual,
                          kResidualTolerance * value_scale(data));
        } else {
            checks.note("compact", "quantum_site_residual", "", rep.quantum_site_residual);
        }
        checks.note("compact", "oracle_frobenius_error", oc.ae_bits ? "ae_bits=" + std::to_string(*oc.ae_bits) : "exact",
                    rep.oracle_frobenius_error);
        quantum_c = rep.quantum_c;

        summary["quantum"] = {{"sparsity", rep.sparsity},
                              {"alpha", kernel.support()},
                              {"oracle_frobenius_error", rep.oracle_frobenius_error},
                              {"spectrum", spectrum_json(rep.spectrum)},
                              {"quantum_site_residual", rep.quantum_site_residual},
                              {"inversion", qs.summary}};
        features = [&data, oc](const Eigen::VectorXd& x, Eigen::Index) {
            try {
                const PhiState ps = prepare_phi_state(x, data, oc);
                return std::make_pair(ps.phi, ps.phi_norm_est);
            } catch (const EmptyResult&) {
                return std::make_pair(Eigen::VectorXd(Eigen::VectorXd::Zero(data.size())), 0.0);
            }
        };
    }

    const std::string seed_text = std::to_string(config.seed);
    for (Eigen::Index j = 0; j < m; ++j) {
        result.coefficients.add_row({std::to_string(j), format_number(coeffs.c(j)),
                                     quantum ? format_number(quantum_c(j)) : "", seed_text, hash});
    }

    const bool exact_readout =
        config.pipeline == Pipeline::QuantumCompact && !config.compact.ae_bits && config.inversion.mode == InversionMode::Ideal;
    double max_error = 0.0;
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        const Eigen::VectorXd x = queries.row(q).transpose();
        const double f_c = evaluate(coeffs, data, kernel, x);
        std::vector<std::string> row{std::to_string(q)};
        for (Eigen::Index k = 0; k < d; ++k) row.push_back(format_number(x(k)));
        row.push_back(format_number(f_c));
        if (!quantum) {
            row.insert(row.end(), {"", "", "", "", "pass", seed_text, hash});
            result.queries.add_row(std::move(row));
            continue;
        }
        const auto [phi, phi_norm] = staged("readout", [&] { return features(x, q); });
        const QueryReadout r = staged("readout", [&] {
            return swap_readout(qs, phi, phi_norm, config,
                                derive_seed(config.seed, kStreamSwap, static_cast<std::uint64_t>(q)));
        });
        const double err = std::abs(r.f_quantum - f_c);
        max_error = std::max(max_error, err);
        const std::string id = "query-" + std::to_string(q);
        const bool pass = checks.record(id, "readout_error", params_of(x), err, 3.0 * r.budget);
        if (exact_readout) {
            checks.record(id, "noiseless_readout", params_of(x), std::abs(r.f_noiseless - f_c),
                          kReadoutTolerance * std::max(1.0, std::abs(f_c)));
        }
        for (double v : {r.f_quantum, r.f_noiseless, err, 3.0 * r.budget}) row.push_back(format_number(v));
        row.insert(row.end(), {pass ? "pass" : "fail", seed_text, hash});
        result.queries.add_row(std::move(row));
    }

    summary["queries"] = {{"count", queries.rows()}, {"max_abs_error", quantum ? json(max_error) : json(nullptr)}};
    summary["checks"] = {{"rows", checks.table().size()}, {"failures", checks.failures()}};
    summary["pass"] = checks.all_pass();
    result.summary = std::move(summary);
    return result;
}

void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir, const std::string& prefix) {
    result.checks.table().write(dir / (prefix + "checks.csv"));
    result.queries.write(dir / (prefix + "queries.csv"));
    result.coefficients.write(dir / (prefix + "coefficients.csv"));
    write_json(dir / (prefix + "summary.json"), result.summary);
}

}  // namespace qrbf::harness
