#include "qrbf/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "qrbf/coherent.hpp"
#include "qrbf/compact.hpp"
#include "qrbf/error.hpp"
#include "qrbf/harness/data_gen.hpp"
#include "qrbf/interpolation.hpp"
#include "qrbf/qcore.hpp"
#include "qrbf/qinvert.hpp"

namespace qrbf::harness {

using nlohmann::json;

namespace {

using Rng = std::mt19937_64;

std::string kv(const std::string& key, double v) { return key + "=" + format_number(v); }
std::string kv(const std::string& key, Eigen::Index v) { return key + "=" + std::to_string(v); }
std::string join(std::initializer_list<std::string> parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += ';';
        s += p;
    }
    return s;
}

Eigen::Index uniform_int(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
    return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

Eigen::MatrixXd random_orthogonal(Eigen::Index m, Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd z(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) z(i, j) = g(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
}

Eigen::VectorXd random_vector(Eigen::Index m, Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(m);
    for (auto& x : v) x = g(rng);
    return v;
}

DataSet random_sites(Rng& rng, Eigen::Index m, Eigen::Index d) {
    return gen_data(m, d, 0.0, 1.0, rng(), Target::Franke);
}

// ---------------------------------------------------------------- truncation

void truncation_suite(CheckTable& t, json& summary) {
    int points = 0;
    for (int i = 0; i <= 8; ++i) {
        const double ratio = 0.25 * i;
        for (int n = 2; n <= 30; ++n) {
            const double measured = measured_truncation_error(ratio, 1.0, n);
            const double bound = truncation_bound(ratio, 1.0, n);
            t.record(join({kv("ratio", ratio), kv("N", Eigen::Index{n})}), "truncation", "", measured, bound);
            ++points;
        }
    }
    summary["grid_points"] = points;
}

// ---------------------------------------------------------------- gram

void gram_suite(CheckTable& t, json& summary, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x6772616d, 0));
    for (int c = 0; c < 50; ++c) {
        const Eigen::Index m = uniform_int(rng, 2, 10);
        const Eigen::Index d = uniform_int(rng, 1, 3);
        const double sigma = uniform(rng, 0.3, 1.0);
        const DataSet data = random_sites(rng, m, d);
        const double target = log_uniform(rng, 1e-8, 1e-2);
        const int order = min_order(data.sites().cwiseAbs().maxCoeff() / sigma, target);
        const CoherentGram g = gram_coherent(data, sigma, order);
        const std::string id = "gram-" + std::to_string(c);
        const std::string p = join({kv("m", m), kv("d", d), kv("sigma", sigma), kv("N", Eigen::Index{order})});
        t.record(id, "gram_frobenius", p, g.frobenius_error, g.bound);
        t.record(id, "gram_entrywise", p, g.max_inner_error, g.bound);
    }
    for (int c = 0; c < 20; ++c) {
        const Eigen::Index m = uniform_int(rng, 2, 4);
        const Eigen::Index d = uniform_int(rng, 1, 2);
        const int order = static_cast<int>(uniform_int(rng, 2, 6));
        const double sigma = uniform(rng, 0.3, 1.0);
        const DataSet data = random_sites(rng, m, d);
        const SuperpositionCheck s = superposition_gram_check(data, sigma, order);
        t.record("superposition-" + std::to_string(c), "superposition_partial_trace",
                 join({kv("m", m), kv("d", d), kv("N", Eigen::Index{order})}), s.max_deviation, 1e-12);
    }
    for (int c = 0; c < 100; ++c) {
        const Eigen::Index m = uniform_int(rng, 2, 30);
        const Eigen::Index d = uniform_int(rng, 1, 5);
        const double sigma = log_uniform(rng, 0.05, 5.0);
        const DataSet data = random_sites(rng, m, d);
        AssembleOptions opts;
        opts.normalized = true;
        const Spectrum s = spectrum(assemble(data, Kernel::gaussian_sigma(sigma), opts));
        t.record("gershgorin-" + std::to_string(c), "gershgorin", join({kv("m", m), kv("d", d), kv("sigma", sigma)}),
                 s.max, 1.0 + 1e-12);
    }
    summary["datasets"] = {{"gram", 50}, {"superposition", 20}, {"gershgorin", 100}};
}

// ---------------------------------------------------------------- dme

void dme_suite(CheckTable& t, json& summary, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x646d65, 0));
    json slopes = json::array();
    for (int pair = 0; pair < 3; ++pair) {
        const DensityMatrix a = random_density(4, rng);
        const DensityMatrix rho = random_density(4, rng);
        for (double time : {0.5, 1.0, 2.0}) {
            std::vector<double> ls;
            std::vector<double> errs;
            const std::string id = "pair-" + std::to_string(pair) + ";" + kv("t", time);
            for (int l = 8; l <= 512; l *= 2) {
                const double err = dme_evolve(a, rho, time, l).trace_error;
                t.note(id, "dme_trace_error", kv("l", Eigen::Index{l}), err);
                ls.push_back(l);
                errs.push_back(err);
            }
            const double slope = loglog_slope(ls, errs);
            t.record(id, "dme_step_slope_min", "", slope, -1.2, ">=");
            t.record(id, "dme_step_slope_max", "", slope, -0.8);
            slopes.push_back(slope);
        }
        std::vector<double> dts;
        std::vector<double> errs;
        const std::string id = "pair-" + std::to_string(pair) + ";single-step";
        for (double dt : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
            const double err = trace_norm(dme_step(a, rho, dt).matrix() - exact_conjugation(a, rho, dt).matrix());
            t.note(id, "single_step_error", kv("dt", dt), err);
            dts.push_back(dt);
            errs.push_back(err);
        }
        const double slope = loglog_slope(dts, errs);
        t.record(id, "single_step_slope_min", "", slope, 1.8, ">=");
        t.record(id, "single_step_slope_max", "", slope, 2.2);
    }
    summary["step_slopes"] = slopes;
}

// ---------------------------------------------------------------- inversion

void inversion_suite(CheckTable& t, json& summary, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x696e76, 0));
    for (int c = 0; c < 100; ++c) {
        const Eigen::Index m = uniform_int(rng, 2, 16);
        Eigen::VectorXd lambda(m);
        for (auto& l : lambda) l = uniform(rng, 0.05, 1.0);
        const Eigen::MatrixXd q = random_orthogonal(m, rng);
        const Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
        const Eigen::VectorXd y = random_vector(m, rng);
        const SolveReport rep = invert_ideal(a, y, {});
        const Eigen::VectorXd sol = a.ldlt().solve(y);
        const double kappa = lambda.maxCoeff() / lambda.minCoeff();
        const std::string id = "ideal-" + std::to_string(c);
        const std::string p = join({kv("m", m), kv("kappa", kappa)});
        t.record(id, "ideal_fidelity", p, rep.fidelity_vs_classical, 1.0 - 1e-10, ">=");
        t.record(id, "ideal_c_norm_rel_error", p, std::abs(rep.c_norm_est - sol.norm()) / sol.norm(), 1e-9);
        t.record(id, "ideal_post_select_floor", p, rep.post_select_prob, (1.0 - 1e-12) / (kappa * kappa), ">=");
    }

    // On-grid spectra: t0 = 8 pi puts the grid at multiples of 1/4.
    for (int c = 0; c < 20; ++c) {
        const Eigen::Index m = uniform_int(rng, 2, 6);
        Eigen::VectorXd lambda(m);
        for (auto& l : lambda) l = 0.25 * static_cast<double>(uniform_int(rng, 1, 7));
        const Eigen::MatrixXd q = random_orthogonal(m, rng);
        const Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
        const Eigen::VectorXd y = random_vector(m, rng);
        InversionConfig cfg;
        cfg.mode = InversionMode::Quantized;
        cfg.t0 = 8.0 * std::numbers::pi;
        cfg.clock_bits = 3;
        const SolveReport quant = invert_quantized(a, y, cfg);
        const SolveReport ideal = invert_ideal(a, y, {});
        const std::string id = "on-grid-" + std::to_string(c);
        const std::string p = kv("m", m);
        t.record(id, "quantized_on_grid_state", p, quant.deviation_from_ideal, 1e-10);
        t.record(id, "quantized_on_grid_c_norm", p, std::abs(quant.c_norm_est - ideal.c_norm_est) / ideal.c_norm_est,
                 1e-10);
    }

    // Generic spectra: error against t0 = 2 pi 2^j, averaged geometrically.
    constexpr int kInstances = 20;
    std::vector<double> t0s;
    std::vector<double> log_err_sum(7, 0.0);
    std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> systems;
    for (int c = 0; c < kInstances; ++c) {
        Eigen::VectorXd lambda(6);
        for (auto& l : lambda) l = uniform(rng, 0.2, 1.0);
        const Eigen::MatrixXd q = random_orthogonal(6, rng);
        systems.emplace_back(q * lambda.asDiagonal() * q.transpose(), random_vector(6, rng));
    }
    for (int j = 2; j <= 8; ++j) {
        const double t0 = 2.0 * std::numbers::pi * std::ldexp(1.0, j);
        t0s.push_back(t0);
        for (int c = 0; c < kInstances; ++c) {
            InversionConfig cfg;
            cfg.mode = InversionMode::Quantized;
            cfg.t0 = t0;
            cfg.clock_bits = 10;
            const double err = invert_quantized(systems[c].first, systems[c].second, cfg).deviation_from_ideal;
            t.note("generic-" + std::to_string(c), "quantized_generic_error", kv("t0", t0), err);
            log_err_sum[j - 2] += std::log(err) / kInstances;
        }
    }
    std::vector<double> mean_err;
    for (double s : log_err_sum) mean_err.push_back(std::exp(s));
    const double slope = loglog_slope(t0s, mean_err);
    t.record("generic", "quantized_generic_slope_min", kv("bits", Eigen::Index{10}), slope, -1.3, ">=");
    t.record("generic", "quantized_generic_slope_max", kv("bits", Eigen::Index{10}), slope, -0.7);
    summary["generic_slope"] = slope;
}

// ---------------------------------------------------------------- perturbation

void perturbation_suite(CheckTable& t, json& summary, std::uint64_t seed) {
    constexpr double kMaxKappa = 1e8;
    Rng rng(derive_seed(seed, 0x70657274, 0));
    for (int c = 0; c < 50; ++c) {
        // Redraw until the instance is well enough conditioned for double precision.
        Eigen::Index m = 0;
        Eigen::Index d = 0;
        double sigma = 0.0;
        std::optional<DataSet> drawn;
        Eigen::MatrixXd a;
        Spectrum s;
        do {
            m = uniform_int(rng, 3, 8);
            d = uniform_int(rng, 1, 2);
            sigma = uniform(rng, 0.3, 0.6);
            drawn.emplace(random_sites(rng, m, d));
            AssembleOptions opts;
            opts.normalized = true;
            a = assemble(*drawn, Kernel::gaussian_sigma(sigma), opts).to_dense();
            s = spectrum(a);
        } while (!(s.kappa <= kMaxKappa));
        const DataSet& data = *drawn;
        const double delta = 0.1 * s.min / (2.0 * static_cast<double>(d));
        const int order = min_order(data.sites().cwiseAbs().maxCoeff() / sigma, delta);
        const Eigen::MatrixXd a_hat = gram_coherent(data, sigma, order).matrix.to_dense();
        const Eigen::MatrixXd e = a_hat - a;

        const double eps_a = 2.0 * static_cast<double>(d) * delta;
        const double gamma = eps_a / s.min;
        const Eigen::VectorXd y = data.values() / static_cast<double>(m);
        const Eigen::VectorXd c_exact = a.ldlt().solve(y);
        const Eigen::VectorXd c_hat = a_hat.ldlt().solve(y);
        const double measured = (c_exact.normalized() - c_hat.normalized()).norm();
        const double bound = 2.0 * eps_a * s.kappa * s.kappa / ((1.0 - gamma) * s.max);

        const std::string id = "coherent-" + std::to_string(c);
        const std::string p = join({kv("m", m), kv("d", d), kv("N", Eigen::Index{order}), kv("kappa", s.kappa)});
        t.record(id, "matrix_error", p, e.norm(), eps_a);
        t.record(id, "state_chain", p, measured, bound);
        const PerturbationReport pr = perturbation_check(a, e);
        if (pr.inverse_branch) {
            t.record(id, "inverse_perturbation", p, pr.inverse_change, pr.inverse_bound + pr.inverse_slack);
        }
        t.record(id, "eigenvalue_shift", p, pr.max_eigen_shift, pr.e_norm + pr.eigen_slack);
        t.record(id, "perturbation_bounds", p, pr.holds() ? 1.0 : 0.0, 1.0, ">=");
    }
    // E = 0: every bound is met with equality at zero.
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4) * 0.25;
    const PerturbationReport zero = perturbation_check(a, Eigen::MatrixXd::Zero(4, 4));
    t.record("zero", "inverse_perturbation", "", zero.inverse_change, zero.inverse_bound);
    t.record("zero", "eigenvalue_shift", "", zero.max_eigen_shift, zero.e_norm);
    summary["instances"] = 50;
}

// ---------------------------------------------------------------- compact-oracle

void compact_suite(CheckTable& t, json& summary, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x636f6d70, 0));

    for (int c = 0; c < 10; ++c) {
        const Eigen::Index d = uniform_int(rng, 1, 3);
        const Eigen::Index m = uniform_int(rng, 10, 40);
        const DataSet data = random_sites(rng, m, d);
        CompactOracleConfig oc;
        oc.kernel = Kernel::wendland({3, 2}, 2.0 * data.median_nearest_neighbor());
        oc.normalized = true;
        oc.seed = seed;
        const CompactSolveReport rep = solve_compact(data, oc, {});
        const double scale = std::max(1.0, data.values().cwiseAbs().maxCoeff());
        const std::string id = "exact-" + std::to_string(c);
        const std::string p = join({kv("m", m), kv("d", d), kv("s", rep.sparsity)});
        t.record(id, "exact_oracle_fidelity", p, rep.fidelity_vs_classical, 1.0 - 1e-10, ">=");
        t.record(id, "exact_oracle_site_residual", p, rep.quantum_site_residual, 1e-9 * scale);
    }

    double max_dist_err = 0.0;
    double max_branch_err = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const Eigen::Index d = uniform_int(rng, 1, 5);
        Eigen::VectorXd xi(d);
        Eigen::VectorXd xj(d);
        for (auto& v : xi) v = uniform(rng, -1.0, 1.0);
        for (auto& v : xj) v = uniform(rng, -1.0, 1.0);
        const double scale = std::sqrt(2.0 * (xi.squaredNorm() + xj.squaredNorm()));
        const double a = distance_amplitude(xi, xj);
        max_dist_err = std::max(max_dist_err, std::abs(a * scale - (xi - xj).norm()));
        max_branch_err = std::max(max_branch_err, std::abs(zero_branch_amplitude(pair_state(xi, xj)) - a));
    }
    t.record("pairs-1000", "distance_amplitude", "", max_dist_err, 1e-12);
    t.record("pairs-1000", "pair_state_branch", "", max_branch_err, 1e-12);

    // Estimated-mode matrix error against 2^-bits, averaged over seeds.
    const DataSet data = random_sites(rng, 20, 2);
    const Kernel kernel = Kernel::wendland({3, 2}, 2.0 * data.median_nearest_neighbor());
    const InterpMatrix pattern = assemble(data, kernel);
    const Eigen::MatrixXd exact = pattern.to_dense();
    std::vector<double> steps;
    std::vector<double> errs;
    for (int bits = 4; bits <= 12; ++bits) {
        double total = 0.0;
        constexpr int kSeeds = 8;
        for (int s = 0; s < kSeeds; ++s) {
            CompactOracleConfig oc;
            oc.kernel = kernel;
            oc.ae_bits = bits;
            oc.seed = derive_seed(seed, static_cast<std::uint64_t>(bits), static_cast<std::uint64_t>(s));
            total += (oracle_matrix(data, pattern, oc) - exact).norm();
        }
        const double err = total / kSeeds;
        t.note("ae-scaling", "estimated_matrix_error", kv("bits", Eigen::Index{bits}), err);
        steps.push_back(std::ldexp(1.0, -bits));
        errs.push_back(err);
    }
    const double slope = loglog_slope(steps, errs);
    t.record("ae-scaling", "estimated_error_slope_min", "", slope, 0.7, ">=");
    t.record("ae-scaling", "estimated_error_slope_max", "", slope, 1.3);
    summary["ae_slope"] = slope;

    const WendlandSpec specs[] = {{1, 0}, {1, 2}, {1, 4}, {3, 0}, {3, 2}, {3, 4}, {3, 6}, {5, 0}, {5, 2}, {5, 4}};
    for (const auto& spec : specs) {
        const DataSet sites = random_sites(rng, 30, spec.dim);
        const Kernel w = Kernel::wendland(spec, 2.0 * sites.median_nearest_neighbor());
        AssembleOptions opts;
        opts.force_dense = true;
        const Spectrum s = spectrum(assemble(sites, w, opts));
        t.record("wendland-d" + std::to_string(spec.dim) + "-c" + std::to_string(spec.smoothness), "wendland_spd",
                 join({kv("m", Eigen::Index{30}), kv("alpha", w.support())}), s.min, 1e-12 * s.max, ">=");
    }
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"truncation",   "gram", "dme", "inversion", "perturbation",
                                                "compact-oracle"};
    return names;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed, const std::string& config_hash) {
    SuiteResult r{CheckTable(name, seed, config_hash), json::object()};
    if (name == "truncation") {
        truncation_suite(r.checks, r.summary);
    } else if (name == "gram") {
        gram_suite(r.checks, r.summary, seed);
    } else if (name == "dme") {
        dme_suite(r.checks, r.summary, seed);
    } else if (name == "inversion") {
        inversion_suite(r.checks, r.summary, seed);
    } else if (name == "perturbation") {
        perturbation_suite(r.checks, r.summary, seed);
    } else if (name == "compact-oracle") {
        compact_suite(r.checks, r.summary, seed);
    } else {
        throw InvalidArgument("unknown suite '" + name + "'");
    }
    r.summary["suite"] = name;
    r.summary["seed"] = seed;
    r.summary["config_hash"] = config_hash;
    r.summary["rows"] = r.checks.table().size();
    r.summary["failures"] = r.checks.failures();
    r.summary["pass"] = r.checks.all_pass();
    return r;
}

}  // namespace qrbf::harness
