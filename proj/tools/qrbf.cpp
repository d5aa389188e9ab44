// qrbf: data generation, fitting, evaluation and bound verification.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qrbf/error.hpp"
#include "qrbf/harness/config.hpp"
#include "qrbf/harness/data_gen.hpp"
#include "qrbf/harness/pipeline.hpp"
#include "qrbf/harness/sweep.hpp"
#include "qrbf/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace qrbf;
using namespace qrbf::harness;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

struct CommonOptions {
    std::optional<std::string> config_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config_file, "JSON config file")->check(CLI::ExistingFile);
        app->add_option("--set", overrides, "Override a config field, e.g. --set kernel.sigma=0.5");
        app->add_option("--seed", seed, "Seed (default: config, then QRBF_SEED, then 0)");
        app->add_option("-o,--out-dir", out_dir, "Output directory");
    }

    // Config file, then --set, then the dedicated flags passed in `extra`.
    nlohmann::json resolve(std::vector<std::string> extra = {}) const {
        std::vector<std::string> all = overrides;
        if (seed) all.push_back("seed=" + std::to_string(*seed));
        if (out_dir) all.push_back("output_dir=" + nlohmann::json(*out_dir).dump());
        all.insert(all.end(), extra.begin(), extra.end());
        std::optional<fs::path> file;
        if (config_file) file = fs::path(*config_file);
        return load_config_json(file, all);
    }
};

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

int report(bool pass, const std::string& what, std::size_t failures) {
    if (pass) {
        std::cout << what << ": all checks passed\n";
        return 0;
    }
    std::cout << what << ": " << failures << " check(s) failed\n";
    return kExitChecksFailed;
}

int run_fit(const CommonOptions& common, const std::vector<std::string>& extra, const std::string& prefix) {
    const ExperimentConfig config = config_from_json(common.resolve(extra));
    const DataSet data = load_or_generate(config.data, config.seed);
    const PipelineResult result = run_pipeline(config, data, load_queries(config, data.dim()));
    write_pipeline_outputs(result, config.output_dir, prefix);
    std::cout << "wrote " << (fs::path(config.output_dir) / (prefix + "summary.json")).string() << '\n';
    return report(result.all_pass(), std::string(to_string(config.pipeline)), result.checks.failures());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial basis function interpolation: classical and simulated quantum pipelines"};
    app.require_subcommand(1);

    // gen-data
    CommonOptions gen_opts;
    std::string gen_out;
    std::optional<Eigen::Index> gen_m, gen_d;
    std::optional<std::string> gen_target;
    auto* gen = app.add_subcommand("gen-data", "Generate a scattered dataset as CSV");
    gen_opts.attach(gen);
    gen->add_option("--out", gen_out, "Dataset CSV path")->required();
    gen->add_option("-m,--sites", gen_m, "Number of sites");
    gen->add_option("-d,--dim", gen_d, "Space dimension");
    gen->add_option("--target", gen_target, "Target function")->check(CLI::IsMember({"franke", "cosines", "constant"}));

    // fit / evaluate
    CommonOptions fit_opts;
    std::optional<std::string> fit_pipeline, fit_data;
    auto* fit = app.add_subcommand("fit", "Fit the interpolant and compare pipelines at query points");
    fit_opts.attach(fit);
    fit->add_option("--pipeline", fit_pipeline, "classical | quantum-global | quantum-compact")
        ->check(CLI::IsMember({"classical", "quantum-global", "quantum-compact"}));
    fit->add_option("--data", fit_data, "Dataset CSV (default: generate from the config)")->check(CLI::ExistingFile);

    CommonOptions eval_opts;
    std::optional<std::string> eval_pipeline, eval_data;
    std::string eval_queries;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate the fitted interpolant at points from a CSV file");
    eval_opts.attach(evaluate);
    evaluate->add_option("--pipeline", eval_pipeline, "classical | quantum-global | quantum-compact")
        ->check(CLI::IsMember({"classical", "quantum-global", "quantum-compact"}));
    evaluate->add_option("--data", eval_data, "Dataset CSV (default: generate from the config)")->check(CLI::ExistingFile);
    evaluate->add_option("--query-file", eval_queries, "Query points CSV (x1,...,xd)")
        ->required()
        ->check(CLI::ExistingFile);

    // verify-bounds
    CommonOptions verify_opts;
    std::string suite;
    auto* verify = app.add_subcommand("verify-bounds", "Run an invariant sweep and write pass/fail rows");
    verify_opts.attach(verify);
    std::vector<std::string> suite_choices = suite_names();
    suite_choices.push_back("all");
    verify->add_option("--suite", suite, "Suite name or 'all'")->required()->check(CLI::IsMember(suite_choices));

    // sweep
    CommonOptions sweep_opts;
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    unsigned sweep_threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Run the pipeline over a list of values for one config field");
    sweep_opts.attach(sweep);
    sweep->add_option("--param", sweep_param, "Dotted config path, e.g. kernel.sigma")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--threads", sweep_threads, "Worker threads (0: hardware concurrency)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            std::vector<std::string> extra;
            if (gen_m) extra.push_back("data.m=" + std::to_string(*gen_m));
            if (gen_d) extra.push_back("data.d=" + std::to_string(*gen_d));
            if (gen_target) extra.push_back("data.target=" + json_string(*gen_target));
            const ExperimentConfig config = config_from_json(gen_opts.resolve(extra));
            const DataSet data = gen_data(config.data, config.seed);
            if (fs::path(gen_out).has_parent_path()) fs::create_directories(fs::path(gen_out).parent_path());
            write_dataset_csv(fs::path(gen_out), data);
            fs::path summary_path = fs::path(gen_out);
            summary_path.replace_extension(".summary.json");
            write_json(summary_path, {{"command", "gen-data"},
                                      {"seed", config.seed},
                                      {"config_hash", config.hash()},
                                      {"m", data.size()},
                                      {"d", data.dim()},
                                      {"target", to_string(config.data.target)},
                                      {"min_separation", data.min_separation()}});
            std::cout << "wrote " << gen_out << " (" << data.size() << " sites)\n";
            return 0;
        }
        if (*fit) {
            std::vector<std::string> extra;
            if (fit_pipeline) extra.push_back("pipeline=" + json_string(*fit_pipeline));
            if (fit_data) extra.push_back("data.file=" + json_string(*fit_data));
            return run_fit(fit_opts, extra, "fit_");
        }
        if (*evaluate) {
            std::vector<std::string> extra{"queries.file=" + json_string(eval_queries)};
            if (eval_pipeline) extra.push_back("pipeline=" + json_string(*eval_pipeline));
            if (eval_data) extra.push_back("data.file=" + json_string(*eval_data));
            return run_fit(eval_opts, extra, "evaluate_");
        }
        if (*verify) {
            const ExperimentConfig config = config_from_json(verify_opts.resolve());
            const std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
            bool pass = true;
            std::size_t failures = 0;
            for (const auto& name : names) {
                const SuiteResult r = run_suite(name, config.seed, config.hash());
                const fs::path dir(config.output_dir);
                r.checks.table().write(dir / ("verify_" + name + ".csv"));
                write_json(dir / ("verify_" + name + ".json"), r.summary);
                std::cout << name << ": " << r.checks.table().size() << " rows, " << r.checks.failures()
                          << " failed\n";
                pass = pass && r.all_pass();
                failures += r.checks.failures();
            }
            return report(pass, "verify-bounds", failures);
        }
        if (*sweep) {
            const nlohmann::json base = sweep_opts.resolve();
            const ExperimentConfig config = config_from_json(base);
            const SweepResult r = run_sweep(base, sweep_param, sweep_values, sweep_threads);
            const fs::path dir(config.output_dir);
            r.table.write(dir / "sweep.csv");
            write_json(dir / "sweep.json", {{"command", "sweep"},
                                            {"param", sweep_param},
                                            {"values", sweep_values},
                                            {"seed", config.seed},
                                            {"config_hash", config.hash()},
                                            {"pass", r.all_pass}});
            std::size_t failed = 0;
            for (const auto& row : r.table.rows()) failed += row[7] == "pass" ? 0 : 1;
            return report(r.all_pass, "sweep", failed);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
