#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qrbf/error.hpp"
#include "qrbf/harness/config.hpp"
#include "qrbf/harness/data_gen.hpp"
#include "qrbf/harness/pipeline.hpp"
#include "qrbf/harness/report.hpp"
#include "qrbf/harness/sweep.hpp"
#include "qrbf/harness/verify.hpp"

using namespace qrbf;
using namespace qrbf::harness;
using nlohmann::json;

namespace {

std::size_t column(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header().size(); ++i)
        if (t.header()[i] == name) return i;
    throw std::runtime_error("no column " + name);
}

ExperimentConfig small_config(Pipeline p, Eigen::Index m) {
    json doc = default_config_json();
    doc["seed"] = 11;
    doc["pipeline"] = std::string(to_string(p));
    doc["data"]["m"] = m;
    doc["queries"]["count"] = 10;
    return config_from_json(doc);
}

}  // namespace

TEST(Report, NumberFormatting) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(std::stod(format_number(M_PI)), M_PI);
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
    // FNV-1a 64 reference values.
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Report, CsvQuotingAndWidth) {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    t.add_row({"2", "say \"hi\""});
    EXPECT_EQ(t.str(), "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    EXPECT_THROW(t.add_row({"1"}), InvalidArgument);
}

TEST(Report, CheckTableCounts) {
    CheckTable c("demo", 5, "abc");
    EXPECT_TRUE(c.record("k1", "err", "", 0.5, 1.0));
    EXPECT_FALSE(c.record("k2", "err", "", 2.0, 1.0));
    EXPECT_TRUE(c.record("k3", "fid", "", 0.99, 0.9, ">="));
    EXPECT_FALSE(c.record("k4", "err", "", std::nan(""), 1.0));
    c.note("k5", "info", "", 42.0);
    EXPECT_EQ(c.failures(), 2u);
    EXPECT_EQ(c.count("err"), 3u);
    EXPECT_EQ(c.failures_of("err"), 2u);
    EXPECT_EQ(c.max_measured("er", true), 2.0);
    const auto& row = c.table().rows().front();
    EXPECT_EQ(row[column(c.table(), "seed")], "5");
    EXPECT_EQ(row[column(c.table(), "config_hash")], "abc");
}

TEST(Config, DefaultsAndOverrides) {
    json doc = default_config_json();
    apply_override(doc, "kernel.sigma=0.5");
    apply_override(doc, "pipeline=quantum-global");
    apply_override(doc, "budgets.eps_c=1e-3");
    const ExperimentConfig c = config_from_json(doc);
    EXPECT_EQ(*c.kernel.sigma, 0.5);
    EXPECT_EQ(c.pipeline, Pipeline::QuantumGlobal);
    EXPECT_EQ(c.budgets.eps_c, 1e-3);
    EXPECT_THROW(apply_override(doc, "novalue"), InvalidArgument);
    EXPECT_THROW((void)config_from_json(json{{"kernel", {{"sigmaa", 1}}}}), InvalidArgument);
    EXPECT_THROW((void)config_from_json(json{{"bogus", 1}}), InvalidArgument);
    EXPECT_THROW((void)config_from_json(json{{"pipeline", "hybrid"}}), InvalidArgument);
}

TEST(Config, ToleranceValidation) {
    for (const char* key : {"eps_E", "eps_c", "eps_F", "eps_p"}) {
        for (double bad : {0.0, 1.0, -0.1, 2.0}) {
            json doc = default_config_json();
            doc["budgets"][key] = bad;
            EXPECT_THROW((void)config_from_json(doc), InvalidArgument) << key << "=" << bad;
        }
    }
    json doc = default_config_json();
    doc["inversion"]["max_clock_bits"] = 13;
    EXPECT_THROW((void)config_from_json(doc), InvalidArgument);
}

TEST(Config, HashIsStable) {
    const ExperimentConfig a = config_from_json(default_config_json());
    ExperimentConfig b = config_from_json(a.to_json());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    b.output_dir = "elsewhere";
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = a.seed + 1;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, SeedFromEnvironment) {
    ::setenv("QRBF_SEED", "1234", 1);
    EXPECT_EQ(config_from_json(default_config_json()).seed, 1234u);
    EXPECT_EQ(config_from_json(load_config_json(std::nullopt, {"seed=9"})).seed, 9u);
    ::setenv("QRBF_SEED", "abc", 1);
    EXPECT_THROW((void)default_config_json(), InvalidArgument);
    ::unsetenv("QRBF_SEED");
    EXPECT_EQ(config_from_json(default_config_json()).seed, 0u);
}

TEST(Config, ConfigFileMergesUnderOverrides) {
    const auto path = std::filesystem::temp_directory_path() / "qrbf_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"data": {"m": 7}, "kernel": {"sigma": 0.4}})";
    }
    const ExperimentConfig c = config_from_json(load_config_json(path, {"kernel.sigma=0.6"}));
    EXPECT_EQ(c.data.m, 7);
    EXPECT_EQ(*c.kernel.sigma, 0.6);
    std::filesystem::remove(path);
}

TEST(DataGen, Targets) {
    const DataSet data = gen_data(10, 3, -1.0, 2.0, 4, Target::Constant);
    EXPECT_TRUE((data.values().array() == 1.0).all());
    EXPECT_GE(data.sites().minCoeff(), -1.0);
    EXPECT_LT(data.sites().maxCoeff(), 2.0);
    // Franke at the unit-square point (0, 0).
    const double u = 0.0, v = 0.0;
    const double franke = 0.75 * std::exp(-std::pow(9 * u - 2, 2) / 4 - std::pow(9 * v - 2, 2) / 4) +
                          0.75 * std::exp(-std::pow(9 * u + 1, 2) / 49 - (9 * v + 1) / 10) +
                          0.5 * std::exp(-(std::pow(9 * u - 7, 2) + std::pow(9 * v - 3, 2)) / 4) -
                          0.2 * std::exp(-std::pow(9 * u - 4, 2) - std::pow(9 * v - 7, 2));
    EXPECT_NEAR(target_value(Target::Franke, Eigen::Vector2d(0, 0), 0, 1), franke, 1e-15);
    EXPECT_NEAR(target_value(Target::Cosines, Eigen::Vector2d(0.25, 0.0), 0, 1), 0.0, 1e-15);
}

TEST(DataGen, DeterministicAndDistinct) {
    const DataSet a = gen_data(100, 2, 0, 1, 77, Target::Franke);
    const DataSet b = gen_data(100, 2, 0, 1, 77, Target::Franke);
    EXPECT_EQ(a.sites(), b.sites());
    std::set<std::pair<double, double>> rows;
    for (Eigen::Index i = 0; i < 100; ++i) rows.insert({a.sites()(i, 0), a.sites()(i, 1)});
    EXPECT_EQ(rows.size(), 100u);
    EXPECT_NE(gen_data(100, 2, 0, 1, 78, Target::Franke).sites(), a.sites());
    EXPECT_THROW((void)gen_data(3, 1, 1.0, std::nextafter(1.0, 2.0), 0, Target::Constant), InvalidArgument);
}

TEST(Pipeline, Classical) {
    const ExperimentConfig cfg = small_config(Pipeline::Classical, 12);
    const DataSet data = gen_data(cfg.data, cfg.seed);
    const PipelineResult r = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    EXPECT_TRUE(r.all_pass());
    EXPECT_EQ(r.queries.size(), 10u);
    EXPECT_EQ(r.summary["pipeline"], "classical");
    const Kernel k = make_kernel(cfg.kernel, data.median_nearest_neighbor());
    const Coefficients c = solve(assemble(data, k), data.values());
    const auto& row = r.queries.rows()[3];
    const Eigen::MatrixXd q = load_queries(cfg, 2);
    EXPECT_NEAR(std::stod(row[column(r.queries, "f_classical")]), evaluate(c, data, k, q.row(3).transpose()), 1e-12);
}

TEST(Pipeline, QuantumGlobalWithinBudget) {
    const ExperimentConfig cfg = small_config(Pipeline::QuantumGlobal, 8);
    const DataSet data = gen_data(cfg.data, cfg.seed);
    const PipelineResult r = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    EXPECT_TRUE(r.all_pass()) << r.checks.table().str();
    EXPECT_EQ(r.checks.count("readout_error"), 10u);
    EXPECT_GE(r.checks.count("gram_frobenius"), 1u);
}

TEST(Pipeline, QuantumGlobalTwoSites) {
    ExperimentConfig cfg = small_config(Pipeline::QuantumGlobal, 2);
    cfg.kernel.sigma = 1.0;
    const DataSet data = gen_data(cfg.data, cfg.seed);
    const PipelineResult r = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    // Exact overlap readout; the sampled swap test only has to meet its own budget.
    const std::size_t fn = column(r.queries, "f_noiseless"), fc = column(r.queries, "f_classical");
    for (const auto& row : r.queries.rows()) EXPECT_NEAR(std::stod(row[fn]), std::stod(row[fc]), 2e-2);
    EXPECT_EQ(r.checks.failures_of("readout_error"), 0u);
}

TEST(Pipeline, CompactExactReadout) {
    ExperimentConfig cfg = small_config(Pipeline::QuantumCompact, 20);
    cfg.kernel.family = KernelFamily::Wendland;
    const DataSet data = gen_data(cfg.data, cfg.seed);
    const PipelineResult r = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    EXPECT_TRUE(r.all_pass()) << r.checks.table().str();
    EXPECT_EQ(r.checks.failures_of("noiseless_readout"), 0u);
    EXPECT_GE(r.checks.count("noiseless_readout"), 1u);
}

TEST(Pipeline, StageErrorsCarryStage) {
    ExperimentConfig cfg = small_config(Pipeline::QuantumGlobal, 6);
    cfg.inversion.mode = InversionMode::Quantized;
    cfg.inversion.clock_bits = 1;
    const DataSet data = gen_data(cfg.data, cfg.seed);
    try {
        (void)run_pipeline(cfg, data, load_queries(cfg, data.dim()));
        FAIL() << "expected a stage error";
    } catch (const StageError& e) {
        EXPECT_FALSE(e.stage().empty());
    }
}

TEST(Pipeline, OutputsAreDeterministic) {
    const ExperimentConfig cfg = small_config(Pipeline::QuantumGlobal, 6);
    const DataSet data = gen_data(cfg.data, cfg.seed);
    const PipelineResult a = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    const PipelineResult b = run_pipeline(cfg, data, load_queries(cfg, data.dim()));
    EXPECT_EQ(a.queries.str(), b.queries.str());
    EXPECT_EQ(a.checks.table().str(), b.checks.table().str());
    EXPECT_EQ(a.summary.dump(), b.summary.dump());
}

TEST(Sweep, RowsInValueOrder) {
    json base = default_config_json();
    base["data"]["m"] = 6;
    base["queries"]["count"] = 4;
    const SweepResult r = run_sweep(base, "kernel.sigma", {"0.2", "0.4", "0.8"}, 2);
    ASSERT_EQ(r.table.size(), 3u);
    const std::size_t v = column(r.table, "value");
    EXPECT_EQ(r.table.rows()[0][v], "0.2");
    EXPECT_EQ(r.table.rows()[2][v], "0.8");
    EXPECT_TRUE(r.all_pass);
    const SweepResult again = run_sweep(base, "kernel.sigma", {"0.2", "0.4", "0.8"}, 1);
    EXPECT_EQ(r.table.str(), again.table.str());
    const SweepResult bad = run_sweep(base, "kernel.sigma", {"-1"}, 1);
    EXPECT_FALSE(bad.all_pass);
}

TEST(Verify, SuiteNamesAndSlope) {
    EXPECT_EQ(suite_names().size(), 6u);
    EXPECT_THROW((void)run_suite("nope", 0, "h"), InvalidArgument);
    EXPECT_NEAR(loglog_slope({1, 10, 100}, {3, 0.3, 0.03}), -1.0, 1e-12);
    EXPECT_NEAR(loglog_slope({1, 2, 4}, {1, 4, 16}), 2.0, 1e-12);
}
