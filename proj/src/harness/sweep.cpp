#include "qrbf/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "qrbf/error.hpp"
#include "qrbf/harness/config.hpp"
#include "qrbf/harness/data_gen.hpp"
#include "qrbf/harness/pipeline.hpp"

namespace qrbf::harness {

namespace {

std::vector<std::string> run_cell(const nlohmann::json& base, const std::string& param, const std::string& value,
                                  std::size_t index) {
    nlohmann::json doc = base;
    std::vector<std::string> row{std::to_string(index), param, value};
    std::string seed = "";
    std::string hash = "";
    try {
        apply_override(doc, param + "=" + value);
        const ExperimentConfig config = config_from_json(doc);
        seed = std::to_string(config.seed);
        hash = config.hash();
        const DataSet data = load_or_generate(config.data, config.seed);
        const PipelineResult r = run_pipeline(config, data, load_queries(config, data.dim()));
        const auto& s = r.summary;
        const auto& q = s["queries"]["max_abs_error"];
        row.insert(row.end(), {std::string(to_string(config.pipeline)), format_number(s["classical"]["site_residual"].get<double>()),
                               q.is_null() ? "" : format_number(q.get<double>()),
                               std::to_string(r.checks.failures()), r.all_pass() ? "pass" : "fail", seed, hash, ""});
    } catch (const std::exception& e) {
        row.insert(row.end(), {"", "", "", "", "fail", seed, hash, e.what()});
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const nlohmann::json& base, const std::string& param, const std::vector<std::string>& values,
                      unsigned threads) {
    if (param.empty()) throw InvalidArgument("sweep: parameter path is empty");
    if (values.empty()) throw InvalidArgument("sweep: no values given");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));

    // Cells are claimed from a shared counter; each writes only its own slot.
    std::vector<std::vector<std::string>> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) rows[i] = run_cell(base, param, values[i], i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SweepResult out{CsvTable({"cell", "param", "value", "pipeline", "site_residual", "max_abs_error", "failures", "pass",
                              "seed", "config_hash", "error"})};
    for (auto& r : rows) {
        if (r[7] != "pass") out.all_pass = false;
        out.table.add_row(std::move(r));
    }
    return out;
}

}  // namespace qrbf::harness
