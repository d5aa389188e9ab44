#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qrbf/dataset.hpp"
#include "qrbf/error.hpp"
#include "qrbf/harness/config.hpp"
#include "qrbf/harness/report.hpp"

namespace qrbf::harness {

/// A module error annotated with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct PipelineResult {
    CheckTable checks;
    CsvTable queries;       // per-query classical vs quantum readout
    CsvTable coefficients;  // classical (and quantum) coefficient vectors
    nlohmann::json summary;

    [[nodiscard]] bool all_pass() const { return checks.all_pass(); }
};

/// Runs the configured pipeline on `data` and reads it out at each row of
/// `queries`. The classical pipeline always runs alongside the quantum ones.
/// Stage failures are rethrown as Error with the stage name prefixed.
[[nodiscard]] PipelineResult run_pipeline(const ExperimentConfig& config, const DataSet& data,
                                          const Eigen::MatrixXd& queries);

/// Query points from config.queries (file or generated in the data box).
[[nodiscard]] Eigen::MatrixXd load_queries(const ExperimentConfig& config, Eigen::Index d);

/// Writes <prefix>checks.csv, <prefix>queries.csv, <prefix>coefficients.csv and
/// <prefix>summary.json into dir.
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir, const std::string& prefix);

/// Asymptotic cost expressions for the selected pipeline, for report headers.
[[nodiscard]] nlohmann::json runtime_context(Pipeline pipeline);

}  // namespace qrbf::harness
