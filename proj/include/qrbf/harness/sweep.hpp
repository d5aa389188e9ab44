#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qrbf/harness/report.hpp"

namespace qrbf::harness {

struct SweepResult {
    CsvTable table;
    bool all_pass = true;
};

/// Runs the pipeline once per value of `param` (a dotted config path). Cells run
/// on up to `threads` workers; rows are assembled in value order.
[[nodiscard]] SweepResult run_sweep(const nlohmann::json& base, const std::string& param,
                                    const std::vector<std::string>& values, unsigned threads = 0);

}  // namespace qrbf::harness
