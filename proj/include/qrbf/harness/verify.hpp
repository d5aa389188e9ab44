#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrbf/harness/report.hpp"

namespace qrbf::harness {

[[nodiscard]] const std::vector<std::string>& suite_names();

struct SuiteResult {
    CheckTable checks;
    nlohmann::json summary;

    [[nodiscard]] bool all_pass() const { return checks.all_pass(); }
};

/// Runs one invariant sweep: truncation, gram, dme, inversion, perturbation or
/// compact-oracle. Throws InvalidArgument for other names.
[[nodiscard]] SuiteResult run_suite(const std::string& name, std::uint64_t seed, const std::string& config_hash);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qrbf::harness
