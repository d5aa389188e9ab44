#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrbf/compact.hpp"
#include "qrbf/kernels.hpp"
#include "qrbf/qinvert.hpp"

namespace qrbf::harness {

enum class Pipeline { Classical, QuantumGlobal, QuantumCompact };

[[nodiscard]] std::string_view to_string(Pipeline p);
[[nodiscard]] Pipeline pipeline_from_string(std::string_view name);

enum class Target { Franke, Cosines, Constant };

[[nodiscard]] std::string_view to_string(Target t);
[[nodiscard]] Target target_from_string(std::string_view name);

struct DataSpec {
    std::string file;  // non-empty: read sites from this CSV instead of generating
    Eigen::Index m = 20;
    Eigen::Index d = 2;
    double box_lo = 0.0;
    double box_hi = 1.0;
    Target target = Target::Franke;
};

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    /// Gaussian width; when set it takes precedence over eta for the Gaussian.
    std::optional<double> sigma = 0.3;
    double eta = 1.0;
    WendlandSpec wendland{};
    /// Wendland support radius; <= 0 selects twice the median nearest-neighbor distance.
    double alpha = 0.0;
    bool allow_non_pd = false;
};

/// Error budgets: eps_A (matrix), eps_E (exponentiation), eps_c (state), eps_F
/// (normalization factor), eps_p (swap-test probability).
struct Budgets {
    std::optional<double> eps_A;  // unset: eps_c / kappa^2
    double eps_E = 1e-2;
    double eps_c = 1e-2;
    double eps_F = 1e-2;
    double eps_p = 1e-2;

    /// min(eps_E, eps_c)
    [[nodiscard]] double overall() const;
};

struct InversionSpec {
    InversionMode mode = InversionMode::Ideal;
    double t0 = 0.0;        // <= 0: 1 / (lambda_min eps_c)
    int clock_bits = 0;     // <= 0: smallest width that avoids wraparound
    int max_clock_bits = 10;
    double rotation_constant = 0.0;
    std::optional<double> delta_eff;
    std::int64_t samples_F = 0;  // <= 0: sized from eps_F and the kappa^-2 floor on p
    std::int64_t samples_p = 0;  // <= 0: ceil(1 / eps_p^2)
};

struct CoherentSpec {
    int order = 0;  // <= 0: min_order(max |x_k| / sigma, eps_A / (2 d))
    Eigen::Index density_cap = 4096;
};

struct DmeSpec {
    bool enabled = true;
    double t = 1.0;
    int steps = 0;  // <= 0: ceil(t^2 / eps_E)
    Eigen::Index max_dim = 12;
};

struct CompactSpec {
    std::optional<int> ae_bits;
    double c_hat = 0.0;
    bool normalized = true;
};

struct QuerySpec {
    std::string file;
    Eigen::Index count = 20;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    DataSpec data;
    KernelSpec kernel;
    Pipeline pipeline = Pipeline::Classical;
    Budgets budgets;
    InversionSpec inversion;
    CoherentSpec coherent;
    DmeSpec dme;
    CompactSpec compact;
    QuerySpec queries;
    std::string output_dir = "qrbf-out";

    /// Throws InvalidArgument on out-of-range fields (tolerances outside (0, 1), ...).
    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    /// FNV-1a 64 of the canonical JSON dump.
    [[nodiscard]] std::string hash() const;
};

/// Defaults, with the seed taken from QRBF_SEED when that variable is set.
[[nodiscard]] nlohmann::json default_config_json();

/// Parses a full or partial JSON document merged over the defaults. Unknown keys throw.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Applies "a.b.c=value" overrides to a JSON document. The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Reads an optional config file, merges it over the defaults, then applies overrides.
[[nodiscard]] nlohmann::json load_config_json(const std::optional<std::filesystem::path>& file,
                                              const std::vector<std::string>& overrides);

/// The kernel described by a spec; Wendland alpha <= 0 is resolved against `data_nn`
/// (the median nearest-neighbor distance of the sites).
[[nodiscard]] Kernel make_kernel(const KernelSpec& spec, double data_nn);

}  // namespace qrbf::harness
