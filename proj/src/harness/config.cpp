#include "qrbf/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "qrbf/error.hpp"
#include "qrbf/harness/report.hpp"

namespace qrbf::harness {

using nlohmann::json;

namespace {

// Recursively overlays `patch` onto `base`; keys absent from the defaults are rejected.
void overlay(json& base, const json& patch, const std::string& path) {
    if (!patch.is_object()) throw InvalidArgument("config: " + (path.empty() ? "document" : path) + " must be an object");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw InvalidArgument("config: unknown key " + key);
        json& slot = base[it.key()];
        if (slot.is_object()) {
            overlay(slot, it.value(), key);
        } else {
            slot = it.value();
        }
    }
}

template <typename T>
std::optional<T> opt(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

template <typename T>
json from_opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string_view mode_name(InversionMode mode) { return mode == InversionMode::Ideal ? "ideal" : "quantized"; }

InversionMode mode_from_string(const std::string& name) {
    if (name == "ideal") return InversionMode::Ideal;
    if (name == "quantized") return InversionMode::Quantized;
    throw InvalidArgument("config: unknown inversion mode '" + name + "'");
}

void require_tolerance(const char* name, double v) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string("config: ") + name + " must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(Pipeline p) {
    switch (p) {
        case Pipeline::Classical: return "classical";
        case Pipeline::QuantumGlobal: return "quantum-global";
        case Pipeline::QuantumCompact: return "quantum-compact";
    }
    return "?";
}

Pipeline pipeline_from_string(std::string_view name) {
    if (name == "classical") return Pipeline::Classical;
    if (name == "quantum-global") return Pipeline::QuantumGlobal;
    if (name == "quantum-compact") return Pipeline::QuantumCompact;
    throw InvalidArgument("unknown pipeline '" + std::string(name) + "'");
}

std::string_view to_string(Target t) {
    switch (t) {
        case Target::Franke: return "franke";
        case Target::Cosines: return "cosines";
        case Target::Constant: return "constant";
    }
    return "?";
}

Target target_from_string(std::string_view name) {
    if (name == "franke") return Target::Franke;
    if (name == "cosines") return Target::Cosines;
    if (name == "constant") return Target::Constant;
    throw InvalidArgument("unknown target function '" + std::string(name) + "'");
}

double Budgets::overall() const { return std::min(eps_E, eps_c); }

void ExperimentConfig::validate() const {
    if (data.m < 1 || data.d < 1) throw InvalidArgument("config: data.m and data.d must be >= 1");
    if (!(data.box_hi > data.box_lo)) throw InvalidArgument("config: data.box_hi must exceed data.box_lo");
    if (kernel.sigma && !(*kernel.sigma > 0.0)) throw InvalidArgument("config: kernel.sigma must be positive");
    if (!(kernel.eta > 0.0)) throw InvalidArgument("config: kernel.eta must be positive");
    if (budgets.eps_A) require_tolerance("budgets.eps_A", *budgets.eps_A);
    require_tolerance("budgets.eps_E", budgets.eps_E);
    require_tolerance("budgets.eps_c", budgets.eps_c);
    require_tolerance("budgets.eps_F", budgets.eps_F);
    require_tolerance("budgets.eps_p", budgets.eps_p);
    if (inversion.max_clock_bits < 1 || inversion.max_clock_bits > 12) {
        throw InvalidArgument("config: inversion.max_clock_bits must lie in [1, 12]");
    }
    if (coherent.density_cap < 1) throw InvalidArgument("config: coherent.density_cap must be >= 1");
    if (dme.enabled && !(dme.t > 0.0)) throw InvalidArgument("config: dme.t must be positive");
    if (compact.ae_bits && (*compact.ae_bits < 1 || *compact.ae_bits > 30)) {
        throw InvalidArgument("config: compact.ae_bits must lie in [1, 30]");
    }
    if (queries.count < 0) throw InvalidArgument("config: queries.count must be >= 0");
}

json ExperimentConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["data"] = {{"file", data.file}, {"m", data.m},           {"d", data.d},
                 {"box_lo", data.box_lo}, {"box_hi", data.box_hi}, {"target", std::string(harness::to_string(data.target))}};
    j["kernel"] = {{"family", std::string(qrbf::to_string(kernel.family))},
                   {"sigma", from_opt(kernel.sigma)},
                   {"eta", kernel.eta},
                   {"wendland_dim", kernel.wendland.dim},
                   {"wendland_smoothness", kernel.wendland.smoothness},
                   {"alpha", kernel.alpha},
                   {"allow_non_pd", kernel.allow_non_pd}};
    j["pipeline"] = std::string(harness::to_string(pipeline));
    j["budgets"] = {{"eps_A", from_opt(budgets.eps_A)}, {"eps_E", budgets.eps_E}, {"eps_c", budgets.eps_c},
                    {"eps_F", budgets.eps_F},           {"eps_p", budgets.eps_p}};
    j["inversion"] = {{"mode", std::string(mode_name(inversion.mode))},
                      {"t0", inversion.t0},
                      {"clock_bits", inversion.clock_bits},
                      {"max_clock_bits", inversion.max_clock_bits},
                      {"rotation_constant", inversion.rotation_constant},
                      {"delta_eff", from_opt(inversion.delta_eff)},
                      {"samples_F", inversion.samples_F},
                      {"samples_p", inversion.samples_p}};
    j["coherent"] = {{"order", coherent.order}, {"density_cap", coherent.density_cap}};
    j["dme"] = {{"enabled", dme.enabled}, {"t", dme.t}, {"steps", dme.steps}, {"max_dim", dme.max_dim}};
    j["compact"] = {{"ae_bits", from_opt(compact.ae_bits)}, {"c_hat", compact.c_hat}, {"normalized", compact.normalized}};
    j["queries"] = {{"file", queries.file}, {"count", queries.count}};
    j["output_dir"] = output_dir;
    return j;
}

std::string ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("output_dir");  // where results go does not change them
    return fnv1a_hex(j.dump());
}

json default_config_json() {
    ExperimentConfig defaults;
    if (const char* env = std::getenv("QRBF_SEED"); env != nullptr && *env != '\0') {
        try {
            defaults.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidArgument(std::string("QRBF_SEED is not an unsigned integer: ") + env);
        }
    }
    return defaults.to_json();
}

ExperimentConfig config_from_json(const json& doc) {
    json j = default_config_json();
    overlay(j, doc, "");
    ExperimentConfig c;
    try {
        c.seed = j.at("seed").get<std::uint64_t>();
        const json& d = j.at("data");
        c.data.file = d.at("file").get<std::string>();
        c.data.m = d.at("m").get<Eigen::Index>();
        c.data.d = d.at("d").get<Eigen::Index>();
        c.data.box_lo = d.at("box_lo").get<double>();
        c.data.box_hi = d.at("box_hi").get<double>();
        c.data.target = target_from_string(d.at("target").get<std::string>());

        const json& k = j.at("kernel");
        c.kernel.family = family_from_string(k.at("family").get<std::string>());
        c.kernel.sigma = opt<double>(k.at("sigma"));
        c.kernel.eta = k.at("eta").get<double>();
        c.kernel.wendland = {k.at("wendland_dim").get<int>(), k.at("wendland_smoothness").get<int>()};
        c.kernel.alpha = k.at("alpha").get<double>();
        c.kernel.allow_non_pd = k.at("allow_non_pd").get<bool>();

        c.pipeline = pipeline_from_string(j.at("pipeline").get<std::string>());

        const json& b = j.at("budgets");
        c.budgets.eps_A = opt<double>(b.at("eps_A"));
        c.budgets.eps_E = b.at("eps_E").get<double>();
        c.budgets.eps_c = b.at("eps_c").get<double>();
        c.budgets.eps_F = b.at("eps_F").get<double>();
        c.budgets.eps_p = b.at("eps_p").get<double>();

        const json& inv = j.at("inversion");
        c.inversion.mode = mode_from_string(inv.at("mode").get<std::string>());
        c.inversion.t0 = inv.at("t0").get<double>();
        c.inversion.clock_bits = inv.at("clock_bits").get<int>();
        c.inversion.max_clock_bits = inv.at("max_clock_bits").get<int>();
        c.inversion.rotation_constant = inv.at("rotation_constant").get<double>();
        c.inversion.delta_eff = opt<double>(inv.at("delta_eff"));
        c.inversion.samples_F = inv.at("samples_F").get<std::int64_t>();
        c.inversion.samples_p = inv.at("samples_p").get<std::int64_t>();

        c.coherent.order = j.at("coherent").at("order").get<int>();
        c.coherent.density_cap = j.at("coherent").at("density_cap").get<Eigen::Index>();

        const json& dm = j.at("dme");
        c.dme.enabled = dm.at("enabled").get<bool>();
        c.dme.t = dm.at("t").get<double>();
        c.dme.steps = dm.at("steps").get<int>();
        c.dme.max_dim = dm.at("max_dim").get<Eigen::Index>();

        const json& cp = j.at("compact");
        c.compact.ae_bits = opt<int>(cp.at("ae_bits"));
        c.compact.c_hat = cp.at("c_hat").get<double>();
        c.compact.normalized = cp.at("normalized").get<bool>();

        c.queries.file = j.at("queries").at("file").get<std::string>();
        c.queries.count = j.at("queries").at("count").get<Eigen::Index>();
        c.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* slot = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw InvalidArgument("override has an empty key: " + assignment);
        if (!slot->is_object()) *slot = json::object();
        slot = &(*slot)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *slot = value;
}

json load_config_json(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (file) {
        std::ifstream in(*file);
        if (!in) throw InvalidArgument("cannot open config file " + file->string());
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InvalidArgument("config file " + file->string() + ": " + e.what());
        }
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

Kernel make_kernel(const KernelSpec& spec, double data_nn) {
    switch (spec.family) {
        case KernelFamily::Gaussian:
            return spec.sigma ? Kernel::gaussian_sigma(*spec.sigma) : Kernel::gaussian_eta(spec.eta);
        case KernelFamily::Multiquadric: return Kernel::multiquadric(spec.eta);
        case KernelFamily::InverseMultiquadric: return Kernel::inverse_multiquadric(spec.eta);
        case KernelFamily::MaternC0: return Kernel::matern_c0(spec.eta);
        case KernelFamily::MaternC2: return Kernel::matern_c2(spec.eta);
        case KernelFamily::MaternC4: return Kernel::matern_c4(spec.eta);
        case KernelFamily::Wendland: {
            double alpha = spec.alpha;
            if (!(alpha > 0.0)) {
                if (!std::isfinite(data_nn) || !(data_nn > 0.0)) {
                    throw InvalidArgument("kernel.alpha must be set when the sites have no nearest neighbor");
                }
                alpha = 2.0 * data_nn;
            }
            return Kernel::wendland(spec.wendland, alpha);
        }
    }
    throw InvalidArgument("unknown kernel family");
}

}  // namespace qrbf::harness
