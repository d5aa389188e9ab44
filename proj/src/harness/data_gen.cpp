#include "qrbf/harness/data_gen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "qrbf/compact.hpp"
#include "qrbf/error.hpp"

namespace qrbf::harness {

namespace {

constexpr std::uint64_t kQueryStream = 0x5175657279ULL;

double franke(double u, double v) {
    const double a = 0.75 * std::exp(-(std::pow(9 * u - 2, 2) + std::pow(9 * v - 2, 2)) / 4);
    const double b = 0.75 * std::exp(-std::pow(9 * u + 1, 2) / 49 - (9 * v + 1) / 10);
    const double c = 0.5 * std::exp(-(std::pow(9 * u - 7, 2) + std::pow(9 * v - 3, 2)) / 4);
    const double e = 0.2 * std::exp(-std::pow(9 * u - 4, 2) - std::pow(9 * v - 7, 2));
    return a + b + c - e;
}

Eigen::MatrixXd uniform_rows(Eigen::Index n, Eigen::Index d, double lo, double hi, std::mt19937_64& rng,
                             bool distinct) {
    std::uniform_real_distribution<double> coord(lo, hi);
    Eigen::MatrixXd rows(n, d);
    std::set<std::vector<double>> seen;
    const Eigen::Index max_attempts = 100 * n + 1000;
    Eigen::Index filled = 0;
    for (Eigen::Index attempt = 0; filled < n; ++attempt) {
        if (attempt >= max_attempts) {
            throw InvalidArgument("gen_data: could not draw " + std::to_string(n) +
                                  " distinct points; the box is too small");
        }
        std::vector<double> p(static_cast<std::size_t>(d));
        for (auto& v : p) v = coord(rng);
        if (distinct && !seen.insert(p).second) continue;
        for (Eigen::Index k = 0; k < d; ++k) rows(filled, k) = p[static_cast<std::size_t>(k)];
        ++filled;
    }
    return rows;
}

}  // namespace

double target_value(Target target, const Eigen::VectorXd& x, double lo, double hi) {
    const Eigen::VectorXd u = (x.array() - lo) / (hi - lo);
    switch (target) {
        case Target::Constant: return 1.0;
        case Target::Cosines: {
            double v = 1.0;
            for (Eigen::Index k = 0; k < u.size(); ++k) v *= std::cos(2.0 * std::numbers::pi * u(k));
            return v;
        }
        case Target::Franke: return franke(u(0), u(std::min<Eigen::Index>(1, u.size() - 1)));
    }
    throw InvalidArgument("unknown target");
}

DataSet gen_data(Eigen::Index m, Eigen::Index d, double lo, double hi, std::uint64_t seed, Target target) {
    if (m < 1 || d < 1) throw InvalidArgument("gen_data: m and d must be >= 1");
    if (!(hi > lo)) throw InvalidArgument("gen_data: box upper bound must exceed lower bound");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd sites = uniform_rows(m, d, lo, hi, rng, true);
    Eigen::VectorXd values(m);
    for (Eigen::Index j = 0; j < m; ++j) values(j) = target_value(target, sites.row(j).transpose(), lo, hi);
    return DataSet(std::move(sites), std::move(values));
}

DataSet gen_data(const DataSpec& spec, std::uint64_t seed) {
    return gen_data(spec.m, spec.d, spec.box_lo, spec.box_hi, seed, spec.target);
}

Eigen::MatrixXd gen_points(Eigen::Index n, Eigen::Index d, double lo, double hi, std::uint64_t seed) {
    if (n < 0 || d < 1) throw InvalidArgument("gen_points: need n >= 0 and d >= 1");
    std::mt19937_64 rng(derive_seed(seed, kQueryStream, 0));
    return uniform_rows(n, d, lo, hi, rng, false);
}

DataSet load_or_generate(const DataSpec& spec, std::uint64_t seed) {
    if (!spec.file.empty()) return read_dataset_csv(std::filesystem::path(spec.file));
    return gen_data(spec, seed);
}

}  // namespace qrbf::harness
