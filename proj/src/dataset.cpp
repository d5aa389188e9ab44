#include "qrbf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qrbf/error.hpp"

namespace qrbf {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? std::string{} : field.substr(first, last - first + 1));
    }
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse number '" + text + "'");
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_table(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InvalidArgument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw InvalidArgument("empty CSV input");
    return table;
}

double pair_distance(const Eigen::MatrixXd& sites, Eigen::Index i, Eigen::Index j) {
    return (sites.row(i) - sites.row(j)).norm();
}

}  // namespace

DataSet::DataSet(Eigen::MatrixXd sites, Eigen::VectorXd values)
    : sites_(std::move(sites)), values_(std::move(values)) {
    if (sites_.rows() < 1 || sites_.cols() < 1) throw InvalidArgument("dataset needs m >= 1 sites in d >= 1 dimensions");
    if (values_.size() != sites_.rows()) throw DimensionMismatch("dataset: number of values differs from number of sites");
    if (!sites_.allFinite() || !values_.allFinite()) throw InvalidArgument("dataset contains non-finite entries");

    // Lexicographic sort of row indices; duplicates end up adjacent.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(sites_.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto less = [this](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index k = 0; k < sites_.cols(); ++k) {
            if (sites_(a, k) != sites_(b, k)) return sites_(a, k) < sites_(b, k);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 1; k < order.size(); ++k) {
        if ((sites_.row(order[k]).array() == sites_.row(order[k - 1]).array()).all()) {
            throw InvalidArgument("duplicate data site at rows " + std::to_string(order[k - 1]) + " and " +
                                  std::to_string(order[k]));
        }
    }

    norms_ = sites_.rowwise().norm();
}

double DataSet::min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < size(); ++i) {
        for (Eigen::Index j = i + 1; j < size(); ++j) best = std::min(best, pair_distance(sites_, i, j));
    }
    return best;
}

double DataSet::median_nearest_neighbor() const {
    if (size() < 2) return std::numeric_limits<double>::infinity();
    std::vector<double> nearest(static_cast<std::size_t>(size()), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < size(); ++i) {
        for (Eigen::Index j = i + 1; j < size(); ++j) {
            const double d = pair_distance(sites_, i, j);
            nearest[i] = std::min(nearest[i], d);
            nearest[j] = std::min(nearest[j], d);
        }
    }
    std::sort(nearest.begin(), nearest.end());
    const std::size_t n = nearest.size();
    return n % 2 == 1 ? nearest[n / 2] : 0.5 * (nearest[n / 2 - 1] + nearest[n / 2]);
}

DataSet read_dataset_csv(std::istream& in) {
    const auto table = read_table(in);
    const auto cols = static_cast<Eigen::Index>(table.header.size());
    if (cols < 2) throw InvalidArgument("dataset CSV needs at least one coordinate column and a value column");
    if (table.header.back() != "y") throw InvalidArgument("dataset CSV: last column must be 'y'");
    for (Eigen::Index k = 0; k + 1 < cols; ++k) {
        if (table.header[k] != "x" + std::to_string(k + 1)) {
            throw InvalidArgument("dataset CSV: expected column 'x" + std::to_string(k + 1) + "'");
        }
    }
    const auto m = static_cast<Eigen::Index>(table.rows.size());
    Eigen::MatrixXd sites(m, cols - 1);
    Eigen::VectorXd values(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k + 1 < cols; ++k) sites(i, k) = table.rows[i][k];
        values(i) = table.rows[i][cols - 1];
    }
    return DataSet(std::move(sites), std::move(values));
}

DataSet read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open dataset file " + path.string());
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const DataSet& data) {
    for (Eigen::Index k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
    out << "y\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index k = 0; k < data.dim(); ++k) out << data.sites()(i, k) << ',';
        out << data.values()(i) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const DataSet& data) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write dataset file " + path.string());
    write_dataset_csv(out, data);
}

Eigen::MatrixXd read_points_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open query file " + path.string());
    const auto table = read_table(in);
    auto d = static_cast<Eigen::Index>(table.header.size());
    if (d > 1 && table.header.back() == "y") --d;
    Eigen::MatrixXd points(static_cast<Eigen::Index>(table.rows.size()), d);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index k = 0; k < d; ++k) points(i, k) = table.rows[i][k];
    }
    return points;
}

}  // namespace qrbf
