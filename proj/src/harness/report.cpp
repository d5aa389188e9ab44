#include "qrbf/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrbf/error.hpp"

namespace qrbf::harness {

namespace {

bool matches(const std::string& value, const std::string& key, bool prefix) {
    return prefix ? value.rfind(key, 0) == 0 : value == key;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

constexpr std::size_t kCheckColumn = 2;
constexpr std::size_t kMeasuredColumn = 4;
constexpr std::size_t kPassColumn = 7;

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw InvalidArgument("csv row width differs from header");
    rows_.push_back(std::move(cells));
}

void CsvTable::append(const CsvTable& other) {
    if (other.header_ != header_) throw InvalidArgument("csv append: headers differ");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

void CsvTable::write(std::ostream& out) const {
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") == std::string::npos) {
                out << c;
            } else {
                out << '"';
                for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
                out << '"';
            }
        }
        out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

void CsvTable::write(const std::filesystem::path& path) const {
    auto out = open_for_write(path);
    write(out);
}

std::string CsvTable::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

CheckTable::CheckTable(std::string suite, std::uint64_t seed, std::string config_hash)
    : suite_(std::move(suite)),
      seed_(std::to_string(seed)),
      hash_(std::move(config_hash)),
      table_({"suite", "case", "check", "params", "measured", "bound", "relation", "pass", "seed", "config_hash"}) {}

bool CheckTable::record(const std::string& case_id, const std::string& check, const std::string& params,
                        double measured, double bound, const std::string& relation) {
    bool pass = false;
    if (relation == "<=") {
        pass = measured <= bound;
    } else if (relation == ">=") {
        pass = measured >= bound;
    } else {
        throw InvalidArgument("check relation must be <= or >=");
    }
    if (!pass) ++failures_;
    table_.add_row({suite_, case_id, check, params, format_number(measured), format_number(bound), relation,
                    pass ? "pass" : "fail", seed_, hash_});
    return pass;
}

void CheckTable::note(const std::string& case_id, const std::string& check, const std::string& params,
                      double measured) {
    table_.add_row({suite_, case_id, check, params, format_number(measured), "", "info", "pass", seed_, hash_});
}

std::size_t CheckTable::count(const std::string& check, bool prefix) const {
    return static_cast<std::size_t>(std::count_if(table_.rows().begin(), table_.rows().end(), [&](const auto& r) {
        return matches(r[kCheckColumn], check, prefix);
    }));
}

std::size_t CheckTable::failures_of(const std::string& check, bool prefix) const {
    return static_cast<std::size_t>(std::count_if(table_.rows().begin(), table_.rows().end(), [&](const auto& r) {
        return matches(r[kCheckColumn], check, prefix) && r[kPassColumn] == "fail";
    }));
}

double CheckTable::max_measured(const std::string& check, bool prefix) const {
    double best = -INFINITY;
    for (const auto& r : table_.rows()) {
        if (matches(r[kCheckColumn], check, prefix)) best = std::max(best, std::strtod(r[kMeasuredColumn].c_str(), nullptr));
    }
    return best;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

}  // namespace qrbf::harness
