#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace qrbf::harness {

/// Shortest round-trip text for a double ("nan", "inf" and "-inf" for specials).
[[nodiscard]] std::string format_number(double v);

/// FNV-1a 64 of a byte string, as 16 lowercase hex digits.
[[nodiscard]] std::string fnv1a_hex(const std::string& bytes);

/// In-memory CSV table. Cells are stored as already formatted text.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
    [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    void add_row(std::vector<std::string> cells);
    void append(const CsvTable& other);

    void write(std::ostream& out) const;
    void write(const std::filesystem::path& path) const;
    [[nodiscard]] std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Long-format check table shared by every report:
/// suite,case,check,params,measured,bound,relation,pass,seed,config_hash
class CheckTable {
public:
    CheckTable(std::string suite, std::uint64_t seed, std::string config_hash);

    /// Records measured <= bound (or >= for relation ">="); returns pass.
    bool record(const std::string& case_id, const std::string& check, const std::string& params, double measured,
                double bound, const std::string& relation = "<=");
    /// Informational row without a bound; always passes.
    void note(const std::string& case_id, const std::string& check, const std::string& params, double measured);

    [[nodiscard]] bool all_pass() const { return failures_ == 0; }
    [[nodiscard]] std::size_t failures() const { return failures_; }
    [[nodiscard]] const CsvTable& table() const { return table_; }
    [[nodiscard]] const std::string& suite() const { return suite_; }

    /// Rows whose check column equals `check` (or starts with it when prefix is set).
    [[nodiscard]] std::size_t count(const std::string& check, bool prefix = false) const;
    [[nodiscard]] std::size_t failures_of(const std::string& check, bool prefix = false) const;
    [[nodiscard]] double max_measured(const std::string& check, bool prefix = false) const;

private:
    std::string suite_;
    std::string seed_;
    std::string hash_;
    CsvTable table_;
    std::size_t failures_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace qrbf::harness
