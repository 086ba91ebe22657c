#pragma once

#include "nematic/common.hpp"
#include "nematic/gci.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nematic {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class ValueType { integer, real, string, boolean, real_list, int_list };

using ConfigValue = std::variant<long long, double, std::string, bool, std::vector<double>, std::vector<long long>>;

struct KeySpec {
    std::string name;
    ValueType type;
    bool required = false;
    bool positive = false;  // numeric values (or every list element) must be > 0
};

enum class ConfigErrorKind : int {
    syntax = 1,
    unknown_section = 2,
    unknown_key = 3,
    type_mismatch = 4,
    missing_key = 5,
    invalid_value = 6,
    duplicate_key = 7,
};

const char* to_string(ConfigErrorKind k);

class ConfigError : public Error {
public:
    ConfigError(ConfigErrorKind kind, int line, const std::string& what);
    ConfigErrorKind kind() const { return kind_; }
    int line() const { return line_; }

private:
    ConfigErrorKind kind_;
    int line_;
};

const std::vector<std::string>& subcommands();
const std::vector<KeySpec>& schema_for(const std::string& subcommand);

struct RunConfig {
    std::string subcommand;
    std::map<std::string, ConfigValue> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    long long get_int(const std::string& key, std::optional<long long> fallback = std::nullopt) const;
    double get_real(const std::string& key, std::optional<double> fallback = std::nullopt) const;
    std::string get_string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
    bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
    std::vector<double> get_real_list(const std::string& key) const;
    std::vector<long long> get_int_list(const std::string& key) const;

    bool operator==(const RunConfig& o) const { return subcommand == o.subcommand && values == o.values; }
};

// Line-oriented `key = value` text with `#` comments and exactly one `[section]` naming the subcommand.
RunConfig parse_config(const std::string& text);

// Canonical text: section header then keys in sorted order, reals at 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Real formatted with 17 significant digits ("nan", "inf", "-inf" for non-finite values).
std::string format_real(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes `path` and `path + ".json"` (config hash, code version, subcommand, seed).
void write_text_with_sidecar(const std::string& path, const std::string& content, const RunConfig& cfg,
                             std::optional<std::uint64_t> seed = std::nullopt);
void write_binary_with_sidecar(const std::string& path, const std::vector<unsigned char>& content, const RunConfig& cfg,
                               std::optional<std::uint64_t> seed = std::nullopt);
std::string sidecar_json(const std::string& file_name, const RunConfig& cfg, std::optional<std::uint64_t> seed);

struct CoefficientRow {
    double kappa = 0;
    int d = 0;
    CoefficientSet theorem;
    std::optional<CoefficientSet> derivation;
    double max_discrepancy = 0;
    std::string status = "ok";
};

CoefficientRow coefficient_row(double kappa, int d, int n, int degree, int n_quad);
CsvTable coefficient_table(const std::vector<CoefficientRow>& rows);
// Reads the first row with status ok (theorem-form columns) from a table produced above.
CoefficientSet read_coefficient_csv(const std::string& text, std::optional<double> kappa = std::nullopt,
                                    std::optional<int> d = std::nullopt);
std::string coefficient_json(const CoefficientRow& row);

CsvTable radial_solution_table(const RadialSolution& s);

}  // namespace nematic
