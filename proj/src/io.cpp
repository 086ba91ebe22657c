#include "nematic/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nematic {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    return out;
}

std::optional<long long> parse_int(const std::string& s) {
    long long v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && s[0] == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || b == e) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::integer: return "integer";
        case ValueType::real: return "real";
        case ValueType::string: return "string";
        case ValueType::boolean: return "boolean";
        case ValueType::real_list: return "list of reals";
        case ValueType::int_list: return "list of integers";
    }
    return "?";
}

ConfigValue parse_value(const KeySpec& spec, const std::string& raw, int line) {
    auto mismatch = [&]() {
        return ConfigError(ConfigErrorKind::type_mismatch, line,
                           "key '" + spec.name + "' expects " + type_name(spec.type) + ", got '" + raw + "'");
    };
    auto nonpositive = [&]() {
        return ConfigError(ConfigErrorKind::invalid_value, line, "key '" + spec.name + "' must be positive");
    };
    switch (spec.type) {
        case ValueType::integer: {
            const auto v = parse_int(raw);
            if (!v) throw mismatch();
            if (spec.positive && *v <= 0) throw nonpositive();
            return *v;
        }
        case ValueType::real: {
            const auto v = parse_real(raw);
            if (!v) throw mismatch();
            if (spec.positive && !(*v > 0.0)) throw nonpositive();
            return *v;
        }
        case ValueType::boolean:
            if (raw == "true") return true;
            if (raw == "false") return false;
            throw mismatch();
        case ValueType::string: {
            std::string s = raw;
            if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
            if (s.empty()) throw mismatch();
            return s;
        }
        case ValueType::real_list: {
            std::vector<double> out;
            for (const auto& item : split_list(raw)) {
                const auto v = parse_real(item);
                if (!v) throw mismatch();
                if (spec.positive && !(*v > 0.0)) throw nonpositive();
                out.push_back(*v);
            }
            if (out.empty()) throw mismatch();
            return out;
        }
        case ValueType::int_list: {
            std::vector<long long> out;
            for (const auto& item : split_list(raw)) {
                const auto v = parse_int(item);
                if (!v) throw mismatch();
                if (spec.positive && *v <= 0) throw nonpositive();
                out.push_back(*v);
            }
            if (out.empty()) throw mismatch();
            return out;
        }
    }
    throw mismatch();
}

const KeySpec* find_key(const std::vector<KeySpec>& schema, const std::string& name) {
    for (const auto& k : schema)
        if (k.name == name) return &k;
    return nullptr;
}

template <class T>
const T* get_as(const RunConfig& cfg, const std::string& key) {
    const auto it = cfg.values.find(key);
    if (it == cfg.values.end()) return nullptr;
    const T* v = std::get_if<T>(&it->second);
    if (!v) throw ConfigError(ConfigErrorKind::type_mismatch, 0, "key '" + key + "' has an unexpected type");
    return v;
}

[[noreturn]] void missing(const std::string& key) {
    throw ConfigError(ConfigErrorKind::missing_key, 0, "missing key '" + key + "'");
}

std::string value_text(const ConfigValue& v) {
    struct Visitor {
        std::string operator()(long long x) const { return std::to_string(x); }
        std::string operator()(double x) const { return format_real(x); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const std::vector<double>& xs) const {
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_real(xs[i]);
            return s;
        }
        std::string operator()(const std::vector<long long>& xs) const {
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
            return s;
        }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace

const char* to_string(ConfigErrorKind k) {
    switch (k) {
        case ConfigErrorKind::syntax: return "syntax";
        case ConfigErrorKind::unknown_section: return "unknown_section";
        case ConfigErrorKind::unknown_key: return "unknown_key";
        case ConfigErrorKind::type_mismatch: return "type_mismatch";
        case ConfigErrorKind::missing_key: return "missing_key";
        case ConfigErrorKind::invalid_value: return "invalid_value";
        case ConfigErrorKind::duplicate_key: return "duplicate_key";
    }
    return "?";
}

ConfigError::ConfigError(ConfigErrorKind kind, int line, const std::string& what)
    : Error(ExitCode::config, std::string("config error [") + to_string(kind) + "]" +
                                  (line > 0 ? " at line " + std::to_string(line) : std::string()) + ": " + what),
      kind_(kind),
      line_(line) {}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"coeffs", "ibm", "kinetic", "macro", "validate"};
    return s;
}

const std::vector<KeySpec>& schema_for(const std::string& subcommand) {
    using T = ValueType;
    static const std::map<std::string, std::vector<KeySpec>> schemas = {
        {"coeffs",
         {{"kappa", T::real_list, true},
          {"d", T::int_list, true, true},
          {"n", T::integer, false, true},
          {"degree", T::integer, false, true},
          {"n_quad", T::integer, false, true},
          {"D", T::real, false, true},
          {"profiles", T::boolean}}},
        {"ibm",
         {{"N", T::integer, true, true},
          {"d", T::integer, true, true},
          {"nu", T::real, true},
          {"D", T::real, true},
          {"R", T::real, false, true},
          {"kernel", T::string},
          {"L", T::real, false, true},
          {"dt", T::real, true, true},
          {"T", T::real, true, true},
          {"seed", T::integer},
          {"observe_every", T::integer, false, true},
          {"coarse_grid", T::integer, false, true},
          {"bandwidth", T::real, false, true},
          {"write_trajectory", T::boolean},
          {"trajectory_every", T::integer, false, true}}},
        {"kinetic",
         {{"kappa", T::real, true},
          {"d", T::integer, true, true},
          {"n", T::integer, true, true},
          {"D", T::real, false, true},
          {"dt", T::real, true, true},
          {"T", T::real, true, true},
          {"policy", T::string},
          {"init", T::string},
          {"bump_center", T::real},
          {"bump_width", T::real, false, true},
          {"sample_every", T::integer, false, true}}},
        {"macro",
         {{"kappa", T::real},
          {"d", T::integer, true, true},
          {"n", T::integer, true, true},
          {"L", T::real, false, true},
          {"steps", T::integer, true, true},
          {"dt", T::real, false, true},
          {"safety", T::real, false, true},
          {"init", T::string},
          {"amplitude", T::real},
          {"bvp_n", T::integer, false, true},
          {"D", T::real, false, true},
          {"observe_every", T::integer, false, true},
          {"snapshot_every", T::integer, false, true}}},
        {"validate",
         {{"suite", T::string, true},
          {"seed", T::integer},
          {"N", T::integer, false, true},
          {"kappa", T::real},
          {"d", T::integer, false, true},
          {"n", T::integer, false, true},
          {"T", T::real, false, true},
          {"dt", T::real, false, true},
          {"R", T::real, false, true},
          {"eps", T::real_list, false, true},
          {"nodes", T::integer, false, true},
          {"quick", T::boolean}}},
    };
    const auto it = schemas.find(subcommand);
    if (it == schemas.end()) throw ConfigError(ConfigErrorKind::unknown_section, 0, "unknown subcommand '" + subcommand + "'");
    return it->second;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    const std::vector<KeySpec>* schema = nullptr;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = raw_line;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(ConfigErrorKind::syntax, line_no, "unterminated section header");
            if (schema) throw ConfigError(ConfigErrorKind::syntax, line_no, "only one [section] is allowed");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (std::find(subcommands().begin(), subcommands().end(), name) == subcommands().end())
                throw ConfigError(ConfigErrorKind::unknown_section, line_no, "unknown section '" + name + "'");
            cfg.subcommand = name;
            schema = &schema_for(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(ConfigErrorKind::syntax, line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(ConfigErrorKind::syntax, line_no, "empty key or value");
        if (!schema) throw ConfigError(ConfigErrorKind::syntax, line_no, "key before any [section]");
        const KeySpec* spec = find_key(*schema, key);
        if (!spec)
            throw ConfigError(ConfigErrorKind::unknown_key, line_no,
                              "unknown key '" + key + "' in section [" + cfg.subcommand + "]");
        if (cfg.values.count(key)) throw ConfigError(ConfigErrorKind::duplicate_key, line_no, "duplicate key '" + key + "'");
        cfg.values.emplace(key, parse_value(*spec, value, line_no));
    }
    if (!schema) throw ConfigError(ConfigErrorKind::syntax, line_no, "no [section] found");
    for (const auto& k : *schema)
        if (k.required && !cfg.values.count(k.name))
            throw ConfigError(ConfigErrorKind::missing_key, 0,
                              "missing required key '" + k.name + "' in section [" + cfg.subcommand + "]");
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out = "[" + cfg.subcommand + "]\n";
    for (const auto& [k, v] : cfg.values) out += k + " = " + value_text(v) + "\n";
    return out;
}

long long RunConfig::get_int(const std::string& key, std::optional<long long> fallback) const {
    if (const auto* v = get_as<long long>(*this, key)) return *v;
    if (fallback) return *fallback;
    missing(key);
}

double RunConfig::get_real(const std::string& key, std::optional<double> fallback) const {
    if (const auto* v = get_as<double>(*this, key)) return *v;
    if (fallback) return *fallback;
    missing(key);
}

std::string RunConfig::get_string(const std::string& key, std::optional<std::string> fallback) const {
    if (const auto* v = get_as<std::string>(*this, key)) return *v;
    if (fallback) return *fallback;
    missing(key);
}

bool RunConfig::get_bool(const std::string& key, std::optional<bool> fallback) const {
    if (const auto* v = get_as<bool>(*this, key)) return *v;
    if (fallback) return *fallback;
    missing(key);
}

std::vector<double> RunConfig::get_real_list(const std::string& key) const {
    if (const auto* v = get_as<std::vector<double>>(*this, key)) return *v;
    missing(key);
}

std::vector<long long> RunConfig::get_int_list(const std::string& key) const {
    if (const auto* v = get_as<std::vector<long long>>(*this, key)) return *v;
    missing(key);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += "\n";
    }
    return out;
}

std::string sidecar_json(const std::string& file_name, const RunConfig& cfg, std::optional<std::uint64_t> seed) {
    nlohmann::ordered_json j;
    j["file"] = file_name;
    j["subcommand"] = cfg.subcommand;
    j["config_hash"] = hex64(fnv1a64(serialize_config(cfg)));
    j["code_version"] = kCodeVersion;
    if (seed) j["seed"] = *seed;
    return j.dump(2) + "\n";
}

namespace {

std::string base_name(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

void write_file(const std::string& path, const char* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ExitCode::config, "cannot open output file " + path);
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw Error(ExitCode::config, "failed writing " + path);
}

}  // namespace

void write_text_with_sidecar(const std::string& path, const std::string& content, const RunConfig& cfg,
                             std::optional<std::uint64_t> seed) {
    write_file(path, content.data(), content.size());
    const std::string meta = sidecar_json(base_name(path), cfg, seed);
    write_file(path + ".json", meta.data(), meta.size());
}

void write_binary_with_sidecar(const std::string& path, const std::vector<unsigned char>& content, const RunConfig& cfg,
                               std::optional<std::uint64_t> seed) {
    write_file(path, reinterpret_cast<const char*>(content.data()), content.size());
    const std::string meta = sidecar_json(base_name(path), cfg, seed);
    write_file(path + ".json", meta.data(), meta.size());
}

CoefficientRow coefficient_row(double kappa, int d, int n, int degree, int n_quad) {
    CoefficientRow row;
    row.kappa = kappa;
    row.d = d;
    try {
        const RadialBundle b = solve_bundle(kappa, d, n, degree);
        row.theorem = compute_coefficients(b, n_quad);
        if (kappa == 0.0) {
            row.status = "kappa_zero_direction_undefined";
            row.max_discrepancy = std::numeric_limits<double>::quiet_NaN();
            return row;
        }
        row.derivation = compute_coefficients_derivation(b, n_quad);
        const auto a = row.theorem.values(), c = row.derivation->values();
        double m = std::abs(row.theorem.C0 - row.derivation->C0);
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - c[i]));
        row.max_discrepancy = m;
    } catch (const Error& e) {
        row.theorem.kappa = kappa;
        row.theorem.d = d;
        row.status = std::string("error: ") + e.what();
        row.max_discrepancy = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

CsvTable coefficient_table(const std::vector<CoefficientRow>& rows) {
    std::vector<std::string> header = {"kappa", "d"};
    for (const char* n : CoefficientSet::names()) header.emplace_back(n);
    header.emplace_back("C0");
    for (const char* n : CoefficientSet::names()) header.emplace_back(std::string("deriv_") + n);
    header.emplace_back("deriv_C0");
    header.emplace_back("max_discrepancy");
    header.emplace_back("status");
    CsvTable t(header);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        std::vector<std::string> cells = {format_real(r.kappa), std::to_string(r.d)};
        for (double v : r.theorem.values()) cells.push_back(format_real(v));
        cells.push_back(format_real(r.theorem.C0));
        if (r.derivation) {
            for (double v : r.derivation->values()) cells.push_back(format_real(v));
            cells.push_back(format_real(r.derivation->C0));
        } else {
            for (int i = 0; i < 17; ++i) cells.push_back(format_real(nan));
        }
        cells.push_back(format_real(r.max_discrepancy));
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        cells.push_back(status);
        t.add_row(std::move(cells));
    }
    return t;
}

CoefficientSet read_coefficient_csv(const std::string& text, std::optional<double> kappa, std::optional<int> d) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(ConfigErrorKind::syntax, 1, "empty coefficient file");
    const auto header = split_list(line);
    auto col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError(ConfigErrorKind::missing_key, 1, "coefficient file lacks column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_list(line);
        if (cells.size() != header.size())
            throw ConfigError(ConfigErrorKind::syntax, line_no, "coefficient row width does not match header");
        if (cells[col("status")] != "ok") continue;
        const auto k = parse_real(cells[col("kappa")]);
        const auto dd = parse_int(cells[col("d")]);
        if (!k || !dd) throw ConfigError(ConfigErrorKind::type_mismatch, line_no, "bad kappa or d");
        if (kappa && *k != *kappa) continue;
        if (d && *dd != *d) continue;
        CoefficientSet c;
        c.kappa = *k;
        c.d = static_cast<int>(*dd);
        std::array<double, 16> v{};
        for (std::size_t i = 0; i < 16; ++i) {
            const auto x = parse_real(cells[col(CoefficientSet::names()[i])]);
            if (!x) throw ConfigError(ConfigErrorKind::type_mismatch, line_no, "bad coefficient value");
            v[i] = *x;
        }
        c.set_values(v);
        const auto c0 = parse_real(cells[col("C0")]);
        if (!c0) throw ConfigError(ConfigErrorKind::type_mismatch, line_no, "bad C0");
        c.C0 = *c0;
        return c;
    }
    throw ConfigError(ConfigErrorKind::missing_key, 0, "no matching coefficient row with status ok");
}

std::string coefficient_json(const CoefficientRow& row) {
    nlohmann::ordered_json j;
    j["kappa"] = row.kappa;
    j["d"] = row.d;
    j["status"] = row.status;
    auto block = [](const CoefficientSet& c) {
        nlohmann::ordered_json b;
        const auto v = c.values();
        for (std::size_t i = 0; i < v.size(); ++i) b[CoefficientSet::names()[i]] = std::isfinite(v[i]) ? nlohmann::json(v[i]) : nlohmann::json(nullptr);
        b["C0"] = c.C0;
        return b;
    };
    j["theorem_form"] = block(row.theorem);
    if (row.derivation) j["derivation_form"] = block(*row.derivation);
    j["max_discrepancy"] = std::isfinite(row.max_discrepancy) ? nlohmann::json(row.max_discrepancy) : nlohmann::json(nullptr);
    return j.dump(2) + "\n";
}

CsvTable radial_solution_table(const RadialSolution& s) {
    CsvTable t({"r", "value", "derivative"});
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        t.add_row({format_real(s.nodes[i]), format_real(s.values[i]), format_real(s.derivative_values[i])});
    return t;
}

}  // namespace nematic
