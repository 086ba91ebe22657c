#include "nematic/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>

using namespace nematic;

namespace {

ConfigErrorKind error_kind(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ConfigErrorKind::syntax;
}

}  // namespace

TEST(Config, ParsesMinimalFile) {
    const RunConfig c = parse_config("# comment\n[kinetic]\nkappa = 4\nd = 3\nn = 400\ndt = 1e-3\nT = 20\n");
    EXPECT_EQ(c.subcommand, "kinetic");
    EXPECT_DOUBLE_EQ(c.get_real("kappa"), 4.0);
    EXPECT_EQ(c.get_int("n"), 400);
    EXPECT_DOUBLE_EQ(c.get_real("D", 1.0), 1.0);
    EXPECT_THROW(c.get_real("D"), std::exception);
}

TEST(Config, TypeMismatchReportsLine) {
    try {
        parse_config("[kinetic]\nkappa = 4\ndt = fast\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.kind(), ConfigErrorKind::type_mismatch);
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.code(), ExitCode::config);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Config, DistinctErrorKinds) {
    EXPECT_EQ(error_kind("[kinetic]\nkappa 4\n"), ConfigErrorKind::syntax);
    EXPECT_EQ(error_kind("[bogus]\n"), ConfigErrorKind::unknown_section);
    EXPECT_EQ(error_kind("[kinetic]\nkappa = 4\nd = 3\nn = 10\ndt = 0.1\nT = 1\ncolour = 2\n"),
              ConfigErrorKind::unknown_key);
    EXPECT_EQ(error_kind("[kinetic]\nkappa = 4\nd = 3\nn = 10\ndt = 0.1\n"), ConfigErrorKind::missing_key);
    EXPECT_EQ(error_kind("[kinetic]\nkappa = 4\nd = -3\nn = 10\ndt = 0.1\nT = 1\n"), ConfigErrorKind::invalid_value);
    EXPECT_EQ(error_kind("[kinetic]\nkappa = 4\nkappa = 5\nd = 3\nn = 10\ndt = 0.1\nT = 1\n"),
              ConfigErrorKind::duplicate_key);
    EXPECT_EQ(error_kind("[kinetic]\nkappa = 4\n[ibm]\n"), ConfigErrorKind::syntax);
}

TEST(Config, SerializeRoundTrip) {
    const RunConfig a = parse_config("[coeffs]\nkappa = 0.5, 2, 8\nd = 2, 3\nn = 64\nprofiles = true\n");
    const std::string text = serialize_config(a);
    const RunConfig b = parse_config(text);
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize_config(b), text);
    EXPECT_EQ(b.get_real_list("kappa").size(), 3u);
    EXPECT_TRUE(b.get_bool("profiles"));
}

TEST(Config, RealFormattingIsExact) {
    const double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_real(x)), x);
    EXPECT_EQ(format_real(std::nan("")), "nan");
}

TEST(Io, HashIsStable) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Io, SidecarContents) {
    const RunConfig c = parse_config("[ibm]\nN = 10\nd = 2\nnu = 1\nD = 1\ndt = 0.01\nT = 1\nseed = 5\n");
    const auto j = nlohmann::json::parse(sidecar_json("obs.csv", c, 5));
    EXPECT_EQ(j["file"], "obs.csv");
    EXPECT_EQ(j["subcommand"], "ibm");
    EXPECT_EQ(j["seed"], 5);
    EXPECT_EQ(j["code_version"], kCodeVersion);
    EXPECT_EQ(j["config_hash"], hex64(fnv1a64(serialize_config(c))));
}

TEST(Coefficients, TableRoundTripAndZeroKappa) {
    std::vector<CoefficientRow> rows;
    rows.push_back(coefficient_row(0.0, 3, 64, kDefaultBvpDegree, 128));
    rows.push_back(coefficient_row(2.0, 3, 64, kDefaultBvpDegree, 128));
    EXPECT_EQ(rows[0].status, "kappa_zero_direction_undefined");
    EXPECT_TRUE(std::isnan(rows[0].max_discrepancy));
    EXPECT_EQ(rows[1].status, "ok");
    EXPECT_EQ(rows[1].theorem.H1, rows[1].theorem.E1);
    const CsvTable t = coefficient_table(rows);
    const CoefficientSet c = read_coefficient_csv(t.str(), 2.0, 3);
    const auto a = c.values(), b = rows[1].theorem.values();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
    EXPECT_THROW(read_coefficient_csv(t.str(), 5.0, 3), std::exception);
}
