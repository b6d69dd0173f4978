#include <gtest/gtest.h>

#include <sstream>

#include "goldbach/experiments.hpp"

using namespace goldbach;

namespace {

RunContext quiet() {
    RunContext ctx;
    ctx.progress = [](const std::string&) {};
    return ctx;
}

std::string render(const ExperimentReport& r, Format f = Format::csv) {
    std::ostringstream out;
    r.write(out, f);
    return out.str();
}

std::size_t column(const ReportSection& s, const std::string& name) {
    for (std::size_t i = 0; i < s.columns.size(); ++i)
        if (s.columns[i] == name) return i;
    throw std::out_of_range(name);
}

std::string zero_path() { return std::string(GOLDBACH_TEST_DATA) + "/zeta_zeros_1e5.txt"; }

}  // namespace

TEST(NoBlowUp, Rule) {
    const std::vector<double> x{1e3, 1e4, 2e4, 1e5, 1e6};
    EXPECT_TRUE(no_blow_up(x, std::vector<double>{1, 1, 1, 1, 1.05}).pass);
    EXPECT_FALSE(no_blow_up(x, std::vector<double>{1, 1, 1, 1, 1.06}).pass);
    EXPECT_TRUE(no_blow_up(x, std::vector<double>{1, 5, 1, 1, 2}).pass);
    const auto c = no_blow_up(x, std::vector<double>{1, 2, 3, 4, 8});
    EXPECT_EQ(c.top_points, 1u);
    EXPECT_EQ(c.earlier_points, 4u);
    EXPECT_EQ(c.top_max, 8.0);
    EXPECT_EQ(c.earlier_max, 4.0);
    EXPECT_EQ(c.full_max, 8.0);
    EXPECT_FALSE(c.pass);
    // a single decade has no earlier points to compare with
    EXPECT_TRUE(no_blow_up(std::vector<double>{5, 6}, std::vector<double>{1, 9}).pass);
}

TEST(Formatting, Deterministic) {
    EXPECT_EQ(fmt_real(0.1), "0.10000000000000001");
    EXPECT_EQ(fmt_real(-0.0), "0");
    EXPECT_EQ(fmt_real(2.0), "2");
    EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
    std::mt19937_64 a(0), b(0);
    for (int i = 0; i < 10; ++i) {
        const double u = unit_draw(a);
        EXPECT_EQ(u, unit_draw(b));
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Config, Validation) {
    ExperimentConfig c;
    c.n_values = {10, 5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.n_values = {5, 5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.n_values = {5, 10};
    c.q_values = {0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.q_values = {1, 2};
    c.n_max = 8;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.n_max = 10;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(parse_command("error-scaling"), Command::error_scaling);
    EXPECT_FALSE(parse_command("bogus").has_value());
}

TEST(ErrorScaling, SmallRowsAndDeterminism) {
    ExperimentConfig c;
    c.command = Command::error_scaling;
    c.n_values = {6, 50, 100, 1000};
    c.q_values = {1, 2, 3};
    auto ctx = quiet();
    const auto r = run_error_scaling(c, ctx);
    const auto& s = r.section("error_scaling");
    const auto iq = column(s, "q"), in = column(s, "N"), iraw = column(s, "raw_error");
    bool found = false;
    for (const auto& row : s.rows) {
        if (row[iq] == "2" && row[in] == "6") {
            EXPECT_NEAR(std::stod(row[iraw]), -1.523000, 1e-6);
            found = true;
        }
        if (row[iq] == "1") EXPECT_EQ(row[iraw], "0");
    }
    EXPECT_TRUE(found);
    const auto text = render(r);
    EXPECT_EQ(text.rfind("# schema=1\n", 0), 0u);
    EXPECT_EQ(text, render(run_error_scaling(c, ctx)));
    // every data row starts with the config hash
    std::istringstream lines(text);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("config_hash", 0) == 0) continue;
        EXPECT_EQ(line.rfind(r.config_hash + ",", 0), 0u) << line;
        ++rows;
    }
    EXPECT_GT(rows, 10u);
    EXPECT_NE(render(r, Format::tsv).find('\t'), std::string::npos);
    // a different seed changes the hash
    c.seed = 1;
    EXPECT_NE(run_error_scaling(c, ctx).config_hash, r.config_hash);
}

TEST(ErrorScaling, CapacityIsResourceError) {
    ExperimentConfig c;
    c.command = Command::error_scaling;
    c.n_values = {100};
    c.n_max = kMaxSieve + 1;
    auto ctx = quiet();
    EXPECT_THROW(run_error_scaling(c, ctx), resource_error);
}

TEST(ExplicitFormula, RowsAndIdentities) {
    ExperimentConfig c;
    c.command = Command::explicit_formula;
    c.n_values = {1000, 10'000};
    c.zero_table_path = zero_path();
    c.height = 10;  // below the first ordinate
    auto ctx = quiet();
    const auto r0 = run_explicit_formula_scan(c, ctx);
    const auto& s0 = r0.section("explicit_formula");
    for (const auto& row : s0.rows) {
        EXPECT_EQ(row[column(s0, "S")], "0");
        const double g = std::stod(row[column(s0, "G")]);
        const double n = std::stod(row[column(s0, "N")]);
        EXPECT_DOUBLE_EQ(std::stod(row[column(s0, "residual")]), g - n * n / 2);
    }
    c.height = 0;
    c.q_values = {3};
    const auto r1 = run_explicit_formula_scan(c, ctx);
    const auto& s1 = r1.section("explicit_formula");
    for (std::size_t i = 0; i < s1.rows.size(); ++i) {
        const double dr = std::stod(s1.rows[i][column(s1, "residual")]) - std::stod(s0.rows[i][column(s0, "residual")]);
        const double ds = std::stod(s1.rows[i][column(s1, "S")]);
        EXPECT_NEAR(dr, ds, 1e-6 * std::abs(ds) + 1e-3);
    }
    EXPECT_EQ(r1.section("corollary").rows.size(), 2u);
    EXPECT_EQ(render(r1), render(run_explicit_formula_scan(c, ctx)));
}

TEST(ExplicitFormula, MissingTable) {
    ExperimentConfig c;
    c.command = Command::explicit_formula;
    auto ctx = quiet();
    EXPECT_THROW(run_explicit_formula_scan(c, ctx), std::invalid_argument);
}

TEST(CharacterMoments, Rows) {
    ExperimentConfig c;
    c.command = Command::character_moments;
    c.n_values = {3, 100, 1000};
    c.q_values = {3, 6};
    auto ctx = quiet();
    const auto r = run_character_moments(c, ctx);
    const auto& m = r.section("moments");
    bool found = false;
    for (const auto& row : m.rows) {
        if (row[column(m, "q")] == "3" && row[column(m, "X")] == "3") {
            EXPECT_NEAR(std::stod(row[column(m, "J1")]), 0.480453, 1e-6);
            found = true;
        }
        if (row[column(m, "h_rule")] == "0") EXPECT_EQ(row[column(m, "J2")], "0");
    }
    EXPECT_TRUE(found);
    const auto& imp = r.section("imprimitivity");
    EXPECT_FALSE(imp.rows.empty());
    for (const auto& row : imp.rows) EXPECT_EQ(row[column(imp, "holds")], "1");
    EXPECT_EQ(render(r), render(run_character_moments(c, ctx)));
}

TEST(Sieve, Report) {
    ExperimentConfig c;
    c.command = Command::sieve;
    c.n_values = {100, 1000};
    auto ctx = quiet();
    const auto r = run_sieve(c, ctx);
    EXPECT_TRUE(r.passed());
    EXPECT_NEAR(std::stod(r.section("chebyshev").rows[0][1]), 94.045, 1e-3);
}

TEST(Goldbach, ReportAndCache) {
    ExperimentConfig c;
    c.command = Command::goldbach;
    c.n_values = {1000, 2000};
    c.q_values = {2};
    c.cache_path = testing::TempDir() + "goldbach_cache.bin";
    std::remove(c.cache_path.c_str());
    auto ctx = quiet();
    const auto first = render(run_goldbach(c, ctx));
    const auto second = render(run_goldbach(c, ctx));  // served from the cache
    EXPECT_EQ(first, second);
    EXPECT_NE(first.find("# verdict fast_matches_direct=PASS"), std::string::npos);
    std::remove(c.cache_path.c_str());
}
