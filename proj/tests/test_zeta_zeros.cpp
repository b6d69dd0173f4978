#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "goldbach/zeta_zeros.hpp"

using namespace goldbach;

namespace {

ZeroTable from_text(const std::string& s) {
    std::istringstream in(s);
    return load_zero_table(in, "inline");
}

const ZeroTable& fixture() {
    static const ZeroTable z = load_zero_table_file(std::string(GOLDBACH_TEST_DATA) + "/zeta_zeros_1e5.txt");
    return z;
}

// Both rho and its conjugate, in complex arithmetic with std::pow.
double reference_sum(const ZeroTable& z, double n, double t) {
    std::complex<long double> acc = 0;
    for (double g : z.ordinates()) {
        if (g > t) break;
        for (double sign : {1.0, -1.0}) {
            const std::complex<long double> rho(0.5L, sign * static_cast<long double>(g));
            acc += std::pow(static_cast<std::complex<long double>>(n), rho + 1.0L) / (rho * (rho + 1.0L));
        }
    }
    EXPECT_LT(std::abs(acc.imag()), 1e-9L * std::abs(acc.real()) + 1e-6L);
    return static_cast<double>(2.0L * acc.real());
}

}  // namespace

TEST(ZeroTableLoad, ThreeOrdinates) {
    const auto z = from_text("14.134725\n21.022040\n25.010858\n");
    EXPECT_EQ(z.size(), 3u);
    EXPECT_NEAR(z.height(), 25.0109, 1e-4);
    EXPECT_EQ(z.source_id(), "inline");
    const auto c = from_text("# header\n14.134725\n\n# mid\n21.022040\n25.010858\n");
    EXPECT_TRUE(std::equal(z.ordinates().begin(), z.ordinates().end(), c.ordinates().begin(), c.ordinates().end()));
}

TEST(ZeroTableLoad, Errors) {
    try {
        from_text("21.0\n14.1\n");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        from_text("# c\n14.5\nabc\n");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(from_text("14.5\n14.5\n"), parse_error);
    EXPECT_THROW(from_text("13.9\n"), parse_error);
    EXPECT_THROW(from_text("# only comments\n"), parse_error);
    EXPECT_THROW(from_text(""), parse_error);
    EXPECT_THROW(load_zero_table_file("/nonexistent/zeros.txt"), std::runtime_error);
}

TEST(ZeroTableLoad, Fixture) {
    const auto& z = fixture();
    EXPECT_EQ(z.size(), 100'000u);
    EXPECT_NEAR(z.ordinates()[0], 14.134725142, 1e-8);
    EXPECT_NEAR(z.ordinates()[1], 21.022039639, 1e-8);
    EXPECT_NEAR(z.ordinates()[99'999], 74920.827498994, 1e-6);
    // Riemann-von Mangoldt count N(T) ~ T/2pi log(T/2pi e) + 7/8
    const double t = z.height();
    const double nt = t / (2 * std::numbers::pi) * std::log(t / (2 * std::numbers::pi * std::numbers::e)) + 0.875;
    EXPECT_NEAR(static_cast<double>(z.size()), nt, 3.0);
}

TEST(ExplicitSum, EmptyAndSingleZero) {
    const auto z = from_text("14.134725\n21.022040\n25.010858\n");
    EXPECT_EQ(explicit_formula_sum(z, 100, 10), 0.0);
    const std::complex<double> rho(0.5, 14.134725);
    const double expect = 4 * std::pow(100.0, 1.5) * (std::exp(std::complex<double>(0, 14.134725 * std::log(100.0))) /
                                                      (rho * (rho + 1.0))).real();
    EXPECT_NEAR(explicit_formula_sum(z, 100, 15), expect, 1e-12 * std::abs(expect) + 1e-12);
    EXPECT_THROW(explicit_formula_sum(z, 100, 30), std::domain_error);
    EXPECT_THROW(explicit_formula_sum(z, 3, 20), std::domain_error);
}

TEST(ExplicitSum, MatchesConjugatePairReference) {
    const auto& z = fixture();
    for (double n : {100.0, 1e4, 1e6}) {
        const double s = explicit_formula_sum(z, n, 2000);
        EXPECT_NEAR(s, reference_sum(z, n, 2000), 1e-9 * std::pow(n, 1.5)) << n;
    }
}

TEST(ExplicitSum, TermMagnitudes) {
    for (double g : {14.134725, 1000.0, 70000.0}) {
        const auto term = zero_term_unscaled(g, std::log(1e6));
        EXPECT_NEAR(std::abs(term), inverse_rho_weight(g), 1e-15);
        EXPECT_LE(std::abs(term), 1.0 / (g * g));
    }
}

TEST(ExplicitSum, TruncationSemantics) {
    const auto& z = fixture();
    std::vector<double> half(z.ordinates().begin(), z.ordinates().begin() + 50'000);
    const ZeroTable small(half, "half");
    EXPECT_EQ(explicit_formula_sum(small, 1e4, 1000), explicit_formula_sum(z, 1e4, 1000));
}

TEST(TailBound, Properties) {
    const auto& z = fixture();
    const double n = 1e4;
    const double at_top = truncation_tail_bound(z, n, z.height());
    const double h = z.height();
    EXPECT_NEAR(at_top, 4 * std::pow(n, 1.5) * (std::log(h / (2 * std::numbers::pi)) + 1) / (2 * std::numbers::pi * h),
                1e-12 * at_top);
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {20.0, 100.0, 1000.0, 10000.0, 70000.0}) {
        const double b = truncation_tail_bound(z, n, t);
        EXPECT_LE(b, prev);
        prev = b;
    }
    const double diff = std::abs(explicit_formula_sum(z, n, h) - explicit_formula_sum(z, n, 100));
    EXPECT_GE(truncation_tail_bound(z, n, 100), diff);
    EXPECT_THROW(truncation_tail_bound(z, n, 10), std::domain_error);
}

TEST(Residuals, Identities) {
    const auto& z = fixture();
    const std::uint64_t nmax = 20'000;
    const auto table = sieve_von_mangoldt(nmax);
    const auto s = psi2_fast(table, nmax);
    const double h = z.height();
    for (std::uint64_t n : {1000u, 10'000u, 20'000u}) {
        const double dn = static_cast<double>(n);
        const double r1 = fujii_residual(s, z, n, 1000);
        const double rh = fujii_residual(s, z, n, h);
        EXPECT_NEAR(r1 + explicit_formula_sum(z, dn, h) - explicit_formula_sum(z, dn, 1000), rh, 1e-9 * dn * dn);
        const double g = goldbach_average(s, n);
        EXPECT_LE(std::abs(rh), std::abs(g - dn * dn / 2) + std::abs(explicit_formula_sum(z, dn, h)) + 1e-6);
        EXPECT_EQ(fujii_residual(s, z, n, 10), g - dn * dn / 2);
        for (std::uint64_t q : {2u, 3u, 12u}) {
            const double c = corollary_residual(s, z, q, n, h);
            const double phi = static_cast<double>(euler_phi(q));
            EXPECT_NEAR(c, error_term(s, q, n).raw + rh / phi, 1e-9 * dn * dn);
        }
        EXPECT_NEAR(corollary_residual(s, z, 2, n, h),
                    rh + goldbach_average_multiples(s, 2, n) - g, 1e-9 * dn * dn);
    }
    EXPECT_THROW(corollary_residual(s, z, 1, 100, 100), std::domain_error);
}
