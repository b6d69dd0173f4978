// generating_functions.hpp
//
// Power series on the circle |z| = r = e^{-1/N}:
//
//   Psi(z)      = sum Lambda(n) z^n
//   Psi(z, chi) = sum chi(n) Lambda(n) z^n
//   F_q(z)      = sum_{q | n} psi_2(n) z^n
//   I_N(1/z)    = sum_{n <= N} z^{-n} = (1 - z^{-N}) / (z - 1)
//
// and numerical checks of the identities and inequalities built on them.
// Every series is truncated at a common n_cut; identities compare both sides
// truncated identically so they stay exact up to rounding.

#ifndef GOLDBACH_GENERATING_FUNCTIONS_HPP
#define GOLDBACH_GENERATING_FUNCTIONS_HPP

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "goldbach/arithmetic.hpp"
#include "goldbach/characters.hpp"
#include "goldbach/errors.hpp"
#include "goldbach/goldbach_counts.hpp"
#include "goldbach/numeric.hpp"

namespace goldbach {

/// z = r e(alpha), r = e^{-1/N}, alpha reduced to (-1/2, 1/2].
struct CirclePoint {
    std::uint64_t n = 4;
    double alpha = 0.0;
    double r = 0.0;
    complex z;

    static CirclePoint make(std::uint64_t n, double alpha) {
        if (n < 1) throw std::domain_error("CirclePoint: N must be >= 1");
        double a = alpha - std::floor(alpha);
        if (a > 0.5) a -= 1.0;
        CirclePoint p;
        p.n = n;
        p.alpha = a;
        p.r = std::exp(-1.0 / static_cast<double>(n));
        p.z = p.r * unit_phase(a);
        return p;
    }

    /// z^m = e^{-m/N} e(m alpha), phase reduced exactly.
    complex power(std::uint64_t m) const {
        const double dm = static_cast<double>(m);
        return std::exp(-dm / static_cast<double>(n)) * unit_phase(frac_product(dm, alpha));
    }
};

struct SeriesCutoff {
    std::uint64_t n_cut = 0;
    double epsilon_tail = 1e-18;

    /// n_cut = ceil(N ln(1/eps)), so e^{-n_cut/N} <= eps.
    static SeriesCutoff for_scale(std::uint64_t n, double eps = 1e-18) {
        if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("SeriesCutoff: eps must lie in (0, 1)");
        const auto cut = static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * std::log(1.0 / eps)));
        return {cut, eps};
    }
};

struct SeriesValue {
    complex value;
    double tail_bound;  // bound on the modulus of the discarded terms
};

namespace detail {

inline void check_cutoff(const VonMangoldtTable& table, const SeriesCutoff& cut) {
    if (cut.n_cut > table.n_max()) throw std::out_of_range("series cutoff exceeds table n_max");
}

/// sum_{n > M} log(n) r^n, using log n <= log M + (n - M)/M.
inline double log_weighted_tail(std::uint64_t m, double r) {
    const double dm = static_cast<double>(m);
    const double rm1 = std::pow(r, dm + 1.0);
    const double one_minus_r = -std::expm1(std::log(r));
    return rm1 / one_minus_r * (std::log(dm) + 1.0 / (dm * one_minus_r));
}

/// sum_{n > M} n log^2(n) r^n, summed until the geometric remainder is negligible.
inline double psi2_weighted_tail(std::uint64_t m, double r) {
    CompensatedSum acc;
    double term = 0.0;
    std::uint64_t n = m + 1;
    do {
        const double dn = static_cast<double>(n);
        const double l = std::log(dn);
        term = dn * l * l * std::pow(r, dn);
        acc.add(term);
        ++n;
    } while (term > 1e-30 * acc.value() && n < 64 * m + 64);
    return acc.value();
}

template <class Weight>
SeriesValue prime_power_series(const VonMangoldtTable& table, const CirclePoint& pt, const SeriesCutoff& cut,
                               Weight weight) {
    check_cutoff(table, cut);
    CompensatedComplexSum acc;
    const auto bp = table.breakpoints();
    const std::size_t k = table.count_upto(static_cast<double>(cut.n_cut));
    for (std::size_t i = 0; i < k; ++i) {
        const complex w = weight(bp[i]);
        if (w == complex(0.0, 0.0)) continue;
        acc.add(w * table[bp[i]] * pt.power(bp[i]));
    }
    return {acc.value(), log_weighted_tail(cut.n_cut, pt.r)};
}

}  // namespace detail

inline SeriesValue psi_series(const VonMangoldtTable& table, const CirclePoint& pt, const SeriesCutoff& cut) {
    return detail::prime_power_series(table, pt, cut, [](std::uint64_t) { return complex(1.0, 0.0); });
}

inline SeriesValue psi_series_twisted(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j,
                                      const CirclePoint& pt, const SeriesCutoff& cut) {
    return detail::prime_power_series(table, pt, cut, [&](std::uint64_t n) {
        return group.evaluate(j, static_cast<std::int64_t>(n));
    });
}

inline SeriesValue fq_series(const Psi2Series& series, std::uint64_t q, const CirclePoint& pt,
                             const SeriesCutoff& cut) {
    if (q < 1) throw std::domain_error("fq_series: q must be >= 1");
    if (cut.n_cut > series.n_max()) throw std::out_of_range("fq_series: cutoff exceeds series n_max");
    const auto raw = series.raw();
    CompensatedComplexSum acc;
    for (std::uint64_t n = q; n <= cut.n_cut; n += q) {
        if (raw[n] != 0.0) acc.add(raw[n] * pt.power(n));
    }
    return {acc.value(), detail::psi2_weighted_tail(cut.n_cut, pt.r)};
}

// ---- the kernel I_N(1/z) ----------------------------------------------------

/// Closed form (1 - z^{-N}) / (z - 1), with z - 1 formed without cancellation.
inline complex kernel_inverse(const CirclePoint& pt) {
    const double dn = static_cast<double>(pt.n);
    const complex z_minus_n = std::numbers::e * unit_phase(-frac_product(dn, pt.alpha));
    const double s = std::sin(std::numbers::pi * pt.alpha);
    const complex z_minus_1(std::expm1(-1.0 / dn) - 2.0 * pt.r * s * s,
                            pt.r * std::sin(2.0 * std::numbers::pi * pt.alpha));
    return (1.0 - z_minus_n) / z_minus_1;
}

/// sum_{n <= N} z^{-n} term by term.
inline complex kernel_inverse_direct(const CirclePoint& pt) {
    const double dn = static_cast<double>(pt.n);
    CompensatedComplexSum acc;
    for (std::uint64_t m = 1; m <= pt.n; ++m) {
        const double dm = static_cast<double>(m);
        acc.add(std::exp(dm / dn) * unit_phase(-frac_product(dm, pt.alpha)));
    }
    return acc.value();
}

/// max over the grid of |I_N(1/z)| max(1/N, |alpha|) / e; the pointwise bound
/// |I_N(1/z)| <= e min(N, 1/|alpha|) holds iff this is <= 1.
inline double kernel_bound_ratio(std::uint64_t n, std::span<const double> alphas) {
    double worst = 0.0;
    for (double a : alphas) {
        const auto pt = CirclePoint::make(n, a);
        const double scale = std::max(1.0 / static_cast<double>(n), std::abs(pt.alpha));
        worst = std::max(worst, std::abs(kernel_inverse(pt)) * scale / std::numbers::e);
    }
    return worst;
}

struct KernelL1 {
    double value;
    std::uint64_t nodes;
    double relative_change;  // between the last two refinements
    bool converged;
};

/// int_0^1 |I_N(1/z)| d alpha by the periodic trapezoid rule, doubling the
/// node count until two successive estimates agree within rel_tol.
inline KernelL1 kernel_l1(std::uint64_t n, std::uint64_t nodes = 0, double rel_tol = 0.01,
                          std::uint64_t max_nodes = std::uint64_t{1} << 26) {
    if (n < 1) throw std::domain_error("kernel_l1: N must be >= 1");
    if (nodes != 0 && nodes < 4 * n) throw std::domain_error("kernel_l1: need at least 4N nodes");
    std::uint64_t m = nodes != 0 ? nodes : 4 * n;
    auto sample = [&](std::uint64_t count, std::uint64_t stride, std::uint64_t offset) {
        CompensatedSum acc;
        for (std::uint64_t k = offset; k < count; k += stride)
            acc.add(std::abs(kernel_inverse(CirclePoint::make(n, static_cast<double>(k) / static_cast<double>(count)))));
        return acc.value();
    };
    double sum = sample(m, 1, 0);
    double estimate = sum / static_cast<double>(m);
    double change = 1.0;
    while (2 * m <= max_nodes) {
        sum += sample(2 * m, 2, 1);
        m *= 2;
        const double next = sum / static_cast<double>(m);
        change = std::abs(next - estimate) / next;
        estimate = next;
        if (change <= rel_tol) return {estimate, m, change, true};
    }
    return {estimate, m, change, false};
}

// ---- the integral representation of G_q(N) ---------------------------------

/// Largest N for which quadrature_identity accepts the node budget.
inline constexpr std::uint64_t kQuadratureMaxN = 64;

struct QuadratureIdentity {
    complex integral;   // int_0^1 F_q(z) I_N(1/z) d alpha
    double target;      // G_q(N)
    double residual;    // |integral - target|
    std::uint64_t nodes;
};

namespace detail {
/// e(k / m) for k = 0..m-1.
inline std::vector<complex> roots_table(std::uint64_t m) {
    std::vector<complex> t(m);
    for (std::uint64_t k = 0; k < m; ++k) t[k] = unit_phase(static_cast<double>(k) / static_cast<double>(m));
    return t;
}
}  // namespace detail

/// The truncated integrand is a trigonometric polynomial with frequencies in
/// [1 - N, n_cut - 1]; the mean over M > n_cut + N equispaced nodes is exact.
inline QuadratureIdentity quadrature_identity(const Psi2Series& series, std::uint64_t q, std::uint64_t n,
                                              const SeriesCutoff& cut) {
    if (n > kQuadratureMaxN)
        throw resource_error("quadrature_identity: N = " + std::to_string(n) + " above the exactness budget " +
                             std::to_string(kQuadratureMaxN));
    if (n < 4) throw std::domain_error("quadrature_identity: N must be >= 4");
    if (q < 1 || q > n) throw std::domain_error("quadrature_identity: need 1 <= q <= N");
    if (cut.n_cut > series.n_max()) throw std::out_of_range("quadrature_identity: cutoff exceeds series n_max");

    const std::uint64_t m = 2 * (cut.n_cut + n) + 1;
    const auto roots = detail::roots_table(m);
    const auto raw = series.raw();
    const double dn = static_cast<double>(n);

    std::vector<std::pair<std::uint64_t, double>> coeffs;  // (n, psi_2(n) r^n)
    for (std::uint64_t k = q; k <= cut.n_cut; k += q)
        if (raw[k] != 0.0) coeffs.emplace_back(k, raw[k] * std::exp(-static_cast<double>(k) / dn));

    CompensatedComplexSum total;
    for (std::uint64_t node = 0; node < m; ++node) {
        CompensatedComplexSum f;
        for (auto [k, c] : coeffs) f.add(c * roots[static_cast<std::uint64_t>((static_cast<unsigned __int128>(k) * node) % m)]);
        const auto pt = CirclePoint::make(n, static_cast<double>(node) / static_cast<double>(m));
        total.add(f.value() * kernel_inverse(pt));
    }
    const complex integral = total.value() / static_cast<double>(m);
    const double target = goldbach_average_multiples(series, q, n);
    return {integral, target, std::abs(integral - target), m};
}

// ---- character decomposition of F_q ----------------------------------------

struct Lemma21Check {
    complex fq;                 // F_q(z)
    complex character_average;  // (1/phi(q)) sum_chi chi(-1) Psi(z, chi) Psi(z, conj chi)
    complex coprime_pairs;      // sum over m, m' coprime to q with q | m + m'
    double defect;              // |F_q - character_average|
    double budget;              // (log N log q)^2
    double core_residual;       // |character_average - coprime_pairs|
};

/// Twisted series for every character of the group.
inline std::vector<complex> twisted_series_all(const VonMangoldtTable& table, const CharacterGroup& group,
                                               const CirclePoint& pt, const SeriesCutoff& cut) {
    std::vector<complex> out(group.size());
    for (std::size_t j = 0; j < group.size(); ++j) out[j] = psi_series_twisted(table, group, j, pt, cut).value;
    return out;
}

inline Lemma21Check lemma21_defect(const VonMangoldtTable& table, const CharacterGroup& group,
                                   const Psi2Series& series, const CirclePoint& pt, const SeriesCutoff& cut) {
    const std::uint64_t q = group.modulus();
    if (q < 2) throw std::domain_error("lemma21_defect: q must be >= 2");
    detail::check_cutoff(table, cut);

    const auto psi = twisted_series_all(table, group, pt, cut);
    CompensatedComplexSum avg;
    for (std::size_t j = 0; j < group.size(); ++j)
        avg.add(static_cast<double>(group.parity(j)) * psi[j] * psi[group.conjugate(j)]);
    const complex average = avg.value() / static_cast<double>(group.size());

    // Residue-class route: A_a = sum_{m = a (q)} Lambda(m) z^m over units a,
    // then sum_a A_a A_{-a}.
    std::vector<CompensatedComplexSum> cls(q);
    const auto bp = table.breakpoints();
    const std::size_t k = table.count_upto(static_cast<double>(cut.n_cut));
    for (std::size_t i = 0; i < k; ++i) {
        if (std::gcd(bp[i], q) != 1) continue;
        cls[bp[i] % q].add(table[bp[i]] * pt.power(bp[i]));
    }
    CompensatedComplexSum core;
    for (std::uint64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        core.add(cls[a].value() * cls[q - a].value());
    }

    const complex fq = fq_series(series, q, pt, cut).value;
    const double ln = std::log(static_cast<double>(pt.n));
    const double lq = std::log(static_cast<double>(q));
    return {fq, average, core.value(), std::abs(fq - average), ln * lq * ln * lq, std::abs(average - core.value())};
}

struct Lemma22Check {
    complex principal;      // Psi(z, chi_0)
    complex untwisted;      // Psi(z)
    complex shared_factor;  // sum_{(n, q) > 1} Lambda(n) z^n
    double defect;          // |Psi(z, chi_0) - Psi(z)|
    double budget;          // log N log q
};

inline Lemma22Check lemma22_defect(const VonMangoldtTable& table, const CharacterGroup& group,
                                   const CirclePoint& pt, const SeriesCutoff& cut) {
    const std::uint64_t q = group.modulus();
    if (q < 2) throw std::domain_error("lemma22_defect: q must be >= 2");
    std::size_t principal = 0;
    while (!group.is_principal(principal)) ++principal;
    const complex p0 = psi_series_twisted(table, group, principal, pt, cut).value;
    const complex p = psi_series(table, pt, cut).value;
    CompensatedComplexSum shared;
    for (auto [prime, e] : factorize(q)) {
        if (prime > cut.n_cut) continue;
        const double lp = table[prime];
        for (std::uint64_t pm = prime; pm <= cut.n_cut; pm *= prime) shared.add(lp * pt.power(pm));
    }
    return {p0, p, shared.value(), std::abs(p0 - p),
            std::log(static_cast<double>(pt.n)) * std::log(static_cast<double>(q))};
}

// ---- Gallagher's lemma -----------------------------------------------------

struct SequenceTerm {
    std::int64_t n;
    complex c;
};

struct GallagherRatio {
    double lhs;    // int_{-1/2h}^{1/2h} |S(alpha)|^2 d alpha
    double rhs;    // h^-2 int |sum_{x < n <= x + h} c_n|^2 dx
    double ratio;  // lhs / rhs, 0 for an empty sequence
};

/// int_a^b |sum c_n e(n alpha)|^2 d alpha by composite 20-point Gauss-Legendre,
/// with `refinement` panels per unit of (bandwidth x interval length).
inline double exponential_sum_mean_square(std::span<const SequenceTerm> terms, double a, double b,
                                          double refinement = 1.0) {
    if (terms.empty() || b <= a) return 0.0;
    std::int64_t lo = terms.front().n, hi = terms.front().n;
    for (const auto& t : terms) {
        lo = std::min(lo, t.n);
        hi = std::max(hi, t.n);
    }
    const double span = static_cast<double>(hi - lo);
    const auto panels = static_cast<std::uint64_t>(std::ceil(refinement * (span * (b - a) + 1.0)));
    auto integrand = [&](double alpha) {
        CompensatedComplexSum s;
        for (const auto& t : terms) s.add(t.c * unit_phase(frac_product(static_cast<double>(t.n - lo), alpha)));
        return std::norm(s.value());
    };
    CompensatedSum acc;
    const double width = (b - a) / static_cast<double>(panels);
    for (std::uint64_t i = 0; i < panels; ++i) {
        const double x0 = a + width * static_cast<double>(i);
        const double x1 = i + 1 == panels ? b : x0 + width;
        acc.add(boost::math::quadrature::gauss<double, 20>::integrate(integrand, x0, x1));
    }
    return acc.value();
}

/// The same integral in closed form: sum_{n, m} c_n conj(c_m) int e((n - m) alpha).
inline double exponential_sum_mean_square_exact(std::span<const SequenceTerm> terms, double a, double b) {
    CompensatedSum acc;
    for (const auto& s : terms) {
        for (const auto& t : terms) {
            const double d = static_cast<double>(s.n - t.n);
            complex integral;
            if (d == 0.0) {
                integral = b - a;
            } else {
                const double w = 2.0 * std::numbers::pi * d;
                integral = (unit_phase(frac_product(d, b)) - unit_phase(frac_product(d, a))) / complex(0.0, w);
            }
            acc.add((s.c * std::conj(t.c) * integral).real());
        }
    }
    return acc.value();
}

/// int_{-inf}^{inf} |sum_{x < n <= x + h} c_n|^2 dx, swept exactly.
inline double windowed_sum_mean_square(std::span<const SequenceTerm> terms, double h) {
    if (!(h > 0.0)) throw std::domain_error("windowed sum: h must be > 0");
    if (terms.empty()) return 0.0;
    const auto hd = DyadicRational::from_double(h);
    const int shift = hd.shift;
    const scaled_int hs = scale_dyadic(hd, shift);
    std::vector<StepEvent> ev;
    scaled_int lo = 0, hi = 0;
    bool first = true;
    for (const auto& t : terms) {
        const scaled_int n = scale_integer(t.n, shift);
        ev.push_back({n - hs, t.c});
        ev.push_back({n, -t.c});
        if (first || n - hs < lo) lo = n - hs;
        if (first || n > hi) hi = n;
        first = false;
    }
    return integrate_step_squared(std::move(ev), {0.0, 0.0}, lo, hi, shift);
}

inline GallagherRatio gallagher_ratio(std::span<const SequenceTerm> terms, double h, double refinement = 1.0) {
    if (!(h > 0.0)) throw std::domain_error("gallagher_ratio: h must be > 0");
    if (terms.empty()) return {0.0, 0.0, 0.0};
    const double half = 0.5 / h;
    const double lhs = exponential_sum_mean_square(terms, -half, half, refinement);
    const double rhs = windowed_sum_mean_square(terms, h) / (h * h);
    return {lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0};
}

// ---- I1 / I2 split of the Gallagher right-hand side -------------------------

struct I1I2Decomposition {
    double h;
    int k;                     // h = N / 2^{k+2}
    double i1;                 // int_0^h |sum_{n <= x} chi(n) Lambda(n) e^{-n/N}|^2 dx
    double i2;                 // int_0^cutoff |sum_{x < n <= x+h} ...|^2 dx
    double i2_cutoff;          // upper limit used for I2
    double i2_discarded_bound; // bound on the mass beyond the cutoff
    double j1_h;               // J1(h)
    bool i1_within_3j1;        // I1 <= 3 J1(h)
    double dyadic_series;      // sum_j 2^{-j} ((h/N)^2 J1(jN) + J2(jN, h))
    int series_terms;
    double i2_over_series;
};

/// Number of j-terms kept in the dyadic series.
inline constexpr int kDyadicSeriesTerms = 48;

/// Table size needed by i1_i2_decomposition at scale N.
inline std::uint64_t i1_i2_table_size(std::uint64_t n) {
    const double dn = static_cast<double>(n);
    const double cutoff = std::ceil(0.5 * dn * std::log(1e16));
    return static_cast<std::uint64_t>(std::max(cutoff + dn, kDyadicSeriesTerms * dn + dn)) + 2;
}

inline I1I2Decomposition i1_i2_decomposition(const VonMangoldtTable& table, const CharacterGroup& group,
                                             std::size_t j, std::uint64_t n, double h) {
    if (group.is_principal(j)) throw std::domain_error("i1_i2_decomposition: principal character");
    if (n < 4) throw std::domain_error("i1_i2_decomposition: N must be >= 4");
    const double dn = static_cast<double>(n);
    int k = -1;
    for (int kk = 0; std::ldexp(1.0, kk) < dn; ++kk)
        if (std::ldexp(dn, -(kk + 2)) == h) k = kk;
    if (k < 0) throw std::domain_error("i1_i2_decomposition: h must equal N / 2^{k+2} with 0 <= k < log2 N");
    if (table.n_max() < i1_i2_table_size(n)) throw std::out_of_range("i1_i2_decomposition: table too small");

    const auto hd = DyadicRational::from_double(h);
    const int shift = hd.shift;
    const scaled_int hs = scale_dyadic(hd, shift);

    // weighted coefficients chi(n) Lambda(n) e^{-n/N}
    const double cutoff = std::ceil(0.5 * dn * std::log(1e16));
    const scaled_int cut_s = scale_integer(static_cast<std::int64_t>(cutoff), shift);
    std::vector<StepEvent> ev1, ev2;
    complex initial2(0.0, 0.0);
    const auto bp = table.breakpoints();
    for (std::uint64_t m : bp) {
        if (static_cast<double>(m) > cutoff + h) break;
        const complex chi = group.evaluate(j, static_cast<std::int64_t>(m));
        if (chi == complex(0.0, 0.0)) continue;
        const complex c = chi * table[m] * std::exp(-static_cast<double>(m) / dn);
        const scaled_int ms = scale_integer(static_cast<std::int64_t>(m), shift);
        if (ms <= hs) {
            ev1.push_back({ms, c});
            initial2 += c;
        } else if (ms - hs <= cut_s) {
            ev2.push_back({ms - hs, c});
        }
        if (ms <= cut_s) ev2.push_back({ms, -c});
    }
    const double i1 = integrate_step_squared(std::move(ev1), {0.0, 0.0}, 0, hs, shift);
    const double i2 = integrate_step_squared(std::move(ev2), initial2, 0, cut_s, shift);

    // |W(x)| <= (h + 1) log(x + h + 1) e^{-x/N}; integrate the square past the cutoff
    const double a = cutoff + h + 1.0;
    const double l = std::log(a);
    const double beta = 2.0 / dn;
    const double discarded = (h + 1.0) * (h + 1.0) * std::exp(-beta * cutoff) *
                             (l * l / beta + 2.0 * l / (a * beta * beta) + 2.0 / (a * a * beta * beta * beta));

    const double j1h = j1_moment(table, group, j, h);
    CompensatedSum series;
    for (int jj = 1; jj <= kDyadicSeriesTerms; ++jj) {
        const double x = jj * dn;
        series.add(std::ldexp((h * h) / (dn * dn) * j1_moment(table, group, j, x) + j2_moment(table, group, j, x, h), -jj));
    }
    const double s = series.value();
    return {h, k, i1, i2, cutoff, discarded, j1h, i1 <= 3.0 * j1h, s, kDyadicSeriesTerms, s > 0.0 ? i2 / s : 0.0};
}

/// int_0^{1/2h} |Psi(z, chi)|^2 d alpha divided by (I1 + I2) / h^2; bounded by
/// the Gallagher constant when the decomposition is complete.
inline double gallagher_chain_ratio(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j,
                                    std::uint64_t n, const I1I2Decomposition& d, const SeriesCutoff& cut,
                                    double refinement = 1.0) {
    detail::check_cutoff(table, cut);
    const double dn = static_cast<double>(n);
    std::vector<SequenceTerm> terms;
    for (std::uint64_t m : table.breakpoints()) {
        if (m > cut.n_cut) break;
        const complex chi = group.evaluate(j, static_cast<std::int64_t>(m));
        if (chi == complex(0.0, 0.0)) continue;
        terms.push_back({static_cast<std::int64_t>(m), chi * table[m] * std::exp(-static_cast<double>(m) / dn)});
    }
    const double lhs = exponential_sum_mean_square(terms, 0.0, 0.5 / d.h, refinement);
    return lhs / ((d.i1 + d.i2) / (d.h * d.h));
}

// ---- the three-way split of the integral representation --------------------

struct SplitIntegrals {
    complex principal_part;  // integral with the principal-character term
    complex character_part;  // integral with the non-principal terms
    double kernel_l1;        // int_0^1 |I_N(1/z)|
    double budget;           // (log N log q)^2 int |I_N(1/z)|
    double target;           // G_q(N)
    double reconstruction;   // |principal + character - G_q(N)|
    std::uint64_t nodes;
};

inline SplitIntegrals split_integrals(const VonMangoldtTable& table, const CharacterGroup& group,
                                      const Psi2Series& series, std::uint64_t n, const SeriesCutoff& cut) {
    const std::uint64_t q = group.modulus();
    if (q < 2) throw std::domain_error("split_integrals: q must be >= 2");
    if (n > kQuadratureMaxN) throw resource_error("split_integrals: N above the exactness budget");
    detail::check_cutoff(table, cut);

    // products of two truncated series reach degree 2 n_cut
    const std::uint64_t m = 2 * (2 * cut.n_cut + n) + 1;
    const auto roots = detail::roots_table(m);
    const double dn = static_cast<double>(n);

    struct Coeff {
        std::uint64_t n;
        double weight;
        std::size_t slot;
    };
    std::vector<Coeff> coeffs;
    for (std::uint64_t p : table.breakpoints()) {
        if (p > cut.n_cut) break;
        if (std::gcd(p, q) != 1) continue;
        coeffs.push_back({p, table[p] * std::exp(-static_cast<double>(p) / dn), 0});
    }
    std::size_t principal = 0;
    while (!group.is_principal(principal)) ++principal;

    // chi_j(n) per coefficient, cached
    std::vector<std::vector<complex>> chi(group.size(), std::vector<complex>(coeffs.size()));
    for (std::size_t j = 0; j < group.size(); ++j)
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            chi[j][i] = group.evaluate(j, static_cast<std::int64_t>(coeffs[i].n));

    CompensatedComplexSum principal_acc, character_acc;
    std::vector<complex> psi(group.size());
    for (std::uint64_t node = 0; node < m; ++node) {
        std::vector<CompensatedComplexSum> acc(group.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const complex zn =
                coeffs[i].weight * roots[static_cast<std::uint64_t>((static_cast<unsigned __int128>(coeffs[i].n) * node) % m)];
            for (std::size_t j = 0; j < group.size(); ++j) acc[j].add(chi[j][i] * zn);
        }
        for (std::size_t j = 0; j < group.size(); ++j) psi[j] = acc[j].value();
        const complex kern = kernel_inverse(CirclePoint::make(n, static_cast<double>(node) / static_cast<double>(m)));
        CompensatedComplexSum others;
        for (std::size_t j = 0; j < group.size(); ++j) {
            const complex term = static_cast<double>(group.parity(j)) * psi[j] * psi[group.conjugate(j)] * kern;
            if (j == principal)
                principal_acc.add(term);
            else
                others.add(term);
        }
        character_acc.add(others.value());
    }
    const double scale = static_cast<double>(m) * static_cast<double>(group.size());
    const complex i1 = principal_acc.value() / scale;
    const complex i2 = character_acc.value() / scale;
    const double l1 = kernel_l1(n).value;
    const double ln = std::log(dn), lq = std::log(static_cast<double>(q));
    const double target = goldbach_average_multiples(series, q, n);
    return {i1, i2, l1, ln * lq * ln * lq * l1, target, std::abs(i1 + i2 - target), m};
}

}  // namespace goldbach

#endif  // GOLDBACH_GENERATING_FUNCTIONS_HPP
