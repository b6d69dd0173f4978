// arithmetic.hpp
//
// Von Mangoldt table from a smallest-prime-factor linear sieve, Chebyshev
// psi as an exact step function, and factorization / totient helpers.

#ifndef GOLDBACH_ARITHMETIC_HPP
#define GOLDBACH_ARITHMETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goldbach/errors.hpp"
#include "goldbach/numeric.hpp"

namespace goldbach {

/// Largest n_max accepted by sieve_von_mangoldt. The table keeps 8 bytes per
/// integer plus 16 per prime power; construction briefly needs 4 more bytes
/// per integer for the smallest-prime-factor array (~2.4 GB at the limit).
inline constexpr std::uint64_t kMaxSieve = 200'000'000;

/// Lambda(n) for 1 <= n <= n_max, the prime powers in ascending order, and
/// psi(x) at every prime power.
class VonMangoldtTable {
public:
    VonMangoldtTable() = default;

    std::uint64_t n_max() const noexcept { return n_max_; }

    /// Lambda(n); 0 for n = 0 and n = 1.
    double operator[](std::uint64_t n) const { return values_.at(n); }

    /// values()[n] = Lambda(n), index 0 unused (zero).
    std::span<const double> values() const noexcept { return values_; }

    /// Prime powers p^k <= n_max, strictly increasing.
    std::span<const std::uint64_t> breakpoints() const noexcept { return breakpoints_; }

    /// Underlying prime of breakpoints()[i].
    std::span<const std::uint64_t> breakpoint_primes() const noexcept { return bases_; }

    /// psi(breakpoints()[i]), compensated partial sums.
    std::span<const double> psi_at_breakpoints() const noexcept { return psi_; }

    /// Number of prime powers <= x.
    std::size_t count_upto(double x) const noexcept {
        if (x < 2.0) return 0;
        const auto fx = static_cast<std::uint64_t>(std::floor(x));
        return static_cast<std::size_t>(
            std::upper_bound(breakpoints_.begin(), breakpoints_.end(), fx) - breakpoints_.begin());
    }

private:
    friend VonMangoldtTable sieve_von_mangoldt(std::uint64_t n_max);

    std::uint64_t n_max_ = 0;
    std::vector<double> values_;
    std::vector<std::uint64_t> breakpoints_;
    std::vector<std::uint64_t> bases_;
    std::vector<double> psi_;
};

inline VonMangoldtTable sieve_von_mangoldt(std::uint64_t n_max) {
    if (n_max < 1) throw std::domain_error("sieve_von_mangoldt: n_max must be >= 1");
    if (n_max > kMaxSieve)
        throw resource_error("sieve_von_mangoldt: n_max " + std::to_string(n_max) +
                             " exceeds the sieve capacity " + std::to_string(kMaxSieve));

    VonMangoldtTable t;
    t.n_max_ = n_max;
    t.values_.assign(n_max + 1, 0.0);

    std::vector<std::uint32_t> primes;
    {
        std::vector<std::uint32_t> spf(n_max + 1, 0);
        for (std::uint64_t i = 2; i <= n_max; ++i) {
            if (spf[i] == 0) {
                spf[i] = static_cast<std::uint32_t>(i);
                primes.push_back(static_cast<std::uint32_t>(i));
            }
            for (std::uint32_t p : primes) {
                const std::uint64_t m = p * i;
                if (p > spf[i] || m > n_max) break;
                spf[m] = p;
            }
        }
    }

    // log p once per prime; every power reuses the same bits.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> powers;  // (p^k, p)
    powers.reserve(primes.size() + primes.size() / 8);
    for (std::uint32_t p : primes) {
        const double lp = std::log(static_cast<double>(p));
        for (std::uint64_t pk = p;; pk *= p) {
            t.values_[pk] = lp;
            powers.emplace_back(pk, p);
            if (pk > n_max / p) break;
        }
    }
    std::sort(powers.begin(), powers.end());

    t.breakpoints_.reserve(powers.size());
    t.bases_.reserve(powers.size());
    t.psi_.reserve(powers.size());
    CompensatedSum acc;
    for (auto [n, p] : powers) {
        t.breakpoints_.push_back(n);
        t.bases_.push_back(p);
        acc.add(t.values_[n]);
        t.psi_.push_back(acc.value());
    }
    return t;
}

/// psi(x) = sum_{n <= x} Lambda(n).
inline double chebyshev_psi(const VonMangoldtTable& table, double x) {
    if (!(x >= 0.0)) throw std::domain_error("chebyshev_psi: x must be >= 0");
    if (x > static_cast<double>(table.n_max()))
        throw std::out_of_range("chebyshev_psi: x exceeds table n_max");
    const std::size_t k = table.count_upto(x);
    return k == 0 ? 0.0 : table.psi_at_breakpoints()[k - 1];
}

/// Ascending (prime, exponent) pairs; empty for q = 1.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t q) {
    if (q < 1) throw std::domain_error("factorize: q must be >= 1");
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t p = 2; p * p <= q; ++p) {
        if (q % p) continue;
        int e = 0;
        while (q % p == 0) {
            q /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (q > 1) out.emplace_back(q, 1);
    return out;
}

inline std::uint64_t euler_phi(std::uint64_t q) {
    if (q < 1) throw std::domain_error("euler_phi: q must be >= 1");
    std::uint64_t phi = q;
    for (auto [p, e] : factorize(q)) phi = phi / p * (p - 1);
    return phi;
}

/// Ascending divisors of q.
inline std::vector<std::uint64_t> divisors(std::uint64_t q) {
    std::vector<std::uint64_t> d{1};
    for (auto [p, e] : factorize(q)) {
        const std::size_t k = d.size();
        std::uint64_t pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < k; ++j) d.push_back(d[j] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace goldbach

#endif  // GOLDBACH_ARITHMETIC_HPP
