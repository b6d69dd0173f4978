// goldbach_counts.hpp
//
// psi_2(n) = sum_{m+m'=n} Lambda(m) Lambda(m'), its running sum G(N), the
// restricted sums G_q(N) over multiples of q, and the error term
// G_q(N) - G(N)/phi(q).
//
// Two constructions of psi_2:
//   psi2_direct  pairs of prime powers, quadratic, exact up to rounding;
//   psi2_fast    real-input FFT autoconvolution (FFTW, estimate-mode plans,
//                so repeated runs are bit-identical).
//
// Cache file layout (little-endian):
//   8 bytes  magic "GBPSI2\0\0"
//   u32      version (1)
//   u32      reserved (0)
//   u64      n_max
//   f64 x (n_max + 1)   psi_2(0..n_max)
// The running sums are rebuilt on load.

#ifndef GOLDBACH_GOLDBACH_COUNTS_HPP
#define GOLDBACH_GOLDBACH_COUNTS_HPP

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "goldbach/arithmetic.hpp"
#include "goldbach/errors.hpp"
#include "goldbach/numeric.hpp"

namespace goldbach {

/// Largest N accepted by psi2_direct.
inline constexpr std::uint64_t kDirectBudget = 100'000;

/// Largest transform length psi2_fast will allocate (two buffers of this many
/// doubles / complex halves, ~1.6 GB at the limit).
inline constexpr std::uint64_t kMaxTransform = std::uint64_t{1} << 27;

class Psi2Series {
public:
    Psi2Series() = default;

    /// Takes psi_2(0..n_max).
    explicit Psi2Series(std::vector<double> psi2) : psi2_(std::move(psi2)) {
        if (psi2_.size() < 3) throw std::domain_error("Psi2Series: n_max must be >= 2");
        prefix_.assign(psi2_.size(), 0.0);
        CompensatedSum acc;
        for (std::size_t n = 0; n < psi2_.size(); ++n) {
            acc.add(psi2_[n]);
            prefix_[n] = acc.value();
        }
    }

    std::uint64_t n_max() const noexcept { return psi2_.empty() ? 0 : psi2_.size() - 1; }

    double psi2(std::uint64_t n) const {
        if (n < 2 || n > n_max()) throw std::out_of_range("Psi2Series: index outside [2, n_max]");
        return psi2_[n];
    }

    /// G(N) for 2 <= N <= n_max.
    double prefix(std::uint64_t n) const {
        if (n < 2 || n > n_max()) throw std::out_of_range("Psi2Series: index outside [2, n_max]");
        return prefix_[n];
    }

    /// Raw psi_2 array indexed 0..n_max (entries 0 and 1 are zero).
    std::span<const double> raw() const noexcept { return psi2_; }

private:
    std::vector<double> psi2_;
    std::vector<double> prefix_;
};

namespace detail {

inline void check_series_range(const VonMangoldtTable& table, std::uint64_t n) {
    if (n < 2) throw std::domain_error("psi2: N must be >= 2");
    if (n > table.n_max()) throw std::out_of_range("psi2: N exceeds table n_max");
}

/// Smallest 2^a 3^b 5^c 7^d >= n.
inline std::uint64_t smooth_size_at_least(std::uint64_t n) {
    std::uint64_t best = std::bit_ceil(n);
    for (std::uint64_t a = 1; a <= best; a *= 2)
        for (std::uint64_t b = a; b <= best; b *= 3)
            for (std::uint64_t c = b; c <= best; c *= 5)
                for (std::uint64_t d = c; d <= best; d *= 7)
                    if (d >= n && d < best) best = d;
    return best;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDeleter {
    void operator()(fftw_plan p) const noexcept { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDeleter>;

}  // namespace detail

inline Psi2Series psi2_direct(const VonMangoldtTable& table, std::uint64_t n) {
    detail::check_series_range(table, n);
    if (n > kDirectBudget)
        throw resource_error("psi2_direct: N = " + std::to_string(n) + " exceeds the direct budget " +
                             std::to_string(kDirectBudget) + "; use psi2_fast");
    const auto bp = table.breakpoints();
    const std::size_t k = table.count_upto(static_cast<double>(n));
    std::vector<CompensatedSum> acc(n + 1);
    for (std::size_t i = 0; i < k; ++i) {
        const double li = table[bp[i]];
        for (std::size_t j = i; j < k && bp[i] + bp[j] <= n; ++j) {
            const double prod = li * table[bp[j]];
            acc[bp[i] + bp[j]].add(i == j ? prod : 2.0 * prod);
        }
    }
    std::vector<double> out(n + 1, 0.0);
    for (std::uint64_t m = 4; m <= n; ++m) out[m] = acc[m].value();
    return Psi2Series(std::move(out));
}

/// psi_2(n) by enumerating every prime power m < n.
inline double psi2_entry(const VonMangoldtTable& table, std::uint64_t n) {
    if (n > table.n_max()) throw std::out_of_range("psi2_entry: n exceeds table n_max");
    CompensatedSum acc;
    for (std::uint64_t m : table.breakpoints()) {
        if (m >= n) break;
        acc.add(table[m] * table[n - m]);
    }
    return acc.value();
}

/// Expected per-entry absolute error of psi2_fast: N log N eps (max Lambda)^2.
inline double psi2_fast_error_model(std::uint64_t n) {
    const double dn = static_cast<double>(n);
    const double lmax = std::log(dn);
    return dn * std::log(dn) * std::numeric_limits<double>::epsilon() * lmax * lmax;
}

inline Psi2Series psi2_fast(const VonMangoldtTable& table, std::uint64_t n) {
    detail::check_series_range(table, n);
    const std::uint64_t len = detail::smooth_size_at_least(2 * n + 1);
    if (len > kMaxTransform)
        throw resource_error("psi2_fast: transform length " + std::to_string(len) +
                             " exceeds capacity " + std::to_string(kMaxTransform));

    const std::size_t half = len / 2 + 1;
    std::unique_ptr<double, detail::FftwFree> real(fftw_alloc_real(len));
    std::unique_ptr<fftw_complex, detail::FftwFree> spec(fftw_alloc_complex(half));
    if (!real || !spec) throw resource_error("psi2_fast: transform allocation failed");

    const int ilen = static_cast<int>(len);
    detail::FftwPlan forward(fftw_plan_dft_r2c_1d(ilen, real.get(), spec.get(), FFTW_ESTIMATE));
    detail::FftwPlan backward(fftw_plan_dft_c2r_1d(ilen, spec.get(), real.get(), FFTW_ESTIMATE));

    double* a = real.get();
    const auto lam = table.values();
    std::fill(a, a + len, 0.0);
    std::copy(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(n + 1), a);

    fftw_execute(forward.get());
    fftw_complex* s = spec.get();
    for (std::size_t i = 0; i < half; ++i) {
        const double re = s[i][0], im = s[i][1];
        s[i][0] = re * re - im * im;
        s[i][1] = 2.0 * re * im;
    }
    fftw_execute(backward.get());

    const double scale = 1.0 / static_cast<double>(len);
    std::vector<double> out(n + 1, 0.0);
    for (std::uint64_t m = 4; m <= n; ++m) out[m] = std::max(0.0, a[m] * scale);
    return Psi2Series(std::move(out));
}

/// G(N) = sum_{n <= N} psi_2(n).
inline double goldbach_average(const Psi2Series& series, std::uint64_t n) {
    if (n < 4) throw std::domain_error("goldbach_average: N must be >= 4");
    if (n > series.n_max()) throw std::out_of_range("goldbach_average: N exceeds series n_max");
    return series.prefix(n);
}

/// G_q(N) = sum_{n <= N, q | n} psi_2(n); G_1 = G.
inline double goldbach_average_multiples(const Psi2Series& series, std::uint64_t q, std::uint64_t n) {
    if (q < 1) throw std::domain_error("goldbach_average_multiples: q must be >= 1");
    if (q > n) throw std::domain_error("goldbach_average_multiples: q must not exceed N");
    if (n > series.n_max()) throw std::out_of_range("goldbach_average_multiples: N exceeds series n_max");
    if (q == 1) return series.prefix(std::max<std::uint64_t>(n, 2));
    const auto raw = series.raw();
    CompensatedSum acc;
    for (std::uint64_t m = q; m <= n; m += q) acc.add(raw[m]);
    return acc.value();
}

/// G^{(a)}(N) for each residue a = 0..q-1.
inline std::vector<double> residue_class_sums(const Psi2Series& series, std::uint64_t q, std::uint64_t n) {
    if (q < 1) throw std::domain_error("residue_class_sums: q must be >= 1");
    if (n > series.n_max()) throw std::out_of_range("residue_class_sums: N exceeds series n_max");
    std::vector<CompensatedSum> acc(q);
    const auto raw = series.raw();
    for (std::uint64_t m = 2; m <= n; ++m) acc[m % q].add(raw[m]);
    std::vector<double> out(q);
    for (std::uint64_t a = 0; a < q; ++a) out[a] = acc[a].value();
    return out;
}

struct ErrorTerm {
    double raw;         // G_q(N) - G(N)/phi(q)
    double normalized;  // |raw| / (N log^3 N)
};

inline ErrorTerm error_term(const Psi2Series& series, std::uint64_t q, std::uint64_t n) {
    if (n < 4) throw std::domain_error("error_term: N must be >= 4");
    if (q < 2) throw std::domain_error("error_term: q must be >= 2");
    const double gq = goldbach_average_multiples(series, q, n);
    const double g = goldbach_average(series, n);
    const double raw = gq - g / static_cast<double>(euler_phi(q));
    const double dn = static_cast<double>(n);
    const double l = std::log(dn);
    return {raw, std::abs(raw) / (dn * l * l * l)};
}

// ---- cache ---------------------------------------------------------------

namespace detail {
inline constexpr char kCacheMagic[8] = {'G', 'B', 'P', 'S', 'I', '2', '\0', '\0'};
inline constexpr std::uint32_t kCacheVersion = 1;

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

template <class T>
void write_le(std::ostream& out, T v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw parse_error("psi2 cache: truncated stream", 0);
    return to_little(v);
}
}  // namespace detail

inline void write_psi2_cache(std::ostream& out, const Psi2Series& series) {
    out.write(detail::kCacheMagic, sizeof detail::kCacheMagic);
    detail::write_le<std::uint32_t>(out, detail::kCacheVersion);
    detail::write_le<std::uint32_t>(out, 0);
    detail::write_le<std::uint64_t>(out, series.n_max());
    for (double v : series.raw()) detail::write_le<double>(out, v);
    if (!out) throw std::runtime_error("psi2 cache: write failed");
}

inline Psi2Series read_psi2_cache(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, detail::kCacheMagic, sizeof magic) != 0)
        throw parse_error("psi2 cache: bad magic", 0);
    if (detail::read_le<std::uint32_t>(in) != detail::kCacheVersion)
        throw parse_error("psi2 cache: unsupported version", 0);
    (void)detail::read_le<std::uint32_t>(in);
    const auto n_max = detail::read_le<std::uint64_t>(in);
    if (n_max < 2 || n_max > kMaxSieve) throw parse_error("psi2 cache: implausible n_max", 0);
    std::vector<double> values(n_max + 1);
    for (auto& v : values) v = detail::read_le<double>(in);
    return Psi2Series(std::move(values));
}

}  // namespace goldbach

#endif  // GOLDBACH_GOLDBACH_COUNTS_HPP
