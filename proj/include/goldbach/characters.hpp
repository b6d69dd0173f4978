// characters.hpp
//
// The group of Dirichlet characters mod q, twisted Chebyshev functions
// psi(x, chi) and the mean squares
//
//   J1(X)    = int_0^X |psi(x, chi)|^2 dx,
//   J2(X, h) = int_0^X |psi(x + h, chi) - psi(x, chi)|^2 dx,
//
// integrated exactly as step functions (breakpoints on an exact dyadic grid).
//
// Characters are built from the cyclic decomposition of (Z/qZ)^*: a primitive
// root for each odd p^k, 3 for 4, and the pair {-1, 5} for 2^k with k >= 3.
// Character j has mixed-radix digits c_i (first component fastest) and
// chi_j(g_i) = e(c_i / n_i) on the i-th generator of order n_i. Values are
// kept as exact exponents k of e(k / E), E the group exponent; index 0 is the
// principal character.

#ifndef GOLDBACH_CHARACTERS_HPP
#define GOLDBACH_CHARACTERS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "goldbach/arithmetic.hpp"
#include "goldbach/errors.hpp"
#include "goldbach/numeric.hpp"

namespace goldbach {

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, b, m);
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
    while (nr != 0) {
        const std::int64_t qq = r / nr;
        t -= qq * nt;
        std::swap(t, nt);
        r -= qq * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw std::domain_error("inverse_mod: not invertible");
    return static_cast<std::uint64_t>(mod_floor(t, static_cast<std::int64_t>(m)));
}

/// Smallest primitive root mod an odd prime p.
inline std::uint64_t primitive_root(std::uint64_t p) {
    const auto fac = factorize(p - 1);
    for (std::uint64_t g = 2;; ++g) {
        bool ok = true;
        for (auto [f, e] : fac)
            if (pow_mod(g, (p - 1) / f, p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
}

}  // namespace detail

/// One cyclic factor of (Z/qZ)^*.
struct CyclicComponent {
    std::uint64_t prime;          // p
    std::uint64_t prime_power;    // p^k this factor lives in
    std::uint64_t generator;      // generator mod p^k
    std::uint64_t order;          // n_i
    std::uint64_t lifted;         // generator lifted to mod q (== 1 mod other prime powers)
};

/// e(numerator / denominator).
struct RootOfUnity {
    std::int64_t numerator;
    std::int64_t denominator;

    complex value() const {
        return unit_phase(static_cast<double>(numerator) / static_cast<double>(denominator));
    }
    friend bool operator==(const RootOfUnity& a, const RootOfUnity& b) {
        const __int128 lhs = static_cast<__int128>(a.numerator) * b.denominator -
                             static_cast<__int128>(b.numerator) * a.denominator;
        const __int128 den = static_cast<__int128>(a.denominator) * b.denominator;
        return lhs % den == 0;
    }
};

struct CharacterInfo {
    std::vector<std::uint64_t> digits;  // c_i, one per component
    int parity = 1;                     // chi(-1)
    std::uint64_t conductor = 1;
    std::size_t inducing_index = 0;     // primitive character in the group mod conductor
    bool principal = false;
};

class CharacterGroup {
public:
    std::uint64_t modulus() const noexcept { return q_; }
    std::size_t size() const noexcept { return chars_.size(); }
    std::uint64_t exponent() const noexcept { return exponent_; }
    std::span<const CyclicComponent> components() const noexcept { return comps_; }

    int parity(std::size_t j) const { return at(j).parity; }
    std::uint64_t conductor(std::size_t j) const { return at(j).conductor; }
    std::size_t inducing_index(std::size_t j) const { return at(j).inducing_index; }
    bool is_principal(std::size_t j) const { return at(j).principal; }
    bool is_primitive(std::size_t j) const { return at(j).conductor == q_; }
    std::span<const std::uint64_t> digits(std::size_t j) const { return at(j).digits; }

    /// Index of the complex-conjugate character.
    std::size_t conjugate(std::size_t j) const {
        const auto& d = at(j).digits;
        std::size_t idx = 0, radix = 1;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            idx += radix * ((comps_[i].order - d[i]) % comps_[i].order);
            radix *= comps_[i].order;
        }
        return idx;
    }

    /// chi_j(n) as an exact exponent of e(k / E); nullopt when gcd(n, q) > 1.
    std::optional<std::int64_t> exponent_of(std::size_t j, std::int64_t n) const {
        const auto& info = at(j);
        const auto a = static_cast<std::uint64_t>(detail::mod_floor(n, static_cast<std::int64_t>(q_)));
        const std::int64_t slot = unit_slot_[a];
        if (slot < 0) return std::nullopt;
        const std::uint64_t* logs = &logs_[static_cast<std::size_t>(slot) * comps_.size()];
        unsigned __int128 k = 0;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            k += static_cast<unsigned __int128>(info.digits[i]) * logs[i] * (exponent_ / comps_[i].order);
        return static_cast<std::int64_t>(k % exponent_);
    }

    std::optional<RootOfUnity> root(std::size_t j, std::int64_t n) const {
        const auto k = exponent_of(j, n);
        if (!k) return std::nullopt;
        return RootOfUnity{*k, static_cast<std::int64_t>(exponent_)};
    }

    /// chi_j(n mod q), 0 off the units.
    complex evaluate(std::size_t j, std::int64_t n) const {
        const auto r = root(j, n);
        return r ? r->value() : complex(0.0, 0.0);
    }

    /// chi_j(0), ..., chi_j(q - 1).
    std::vector<complex> value_table(std::size_t j) const {
        std::vector<complex> out(q_);
        for (std::uint64_t n = 0; n < q_; ++n) out[n] = evaluate(j, static_cast<std::int64_t>(n));
        return out;
    }

private:
    friend CharacterGroup build_character_group(std::uint64_t q, bool resolve_inducing);

    const CharacterInfo& at(std::size_t j) const {
        if (j >= chars_.size()) throw std::out_of_range("CharacterGroup: character index out of range");
        return chars_[j];
    }

    std::uint64_t q_ = 1;
    std::uint64_t exponent_ = 1;
    std::vector<CyclicComponent> comps_;
    std::vector<std::int64_t> unit_slot_;  // n mod q -> row in logs_, -1 for non-units
    std::vector<std::uint64_t> logs_;      // discrete logs, comps_.size() per unit
    std::vector<CharacterInfo> chars_;
};

/// All phi(q) characters mod q. With resolve_inducing the primitive character
/// inducing each imprimitive one is located in the group mod its conductor.
inline CharacterGroup build_character_group(std::uint64_t q, bool resolve_inducing = true) {
    if (q == 0) throw std::domain_error("build_character_group: q must be >= 1");
    CharacterGroup g;
    g.q_ = q;

    // cyclic decomposition
    for (auto [p, e] : factorize(q)) {
        std::uint64_t pk = 1;
        for (int i = 0; i < e; ++i) pk *= p;
        const std::uint64_t rest = q / pk;
        const std::uint64_t idem = rest == 1 ? 1 : detail::mul_mod(rest, detail::inverse_mod(rest % pk, pk), q);
        auto lift = [&](std::uint64_t a) {
            // x = a mod p^k, x = 1 mod q / p^k
            const std::uint64_t am1 = (a + q - 1) % q;
            return (1 + detail::mul_mod(am1, idem, q)) % q;
        };
        if (p == 2) {
            if (e == 2) g.comps_.push_back({2, 4, 3, 2, lift(3)});
            if (e >= 3) {
                g.comps_.push_back({2, pk, pk - 1, 2, lift(pk - 1)});
                g.comps_.push_back({2, pk, 5, pk / 4, lift(5)});
            }
        } else {
            std::uint64_t root = detail::primitive_root(p);
            if (e >= 2 && detail::pow_mod(root, p - 1, p * p) == 1) root += p;
            g.comps_.push_back({p, pk, root, pk / p * (p - 1), lift(root)});
        }
    }
    g.exponent_ = 1;
    for (const auto& c : g.comps_) g.exponent_ = std::lcm(g.exponent_, c.order);

    // discrete logs by enumerating exponent tuples
    const std::size_t r = g.comps_.size();
    std::size_t phi = 1;
    for (const auto& c : g.comps_) phi *= c.order;
    g.unit_slot_.assign(q, -1);
    g.logs_.assign(phi * r, 0);
    {
        std::vector<std::uint64_t> e(r, 0);
        for (std::size_t slot = 0; slot < phi; ++slot) {
            std::uint64_t a = 1 % q;
            for (std::size_t i = 0; i < r; ++i) a = detail::mul_mod(a, detail::pow_mod(g.comps_[i].lifted, e[i], q), q);
            if (q == 1) a = 0;
            g.unit_slot_[a] = static_cast<std::int64_t>(slot);
            std::copy(e.begin(), e.end(), g.logs_.begin() + static_cast<std::ptrdiff_t>(slot * r));
            for (std::size_t i = 0; i < r; ++i) {
                if (++e[i] < g.comps_[i].order) break;
                e[i] = 0;
            }
        }
    }

    g.chars_.resize(phi);
    for (std::size_t j = 0; j < phi; ++j) {
        auto& info = g.chars_[j];
        info.digits.resize(r);
        std::size_t rem = j;
        for (std::size_t i = 0; i < r; ++i) {
            info.digits[i] = rem % g.comps_[i].order;
            rem /= g.comps_[i].order;
        }
        info.principal = (j == 0);
    }

    for (std::size_t j = 0; j < phi; ++j) {
        auto& info = g.chars_[j];
        const auto k = *g.exponent_of(j, static_cast<std::int64_t>(q) - 1);
        info.parity = (k == 0) ? 1 : -1;

        // conductor: per prime, the smallest p^i with chi trivial on 1 + p^i Z
        std::uint64_t cond = 1;
        std::uint64_t last_p = 0;
        for (const auto& c : g.comps_) {
            if (c.prime == last_p) continue;
            last_p = c.prime;
            const std::uint64_t pk = c.prime_power;
            const std::uint64_t rest = q / pk;
            const std::uint64_t idem = rest == 1 ? 1 : detail::mul_mod(rest, detail::inverse_mod(rest % pk, pk), q);
            std::uint64_t best = pk;
            for (std::uint64_t d = 1; d < pk; d *= c.prime) {
                bool trivial = true;
                for (std::uint64_t a = 1 + d; a < pk + 1 && trivial; a += d) {
                    if (a % c.prime == 0) continue;
                    const std::uint64_t x = (1 + detail::mul_mod((a + q - 1) % q, idem, q)) % q;
                    if (*g.exponent_of(j, static_cast<std::int64_t>(x)) != 0) trivial = false;
                }
                if (trivial) {
                    best = d;
                    break;
                }
            }
            cond *= best;
        }
        info.conductor = cond;
        info.inducing_index = j;
    }

    if (resolve_inducing) {
        std::map<std::uint64_t, CharacterGroup> sub;
        for (std::size_t j = 0; j < phi; ++j) {
            auto& info = g.chars_[j];
            if (info.conductor == q) continue;
            auto it = sub.find(info.conductor);
            if (it == sub.end()) it = sub.emplace(info.conductor, build_character_group(info.conductor, false)).first;
            const CharacterGroup& h = it->second;
            bool found = false;
            for (std::size_t c = 0; c < h.size() && !found; ++c) {
                if (!h.is_primitive(c)) continue;
                bool match = true;
                for (const auto& comp : g.comps_) {
                    const auto x = static_cast<std::int64_t>(comp.lifted);
                    if (!(*h.root(c, x) == *g.root(j, x))) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    info.inducing_index = c;
                    found = true;
                }
            }
            if (!found) throw std::logic_error("build_character_group: inducing character not found");
        }
    }
    return g;
}

// ---- twisted Chebyshev functions ------------------------------------------

/// psi(x, chi) as a step function: jump positions (prime powers with
/// chi != 0) and the running values after each jump.
class TwistedPsiPath {
public:
    TwistedPsiPath(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j, double x_max) {
        if (x_max > static_cast<double>(table.n_max()))
            throw std::out_of_range("twisted psi: x exceeds table n_max");
        const auto bp = table.breakpoints();
        const std::size_t k = table.count_upto(x_max);
        CompensatedComplexSum acc;
        for (std::size_t i = 0; i < k; ++i) {
            const complex c = group.evaluate(j, static_cast<std::int64_t>(bp[i]));
            if (c == complex(0.0, 0.0)) continue;
            const complex jump = c * table[bp[i]];
            acc.add(jump);
            positions_.push_back(bp[i]);
            jumps_.push_back(jump);
            values_.push_back(acc.value());
        }
        x_max_ = x_max;
    }

    complex operator()(double x) const {
        if (x > x_max_) throw std::out_of_range("twisted psi: x beyond path range");
        if (x < 2.0) return {0.0, 0.0};
        const auto fx = static_cast<std::uint64_t>(std::floor(x));
        const auto it = std::upper_bound(positions_.begin(), positions_.end(), fx);
        return it == positions_.begin() ? complex(0.0, 0.0) : values_[static_cast<std::size_t>(it - positions_.begin()) - 1];
    }

    std::span<const std::uint64_t> positions() const noexcept { return positions_; }
    std::span<const complex> jumps() const noexcept { return jumps_; }
    std::span<const complex> values() const noexcept { return values_; }

private:
    std::vector<std::uint64_t> positions_;
    std::vector<complex> jumps_;
    std::vector<complex> values_;
    double x_max_ = 0.0;
};

/// psi(x, chi) = sum_{n <= x} chi(n) Lambda(n).
inline complex twisted_psi(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j, double x) {
    if (x > static_cast<double>(table.n_max())) throw std::out_of_range("twisted_psi: x exceeds table n_max");
    if (x < 2.0) return {0.0, 0.0};
    return TwistedPsiPath(table, group, j, x)(x);
}

inline double j1_moment(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j, double x) {
    if (!(x >= 0.0)) throw std::domain_error("j1_moment: X must be >= 0");
    if (x > static_cast<double>(table.n_max())) throw std::out_of_range("j1_moment: X exceeds table n_max");
    const TwistedPsiPath path(table, group, j, x);
    const auto xd = DyadicRational::from_double(x);
    const int shift = xd.shift;
    std::vector<StepEvent> ev;
    ev.reserve(path.positions().size());
    for (std::size_t i = 0; i < path.positions().size(); ++i)
        ev.push_back({scale_integer(static_cast<std::int64_t>(path.positions()[i]), shift), path.jumps()[i]});
    return integrate_step_squared(std::move(ev), {0.0, 0.0}, 0, scale_dyadic(xd, shift), shift);
}

inline double j2_moment(const VonMangoldtTable& table, const CharacterGroup& group, std::size_t j, double x,
                        double h) {
    if (!(h >= 0.0)) throw std::domain_error("j2_moment: h must be >= 0");
    if (h > x) throw std::domain_error("j2_moment: h must not exceed X");
    if (x + h > static_cast<double>(table.n_max())) throw std::out_of_range("j2_moment: X + h exceeds table n_max");
    if (h == 0.0) return 0.0;
    const auto xd = DyadicRational::from_double(x);
    const auto hd = DyadicRational::from_double(h);
    const int shift = std::max(xd.shift, hd.shift);
    const scaled_int xs = scale_dyadic(xd, shift);
    const scaled_int hs = scale_dyadic(hd, shift);

    const TwistedPsiPath path(table, group, j, x + h);
    std::vector<StepEvent> ev;
    complex initial(0.0, 0.0);
    for (std::size_t i = 0; i < path.positions().size(); ++i) {
        const scaled_int n = scale_integer(static_cast<std::int64_t>(path.positions()[i]), shift);
        const complex jump = path.jumps()[i];
        // psi(x + h) gains the jump at x = n - h
        if (n <= hs)
            initial += jump;
        else if (n - hs <= xs)
            ev.push_back({n - hs, jump});
        // psi(x) gains it at x = n
        if (n <= xs) ev.push_back({n, -jump});
    }
    return integrate_step_squared(std::move(ev), initial, 0, xs, shift);
}

struct ImprimitivityDefect {
    double defect;  // |psi(x, chi) - psi(x, chi*)|
    double bound;   // sum_{n <= x, (n, q) > 1} Lambda(n)
};

/// sum_{p | q} sum_{p^m <= x} log p.
inline double imprimitivity_bound(const VonMangoldtTable& table, std::uint64_t q, double x) {
    if (x > static_cast<double>(table.n_max())) throw std::out_of_range("imprimitivity_bound: x exceeds table n_max");
    CompensatedSum acc;
    for (auto [p, e] : factorize(q)) {
        const double lp = table[p <= table.n_max() ? p : 0];
        if (lp == 0.0) continue;
        for (std::uint64_t pm = p; static_cast<double>(pm) <= x; pm *= p) acc.add(lp);
    }
    return acc.value();
}

/// |psi(x, chi) - psi(x, chi*)| where chi* mod q* induces chi. The two sums
/// differ only on prime powers of primes dividing q, where chi vanishes, so
/// the difference is sum over those n of chi*(n) Lambda(n). Primitive chi
/// gives 0.
inline ImprimitivityDefect imprimitivity_defect(const VonMangoldtTable& table, const CharacterGroup& group,
                                                std::size_t j, double x, const CharacterGroup* inducing_group = nullptr) {
    const double bound = imprimitivity_bound(table, group.modulus(), x);
    if (group.is_primitive(j)) return {0.0, bound};
    const std::uint64_t qs = group.conductor(j);
    std::optional<CharacterGroup> built;
    if (!inducing_group || inducing_group->modulus() != qs) {
        built = build_character_group(qs, false);
        inducing_group = &*built;
    }
    const std::size_t js = group.inducing_index(j);
    CompensatedComplexSum diff;
    for (auto [p, e] : factorize(group.modulus())) {
        if (p > table.n_max()) continue;
        const double lp = table[p];
        for (std::uint64_t pm = p; static_cast<double>(pm) <= x; pm *= p) {
            const complex chi = group.evaluate(j, static_cast<std::int64_t>(pm));
            const complex chi_star = inducing_group->evaluate(js, static_cast<std::int64_t>(pm));
            diff.add((chi - chi_star) * lp);
        }
    }
    return {std::abs(diff.value()), bound};
}

// ---- moment bound ratios ---------------------------------------------------

/// Window length as a function of X.
struct WindowRule {
    enum class Kind { zero, constant, fraction, sqrt } kind = Kind::constant;
    double value = 1.0;

    static WindowRule zero() { return {Kind::zero, 0.0}; }
    static WindowRule constant(double h) { return {Kind::constant, h}; }
    static WindowRule fraction(double f) { return {Kind::fraction, f}; }
    static WindowRule square_root() { return {Kind::sqrt, 0.0}; }

    double apply(double x) const {
        switch (kind) {
            case Kind::zero: return 0.0;
            case Kind::constant: return value;
            case Kind::fraction: return value * x;
            case Kind::sqrt: return std::sqrt(x);
        }
        return 0.0;
    }
    std::string label() const {
        switch (kind) {
            case Kind::zero: return "0";
            case Kind::constant: return fmt(value);
            case Kind::fraction: return "X*" + fmt(value);
            case Kind::sqrt: return "sqrt(X)";
        }
        return "?";
    }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
};

struct MomentRow {
    std::uint64_t q;
    std::size_t char_index;
    std::uint64_t conductor;
    double x;
    double h;
    double j1;
    double j2;
    double ratio1;  // J1 / (X^2 log^2(2q))
    double ratio2;  // J2 / ((h + 1) X log^2(3qX / (h + 1)))
    std::string rule;
};

inline std::vector<MomentRow> gv_bound_ratios(const VonMangoldtTable& table, const CharacterGroup& group,
                                              std::size_t j, std::span<const double> xs,
                                              std::span<const WindowRule> rules) {
    if (group.is_principal(j)) throw std::domain_error("gv_bound_ratios: principal character");
    const double q = static_cast<double>(group.modulus());
    std::vector<MomentRow> rows;
    for (double x : xs) {
        if (x < 1.0) throw std::domain_error("gv_bound_ratios: X must be >= 1");
        const double j1 = j1_moment(table, group, j, x);
        const double l1 = std::log(2.0 * q);
        for (const auto& rule : rules) {
            const double h = rule.apply(x);
            const double j2 = j2_moment(table, group, j, x, h);
            const double l2 = std::log(3.0 * q * x / (h + 1.0));
            rows.push_back({group.modulus(), j, group.conductor(j), x, h, j1, j2, j1 / (x * x * l1 * l1),
                            j2 / ((h + 1.0) * x * l2 * l2), rule.label()});
        }
    }
    return rows;
}

}  // namespace goldbach

#endif  // GOLDBACH_CHARACTERS_HPP
