// numeric.hpp
//
// Small numeric helpers: compensated accumulators, accurate unit-circle
// phases, exact dyadic rationals and the sweep that integrates |f|^2 of a
// complex step function.

#ifndef GOLDBACH_NUMERIC_HPP
#define GOLDBACH_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace goldbach {

using complex = std::complex<double>;

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(complex z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }
    CompensatedComplexSum& operator+=(complex z) noexcept {
        add(z);
        return *this;
    }
    complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

/// Fractional part of n*x in [0, 1), with the rounding error of the product
/// recovered by an FMA so the result is accurate to ~1 ulp of 1.
inline double frac_product(double n, double x) noexcept {
    const double p = n * x;
    const double err = std::fma(n, x, -p);
    const double fp = p - std::floor(p);
    double f = fp + err;
    f -= std::floor(f);
    return f;
}

/// e(t) = exp(2 pi i t) for t given as a fraction of a turn. Quarter turns
/// are returned exactly.
inline complex unit_phase(double turns) noexcept {
    double t = turns - std::floor(turns);
    if (t == 0.0) return {1.0, 0.0};
    if (t == 0.25) return {0.0, 1.0};
    if (t == 0.5) return {-1.0, 0.0};
    if (t == 0.75) return {0.0, -1.0};
    if (t > 0.5) t -= 1.0;
    const double a = 2.0 * std::numbers::pi * t;
    return {std::cos(a), std::sin(a)};
}

/// An exact value m * 2^-shift. Every finite double converts exactly.
struct DyadicRational {
    std::int64_t mantissa = 0;
    int shift = 0;  // denominator exponent, >= 0

    static DyadicRational from_integer(std::int64_t n) { return {n, 0}; }

    static DyadicRational from_double(double x) {
        if (!std::isfinite(x)) throw std::domain_error("dyadic rational: non-finite value");
        if (x == 0.0) return {0, 0};
        int exp = 0;
        const double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
        auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        int sh = 53 - exp;
        while (sh > 0 && (mant & 1) == 0) {
            mant /= 2;
            --sh;
        }
        if (sh < 0) {
            if (sh < -10) throw std::domain_error("dyadic rational: magnitude too large");
            mant <<= -sh;
            sh = 0;
        }
        return {mant, sh};
    }

    double to_double() const noexcept { return std::ldexp(static_cast<double>(mantissa), -shift); }
    bool is_integer() const noexcept { return shift == 0; }
};

using scaled_int = __int128;

/// Position of an integer n on the grid 2^-shift.
inline scaled_int scale_integer(std::int64_t n, int shift) noexcept {
    return static_cast<scaled_int>(n) << shift;
}

inline scaled_int scale_dyadic(const DyadicRational& d, int shift) noexcept {
    return static_cast<scaled_int>(d.mantissa) << (shift - d.shift);
}

inline double unscale(scaled_int v, int shift) noexcept {
    return std::ldexp(static_cast<double>(v), -shift);
}

/// A jump of a step function at an exact grid position.
struct StepEvent {
    scaled_int position;
    complex jump;
};

/// Integral of |f|^2 over [from, to] where f is the right-continuous step
/// function that equals `initial` left of every event and jumps by each
/// event's amount at its position. Events may be unsorted and may coincide.
inline double integrate_step_squared(std::vector<StepEvent> events, complex initial,
                                     scaled_int from, scaled_int to, int shift) {
    if (to <= from) return 0.0;
    std::stable_sort(events.begin(), events.end(),
                     [](const StepEvent& a, const StepEvent& b) { return a.position < b.position; });
    CompensatedComplexSum value;
    value.add(initial);
    CompensatedSum total;
    scaled_int cursor = from;
    std::size_t i = 0;
    while (i < events.size() && events[i].position <= from) value.add(events[i++].jump);
    while (cursor < to) {
        const scaled_int next = i < events.size() ? std::min(events[i].position, to) : to;
        if (next > cursor) total.add(std::norm(value.value()) * unscale(next - cursor, shift));
        cursor = next;
        while (i < events.size() && events[i].position == cursor) value.add(events[i++].jump);
    }
    return total.value();
}

}  // namespace goldbach

#endif  // GOLDBACH_NUMERIC_HPP
