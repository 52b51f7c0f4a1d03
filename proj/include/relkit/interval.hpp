#ifndef RELKIT_INTERVAL_HPP
#define RELKIT_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace relkit {

/// Closed interval with outward rounding: every operation widens its result by
/// one ulp on each side, so the result encloses the exact real-valued image.
template <class Scalar>
struct Interval {
    Scalar lo{};
    Scalar hi{};

    Interval() = default;
    constexpr Interval(Scalar value) : lo(value), hi(value) {}  // NOLINT: implicit on purpose
    constexpr Interval(Scalar l, Scalar h) : lo(l), hi(h) {}

    /// Encloses a decimal literal that may not be representable.
    static Interval literal(Scalar value) {
        if (value == std::trunc(value) && std::abs(value) < Scalar(1) / std::numeric_limits<Scalar>::epsilon())
            return Interval(value);
        return Interval(down(value), up(value));
    }

    static Scalar down(Scalar v) { return std::nextafter(v, -std::numeric_limits<Scalar>::infinity()); }
    static Scalar up(Scalar v) { return std::nextafter(v, std::numeric_limits<Scalar>::infinity()); }

    Scalar width() const { return hi - lo; }
    bool contains(Scalar v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

template <class S>
Interval<S> operator+(const Interval<S>& a, const Interval<S>& b) {
    return {Interval<S>::down(a.lo + b.lo), Interval<S>::up(a.hi + b.hi)};
}

template <class S>
Interval<S> operator-(const Interval<S>& a, const Interval<S>& b) {
    return {Interval<S>::down(a.lo - b.hi), Interval<S>::up(a.hi - b.lo)};
}

template <class S>
Interval<S> operator-(const Interval<S>& a) {
    return {-a.hi, -a.lo};
}

template <class S>
Interval<S> operator*(const Interval<S>& a, const Interval<S>& b) {
    const S p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {Interval<S>::down(*std::min_element(p, p + 4)), Interval<S>::up(*std::max_element(p, p + 4))};
}

/// Division by an interval that excludes zero.
template <class S>
Interval<S> operator/(const Interval<S>& a, const Interval<S>& b) {
    const S q[] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    return {Interval<S>::down(*std::min_element(q, q + 4)), Interval<S>::up(*std::max_element(q, q + 4))};
}

/// Integer power; even powers of an interval straddling zero start at zero.
namespace detail {

// v^n for v >= 0, rounded toward -inf (up == false) or +inf (up == true).
template <class S>
S pow_nonneg(S v, int n, bool up) {
    S r = v;
    for (int i = 1; i < n; ++i) r = up ? Interval<S>::up(r * v) : std::max(S(0), Interval<S>::down(r * v));
    return r;
}

// Signed v^n for odd n, rounded in the requested direction.
template <class S>
S pow_odd(S v, int n, bool up) {
    return v >= S(0) ? pow_nonneg(v, n, up) : -pow_nonneg(-v, n, !up);
}

}  // namespace detail

template <class S>
Interval<S> pow(const Interval<S>& a, int n) {
    if (n == 0) return Interval<S>(S(1));
    if (n == 1) return a;
    if (n % 2 == 1) return {detail::pow_odd(a.lo, n, false), detail::pow_odd(a.hi, n, true)};
    const S l = std::abs(a.lo), h = std::abs(a.hi);
    const S lo = a.contains(S(0)) ? S(0) : detail::pow_nonneg(std::min(l, h), n, false);
    return {lo, detail::pow_nonneg(std::max(l, h), n, true)};
}

template <class S>
std::ostream& operator<<(std::ostream& os, const Interval<S>& iv) {
    return os << '[' << iv.lo << ", " << iv.hi << ']';
}

}  // namespace relkit

#endif  // RELKIT_INTERVAL_HPP
