#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "rank2geo/rat.hpp"

namespace rank2geo {

// Uniform interface over the two scalar backends. The exact backend
// (Rat) is the source of truth; the float backend mirrors it with a
// pivot tolerance of 1e-10 for rank decisions.
//
// is_zero   exact equality with 0 (used for structural bookkeeping)
// negligible  the pivoting predicate: identical to is_zero for Rat,
//             magnitude <= 1e-10 for double
// is_unit   invertibility; for fields this is just "not negligible"
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rat> {
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static Rat from_rat(const Rat& q) { return q; }
    static Rat from_long(long v) { return Rat(v); }
    static bool is_zero(const Rat& x) { return x == 0; }
    static bool negligible(const Rat& x) { return x == 0; }
    static bool is_unit(const Rat& x) { return x != 0; }
    static Rat inv(const Rat& x) {
        if (x == 0) throw ValidationError("division by exact zero");
        return 1 / x;
    }
    static Rat abs(const Rat& x) { return ::abs(x); }
    static int sign(const Rat& x) { return sgn(x); }
    static bool approx_equal(const Rat& a, const Rat& b) { return a == b; }
    static double approx(const Rat& x) { return x.get_d(); }
    static std::optional<Rat> nth_root(const Rat& x, unsigned long n) {
        return nth_root_exact(x, n);
    }
    static std::string str(const Rat& x) { return rat_str(x); }
};

template <>
struct ScalarOps<double> {
    static constexpr double kPivotTol = 1e-10;

    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_rat(const Rat& q) { return q.get_d(); }
    static double from_long(long v) { return static_cast<double>(v); }
    static bool is_zero(double x) { return x == 0.0; }
    static bool negligible(double x) { return std::fabs(x) <= kPivotTol; }
    static bool is_unit(double x) { return std::fabs(x) > kPivotTol; }
    static double inv(double x) {
        if (!is_unit(x)) throw ValidationError("division by a negligible float");
        return 1.0 / x;
    }
    static constexpr double kCompareTol = 1e-9;

    static double abs(double x) { return std::fabs(x); }
    static int sign(double x) { return (x > 0.0) - (x < 0.0); }
    static bool approx_equal(double a, double b) {
        const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
        return std::fabs(a - b) <= kCompareTol * scale;
    }
    static double approx(double x) { return x; }
    static std::optional<double> nth_root(double x, unsigned long n) {
        if (x < 0.0 && n % 2 == 0) return std::nullopt;
        const double r = (x < 0.0) ? -std::pow(-x, 1.0 / static_cast<double>(n))
                                   : std::pow(x, 1.0 / static_cast<double>(n));
        return r;
    }
    static std::string str(double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
};

}  // namespace rank2geo
