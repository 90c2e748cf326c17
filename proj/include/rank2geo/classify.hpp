#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rank2geo/curve_ode.hpp"
#include "rank2geo/errors.hpp"
#include "rank2geo/jet.hpp"
#include "rank2geo/scalar.hpp"

namespace rank2geo {

// A constant curvature tuple (r_1, ..., r_m).
template <class S>
struct Tuple {
    std::vector<S> r;

    Tuple() = default;
    explicit Tuple(std::vector<S> vals) : r(std::move(vals)) {
        if (r.empty()) throw BadDimension("curvature tuple needs at least one entry");
    }
    long long m() const { return static_cast<long long>(r.size()); }
};

template <class S>
bool operator==(const Tuple<S>& a, const Tuple<S>& b) {
    return a.r == b.r;
}

template <class S>
struct ExceptionalReport {
    bool flag = false;
    // s^2 for the arithmetic progression {+-(2j-1) s} of the
    // characteristic roots; kept squared so it stays exact even when the
    // step itself is irrational or imaginary.
    std::optional<S> step_sq;
};

template <class S>
struct CompatibleNorm {
    S c;                 // rescaling parameter, applied as r_i -> c^{2i} r_i
    Tuple<S> normalized; // the unique compatible tuple in the class, c > 0
    long long i0 = 0;    // lowest index with nonvanishing even invariant
    int epsilon = 0;     // sign of the normalized invariant, |value| = 1
};

template <class S>
struct ClassReport {
    std::vector<S> char_poly_coeffs;
    bool exceptional = false;
    std::optional<S> step_sq;
    std::optional<Tuple<S>> normal_form;
    std::optional<S> compatible_scale;
};

// Exact coefficients alpha_{m,1} ... alpha_{m,m} defined by
//   x^{2m} + sum_{i=1}^m (-1)^i alpha_{m,i} x^{2(m-i)}
//     = prod_{i=1}^m (x^2 - (2i-1)^2),
// the characteristic coefficients whose roots are the odd integers
// +-1, +-3, ..., +-(2m-1).
std::vector<Rat> alpha_constants(long long m);

template <class S>
std::vector<S> alphas(long long m) {
    using Ops = ScalarOps<S>;
    std::vector<S> out;
    for (const Rat& a : alpha_constants(m)) out.push_back(Ops::from_rat(a));
    return out;
}

// Ascending coefficients of
//   lambda^{2m} + sum_{i=1}^m (-1)^i r_i lambda^{2(m-i)}.
template <class S>
std::vector<S> char_poly(const Tuple<S>& t) {
    using Ops = ScalarOps<S>;
    const long long m = t.m();
    std::vector<S> out(static_cast<std::size_t>(2 * m) + 1, Ops::zero());
    out[static_cast<std::size_t>(2 * m)] = Ops::one();
    for (long long i = 1; i <= m; ++i) {
        S v = t.r[static_cast<std::size_t>(i - 1)];
        if (i % 2 == 1) v = S(-v);
        out[static_cast<std::size_t>(2 * (m - i))] = v;
    }
    return out;
}

// A tuple is exceptional when the characteristic roots form an
// arithmetic progression {+-(2j-1) s}; algebraically,
// r_i = alpha_{m,i} (r_1/alpha_{m,1})^i for every i. The only
// exceptional tuple with r_1 = 0 is the zero tuple.
template <class S>
ExceptionalReport<S> is_exceptional(const Tuple<S>& t) {
    using Ops = ScalarOps<S>;
    const long long m = t.m();
    const std::vector<S> al = alphas<S>(m);
    if (Ops::negligible(t.r[0])) {
        for (const S& v : t.r)
            if (!Ops::negligible(v)) return {false, std::nullopt};
        return {true, Ops::zero()};
    }
    const S s2 = t.r[0] * Ops::inv(al[0]);
    S p = Ops::one();
    for (long long i = 1; i <= m; ++i) {
        p = p * s2;
        if (!Ops::approx_equal(t.r[static_cast<std::size_t>(i - 1)],
                               al[static_cast<std::size_t>(i - 1)] * p))
            return {false, std::nullopt};
    }
    return {true, s2};
}

// The real scale c != 0 with b_i = c^{2i} a_i for every i, or nullopt.
// Only c^2 enters, so the positive representative is returned; the
// all-zero pair matches with c = 1. When the tuples are equivalent over
// the reals but the scale is irrational, the exact backend refuses with
// NotAPerfectPower instead of inventing an approximation.
template <class S>
std::optional<S> equivalent_tuples(const Tuple<S>& a, const Tuple<S>& b) {
    using Ops = ScalarOps<S>;
    if (a.m() != b.m()) throw DimensionMismatch("tuples live at different m");
    const long long m = a.m();
    long long lead = 0;
    for (long long i = 1; i <= m; ++i) {
        const bool az = Ops::negligible(a.r[static_cast<std::size_t>(i - 1)]);
        const bool bz = Ops::negligible(b.r[static_cast<std::size_t>(i - 1)]);
        if (az != bz) return std::nullopt;
        if (!az && lead == 0) lead = i;
    }
    if (lead == 0) return Ops::one();

    const S q = b.r[static_cast<std::size_t>(lead - 1)] *
                Ops::inv(a.r[static_cast<std::size_t>(lead - 1)]);
    if (const auto root = Ops::nth_root(q, static_cast<unsigned long>(2 * lead))) {
        const S c = Ops::abs(*root);
        const S s = c * c;
        bool all = true;
        S p = Ops::one();
        for (long long i = 1; i <= m; ++i) {
            p = p * s;
            if (!Ops::approx_equal(b.r[static_cast<std::size_t>(i - 1)],
                                   p * a.r[static_cast<std::size_t>(i - 1)])) {
                all = false;
                break;
            }
        }
        if (all) return c;
    }

    // No representable scale. Decide real equivalence exactly: with
    // s = c^2, the support ratios q_i = b_i/a_i must satisfy s^i = q_i,
    // so each q_i must be positive and q_i^lead = q^i.
    if (Ops::sign(q) <= 0) return std::nullopt;
    for (long long i = lead + 1; i <= m; ++i) {
        if (Ops::negligible(a.r[static_cast<std::size_t>(i - 1)])) continue;
        const S qi = b.r[static_cast<std::size_t>(i - 1)] *
                     Ops::inv(a.r[static_cast<std::size_t>(i - 1)]);
        if (Ops::sign(qi) <= 0) return std::nullopt;
        S lhs = Ops::one(), rhs = Ops::one();
        for (long long k = 0; k < lead; ++k) lhs = lhs * qi;
        for (long long k = 0; k < i; ++k) rhs = rhs * q;
        if (!Ops::approx_equal(lhs, rhs)) return std::nullopt;
    }
    throw NotAPerfectPower(
        "tuples are scale-equivalent, but the scale is irrational; "
        "use the float backend");
}

namespace detail {

// Constant values A_k of the even invariants W_{2k}, k = 1 .. m-1,
// expressed in the parameter of the constant-coefficient self-adjoint
// equation built from the tuple. The invariant differential W_{2k} has
// weight 2k+2, so its representation in the original parameter t is
// W_{2k}(tau) / (upsilon'(tau))^{2k+2} composed with tau(t); for a
// constant-coefficient equation translation symmetry makes that
// representation constant, which is verified, not assumed.
template <class S>
std::vector<S> even_invariant_constants(const Tuple<S>& t) {
    using Ops = ScalarOps<S>;
    const long long m = t.m();
    std::vector<Jet<S>> rho;
    for (const S& v : t.r) rho.push_back(Jet<S>::constant(v, kOrdInf));
    const CurveODE<S> c = self_adjoint_ode(m, rho);
    const ProjectiveCurve<S> pn = projective_normalize(c);
    const WilczynskiSet<S> w = wilczynski(pn.curve);
    const Jet<S> du = differentiate(pn.upsilon);

    std::vector<S> out;
    for (long long k = 1; k <= m - 1; ++k) {
        Jet<S> weight = Jet<S>::constant(Ops::one(), kOrdInf);
        for (long long p = 0; p < 2 * k + 2; ++p) weight = weight * du;
        const Jet<S> a = w.W[static_cast<std::size_t>(2 * k - 1)] / weight;
        const S value = a.coeff(0);
        if (!(a - Jet<S>::constant(value, kOrdInf)).vanishes_to_order())
            throw Error("even invariant of a constant-coefficient equation "
                        "failed to be constant");
        out.push_back(value);
    }
    return out;
}

}  // namespace detail

// The unique compatible representative of the scaling class of t: the
// rescaled tuple (c^2 r_1, ..., c^{2m} r_m), c > 0, whose lowest
// nonvanishing even invariant has unit size. Exceptional tuples have no
// even invariants left to normalize and are rejected.
template <class S>
CompatibleNorm<S> compatible_normalization(const Tuple<S>& t) {
    using Ops = ScalarOps<S>;
    const long long m = t.m();
    if (is_exceptional(t).flag)
        throw ExceptionalTuple("exceptional tuples admit no compatible rescaling");

    const std::vector<S> a = detail::even_invariant_constants(t);
    long long i0 = 0;
    for (long long k = 1; k <= m - 1; ++k) {
        if (!Ops::negligible(a[static_cast<std::size_t>(k - 1)])) {
            i0 = k;
            break;
        }
    }
    if (i0 == 0)
        throw ExceptionalTuple("all even invariants vanish");

    const S val = a[static_cast<std::size_t>(i0 - 1)];
    const auto root = Ops::nth_root(Ops::abs(val), static_cast<unsigned long>(2 * i0 + 2));
    if (!root)
        throw NotAPerfectPower(
            "the compatible scale is irrational; use the float backend");
    const S c = Ops::inv(*root);

    CompatibleNorm<S> out;
    out.c = c;
    out.i0 = i0;
    out.epsilon = Ops::sign(val);
    const S c2 = c * c;
    S p = Ops::one();
    std::vector<S> scaled;
    for (long long i = 1; i <= m; ++i) {
        p = p * c2;
        scaled.push_back(p * t.r[static_cast<std::size_t>(i - 1)]);
    }
    out.normalized = Tuple<S>(std::move(scaled));
    return out;
}

// Aggregate classification. Exceptional tuples carry no normal form;
// non-exceptional tuples whose compatible scale is irrational on the
// exact backend are reported without the normal form rather than
// failing the whole report.
template <class S>
ClassReport<S> moduli_report(const Tuple<S>& t) {
    ClassReport<S> out;
    out.char_poly_coeffs = char_poly(t);
    const ExceptionalReport<S> exc = is_exceptional(t);
    out.exceptional = exc.flag;
    out.step_sq = exc.step_sq;
    if (!exc.flag) {
        try {
            CompatibleNorm<S> cn = compatible_normalization(t);
            out.normal_form = std::move(cn.normalized);
            out.compatible_scale = cn.c;
        } catch (const NotAPerfectPower&) {
        }
    }
    return out;
}

}  // namespace rank2geo
