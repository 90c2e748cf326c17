#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "rank2geo/errors.hpp"
#include "rank2geo/scalar.hpp"

namespace rank2geo {

// Truncated power series at the base point 0 with strict order
// bookkeeping. A jet knows how many Taylor coefficients it honestly
// carries; reading past that order throws TruncationExceeded instead of
// silently returning zeros. Exact polynomials are marked with order
// kOrdInf, meaning every coefficient beyond the stored ones is a true
// zero.
//
// Order arithmetic: binary operations return min(order(a), order(b)).
// differentiate lowers the order by one, integrate raises it by one.
inline constexpr long long kOrdInf = std::numeric_limits<long long>::max();

template <class S>
class Jet {
  public:
    using Ops = ScalarOps<S>;

    // The default jet carries no information at all (order -1).
    Jet() : ord_(-1) {}

    static Jet constant(const S& value, long long ord) {
        Jet j;
        j.ord_ = ord;
        if (ord == kOrdInf) {
            if (!Ops::is_zero(value)) j.c_.push_back(value);
        } else if (ord >= 0) {
            j.c_.assign(static_cast<std::size_t>(ord) + 1, Ops::zero());
            j.c_[0] = value;
        }
        return j;
    }

    static Jet variable(long long ord) {
        Jet j = constant(Ops::zero(), ord);
        if (ord == kOrdInf) {
            j.c_ = {Ops::zero(), Ops::one()};
        } else if (ord >= 1) {
            j.c_[1] = Ops::one();
        }
        return j;
    }

    // Exact polynomial from ascending coefficients.
    static Jet poly(std::vector<S> coeffs) {
        Jet j;
        j.ord_ = kOrdInf;
        j.c_ = std::move(coeffs);
        j.trim();
        return j;
    }

    static Jet from_coeffs(std::vector<S> coeffs, long long ord) {
        if (ord == kOrdInf) return poly(std::move(coeffs));
        Jet j;
        j.ord_ = ord;
        if (ord >= 0) {
            coeffs.resize(static_cast<std::size_t>(ord) + 1, Ops::zero());
            j.c_ = std::move(coeffs);
        }
        return j;
    }

    long long order() const { return ord_; }
    bool is_exact_poly() const { return ord_ == kOrdInf; }

    // k-th Taylor coefficient. Throws when k lies beyond the honest
    // order of a finite jet.
    S coeff(long long k) const {
        if (k < 0) throw ValidationError("negative jet coefficient index");
        if (ord_ != kOrdInf && k > ord_)
            throw TruncationExceeded("jet coefficient " + std::to_string(k) +
                                     " requested, honest order is " + std::to_string(ord_));
        const auto idx = static_cast<std::size_t>(k);
        if (idx >= c_.size()) return Ops::zero();
        return c_[idx];
    }

    S value0() const { return coeff(0); }

    const std::vector<S>& stored() const { return c_; }

    // True when every coefficient carried by this jet is negligible
    // (exactly zero over the rationals, below tolerance for floats).
    // Jets of order -1 certify nothing and report false.
    bool vanishes_to_order() const {
        if (ord_ < 0 && ord_ != kOrdInf) return false;
        for (const S& x : c_)
            if (!Ops::negligible(x)) return false;
        return true;
    }

    // Lowers the order (never raises it), except that exact polynomials
    // may be given any finite truncation order.
    Jet truncated(long long k) const {
        if (k == kOrdInf) return *this;
        Jet j;
        j.ord_ = (ord_ == kOrdInf) ? k : std::min(ord_, k);
        if (j.ord_ >= 0) {
            j.c_.assign(static_cast<std::size_t>(j.ord_) + 1, Ops::zero());
            for (std::size_t i = 0; i < j.c_.size() && i < c_.size(); ++i) j.c_[i] = c_[i];
        }
        return j;
    }

    friend Jet operator-(const Jet& a) {
        Jet j = a;
        for (S& x : j.c_) x = S(-x);
        return j;
    }

    friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, false); }
    friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, true); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const long long K = std::min(a.ord_, b.ord_);
        Jet j;
        j.ord_ = K;
        if (K == kOrdInf) {
            if (a.c_.empty() || b.c_.empty()) return j;
            j.c_.assign(a.c_.size() + b.c_.size() - 1, Ops::zero());
            for (std::size_t i = 0; i < a.c_.size(); ++i)
                for (std::size_t k = 0; k < b.c_.size(); ++k) j.c_[i + k] += a.c_[i] * b.c_[k];
            j.trim();
            return j;
        }
        if (K < 0) return j;
        j.c_.assign(static_cast<std::size_t>(K) + 1, Ops::zero());
        const std::size_t da = std::min(a.c_.size(), j.c_.size());
        for (std::size_t i = 0; i < da; ++i) {
            if (Ops::is_zero(a.c_[i])) continue;
            const std::size_t db = std::min(b.c_.size(), j.c_.size() - i);
            for (std::size_t k = 0; k < db; ++k) j.c_[i + k] += a.c_[i] * b.c_[k];
        }
        return j;
    }

    friend Jet operator*(const S& s, const Jet& a) {
        Jet j = a;
        for (S& x : j.c_) x = s * x;
        if (j.ord_ == kOrdInf) j.trim();
        return j;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        if (b.ord_ < 0 && b.ord_ != kOrdInf)
            throw TruncationExceeded("divisor jet carries no coefficients");
        const S b0 = b.coeff(0);
        if (!Ops::is_unit(b0)) throw DivisionByZeroSeries();
        // Division by a constant is exact and preserves the order.
        if (b.is_exact_poly() && b.c_.size() <= 1) return Ops::inv(b0) * a;
        const long long K = std::min(a.ord_, b.ord_);
        if (K == kOrdInf)
            throw TruncationExceeded(
                "division of exact polynomials is not polynomial; truncate an operand first");
        Jet j;
        j.ord_ = K;
        if (K < 0) return j;
        j.c_.assign(static_cast<std::size_t>(K) + 1, Ops::zero());
        const S ib0 = Ops::inv(b0);
        for (long long k = 0; k <= K; ++k) {
            S acc = (static_cast<std::size_t>(k) < a.c_.size()) ? a.c_[k] : Ops::zero();
            for (long long i = 0; i < k; ++i) {
                const std::size_t bi = static_cast<std::size_t>(k - i);
                if (bi < b.c_.size()) acc -= j.c_[i] * b.c_[bi];
            }
            j.c_[static_cast<std::size_t>(k)] = ib0 * acc;
        }
        return j;
    }

    friend bool operator==(const Jet& a, const Jet& b) { return a.ord_ == b.ord_ && a.c_ == b.c_; }

  private:
    static Jet combine(const Jet& a, const Jet& b, bool subtract) {
        const long long K = std::min(a.ord_, b.ord_);
        Jet j;
        j.ord_ = K;
        if (K == kOrdInf) {
            j.c_.assign(std::max(a.c_.size(), b.c_.size()), Ops::zero());
        } else if (K >= 0) {
            j.c_.assign(static_cast<std::size_t>(K) + 1, Ops::zero());
        } else {
            return j;
        }
        for (std::size_t i = 0; i < j.c_.size() && i < a.c_.size(); ++i) j.c_[i] = a.c_[i];
        for (std::size_t i = 0; i < j.c_.size() && i < b.c_.size(); ++i)
            j.c_[i] = subtract ? S(j.c_[i] - b.c_[i]) : S(j.c_[i] + b.c_[i]);
        if (K == kOrdInf) j.trim();
        return j;
    }

    void trim() {
        while (!c_.empty() && Ops::is_zero(c_.back())) c_.pop_back();
    }

    long long ord_;
    std::vector<S> c_;
};

// Zero test for a residual jet obtained by cancelling data whose
// coefficients reach the given magnitude. Exact backends still demand
// exact zeros. The float backend discounts the scale and the factorial
// growth that repeated differentiation imparts to roundoff, so
// coefficient k may carry noise up to the pivot tolerance times
// scale * k!; a genuine violation of that size would be numerically
// indistinguishable from roundoff anyway.
template <class S>
bool vanishes_to_scale(const Jet<S>& a, const S& scale) {
    using Ops = ScalarOps<S>;
    if (a.vanishes_to_order()) return true;
    if (!Ops::is_unit(scale)) return false;
    S weight = Ops::inv(scale);
    const auto& s = a.stored();
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k > 1) weight = S(weight * Ops::inv(Ops::from_long(static_cast<long>(k))));
        if (!Ops::negligible(S(s[k] * weight))) return false;
    }
    return true;
}

template <class S>
Jet<S> differentiate(const Jet<S>& a) {
    const long long K = a.order();
    std::vector<S> c;
    const auto& s = a.stored();
    for (std::size_t k = 1; k < s.size(); ++k) c.push_back(ScalarOps<S>::from_long(static_cast<long>(k)) * s[k]);
    if (K == kOrdInf) return Jet<S>::poly(std::move(c));
    return Jet<S>::from_coeffs(std::move(c), K >= 0 ? K - 1 : -1);
}

template <class S>
Jet<S> integrate(const Jet<S>& a) {
    const long long K = a.order();
    std::vector<S> c{ScalarOps<S>::zero()};
    const auto& s = a.stored();
    for (std::size_t k = 0; k < s.size(); ++k)
        c.push_back(ScalarOps<S>::inv(ScalarOps<S>::from_long(static_cast<long>(k + 1))) * s[k]);
    if (K == kOrdInf) return Jet<S>::poly(std::move(c));
    return Jet<S>::from_coeffs(std::move(c), K + 1);
}

// f composed with g, requiring g(0) = 0.
template <class S>
Jet<S> compose(const Jet<S>& f, const Jet<S>& g) {
    if (g.order() < 0 && !g.is_exact_poly())
        throw TruncationExceeded("inner jet of a composition carries no coefficients");
    if (!ScalarOps<S>::is_zero(g.coeff(0))) throw NonCompositionalArgument();
    if (f.order() < 0 && !f.is_exact_poly()) return Jet<S>();

    if (f.is_exact_poly() && g.is_exact_poly()) {
        Jet<S> acc = Jet<S>::poly({});
        const auto& fc = f.stored();
        for (std::size_t i = fc.size(); i-- > 0;)
            acc = acc * g + Jet<S>::constant(fc[i], kOrdInf);
        return acc;
    }

    const long long K = std::min(f.order(), g.order());
    if (K < 0) return Jet<S>();
    const Jet<S> gt = g.truncated(K);
    Jet<S> acc = Jet<S>::constant(ScalarOps<S>::zero(), K);
    const auto& fc = f.stored();
    const std::size_t top = std::min<std::size_t>(fc.size(), static_cast<std::size_t>(K) + 1);
    for (std::size_t i = top; i-- > 0;)
        acc = acc * gt + Jet<S>::constant(fc[i], K);
    return acc;
}

// Functional inverse of g with g(0) = 0 and a unit linear coefficient.
template <class S>
Jet<S> invert_series(const Jet<S>& g) {
    using Ops = ScalarOps<S>;
    if (g.is_exact_poly()) {
        const auto& s = g.stored();
        if (s.size() == 2 && Ops::is_zero(s[0]) && Ops::is_unit(s[1]))
            return Jet<S>::poly({Ops::zero(), Ops::inv(s[1])});
        throw TruncationExceeded(
            "inverse of a nonlinear exact polynomial is not polynomial; truncate first");
    }
    if (g.order() < 1)
        throw TruncationExceeded("series inversion needs at least the linear coefficient");
    if (!Ops::is_zero(g.coeff(0)) || !Ops::is_unit(g.coeff(1))) throw NonInvertibleSeries();

    const long long K = g.order();
    std::vector<S> h(static_cast<std::size_t>(K) + 1, Ops::zero());
    h[1] = Ops::inv(g.coeff(1));
    for (long long k = 2; k <= K; ++k) {
        const Jet<S> partial = Jet<S>::from_coeffs(
            std::vector<S>(h.begin(), h.begin() + static_cast<std::size_t>(k)), k);
        const S resid = compose(g.truncated(k), partial).coeff(k);
        h[static_cast<std::size_t>(k)] = -Ops::inv(g.coeff(1)) * resid;
    }
    return Jet<S>::from_coeffs(std::move(h), K);
}

// exp of a jet with zero constant term, by the recursion y' = x'y.
template <class S>
Jet<S> exp_of(const Jet<S>& x) {
    using Ops = ScalarOps<S>;
    if (x.order() < 0 && !x.is_exact_poly())
        throw TruncationExceeded("exponential input carries no coefficients");
    if (!Ops::is_zero(x.coeff(0)))
        throw ValidationError("exponential needs a zero constant term");
    if (x.is_exact_poly()) {
        if (x.vanishes_to_order()) return Jet<S>::constant(Ops::one(), kOrdInf);
        throw TruncationExceeded(
            "exponential of a nonconstant polynomial is not polynomial; truncate first");
    }
    const long long K = x.order();
    std::vector<S> y(static_cast<std::size_t>(K) + 1, Ops::zero());
    y[0] = Ops::one();
    for (long long k = 1; k <= K; ++k) {
        S acc = Ops::zero();
        for (long long j = 1; j <= k; ++j)
            acc += Ops::from_long(static_cast<long>(j)) * x.coeff(j) * y[static_cast<std::size_t>(k - j)];
        y[static_cast<std::size_t>(k)] = Ops::inv(Ops::from_long(static_cast<long>(k))) * acc;
    }
    return Jet<S>::from_coeffs(std::move(y), K);
}

// log of a jet with constant term exactly 1.
template <class S>
Jet<S> log_of(const Jet<S>& u) {
    using Ops = ScalarOps<S>;
    if (u.order() < 0 && !u.is_exact_poly())
        throw TruncationExceeded("logarithm input carries no coefficients");
    if (!Ops::is_zero(S(u.coeff(0) - Ops::one())))
        throw ValidationError("logarithm needs constant term 1 in the exact backend");
    if (u.is_exact_poly()) {
        if (u.stored().size() <= 1) return Jet<S>::constant(Ops::zero(), kOrdInf);
        throw TruncationExceeded(
            "logarithm of a nonconstant polynomial is not polynomial; truncate first");
    }
    return integrate(differentiate(u) / u);
}

// n-th root with the branch fixed by the exact root of the constant
// term. Throws NotAPerfectPower when that root does not exist.
template <class S>
Jet<S> nth_root_of(const Jet<S>& x, unsigned long n) {
    using Ops = ScalarOps<S>;
    if (n == 0) throw ValidationError("zeroth root of a jet");
    if (x.order() < 0 && !x.is_exact_poly())
        throw TruncationExceeded("root input carries no coefficients");
    const S x0 = x.coeff(0);
    if (!Ops::is_unit(x0)) throw ValidationError("jet root needs a unit constant term");
    const auto r0 = Ops::nth_root(x0, n);
    if (!r0)
        throw NotAPerfectPower("constant term " + Ops::str(x0) + " has no exact " +
                               std::to_string(n) + "-th root");
    if (x.is_exact_poly()) {
        if (x.stored().size() <= 1) return Jet<S>::constant(*r0, kOrdInf);
        throw TruncationExceeded(
            "root of a nonconstant polynomial is not polynomial; truncate first");
    }
    const long long K = x.order();
    std::vector<S> y(static_cast<std::size_t>(K) + 1, Ops::zero());
    y[0] = *r0;
    S deriv = Ops::from_long(static_cast<long>(n));
    for (unsigned long i = 0; i + 1 < n; ++i) deriv *= *r0;
    for (long long k = 1; k <= K; ++k) {
        Jet<S> partial = Jet<S>::from_coeffs(
            std::vector<S>(y.begin(), y.begin() + static_cast<std::size_t>(k)), k);
        Jet<S> pw = Jet<S>::constant(Ops::one(), k);
        for (unsigned long i = 0; i < n; ++i) pw = pw * partial;
        y[static_cast<std::size_t>(k)] = Ops::inv(deriv) * S(x.coeff(k) - pw.coeff(k));
    }
    return Jet<S>::from_coeffs(std::move(y), K);
}

// Series of tan at 0 to the given order, from y' = 1 + y^2.
template <class S>
Jet<S> tan_series(long long K) {
    using Ops = ScalarOps<S>;
    std::vector<S> y(static_cast<std::size_t>(K) + 1, Ops::zero());
    for (long long k = 0; k < K; ++k) {
        S acc = (k == 0) ? Ops::one() : Ops::zero();
        for (long long j = 0; j <= k; ++j) acc += y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(k - j)];
        y[static_cast<std::size_t>(k + 1)] = Ops::inv(Ops::from_long(static_cast<long>(k + 1))) * acc;
    }
    return Jet<S>::from_coeffs(std::move(y), K);
}

// Series of tanh at 0 to the given order, from y' = 1 - y^2.
template <class S>
Jet<S> tanh_series(long long K) {
    using Ops = ScalarOps<S>;
    std::vector<S> y(static_cast<std::size_t>(K) + 1, Ops::zero());
    for (long long k = 0; k < K; ++k) {
        S acc = (k == 0) ? Ops::one() : Ops::zero();
        for (long long j = 0; j <= k; ++j) acc -= y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(k - j)];
        y[static_cast<std::size_t>(k + 1)] = Ops::inv(Ops::from_long(static_cast<long>(k + 1))) * acc;
    }
    return Jet<S>::from_coeffs(std::move(y), K);
}

// S(v) = (v''/(2v'))' - (v''/(2v'))^2. This normalization is half the
// classical Schwarzian; every formula downstream uses the same one, so
// no conversion factor appears anywhere.
template <class S>
Jet<S> schwarzian(const Jet<S>& v) {
    using Ops = ScalarOps<S>;
    const Jet<S> v1 = differentiate(v);
    if (v1.order() < 0 && !v1.is_exact_poly())
        throw TruncationExceeded("schwarzian needs at least the linear coefficient");
    if (!Ops::is_unit(v1.coeff(0))) throw SingularReparametrization();
    const Jet<S> two = Jet<S>::constant(Ops::from_long(2), kOrdInf);
    const Jet<S> phi = differentiate(v1) / (two * v1);
    return differentiate(phi) - phi * phi;
}

// Agreement on the coefficient range both jets actually carry. Jets
// that carry nothing agree with nothing.
template <class S>
bool jets_agree(const Jet<S>& a, const Jet<S>& b) {
    using Ops = ScalarOps<S>;
    const long long K = std::min(a.order(), b.order());
    if (K < 0 && K != kOrdInf) return false;
    if (K == kOrdInf) {
        const std::size_t n = std::max(a.stored().size(), b.stored().size());
        for (std::size_t i = 0; i < n; ++i)
            if (!Ops::approx_equal(a.coeff(static_cast<long long>(i)),
                                   b.coeff(static_cast<long long>(i))))
                return false;
        return true;
    }
    for (long long k = 0; k <= K; ++k)
        if (!Ops::approx_equal(a.coeff(k), b.coeff(k))) return false;
    return true;
}

template <class S>
std::string jet_str(const Jet<S>& a) {
    std::string out = "[";
    const auto& s = a.stored();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += ScalarOps<S>::str(s[i]);
    }
    out += "]";
    if (a.is_exact_poly())
        out += " (exact)";
    else
        out += " (ord " + std::to_string(a.order()) + ")";
    return out;
}

}  // namespace rank2geo
