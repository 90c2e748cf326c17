#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rank2geo/errors.hpp"
#include "rank2geo/mpoly.hpp"
#include "rank2geo/scalar.hpp"

namespace rank2geo {

// Multivariate Taylor expansion around a chart origin, carried to a finite
// total degree. Mirrors the univariate jets: `order` counts how many total
// degrees are honest, kOrdInf marks an exact polynomial, arithmetic takes
// the minimum order, and differentiation lowers it by one. Terms beyond the
// honest order are dropped on the spot. A width of -1 marks a bare constant
// that adapts to the variable count of whichever operand it meets, so
// scalar-generic code can make constants without knowing the chart size.
template <class S>
class TSeries {
  public:
    using Ops = ScalarOps<S>;

    TSeries() : width_(-1), order_(kOrdInf), poly_(0) {}

    explicit TSeries(const S& c) : width_(-1), order_(kOrdInf), poly_(0) {
        if (!Ops::is_zero(c)) poly_.add_term({}, c);
    }

    TSeries(int width, MPoly<S> poly, long long order)
        : width_(width), order_(order), poly_(std::move(poly)) {
        if (order_ < 0) throw ValidationError("series order must be nonnegative");
        chop();
    }

    static TSeries variable(int width, int index, long long order) {
        return TSeries(width, MPoly<S>::var(width, index), order);
    }

    int width() const { return width_; }
    long long order() const { return order_; }
    const MPoly<S>& poly() const { return poly_; }

    bool is_zero() const { return poly_.is_zero(); }

    bool negligible() const {
        for (const auto& [e, c] : poly_.terms())
            if (!Ops::negligible(c)) return false;
        return true;
    }

    // Coefficient of the constant term, i.e. the value at the chart origin.
    S value() const {
        for (const auto& [e, c] : poly_.terms())
            if (degree_of(e) == 0) return c;
        return Ops::zero();
    }

    TSeries derivative(int var) const {
        if (width_ < 0) return TSeries();
        if (order_ != kOrdInf && order_ == 0)
            throw TruncationExceeded("series too short to differentiate");
        const long long ord = (order_ == kOrdInf) ? kOrdInf : order_ - 1;
        return TSeries(width_, poly_.derivative(var), ord);
    }

    friend TSeries operator-(const TSeries& a) {
        TSeries r = a;
        r.poly_ = -r.poly_;
        return r;
    }

    friend TSeries operator+(const TSeries& a, const TSeries& b) {
        auto [pa, pb, w] = aligned(a, b);
        return TSeries(w, pa + pb, std::min(a.order_, b.order_));
    }

    friend TSeries operator-(const TSeries& a, const TSeries& b) {
        auto [pa, pb, w] = aligned(a, b);
        return TSeries(w, pa - pb, std::min(a.order_, b.order_));
    }

    friend TSeries operator*(const TSeries& a, const TSeries& b) {
        auto [pa, pb, w] = aligned(a, b);
        const long long ord = std::min(a.order_, b.order_);
        MPoly<S> r(w >= 0 ? w : 0);
        for (const auto& [ea, ca] : pa.terms()) {
            const long long da = degree_of(ea);
            if (ord != kOrdInf && da > ord) continue;
            for (const auto& [eb, cb] : pb.terms()) {
                if (ord != kOrdInf && da + degree_of(eb) > ord) continue;
                std::vector<int> e = ea;
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, S(ca * cb));
            }
        }
        return TSeries(w, std::move(r), ord);
    }

    TSeries& operator+=(const TSeries& o) { return *this = *this + o; }
    TSeries& operator-=(const TSeries& o) { return *this = *this - o; }
    TSeries& operator*=(const TSeries& o) { return *this = *this * o; }

    friend bool operator==(const TSeries& a, const TSeries& b) {
        return (a - b).is_zero();
    }

    // Reciprocal via the geometric series in 1 - f / f(0). Exact constants
    // stay exact; a genuinely multivariate expansion keeps its own order.
    TSeries inverse() const {
        const S c0 = value();
        if (!Ops::is_unit(c0)) throw DivisionByZeroSeries();
        TSeries inv0(S(Ops::inv(c0)));
        if (width_ < 0) return inv0;
        if (poly_.total_degree() == 0) {
            inv0.width_ = width_;
            inv0.poly_ = widened(inv0.poly_, width_);
            inv0.order_ = order_;
            return inv0;
        }
        if (order_ == kOrdInf)
            throw TruncationExceeded("inverse of an exact polynomial needs a finite order");
        const TSeries t = TSeries(S(Ops::one())) - inv0 * (*this);
        TSeries acc(S(Ops::one()));
        TSeries pow(S(Ops::one()));
        for (long long k = 1; k <= order_; ++k) {
            pow *= t;
            if (pow.is_zero()) break;
            acc += pow;
        }
        return inv0 * acc;
    }

    std::string str(const std::vector<std::string>& names) const {
        return poly_.str(names);
    }

  private:
    static long long degree_of(const std::vector<int>& e) {
        long long d = 0;
        for (int x : e) d += x;
        return d;
    }

    void chop() {
        if (order_ == kOrdInf || poly_.is_zero()) return;
        MPoly<S> kept(poly_.nvars());
        for (const auto& [e, c] : poly_.terms())
            if (degree_of(e) <= order_) kept.add_term(e, c);
        poly_ = std::move(kept);
    }

    static MPoly<S> widened(const MPoly<S>& p, int w) {
        if (p.nvars() == w) return p;
        MPoly<S> r(w);
        for (const auto& [e, c] : p.terms()) {
            std::vector<int> exp(static_cast<std::size_t>(w), 0);
            for (std::size_t i = 0; i < e.size(); ++i) exp[i] = e[i];
            r.add_term(exp, c);
        }
        return r;
    }

    static std::tuple<MPoly<S>, MPoly<S>, int> aligned(const TSeries& a, const TSeries& b) {
        if (a.width_ >= 0 && b.width_ >= 0 && a.width_ != b.width_)
            throw DimensionMismatch("series from different charts");
        const int w = std::max(a.width_, b.width_);
        const int wp = std::max(w, 0);
        return {widened(a.poly_, wp), widened(b.poly_, wp), w};
    }

    int width_;
    long long order_;
    MPoly<S> poly_;
};

// Square root with the positive branch at the origin, through the binomial
// series in f / f(0) - 1. The constant term must have an exact root in S.
template <class S>
TSeries<S> sqrt_series(const TSeries<S>& f) {
    using Ops = ScalarOps<S>;
    const S c0 = f.value();
    if (Ops::sign(c0) <= 0)
        throw NotAPerfectPower("square root of a series needs a positive lead");
    const auto r0 = Ops::nth_root(c0, 2);
    if (!r0) throw NotAPerfectPower("series constant term has no exact square root");
    const TSeries<S> root0(*r0);
    if (f.width() < 0) return root0;
    if (f.poly().total_degree() == 0)
        return TSeries<S>(f.width(), MPoly<S>::constant(f.width(), *r0), f.order());
    if (f.order() == kOrdInf)
        throw TruncationExceeded("square root of an exact polynomial needs a finite order");
    const TSeries<S> t = TSeries<S>(S(Ops::inv(c0))) * f - TSeries<S>(Ops::one());
    TSeries<S> acc(Ops::one());
    TSeries<S> pow(Ops::one());
    S binom = Ops::one();
    for (long long k = 1; k <= f.order(); ++k) {
        pow *= t;
        if (pow.is_zero()) break;
        const S step = S(Ops::from_long(static_cast<long>(3 - 2 * k)) *
                         Ops::inv(Ops::from_long(static_cast<long>(2 * k))));
        binom = S(binom * step);
        acc += TSeries<S>(binom) * pow;
    }
    return root0 * acc;
}

// Expansion of a polynomial in ambient coordinates along series-valued
// coordinates, with the powers of each argument cached per call.
template <class S>
TSeries<S> expand_poly(const MPoly<S>& p, const std::vector<TSeries<S>>& args) {
    using Ops = ScalarOps<S>;
    if (static_cast<std::size_t>(p.nvars()) != args.size())
        throw DimensionMismatch("argument count does not match the polynomial");
    std::vector<std::vector<TSeries<S>>> powers(args.size(), {TSeries<S>(Ops::one())});
    auto power = [&](std::size_t i, int k) -> const TSeries<S>& {
        auto& cache = powers[i];
        while (cache.size() <= static_cast<std::size_t>(k))
            cache.push_back(cache.back() * args[i]);
        return cache[static_cast<std::size_t>(k)];
    };
    TSeries<S> acc;
    for (const auto& [e, c] : p.terms()) {
        TSeries<S> term{S(c)};
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) term *= power(i, e[i]);
        acc += term;
    }
    return acc;
}

template <class S>
struct ScalarOps<TSeries<S>> {
    using Base = ScalarOps<S>;

    static TSeries<S> zero() { return TSeries<S>(); }
    static TSeries<S> one() { return TSeries<S>(Base::one()); }
    static TSeries<S> from_long(long v) { return TSeries<S>(Base::from_long(v)); }
    static TSeries<S> from_rat(const Rat& q) { return TSeries<S>(Base::from_rat(q)); }

    static bool is_zero(const TSeries<S>& x) { return x.is_zero(); }
    static bool negligible(const TSeries<S>& x) { return x.negligible(); }
    static bool is_unit(const TSeries<S>& x) { return Base::is_unit(x.value()); }

    static TSeries<S> inv(const TSeries<S>& x) { return x.inverse(); }
    static int sign(const TSeries<S>& x) { return Base::sign(x.value()); }

    static std::string str(const TSeries<S>& x) { return Base::str(x.value()) + "+..."; }
};

}  // namespace rank2geo
