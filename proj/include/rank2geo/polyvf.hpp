#pragma once

#include "rank2geo/mpoly.hpp"

namespace rank2geo {

// Vector field with polynomial components, all sharing one coordinate
// system of nvars variables.
template <class S>
struct PolyVF {
    int nvars = 0;
    std::vector<MPoly<S>> comp;

    static PolyVF zero(int nvars) {
        PolyVF v;
        v.nvars = nvars;
        v.comp.assign(static_cast<std::size_t>(nvars), MPoly<S>(nvars));
        return v;
    }

    static PolyVF coordinate(int nvars, int index) {
        PolyVF v = zero(nvars);
        v.comp.at(static_cast<std::size_t>(index)) = MPoly<S>::constant(nvars, ScalarOps<S>::one());
        return v;
    }

    void check(const PolyVF& other) const {
        if (nvars != other.nvars)
            throw DimensionMismatch("vector fields live in different dimensions");
    }

    // Directional derivative of a scalar polynomial.
    MPoly<S> apply(const MPoly<S>& f) const {
        MPoly<S> acc(nvars);
        for (int i = 0; i < nvars; ++i) acc = acc + comp[static_cast<std::size_t>(i)] * f.derivative(i);
        return acc;
    }

    std::vector<S> eval(const std::vector<S>& point) const {
        std::vector<S> out;
        out.reserve(comp.size());
        for (const auto& c : comp) out.push_back(c.eval(point));
        return out;
    }

    friend PolyVF operator+(const PolyVF& a, const PolyVF& b) {
        a.check(b);
        PolyVF r = a;
        for (std::size_t i = 0; i < r.comp.size(); ++i) r.comp[i] = r.comp[i] + b.comp[i];
        return r;
    }

    friend PolyVF operator-(const PolyVF& a, const PolyVF& b) {
        a.check(b);
        PolyVF r = a;
        for (std::size_t i = 0; i < r.comp.size(); ++i) r.comp[i] = r.comp[i] - b.comp[i];
        return r;
    }

    friend PolyVF operator*(const MPoly<S>& f, const PolyVF& a) {
        PolyVF r = a;
        for (auto& c : r.comp) c = f * c;
        return r;
    }
};

// [V, W]_k = V(W_k) - W(V_k), exact.
template <class S>
PolyVF<S> lie_bracket(const PolyVF<S>& V, const PolyVF<S>& W) {
    V.check(W);
    PolyVF<S> r = PolyVF<S>::zero(V.nvars);
    for (int k = 0; k < V.nvars; ++k)
        r.comp[static_cast<std::size_t>(k)] =
            V.apply(W.comp[static_cast<std::size_t>(k)]) - W.apply(V.comp[static_cast<std::size_t>(k)]);
    return r;
}

}  // namespace rank2geo
