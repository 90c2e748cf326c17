#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "rank2geo/classify.hpp"
#include "rank2geo/linalg.hpp"
#include "rank2geo/polyvf.hpp"

namespace rank2geo {

// Affine model system on the coordinates (x, y_0, ..., y_{n-3}, z):
//
//   X1 = d/dx + sum_{i=0}^{n-4} y_{i+1} d/dy_i
//             + (y_{n-3}^2 + sum_{i=1}^{n-3} r_i y_{n-3-i}^2) d/dz,
//   X2 = d/dy_{n-3}.
//
// Variable k of the polynomial ring is coords[k]; momenta, when present,
// follow in the same order as p_<name>.
template <class S>
struct ModelSpec {
    long long n = 0;
    Tuple<S> r;
    std::vector<std::string> coords;
    PolyVF<S> X1, X2;
};

std::vector<std::string> model_coordinate_names(long long n);
std::vector<std::string> phase_coordinate_names(const std::vector<std::string>& coords);

template <class S>
ModelSpec<S> build_model(long long n, const Tuple<S>& r) {
    if (n < 5) throw BadDimension("a model needs at least five coordinates");
    if (r.m() != n - 3) throw BadDimension("a model in dimension n takes a tuple of length n - 3");
    const int nv = static_cast<int>(n);
    // Coordinate layout: x at 0, y_i at 1 + i, z last.
    PolyVF<S> x1 = PolyVF<S>::coordinate(nv, 0);
    for (int i = 0; i + 4 <= nv; ++i)
        x1.comp[static_cast<std::size_t>(1 + i)] = MPoly<S>::var(nv, 2 + i);
    const MPoly<S> ytop = MPoly<S>::var(nv, nv - 2);
    MPoly<S> drift = ytop * ytop;
    for (long long i = 1; i <= n - 3; ++i) {
        const MPoly<S> yi = MPoly<S>::var(nv, static_cast<int>(1 + (n - 3 - i)));
        drift = drift + r.r[static_cast<std::size_t>(i - 1)] * (yi * yi);
    }
    x1.comp[static_cast<std::size_t>(nv - 1)] = drift;
    ModelSpec<S> ms;
    ms.n = n;
    ms.r = r;
    ms.coords = model_coordinate_names(n);
    ms.X1 = std::move(x1);
    ms.X2 = PolyVF<S>::coordinate(nv, nv - 2);
    return ms;
}

// Dimensions of the powers of the plane spanned by the two fields at q,
// obtained from iterated brackets and exact rank. Stops at full dimension
// or as soon as the dimension stops growing; a repeated value is not
// reported twice.
template <class S>
std::vector<int> growth_vector(const PolyVF<S>& x1, const PolyVF<S>& x2,
                               const std::vector<S>& q) {
    x1.check(x2);
    if (q.size() != x1.comp.size())
        throw DimensionMismatch("the point and the fields have different numbers of coordinates");
    std::vector<PolyVF<S>> fields{x1, x2};
    Matrix<S> rows{x1.eval(q), x2.eval(q)};
    std::vector<int> dims;
    int prev = -1;
    std::size_t level_begin = 0;
    while (true) {
        const int d = rank(rows);
        if (d == prev) break;
        dims.push_back(d);
        prev = d;
        if (d == static_cast<int>(q.size())) break;
        const std::size_t hi = fields.size();
        for (std::size_t j = level_begin; j < hi; ++j) {
            for (const PolyVF<S>* gen : {&x1, &x2}) {
                PolyVF<S> br = lie_bracket(*gen, fields[j]);
                rows.push_back(br.eval(q));
                fields.push_back(std::move(br));
            }
        }
        level_begin = hi;
    }
    return dims;
}

// Extends a polynomial on the base coordinates to the phase space with
// momenta appended after the positions.
template <class S>
MPoly<S> phase_lift(const MPoly<S>& f) {
    const int n = f.nvars();
    MPoly<S> out(2 * n);
    for (const auto& [e, c] : f.terms()) {
        std::vector<int> ee(static_cast<std::size_t>(2 * n), 0);
        std::copy(e.begin(), e.end(), ee.begin());
        out.add_term(ee, c);
    }
    return out;
}

// p . V: pairs a field on n base coordinates with the momenta, producing a
// momentum-linear polynomial on the 2n phase variables.
template <class S>
MPoly<S> momentum_pairing(const PolyVF<S>& v) {
    const int n = v.nvars;
    MPoly<S> out(2 * n);
    for (int k = 0; k < n; ++k)
        out = out + MPoly<S>::var(2 * n, n + k) * phase_lift(v.comp[static_cast<std::size_t>(k)]);
    return out;
}

// Hamiltonian field of f on 2n phase variables: position components df/dp_i,
// momentum components -df/dq_i. The sign is chosen so that momentum pairings
// represent the Lie bracket: {p.V, p.W} = p.[V, W].
template <class S>
PolyVF<S> hamiltonian_field(const MPoly<S>& f) {
    const int nn = f.nvars();
    if (nn % 2 != 0) throw DimensionMismatch("a phase-space polynomial needs an even number of variables");
    const int n = nn / 2;
    PolyVF<S> h = PolyVF<S>::zero(nn);
    for (int i = 0; i < n; ++i) {
        h.comp[static_cast<std::size_t>(i)] = f.derivative(n + i);
        h.comp[static_cast<std::size_t>(n + i)] = -f.derivative(i);
    }
    return h;
}

template <class S>
MPoly<S> poisson_bracket(const MPoly<S>& f, const MPoly<S>& g) {
    return hamiltonian_field(f).apply(g);
}

// Quasi-impulses and the characteristic field of a rank-2 plane, living on
// the 2n phase variables. X holds X1, X2, X3 = [X1, X2], X4 = [X1, X3],
// X5 = [X2, X3]; u[i] = p . X[i]; C = u4 Ham(u2) - u5 Ham(u1). C is tangent
// to the common zero set of (u1, u2, u3), which carries the abnormal
// extremals of the plane.
template <class S>
struct CotangentSystem {
    long long n = 0;
    std::array<PolyVF<S>, 5> X;
    std::array<MPoly<S>, 5> u;
    PolyVF<S> C;
};

template <class S>
CotangentSystem<S> cotangent_lift(const PolyVF<S>& x1, const PolyVF<S>& x2) {
    using Ops = ScalarOps<S>;
    x1.check(x2);
    CotangentSystem<S> cs;
    cs.n = x1.nvars;
    cs.X[0] = x1;
    cs.X[1] = x2;
    cs.X[2] = lie_bracket(x1, x2);
    cs.X[3] = lie_bracket(x1, cs.X[2]);
    cs.X[4] = lie_bracket(x2, cs.X[2]);
    const std::vector<S> origin(static_cast<std::size_t>(cs.n), Ops::zero());
    Matrix<S> rows{cs.X[0].eval(origin), cs.X[1].eval(origin), cs.X[2].eval(origin)};
    if (rank(rows) < 3)
        throw DegenerateDistribution("the plane and its first bracket span fewer than three directions at the working point");
    for (std::size_t i = 0; i < 5; ++i) cs.u[i] = momentum_pairing(cs.X[i]);
    cs.C = cs.u[3] * hamiltonian_field(cs.u[1]) - cs.u[4] * hamiltonian_field(cs.u[0]);
    return cs;
}

namespace detail {

// Pivot data for the 3 x n coefficient matrix A(q) whose rows are the
// components of X1, X2, X3: three column indices with det A_P(q0) != 0,
// the polynomial 3 x 3 block M = A_P, its adjugate and determinant.
template <class S>
struct VerticalPivots {
    std::array<int, 3> cols{};
    Matrix<MPoly<S>> block;
    Matrix<MPoly<S>> adjugate;
    MPoly<S> det;
};

template <class S>
VerticalPivots<S> vertical_pivots(const CotangentSystem<S>& cs, const std::vector<S>& q) {
    const int n = static_cast<int>(cs.n);
    Matrix<S> chosen;
    std::array<int, 3> cols{};
    int found = 0;
    for (int j = 0; j < n && found < 3; ++j) {
        std::vector<S> col{cs.X[0].comp[static_cast<std::size_t>(j)].eval(q),
                           cs.X[1].comp[static_cast<std::size_t>(j)].eval(q),
                           cs.X[2].comp[static_cast<std::size_t>(j)].eval(q)};
        Matrix<S> trial = chosen;
        trial.push_back(col);
        if (rank(trial) > found) {
            chosen = std::move(trial);
            cols[static_cast<std::size_t>(found)] = j;
            ++found;
        }
    }
    if (found < 3)
        throw DegenerateDistribution("the plane and its first bracket drop rank at the base point");
    VerticalPivots<S> piv;
    piv.cols = cols;
    piv.block.assign(3, std::vector<MPoly<S>>(3, MPoly<S>(n)));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            piv.block[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                cs.X[static_cast<std::size_t>(r)].comp[static_cast<std::size_t>(cols[static_cast<std::size_t>(c)])];
    const auto& m = piv.block;
    auto minor2 = [&m](int r0, int r1, int c0, int c1) {
        return m[static_cast<std::size_t>(r0)][static_cast<std::size_t>(c0)] *
                   m[static_cast<std::size_t>(r1)][static_cast<std::size_t>(c1)] -
               m[static_cast<std::size_t>(r0)][static_cast<std::size_t>(c1)] *
                   m[static_cast<std::size_t>(r1)][static_cast<std::size_t>(c0)];
    };
    piv.adjugate.assign(3, std::vector<MPoly<S>>(3, MPoly<S>(n)));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const int r0 = (c + 1) % 3, r1 = (c + 2) % 3;
            const int c0 = (r + 1) % 3, c1 = (r + 2) % 3;
            // adj[r][c] is the (c, r) cofactor; the cyclic index choice
            // absorbs the sign.
            piv.adjugate[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = minor2(r0, r1, c0, c1);
        }
    piv.det = m[0][0] * piv.adjugate[0][0] + m[0][1] * piv.adjugate[1][0] + m[0][2] * piv.adjugate[2][0];
    return piv;
}

// Sections spanning the lift of the plane to the annihilator {u1 = u2 =
// u3 = 0} near a point over the pivot neighborhood: the characteristic
// field C first, then one more field covering the plane, then the n - 3
// vertical solutions of A(q) w = 0 built from the pivot block by
// Cramer's rule. All are tangent to the annihilator along it, and their
// values at any annihilator point of the neighborhood with
// (u4, u5) != (0, 0) span the full (n - 1)-dimensional lift.
template <class S>
std::vector<PolyVF<S>> lift_sections(const CotangentSystem<S>& cs, const VerticalPivots<S>& piv) {
    const std::size_t n = static_cast<std::size_t>(cs.n);
    const MPoly<S> det2n = phase_lift(piv.det);
    std::vector<PolyVF<S>> fields;
    fields.push_back(cs.C);
    {
        // det * (u4 Ham(u1) + u5 Ham(u2)) - (u4^2 + u5^2) * W, where W is the
        // vertical field with A(q) W = det e_3; tangent to the annihilator and
        // independent of C over the plane whenever (u4, u5) != 0.
        PolyVF<S> second = det2n * (cs.u[3] * hamiltonian_field(cs.u[0]) +
                                    cs.u[4] * hamiltonian_field(cs.u[1]));
        const MPoly<S> norm2 = cs.u[3] * cs.u[3] + cs.u[4] * cs.u[4];
        for (std::size_t s = 0; s < 3; ++s) {
            const std::size_t k = n + static_cast<std::size_t>(piv.cols[s]);
            second.comp[k] = second.comp[k] - norm2 * phase_lift(piv.adjugate[s][2]);
        }
        fields.push_back(std::move(second));
    }
    for (int j = 0; j < static_cast<int>(n); ++j) {
        if (j == piv.cols[0] || j == piv.cols[1] || j == piv.cols[2]) continue;
        PolyVF<S> w = PolyVF<S>::zero(static_cast<int>(2 * n));
        w.comp[n + static_cast<std::size_t>(j)] = det2n;
        for (std::size_t s = 0; s < 3; ++s) {
            MPoly<S> entry(static_cast<int>(n));
            for (std::size_t r = 0; r < 3; ++r)
                entry = entry + piv.adjugate[s][r] * cs.X[r].comp[static_cast<std::size_t>(j)];
            const std::size_t k = n + static_cast<std::size_t>(piv.cols[s]);
            w.comp[k] = -phase_lift(entry);
        }
        fields.push_back(std::move(w));
    }
    return fields;
}

}  // namespace detail

// Intersection of a line inside the plane span{X1(q), X2(q)} with the affine
// velocity set {X1(q) + u X2(q)}. The intersection point, when it exists, is
// unique; a line parallel to X2(q) misses the set.
template <class S>
std::vector<S> regular_line_velocity(const ModelSpec<S>& ms, const std::vector<S>& q,
                                     const std::vector<S>& line) {
    using Ops = ScalarOps<S>;
    const std::size_t nv = ms.X1.comp.size();
    if (q.size() != nv || line.size() != nv)
        throw DimensionMismatch("the point or the direction has the wrong number of coordinates");
    bool all_zero = true;
    for (const S& c : line)
        if (!Ops::is_zero(c)) all_zero = false;
    if (all_zero) throw InconsistentSystem("the zero vector does not span a line");
    const std::vector<S> a1 = ms.X1.eval(q);
    const std::vector<S> a2 = ms.X2.eval(q);
    if (rank(Matrix<S>{a1, a2}) < 2)
        throw DegenerateDistribution("the model fields are collinear at q");
    // line = a X1(q) + b X2(q); solve the overdetermined pair column-wise.
    Matrix<S> cols(nv, std::vector<S>(2, Ops::zero()));
    for (std::size_t k = 0; k < nv; ++k) {
        cols[k][0] = a1[k];
        cols[k][1] = a2[k];
    }
    const std::vector<S> ab = solve_linear(cols, line);
    if (Ops::negligible(ab[0]))
        throw EmptyIntersection("the line is parallel to the control direction and misses the velocity set");
    const S u = ab[1] * Ops::inv(ab[0]);
    std::vector<S> out(nv, Ops::zero());
    for (std::size_t k = 0; k < nv; ++k) out[k] = a1[k] + u * a2[k];
    return out;
}

// Moves a covector onto the annihilator of the plane and its first bracket:
// returns (q, p') with p' equal to p corrected in the three pivot momenta so
// that u1 = u2 = u3 = 0 exactly.
template <class S>
std::vector<S> annihilator_adjust(const CotangentSystem<S>& cs, const std::vector<S>& q,
                                  const std::vector<S>& p) {
    using Ops = ScalarOps<S>;
    const std::size_t n = static_cast<std::size_t>(cs.n);
    if (q.size() != n || p.size() != n)
        throw DimensionMismatch("the base point or the covector has the wrong number of coordinates");
    const auto piv = detail::vertical_pivots(cs, q);
    Matrix<S> block(3, std::vector<S>(3, Ops::zero()));
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) block[r][c] = piv.block[r][c].eval(q);
    std::vector<S> residual(3, Ops::zero());
    for (std::size_t r = 0; r < 3; ++r) {
        const std::vector<S> row = cs.X[r].eval(q);
        for (std::size_t k = 0; k < n; ++k) residual[r] += row[k] * p[k];
    }
    const std::vector<S> corr = solve_linear(block, residual);
    std::vector<S> lambda(q);
    lambda.insert(lambda.end(), p.begin(), p.end());
    for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t k = n + static_cast<std::size_t>(piv.cols[c]);
        lambda[k] = lambda[k] - corr[c];
    }
    return lambda;
}

// Default working covector for a model: base point at the origin, momentum
// seeded with p_z = 1 and corrected onto the annihilator.
template <class S>
std::vector<S> default_annihilator_point(const CotangentSystem<S>& cs) {
    using Ops = ScalarOps<S>;
    const std::size_t n = static_cast<std::size_t>(cs.n);
    const std::vector<S> q(n, Ops::zero());
    std::vector<S> p(n, Ops::zero());
    p[n - 1] = Ops::one();
    return annihilator_adjust(cs, q, p);
}

struct RegularityReport {
    bool regular = false;
    std::vector<int> osculation_dims;
};

// Osculation chain of the lifted plane along the abnormal extremal through
// lambda. The lift J collects the phase-space directions that are tangent to
// {u1 = u2 = u3 = 0} and project into the plane; repeated bracketing with C
// yields the chain J = J^(0), J^(1), ..., whose dimensions at lambda are
// reported. The point is regular when the chain reaches dimension 2n - 4
// after n - 3 steps.
template <class S>
RegularityReport regular_point_test(const CotangentSystem<S>& cs, const std::vector<S>& lambda) {
    using Ops = ScalarOps<S>;
    const std::size_t n = static_cast<std::size_t>(cs.n);
    if (lambda.size() != 2 * n)
        throw DimensionMismatch("the phase-space point has the wrong number of coordinates");
    for (std::size_t i = 0; i < 3; ++i)
        if (!Ops::negligible(cs.u[i].eval(lambda)))
            throw InconsistentSystem("the point does not satisfy u1 = u2 = u3 = 0");
    const S u4 = cs.u[3].eval(lambda);
    const S u5 = cs.u[4].eval(lambda);
    if (Ops::negligible(u4) && Ops::negligible(u5))
        throw OnD3Annihilator("u4 and u5 both vanish, so no characteristic direction passes through the point");

    const std::vector<S> q(lambda.begin(), lambda.begin() + static_cast<std::ptrdiff_t>(n));
    const auto piv = detail::vertical_pivots(cs, q);
    std::vector<PolyVF<S>> fields = detail::lift_sections(cs, piv);

    Matrix<S> rows;
    for (const auto& f : fields) rows.push_back(f.eval(lambda));
    RegularityReport rep;
    rep.osculation_dims.push_back(rank(rows));
    std::size_t level_begin = 0;
    for (std::size_t step = 1; step + 3 <= n; ++step) {
        const std::size_t hi = fields.size();
        for (std::size_t j = level_begin; j < hi; ++j) {
            PolyVF<S> br = lie_bracket(cs.C, fields[j]);
            rows.push_back(br.eval(lambda));
            fields.push_back(std::move(br));
        }
        level_begin = hi;
        rep.osculation_dims.push_back(rank(rows));
    }
    rep.regular = rep.osculation_dims.back() == static_cast<int>(2 * n - 4);
    return rep;
}

}  // namespace rank2geo
