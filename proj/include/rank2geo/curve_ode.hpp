#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rank2geo/errors.hpp"
#include "rank2geo/jet.hpp"
#include "rank2geo/linalg.hpp"

namespace rank2geo {

// A curve in projective space P^{2m-1}, encoded by the linear ODE its
// homogeneous coordinate section satisfies:
//
//     E^{(2m)} = B_{2m-1} E^{(2m-1)} + ... + B_1 E' + B_0 E.
//
// The coefficients are jets in the curve parameter at the base point 0.
// The param_tag records which gauge/parameter normalizations are known
// to hold:
//
//   arbitrary       no normalization claimed
//   semi_canonical  B_{2m-1} == 0 (section gauged so the subleading
//                   coefficient vanishes)
//   projective      additionally B_{2m-2} == 0 (parameter is projective)
//   canonical       B_{2m-1} == 0 and the parameter normalizes the
//                   lowest nonvanishing even invariant to +-1; note
//                   B_{2m-2} is generally nonzero again in this gauge
enum class ParamTag { arbitrary, semi_canonical, projective, canonical };

inline const char* param_tag_name(ParamTag t) {
    switch (t) {
        case ParamTag::arbitrary: return "arbitrary";
        case ParamTag::semi_canonical: return "semi_canonical";
        case ParamTag::projective: return "projective";
        case ParamTag::canonical: return "canonical";
    }
    return "arbitrary";
}

inline ParamTag param_tag_from_name(const std::string& s) {
    if (s == "arbitrary") return ParamTag::arbitrary;
    if (s == "semi_canonical") return ParamTag::semi_canonical;
    if (s == "projective") return ParamTag::projective;
    if (s == "canonical") return ParamTag::canonical;
    throw ValidationError("unknown param_tag '" + s + "'");
}

template <class S>
struct CurveODE {
    long long m = 1;
    std::vector<Jet<S>> B;
    ParamTag tag = ParamTag::arbitrary;

    CurveODE() : B(2, Jet<S>::poly({})) {}

    CurveODE(long long m_, std::vector<Jet<S>> B_, ParamTag tag_ = ParamTag::arbitrary)
        : m(m_), B(std::move(B_)), tag(tag_) {
        if (m < 1) throw BadDimension("curve order m must be at least 1");
        if (B.size() != static_cast<std::size_t>(2 * m))
            throw DimensionMismatch("a curve of order m needs exactly 2m coefficient jets");
    }
};

// Wilczynski invariants W_1 ... W_{2m-2}; W[i-1] holds W_i, a relative
// invariant of weight i+2 (it transforms by (upsilon')^{i+2} under
// reparametrization).
template <class S>
struct WilczynskiSet {
    std::vector<Jet<S>> W;
};

struct SelfDualReport {
    bool is_self_dual = false;
    std::optional<long long> witness;  // first odd index whose invariant persists
};

// Antisymmetric scalar matrix of the invariant symplectic form on the
// solution space, written in the jet basis (E, E', ..., E^{(2m-1)})(0).
template <class S>
struct SympForm {
    Matrix<S> matrix;
};

template <class S>
struct CurvatureTuple {
    long long m = 0;
    std::vector<Jet<S>> rho;  // rho[i-1] holds rho_i
    std::optional<int> epsilon;
    std::optional<long long> i0;
};

template <class S>
struct ProjectiveCurve {
    CurveODE<S> curve;
    Jet<S> upsilon;  // old parameter as a jet in the new one
};

template <class S>
struct StrongScale {
    CurveODE<S> curve;
    S scale;     // section multiplier making |sigma(E^{(m)}, E^{(m-1)})| = 1
    S scale_sq;  // its square, always exact on the rational backend
    int sign;    // sign of sigma(E^{(m)}, E^{(m-1)})(0), the residual Z_2 datum
};

template <class S>
struct CanonicalCurve {
    CurveODE<S> curve;
    Jet<S> upsilon;  // composite reparametrization from the input parameter
    long long i0 = 0;
    int epsilon = 0;
};

inline long long default_jet_order(long long m) { return 2 * m + 6; }

namespace detail {

template <class S>
S factorial_s(long long n) {
    S r = ScalarOps<S>::one();
    for (long long i = 2; i <= n; ++i) r *= ScalarOps<S>::from_long(static_cast<long>(i));
    return r;
}

template <class S>
S binomial_s(long long n, long long k) {
    if (k < 0 || k > n) return ScalarOps<S>::zero();
    S r = ScalarOps<S>::one();
    for (long long i = 0; i < k; ++i) {
        r *= ScalarOps<S>::from_long(static_cast<long>(n - i));
        r = ScalarOps<S>::inv(ScalarOps<S>::from_long(static_cast<long>(i + 1))) * r;
    }
    return r;
}

template <class S>
long long min_coeff_order(const CurveODE<S>& c) {
    long long mn = kOrdInf;
    for (const auto& b : c.B) mn = std::min(mn, b.order());
    return mn;
}

// Working order policy: an explicit request wins; otherwise the honest
// minimum over the coefficients; a purely polynomial system, which could
// be expanded to any order, gets the default.
template <class S>
long long resolve_order(const CurveODE<S>& c, long long requested) {
    if (requested >= 0) return requested;
    const long long mn = min_coeff_order(c);
    if (mn == kOrdInf) return default_jet_order(c.m);
    if (mn < 0) throw TruncationExceeded("curve coefficients carry no jet data");
    return mn;
}

// Largest coefficient magnitude across the system, floored at one so it
// never tightens an absolute tolerance. Residual checks downstream of
// gauge and reparametrization sweeps measure their roundoff against this.
template <class S>
S coefficient_scale(const CurveODE<S>& c) {
    using Ops = ScalarOps<S>;
    S best = Ops::one();
    for (const auto& b : c.B)
        for (const S& v : b.stored()) {
            const S a = (Ops::sign(v) < 0) ? S(-v) : v;
            if (best < a) best = a;
        }
    return best;
}

template <class S>
ParamTag detect_tag(const std::vector<Jet<S>>& B, long long m) {
    if (!B[static_cast<std::size_t>(2 * m - 1)].vanishes_to_order()) return ParamTag::arbitrary;
    if (2 * m - 2 >= 0 && B[static_cast<std::size_t>(2 * m - 2)].vanishes_to_order())
        return ParamTag::projective;
    return ParamTag::semi_canonical;
}

}  // namespace detail

// The 2m jet solutions F_l with F_l^{(k)}(0) = delta_{lk}, each carried
// to order resolve_order(c, K) + 2m. Solutions are generically
// transcendental, so the result is always a finite-order jet.
template <class S>
std::vector<Jet<S>> fundamental_system(const CurveODE<S>& c, long long K = -1) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    const long long Ks = detail::resolve_order(c, K) + 2 * m;
    std::vector<Jet<S>> sols;
    sols.reserve(static_cast<std::size_t>(2 * m));
    for (long long l0 = 0; l0 < 2 * m; ++l0) {
        std::vector<S> s(static_cast<std::size_t>(Ks) + 1, Ops::zero());
        s[static_cast<std::size_t>(l0)] = Ops::inv(detail::factorial_s<S>(l0));
        for (long long l = 2 * m; l <= Ks; ++l) {
            // Coefficient of t^{l-2m} in sum_i B_i F^{(i)} fixes s_l.
            const long long j = l - 2 * m;
            S acc = Ops::zero();
            for (long long i = 0; i < 2 * m; ++i) {
                for (long long a = 0; a <= j; ++a) {
                    const S b = c.B[static_cast<std::size_t>(i)].coeff(j - a);
                    if (Ops::is_zero(b)) continue;
                    // F^{(i)} coefficient of t^a is s_{a+i} (a+i)!/a!.
                    S fall = Ops::one();
                    for (long long f = a + 1; f <= a + i; ++f)
                        fall *= Ops::from_long(static_cast<long>(f));
                    acc += b * s[static_cast<std::size_t>(a + i)] * fall;
                }
            }
            S fall = Ops::one();
            for (long long f = j + 1; f <= l; ++f) fall *= Ops::from_long(static_cast<long>(f));
            s[static_cast<std::size_t>(l)] = Ops::inv(fall) * acc;
        }
        sols.push_back(Jet<S>::from_coeffs(std::move(s), Ks));
    }
    return sols;
}

// Recovers the coefficient jets of the order-2m ODE a given list of 2m
// jet solutions satisfies. The solutions must stay independent at the
// base point. Loses 2m jet orders: the honest price of reading a 2m-th
// derivative off each solution.
template <class S>
CurveODE<S> ode_from_solutions(long long m, const std::vector<Jet<S>>& sols) {
    if (sols.size() != static_cast<std::size_t>(2 * m))
        throw DimensionMismatch("need exactly 2m solutions to pin an order-2m equation");
    Matrix<Jet<S>> ders(static_cast<std::size_t>(2 * m) + 1,
                        std::vector<Jet<S>>(static_cast<std::size_t>(2 * m)));
    for (std::size_t l = 0; l < sols.size(); ++l) ders[0][l] = sols[l];
    for (std::size_t k = 1; k <= static_cast<std::size_t>(2 * m); ++k)
        for (std::size_t l = 0; l < sols.size(); ++l) ders[k][l] = differentiate(ders[k - 1][l]);

    // Row per solution l: sum_i F_l^{(i)} B_i = F_l^{(2m)}.
    Matrix<Jet<S>> a(sols.size()), rhs(sols.size());
    for (std::size_t l = 0; l < sols.size(); ++l) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(2 * m); ++i)
            a[l].push_back(ders[i][l]);
        rhs[l].push_back(ders[static_cast<std::size_t>(2 * m)][l]);
    }
    const Matrix<Jet<S>> x = jet_solve_square(std::move(a), std::move(rhs));
    std::vector<Jet<S>> B;
    B.reserve(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i) B.push_back(x[i][0]);
    const ParamTag tag = detail::detect_tag(B, m);
    return CurveODE<S>(m, std::move(B), tag);
}

// Gauges the section E -> g E with g'/g = B_{2m-1}/(2m), which kills the
// E^{(2m-1)} coefficient. Only the logarithmic-derivative chain
// h_k = g^{(k)}/g is ever needed, so polynomial inputs stay exact:
// h_0 = 1 and h_{k+1} = h_k' + h_k g'/g.
template <class S>
CurveODE<S> semi_canonicalize(const CurveODE<S>& c) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    const std::size_t top = static_cast<std::size_t>(2 * m - 1);
    if (c.B[top].vanishes_to_order()) {
        CurveODE<S> out = c;
        if (out.tag == ParamTag::arbitrary) out.tag = detail::detect_tag(out.B, m);
        return out;
    }

    const Jet<S> phi = Ops::inv(Ops::from_long(static_cast<long>(2 * m))) * c.B[top];
    std::vector<Jet<S>> h(static_cast<std::size_t>(2 * m) + 1);
    h[0] = Jet<S>::constant(Ops::one(), kOrdInf);
    for (std::size_t k = 0; k < h.size() - 1; ++k) h[k + 1] = differentiate(h[k]) + h[k] * phi;

    std::vector<Jet<S>> nb(static_cast<std::size_t>(2 * m));
    for (long long j = 0; j < 2 * m; ++j) {
        Jet<S> acc = Jet<S>::poly({});
        for (long long i = j; i < 2 * m; ++i)
            acc = acc + detail::binomial_s<S>(i, j) *
                            (c.B[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i - j)]);
        acc = acc - detail::binomial_s<S>(2 * m, j) * h[static_cast<std::size_t>(2 * m - j)];
        nb[static_cast<std::size_t>(j)] = acc;
    }
    if (!vanishes_to_scale(nb[top], detail::coefficient_scale(c)))
        throw Error("section gauge failed to remove the subleading coefficient");
    // Zero by construction of the gauge, not by truncation, so the exact
    // zero is the honest value.
    nb[top] = Jet<S>::poly({});
    const ParamTag tag = detail::detect_tag(nb, m);
    return CurveODE<S>(m, std::move(nb), tag);
}

// Parameter substitution t = upsilon(tau). Transports the fundamental
// solutions and re-extracts the equation, so any jet reparametrization
// is accepted; the output tag is re-detected from the new coefficients.
// A linear substitution t = c tau is handled exactly by weight scaling.
template <class S>
CurveODE<S> reparametrize(const CurveODE<S>& c, const Jet<S>& upsilon, long long K = -1) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    if (upsilon.order() < 1 && !upsilon.is_exact_poly())
        throw TruncationExceeded("reparametrization jet needs at least the linear coefficient");
    if (!Ops::is_zero(upsilon.coeff(0)))
        throw NonCompositionalArgument("reparametrization must fix the base point");
    if (!Ops::is_unit(upsilon.coeff(1))) throw SingularReparametrization();

    if (upsilon.is_exact_poly() && upsilon.stored().size() <= 2) {
        const S cc = upsilon.coeff(1);
        std::vector<Jet<S>> nb(static_cast<std::size_t>(2 * m));
        for (long long j = 0; j < 2 * m; ++j) {
            S w = Ops::one();
            for (long long p = 0; p < 2 * m - j; ++p) w *= cc;
            nb[static_cast<std::size_t>(j)] =
                w * compose(c.B[static_cast<std::size_t>(j)], upsilon);
        }
        const ParamTag tag = detail::detect_tag(nb, m);
        return CurveODE<S>(m, std::move(nb), tag);
    }

    const long long mn = detail::min_coeff_order(c);
    long long Ks = (mn == kOrdInf) ? kOrdInf : mn + 2 * m;
    if (upsilon.order() != kOrdInf) Ks = std::min(Ks, upsilon.order());
    if (Ks == kOrdInf) Ks = detail::resolve_order(c, K) + 2 * m;
    if (Ks < 2 * m)
        throw TruncationExceeded(
            "reparametrization jet too short to re-extract an order-2m equation");
    std::vector<Jet<S>> sols = fundamental_system(c, Ks - 2 * m);
    for (auto& s : sols) s = compose(s, upsilon);
    return ode_from_solutions(m, sols);
}

// Solves the reparametrization equation
//     S(upsilon)(tau) = (3 / (m (4m^2 - 1))) upsilon'(tau)^2 B_{2m-2}(upsilon(tau)),
// with upsilon(0) = 0, upsilon'(0) = 1, upsilon''(0) = 0 pinning the
// Mobius freedom, then transports the curve. The new parameter is
// projective: B_{2m-2} vanishes along with B_{2m-1}.
template <class S>
ProjectiveCurve<S> projective_normalize(const CurveODE<S>& c, long long K = -1) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    if (c.tag == ParamTag::arbitrary)
        throw WrongGauge("projective normalization expects a semi-canonical curve");
    const std::size_t top = static_cast<std::size_t>(2 * m - 1);
    const std::size_t sub = static_cast<std::size_t>(2 * m - 2);
    const S scale = detail::coefficient_scale(c);
    if (!vanishes_to_scale(c.B[top], scale))
        throw WrongGauge("projective normalization expects B_{2m-1} = 0");

    if (vanishes_to_scale(c.B[sub], scale)) {
        CurveODE<S> out = c;
        if (out.tag == ParamTag::semi_canonical) out.tag = ParamTag::projective;
        return {out, Jet<S>::variable(kOrdInf)};
    }

    const long long ordSub = c.B[sub].order();
    const long long Ku = (K >= 0) ? (K + 2 * m + 1)
                                  : (ordSub == kOrdInf
                                         ? default_jet_order(m) + 2 * m + 1
                                         : ordSub + 3);
    const S cst = S(Ops::from_long(3) *
                    Ops::inv(Ops::from_long(static_cast<long>(m * (4 * m * m - 1)))));

    // Coefficients of upsilon; a_l enters the Schwarzian residual at
    // t^{l-3} linearly through upsilon''', with slope l(l-1)(l-2)/2, and
    // enters nowhere below, so one sweep solves the equation.
    std::vector<S> a(static_cast<std::size_t>(Ku) + 1, Ops::zero());
    a[1] = Ops::one();
    const Jet<S> b22 = c.B[sub];
    auto residual = [&](long long ord) {
        const Jet<S> up = Jet<S>::from_coeffs(a, ord);
        const Jet<S> d = differentiate(up);
        return schwarzian(up) - Jet<S>(cst * (d * d * compose(b22.truncated(ord), up)));
    };
    for (long long l = 3; l <= Ku; ++l) {
        const S res = residual(Ku).coeff(l - 3);
        if (Ops::is_zero(res)) continue;
        S slope = Ops::one();
        for (long long f = l - 2; f <= l; ++f) slope *= Ops::from_long(static_cast<long>(f));
        slope = Ops::inv(Ops::from_long(2)) * slope;
        a[static_cast<std::size_t>(l)] -= Ops::inv(slope) * res;
    }
    if (!vanishes_to_scale(residual(Ku), scale))
        throw Error("projective reparametrization equation left a residual");
    const Jet<S> upsilon = Jet<S>::from_coeffs(a, Ku);

    CurveODE<S> moved = reparametrize(c, upsilon);
    CurveODE<S> gauged = semi_canonicalize(moved);
    if (!vanishes_to_scale(gauged.B[sub], scale))
        throw Error("projective normalization failed to remove B_{2m-2}");
    gauged.B[sub] = Jet<S>::poly({});
    gauged.tag = ParamTag::projective;
    return {gauged, upsilon};
}

// The fundamental invariants W_1 ... W_{2m-2} of a curve in projective
// parametrization:
//
//   W_i = ((i+1)!/(2i+2)!) sum_{j=1}^{i} (-1)^{j-1}
//           ((2i-j+3)! (2m-i+j-3)!) / ((i+2-j)! (j-1)!)  B_{2m-3-i+j}^{(j-1)}.
//
// The j >= 2 coefficients are pinned by reparametrization covariance:
// under a Mobius substitution the combination must transform by the
// factor (upsilon')^{i+2} alone, which fixes every ratio kappa_j/kappa_1
// (checked exactly over the rationals in the test suite).
template <class S>
WilczynskiSet<S> wilczynski(const CurveODE<S>& c) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    if (c.tag != ParamTag::projective)
        throw WrongGauge("Wilczynski invariants need a projective parameter");
    WilczynskiSet<S> out;
    for (long long i = 1; i <= 2 * m - 2; ++i) {
        Jet<S> acc = Jet<S>::poly({});
        for (long long j = 1; j <= i; ++j) {
            S coef = detail::factorial_s<S>(2 * i - j + 3) *
                     detail::factorial_s<S>(2 * m - i + j - 3);
            coef = coef * Ops::inv(detail::factorial_s<S>(i + 2 - j));
            coef = coef * Ops::inv(detail::factorial_s<S>(j - 1));
            if (j % 2 == 0) coef = S(-coef);
            Jet<S> term = c.B[static_cast<std::size_t>(2 * m - 3 - i + j)];
            for (long long d = 0; d < j - 1; ++d) term = differentiate(term);
            acc = acc + coef * term;
        }
        const S pref = S(detail::factorial_s<S>(i + 1) * Ops::inv(detail::factorial_s<S>(2 * i + 2)));
        out.W.push_back(pref * acc);
    }
    return out;
}

// A curve is self-dual exactly when every odd invariant vanishes.
template <class S>
SelfDualReport self_dual_test(const CurveODE<S>& c) {
    const S scale = detail::coefficient_scale(c);
    const WilczynskiSet<S> w = wilczynski(c);
    for (std::size_t idx = 0; idx < w.W.size(); idx += 2) {
        if (!vanishes_to_scale(w.W[idx], scale))
            return {false, static_cast<long long>(idx) + 1};
    }
    return {true, std::nullopt};
}

// The constant antisymmetric form making every (m-1)-st osculating
// space isotropic at every parameter value, to jet order. For a
// self-dual curve that form is unique up to scale; the scale and sign
// are pinned by sigma(E^{(m)}, E^{(m-1)})(0) = +1.
template <class S>
SympForm<S> invariant_symplectic_form(const CurveODE<S>& c, long long K = -1) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    const SelfDualReport sd = self_dual_test(c);
    if (!sd.is_self_dual)
        throw NotSelfDual("odd invariant " + std::to_string(*sd.witness) +
                          " obstructs the symplectic form");

    const std::vector<Jet<S>> sols = fundamental_system(c, K);
    Matrix<Jet<S>> ders(static_cast<std::size_t>(m) + 1, std::vector<Jet<S>>(sols.size()));
    for (std::size_t l = 0; l < sols.size(); ++l) ders[0][l] = sols[l];
    for (std::size_t k = 1; k <= static_cast<std::size_t>(m); ++k)
        for (std::size_t l = 0; l < sols.size(); ++l) ders[k][l] = differentiate(ders[k - 1][l]);

    // Unknowns: the above-diagonal entries of the form.
    const std::size_t dim = static_cast<std::size_t>(2 * m);
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t l = k + 1; l < dim; ++l) slots.emplace_back(k, l);

    Matrix<S> rows;
    for (long long aa = 0; aa + 1 <= m - 1; ++aa) {
        for (long long bb = aa + 1; bb <= m - 1; ++bb) {
            std::vector<Jet<S>> cols(slots.size());
            for (std::size_t s = 0; s < slots.size(); ++s) {
                const auto [k, l] = slots[s];
                cols[s] = ders[static_cast<std::size_t>(aa)][k] * ders[static_cast<std::size_t>(bb)][l] -
                          ders[static_cast<std::size_t>(aa)][l] * ders[static_cast<std::size_t>(bb)][k];
            }
            long long ord = kOrdInf;
            for (const auto& j : cols) ord = std::min(ord, j.order());
            for (long long t = 0; t <= ord; ++t) {
                std::vector<S> row(slots.size());
                for (std::size_t s = 0; s < slots.size(); ++s) row[s] = cols[s].coeff(t);
                rows.push_back(std::move(row));
            }
        }
    }

    std::vector<std::vector<S>> basis;
    if (rows.empty()) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
            std::vector<S> v(slots.size(), Ops::zero());
            v[s] = Ops::one();
            basis.push_back(std::move(v));
        }
    } else {
        basis = kernel_basis(rows);
    }
    if (basis.size() != 1)
        throw DegenerateForm("isotropy system has kernel dimension " +
                             std::to_string(basis.size()) + ", expected 1");

    // sigma(E^{(m)}, E^{(m-1)})(0) reads off the packed entry (m-1, m)
    // with a sign flip, because the jet basis makes v^{(k)}(0) = e_k.
    S val = Ops::zero();
    Matrix<S> mat(dim, std::vector<S>(dim, Ops::zero()));
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto [k, l] = slots[s];
        if (k == static_cast<std::size_t>(m - 1) && l == static_cast<std::size_t>(m))
            val = S(-basis[0][s]);
    }
    if (!Ops::is_unit(val))
        throw DegenerateForm("sigma(E^{(m)}, E^{(m-1)}) vanishes at the base point");
    const S inv = Ops::inv(val);
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto [k, l] = slots[s];
        mat[k][l] = inv * basis[0][s];
        mat[l][k] = S(-mat[k][l]);
    }
    if (rank(mat) != static_cast<int>(dim))
        throw DegenerateForm("invariant form is degenerate");
    return {std::move(mat)};
}

// Matches the coefficients of
//     E^{(2m)} = sum_{i=1}^{m} (-1)^{i+1} (d/dt)^{m-i} ( rho_i (d/dt)^{m-i} E )
// against B. Expanding by the product rule, B_j collects
// (-1)^{i+1} C(m-i, 2(m-i)-j) rho_i^{(2(m-i)-j)} over the i with
// m-i <= j <= 2(m-i). Row j = 2(m-i) introduces rho_i bare, so a single
// top-down sweep solves the triangular system; the odd rows carry no new
// unknown and must balance on their own, which is exactly self-duality.
template <class S>
CurvatureTuple<S> symplectic_curvatures(const CurveODE<S>& c) {
    const long long m = c.m;
    const S scale = detail::coefficient_scale(c);
    if (!vanishes_to_scale(c.B[static_cast<std::size_t>(2 * m - 1)], scale))
        throw WrongGauge("self-adjoint matching needs B_{2m-1} = 0");

    std::vector<Jet<S>> rho(static_cast<std::size_t>(m));
    std::vector<bool> have(static_cast<std::size_t>(m), false);
    for (long long j = 2 * m - 2; j >= 0; --j) {
        Jet<S> acc = Jet<S>::poly({});
        long long fresh = 0;
        for (long long i = 1; i <= m; ++i) {
            const long long k = 2 * (m - i) - j;
            if (k < 0 || k > m - i) continue;
            if (k == 0 && !have[static_cast<std::size_t>(i - 1)]) {
                fresh = i;
                continue;
            }
            if (!have[static_cast<std::size_t>(i - 1)]) continue;
            Jet<S> term = rho[static_cast<std::size_t>(i - 1)];
            for (long long d = 0; d < k; ++d) term = differentiate(term);
            S coef = detail::binomial_s<S>(m - i, k);
            if (i % 2 == 0) coef = S(-coef);
            acc = acc + coef * term;
        }
        const Jet<S> res = c.B[static_cast<std::size_t>(j)] - acc;
        if (fresh > 0) {
            rho[static_cast<std::size_t>(fresh - 1)] = (fresh % 2 == 0) ? Jet<S>(-res) : res;
            have[static_cast<std::size_t>(fresh - 1)] = true;
        } else {
            if (res.order() < 0 && !res.is_exact_poly())
                throw TruncationExceeded("insufficient jet order to verify self-adjointness");
            if (!vanishes_to_scale(res, scale))
                throw NotSelfDual("coefficient row " + std::to_string(j) +
                                  " is incompatible with a self-adjoint form");
        }
    }
    CurvatureTuple<S> out;
    out.m = m;
    out.rho = std::move(rho);
    return out;
}

// Builds the coefficient jets of the self-adjoint equation with the
// given curvatures; the inverse of symplectic_curvatures.
template <class S>
CurveODE<S> self_adjoint_ode(long long m, const std::vector<Jet<S>>& rho) {
    if (m < 1) throw BadDimension("curve order m must be at least 1");
    if (rho.size() != static_cast<std::size_t>(m))
        throw DimensionMismatch("need exactly m curvature jets");
    std::vector<Jet<S>> B(static_cast<std::size_t>(2 * m), Jet<S>::poly({}));
    for (long long i = 1; i <= m; ++i) {
        for (long long k = 0; k <= m - i; ++k) {
            const long long j = 2 * (m - i) - k;
            Jet<S> term = rho[static_cast<std::size_t>(i - 1)];
            for (long long d = 0; d < k; ++d) term = differentiate(term);
            S coef = detail::binomial_s<S>(m - i, k);
            if (i % 2 == 0) coef = S(-coef);
            B[static_cast<std::size_t>(j)] = B[static_cast<std::size_t>(j)] + coef * term;
        }
    }
    return CurveODE<S>(m, std::move(B), ParamTag::semi_canonical);
}

// Scale on the section enforcing |sigma(E^{(m)}, E^{(m-1)})| = 1 at the
// base point (and along the curve, by constancy of the form). The
// coefficients B are blind to constant section scaling, so the returned
// curve is unchanged; the data is the scale itself, its square, and the
// sign of the pairing, which no real scaling can flip.
template <class S>
StrongScale<S> strongly_canonical_scale(const CurveODE<S>& c, const SympForm<S>& sigma) {
    using Ops = ScalarOps<S>;
    const std::size_t mm = static_cast<std::size_t>(c.m);
    if (sigma.matrix.size() != static_cast<std::size_t>(2 * c.m))
        throw DimensionMismatch("form size does not match the curve");
    const S val = sigma.matrix[mm][mm - 1];
    if (!Ops::is_unit(val)) throw DegenerateForm("sigma(E^{(m)}, E^{(m-1)}) vanishes at 0");
    const S scale_sq = Ops::inv(Ops::abs(val));
    const auto root = Ops::nth_root(scale_sq, 2);
    if (!root)
        throw NotAPerfectPower("section scale squared " + Ops::str(scale_sq) +
                               " is not a perfect square; no exact scale exists");
    return StrongScale<S>{c, *root, scale_sq, Ops::sign(val) >= 0 ? +1 : -1};
}

// Finds the smallest i0 with W_{2 i0}(0) != 0, then solves
//     A(upsilon(tau)) upsilon'(tau)^{2 i0 + 2} = epsilon,   A = W_{2 i0},
// for the reparametrization making that invariant constantly +-1. The
// returned curve is re-gauged (B_{2m-1} = 0) and tagged canonical.
template <class S>
CanonicalCurve<S> canonical_parametrization(const CurveODE<S>& c, long long K = -1) {
    using Ops = ScalarOps<S>;
    const long long m = c.m;
    const CurveODE<S> semi = semi_canonicalize(c);
    ProjectiveCurve<S> proj = projective_normalize(semi, K);
    const S scale = detail::coefficient_scale(proj.curve);
    const WilczynskiSet<S> w = wilczynski(proj.curve);
    for (std::size_t idx = 0; idx < w.W.size(); idx += 2)
        if (!vanishes_to_scale(w.W[idx], scale))
            throw NotSelfDual("odd invariant " + std::to_string(idx + 1) + " persists");

    long long i0 = 0;
    for (long long i = 1; 2 * i <= 2 * m - 2; ++i) {
        const Jet<S>& cand = w.W[static_cast<std::size_t>(2 * i - 1)];
        if (cand.order() < 0 && !cand.is_exact_poly())
            throw TruncationExceeded("invariant W_" + std::to_string(2 * i) +
                                     " carries no coefficients");
        if (!Ops::negligible(S(cand.coeff(0) * Ops::inv(scale)))) {
            i0 = i;
            break;
        }
    }
    if (i0 == 0) throw AllInvariantsVanish();

    Jet<S> A = w.W[static_cast<std::size_t>(2 * i0 - 1)];
    // A nonconstant polynomial invariant has no polynomial root or
    // reciprocal; pick a finite working order for it.
    if (A.is_exact_poly() && A.stored().size() > 1)
        A = A.truncated(K >= 0 ? K : default_jet_order(m));
    const int epsilon = (Ops::sign(A.coeff(0)) >= 0) ? +1 : -1;
    const unsigned long weight = static_cast<unsigned long>(2 * i0 + 2);

    // upsilon' = H(upsilon) with H = (epsilon / A)^{1/(2 i0 + 2)}.
    const Jet<S> eps_jet = Jet<S>::constant(Ops::from_long(epsilon), kOrdInf);
    const Jet<S> H = nth_root_of(
        (A.is_exact_poly() && A.stored().size() <= 1)
            ? Jet<S>::constant(S(Ops::from_long(epsilon) * Ops::inv(A.coeff(0))), kOrdInf)
            : Jet<S>(eps_jet / A),
        weight);

    Jet<S> upsilon2;
    if (H.is_exact_poly() && H.stored().size() <= 1) {
        upsilon2 = Jet<S>::poly({Ops::zero(), H.coeff(0)});
    } else {
        const long long Ku = H.order() + 1;
        std::vector<S> a(static_cast<std::size_t>(Ku) + 1, Ops::zero());
        a[1] = H.coeff(0);
        for (long long l = 1; l < Ku; ++l) {
            const Jet<S> partial = Jet<S>::from_coeffs(a, l);
            const S rhs = compose(H.truncated(l), partial).coeff(l);
            a[static_cast<std::size_t>(l + 1)] =
                Ops::inv(Ops::from_long(static_cast<long>(l + 1))) * rhs;
        }
        upsilon2 = Jet<S>::from_coeffs(std::move(a), Ku);
    }

    CurveODE<S> moved = reparametrize(proj.curve, upsilon2);
    CurveODE<S> gauged = semi_canonicalize(moved);
    gauged.tag = ParamTag::canonical;

    CanonicalCurve<S> out;
    out.curve = std::move(gauged);
    out.upsilon = compose(proj.upsilon, upsilon2);
    out.i0 = i0;
    out.epsilon = epsilon;
    return out;
}

}  // namespace rank2geo
