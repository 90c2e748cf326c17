#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "rank2geo/curve_ode.hpp"

using namespace rank2geo;

namespace {

Jet<Rat> jconst(long v) { return Jet<Rat>::constant(Rat(v), kOrdInf); }
Jet<Rat> jconst(const Rat& v) { return Jet<Rat>::constant(v, kOrdInf); }
Jet<Rat> jzero() { return Jet<Rat>::poly({}); }

CurveODE<Rat> constant_curve(long long m, std::vector<long> b, ParamTag tag) {
    std::vector<Jet<Rat>> B;
    for (long v : b) B.push_back(jconst(v));
    return CurveODE<Rat>(m, std::move(B), tag);
}

std::mt19937 rng(20240817);

Rat rnd_rat() {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 5);
    Rat r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

Jet<Rat> rnd_jet(long long ord) {
    std::vector<Rat> c;
    for (long long k = 0; k <= ord; ++k) c.push_back(rnd_rat());
    return Jet<Rat>::from_coeffs(std::move(c), ord);
}

// Mobius map fixing the origin, as a jet: a t / (1 + c t).
Jet<Rat> mobius_jet(const Rat& a, const Rat& c, long long ord) {
    const Jet<Rat> num = Jet<Rat>::poly({Rat(0), a}).truncated(ord);
    const Jet<Rat> den = Jet<Rat>::poly({Rat(1), c}).truncated(ord);
    return num / den;
}

Jet<Rat> jet_pow(const Jet<Rat>& j, long long p) {
    Jet<Rat> r = Jet<Rat>::constant(Rat(1), j.order());
    for (long long i = 0; i < p; ++i) r = r * j;
    return r;
}

}  // namespace

TEST_CASE("gauging away the subleading coefficient") {
    SUBCASE("already gauged input is unchanged") {
        const auto c = constant_curve(2, {3, 1, 4, 0}, ParamTag::arbitrary);
        const auto g = semi_canonicalize(c);
        CHECK(g.tag == ParamTag::semi_canonical);
        for (int i = 0; i < 4; ++i) CHECK(g.B[i] == c.B[i]);
    }

    SUBCASE("first order: E'' = 2E' becomes E'' = E") {
        const auto c = constant_curve(1, {0, 2}, ParamTag::arbitrary);
        const auto g = semi_canonicalize(c);
        CHECK(g.tag == ParamTag::semi_canonical);
        CHECK(g.B[1].vanishes_to_order());
        CHECK(g.B[0].is_exact_poly());
        CHECK(g.B[0].coeff(0) == Rat(1));
        CHECK(g.B[0].stored().size() == 1);
    }

    SUBCASE("random jet coefficients, m = 2: gauge kills B3 and preserves the curve") {
        for (int trial = 0; trial < 5; ++trial) {
            const long long K = 10;
            std::vector<Jet<Rat>> B{rnd_jet(K), rnd_jet(K), rnd_jet(K), rnd_jet(K)};
            const CurveODE<Rat> c(2, B, ParamTag::arbitrary);
            const auto g = semi_canonicalize(c);
            CHECK(g.tag == ParamTag::semi_canonical);
            CHECK(g.B[3].vanishes_to_order());

            // The two fundamental bases must differ by F = E / g with
            // g = exp(int B3 / 4): dividing the old solutions by g has
            // to solve the new equation.
            const Jet<Rat> gauge =
                exp_of(integrate(Rat(1, 4) * c.B[3].truncated(K)));
            const auto sols = fundamental_system(c);
            std::vector<Jet<Rat>> moved;
            for (const auto& s : sols) moved.push_back(s / gauge.truncated(s.order()));
            const auto back = ode_from_solutions(2, moved);
            for (int i = 0; i < 4; ++i) CHECK(jets_agree(back.B[i], g.B[i]));
        }
    }
}

TEST_CASE("projective normalization by reparametrization") {
    SUBCASE("already projective input returns the identity reparametrization") {
        const auto c = constant_curve(2, {7, 2, 0, 0}, ParamTag::semi_canonical);
        const auto out = projective_normalize(c);
        CHECK(out.curve.tag == ParamTag::projective);
        CHECK(out.upsilon == Jet<Rat>::variable(kOrdInf));
        CHECK(out.curve.B[0].coeff(0) == Rat(7));
    }

    SUBCASE("wrong gauge is rejected") {
        const auto c = constant_curve(2, {1, 2, 3, 4}, ParamTag::arbitrary);
        CHECK_THROWS_AS((void)projective_normalize(c), WrongGauge);
    }

    SUBCASE("constant B2, m = 2: the reparametrization satisfies its defining equation") {
        const auto c = constant_curve(2, {0, 0, 5, 0}, ParamTag::semi_canonical);
        const auto out = projective_normalize(c);
        CHECK(out.curve.tag == ParamTag::projective);
        CHECK(out.curve.B[2].vanishes_to_order());
        CHECK(out.curve.B[3].vanishes_to_order());

        const Jet<Rat>& up = out.upsilon;
        CHECK(up.coeff(0) == Rat(0));
        CHECK(up.coeff(1) == Rat(1));
        CHECK(up.coeff(2) == Rat(0));
        const Jet<Rat> d = differentiate(up);
        const Jet<Rat> lhs = schwarzian(up);
        const Jet<Rat> rhs = Rat(1, 10) * (d * d * compose(jconst(5).truncated(up.order()), up));
        CHECK(jets_agree(lhs, rhs));
    }

    SUBCASE("jet-valued input: residual zero and both top coefficients removed") {
        for (int trial = 0; trial < 3; ++trial) {
            const long long K = 12;
            std::vector<Jet<Rat>> B{rnd_jet(K), rnd_jet(K), rnd_jet(K), jzero()};
            const CurveODE<Rat> c(2, B, ParamTag::semi_canonical);
            const auto out = projective_normalize(c);
            CHECK(out.curve.tag == ParamTag::projective);
            CHECK(out.curve.B[2].vanishes_to_order());
            CHECK(out.curve.B[3].vanishes_to_order());
        }
    }

    SUBCASE("a further Mobius reparametrization keeps the parameter projective") {
        const auto c = constant_curve(2, {0, 0, 3, 0}, ParamTag::semi_canonical);
        const auto out = projective_normalize(c);
        const Jet<Rat> mob = mobius_jet(Rat(1), Rat(2), out.curve.B[0].order());
        const auto moved = reparametrize(out.curve, mob);
        const auto gauged = semi_canonicalize(moved);
        CHECK(gauged.B[3].vanishes_to_order());
        CHECK(gauged.B[2].vanishes_to_order());
        CHECK(gauged.tag == ParamTag::projective);
    }
}

TEST_CASE("fundamental invariants") {
    SUBCASE("rational normal curve: all invariants vanish") {
        const auto c = constant_curve(3, {0, 0, 0, 0, 0, 0}, ParamTag::projective);
        const auto w = wilczynski(c);
        REQUIRE(w.W.size() == 4);
        for (const auto& wi : w.W) CHECK(wi.vanishes_to_order());
    }

    SUBCASE("m = 2 closed form: W1 = B1, W2 = B0 - B1'/2") {
        const long long K = 8;
        const Jet<Rat> b0 = rnd_jet(K), b1 = rnd_jet(K);
        const CurveODE<Rat> c(2, {b0, b1, jzero(), jzero()}, ParamTag::projective);
        const auto w = wilczynski(c);
        REQUIRE(w.W.size() == 2);
        CHECK(jets_agree(w.W[0], b1));
        CHECK(jets_agree(w.W[1], b0 - Rat(1, 2) * differentiate(b1)));
    }

    SUBCASE("constant coefficients: W_i = (2m-i-2)! B_{2m-2-i}") {
        const auto c = constant_curve(3, {4, -3, 7, 2, 0, 0}, ParamTag::projective);
        const auto w = wilczynski(c);
        CHECK(w.W[0].coeff(0) == Rat(6) * Rat(2));   // 3! B3
        CHECK(w.W[1].coeff(0) == Rat(2) * Rat(7));   // 2! B2
        CHECK(w.W[2].coeff(0) == Rat(1) * Rat(-3));  // 1! B1
        CHECK(w.W[3].coeff(0) == Rat(1) * Rat(4));   // 0! B0
    }

    SUBCASE("wrong gauge is rejected") {
        const auto c = constant_curve(2, {1, 0, 5, 0}, ParamTag::semi_canonical);
        CHECK_THROWS_AS((void)wilczynski(c), WrongGauge);
    }

    SUBCASE("reparametrization covariance under Mobius maps, m = 2 and 3") {
        for (long long m : {2LL, 3LL}) {
            for (int trial = 0; trial < 4; ++trial) {
                const long long K = 14;
                std::vector<Jet<Rat>> B;
                for (long long i = 0; i < 2 * m; ++i)
                    B.push_back(i < 2 * m - 2 ? rnd_jet(K) : jzero());
                const CurveODE<Rat> c(m, B, ParamTag::projective);

                std::uniform_int_distribution<int> pick(1, 3);
                const Rat a(pick(rng)), cc(pick(rng) - 2);
                const Jet<Rat> mob = mobius_jet(a, cc, K + 2 * m);
                const auto moved = semi_canonicalize(reparametrize(c, mob));
                REQUIRE(moved.tag == ParamTag::projective);

                const auto w0 = wilczynski(c);
                const auto w1 = wilczynski(moved);
                const Jet<Rat> d = differentiate(mob);
                for (std::size_t i = 0; i < w0.W.size(); ++i) {
                    const Jet<Rat> expect =
                        jet_pow(d, static_cast<long long>(i) + 3) *
                        compose(w0.W[i].truncated(mob.order()), mob);
                    CHECK(jets_agree(w1.W[i], expect));
                }
            }
        }
    }
}

TEST_CASE("self-duality detection") {
    SUBCASE("flat curve is self-dual") {
        const auto c = constant_curve(2, {0, 0, 0, 0}, ParamTag::projective);
        const auto r = self_dual_test(c);
        CHECK(r.is_self_dual);
        CHECK(!r.witness.has_value());
    }

    SUBCASE("only B0 present: self-dual for any jet B0") {
        const CurveODE<Rat> c(2, {rnd_jet(9), jzero(), jzero(), jzero()}, ParamTag::projective);
        CHECK(self_dual_test(c).is_self_dual);
    }

    SUBCASE("B1 nonzero: fails with witness 1") {
        const auto c = constant_curve(2, {0, 1, 0, 0}, ParamTag::projective);
        const auto r = self_dual_test(c);
        CHECK(!r.is_self_dual);
        CHECK(r.witness == 1);
    }
}

TEST_CASE("invariant symplectic form") {
    SUBCASE("first-order curve: area form normalized by sigma(E', E) = 1") {
        const auto c = constant_curve(1, {0, 0}, ParamTag::projective);
        const auto f = invariant_symplectic_form(c);
        REQUIRE(f.matrix.size() == 2);
        CHECK(f.matrix[1][0] == Rat(1));
        CHECK(f.matrix[0][1] == Rat(-1));
        CHECK(f.matrix[0][0] == Rat(0));
        CHECK(f.matrix[1][1] == Rat(0));
    }

    SUBCASE("m = 2 constant curve: anti-diagonal pattern") {
        const auto c = constant_curve(2, {-1, 0, 0, 0}, ParamTag::projective);
        const auto f = invariant_symplectic_form(c);
        REQUIRE(f.matrix.size() == 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i + j < 3) CHECK(f.matrix[i][j] == Rat(0));
                if (i + j == 3) CHECK(abs(f.matrix[i][j]) == Rat(1));
            }
        CHECK(f.matrix[2][1] == Rat(1));

        // The osculating plane span{E(0), E'(0)} must be isotropic of
        // half dimension, hence Lagrangian.
        CHECK(f.matrix[0][1] == Rat(0));
    }

    SUBCASE("the pairing sigma(E^{(2)}, E^{(1)}) is constant along the curve") {
        const Jet<Rat> b0 = rnd_jet(10);
        const CurveODE<Rat> c(2, {b0, jzero(), jzero(), jzero()}, ParamTag::projective);
        const auto f = invariant_symplectic_form(c);
        const auto sols = fundamental_system(c);
        std::vector<std::vector<Jet<Rat>>> ders{{}};
        for (const auto& s : sols) ders[0].push_back(s);
        for (int k = 1; k <= 2; ++k) {
            ders.emplace_back();
            for (const auto& s : ders[k - 1]) ders[k].push_back(differentiate(s));
        }
        Jet<Rat> pair = jzero();
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
                pair = pair + f.matrix[k][l] * (ders[2][k] * ders[1][l]);
        CHECK(jets_agree(pair, jconst(1)));
    }

    SUBCASE("non-self-dual input is rejected") {
        const auto c = constant_curve(2, {0, 2, 0, 0}, ParamTag::projective);
        CHECK_THROWS_AS((void)invariant_symplectic_form(c), NotSelfDual);
    }
}

TEST_CASE("curvatures of the self-adjoint form") {
    SUBCASE("flat curve has zero curvatures") {
        const auto c = constant_curve(3, {0, 0, 0, 0, 0, 0}, ParamTag::projective);
        const auto t = symplectic_curvatures(c);
        REQUIRE(t.rho.size() == 3);
        for (const auto& r : t.rho) CHECK(r.vanishes_to_order());
    }

    SUBCASE("m = 2 constant: B2 = rho1, B0 = -rho2") {
        const auto c = constant_curve(2, {5, 0, 7, 0}, ParamTag::semi_canonical);
        const auto t = symplectic_curvatures(c);
        CHECK(t.rho[0].coeff(0) == Rat(7));
        CHECK(t.rho[1].coeff(0) == Rat(-5));
    }

    SUBCASE("round trip on random constant tuples, m = 1..4") {
        for (long long m = 1; m <= 4; ++m) {
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<Jet<Rat>> rho;
                for (long long i = 0; i < m; ++i) rho.push_back(jconst(rnd_rat()));
                const auto c = self_adjoint_ode(m, rho);
                CHECK(c.B[2 * m - 1].vanishes_to_order());
                const auto back = symplectic_curvatures(c);
                for (long long i = 0; i < m; ++i) CHECK(back.rho[i] == rho[i]);
            }
        }
    }

    SUBCASE("round trip on random jet tuples, m = 1..4") {
        for (long long m = 1; m <= 4; ++m) {
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<Jet<Rat>> rho;
                for (long long i = 0; i < m; ++i) rho.push_back(rnd_jet(11));
                const auto c = self_adjoint_ode(m, rho);
                const auto back = symplectic_curvatures(c);
                for (long long i = 0; i < m; ++i) CHECK(jets_agree(back.rho[i], rho[i]));
            }
        }
    }

    SUBCASE("a non-self-adjoint equation is refused") {
        const auto c = constant_curve(2, {0, 3, 0, 0}, ParamTag::semi_canonical);
        CHECK_THROWS_AS((void)symplectic_curvatures(c), NotSelfDual);
    }

    SUBCASE("nonzero subleading coefficient is refused") {
        const auto c = constant_curve(2, {1, 0, 0, 2}, ParamTag::arbitrary);
        CHECK_THROWS_AS((void)symplectic_curvatures(c), WrongGauge);
    }
}

TEST_CASE("section scaling against a symplectic form") {
    SUBCASE("the invariant form is already normalized") {
        const auto c = constant_curve(2, {-1, 0, 0, 0}, ParamTag::projective);
        const auto f = invariant_symplectic_form(c);
        const auto s = strongly_canonical_scale(c, f);
        CHECK(s.scale == Rat(1));
        CHECK(s.scale_sq == Rat(1));
        CHECK(s.sign == 1);
    }

    SUBCASE("pairing 4 forces scale 1/2; pairing -4 flags the sign") {
        const auto c = constant_curve(2, {-1, 0, 0, 0}, ParamTag::projective);
        auto f = invariant_symplectic_form(c);
        for (auto& row : f.matrix)
            for (auto& x : row) x *= Rat(4);
        const auto s = strongly_canonical_scale(c, f);
        CHECK(s.scale == Rat(1, 2));
        CHECK(s.scale_sq == Rat(1, 4));
        CHECK(s.sign == 1);

        for (auto& row : f.matrix)
            for (auto& x : row) x = -x;
        const auto neg = strongly_canonical_scale(c, f);
        CHECK(neg.scale == Rat(1, 2));
        CHECK(neg.sign == -1);
    }

    SUBCASE("an irrational scale is reported, not silently approximated") {
        const auto c = constant_curve(2, {-1, 0, 0, 0}, ParamTag::projective);
        auto f = invariant_symplectic_form(c);
        for (auto& row : f.matrix)
            for (auto& x : row) x *= Rat(3);
        CHECK_THROWS_AS((void)strongly_canonical_scale(c, f), NotAPerfectPower);
    }
}

TEST_CASE("canonical parametrization") {
    SUBCASE("constant invariant 16 rescales by upsilon = t/2") {
        const auto c = constant_curve(2, {16, 0, 0, 0}, ParamTag::projective);
        const auto out = canonical_parametrization(c);
        CHECK(out.i0 == 1);
        CHECK(out.epsilon == 1);
        CHECK(out.upsilon.coeff(1) == Rat(1, 2));
        CHECK(out.curve.tag == ParamTag::canonical);
        CHECK(out.curve.B[0].coeff(0) == Rat(1));
        CHECK(out.curve.B[3].vanishes_to_order());
    }

    SUBCASE("invariant -1 is already canonical with negative orientation") {
        const auto c = constant_curve(2, {-1, 0, 0, 0}, ParamTag::projective);
        const auto out = canonical_parametrization(c);
        CHECK(out.i0 == 1);
        CHECK(out.epsilon == -1);
        CHECK(out.upsilon.coeff(1) == Rat(1));
        CHECK(out.curve.B[0].coeff(0) == Rat(-1));
    }

    SUBCASE("flat curve has no canonical parametrization") {
        const auto c = constant_curve(2, {0, 0, 0, 0}, ParamTag::projective);
        CHECK_THROWS_AS((void)canonical_parametrization(c), AllInvariantsVanish);
    }

    SUBCASE("defining identity holds to jet order for a jet-valued invariant") {
        const long long K = 12;
        std::vector<Rat> coeffs{Rat(16)};
        for (long long k = 1; k <= K; ++k) coeffs.push_back(rnd_rat());
        const Jet<Rat> b0 = Jet<Rat>::from_coeffs(coeffs, K);
        const CurveODE<Rat> c(2, {b0, jzero(), jzero(), jzero()}, ParamTag::projective);

        const auto out = canonical_parametrization(c);
        CHECK(out.i0 == 1);
        CHECK(out.epsilon == 1);

        // A(upsilon(tau)) upsilon'(tau)^4 = 1, with A = W_2 of the input.
        const auto w = wilczynski(c);
        const Jet<Rat>& A = w.W[1];
        const Jet<Rat> d = differentiate(out.upsilon);
        const Jet<Rat> ident =
            compose(A.truncated(out.upsilon.order()), out.upsilon) * jet_pow(d, 4);
        CHECK(jets_agree(ident, jconst(1)));

        // The reparametrized equation must carry the same curvatures as
        // a direct change of variables of the original one.
        const auto direct = semi_canonicalize(reparametrize(c, out.upsilon));
        for (int i = 0; i < 4; ++i) CHECK(jets_agree(direct.B[i], out.curve.B[i]));
    }

    SUBCASE("arbitrary-gauge input is accepted and normalized end to end") {
        const auto c = constant_curve(2, {16, 0, 0, 0}, ParamTag::arbitrary);
        const auto out = canonical_parametrization(c);
        CHECK(out.i0 == 1);
        CHECK(out.epsilon == 1);
        CHECK(out.curve.B[0].coeff(0) == Rat(1));
    }
}

TEST_CASE("float backend mirrors the exact pipeline") {
    auto djet = [](std::vector<double> c, long long ord) {
        return Jet<double>::from_coeffs(std::move(c), ord);
    };
    const CurveODE<double> c(
        2, {djet({16.0}, 10), djet({0.0}, 10), djet({0.0}, 10), djet({0.0}, 10)},
        ParamTag::semi_canonical);
    const auto proj = projective_normalize(c);
    const auto out = canonical_parametrization(proj.curve);
    CHECK(out.i0 == 1);
    CHECK(out.epsilon == 1);
    CHECK(out.upsilon.coeff(1) == doctest::Approx(0.5).epsilon(1e-9));
    const auto t = symplectic_curvatures(out.curve);
    CHECK(t.rho[0].coeff(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.rho[1].coeff(0) == doctest::Approx(-1.0).epsilon(1e-9));
}
