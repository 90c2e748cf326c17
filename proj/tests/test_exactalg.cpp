#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "rank2geo/jet.hpp"
#include "rank2geo/linalg.hpp"
#include "rank2geo/mpoly.hpp"
#include "rank2geo/polyvf.hpp"

using namespace rank2geo;

using RJet = Jet<Rat>;

namespace {

RJet jet(std::vector<long> coeffs, long long ord) {
    std::vector<Rat> c;
    for (long v : coeffs) c.emplace_back(v);
    return RJet::from_coeffs(std::move(c), ord);
}

Rat rnd_rat(std::mt19937& gen) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    Rat r(num(gen), den(gen));
    r.canonicalize();
    return r;
}

RJet rnd_jet(std::mt19937& gen, long long ord) {
    std::vector<Rat> c;
    for (long long k = 0; k <= ord; ++k) c.push_back(rnd_rat(gen));
    return RJet::from_coeffs(std::move(c), ord);
}

}  // namespace

TEST_CASE("rational parsing and exact roots") {
    CHECK(parse_rat("3/6") == Rat(1, 2));
    CHECK(parse_rat("-14") == Rat(-14));
    CHECK(rat_str(parse_rat("10/4")) == "5/2");
    CHECK_THROWS_AS(parse_rat("1/0"), ValidationError);
    CHECK_THROWS_AS(parse_rat("a"), ValidationError);
    CHECK_THROWS_AS(parse_rat("1/ 2"), ValidationError);

    CHECK(nth_root_exact(Rat(16, 81), 4) == Rat(2, 3));
    CHECK(nth_root_exact(Rat(-8), 3) == Rat(-2));
    CHECK(!nth_root_exact(Rat(-4), 2).has_value());
    CHECK(!nth_root_exact(Rat(175), 4).has_value());
    CHECK(pow_rat(Rat(2, 3), -2) == Rat(9, 4));
}

TEST_CASE("jet arithmetic on the pinned examples") {
    // (1+t)(1-t) at order 4 is 1 - t^2.
    const RJet prod = jet({1, 1}, 4) * jet({1, -1}, 4);
    CHECK(prod == jet({1, 0, -1, 0, 0}, 4));

    // differentiate(t^3) at order 3 gives 3t^2 with one order lost.
    const RJet d = differentiate(jet({0, 0, 0, 1}, 3));
    CHECK(d == jet({0, 0, 3}, 2));

    // compose(exp, log(1+t)) at order 6 is 1+t.
    const RJet t6 = RJet::variable(6);
    const RJet e = exp_of(t6);
    const RJet l = log_of(jet({1, 1}, 6));
    CHECK(compose(e, l) == jet({1, 1, 0, 0, 0, 0, 0}, 6));
}

TEST_CASE("order bookkeeping is strict") {
    const RJet a = jet({1, 2, 3}, 2);
    CHECK_THROWS_AS(a.coeff(3), TruncationExceeded);
    CHECK((a * jet({1}, 5)).order() == 2);

    // Exact polynomials know all their coefficients.
    const RJet p = RJet::poly({Rat(1), Rat(0), Rat(-1)});
    CHECK(p.coeff(7) == 0);
    CHECK((p * p).is_exact_poly());
    CHECK((p * a).order() == 2);

    // Division of two exact polynomials has no honest truncation order.
    CHECK_THROWS_AS(RJet::poly({Rat(1)}) / RJet::poly({Rat(1), Rat(1)}), TruncationExceeded);
    // Unless the divisor is a constant, which is exact.
    CHECK((p / RJet::poly({Rat(2)})).is_exact_poly());

    CHECK_THROWS_AS(exp_of(RJet::poly({Rat(0), Rat(1)})), TruncationExceeded);
}

TEST_CASE("jet domain errors") {
    CHECK_THROWS_AS(jet({1}, 3) / jet({0, 1}, 3), DivisionByZeroSeries);
    CHECK_THROWS_AS(compose(jet({1, 1}, 3), jet({1, 1}, 3)), NonCompositionalArgument);
    CHECK_THROWS_AS(invert_series(jet({0, 0, 1}, 3)), NonInvertibleSeries);
    CHECK_THROWS_AS(schwarzian(jet({0, 0, 1}, 5)), SingularReparametrization);
}

TEST_CASE("schwarzian normalization") {
    // Affine reparametrizations are flat.
    CHECK(schwarzian(RJet::variable(8)).vanishes_to_order());

    // A Moebius jet is flat as well: v = (2t+1)/(t+1).
    const RJet mob = RJet::poly({Rat(1), Rat(2)}).truncated(9) / RJet::poly({Rat(1), Rat(1)}).truncated(9);
    CHECK(schwarzian(mob).vanishes_to_order());

    // This normalization gives S(tan) = 1; the classical convention
    // would give 2.
    const RJet s = schwarzian(tan_series<Rat>(9));
    CHECK(s.order() == 6);
    CHECK((s - RJet::constant(Rat(1), 6)).vanishes_to_order());
}

TEST_CASE("series inversion and composition invert each other") {
    std::mt19937 gen(20240811);
    for (int trial = 0; trial < 12; ++trial) {
        RJet a = rnd_jet(gen, 7);
        std::vector<Rat> c(a.stored());
        c[0] = 0;
        if (c[1] == 0) c[1] = 1;
        a = RJet::from_coeffs(std::move(c), 7);
        const RJet inv = invert_series(a);
        CHECK((compose(a, inv) - RJet::variable(7)).vanishes_to_order());
        CHECK((compose(inv, a) - RJet::variable(7)).vanishes_to_order());
    }
}

TEST_CASE("ring axioms hold exactly on random jets") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 10; ++trial) {
        const RJet a = rnd_jet(gen, 6), b = rnd_jet(gen, 6), c = rnd_jet(gen, 6);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        if (unit_at_base(b)) CHECK(((a / b) * b - a).vanishes_to_order());
    }
}

TEST_CASE("differentiate then integrate is the identity on zero-constant jets") {
    std::mt19937 gen(99);
    for (int trial = 0; trial < 8; ++trial) {
        RJet a = rnd_jet(gen, 6);
        std::vector<Rat> c(a.stored());
        c[0] = 0;
        a = RJet::from_coeffs(std::move(c), 6);
        const RJet back = integrate(differentiate(a));
        // One order is lost and regained.
        CHECK(back == a.truncated(6));
    }
}

TEST_CASE("jet roots") {
    const RJet sq = jet({1, 2, 1}, 5);  // (1+t)^2
    CHECK(nth_root_of(sq, 2) == jet({1, 1, 0, 0, 0, 0}, 5));
    CHECK(nth_root_of(RJet::constant(Rat(16), 4), 4) == RJet::constant(Rat(2), 4));
    CHECK_THROWS_AS(nth_root_of(RJet::constant(Rat(175), 4), 4), NotAPerfectPower);
}

TEST_CASE("float backend mirrors the jet operations") {
    using DJet = Jet<double>;
    const DJet t = DJet::variable(6);
    const DJet e = exp_of(t);
    std::vector<double> lc{1, 1};
    const DJet l = log_of(DJet::from_coeffs(std::move(lc), 6));
    const DJet comp = compose(e, l);
    for (int k = 0; k <= 6; ++k) {
        const double expect = (k <= 1) ? 1.0 : 0.0;
        CHECK(std::fabs(comp.coeff(k) - expect) < 1e-9);
    }
    const DJet s = schwarzian(tan_series<double>(9));
    CHECK(std::fabs(s.coeff(0) - 1.0) < 1e-9);
}

TEST_CASE("polynomial parsing and printing") {
    const std::vector<std::string> names{"x", "y1", "y2"};
    const MPoly<Rat> p = parse_poly("3/2*y1^2*y2 - x", names);
    CHECK(p.str(names) == "-x + 3/2*y1^2*y2");
    CHECK(p.eval({Rat(2), Rat(1), Rat(4)}) == Rat(4));
    CHECK_THROWS_AS(parse_poly("q + 1", names), ValidationError);
    CHECK_THROWS_AS(parse_poly("x +", names), ValidationError);
}

TEST_CASE("lie brackets of the pinned fields") {
    // [d/dx, x d/dx] = d/dx.
    const std::vector<std::string> names{"x"};
    PolyVF<Rat> V = PolyVF<Rat>::coordinate(1, 0);
    PolyVF<Rat> W = V;
    W.comp[0] = MPoly<Rat>::var(1, 0);
    CHECK(lie_bracket(V, W).comp[0] == MPoly<Rat>::constant(1, Rat(1)));

    // Model fields at n=5 with sample constants r1 = 3/2, r2 = -5.
    const std::vector<std::string> mv{"x", "y0", "y1", "y2", "z"};
    const Rat r1(3, 2), r2(-5);
    PolyVF<Rat> X1 = PolyVF<Rat>::zero(5);
    X1.comp[0] = MPoly<Rat>::constant(5, Rat(1));
    X1.comp[1] = MPoly<Rat>::var(5, 2);
    X1.comp[2] = MPoly<Rat>::var(5, 3);
    X1.comp[4] = MPoly<Rat>::var(5, 3) * MPoly<Rat>::var(5, 3) +
                 r1 * (MPoly<Rat>::var(5, 2) * MPoly<Rat>::var(5, 2)) +
                 r2 * (MPoly<Rat>::var(5, 1) * MPoly<Rat>::var(5, 1));
    PolyVF<Rat> X2 = PolyVF<Rat>::coordinate(5, 3);

    const PolyVF<Rat> X3 = lie_bracket(X1, X2);
    CHECK(X3.comp[2] == parse_poly("0 - 1", mv));
    CHECK(X3.comp[4] == parse_poly("0 - 2*y2", mv));
    CHECK(X3.comp[0].is_zero());
    CHECK(X3.comp[1].is_zero());
    CHECK(X3.comp[3].is_zero());

    const PolyVF<Rat> X4 = lie_bracket(X1, X3);
    CHECK(X4.comp[1] == parse_poly("1", mv));
    CHECK(X4.comp[4] == parse_poly("3*y1", mv));  // 2*r1*y1 with r1 = 3/2

    const PolyVF<Rat> X5 = lie_bracket(X2, X3);
    CHECK(X5.comp[4] == parse_poly("0 - 2", mv));

    // The five fields span the tangent space at the origin.
    Matrix<Rat> vals;
    const std::vector<Rat> origin(5, Rat(0));
    vals.push_back(X1.eval(origin));
    vals.push_back(X2.eval(origin));
    vals.push_back(X3.eval(origin));
    vals.push_back(X4.eval(origin));
    vals.push_back(X5.eval(origin));
    CHECK(rank(vals) == 5);
}

TEST_CASE("jacobi identity and antisymmetry on random polynomial fields") {
    std::mt19937 gen(4242);
    std::uniform_int_distribution<int> which(0, 2);
    const int n = 3;
    auto rnd_field = [&]() {
        PolyVF<Rat> V = PolyVF<Rat>::zero(n);
        for (int c = 0; c < n; ++c) {
            MPoly<Rat> p(n);
            for (int term = 0; term < 3; ++term) {
                std::vector<int> e(n, 0);
                e[which(gen)] += 1;
                if (which(gen) == 0) e[which(gen)] += 1;
                p.add_term(e, rnd_rat(gen));
            }
            V.comp[static_cast<std::size_t>(c)] = p;
        }
        return V;
    };
    auto is_zero_field = [](const PolyVF<Rat>& V) {
        for (const auto& c : V.comp)
            if (!c.is_zero()) return false;
        return true;
    };
    for (int trial = 0; trial < 6; ++trial) {
        const PolyVF<Rat> U = rnd_field(), V = rnd_field(), W = rnd_field();
        const PolyVF<Rat> cyc = lie_bracket(U, lie_bracket(V, W)) +
                                lie_bracket(V, lie_bracket(W, U)) +
                                lie_bracket(W, lie_bracket(U, V));
        CHECK(is_zero_field(cyc));
        CHECK(is_zero_field(lie_bracket(U, V) + lie_bracket(V, U)));
    }
}

TEST_CASE("exact linear algebra") {
    CHECK(rank(identity_matrix<Rat>(3)) == 3);

    Matrix<Rat> m{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}};
    const auto ker = kernel_basis(m);
    REQUIRE(ker.size() == 1);
    CHECK(ker[0] == std::vector<Rat>{Rat(-2), Rat(1)});

    Matrix<Rat> a{{Rat(1), Rat(1)}, {Rat(1), Rat(1)}};
    CHECK_THROWS_AS(solve_linear(a, std::vector<Rat>{Rat(1), Rat(2)}), InconsistentSystem);

    const auto x = solve_linear(Matrix<Rat>{{Rat(2), Rat(0)}, {Rat(0), Rat(4)}},
                                std::vector<Rat>{Rat(1), Rat(1)});
    CHECK(x == std::vector<Rat>{Rat(1, 2), Rat(1, 4)});
}

TEST_CASE("jet-valued solves") {
    // A x = b with A invertible at the base point.
    Matrix<RJet> A{{jet({1, 1}, 5), jet({0, 1}, 5)}, {jet({0, 0}, 5), jet({1, -1}, 5)}};
    Matrix<RJet> known{{jet({2, -1, 3}, 5)}, {jet({1, 1, 1}, 5)}};
    Matrix<RJet> rhs{{A[0][0] * known[0][0] + A[0][1] * known[1][0]},
                     {A[1][0] * known[0][0] + A[1][1] * known[1][0]}};
    const auto sol = jet_solve_square(A, rhs);
    CHECK((sol[0][0] - known[0][0]).vanishes_to_order());
    CHECK((sol[1][0] - known[1][0]).vanishes_to_order());

    // Kernel line of a corank-one jet matrix.
    Matrix<RJet> K{{jet({1, 0}, 4), jet({0, 1}, 4)}, {jet({0, 1}, 4), jet({0, 0, 1}, 4)}};
    const auto line = jet_kernel_line(K);
    REQUIRE(line.has_value());
    const RJet r0 = K[0][0] * (*line)[0] + K[0][1] * (*line)[1];
    const RJet r1 = K[1][0] * (*line)[0] + K[1][1] * (*line)[1];
    CHECK(r0.vanishes_to_order());
    CHECK(r1.vanishes_to_order());
}
