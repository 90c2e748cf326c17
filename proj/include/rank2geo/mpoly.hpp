#pragma once

#include <map>
#include <string>
#include <vector>

#include "rank2geo/jet.hpp"

namespace rank2geo {

// Graded-lexicographic order on exponent vectors: lower total degree
// first, then lexicographic. Fixing the term order makes every printed
// polynomial and every iteration deterministic.
struct GrLexLess {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
        int da = 0, db = 0;
        for (int e : a) da += e;
        for (int e : b) db += e;
        if (da != db) return da < db;
        return a < b;
    }
};

// Sparse multivariate polynomial. No zero coefficients are stored and
// all exponent vectors have length nvars.
template <class S>
class MPoly {
  public:
    using Ops = ScalarOps<S>;
    using TermMap = std::map<std::vector<int>, S, GrLexLess>;

    explicit MPoly(int nvars = 0) : nvars_(nvars) {}

    static MPoly constant(int nvars, const S& value) {
        MPoly p(nvars);
        p.add_term(std::vector<int>(nvars, 0), value);
        return p;
    }

    static MPoly var(int nvars, int index) {
        MPoly p(nvars);
        std::vector<int> e(nvars, 0);
        e.at(index) = 1;
        p.add_term(e, Ops::one());
        return p;
    }

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const std::vector<int>& exp, const S& coeff) {
        if (static_cast<int>(exp.size()) != nvars_)
            throw DimensionMismatch("exponent vector length does not match nvars");
        if (Ops::is_zero(coeff)) return;
        auto it = terms_.find(exp);
        if (it == terms_.end()) {
            terms_.emplace(exp, coeff);
        } else {
            it->second += coeff;
            if (Ops::is_zero(it->second)) terms_.erase(it);
        }
    }

    friend MPoly operator-(const MPoly& a) {
        MPoly r(a.nvars_);
        for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, S(-c));
        return r;
    }

    friend MPoly operator+(const MPoly& a, const MPoly& b) {
        a.check_same(b);
        MPoly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }

    friend MPoly operator-(const MPoly& a, const MPoly& b) {
        a.check_same(b);
        MPoly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, S(-c));
        return r;
    }

    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        a.check_same(b);
        MPoly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                std::vector<int> e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, S(ca * cb));
            }
        return r;
    }

    friend MPoly operator*(const S& s, const MPoly& a) {
        MPoly r(a.nvars_);
        if (Ops::is_zero(s)) return r;
        for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, S(s * c));
        return r;
    }

    friend bool operator==(const MPoly& a, const MPoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    MPoly derivative(int var) const {
        MPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e.at(var) == 0) continue;
            std::vector<int> d = e;
            d[var] -= 1;
            r.add_term(d, S(Ops::from_long(e[var]) * c));
        }
        return r;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            (void)c;
            int s = 0;
            for (int x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    S eval(const std::vector<S>& point) const {
        if (static_cast<int>(point.size()) != nvars_)
            throw DimensionMismatch("evaluation point length does not match nvars");
        S acc = Ops::zero();
        for (const auto& [e, c] : terms_) {
            S term = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) term *= point[i];
            acc += term;
        }
        return acc;
    }

    // Evaluation at a vector of jets (all sharing one truncation order),
    // used by the Taylor flow integrator.
    template <class J>
    J eval_jets(const std::vector<J>& point, const J& one_template) const {
        if (static_cast<int>(point.size()) != nvars_)
            throw DimensionMismatch("evaluation point length does not match nvars");
        J acc = Jet<S>::constant(Ops::zero(), one_template.order());
        for (const auto& [e, c] : terms_) {
            J term = Jet<S>::constant(c, one_template.order());
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) term = term * point[i];
            acc = acc + term;
        }
        return acc;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            std::string cs = Ops::str(c);
            bool negative = !cs.empty() && cs[0] == '-';
            if (first) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            if (negative) cs = cs.substr(1);
            first = false;
            std::string mono;
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += names.at(i);
                if (e[i] > 1) mono += "^" + std::to_string(e[i]);
            }
            if (mono.empty()) {
                out += cs;
            } else if (cs == "1") {
                out += mono;
            } else {
                out += cs + "*" + mono;
            }
        }
        return out;
    }

  private:
    void check_same(const MPoly& other) const {
        if (nvars_ != other.nvars_)
            throw DimensionMismatch("polynomials live in different numbers of variables");
    }

    int nvars_;
    TermMap terms_;
};

// Parses expressions like "3/2*y1^2*y2 - x" against the given variable
// names. Supported syntax: rational or integer literals, variable names,
// '*' products, '^' integer powers, '+'/'-' sums and unary sign.
MPoly<Rat> parse_poly(const std::string& text, const std::vector<std::string>& names);

}  // namespace rank2geo
