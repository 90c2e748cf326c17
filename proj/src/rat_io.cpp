#include "rank2geo/rat.hpp"

#include <cctype>

namespace rank2geo {

namespace {

bool is_integer_literal(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rat parse_rat(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        if (!is_integer_literal(text))
            throw ValidationError("not a rational literal: \"" + text + "\"");
        return Rat(mpz_class(text, 10));
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+')
        throw ValidationError("not a rational literal: \"" + text + "\"");
    mpz_class d(den, 10);
    if (d == 0)
        throw ValidationError("zero denominator in rational literal: \"" + text + "\"");
    Rat r(mpz_class(num, 10), d);
    r.canonicalize();
    return r;
}

std::string rat_str(const Rat& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

int sign(const Rat& x) { return sgn(x); }

Rat pow_rat(const Rat& base, long exponent) {
    if (exponent == 0) return Rat(1);
    if (exponent < 0) {
        if (base == 0) throw ValidationError("zero base with negative exponent");
        return 1 / pow_rat(base, -exponent);
    }
    Rat acc(1), b(base);
    long e = exponent;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

std::optional<Rat> nth_root_exact(const Rat& x, unsigned long n) {
    if (n == 0) throw ValidationError("zeroth root requested");
    if (n == 1) return x;
    if (x == 0) return Rat(0);
    if (sgn(x) < 0 && n % 2 == 0) return std::nullopt;

    mpz_class num = x.get_num();
    mpz_class den = x.get_den();
    const bool negative = sgn(num) < 0;
    if (negative) num = -num;

    mpz_class num_root, den_root;
    const bool num_exact = mpz_root(num_root.get_mpz_t(), num.get_mpz_t(), n) != 0;
    const bool den_exact = mpz_root(den_root.get_mpz_t(), den.get_mpz_t(), n) != 0;
    if (!num_exact || !den_exact) return std::nullopt;
    if (negative) num_root = -num_root;
    Rat r(num_root, den_root);
    r.canonicalize();
    return r;
}

double to_double(const Rat& x) { return x.get_d(); }

}  // namespace rank2geo
