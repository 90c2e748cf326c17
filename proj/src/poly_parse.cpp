#include <cctype>

#include "rank2geo/mpoly.hpp"

namespace rank2geo {

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& names;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ValidationError("polynomial parse error at position " + std::to_string(pos) +
                              ": " + what + " in \"" + text + "\"");
    }

    std::string read_number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected digits");
        return text.substr(start, pos - start);
    }

    Rat read_rational() {
        std::string num = read_number();
        if (eat('/')) {
            std::string den = read_number();
            return parse_rat(num + "/" + den);
        }
        return parse_rat(num);
    }

    int read_power() {
        if (!eat('^')) return 1;
        std::string e = read_number();
        long v = std::stol(e);
        if (v < 0) fail("negative exponent");
        return static_cast<int>(v);
    }

    std::string read_name() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected a variable name or a number");
        return text.substr(start, pos - start);
    }

    MPoly<Rat> parse_factor() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        const int n = static_cast<int>(names.size());
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rat r = read_rational();
            return MPoly<Rat>::constant(n, r);
        }
        std::string name = read_name();
        for (int i = 0; i < n; ++i) {
            if (names[static_cast<std::size_t>(i)] == name) {
                int p = read_power();
                MPoly<Rat> acc = MPoly<Rat>::constant(n, Rat(1));
                MPoly<Rat> v = MPoly<Rat>::var(n, i);
                for (int k = 0; k < p; ++k) acc = acc * v;
                return acc;
            }
        }
        fail("unknown variable \"" + name + "\"");
    }

    MPoly<Rat> parse_term() {
        MPoly<Rat> acc = parse_factor();
        while (eat('*')) acc = acc * parse_factor();
        return acc;
    }

    MPoly<Rat> parse_expr() {
        const int n = static_cast<int>(names.size());
        MPoly<Rat> acc(n);
        bool negate = eat('-');
        if (!negate) eat('+');
        acc = negate ? -parse_term() : parse_term();
        for (;;) {
            if (eat('+')) {
                acc = acc + parse_term();
            } else if (eat('-')) {
                acc = acc - parse_term();
            } else {
                break;
            }
        }
        skip_ws();
        if (pos != text.size()) fail("trailing characters");
        return acc;
    }
};

}  // namespace

MPoly<Rat> parse_poly(const std::string& text, const std::vector<std::string>& names) {
    Parser p{text, names};
    return p.parse_expr();
}

}  // namespace rank2geo
