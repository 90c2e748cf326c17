#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "rank2geo/errors.hpp"

namespace rank2geo {

// Arbitrary-precision rational: always reduced, denominator positive,
// canonical zero 0/1. mpq_class maintains these invariants after
// canonicalize(), which every entry point below guarantees.
using Rat = mpq_class;

// Parses "p", "p/q" or "-p/q" in base 10. Rejects everything else,
// including empty strings, stray whitespace and zero denominators.
Rat parse_rat(const std::string& text);

// "p" when the denominator is 1, otherwise "p/q".
std::string rat_str(const Rat& x);

int sign(const Rat& x);

Rat pow_rat(const Rat& base, long exponent);

// Exact n-th root when it exists in the rationals; nullopt otherwise.
// Negative inputs are accepted for odd n only.
std::optional<Rat> nth_root_exact(const Rat& x, unsigned long n);

double to_double(const Rat& x);

}  // namespace rank2geo
