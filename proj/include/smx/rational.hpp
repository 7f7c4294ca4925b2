#pragma once

#include <gmpxx.h>

#include <string>

namespace smx {

/// Exact rational number (canonical form is maintained by every helper here).
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

/// Parses "p", "-p" or "p/q".
Rational parse_rational(const std::string& text);

/// Canonical "p/q" string; integers are printed without denominator.
std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Three-way comparison returning -1, 0, 1.
inline int compare(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return (c > 0) - (c < 0);
}

double to_double(const Rational& q);

} // namespace smx
