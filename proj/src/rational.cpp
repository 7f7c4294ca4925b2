#include "smx/rational.hpp"

#include "smx/errors.hpp"

namespace smx {

Rational make_rational(long num, long den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational parse_rational(const std::string& text) {
    Rational q;
    if (text.empty() || q.set_str(text, 10) != 0 || q.get_den() == 0)
        throw ParseError("not a rational number: '" + text + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

} // namespace smx
