#pragma once

#include "smx/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace smx {

/// Power product of named symbolic constants, sorted by name, exponents > 0.
using SymbolPowers = std::vector<std::pair<std::string, unsigned>>;

/// Exact polynomial over Q in named symbolic constants (a0, a1, A1, hbar, C0,
/// regulator symbols, ...). Zero terms are never stored, so `is_zero` is exact.
class CoeffPoly {
public:
    using TermMap = std::map<SymbolPowers, Rational>;

    CoeffPoly() = default;
    CoeffPoly(const Rational& c);                    // NOLINT: implicit by design of the algebra
    CoeffPoly(long c) : CoeffPoly(Rational(c)) {}    // NOLINT

    static CoeffPoly symbol(const std::string& name, unsigned power = 1);

    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept;
    /// Value of the constant term (0 when absent).
    Rational constant_term() const;
    /// Throws InvalidArgument if the polynomial is not constant.
    Rational as_rational() const;

    CoeffPoly& operator+=(const CoeffPoly& o);
    CoeffPoly& operator-=(const CoeffPoly& o);
    CoeffPoly& operator*=(const CoeffPoly& o);
    CoeffPoly& operator*=(const Rational& c);

    friend CoeffPoly operator+(CoeffPoly a, const CoeffPoly& b) { return a += b; }
    friend CoeffPoly operator-(CoeffPoly a, const CoeffPoly& b) { return a -= b; }
    friend CoeffPoly operator*(const CoeffPoly& a, const CoeffPoly& b);
    friend CoeffPoly operator-(const CoeffPoly& a) { return a * CoeffPoly(-1); }
    friend bool operator==(const CoeffPoly& a, const CoeffPoly& b) { return a.terms_ == b.terms_; }

    CoeffPoly pow(unsigned n) const;

    unsigned degree_in(const std::string& sym) const;
    /// Coefficient of sym^j (a polynomial free of sym).
    CoeffPoly coefficient_in(const std::string& sym, unsigned j) const;
    /// Replaces every occurrence of `sym` by `value`.
    CoeffPoly substitute(const std::string& sym, const CoeffPoly& value) const;
    bool depends_on(const std::string& sym) const;
    std::vector<std::string> symbols() const;

    /// Exact division; returns false (and leaves `quotient` unspecified) when
    /// `divisor` does not divide *this.
    bool divide_exact(const CoeffPoly& divisor, CoeffPoly& quotient) const;

    /// Numerical value; every symbol must be present in `values`.
    double evaluate(const std::map<std::string, double>& values) const;

    std::string to_string() const;

    /// Total order used for canonical printing/sorting of coefficients.
    friend int compare(const CoeffPoly& a, const CoeffPoly& b);

private:
    void add_term(const SymbolPowers& key, const Rational& c);
    TermMap terms_;
};

SymbolPowers multiply_powers(const SymbolPowers& a, const SymbolPowers& b);

} // namespace smx
