#pragma once

#include "smx/coeff_poly.hpp"
#include "smx/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace smx {

/// Dense univariate polynomial over Q, coefficients from degree 0 upwards.
class UPoly {
public:
    UPoly() = default;
    UPoly(const Rational& c);   // NOLINT
    UPoly(long c) : UPoly(Rational(c)) {}   // NOLINT
    explicit UPoly(std::vector<Rational> coeffs);
    static UPoly x() { return UPoly(std::vector<Rational>{0, 1}); }

    const std::vector<Rational>& coeffs() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    Rational operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& leading() const { return c_.back(); }
    /// Multiplicity of the root 0.
    unsigned valuation() const;

    UPoly& operator+=(const UPoly& o);
    UPoly& operator-=(const UPoly& o);
    friend UPoly operator+(UPoly a, const UPoly& b) { return a += b; }
    friend UPoly operator-(UPoly a, const UPoly& b) { return a -= b; }
    friend UPoly operator-(const UPoly& a) { return UPoly(0) - a; }
    friend UPoly operator*(const UPoly& a, const UPoly& b);
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    /// Euclidean division.
    void divmod(const UPoly& d, UPoly& q, UPoly& r) const;
    Rational evaluate(const Rational& x) const;
    /// p(s*x).
    UPoly scaled(const Rational& s) const;
    UPoly monic() const;
    CoeffPoly to_coeff(const std::string& var) const;
    static UPoly from_coeff(const CoeffPoly& p, const std::string& var);
    std::string to_string(const std::string& var) const;

private:
    void trim();
    std::vector<Rational> c_;
};

UPoly gcd(UPoly a, UPoly b);

/// Reduced univariate rational function num/den with monic denominator.
class RatFunc {
public:
    RatFunc() : num_(0), den_(1) {}
    RatFunc(const UPoly& num);   // NOLINT
    RatFunc(const UPoly& num, const UPoly& den);
    RatFunc(long c) : RatFunc(UPoly(c)) {}   // NOLINT

    const UPoly& num() const noexcept { return num_; }
    const UPoly& den() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero(); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a) { return RatFunc(-a.num_, a.den_); }
    friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

    /// f(s*x).
    RatFunc scaled(const Rational& s) const;
    /// Throws ResonantDegree at a pole.
    Rational evaluate(const Rational& x) const;
    /// Laurent coefficients at 0 for exponents up to `max_exponent`.
    std::map<int, Rational> laurent(int max_exponent) const;
    std::string to_string(const std::string& var) const;

private:
    void reduce();
    UPoly num_;
    UPoly den_;
};

} // namespace smx
