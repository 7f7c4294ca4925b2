#pragma once

#include "smx/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace smx {

/// Monomial in derivated fields: a multiset of field symbols such as "phi" or
/// "d0phi" (the derivative multi-index is part of the name) with multiplicities.
class FieldMonomial {
public:
    FieldMonomial() = default;
    /// phi^n.
    static FieldMonomial power(const std::string& field, unsigned n);

    const std::map<std::string, unsigned>& factors() const noexcept { return factors_; }
    unsigned degree() const;
    bool is_one() const noexcept { return factors_.empty(); }
    std::string to_string() const;

    FieldMonomial& operator*=(const FieldMonomial& o);
    friend bool operator==(const FieldMonomial&, const FieldMonomial&) = default;
    friend bool operator<(const FieldMonomial& a, const FieldMonomial& b) { return a.factors_ < b.factors_; }

    void set(const std::string& field, unsigned n);

private:
    std::map<std::string, unsigned> factors_;
};

/// One term of the Wick-type expansion A = sum C * sub * complement.
struct Submonomial {
    FieldMonomial sub;
    FieldMonomial complement;
    unsigned long multiplicity = 1;
};

/// All submonomials, ordered from the full monomial down to 1; the
/// multiplicity counts the ways of choosing the factors.
std::vector<Submonomial> submonomials(const FieldMonomial& a);

/// Number of complete contractions of every factor of `a` with a factor of `b`.
unsigned long complete_pairings(const FieldMonomial& a, const FieldMonomial& b);

/// Mass dimension in spacetime dimension d; `derivative_order` maps a field
/// symbol to the order of its derivative (absent means 0).
Rational field_mass_dimension(const FieldMonomial& a, unsigned d,
                              const std::map<std::string, unsigned>& derivative_order = {});

} // namespace smx
