#pragma once

#include "smx/expr.hpp"

namespace smx {

/// Steinmann scaling degree. The regulator part is linear in the regulator
/// symbols; comparisons use the rational part (regulators are infinitesimal).
struct ScalingDegree {
    bool minus_infinity = false;
    Exponent value;

    const Rational& real_part() const { return value.rat; }
    std::string to_string() const;
};

ScalingDegree scaling_degree(const Term& t, unsigned k);
/// Max over atoms; -infinity for the zero expression.
ScalingDegree scaling_degree(const Expr& e, unsigned k);

/// Almost homogeneous scaling data: (E [- m d_m] + degree)^order e = 0 with
/// `order` minimal; power = order - 1.
struct HomogeneityReport {
    Exponent degree;
    unsigned power = 0;
    unsigned annihilator_order = 0;
    bool with_mass = false;
};

/// Eigenvalue of E [- m d_m] on the leading (log-free) part of `t`.
Exponent euler_weight(const Term& t, bool with_mass);

/// (E [- m d_m] + degree) e.
Expr shifted_euler(const Expr& e, const Exponent& degree, bool with_mass);

/// Throws NotAlmostHomogeneous when the atoms have different weights or no
/// order up to `max_order` annihilates e.
HomogeneityReport homogeneity_analyze(const Expr& e, bool with_mass, unsigned max_order = 8);

} // namespace smx
