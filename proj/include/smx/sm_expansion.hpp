#pragma once

#include "smx/expr.hpp"
#include "smx/scaling.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace smx {

/// Finite sm-expansion table: f = sum_{l<=L} m^l sum_p log(m/M)^p u_{l,p} + r,
/// with the remainder kept as metadata only.
struct SmExpansion {
    long degree = 0;                       // D
    unsigned order = 0;                    // L
    unsigned ambient_k = 4;
    std::map<std::pair<unsigned, unsigned>, Expr> rows;   // (l, p) -> u_{l,p}
    Remainder remainder;                   // degree D, vanishing order >= L+1

    /// u_{l,p}, zero when absent.
    Expr row(unsigned l, unsigned p) const;
    /// Largest p with a non-zero u_{l,p}; nullopt for a vanishing row.
    std::optional<unsigned> max_log_power(unsigned l) const;
    /// sum_{l,p} m^l log(m/M)^p u_{l,p}, without the remainder.
    Expr truncated_sum() const;
    std::set<Group> groups() const;
    void set_row(unsigned l, unsigned p, Expr e);
};

/// u_0 = e, everything else zero; remainder order `order` + 1.
SmExpansion sm_trivial(const Expr& e, long degree, unsigned order, unsigned k);

/// Row-wise sum; degrees and orders must agree.
SmExpansion sm_add(const SmExpansion& a, const SmExpansion& b);
SmExpansion sm_scale(const SmExpansion& s, const CoeffPoly& c);

/// Product of expansions; `ambient_k` defaults to the common k when the groups
/// coincide and to k1 + k2 for disjoint groups.
SmExpansion sm_product(const SmExpansion& a, const SmExpansion& b, std::optional<unsigned> ambient_k = {});

/// Derivative request inside the invariant calculus: a box in one group, or a
/// raw multi-index (only the empty one is supported symbolically).
struct DerivativeRequest {
    std::optional<Group> box_group;
    std::vector<unsigned> multi_index;

    static DerivativeRequest box(Group g) { return {std::move(g), {}}; }
    static DerivativeRequest partial(std::vector<unsigned> beta) { return {std::nullopt, std::move(beta)}; }
    unsigned order() const;
};

SmExpansion sm_derivative(const SmExpansion& s, const DerivativeRequest& d, const MetricConvention& metric);

struct PropertyCheck {
    bool pass = true;
    std::string detail;
};

struct SmCheckReport {
    std::map<std::string, PropertyCheck> properties;   // "A" .. "E"
    bool all_pass() const;
};

SmCheckReport sm_check(const SmExpansion& s);

/// D - (L + 1), the bound on the scaling degree of the remainder.
Rational sm_remainder_bound(const SmExpansion& s);

// ---- coefficient extraction from mass samples ------------------------------

using HighPrecision = boost::multiprecision::cpp_bin_float_50;
using MassSampler = std::function<HighPrecision(const HighPrecision& m)>;

struct ExtractionOptions {
    double m_min = 1e-8;
    double m_max = 1e-4;
    unsigned grid_points = 16;
    double tolerance = 1e-3;
};

struct ExtractedRow {
    unsigned l = 0;
    std::map<unsigned, double> coefficients;   // p -> u_{l,p}
    std::map<unsigned, double> stability;      // p -> |fit(grid) - fit(refined grid)|
};

/// Fits m^l log(m)^p for l <= l_target + 2, p <= p_start (M = 1) in 50-digit
/// precision on two grids. Throws DivergentLimit when p_start is below the
/// true log power or a coefficient moves under grid refinement.
std::map<unsigned, ExtractedRow> sm_extract_from_samples(const MassSampler& f, long degree, unsigned l_target,
                                                         unsigned p_start, const ExtractionOptions& options = {});

} // namespace smx
