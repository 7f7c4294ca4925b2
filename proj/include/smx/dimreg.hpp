#pragma once

#include "smx/expr.hpp"
#include "smx/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace smx {

/// Lines (i, j), i < j, of an n-vertex graph; line t carries the regulator
/// symbol zeta_ij and the variable group X_ij.
struct LineIndexing {
    unsigned vertices = 2;

    explicit LineIndexing(unsigned n = 2) : vertices(n) {}
    unsigned slots() const { return vertices * (vertices - 1) / 2; }
    unsigned index(unsigned i, unsigned j) const;
    std::pair<unsigned, unsigned> line(unsigned index) const;
    std::string regulator(unsigned index) const;   // "zeta12"
    Group group(unsigned index) const;              // "X12"
};

struct RegTruncation {
    unsigned h_terms = 2;   // h_l for l < h_terms
    unsigned c_terms = 1;   // c_l for l < c_terms
};

/// sum_l h_l m^(2l) (M^2 X)^zeta X^(l+1-d/2) + sum_l c_l (m/M)^(-2 zeta) m^(d-2+2l) X^l.
Expr reg_propagator(unsigned d, const std::string& regulator, const Group& group, const RegTruncation& t = {},
                    const std::string& label = "");

/// Degree of the regularized propagator under (x, m) -> (rho x, m / rho).
Exponent reg_propagator_degree(unsigned d, const std::string& regulator);

struct RegBinKey {
    unsigned p = 0;
    std::vector<unsigned> c;   // per line slot
    std::vector<unsigned> h;
    friend auto operator<=>(const RegBinKey&, const RegBinKey&) = default;
    std::string to_string() const;   // "p:c1,c2:h1,h2"
};

struct RegSmExpansion {
    long degree = 0;       // D = Q (d - 2) + derivative orders
    unsigned d = 4;
    unsigned lines = 0;    // Q, the number of propagator factors
    std::vector<std::string> regulators;   // per line slot
    std::vector<Group> groups;             // per line slot
    unsigned complete_order = 0;           // bins with p <= complete_order are exact
    std::map<RegBinKey, Expr> bins;        // m-independent coefficients u[p][c][h]
    std::map<RegBinKey, Remainder> remainders;   // keyed by (P+1, c, h)

    Exponent bin_degree(const RegBinKey& k) const;        // D - 2p - 2 h.zeta
    Exponent bracket_degree(const RegBinKey& k) const;    // D - 2 (h + c).zeta
    Exponent mass_exponent(const RegBinKey& k) const;     // 2p - 2 c.zeta
};

struct RegFactor {
    unsigned i = 0, j = 1;   // vertices joined by the line
    unsigned boxes = 0;      // powers of the box in the line variable
};

RegSmExpansion reg_product_sm(const std::vector<RegFactor>& factors, const LineIndexing& lines, unsigned d = 4,
                              const RegTruncation& t = {}, const MetricConvention& metric = {});

/// Box in the variable of one line slot: D -> D + 2.
RegSmExpansion reg_box(const RegSmExpansion& r, unsigned slot, const MetricConvention& metric = {});

/// Projects U = sum_h u_h onto u_{h0}, using that u_h has degree D - 2p - 2 h.zeta.
Expr reg_project_coeff(const Expr& U, const std::vector<unsigned>& h0, const std::vector<std::vector<unsigned>>& candidates,
                       const Rational& D, unsigned p, const std::vector<std::string>& regulators);

CheckReport reg_check(const RegSmExpansion& r);

} // namespace smx
