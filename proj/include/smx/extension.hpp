#pragma once

#include "smx/expr.hpp"
#include "smx/ratfunc.hpp"
#include "smx/scaling.hpp"
#include "smx/sm_expansion.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace smx {

enum class ExtensionMethod { direct, diffren, moment, ms };
std::string to_string(ExtensionMethod m);

/// One admissible counterterm: constant * m^mass_power log(m/M)^log_power * op delta.
struct Counterterm {
    std::string constant;
    Expr pattern;
    unsigned mass_power = 0;
    unsigned log_power = 0;
    unsigned op_order = 0;

    Expr term() const;
};

/// Data of a moment (analytic regularization) extension.
struct MomentData {
    std::string regulator = "zeta";
    Rational eta_per_regulator{-4};        // eta = eta_per_regulator * regulator
    unsigned annihilator_order = 0;         // N
    unsigned l_min = 0;
    Rational shift{0};                      // c in (B + c + eta)^N
    std::map<unsigned, RatFunc> coefficients;   // l -> c_l(eta)
    Expr regularized;                       // v^zeta
    std::vector<Group> regulated_groups;
};

struct ExtensionResult {
    ExtensionMethod method = ExtensionMethod::direct;
    /// Extended distribution without counterterms. For the moment method the
    /// coefficients are polynomials in the regulator and `prefactor` (a
    /// rational function of the regulator) multiplies the whole expression.
    Expr extended;
    RatFunc prefactor{1};
    std::vector<Counterterm> counterterms;
    std::optional<HomogeneityReport> input_homogeneity;
    std::optional<HomogeneityReport> output_homogeneity;
    std::optional<MomentData> moment;
    bool restriction_verified = false;

    /// extended + sum of counterterms with their symbolic constants.
    Expr with_counterterms() const;
};

// ---- counterterms -----------------------------------------------------------

struct CountertermSpec {
    std::vector<Group> groups;   // variables of the delta; k = d * groups.size()
    unsigned d = 4;
    bool covariant = true;       // invariant operators only
    bool symmetric = true;       // permutation-symmetric combinations
    unsigned max_log_power = 1;  // P for l > 0 (u_0 stays m-independent)
    std::string constant_prefix = "C";
};

/// m^l log(m/M)^p (operator of order |beta|) delta with |beta| + l = D - k.
std::vector<Counterterm> counterterm_basis(long degree, const CountertermSpec& spec);

/// Pure operator part of order `order` (no mass factors) for one row.
std::vector<Counterterm> counterterm_operators(unsigned order, const CountertermSpec& spec);

// ---- direct and differential renormalization ---------------------------------

ExtensionResult direct_extend(const Expr& e, unsigned k);

/// Writes u0 = box^n g with sd(g) < k and extends g directly; k = metric.d.
ExtensionResult diff_renorm_extend(const Expr& u0, const MetricConvention& metric,
                                   const std::string& constant_prefix = "C");

// ---- moment solver -----------------------------------------------------------

/// Solves sum_l c_l(eta) prod_{j<l} (B + j) = 1 mod (B + c + eta)^N for
/// l = l_min .. l_min + N - 1 over Q(eta).
std::map<unsigned, RatFunc> moment_solver(unsigned N, unsigned l_min, const Rational& shift);

/// Same system at a numeric eta; throws ResonantDegree when singular.
std::map<unsigned, Rational> moment_solver_at(unsigned N, unsigned l_min, const Rational& shift, const Rational& eta);

/// Independent check of a solution: expands in B and reduces by long division.
bool moment_certificate(const std::map<unsigned, RatFunc>& c, unsigned N, const Rational& shift);

// ---- analytic regularization --------------------------------------------------

struct RegulatorSpec {
    std::string symbol = "zeta";
    std::vector<Group> groups;   // each gets (M^2 X)^zeta; empty = all groups of the input
};

ExtensionResult regularized_extend(const Expr& v0, unsigned k, const RegulatorSpec& reg,
                                   const MetricConvention& metric = {});

// ---- Laurent series and minimal subtraction ----------------------------------

struct LaurentSeries {
    std::string regulator = "zeta";
    std::map<int, Expr> coefficients;   // exponent -> coefficient (non-zero only)
    int truncation = 0;                 // coefficients are exact up to this exponent

    Expr coefficient(int n) const;
    /// Smallest exponent with a non-zero coefficient (0 for an empty series).
    int min_exponent() const;
    /// Order of the pole at 0 (0 when regular).
    unsigned pole_order() const;
    LaurentSeries principal_part() const;
};

/// Taylor coefficients of e in the regulator up to `order`: the regulator may
/// appear in exponents of invariants and mass, and in coefficients.
std::vector<Expr> regulator_series(const Expr& e, const std::string& regulator, unsigned order);

LaurentSeries laurent_expand(const Expr& e, const RatFunc& prefactor, const std::string& regulator, int max_exponent);
LaurentSeries laurent_expand(const ExtensionResult& r, int max_exponent);

/// zeta^0 coefficient of an ExtensionResult's Laurent series plus the
/// counterterm basis of the given degree.
ExtensionResult minimal_subtract(const LaurentSeries& s, std::vector<Counterterm> counterterms);

/// [zeta^0] c_l(eta_per_regulator * zeta) exp(zeta * ell), as polynomials in `ell`.
std::map<unsigned, CoeffPoly> ms_brackets(const MomentData& m, const std::string& ell = "ell");

/// sum_l MomentDiv(l, Overline(z^l v0 * bracket_l)) with ell -> sum of logs
/// of the regulated groups.
Expr assemble_from_brackets(const Expr& v0, const MomentData& m, const std::map<unsigned, CoeffPoly>& brackets,
                            unsigned k, const std::string& ell = "ell");

// ---- whole tables -------------------------------------------------------------

struct SmExtensionOptions {
    MetricConvention metric{};
    RegulatorSpec regulator{};
    /// Names for the constants of row (l, p); receives the number needed.
    std::function<std::vector<std::string>(unsigned l, unsigned p, std::size_t count)> constant_names;
    /// Groups of the counterterm delta; empty = all groups of the table.
    std::vector<Group> delta_groups;
    bool covariant = true;
    bool symmetric = true;
};

struct SmExtension {
    SmExpansion input;
    SmExpansion extended;   // rows include counterterms
    unsigned l0 = 0;        // D - k
    std::map<std::pair<unsigned, unsigned>, ExtensionResult> row_results;
    std::map<std::pair<unsigned, unsigned>, LaurentSeries> row_series;
    Expr extended_remainder;   // direct extension of the remainder at order L0 + 1
};

SmExtension extend_sm(const SmExpansion& s, const SmExtensionOptions& options = {});

/// Extended remainder for a lower order L1 <= L0 via
/// r_{L1+1} = sum_{L1 < l <= L0} m^l log^p ext(u_{l,p}) + ext(r_{L0+1}).
Expr r_relation_remainder(const SmExtension& ext, unsigned l1);

} // namespace smx
