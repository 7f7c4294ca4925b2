#pragma once

#include "smx/extension.hpp"
#include "smx/sm_expansion.hpp"

#include <map>
#include <string>
#include <vector>

namespace smx {

enum class PropagatorKind { wightman, feynman, hadamard, hadamard_difference };
std::string to_string(PropagatorKind k);

/// Small-X model of a two-point function. Row l = 2j carries the symbol a_j
/// (and A_j once logarithms appear); log(mu/M) is the coefficient symbol
/// `log_mu` for the Hadamard kinds.
struct PropagatorModel {
    PropagatorKind kind = PropagatorKind::feynman;
    unsigned d = 4;
    unsigned truncation = 4;   // largest admissible L
    Group group = "X";
    std::string log_mu = "lmu";

    static PropagatorModel of(PropagatorKind kind, unsigned d = 4, Group group = "X");
};

SmExpansion propagator_sm(const PropagatorModel& model, unsigned L);

/// Replaces the coefficient symbol log(mu/M) by the mass log log(m/M).
Expr set_mu_to_m(const Expr& e, const std::string& log_mu = "lmu");

/// Wick: a! hbar^a per pair of vertices; literal: the bare power of the propagator.
enum class Normalization { wick, literal };

/// delta_ab a! hbar^a prop^a (the factor a! hbar^a dropped for `literal`).
Expr two_vertex_vev(unsigned a, unsigned b, const Expr& propagator, Normalization n = Normalization::wick);
SmExpansion two_vertex_vev_sm(unsigned a, unsigned b, const SmExpansion& propagator,
                              Normalization n = Normalization::wick);

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckLine> lines;
    bool all_pass() const;
    void add(std::string name, bool pass, std::string detail = {});
};

/// Splits the Feynman propagator as H + d and verifies the expansion of
/// 6 hbar^3 (H + d)^3 symbolically and on the sm tables.
CheckReport hadamard_split_check(unsigned d = 4, unsigned L = 2);

struct PipelineOptions {
    MetricConvention metric = MetricConvention::minkowski(4);
    Normalization normalization = Normalization::wick;
    unsigned L = 2;
};

struct SettingSunResult {
    SmExpansion input;
    SmExtension extension;
    SmCheckReport input_check;
    SmCheckReport output_check;
    Rational remainder_bound{0};
    CheckReport report;
};

SettingSunResult setting_sun_pipeline(const PipelineOptions& options = {});

using RowKey = std::pair<unsigned, unsigned>;

struct HatResult {
    SettingSunResult subdiagram;
    SmExpansion subdiagram_table;   // renormalized, in the group W = x - y
    SmExpansion input;              // v rows, D = 10
    SmExtension extension;
    std::map<RowKey, std::map<unsigned, CoeffPoly>> brackets;
    std::map<RowKey, unsigned> pole_orders;
    SmCheckReport input_check;
    SmCheckReport output_check;
    CheckReport report;
};

/// Suffix appended to the constants of the inserted subdiagram.
inline constexpr const char* subdiagram_suffix = "sub";

HatResult setting_sun_hat_pipeline(const PipelineOptions& options = {});

struct FreedomEntry {
    std::string function;   // f1, f2, ...
    unsigned mass_power = 0;
    Expr pattern;           // operator applied to delta
    Expr sm_restriction;    // constants times powers of log(m/M); empty if not fixed by a table
};

struct FreedomReport {
    long degree = 0;
    unsigned k = 0;
    std::vector<Counterterm> basis;   // m^l log^p op delta with |op| + l = D - k
    std::vector<FreedomEntry> entries;
};

/// Freedom left by the scaling-degree axiom (one function of m/M per
/// operator) and its restriction by the sm-expansion axiom, read off from the
/// counterterms of an extended table.
FreedomReport renorm_freedom_scan(const SmExtension& ext, const std::vector<Group>& delta_groups,
                                  const MetricConvention& metric = {});

} // namespace smx
