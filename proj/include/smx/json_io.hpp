#pragma once

#include "smx/dimreg.hpp"
#include "smx/extension.hpp"
#include "smx/models.hpp"
#include "smx/numeric.hpp"
#include "smx/sm_expansion.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace smx {

using Json = nlohmann::ordered_json;

inline constexpr const char* json_schema = "smx/1";

Json to_json(const Rational& r);   // "p/q"
Json to_json(const Exponent& e);   // {"rat": "p/q", "zeta": {...}}
Json to_json(const CoeffPoly& c);
Json to_json(const Term& t);
Json to_json(const Expr& e);       // {"text": ..., "terms": [...]}
Json to_json(const SmExpansion& s);
Json to_json(const SmCheckReport& r);
Json to_json(const CheckReport& r);
Json to_json(const HomogeneityReport& h);
Json to_json(const ExtensionResult& r);
Json to_json(const LaurentSeries& s);
Json to_json(const SmExtension& s);
Json to_json(const RegSmExpansion& r);
Json to_json(const FreedomReport& r);
Json to_json(const SettingSunResult& r);
Json to_json(const HatResult& r);
Json to_json(const PairingReport& r);
Json to_json(const DirectLimitReport& r);
Json to_json(const ScalingFit& f);

Rational rational_from_json(const Json& j);
Exponent exponent_from_json(const Json& j);
CoeffPoly coeff_from_json(const Json& j);
Expr expr_from_json(const Json& j);
SmExpansion sm_from_json(const Json& j);

/// Parses the printed form of plain expressions: sums of products of
/// rationals, coefficient symbols, group powers (X^-3), group logs (L_X^2),
/// m^l and log(m/M)^p, with parentheses and integer powers of them.
/// Identifiers listed in `groups` are variables, all others are symbols.
Expr parse_expr(const std::string& text, const std::set<Group>& groups = {"X", "Y", "W"});

} // namespace smx
