#include "smx/json_io.hpp"

#include "smx/errors.hpp"

#include <algorithm>
#include <cctype>

namespace smx {

// ---- writers -----------------------------------------------------------------

Json to_json(const Rational& r) { return to_string(r); }

Json to_json(const Exponent& e) {
    Json z = Json::object();
    for (const auto& [sym, n] : e.zeta) z[sym] = n;
    return Json{{"rat", to_string(e.rat)}, {"zeta", z}};
}

Json to_json(const CoeffPoly& c) {
    Json out = Json::array();
    for (const auto& [powers, q] : c.terms()) {
        Json s = Json::object();
        for (const auto& [name, n] : powers) s[name] = n;
        out.push_back(Json{{"c", to_string(q)}, {"s", s}});
    }
    return out;
}

namespace {

Json op_json(const DiffOp& op) {
    switch (op.kind) {
    case DiffOp::Kind::box: return Json{{"op", "box"}, {"group", op.a}};
    case DiffOp::Kind::dot: return Json{{"op", "dot"}, {"a", op.a}, {"b", op.b}};
    case DiffOp::Kind::partial: return Json{{"op", "partial"}, {"beta", op.multi_index}};
    }
    return {};
}

Json factor_json(const Factor& f) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Overline>) {
                return Json{{"kind", "overline"}, {"k", x.k}, {"z_moments", x.z_moments}, {"inner", to_json(*x.inner)}};
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                return Json{{"kind", "box"}, {"group", x.group}, {"inner", to_json(*x.inner)}};
            } else if constexpr (std::is_same_v<T, MomentDiv>) {
                return Json{{"kind", "moment_div"}, {"l", x.l}, {"inner", to_json(*x.inner)}};
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                Json ops = Json::array();
                for (const auto& op : x.ops) ops.push_back(op_json(op));
                return Json{{"kind", "delta"}, {"support", x.support}, {"dim", x.dim}, {"ops", ops}};
            } else {
                return Json{{"kind", "remainder"},
                            {"tag", x.tag},
                            {"degree", to_string(x.degree)},
                            {"order", x.order},
                            {"groups", x.groups},
                            {"euler", x.euler_applications},
                            {"mass_euler", x.mass_euler_applications}};
            }
        },
        f);
}

Json remainder_json(const Remainder& r) {
    return Json{{"D", to_string(r.degree)}, {"order", r.order}, {"tag", r.tag}, {"groups", r.groups}};
}

Json homogeneity_json(const std::optional<HomogeneityReport>& h) { return h ? to_json(*h) : Json(nullptr); }

std::string row_name(const RowKey& k) {
    return k.first == 0 && k.second == 0 ? "v0" : "v" + std::to_string(k.first) + std::to_string(k.second);
}

Json brackets_json(const std::map<unsigned, CoeffPoly>& b) {
    Json out = Json::object();
    for (const auto& [l, poly] : b) out[std::to_string(l)] = Json{{"text", poly.to_string()}, {"poly", to_json(poly)}};
    return out;
}

Json doubles(const std::vector<double>& v) { return Json(v); }

} // namespace

Json to_json(const Term& t) {
    Json inv = Json::object();
    for (const auto& [g, p] : t.mono.inv) inv[g] = Json{{"power", to_json(p.power)}, {"log", p.log}};
    Json factors = Json::array();
    for (const auto& f : t.factors) factors.push_back(factor_json(f));
    return Json{{"mass", to_json(t.mono.mass_power)}, {"log_m", t.mono.log_m_power}, {"inv", inv}, {"factors", factors}};
}

Json to_json(const Expr& e) {
    Json terms = Json::array();
    for (const auto& [t, c] : e.atoms()) terms.push_back(Json{{"coeff", to_json(c)}, {"term", to_json(t)}});
    return Json{{"kind", "sum"}, {"text", e.to_string()}, {"terms", terms}};
}

Json to_json(const SmExpansion& s) {
    Json rows = Json::array();
    for (const auto& [k, e] : s.rows) rows.push_back(Json{{"l", k.first}, {"p", k.second}, {"expr", to_json(e)}});
    return Json{{"D", s.degree}, {"L", s.order}, {"k", s.ambient_k}, {"rows", rows}, {"remainder", remainder_json(s.remainder)}};
}

Json to_json(const SmCheckReport& r) {
    Json props = Json::object();
    for (const auto& [name, p] : r.properties) props[name] = Json{{"pass", p.pass}, {"detail", p.detail}};
    return Json{{"pass", r.all_pass()}, {"properties", props}};
}

Json to_json(const CheckReport& r) {
    Json lines = Json::array();
    for (const auto& l : r.lines) lines.push_back(Json{{"name", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    return Json{{"pass", r.all_pass()}, {"checks", lines}};
}

Json to_json(const HomogeneityReport& h) {
    return Json{{"degree", to_json(h.degree)}, {"power", h.power}, {"with_mass", h.with_mass},
                {"annihilator_order", h.annihilator_order}};
}

Json to_json(const ExtensionResult& r) {
    Json cts = Json::array();
    for (const auto& c : r.counterterms)
        cts.push_back(Json{{"constant", c.constant},
                           {"pattern", to_json(c.pattern)},
                           {"mass_power", c.mass_power},
                           {"log_power", c.log_power},
                           {"op_order", c.op_order}});
    Json out{{"method", to_string(r.method)},
             {"extended", to_json(r.extended)},
             {"prefactor", r.prefactor.to_string("eta")},
             {"counterterms", cts},
             {"input_homogeneity", homogeneity_json(r.input_homogeneity)},
             {"output_homogeneity", homogeneity_json(r.output_homogeneity)},
             {"restriction_verified", r.restriction_verified}};
    if (r.moment) {
        const auto& m = *r.moment;
        Json coeffs = Json::object();
        for (const auto& [l, f] : m.coefficients) coeffs[std::to_string(l)] = f.to_string("eta");
        out["moment"] = Json{{"regulator", m.regulator},
                             {"eta_per_regulator", to_string(m.eta_per_regulator)},
                             {"N", m.annihilator_order},
                             {"l_min", m.l_min},
                             {"shift", to_string(m.shift)},
                             {"coefficients", coeffs},
                             {"regulated_groups", m.regulated_groups}};
    } else {
        out["moment"] = nullptr;
    }
    return out;
}

Json to_json(const LaurentSeries& s) {
    Json coeffs = Json::array();
    for (const auto& [n, e] : s.coefficients) coeffs.push_back(Json{{"exponent", n}, {"expr", to_json(e)}});
    return Json{{"regulator", s.regulator}, {"pole_order", s.pole_order()}, {"truncation", s.truncation},
                {"coefficients", coeffs}};
}

Json to_json(const SmExtension& s) {
    Json rows = Json::array();
    for (const auto& [k, r] : s.row_results) {
        Json row{{"l", k.first}, {"p", k.second}, {"result", to_json(r)}};
        auto it = s.row_series.find(k);
        row["laurent"] = it == s.row_series.end() ? Json(nullptr) : to_json(it->second);
        rows.push_back(row);
    }
    return Json{{"L0", s.l0}, {"input", to_json(s.input)}, {"extended", to_json(s.extended)}, {"rows", rows},
                {"extended_remainder", to_json(s.extended_remainder)}};
}

Json to_json(const RegSmExpansion& r) {
    Json bins = Json::array();
    for (const auto& [k, e] : r.bins)
        bins.push_back(Json{{"key", k.to_string()},
                            {"p", k.p},
                            {"c", k.c},
                            {"h", k.h},
                            {"degree", to_json(r.bin_degree(k))},
                            {"bracket_degree", to_json(r.bracket_degree(k))},
                            {"expr", to_json(e)}});
    Json rems = Json::array();
    for (const auto& [k, rem] : r.remainders) rems.push_back(Json{{"key", k.to_string()}, {"remainder", remainder_json(rem)}});
    return Json{{"D", r.degree},     {"d", r.d},         {"lines", r.lines},   {"regulators", r.regulators},
                {"groups", r.groups}, {"P", r.complete_order}, {"bins", bins}, {"remainders", rems}};
}

Json to_json(const FreedomReport& r) {
    Json basis = Json::array();
    for (const auto& c : r.basis)
        basis.push_back(Json{{"element", to_json(c.pattern)},
                             {"text", c.pattern.to_string()}});
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back(Json{{"function", e.function},
                               {"mass_power", e.mass_power},
                               {"pattern", to_json(e.pattern)},
                               {"sm_restriction", to_json(e.sm_restriction)}});
    return Json{{"D", r.degree}, {"k", r.k}, {"basis", basis}, {"entries", entries}};
}

Json to_json(const SettingSunResult& r) {
    return Json{{"schema", json_schema},
                {"pipeline", "setting-sun"},
                {"stages",
                 Json{{"input", to_json(r.input)},
                      {"input_check", to_json(r.input_check)},
                      {"extension", to_json(r.extension)},
                      {"output_check", to_json(r.output_check)},
                      {"remainder_bound", to_string(r.remainder_bound)}}},
                {"report", to_json(r.report)}};
}

Json to_json(const HatResult& r) {
    Json ms = Json::object();
    for (const auto& [k, b] : r.brackets) {
        auto pole = r.pole_orders.find(k);
        ms[row_name(k)] = Json{{"l", k.first},
                               {"p", k.second},
                               {"brackets", brackets_json(b)},
                               {"pole_order", pole == r.pole_orders.end() ? 0u : pole->second}};
    }
    return Json{{"schema", json_schema},
                {"pipeline", "setting-sun-hat"},
                {"ms", ms},
                {"stages",
                 Json{{"subdiagram", to_json(r.subdiagram_table)},
                      {"input", to_json(r.input)},
                      {"input_check", to_json(r.input_check)},
                      {"extension", to_json(r.extension)},
                      {"output_check", to_json(r.output_check)}}},
                {"report", to_json(r.report)}};
}

Json to_json(const PairingReport& r) {
    return Json{{"value", r.value}, {"error", r.error}, {"nodes", r.nodes}, {"converged", r.converged}};
}

Json to_json(const DirectLimitReport& r) {
    return Json{{"rho", doubles(r.rho)}, {"values", doubles(r.values)}, {"increments", doubles(r.increments)},
                {"limit", r.limit},      {"converged", r.converged}};
}

Json to_json(const ScalingFit& f) {
    return Json{{"degree", f.degree}, {"residual", f.residual}, {"coefficients", doubles(f.coefficients)},
                {"rho", doubles(f.rho)}, {"values", doubles(f.values)}};
}

// ---- readers -----------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& what) { throw ParseError("JSON: " + what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("field \"") + key + "\": " + e.what());
    }
}

Expr term_from_json(const Json& j);

Factor factor_from_json(const Json& j) {
    const auto kind = get<std::string>(j, "kind");
    auto inner = [&] {
        Expr e = term_from_json(field(j, "inner"));
        if (e.size() != 1) bad("inner node is not a single term");
        return std::make_shared<const Term>(e.atoms().begin()->first);
    };
    if (kind == "overline") return Overline{get<unsigned>(j, "k"), get<unsigned>(j, "z_moments"), inner()};
    if (kind == "box") return BoxOp{get<std::string>(j, "group"), inner()};
    if (kind == "moment_div") return MomentDiv{get<unsigned>(j, "l"), inner()};
    if (kind == "delta") {
        DeltaCT d;
        d.support = get<std::set<Group>>(j, "support");
        d.dim = get<unsigned>(j, "dim");
        for (const auto& o : field(j, "ops")) {
            const auto op = get<std::string>(o, "op");
            if (op == "box") d.ops.push_back(DiffOp::box(get<std::string>(o, "group")));
            else if (op == "dot") d.ops.push_back(DiffOp::dot(get<std::string>(o, "a"), get<std::string>(o, "b")));
            else if (op == "partial") d.ops.push_back(DiffOp::partial(get<std::vector<unsigned>>(o, "beta")));
            else bad("unknown operator \"" + op + "\"");
        }
        std::sort(d.ops.begin(), d.ops.end(), [](const DiffOp& a, const DiffOp& b) { return compare(a, b) < 0; });
        return d;
    }
    if (kind == "remainder") {
        Remainder r;
        r.tag = get<std::string>(j, "tag");
        r.degree = parse_rational(get<std::string>(j, "degree"));
        r.order = get<unsigned>(j, "order");
        r.groups = get<std::set<Group>>(j, "groups");
        r.euler_applications = get<unsigned>(j, "euler");
        r.mass_euler_applications = get<unsigned>(j, "mass_euler");
        return r;
    }
    bad("unknown node kind \"" + kind + "\"");
}

// The atom with coefficient 1, rebuilt through the canonical constructors.
Expr term_from_json(const Json& j) {
    Expr out = mass(exponent_from_json(field(j, "mass")), get<unsigned>(j, "log_m"));
    for (const auto& [g, p] : field(j, "inv").items())
        out = multiply_trusted(out, inv(g, exponent_from_json(field(p, "power")), get<unsigned>(p, "log")));
    for (const auto& f : field(j, "factors")) {
        out = multiply_trusted(out, factor_expr(factor_from_json(f)));
    }
    return out;
}

} // namespace

Rational rational_from_json(const Json& j) {
    if (!j.is_string()) bad("rational must be a \"p/q\" string");
    return parse_rational(j.get<std::string>());
}

Exponent exponent_from_json(const Json& j) {
    Exponent e(rational_from_json(field(j, "rat")));
    for (const auto& [sym, n] : field(j, "zeta").items()) {
        if (!n.is_number_integer()) bad("regulator coefficient must be an integer");
        e += Exponent::regulator(sym, n.get<long>());
    }
    return e;
}

CoeffPoly coeff_from_json(const Json& j) {
    if (!j.is_array()) bad("coefficient must be an array of terms");
    CoeffPoly out;
    for (const auto& t : j) {
        CoeffPoly term(rational_from_json(field(t, "c")));
        for (const auto& [sym, n] : field(t, "s").items()) term *= CoeffPoly::symbol(sym, n.get<unsigned>());
        out += term;
    }
    return out;
}

Expr expr_from_json(const Json& j) {
    if (get<std::string>(j, "kind") != "sum") bad("expression must have kind \"sum\"");
    Expr out;
    for (const auto& t : field(j, "terms")) out += term_from_json(field(t, "term")) * coeff_from_json(field(t, "coeff"));
    return out;
}

SmExpansion sm_from_json(const Json& j) {
    SmExpansion s;
    s.degree = get<long>(j, "D");
    s.order = get<unsigned>(j, "L");
    s.ambient_k = get<unsigned>(j, "k");
    for (const auto& row : field(j, "rows"))
        s.set_row(get<unsigned>(row, "l"), get<unsigned>(row, "p"), expr_from_json(field(row, "expr")));
    const auto& r = field(j, "remainder");
    s.remainder.degree = rational_from_json(field(r, "D"));
    s.remainder.order = get<unsigned>(r, "order");
    s.remainder.tag = get<std::string>(r, "tag");
    s.remainder.groups = get<std::set<Group>>(r, "groups");
    return s;
}

// ---- text parser ----------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::set<Group>& groups) : s_(text), groups_(groups) {}

    Expr parse() {
        Expr e = sum();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(i_) + " in \"" + s_ + "\"");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    bool eat(const std::string& word) {
        skip();
        if (s_.compare(i_, word.size(), word) == 0) {
            i_ += word.size();
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return i_ < s_.size() ? s_[i_] : '\0';
    }

    Expr sum() {
        Expr out;
        bool negative = eat('-');
        if (!negative) eat('+');
        for (;;) {
            Expr t = product();
            out += negative ? -t : t;
            if (eat('+')) negative = false;
            else if (eat('-')) negative = true;
            else return out;
        }
    }

    Expr product() {
        Expr out = factor();
        for (;;) {
            if (eat('*')) {
                out = multiply(out, factor());
            } else if (eat('/')) {
                Expr d = factor();
                out = multiply(out, reciprocal(d));
            } else {
                return out;
            }
        }
    }

    Expr reciprocal(const Expr& d) {
        if (d.size() == 1) {
            const auto& [t, c] = *d.atoms().begin();
            if (t.is_plain() && t.mono.log_m_power == 0 && c.is_constant()) {
                bool log_free = std::all_of(t.mono.inv.begin(), t.mono.inv.end(), [](const auto& kv) { return kv.second.log == 0; });
                if (log_free) {
                    Term r;
                    r.mono.mass_power = -t.mono.mass_power;
                    for (const auto& [g, p] : t.mono.inv) r.mono.inv[g] = InvPower{-p.power, 0};
                    return Expr::atom(CoeffPoly(Rational(1) / c.as_rational()), r);
                }
            }
        }
        fail("only numbers, masses and powers of variables can divide");
    }

    mpz_class digits() {
        skip();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected an integer");
        return mpz_class(s_.substr(start, i_ - start));
    }

    unsigned integer() {
        mpz_class n = digits();
        if (!n.fits_uint_p()) fail("power out of range");
        return static_cast<unsigned>(n.get_ui());
    }

    Rational rational_number() {
        Rational q(digits());
        // an exponent like 1/2 is read greedily
        std::size_t save = i_;
        if (eat('/') && std::isdigit(static_cast<unsigned char>(peek()))) {
            mpz_class den = digits();
            if (den == 0) fail("zero denominator");
            q /= den;
            q.canonicalize();
        } else {
            i_ = save;
        }
        return q;
    }

    std::string identifier() {
        skip();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        if (start == i_) fail("expected an identifier");
        return s_.substr(start, i_ - start);
    }

    // ^n, ^-n, ^p/q or ^(rational +- n*sym ...)
    Exponent exponent() {
        if (eat('(')) {
            Exponent e;
            bool negative = eat('-');
            for (;;) {
                long sign = negative ? -1 : 1;
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    Rational q = rational_number();
                    if (eat('*')) e += Exponent::regulator(identifier(), sign * static_cast<long>(q.get_num().get_si()));
                    else e += Exponent(q * sign);
                } else {
                    e += Exponent::regulator(identifier(), sign);
                }
                if (eat('+')) negative = false;
                else if (eat('-')) negative = true;
                else break;
            }
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        bool negative = eat('-');
        Rational q = rational_number();
        return Exponent(negative ? Rational(-q) : q);
    }

    unsigned log_power() { return eat('^') ? integer() : 1; }

    Expr factor() {
        char c = peek();
        if (c == '(') {
            ++i_;
            Expr e = sum();
            if (!eat(')')) fail("expected ')'");
            return eat('^') ? power(e, integer()) : e;
        }
        if (c == '-') {
            ++i_;
            return -factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Expr(Rational(digits()));
        if (eat("log(m/M)")) return mass(Exponent{}, log_power());
        std::string id = identifier();
        if (id == "m") return mass(eat('^') ? exponent() : Exponent(1));
        if (id.rfind("L_", 0) == 0 && groups_.count(id.substr(2))) return log_inv(id.substr(2), log_power());
        if (groups_.count(id)) return inv(id, eat('^') ? exponent() : Exponent(1));
        return Expr::symbol(id, log_power());
    }

    std::string s_;
    const std::set<Group>& groups_;
    std::size_t i_ = 0;
};

} // namespace

Expr parse_expr(const std::string& text, const std::set<Group>& groups) { return Parser(text, groups).parse(); }

} // namespace smx
