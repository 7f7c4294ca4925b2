// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
#include "smx/dimreg.hpp"
#include "smx/errors.hpp"
#include "smx/extension.hpp"
#include "smx/models.hpp"
#include "smx/verify.hpp"

#include <functional>
#include <iostream>

using namespace smx;

namespace {

const MetricConvention mink = MetricConvention::minkowski(4);

CoeffPoly q(long p, long d = 1) { return CoeffPoly(make_rational(p, d)); }
CoeffPoly sym(const char* s, unsigned n = 1) { return CoeffPoly::symbol(s, n); }
CoeffPoly ell(unsigned n) { return n ? CoeffPoly::symbol("ell", n) : CoeffPoly(1); }
Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }
UPoly poly(std::vector<long> c) {
    std::vector<Rational> r(c.begin(), c.end());
    return UPoly(r);
}

PipelineOptions literal() {
    PipelineOptions o;
    o.normalization = Normalization::literal;
    return o;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string failing_lines(const CheckReport& r) {
    std::string s;
    for (const auto& l : r.lines)
        if (!l.pass) s += (s.empty() ? "" : "; ") + l.name + (l.detail.empty() ? "" : " (" + l.detail + ")");
    return s;
}

Outcome from_report(const CheckReport& r) {
    return {r.all_pass(), r.all_pass() ? std::to_string(r.lines.size()) + " checks" : failing_lines(r)};
}

// ---- criteria -------------------------------------------------------------------

Outcome moment_two_simple() {
    auto c = moment_solver(2, 1, Rational(0));
    const UPoly den = poly({0, 0, 1});
    bool ok = c.size() == 2 && c.at(1) == RatFunc(poly({1, -2}), den) && c.at(2) == RatFunc(poly({-1}), den);
    return {ok, "c1 = " + c.at(1).to_string("eta") + ", c2 = " + c.at(2).to_string("eta")};
}

Outcome moment_three() {
    auto c = moment_solver(3, 1, Rational(0));
    const UPoly den = poly({0, 0, 0, 1});
    bool ok = c.size() == 3 && c.at(1) == RatFunc(poly({-1, 3, -3}), den) && c.at(2) == RatFunc(poly({3, -3}), den) &&
              c.at(3) == RatFunc(poly({-1}), den);
    return {ok, "c1 = " + c.at(1).to_string("eta") + ", c2 = " + c.at(2).to_string("eta") + ", c3 = " + c.at(3).to_string("eta")};
}

Outcome moment_shifted() {
    auto c = moment_solver(2, 3, Rational(2));
    const UPoly den = poly({0, 0, 4, 12, 13, 6, 1});   // eta^2 (1 + eta)^2 (2 + eta)^2
    bool ok = c.size() == 2 && c.at(3) == RatFunc(poly({2, 2, -6, -4}), den) && c.at(4) == RatFunc(poly({-2, -6, -3}), den);
    return {ok, "c3 = " + c.at(3).to_string("eta") + ", c4 = " + c.at(4).to_string("eta")};
}

Outcome setting_sun_table() {
    auto r = setting_sun_pipeline(literal());
    const auto& s = r.input;
    bool ok = s.degree == 6 && s.row(0, 0) == X(-3) * sym("a0", 3) &&
              s.row(2, 0) == (X(-2, 1) * sym("a1") + X(-2) * sym("A1")) * (sym("a0", 2) * q(3)) &&
              s.row(2, 1) == X(-2) * (sym("a0", 2) * sym("a1") * q(6));
    for (const auto& [k, e] : s.rows) ok = ok && (k.first % 2 == 0 || e.is_zero());
    ok = ok && s.rows.size() == 3;
    return {ok, "u0 = " + s.row(0, 0).to_string() + ", u(2,0) = " + s.row(2, 0).to_string() + ", u(2,1) = " +
                    s.row(2, 1).to_string()};
}

Outcome diff_renorm_rows() {
    auto r = setting_sun_pipeline(literal());
    const auto& e = r.extension.extended;
    auto box_bar = [](const Expr& inner) { return apply_box("X", overline(inner, 4), mink); };
    const Expr u21 = box_bar(X(-1, 1) * q(1, 4)) * (sym("a0", 2) * sym("a1") * q(6)) + delta({"X"}, 4) * sym("C1");
    const Expr u20 = (box_bar((X(-1, 2) + X(-1, 1) * q(2)) * q(1, 8)) * sym("a1") + box_bar(X(-1, 1) * q(1, 4)) * sym("A1")) *
                         (sym("a0", 2) * q(3)) +
                     delta({"X"}, 4) * sym("C0");
    const Expr bbar = apply_box("X", box_bar(X(-1, 1) * q(1, 32)), mink);
    const Expr u0_engine = -bbar * sym("a0", 3) + delta({"X"}, 4, {DiffOp::box("X")}) * sym("C");
    const Expr away = restrict_away_from_origin(bbar, 4, mink);
    const bool sign_asserted = away == -X(-3);
    const bool ok = e.row(2, 1) == u21 && e.row(2, 0) == u20 && e.row(0, 0) == u0_engine && sign_asserted;
    return {ok, "u(2,1), u(2,0) exact; u0 = " + e.row(0, 0).to_string() + " since box box Overline(log(M^2 X)/(32X)) = " +
                    away.to_string() + " away from 0"};
}

Outcome hat_brackets() {
    auto r = setting_sun_hat_pipeline(literal());
    using B = std::map<unsigned, CoeffPoly>;
    const B v21{{1, ell(2) * q(1, 32) + ell(1) * q(1, 2)}, {2, ell(2) * q(-1, 32)}};
    const B v20{{1, ell(3) * q(1, 384) + ell(2) * q(3, 32) + ell(1) * q(3, 4)},
                {2, -(ell(3) * q(3, 384) + ell(2) * q(3, 32))},
                {3, ell(3) * q(1, 384)}};
    const B v0{{3, q(-1, 8) + ell(1) * q(1, 4) + ell(2) * q(1, 64)}, {4, q(7, 8) - ell(2) * q(1, 64)}};
    std::string detail;
    bool ok = true;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) detail += (detail.empty() ? "" : "; ") + what;
        ok = ok && cond;
    };
    expect(r.brackets.at({2, 1}) == v21, "v(2,1) brackets");
    expect(r.brackets.at({2, 0}) == v20, "v(2,0) brackets");
    expect(r.brackets.at({0, 0}) == v0, "v0 brackets");

    const Expr d8 = delta({"X", "Y"}, 8);
    auto constants = [&](RowKey k) {
        std::vector<std::pair<std::string, Expr>> out;
        for (const auto& c : r.extension.row_results.at(k).counterterms) out.emplace_back(c.constant, c.pattern);
        return out;
    };
    using CT = std::vector<std::pair<std::string, Expr>>;
    expect(constants({2, 1}) == CT{{"C1", d8}}, "v(2,1) counterterms {C1 delta}");
    expect(constants({2, 0}) == CT{{"C0", d8}}, "v(2,0) counterterms {C0 delta}");
    const Expr boxes = delta({"X", "Y"}, 8, {DiffOp::box("X")}) + delta({"X", "Y"}, 8, {DiffOp::box("Y")});
    expect(constants({0, 0}) == CT{{"C2", boxes}, {"C3", delta({"X", "Y"}, 8, {DiffOp::dot("X", "Y")})}},
           "v0 counterterms {C2 (box_x + box_y) delta, C3 d_x.d_y delta}");
    expect(r.report.all_pass(), "pipeline report: " + failing_lines(r.report));
    return {ok, ok ? "7 bracket polynomials and 3 counterterm bases exact" : detail};
}

Outcome freedom() {
    auto hat = setting_sun_hat_pipeline(literal());
    auto rep = renorm_freedom_scan(hat.extension, {"X", "Y"});
    std::map<std::string, Expr> got;
    for (const auto& e : rep.entries) got[e.function] = e.sm_restriction;
    const Expr f1 = Expr::symbol("C0") + multiply(mass(0, 1), Expr::symbol("C1"));
    bool ok = got.size() == 3 && got["f1"] == f1 && got["f2"] == Expr::symbol("C2") && got["f3"] == Expr::symbol("C3");
    std::string detail;
    for (const auto& [f, e] : got) detail += (detail.empty() ? "" : ", ") + f + " = " + e.to_string();
    return {ok, detail};
}

Outcome poles() {
    auto r = setting_sun_hat_pipeline(literal());
    const auto& p = r.pole_orders;
    bool ok = p.at({2, 1}) == 2 && p.at({0, 0}) == 2 && p.at({2, 0}) == 3;
    return {ok, "v(2,1): " + std::to_string(p.at({2, 1})) + ", v(2,0): " + std::to_string(p.at({2, 0})) +
                    ", v0: " + std::to_string(p.at({0, 0}))};
}

VerifyOptions seeded() {
    VerifyOptions o;
    o.seed = 20240611;
    o.cases = 120;
    return o;
}

Outcome numeric_suite() {
    CheckReport all;
    for (const char* name : {"direct-limit", "scaling-fit", "pairing-oracle"})
        for (const auto& l : verify_suite(name, seeded()).lines) all.add(std::string(name) + ": " + l.name, l.pass, l.detail);
    return from_report(all);
}

Outcome dimreg_suite() {
    CheckReport r = verify_dimreg_properties(seeded());
    // the single-propagator identity in d = 4, 6 with the default truncation
    for (unsigned d : {4u, 6u}) {
        const Expr prop = reg_propagator(d, "zeta", "X", {}, "");
        r.add("joint homogeneity d = " + std::to_string(d),
              shifted_euler(prop, reg_propagator_degree(d, "zeta"), true).is_zero());
    }
    return from_report(r);
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"moment solver N = 2, l_min = 1: (c1, c2) = (-(2eta-1)/eta^2, -1/eta^2)", moment_two_simple},
        {"moment solver N = 3, l_min = 1: -(3eta^2-3eta+1, 3eta-3, 1)/eta^3", moment_three},
        {"moment solver N = 2, l_min = 3, shift 2: (2+2eta-6eta^2-4eta^3, -(2+6eta+3eta^2))/(eta^2(1+eta)^2(2+eta)^2)",
         moment_shifted},
        {"setting sun unrenormalized table, odd rows zero", setting_sun_table},
        {"differential renormalization rows u(2,1), u(2,0) exact, u0 with the asserted sign", diff_renorm_rows},
        {"setting sun hat: minimal-subtraction brackets and counterterm bases", hat_brackets},
        {"renormalization freedom: f1 = C0 + C1 log(m/M), f2 = C2, f3 = C3", freedom},
        {"Hadamard split four-term identity at L = 2", [] { return from_report(hadamard_split_check(4, 2)); }},
        {"Laurent pole orders 2, 3, 2 for v(2,1), v(2,0), v0", poles},
        {"symbolic property suite (seeded, 120 cases)", [] { return from_report(verify_symbolic_properties(seeded())); }},
        {"numeric suite: direct limits, scaling fits, pairing oracles", numeric_suite},
        {"coefficient extraction from mass samples to 1e-3 down to m = 1e-8",
         [] { return from_report(verify_extraction(seeded())); }},
        {"dimreg: joint homogeneity, exact projection, property (A)", dimreg_suite},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << "  [" << o.detail << "]\n";
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria pass\n";
    return failures == 0 ? 0 : 1;
}
