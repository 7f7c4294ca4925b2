#include "smx/cli.hpp"

#include "smx/dimreg.hpp"
#include "smx/errors.hpp"
#include "smx/json_io.hpp"
#include "smx/verify.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace smx {

namespace {

struct Settings {
    unsigned d = 4;
    unsigned L = 2;
    std::string metric = "minkowski";
    bool json = false;
    unsigned truncation = 4;
    double tolerance = 1e-6;
    std::uint64_t seed = 1;
    std::string normalization = "wick";

    MetricConvention metric_convention() const {
        return metric == "euclidean" ? MetricConvention::euclidean(d) : MetricConvention::minkowski(d);
    }
    Normalization norm() const { return normalization == "literal" ? Normalization::literal : Normalization::wick; }
    PipelineOptions pipeline() const { return {metric_convention(), norm(), L}; }
};

void common_options(CLI::App& app, Settings& s) {
    app.add_option("--d", s.d, "spacetime dimension")->capture_default_str();
    app.add_option("--L", s.L, "sm-expansion order")->capture_default_str();
    app.add_option("--metric", s.metric, "sign convention of X")
        ->check(CLI::IsMember({"minkowski", "euclidean"}))
        ->capture_default_str();
    app.add_flag("--json", s.json, "print a JSON report");
    app.add_option("--truncation", s.truncation, "largest order kept in propagator models")->capture_default_str();
    app.add_option("--tolerance", s.tolerance, "numeric tolerance")->capture_default_str();
    app.add_option("--seed", s.seed, "seed of randomized suites")->capture_default_str();
    app.add_option("--normalization", s.normalization, "vev prefactor convention")
        ->check(CLI::IsMember({"wick", "literal"}))
        ->capture_default_str();
}

Json document(const std::string& command) { return Json{{"schema", json_schema}, {"command", command}}; }

void print_report(std::ostream& out, const CheckReport& r) {
    for (const auto& l : r.lines) {
        out << (l.pass ? "PASS  " : "FAIL  ") << l.name;
        if (!l.detail.empty()) out << "  [" << l.detail << "]";
        out << '\n';
    }
}

void print_sm_check(std::ostream& out, const SmCheckReport& r) {
    for (const auto& [name, p] : r.properties) {
        out << (p.pass ? "PASS  " : "FAIL  ") << "sm property (" << name << ")";
        if (!p.detail.empty()) out << "  [" << p.detail << "]";
        out << '\n';
    }
}

void print_table(std::ostream& out, const std::string& title, const SmExpansion& s) {
    out << title << ": D = " << s.degree << ", L = " << s.order << ", k = " << s.ambient_k << '\n';
    for (const auto& [k, e] : s.rows) out << "  u(" << k.first << "," << k.second << ") = " << e.to_string() << '\n';
    out << "  remainder: degree " << to_string(s.remainder.degree) << ", order " << s.remainder.order << '\n';
}

int finish(std::ostream& out, const Settings& s, const Json& doc, bool pass, const std::string& text) {
    if (s.json) out << doc.dump(2) << '\n';
    else out << text;
    return pass ? exit_ok : exit_check_failed;
}

PropagatorKind kind_from(const std::string& name) {
    if (name == "wightman") return PropagatorKind::wightman;
    if (name == "hadamard") return PropagatorKind::hadamard;
    if (name == "hadamard-difference") return PropagatorKind::hadamard_difference;
    return PropagatorKind::feynman;
}

// ---- expand ---------------------------------------------------------------------

struct ExpandArgs {
    std::string model = "feynman";
    unsigned power = 1;
    std::string expr;
    std::optional<long> degree;
};

int run_expand(const Settings& s, const ExpandArgs& a, std::ostream& out) {
    SmExpansion table;
    if (!a.expr.empty()) {
        Expr e = parse_expr(a.expr);
        long D = a.degree ? *a.degree : 0;
        if (!a.degree) {
            auto h = homogeneity_analyze(e, true);
            if (h.degree.has_regulator() || !is_integer(h.degree.rat))
                throw InvalidArgument("pass --degree for a non-integer degree");
            D = h.degree.rat.get_num().get_si();
        }
        const unsigned groups = std::max<std::size_t>(1, e.groups().size());
        table = sm_trivial(e, D, s.L, s.d * groups);
    } else {
        PropagatorModel m = PropagatorModel::of(kind_from(a.model), s.d);
        m.truncation = s.truncation;
        SmExpansion prop = propagator_sm(m, s.L);
        table = a.power == 1 ? prop : two_vertex_vev_sm(a.power, a.power, prop, s.norm());
    }
    auto check = sm_check(table);
    Json doc = document("expand");
    doc["table"] = to_json(table);
    doc["check"] = to_json(check);
    doc["remainder_bound"] = to_string(sm_remainder_bound(table));
    std::ostringstream text;
    print_table(text, "sm-expansion", table);
    print_sm_check(text, check);
    return finish(out, s, doc, check.all_pass(), text.str());
}

// ---- extend ---------------------------------------------------------------------

struct ExtendArgs {
    std::string expr;
    std::string method = "direct";
    std::optional<unsigned> k;
    std::string regulator = "zeta";
};

int run_extend(const Settings& s, const ExtendArgs& a, std::ostream& out) {
    const Expr e = parse_expr(a.expr);
    const MetricConvention metric = s.metric_convention();
    const unsigned k = a.k ? *a.k : s.d * static_cast<unsigned>(std::max<std::size_t>(1, e.groups().size()));
    Json doc = document("extend");
    doc["input"] = to_json(e);
    doc["method"] = a.method;
    std::ostringstream text;
    text << "input: " << e.to_string() << "\nmethod: " << a.method << ", k = " << k << '\n';
    bool pass = true;
    if (a.method == "direct" || a.method == "diffren") {
        auto r = a.method == "direct" ? direct_extend(e, k) : diff_renorm_extend(e, metric);
        doc["result"] = to_json(r);
        pass = r.restriction_verified;
        text << "extension: " << r.with_counterterms().to_string() << '\n';
    } else {
        RegulatorSpec reg{a.regulator, {}};
        auto r = regularized_extend(e, k, reg, metric);
        doc["result"] = to_json(r);
        pass = r.restriction_verified;
        text << "regularized: " << r.extended.to_string() << "\nprefactor: " << r.prefactor.to_string("eta") << '\n';
        if (a.method == "ms") {
            auto series = laurent_expand(r, 0);
            auto h = homogeneity_analyze(e, false);
            if (h.degree.has_regulator() || !is_integer(h.degree.rat))
                throw InvalidArgument("minimal subtraction needs an integer degree");
            CountertermSpec spec;
            spec.d = s.d;
            const auto groups = e.groups();
            spec.groups.assign(groups.begin(), groups.end());
            auto ms = minimal_subtract(series, counterterm_basis(h.degree.rat.get_num().get_si(), spec));
            doc["laurent"] = to_json(series);
            doc["ms"] = to_json(ms);
            text << "pole order: " << series.pole_order() << "\nminimal subtraction: " << ms.with_counterterms().to_string()
                 << '\n';
        }
    }
    text << (pass ? "PASS" : "FAIL") << "  restriction identity\n";
    doc["pass"] = pass;
    return finish(out, s, doc, pass, text.str());
}

// ---- example --------------------------------------------------------------------

CheckReport freedom_check(const FreedomReport& r) {
    CheckReport rep;
    const Expr f1 = Expr::symbol("C0") + multiply(mass(0, 1), Expr::symbol("C1"));
    const std::map<std::string, Expr> expected{{"f1", f1}, {"f2", Expr::symbol("C2")}, {"f3", Expr::symbol("C3")}};
    for (const auto& [name, value] : expected) {
        auto it = std::find_if(r.entries.begin(), r.entries.end(), [&](const FreedomEntry& e) { return e.function == name; });
        const bool found = it != r.entries.end();
        rep.add(name + " restricted to " + value.to_string(), found && it->sm_restriction == value,
                found ? it->sm_restriction.to_string() : "missing");
    }
    return rep;
}

int run_example(const Settings& s, const std::string& name, std::ostream& out) {
    std::ostringstream text;
    if (name == "setting-sun") {
        auto r = setting_sun_pipeline(s.pipeline());
        print_table(text, "input", r.input);
        print_table(text, "renormalized", r.extension.extended);
        print_sm_check(text, r.output_check);
        print_report(text, r.report);
        return finish(out, s, to_json(r), r.report.all_pass() && r.output_check.all_pass(), text.str());
    }
    if (name == "setting-sun-hat") {
        auto r = setting_sun_hat_pipeline(s.pipeline());
        print_table(text, "input", r.input);
        for (const auto& [key, b] : r.brackets) {
            text << "brackets of v(" << key.first << "," << key.second << "), pole order " << r.pole_orders.at(key) << '\n';
            for (const auto& [l, poly] : b) text << "  l = " << l << ": " << poly.to_string() << '\n';
        }
        print_sm_check(text, r.output_check);
        print_report(text, r.report);
        return finish(out, s, to_json(r), r.report.all_pass() && r.output_check.all_pass(), text.str());
    }
    if (name == "hadamard-split") {
        auto r = hadamard_split_check(s.d, s.L);
        Json doc = document("example hadamard-split");
        doc["report"] = to_json(r);
        print_report(text, r);
        return finish(out, s, doc, r.all_pass(), text.str());
    }
    // freedom
    auto hat = setting_sun_hat_pipeline(s.pipeline());
    auto fr = renorm_freedom_scan(hat.extension, {"X", "Y"}, s.metric_convention());
    auto ss = setting_sun_pipeline(s.pipeline());
    auto fs = renorm_freedom_scan(ss.extension, {"X"}, s.metric_convention());
    auto check = freedom_check(fr);
    Json doc = document("example freedom");
    doc["setting_sun_hat"] = to_json(fr);
    doc["setting_sun"] = to_json(fs);
    doc["report"] = to_json(check);
    for (const auto& [title, rep] : {std::pair{"setting sun hat", &fr}, std::pair{"setting sun", &fs}}) {
        text << title << ": D = " << rep->degree << ", k = " << rep->k << ", basis:";
        for (const auto& c : rep->basis) text << "  " << c.pattern.to_string();
        text << '\n';
        for (const auto& e : rep->entries)
            text << "  " << e.function << "(m/M) * [" << multiply(mass(e.mass_power), e.pattern).to_string()
                 << "]  sm restriction: " << e.sm_restriction.to_string() << '\n';
    }
    print_report(text, check);
    return finish(out, s, doc, check.all_pass(), text.str());
}

// ---- verify ---------------------------------------------------------------------

int run_verify(const Settings& s, const std::string& suite, unsigned cases, std::ostream& out) {
    VerifyOptions o;
    o.tolerance = s.tolerance;
    o.seed = s.seed;
    o.cases = cases;
    auto r = verify_suite(suite, o);
    Json doc = document("verify " + suite);
    doc["seed"] = s.seed;
    doc["tolerance"] = s.tolerance;
    doc["report"] = to_json(r);
    std::ostringstream text;
    print_report(text, r);
    return finish(out, s, doc, r.all_pass(), text.str());
}

// ---- dimreg ---------------------------------------------------------------------

struct DimregArgs {
    unsigned lines = 2;
    unsigned boxes = 0;
    unsigned h_terms = 2;
    unsigned c_terms = 1;
};

// Mixes the h components of each mass order with fixed weights and recovers
// every component from the mixture.
CheckReport projection_check(const RegSmExpansion& r) {
    CheckReport rep;
    std::map<unsigned, std::map<std::vector<unsigned>, Expr>> components;
    for (const auto& [k, e] : r.bins) components[k.p][k.h] += e;
    bool ok = true;
    unsigned mixed = 0;
    std::string detail;
    for (const auto& [p, byh] : components) {
        Expr U;
        std::vector<std::vector<unsigned>> hs;
        long w = 1;
        for (const auto& [h, e] : byh) {
            U += e * CoeffPoly(w++);
            hs.push_back(h);
        }
        w = 1;
        for (const auto& [h, e] : byh)
            if (reg_project_coeff(U, h, hs, Rational(r.degree), p, r.regulators) != e * CoeffPoly(w++)) {
                ok = false;
                detail += "p = " + std::to_string(p) + " ";
            }
        if (byh.size() > 1) ++mixed;
    }
    rep.add("projection recovers every h component of a planted mixture", ok,
            ok ? std::to_string(mixed) + " mass orders with several components" : detail);
    return rep;
}

int run_dimreg(const Settings& s, const DimregArgs& a, std::ostream& out) {
    LineIndexing lines(2);
    std::vector<RegFactor> factors(a.lines, RegFactor{0, 1, 0});
    if (!factors.empty()) factors.front().boxes = a.boxes;
    auto r = reg_product_sm(factors, lines, s.d, RegTruncation{a.h_terms, a.c_terms}, s.metric_convention());
    auto check = reg_check(r);
    for (auto& l : projection_check(r).lines) check.add(l.name, l.pass, l.detail);
    Json doc = document("dimreg");
    doc["product"] = to_json(r);
    doc["report"] = to_json(check);
    std::ostringstream text;
    text << "regularized product: D = " << r.degree << ", lines = " << r.lines << ", P = " << r.complete_order << '\n';
    for (const auto& [k, e] : r.bins)
        text << "  [" << k.to_string() << "] degree " << r.bin_degree(k).to_string() << ": " << e.to_string() << '\n';
    print_report(text, check);
    return finish(out, s, doc, check.all_pass(), text.str());
}

void write_error(std::ostream& err, const std::string& code, const std::string& message) {
    Json e{{"schema", json_schema}, {"error", Json{{"code", code}, {"message", message}}}};
    err << e.dump() << '\n';
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sm-expansions, extensions and their checks", "smx"};
    app.require_subcommand(1);
    Settings s;

    ExpandArgs ea;
    auto* expand = app.add_subcommand("expand", "sm-expand an expression or a propagator power");
    common_options(*expand, s);
    expand->add_option("--model", ea.model, "propagator model")
        ->check(CLI::IsMember({"feynman", "wightman", "hadamard", "hadamard-difference"}))
        ->capture_default_str();
    expand->add_option("--power", ea.power, "vev power: a! hbar^a prop^a")->check(CLI::Range(1u, 8u))->capture_default_str();
    expand->add_option("--expr", ea.expr, "plain m-independent expression, e.g. 'a0^3*X^-3'");
    expand->add_option("--degree", ea.degree, "degree D for --expr (default: its homogeneity degree)");

    ExtendArgs xa;
    auto* extend = app.add_subcommand("extend", "extend a distribution to the origin");
    common_options(*extend, s);
    extend->add_option("--expr", xa.expr, "expression to extend")->required();
    extend->add_option("--method", xa.method, "extension method")
        ->check(CLI::IsMember({"direct", "diffren", "moment", "ms"}))
        ->capture_default_str();
    extend->add_option("--k", xa.k, "ambient dimension (default d times the number of groups)");
    extend->add_option("--regulator", xa.regulator, "regulator symbol")->capture_default_str();

    std::string example_name;
    auto* example = app.add_subcommand("example", "run a worked pipeline");
    common_options(*example, s);
    example->add_option("name", example_name, "pipeline")
        ->required()
        ->check(CLI::IsMember({"setting-sun", "setting-sun-hat", "hadamard-split", "freedom"}));

    std::string suite = "all";
    unsigned cases = 120;
    auto* verify = app.add_subcommand("verify", "run numeric verification suites");
    common_options(*verify, s);
    std::vector<std::string> suites = verify_suite_names();
    suites.push_back("all");
    verify->add_option("suite", suite, "suite")->check(CLI::IsMember(suites))->capture_default_str();
    verify->add_option("--cases", cases, "randomized cases per seeded suite")->capture_default_str();

    DimregArgs da;
    auto* dimreg = app.add_subcommand("dimreg", "regularized propagator products and projections");
    common_options(*dimreg, s);
    dimreg->add_option("--lines", da.lines, "propagator factors on the line (0,1)")->check(CLI::Range(1u, 4u))->capture_default_str();
    dimreg->add_option("--boxes", da.boxes, "boxes applied to the first factor")->capture_default_str();
    dimreg->add_option("--h-terms", da.h_terms, "h terms per propagator")->capture_default_str();
    dimreg->add_option("--c-terms", da.c_terms, "c terms per propagator")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        write_error(err, "UsageError", e.what());
        return exit_error;
    }

    try {
        if (*expand) return run_expand(s, ea, out);
        if (*extend) return run_extend(s, xa, out);
        if (*example) return run_example(s, example_name, out);
        if (*verify) return run_verify(s, suite, cases, out);
        return run_dimreg(s, da, out);
    } catch (const Error& e) {
        write_error(err, e.code(), e.what());
    } catch (const std::exception& e) {
        write_error(err, "InternalError", e.what());
    }
    return exit_error;
}

} // namespace smx
