#include "smx/models.hpp"

#include "smx/errors.hpp"

#include <algorithm>

namespace smx {

std::string to_string(PropagatorKind k) {
    switch (k) {
    case PropagatorKind::wightman: return "wightman";
    case PropagatorKind::feynman: return "feynman";
    case PropagatorKind::hadamard: return "hadamard";
    case PropagatorKind::hadamard_difference: return "hadamard-difference";
    }
    return "?";
}

PropagatorModel PropagatorModel::of(PropagatorKind kind, unsigned d, Group group) {
    PropagatorModel m;
    m.kind = kind;
    m.d = d;
    m.group = std::move(group);
    return m;
}

SmExpansion propagator_sm(const PropagatorModel& model, unsigned L) {
    if (L > model.truncation)
        throw TruncationTooSmall("propagator model truncated at L = " + std::to_string(model.truncation) +
                                 ", requested " + std::to_string(L));
    if (model.d < 3) throw InvalidArgument("propagator models need d >= 3");
    SmExpansion s;
    s.degree = static_cast<long>(model.d) - 2;
    s.order = L;
    s.ambient_k = model.d;
    const Group& g = model.group;
    const CoeffPoly log_mu = CoeffPoly::symbol(model.log_mu);

    for (unsigned j = 0; 2 * j <= L; ++j) {
        const Rational e = Rational(j + 1) - make_rational(model.d, 2);
        const bool logs = model.d % 2 == 0 && e >= 0;
        const CoeffPoly a = CoeffPoly::symbol("a" + std::to_string(j));
        const CoeffPoly A = CoeffPoly::symbol("A" + std::to_string(j));
        const Expr pole = inv(g, Exponent(e));
        const Expr logged = inv(g, Exponent(e), 1);
        const unsigned l = 2 * j;
        if (!logs) {
            if (model.kind != PropagatorKind::hadamard_difference) s.set_row(l, 0, pole * a);
            continue;
        }
        switch (model.kind) {
        case PropagatorKind::wightman:
        case PropagatorKind::feynman:
            s.set_row(l, 0, logged * a + pole * A);
            s.set_row(l, 1, pole * (a * CoeffPoly(2)));
            break;
        case PropagatorKind::hadamard:
            s.set_row(l, 0, logged * a + pole * (A + a * log_mu * CoeffPoly(2)));
            break;
        case PropagatorKind::hadamard_difference:
            s.set_row(l, 0, pole * (a * log_mu * CoeffPoly(-2)));
            s.set_row(l, 1, pole * (a * CoeffPoly(2)));
            break;
        }
    }
    const unsigned next = L % 2 == 0 ? L + 2 : L + 1;
    s.remainder = Remainder{to_string(model.kind), Rational(s.degree), next, {g}, 0, 0};
    return s;
}

Expr set_mu_to_m(const Expr& e, const std::string& log_mu) {
    Expr out;
    for (const auto& [t, c] : e.atoms())
        for (unsigned j = 0; j <= c.degree_in(log_mu); ++j) {
            CoeffPoly cj = c.coefficient_in(log_mu, j);
            if (!cj.is_zero()) out += multiply(Expr::atom(cj, t), mass(0, j));
        }
    return out;
}

namespace {

CoeffPoly wick_factor(unsigned a) {
    Rational fact(1);
    for (unsigned i = 2; i <= a; ++i) fact *= i;
    return CoeffPoly(fact) * (a ? CoeffPoly::symbol("hbar", a) : CoeffPoly(1));
}

CoeffPoly sym(const std::string& s) { return CoeffPoly::symbol(s); }

} // namespace

Expr two_vertex_vev(unsigned a, unsigned b, const Expr& propagator, Normalization n) {
    if (a != b) return {};
    Expr e = power(propagator, a);
    return n == Normalization::wick ? e * wick_factor(a) : e;
}

SmExpansion two_vertex_vev_sm(unsigned a, unsigned b, const SmExpansion& propagator, Normalization n) {
    SmExpansion s = sm_trivial(Expr(1), 0, propagator.order, propagator.ambient_k);
    s.remainder.groups = propagator.remainder.groups;
    if (a != b) {
        s.rows.clear();
        return s;
    }
    for (unsigned i = 0; i < a; ++i) s = sm_product(s, propagator);
    return n == Normalization::wick ? sm_scale(s, wick_factor(a)) : s;
}

bool CheckReport::all_pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

void CheckReport::add(std::string name, bool pass, std::string detail) {
    lines.push_back({std::move(name), pass, std::move(detail)});
}

// ---- Hadamard split -------------------------------------------------------------

CheckReport hadamard_split_check(unsigned d, unsigned L) {
    CheckReport rep;
    const CoeffPoly hbar = sym("hbar");

    // as polynomials in the symbols H and d
    {
        const Expr H(sym("H")), D(sym("d"));
        Expr lhs = two_vertex_vev(3, 3, H + D);
        Expr rhs = two_vertex_vev(3, 3, H) + two_vertex_vev(2, 2, H) * D * (hbar * CoeffPoly(9)) +
                   H * D * D * (hbar * hbar * hbar * CoeffPoly(18)) + D * D * D * (hbar * hbar * hbar * CoeffPoly(6));
        rep.add("four-term identity (symbols)", lhs == rhs, lhs.to_string());
        CoeffPoly c = lhs.atoms().begin()->second.coefficient_in("d", 1).coefficient_in("H", 2);
        rep.add("coefficient of H^2 d is 18 hbar^3 = 3 * binom(3,1) * 2 hbar^3",
                c == hbar * hbar * hbar * CoeffPoly(3 * 3 * 2), c.to_string());
    }

    auto F = propagator_sm(PropagatorModel::of(PropagatorKind::feynman, d), L);
    auto H = propagator_sm(PropagatorModel::of(PropagatorKind::hadamard, d), L);
    auto Dd = propagator_sm(PropagatorModel::of(PropagatorKind::hadamard_difference, d), L);

    rep.add("feynman = hadamard + difference (tables)", sm_add(H, Dd).rows == F.rows);
    bool no_m_log = true;
    for (const auto& [key, e] : H.rows) no_m_log = no_m_log && key.second == 0;
    rep.add("hadamard rows carry no log(m/M)", no_m_log);

    bool smooth = true;
    for (const auto& [key, e] : Dd.rows)
        for (const auto& [t, c] : e.atoms())
            for (const auto& [g, p] : t.mono.inv) smooth = smooth && p.power.is_nonnegative_integer() && p.log == 0;
    rep.add("difference has no singular X-powers", smooth);
    rep.add("mu = m collapses the difference to 0", set_mu_to_m(Dd.truncated_sum()).is_zero());

    auto lhs = two_vertex_vev_sm(3, 3, F);
    auto cube_d = sm_product(sm_product(Dd, Dd), Dd);
    auto rhs = sm_add(sm_add(two_vertex_vev_sm(3, 3, H), sm_scale(sm_product(two_vertex_vev_sm(2, 2, H), Dd), hbar * CoeffPoly(9))),
                      sm_add(sm_scale(sm_product(H, sm_product(Dd, Dd)), hbar * hbar * hbar * CoeffPoly(18)),
                             sm_scale(cube_d, hbar * hbar * hbar * CoeffPoly(6))));
    rep.add("four-term identity (sm tables, L = " + std::to_string(L) + ")", lhs.rows == rhs.rows);
    return rep;
}

// ---- setting sun -----------------------------------------------------------------

namespace {

std::vector<std::string> names_from(const std::string& base, std::size_t count, unsigned first = 0) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        if (first) out.push_back("C" + std::to_string(first + i));
        else out.push_back(count == 1 ? base : base + "_" + std::to_string(i));
    }
    return out;
}

std::string generic_name(unsigned l, unsigned p) { return "C_" + std::to_string(l) + "_" + std::to_string(p); }

bool odd_rows_vanish(const SmExpansion& s) {
    for (const auto& [key, e] : s.rows)
        if (key.first % 2 && !e.is_zero()) return false;
    return true;
}

void add_row_checks(CheckReport& rep, const SmExtension& ext) {
    for (const auto& [key, r] : ext.row_results)
        rep.add("restriction of extended u[" + std::to_string(key.first) + "][" + std::to_string(key.second) + "] (" +
                    to_string(r.method) + ")",
                r.restriction_verified);
}

} // namespace

SettingSunResult setting_sun_pipeline(const PipelineOptions& opt) {
    SettingSunResult res;
    PropagatorModel model = PropagatorModel::of(PropagatorKind::feynman, opt.metric.d);
    auto F = propagator_sm(model, opt.L);
    res.input = two_vertex_vev_sm(3, 3, F, opt.normalization);

    SmExtensionOptions eo;
    eo.metric = opt.metric;
    eo.constant_names = [](unsigned l, unsigned p, std::size_t n) {
        if (l == 0) return names_from("C", n);
        if (l == 2) return names_from("C" + std::to_string(p), n);
        return names_from(generic_name(l, p), n);
    };
    res.extension = extend_sm(res.input, eo);
    res.input_check = sm_check(res.input);
    res.output_check = sm_check(res.extension.extended);
    res.remainder_bound = sm_remainder_bound(res.input);

    res.report.add("input passes sm_check", res.input_check.all_pass());
    res.report.add("output passes sm_check", res.output_check.all_pass());
    res.report.add("odd rows vanish", odd_rows_vanish(res.input) && odd_rows_vanish(res.extension.extended));
    res.report.add("remainder sd bound " + to_string(res.remainder_bound) + " < k",
                   res.remainder_bound < Rational(res.input.ambient_k));
    add_row_checks(res.report, res.extension);
    return res;
}

// ---- setting sun with a hat ----------------------------------------------------------

namespace {

SmExpansion rename_table(const SmExpansion& s, const Group& from, const Group& to,
                         const std::map<std::string, std::string>& constants) {
    SmExpansion out = s;
    for (auto& [key, e] : out.rows) {
        e = rename_group(e, from, to);
        for (const auto& [a, b] : constants) e = substitute_symbol(e, a, CoeffPoly::symbol(b));
    }
    if (out.remainder.groups.erase(from)) out.remainder.groups.insert(to);
    return out;
}

} // namespace

HatResult setting_sun_hat_pipeline(const PipelineOptions& opt) {
    HatResult res;
    res.subdiagram = setting_sun_pipeline(opt);
    std::map<std::string, std::string> renamed;
    for (const auto& [key, r] : res.subdiagram.extension.row_results)
        for (const auto& c : r.counterterms) renamed[c.constant] = c.constant + subdiagram_suffix;
    res.subdiagram_table = rename_table(res.subdiagram.extension.extended, "X", "W", renamed);

    const unsigned k = 2 * opt.metric.d;
    auto Fx = propagator_sm(PropagatorModel::of(PropagatorKind::feynman, opt.metric.d, "X"), opt.L);
    auto Fy = propagator_sm(PropagatorModel::of(PropagatorKind::feynman, opt.metric.d, "Y"), opt.L);
    res.input = sm_product(sm_product(res.subdiagram_table, Fx, k), Fy, k);

    SmExtensionOptions eo;
    eo.metric = opt.metric;
    eo.regulator = RegulatorSpec{"zeta", {"X", "Y"}};
    eo.delta_groups = {"X", "Y"};
    eo.constant_names = [](unsigned l, unsigned p, std::size_t n) {
        if (l == 0) return names_from("C2", n, 2);
        if (l == 2) return names_from("C" + std::to_string(p), n);
        return names_from(generic_name(l, p), n);
    };
    res.extension = extend_sm(res.input, eo);

    for (const auto& [key, r] : res.extension.row_results) {
        if (!r.moment) continue;
        res.brackets[key] = ms_brackets(*r.moment);
        res.pole_orders[key] = res.extension.row_series.at(key).pole_order();
        Expr assembled = assemble_from_brackets(res.input.row(key.first, key.second), *r.moment, res.brackets[key], k);
        res.report.add("brackets reassemble the zeta^0 coefficient of v[" + std::to_string(key.first) + "][" +
                           std::to_string(key.second) + "]",
                       assembled == r.extended);
    }
    res.input_check = sm_check(res.input);
    res.output_check = sm_check(res.extension.extended);
    res.report.add("subdiagram pipeline", res.subdiagram.report.all_pass());
    res.report.add("input passes sm_check", res.input_check.all_pass());
    res.report.add("output passes sm_check", res.output_check.all_pass());
    res.report.add("odd rows vanish", odd_rows_vanish(res.input) && odd_rows_vanish(res.extension.extended));
    add_row_checks(res.report, res.extension);
    return res;
}

// ---- renormalization freedom ---------------------------------------------------------

FreedomReport renorm_freedom_scan(const SmExtension& ext, const std::vector<Group>& delta_groups,
                                  const MetricConvention& metric) {
    FreedomReport rep;
    rep.degree = ext.input.degree;
    rep.k = ext.input.ambient_k;
    if (rep.degree < static_cast<long>(rep.k)) return rep;
    CountertermSpec spec;
    spec.groups = delta_groups;
    spec.d = metric.d;
    rep.basis = counterterm_basis(rep.degree, spec);

    const long top = rep.degree - static_cast<long>(rep.k);
    for (long l = top; l >= 0; --l)
        for (const auto& op : counterterm_operators(static_cast<unsigned>(top - l), spec)) {
            FreedomEntry e;
            e.function = "f" + std::to_string(rep.entries.size() + 1);
            e.mass_power = static_cast<unsigned>(l);
            e.pattern = op.pattern;
            rep.entries.push_back(std::move(e));
        }
    for (const auto& [key, r] : ext.row_results)
        for (const auto& c : r.counterterms)
            for (auto& e : rep.entries)
                if (e.mass_power == key.first && e.pattern == c.pattern)
                    e.sm_restriction += Expr::symbol(c.constant) * mass(0, key.second);
    return rep;
}

} // namespace smx
