#include "smx/dimreg.hpp"

#include "smx/errors.hpp"
#include "smx/scaling.hpp"

#include <algorithm>

namespace smx {

unsigned LineIndexing::index(unsigned i, unsigned j) const {
    if (i > j) std::swap(i, j);
    if (i == j || j >= vertices) throw InvalidArgument("line (" + std::to_string(i) + ", " + std::to_string(j) +
                                                       ") does not join two of " + std::to_string(vertices) + " vertices");
    // lines ordered (0,1), (0,2), ..., (1,2), ...
    return i * vertices - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<unsigned, unsigned> LineIndexing::line(unsigned idx) const {
    for (unsigned i = 0; i < vertices; ++i)
        for (unsigned j = i + 1; j < vertices; ++j)
            if (index(i, j) == idx) return {i, j};
    throw InvalidArgument("line slot " + std::to_string(idx) + " out of range");
}

std::string LineIndexing::regulator(unsigned idx) const {
    auto [i, j] = line(idx);
    return "zeta" + std::to_string(i + 1) + std::to_string(j + 1);
}

Group LineIndexing::group(unsigned idx) const {
    auto [i, j] = line(idx);
    return "X" + std::to_string(i + 1) + std::to_string(j + 1);
}

namespace {

void require_even(unsigned d) {
    if (d % 2) throw OddDimension("regularized propagators are implemented for even d only, got d = " + std::to_string(d));
    if (d <= 2) throw InvalidArgument("regularized propagators need d > 2");
}

struct RegTerm {
    Expr expr;        // without the mass factor
    unsigned p = 0;   // m^(2p)
    bool c_type = false;
};

std::vector<RegTerm> reg_terms(unsigned d, const std::string& zeta, const Group& g, const RegTruncation& t,
                               const std::string& label) {
    require_even(d);
    std::vector<RegTerm> out;
    for (unsigned l = 0; l < t.h_terms; ++l) {
        Exponent e = Exponent(Rational(static_cast<long>(l) + 1 - static_cast<long>(d / 2))) + Exponent::regulator(zeta);
        out.push_back({inv(g, e) * CoeffPoly::symbol("h" + std::to_string(l) + label), l, false});
    }
    for (unsigned l = 0; l < t.c_terms; ++l)
        out.push_back({inv(g, Exponent(static_cast<long>(l))) * CoeffPoly::symbol("c" + std::to_string(l) + label),
                       d / 2 - 1 + l, true});
    return out;
}

Exponent dot(const std::vector<unsigned>& n, const std::vector<std::string>& zetas) {
    Exponent e;
    for (std::size_t i = 0; i < n.size(); ++i)
        if (n[i]) e += Exponent::regulator(zetas.at(i), static_cast<long>(n[i]));
    return e;
}

} // namespace

Expr reg_propagator(unsigned d, const std::string& regulator, const Group& group, const RegTruncation& t,
                    const std::string& label) {
    Expr out;
    for (const auto& term : reg_terms(d, regulator, group, t, label)) {
        Exponent m(Rational(2L * term.p));
        if (term.c_type) m += Exponent::regulator(regulator, -2);
        out += multiply(mass(m), term.expr);
    }
    return out;
}

Exponent reg_propagator_degree(unsigned d, const std::string& regulator) {
    return Exponent(Rational(static_cast<long>(d) - 2)) + Exponent::regulator(regulator, -2);
}

std::string RegBinKey::to_string() const {
    auto join = [](const std::vector<unsigned>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    return std::to_string(p) + ":" + join(c) + ":" + join(h);
}

Exponent RegSmExpansion::bin_degree(const RegBinKey& k) const {
    return Exponent(Rational(degree - 2L * k.p)) - dot(k.h, regulators) * 2;
}

Exponent RegSmExpansion::bracket_degree(const RegBinKey& k) const {
    return Exponent(Rational(degree)) - (dot(k.h, regulators) + dot(k.c, regulators)) * 2;
}

Exponent RegSmExpansion::mass_exponent(const RegBinKey& k) const {
    return Exponent(Rational(2L * k.p)) - dot(k.c, regulators) * 2;
}

RegSmExpansion reg_product_sm(const std::vector<RegFactor>& factors, const LineIndexing& lines, unsigned d,
                              const RegTruncation& t, const MetricConvention& metric) {
    require_even(d);
    if (t.h_terms == 0) throw InvalidArgument("the truncation must keep the leading h term");
    RegSmExpansion r;
    r.d = d;
    r.lines = static_cast<unsigned>(factors.size());
    const unsigned slots = lines.slots();
    for (unsigned s = 0; s < slots; ++s) {
        r.regulators.push_back(lines.regulator(s));
        r.groups.push_back(lines.group(s));
    }
    r.degree = static_cast<long>(factors.size()) * (static_cast<long>(d) - 2);
    // the first omitted power of m^2 in any single factor
    r.complete_order = std::min(t.h_terms, d / 2 - 1 + t.c_terms) - 1;

    std::vector<std::pair<unsigned, std::vector<RegTerm>>> expanded;
    for (const auto& f : factors) {
        unsigned slot = lines.index(f.i, f.j);
        auto terms = reg_terms(d, r.regulators[slot], r.groups[slot], t, "_" + r.regulators[slot].substr(4));
        for (auto& term : terms)
            for (unsigned b = 0; b < f.boxes; ++b) term.expr = apply_box(r.groups[slot], term.expr, metric);
        r.degree += 2L * f.boxes;
        expanded.emplace_back(slot, std::move(terms));
    }

    RegBinKey key;
    key.c.assign(slots, 0);
    key.h.assign(slots, 0);
    auto rec = [&](auto&& self, std::size_t i, const Expr& acc) -> void {
        if (key.p > r.complete_order) return;
        if (i == expanded.size()) {
            Expr& bin = r.bins[key];
            bin += acc;
            if (bin.is_zero()) r.bins.erase(key);
            return;
        }
        const auto& [slot, terms] = expanded[i];
        for (const auto& term : terms) {
            auto& counter = term.c_type ? key.c[slot] : key.h[slot];
            ++counter;
            key.p += term.p;
            self(self, i + 1, multiply(acc, term.expr));
            key.p -= term.p;
            --counter;
        }
    };
    rec(rec, 0, Expr(1));

    std::set<Group> gs(r.groups.begin(), r.groups.end());
    for (const auto& [k, e] : r.bins) {
        RegBinKey rk{r.complete_order + 1, k.c, k.h};
        r.remainders[rk] = Remainder{"reg-product", Rational(r.degree), 2 * (r.complete_order + 1), gs, 0, 0};
    }
    return r;
}

RegSmExpansion reg_box(const RegSmExpansion& r, unsigned slot, const MetricConvention& metric) {
    RegSmExpansion out = r;
    out.degree += 2;
    out.bins.clear();
    for (const auto& [k, e] : r.bins) {
        Expr b = apply_box(r.groups.at(slot), e, metric);
        if (!b.is_zero()) out.bins[k] = b;
    }
    for (auto& [k, rem] : out.remainders) rem.degree += 2;
    return out;
}

Expr reg_project_coeff(const Expr& U, const std::vector<unsigned>& h0, const std::vector<std::vector<unsigned>>& candidates,
                       const Rational& D, unsigned p, const std::vector<std::string>& regulators) {
    std::vector<std::vector<unsigned>> hs = candidates;
    if (std::find(hs.begin(), hs.end(), h0) == hs.end()) hs.push_back(h0);
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = i + 1; j < hs.size(); ++j)
            if (dot(hs[i], regulators) == dot(hs[j], regulators))
                throw DegenerateRegulators("h.zeta coincides for two candidate bins");

    const Exponent z0 = dot(h0, regulators);
    Expr out = U;
    CoeffPoly denominator(1);
    for (const auto& h : hs) {
        if (h == h0) continue;
        const Exponent zh = dot(h, regulators);
        out = shifted_euler(out, Exponent(D - 2L * p) - zh * 2, false);
        denominator = denominator * ((z0 - zh) * 2).as_coeff();
    }
    return map_coefficients(out, [&](const CoeffPoly& c) {
        CoeffPoly q;
        if (!c.divide_exact(denominator, q))
            throw NotAlmostHomogeneous("input is not a sum of the candidate homogeneous components");
        return q;
    });
}

CheckReport reg_check(const RegSmExpansion& r) {
    CheckReport rep;
    bool a = true, b = true, c = true, dj = true;
    std::string da, db, dc, dd;
    for (const auto& [k, u] : r.bins) {
        const bool any_c = std::any_of(k.c.begin(), k.c.end(), [](unsigned n) { return n > 0; });
        const bool any_h = std::any_of(k.h.begin(), k.h.end(), [](unsigned n) { return n > 0; });
        if (k.p == 0 && any_c) {
            a = false;
            da += k.to_string() + " ";
        }
        if (!any_h)
            for (const auto& [t, coeff] : u.atoms()) {
                bool smooth = t.factors.empty();
                for (const auto& [g, pw] : t.mono.inv) smooth = smooth && pw.power.is_nonnegative_integer() && pw.log == 0;
                if (!smooth) {
                    b = false;
                    db += k.to_string() + " ";
                    break;
                }
            }
        if (!shifted_euler(u, r.bin_degree(k), false).is_zero()) {
            c = false;
            dc += k.to_string() + " ";
        }
        if (!shifted_euler(multiply(mass(r.mass_exponent(k)), u), r.bracket_degree(k), true).is_zero()) {
            dj = false;
            dd += k.to_string() + " ";
        }
    }
    rep.add("(A) no p = 0 bin with c != 0", a, da);
    rep.add("(B) h = 0 bins are smooth", b, db);
    rep.add("(C) bins homogeneous of degree D - 2p - 2 h.zeta", c, dc);
    rep.add("(D) brackets jointly homogeneous of degree D - 2 (h + c).zeta", dj, dd);
    bool e = true;
    for (const auto& [k, u] : r.bins) e = e && r.remainders.count(RegBinKey{r.complete_order + 1, k.c, k.h});
    rep.add("(E) remainder recorded at order P + 1 = " + std::to_string(r.complete_order + 1) + " for every bin", e);
    rep.add("(6') remainder sd bound D - 2(P+1) - 2 Re(h.zeta) = " +
                std::to_string(r.degree - 2L * (r.complete_order + 1)) + " - 2 Re(h.zeta)",
            true);
    return rep;
}

} // namespace smx
