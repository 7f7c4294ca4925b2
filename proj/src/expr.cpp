#include "smx/expr.hpp"

#include "smx/errors.hpp"
#include "smx/scaling.hpp"

#include <algorithm>
#include <sstream>

namespace smx {

namespace {

template <class T>
int three_way(const T& a, const T& b) {
    return (b < a) - (a < b);
}

int compare_zeta(const std::map<std::string, long>& a, const std::map<std::string, long>& b) {
    auto ia = a.begin(), ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (int c = ia->first.compare(ib->first)) return (c > 0) - (c < 0);
        if (int c = three_way(ia->second, ib->second)) return c;
    }
    return three_way(a.size(), b.size());
}

template <class Set>
int compare_sets(const Set& a, const Set& b) {
    auto ia = a.begin(), ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib)
        if (int c = three_way(*ia, *ib)) return c;
    return three_way(a.size(), b.size());
}

int compare_ptr(const TermPtr& a, const TermPtr& b) { return compare(*a, *b); }

std::set<Group> factor_groups(const Factor& f);

std::set<Group> term_groups(const Term& t) {
    std::set<Group> out;
    for (const auto& [g, p] : t.mono.inv) out.insert(g);
    for (const auto& f : t.factors) {
        auto fg = factor_groups(f);
        out.insert(fg.begin(), fg.end());
    }
    return out;
}

std::set<Group> factor_groups(const Factor& f) {
    return std::visit(
        [](const auto& x) -> std::set<Group> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Overline> || std::is_same_v<T, MomentDiv>) {
                return term_groups(*x.inner);
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                auto g = term_groups(*x.inner);
                g.insert(x.group);
                return g;
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                return x.support;
            } else {
                return x.groups;
            }
        },
        f);
}

bool overlaps(const std::set<Group>& a, const std::set<Group>& b) {
    for (const auto& g : a)
        if (b.count(g)) return true;
    return false;
}

void sort_factors(std::vector<Factor>& fs) {
    std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) { return compare(a, b) < 0; });
}

Term term_product(const Term& a, const Term& b) {
    Term t = a;
    t.mono *= b.mono;
    t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
    sort_factors(t.factors);
    return t;
}

// Product without the coincident-singularity check; used where the structure
// of an existing atom is rebuilt.
Expr product_unchecked(const Expr& a, const Expr& b) {
    Expr out;
    for (const auto& [ta, ca] : a.atoms())
        for (const auto& [tb, cb] : b.atoms()) out.add(term_product(ta, tb), ca * cb);
    return out;
}

Expr times_term(const Expr& e, const Term& t) {
    Expr out;
    for (const auto& [te, c] : e.atoms()) out.add(term_product(te, t), c);
    return out;
}

// Splits off the x-independent part (mass factors) of a term.
std::pair<Monomial, Term> split_mass(const Term& t) {
    Monomial m;
    m.mass_power = t.mono.mass_power;
    m.log_m_power = t.mono.log_m_power;
    Term rest = t;
    rest.mono.mass_power = Exponent{};
    rest.mono.log_m_power = 0;
    return {m, rest};
}

// Wraps every atom of `inner` into a structural factor built by `make`,
// lifting coefficients and mass factors out of the node.
template <class Make>
Expr wrap_each(const Expr& inner, Make&& make) {
    Expr out;
    for (const auto& [t, c] : inner.atoms()) {
        auto [m, rest] = split_mass(t);
        Term outer;
        outer.mono = m;
        outer.factors.push_back(make(std::make_shared<const Term>(std::move(rest))));
        out.add(outer, c);
    }
    return out;
}

Expr wrap_overline(const Expr& inner, unsigned k, unsigned zm) {
    return wrap_each(inner, [&](TermPtr p) -> Factor { return Overline{k, zm, std::move(p)}; });
}
Expr wrap_box(const Group& g, const Expr& inner) {
    return wrap_each(inner, [&](TermPtr p) -> Factor { return BoxOp{g, std::move(p)}; });
}
Expr wrap_moment(unsigned l, const Expr& inner) {
    return wrap_each(inner, [&](TermPtr p) -> Factor { return MomentDiv{l, std::move(p)}; });
}

Expr term_expr(const Term& t) { return Expr::atom(CoeffPoly(1), t); }


std::string power_suffix(unsigned p) { return p == 1 ? "" : "^" + std::to_string(p); }

} // namespace

// ---- Exponent ---------------------------------------------------------------

Exponent Exponent::regulator(const std::string& sym, long n) {
    Exponent e;
    if (n != 0) e.zeta[sym] = n;
    return e;
}

CoeffPoly Exponent::as_coeff() const {
    CoeffPoly c(rat);
    for (const auto& [s, n] : zeta) c += CoeffPoly::symbol(s) * CoeffPoly(n);
    return c;
}

Exponent& Exponent::operator+=(const Exponent& o) {
    rat += o.rat;
    for (const auto& [s, n] : o.zeta) {
        long v = (zeta[s] += n);
        if (v == 0) zeta.erase(s);
    }
    return *this;
}

Exponent& Exponent::operator-=(const Exponent& o) { return *this += -Exponent(o); }

Exponent& Exponent::operator*=(long n) {
    rat *= n;
    if (n == 0) zeta.clear();
    for (auto& [s, v] : zeta) v *= n;
    return *this;
}

std::string Exponent::to_string() const {
    if (zeta.empty()) return smx::to_string(rat);
    std::string s = rat == 0 ? "" : smx::to_string(rat);
    for (const auto& [sym, n] : zeta) {
        if (!s.empty()) s += n < 0 ? "-" : "+";
        else if (n < 0) s += "-";
        long a = n < 0 ? -n : n;
        s += (a == 1 ? "" : std::to_string(a) + "*") + sym;
    }
    return s;
}

int compare(const Exponent& a, const Exponent& b) {
    if (int c = compare(a.rat, b.rat)) return c;
    return compare_zeta(a.zeta, b.zeta);
}

// ---- Monomial ---------------------------------------------------------------

Monomial& Monomial::operator*=(const Monomial& o) {
    mass_power += o.mass_power;
    log_m_power += o.log_m_power;
    for (const auto& [g, p] : o.inv) {
        auto& mine = inv[g];
        mine.power += p.power;
        mine.log += p.log;
        if (mine.power.is_zero() && mine.log == 0) inv.erase(g);
    }
    return *this;
}

std::set<Group> Monomial::singular_groups() const {
    std::set<Group> out;
    for (const auto& [g, p] : inv)
        if (p.log > 0 || !p.power.is_nonnegative_integer()) out.insert(g);
    return out;
}

int compare(const Monomial& a, const Monomial& b) {
    if (int c = compare(a.mass_power, b.mass_power)) return c;
    if (int c = three_way(a.log_m_power, b.log_m_power)) return c;
    auto ia = a.inv.begin(), ib = b.inv.begin();
    for (; ia != a.inv.end() && ib != b.inv.end(); ++ia, ++ib) {
        if (int c = ia->first.compare(ib->first)) return (c > 0) - (c < 0);
        if (int c = compare(ia->second.power, ib->second.power)) return c;
        if (int c = three_way(ia->second.log, ib->second.log)) return c;
    }
    return three_way(a.inv.size(), b.inv.size());
}

// ---- DiffOp / DeltaCT -------------------------------------------------------

DiffOp DiffOp::dot(Group g1, Group g2) {
    if (g2 < g1) std::swap(g1, g2);
    return {Kind::dot, std::move(g1), std::move(g2), {}};
}

unsigned DiffOp::order() const {
    switch (kind) {
    case Kind::box:
    case Kind::dot: return 2;
    case Kind::partial: {
        unsigned n = 0;
        for (unsigned b : multi_index) n += b;
        return n;
    }
    }
    return 0;
}

std::string DiffOp::to_string() const {
    switch (kind) {
    case Kind::box: return "Box_" + a;
    case Kind::dot: return "d_" + a + ".d_" + b;
    case Kind::partial: {
        std::string s = "d^(";
        for (std::size_t i = 0; i < multi_index.size(); ++i)
            s += (i ? "," : "") + std::to_string(multi_index[i]);
        return s + ")";
    }
    }
    return {};
}

int compare(const DiffOp& x, const DiffOp& y) {
    if (int c = three_way(static_cast<int>(x.kind), static_cast<int>(y.kind))) return c;
    if (int c = x.a.compare(y.a)) return (c > 0) - (c < 0);
    if (int c = x.b.compare(y.b)) return (c > 0) - (c < 0);
    return compare_sets(x.multi_index, y.multi_index);
}

unsigned DeltaCT::order() const {
    unsigned n = 0;
    for (const auto& op : ops) n += op.order();
    return n;
}

// ---- Term / Factor ordering ------------------------------------------------

int compare(const Factor& a, const Factor& b) {
    if (int c = three_way(a.index(), b.index())) return c;
    return std::visit(
        [&](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b);
            if constexpr (std::is_same_v<T, Overline>) {
                if (int c = three_way(x.k, y.k)) return c;
                if (int c = three_way(x.z_moments, y.z_moments)) return c;
                return compare_ptr(x.inner, y.inner);
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                if (int c = x.group.compare(y.group)) return (c > 0) - (c < 0);
                return compare_ptr(x.inner, y.inner);
            } else if constexpr (std::is_same_v<T, MomentDiv>) {
                if (int c = three_way(x.l, y.l)) return c;
                return compare_ptr(x.inner, y.inner);
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                if (int c = three_way(x.dim, y.dim)) return c;
                if (int c = compare_sets(x.support, y.support)) return c;
                auto ia = x.ops.begin(), ib = y.ops.begin();
                for (; ia != x.ops.end() && ib != y.ops.end(); ++ia, ++ib)
                    if (int c = compare(*ia, *ib)) return c;
                return three_way(x.ops.size(), y.ops.size());
            } else {
                if (int c = x.tag.compare(y.tag)) return (c > 0) - (c < 0);
                if (int c = compare(x.degree, y.degree)) return c;
                if (int c = three_way(x.order, y.order)) return c;
                if (int c = compare_sets(x.groups, y.groups)) return c;
                if (int c = three_way(x.euler_applications, y.euler_applications)) return c;
                return three_way(x.mass_euler_applications, y.mass_euler_applications);
            }
        },
        a);
}

int compare(const Term& a, const Term& b) {
    if (int c = compare(a.mono, b.mono)) return c;
    auto ia = a.factors.begin(), ib = b.factors.begin();
    for (; ia != a.factors.end() && ib != b.factors.end(); ++ia, ++ib)
        if (int c = compare(*ia, *ib)) return c;
    return three_way(a.factors.size(), b.factors.size());
}

std::set<Group> Term::groups() const { return term_groups(*this); }

// ---- Expr -------------------------------------------------------------------

Expr::Expr(const CoeffPoly& c) {
    if (!c.is_zero()) atoms_.emplace(Term{}, c);
}

Expr Expr::atom(const CoeffPoly& c, Term t) {
    sort_factors(t.factors);
    Expr e;
    e.add(t, c);
    return e;
}

Expr Expr::symbol(const std::string& name, unsigned power) { return Expr(CoeffPoly::symbol(name, power)); }

void Expr::add(const Term& t, const CoeffPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = atoms_.try_emplace(t, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) atoms_.erase(it);
    }
}

Expr& Expr::operator+=(const Expr& o) {
    for (const auto& [t, c] : o.atoms_) add(t, c);
    return *this;
}

Expr& Expr::operator-=(const Expr& o) {
    for (const auto& [t, c] : o.atoms_) add(t, -c);
    return *this;
}

Expr& Expr::operator*=(const CoeffPoly& c) {
    if (c.is_zero()) {
        atoms_.clear();
        return *this;
    }
    for (auto it = atoms_.begin(); it != atoms_.end();) {
        it->second *= c;
        if (it->second.is_zero()) it = atoms_.erase(it);
        else ++it;
    }
    return *this;
}

Expr operator*(const Expr& a, const Expr& b) { return multiply(a, b); }

bool operator==(const Expr& a, const Expr& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    auto ia = a.atoms_.begin();
    for (auto ib = b.atoms_.begin(); ib != b.atoms_.end(); ++ia, ++ib)
        if (compare(ia->first, ib->first) != 0 || !(ia->second == ib->second)) return false;
    return true;
}

std::set<Group> Expr::groups() const {
    std::set<Group> out;
    for (const auto& [t, c] : atoms_) {
        auto g = t.groups();
        out.insert(g.begin(), g.end());
    }
    return out;
}

bool Expr::has_factors() const {
    for (const auto& [t, c] : atoms_)
        if (!t.factors.empty()) return true;
    return false;
}

std::string to_string(const Term& t) {
    std::vector<std::string> parts;
    const auto& m = t.mono;
    if (!m.mass_power.is_zero()) {
        auto s = m.mass_power.to_string();
        parts.push_back(s == "1" ? "m" : (m.mass_power.zeta.empty() ? "m^" + s : "m^(" + s + ")"));
    }
    if (m.log_m_power) parts.push_back("log(m/M)" + power_suffix(m.log_m_power));
    for (const auto& [g, p] : m.inv) {
        if (!p.power.is_zero()) {
            auto s = p.power.to_string();
            parts.push_back(g + (s == "1" ? "" : (p.power.zeta.empty() ? "^" + s : "^(" + s + ")")));
        }
        if (p.log) parts.push_back("L_" + g + power_suffix(p.log));
    }
    for (const auto& f : t.factors) {
        parts.push_back(std::visit(
            [](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Overline>) {
                    std::string z = x.z_moments ? ",z^" + std::to_string(x.z_moments) : "";
                    return "Overline" + std::to_string(x.k) + z + "[" + to_string(*x.inner) + "]";
                } else if constexpr (std::is_same_v<T, BoxOp>) {
                    return "Box_" + x.group + "[" + to_string(*x.inner) + "]";
                } else if constexpr (std::is_same_v<T, MomentDiv>) {
                    return "MomentDiv" + std::to_string(x.l) + "[" + to_string(*x.inner) + "]";
                } else if constexpr (std::is_same_v<T, DeltaCT>) {
                    std::string s;
                    for (const auto& op : x.ops) s += op.to_string() + " ";
                    s += "delta" + std::to_string(x.dim) + "(";
                    bool first = true;
                    for (const auto& g : x.support) {
                        s += (first ? "" : ",") + g;
                        first = false;
                    }
                    return s + ")";
                } else {
                    std::string s = "R[" + x.tag + ";D=" + smx::to_string(x.degree) +
                                    ";order=" + std::to_string(x.order);
                    if (x.euler_applications) s += ";E^" + std::to_string(x.euler_applications);
                    if (x.mass_euler_applications) s += ";mdm^" + std::to_string(x.mass_euler_applications);
                    return s + "]";
                }
            },
            f));
    }
    if (parts.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "*" : "") + parts[i];
    return s;
}

std::string Expr::to_string() const {
    if (atoms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [t, c] : atoms_) {
        std::string cs = c.to_string();
        bool compound = c.terms().size() > 1;
        std::string ts = smx::to_string(t);
        std::string piece;
        if (ts == "1") piece = cs;
        else if (cs == "1") piece = ts;
        else if (cs == "-1") piece = "-" + ts;
        else piece = (compound ? "(" + cs + ")" : cs) + "*" + ts;
        if (!first) s += piece[0] == '-' ? " - " + piece.substr(1) : " + " + piece;
        else s += piece;
        first = false;
    }
    return s;
}

// ---- builders ---------------------------------------------------------------

Expr inv(const Group& g, const Exponent& power, unsigned log) {
    Term t;
    if (!power.is_zero() || log) t.mono.inv[g] = InvPower{power, log};
    return term_expr(t);
}

Expr log_inv(const Group& g, unsigned q) { return inv(g, Exponent{}, q); }

Expr mass(const Exponent& l, unsigned p) {
    Term t;
    t.mono.mass_power = l;
    t.mono.log_m_power = p;
    return term_expr(t);
}

Expr overline(const Expr& e, unsigned k, unsigned z_moments) {
    auto sd = scaling_degree(e, k);
    if (!sd.minus_infinity && sd.real_part() - z_moments >= k)
        throw DivergentDirect("direct extension needs sd < " + std::to_string(k) + ", got sd = " +
                              smx::to_string(sd.real_part() - Rational(z_moments)) + " for " + e.to_string());
    for (const auto& [t, c] : e.atoms())
        for (const auto& f : t.factors)
            if (const auto* d = std::get_if<DeltaCT>(&f); d && d->dim >= k)
                throw InvalidArgument("delta at the origin inside a direct extension");
    return wrap_overline(e, k, z_moments);
}

Expr moment_div(unsigned l, const Expr& e) { return wrap_moment(l, e); }

Expr moment_extension(unsigned l, const Expr& e, unsigned k) { return wrap_moment(l, overline(e, k, l)); }

Expr box_formal(const Group& g, const Expr& e) { return wrap_box(g, e); }

Expr delta(std::set<Group> support, unsigned dim, std::vector<DiffOp> ops) {
    std::sort(ops.begin(), ops.end(), [](const DiffOp& a, const DiffOp& b) { return compare(a, b) < 0; });
    return factor_expr(DeltaCT{std::move(support), dim, std::move(ops)});
}

Expr remainder(const std::string& tag, const Rational& degree, unsigned order, std::set<Group> groups) {
    return factor_expr(Remainder{tag, degree, order, std::move(groups), 0, 0});
}

// ---- products ---------------------------------------------------------------

namespace {

void check_product(const Term& a, const Term& b) {
    auto check_side = [](const Term& x, const Term& y) {
        auto sing = y.mono.singular_groups();
        for (const auto& f : x.factors) {
            auto fg = factor_groups(f);
            if (overlaps(fg, sing)) {
                bool is_delta = std::holds_alternative<DeltaCT>(f);
                throw IllDefinedProduct(std::string(is_delta ? "delta counterterm" : "extended distribution") +
                                        " multiplies a singular factor at the same point: " + to_string(x) +
                                        " * " + to_string(y));
            }
            for (const auto& g : y.factors)
                if (overlaps(fg, factor_groups(g)))
                    throw IllDefinedProduct("product of two singular distributions at the same point: " +
                                            to_string(x) + " * " + to_string(y));
        }
    };
    check_side(a, b);
    auto sing = a.mono.singular_groups();
    for (const auto& f : b.factors)
        if (overlaps(factor_groups(f), sing))
            throw IllDefinedProduct("singular factor multiplies a distribution at the same point: " + to_string(a) +
                                    " * " + to_string(b));
}

} // namespace

Expr multiply(const Expr& a, const Expr& b) {
    Expr out;
    for (const auto& [ta, ca] : a.atoms())
        for (const auto& [tb, cb] : b.atoms()) {
            check_product(ta, tb);
            out.add(term_product(ta, tb), ca * cb);
        }
    return out;
}

Expr multiply_trusted(const Expr& a, const Expr& b) { return product_unchecked(a, b); }

Expr factor_expr(const Factor& f) {
    Term t;
    t.factors.push_back(f);
    return Expr::atom(CoeffPoly(1), t);
}

Expr rewrap(const Factor& node, const Expr& inner) {
    if (const auto* o = std::get_if<Overline>(&node)) return wrap_overline(inner, o->k, o->z_moments);
    if (const auto* b = std::get_if<BoxOp>(&node)) return wrap_box(b->group, inner);
    if (const auto* m = std::get_if<MomentDiv>(&node)) return wrap_moment(m->l, inner);
    return factor_expr(node);
}

Expr power(const Expr& e, unsigned n) {
    Expr r(1);
    for (unsigned i = 0; i < n; ++i) r = multiply(r, e);
    return r;
}

// ---- box --------------------------------------------------------------------

namespace {

// box (X^b L^q) = 2s X^(b-1) [ b(d+2b-2) L^q + q(d+4b-2) L^(q-1) + 2q(q-1) L^(q-2) ]
Expr box_power(const Group& g, const InvPower& p, const MetricConvention& metric) {
    if (p.power.is_zero() && p.log == 0) return {};
    const CoeffPoly b = p.power.as_coeff();
    const CoeffPoly d(static_cast<long>(metric.d));
    const CoeffPoly two_s(2L * metric.sign);
    const unsigned q = p.log;
    const Exponent lowered = p.power - Exponent(1);
    Expr out;
    out += inv(g, lowered, q) * (two_s * b * (d + CoeffPoly(2) * b - CoeffPoly(2)));
    if (q >= 1)
        out += inv(g, lowered, q - 1) * (two_s * CoeffPoly(static_cast<long>(q)) * (d + CoeffPoly(4) * b - CoeffPoly(2)));
    if (q >= 2) out += inv(g, lowered, q - 2) * (two_s * CoeffPoly(2L * q * (q - 1)));
    return out;
}

} // namespace

Expr apply_box(const Group& g, const Expr& e, const MetricConvention& metric) {
    Expr out;
    for (const auto& [t, c] : e.atoms()) {
        Term rest = t;
        InvPower own;
        if (auto it = rest.mono.inv.find(g); it != rest.mono.inv.end()) {
            own = it->second;
            rest.mono.inv.erase(it);
        }
        std::vector<Factor> touching;
        std::vector<Factor> others;
        for (const auto& f : t.factors) (factor_groups(f).count(g) ? touching : others).push_back(f);
        rest.factors = others;

        if (touching.empty()) {
            out += times_term(box_power(g, own, metric), rest) * c;
            continue;
        }
        if (touching.size() > 1 || !own.power.is_zero() || own.log)
            throw UnsupportedDerivative("box of a product involving an extended distribution in group " + g + ": " +
                                        to_string(t));
        const Factor& f = touching.front();
        Expr boxed;
        if (const auto* dl = std::get_if<DeltaCT>(&f)) {
            auto ops = dl->ops;
            ops.push_back(DiffOp::box(g));
            boxed = delta(dl->support, dl->dim, ops);
        } else if (const auto* r = std::get_if<Remainder>(&f)) {
            Remainder r2 = *r;
            r2.degree += 2;
            boxed = factor_expr(r2);
        } else {
            Term inner;
            inner.factors.push_back(f);
            boxed = box_formal(g, term_expr(inner));
        }
        out += times_term(boxed, rest) * c;
    }
    return out;
}

// ---- Euler ------------------------------------------------------------------

namespace {

Expr euler_factor(const Factor& f, bool with_mass);

Expr euler_term(const Term& t, bool with_mass) {
    Expr out;
    // monomial part
    for (const auto& [g, p] : t.mono.inv) {
        out.add(t, CoeffPoly(2) * p.power.as_coeff());
        if (p.log) {
            Term lowered = t;
            auto& lp = lowered.mono.inv[g];
            --lp.log;
            if (lp.power.is_zero() && lp.log == 0) lowered.mono.inv.erase(g);
            out.add(lowered, CoeffPoly(2L * p.log));
        }
    }
    if (with_mass) {
        out.add(t, -t.mono.mass_power.as_coeff());
        if (t.mono.log_m_power) {
            Term lowered = t;
            --lowered.mono.log_m_power;
            out.add(lowered, CoeffPoly(-static_cast<long>(t.mono.log_m_power)));
        }
    }
    // structural factors, Leibniz rule
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
        Term rest = t;
        rest.factors.erase(rest.factors.begin() + static_cast<long>(i));
        out += times_term(euler_factor(t.factors[i], with_mass), rest);
    }
    return out;
}

Expr euler_factor(const Factor& f, bool with_mass) {
    return std::visit(
        [&](const auto& x) -> Expr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Overline>) {
                // E Overline(z^l f) = Overline(z^l (E + l) f)
                Expr inner = term_expr(*x.inner);
                Expr shifted = apply_euler(inner, with_mass) + inner * CoeffPoly(static_cast<long>(x.z_moments));
                return wrap_overline(shifted, x.k, x.z_moments);
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                Expr inner = term_expr(*x.inner);
                return wrap_box(x.group, apply_euler(inner, with_mass) - inner * CoeffPoly(2));
            } else if constexpr (std::is_same_v<T, MomentDiv>) {
                Expr inner = term_expr(*x.inner);
                return wrap_moment(x.l, apply_euler(inner, with_mass) - inner * CoeffPoly(static_cast<long>(x.l)));
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                return factor_expr(x) * CoeffPoly(-static_cast<long>(x.dim + x.order()));
            } else {
                Remainder r = x;
                ++r.euler_applications;
                if (with_mass) ++r.mass_euler_applications;
                return factor_expr(r);
            }
        },
        f);
}

} // namespace

Expr apply_euler(const Expr& e, bool with_mass) {
    Expr out;
    for (const auto& [t, c] : e.atoms()) out += euler_term(t, with_mass) * c;
    return out;
}

Expr moment_div_reduce(unsigned l, const Expr& e, unsigned k) {
    Expr r = e;
    for (unsigned j = 0; j < l; ++j) r = r * CoeffPoly(static_cast<long>(k + j)) + apply_euler(r, false);
    return r;
}

// ---- mass dimension ---------------------------------------------------------

Rational mass_dimension(const Term& t) {
    Rational dim = t.mono.mass_power.rat;
    for (const auto& [g, p] : t.mono.inv) dim -= 2 * p.power.rat;
    for (const auto& f : t.factors) {
        dim += std::visit(
            [](const auto& x) -> Rational {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Overline>) return mass_dimension(*x.inner) - x.z_moments;
                else if constexpr (std::is_same_v<T, BoxOp>) return mass_dimension(*x.inner) + 2;
                else if constexpr (std::is_same_v<T, MomentDiv>) return mass_dimension(*x.inner) + x.l;
                else if constexpr (std::is_same_v<T, DeltaCT>) return Rational(x.dim + x.order());
                else return x.degree;
            },
            f);
    }
    return dim;
}

Rational mass_dimension(const Expr& e) {
    if (e.is_zero()) return Rational(0);
    const Term* first = nullptr;
    Rational dim;
    for (const auto& [t, c] : e.atoms()) {
        Rational d = mass_dimension(t);
        if (!first) {
            first = &t;
            dim = d;
        } else if (d != dim) {
            throw InhomogeneousDimension("terms of different mass dimension: " + to_string(*first) + " [" +
                                         to_string(dim) + "] and " + to_string(t) + " [" + to_string(d) + "]");
        }
    }
    return dim;
}

// ---- restriction ------------------------------------------------------------

namespace {

Expr restrict_factor(const Factor& f, unsigned k, const MetricConvention& metric) {
    return std::visit(
        [&](const auto& x) -> Expr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Overline>) {
                Expr r = restrict_away_from_origin(term_expr(*x.inner), k, metric);
                if (x.k != k) return wrap_overline(r, x.k, x.z_moments);
                if (x.z_moments)
                    throw InvalidArgument("z-moment extension outside a moment derivative");
                return r;
            } else if constexpr (std::is_same_v<T, MomentDiv>) {
                const Term& in = *x.inner;
                if (in.mono.is_one() && in.factors.size() == 1) {
                    if (const auto* ov = std::get_if<Overline>(&in.factors.front()); ov && ov->k == k) {
                        Expr r = restrict_away_from_origin(term_expr(*ov->inner), k, metric);
                        return moment_div_reduce(x.l, r, k);
                    }
                }
                return wrap_moment(x.l, restrict_away_from_origin(term_expr(in), k, metric));
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                Expr r = restrict_away_from_origin(term_expr(*x.inner), k, metric);
                for (const auto& [t, c] : r.atoms())
                    for (const auto& g : t.factors)
                        if (factor_groups(g).count(x.group)) return wrap_box(x.group, r);
                return apply_box(x.group, r, metric);
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                if (x.dim == k) return {};
                return factor_expr(x);
            } else {
                return factor_expr(x);
            }
        },
        f);
}

} // namespace

Expr restrict_away_from_origin(const Expr& e, unsigned k, const MetricConvention& metric) {
    Expr out;
    for (const auto& [t, c] : e.atoms()) {
        Term base;
        base.mono = t.mono;
        Expr acc = term_expr(base);
        for (const auto& f : t.factors) {
            acc = product_unchecked(acc, restrict_factor(f, k, metric));
            if (acc.is_zero()) break;
        }
        out += acc * c;
    }
    return out;
}

// ---- renaming / substitution -----------------------------------------------

namespace {

template <class TermFn>
Factor map_factor_inner(const Factor& f, TermFn&& fn) {
    return std::visit(
        [&](const auto& x) -> Factor {
            using T = std::decay_t<decltype(x)>;
            T y = x;
            if constexpr (std::is_same_v<T, Overline> || std::is_same_v<T, BoxOp> || std::is_same_v<T, MomentDiv>)
                y.inner = std::make_shared<const Term>(fn(*x.inner));
            return y;
        },
        f);
}

Term rename_term(const Term& t, const Group& from, const Group& to) {
    Term r;
    r.mono.mass_power = t.mono.mass_power;
    r.mono.log_m_power = t.mono.log_m_power;
    for (const auto& [g, p] : t.mono.inv) r.mono.inv[g == from ? to : g] = p;
    auto rn = [&](const Group& g) { return g == from ? to : g; };
    for (const auto& f : t.factors) {
        Factor nf = map_factor_inner(f, [&](const Term& in) { return rename_term(in, from, to); });
        if (auto* b = std::get_if<BoxOp>(&nf)) b->group = rn(b->group);
        if (auto* d = std::get_if<DeltaCT>(&nf)) {
            std::set<Group> s;
            for (const auto& g : d->support) s.insert(rn(g));
            d->support = s;
            for (auto& op : d->ops) {
                op.a = rn(op.a);
                op.b = rn(op.b);
                if (op.kind == DiffOp::Kind::dot && op.b < op.a) std::swap(op.a, op.b);
            }
            std::sort(d->ops.begin(), d->ops.end(), [](const DiffOp& a, const DiffOp& b) { return compare(a, b) < 0; });
        }
        if (auto* rm = std::get_if<Remainder>(&nf)) {
            std::set<Group> s;
            for (const auto& g : rm->groups) s.insert(rn(g));
            rm->groups = s;
        }
        r.factors.push_back(nf);
    }
    sort_factors(r.factors);
    return r;
}

} // namespace

Expr rename_group(const Expr& e, const Group& from, const Group& to) {
    Expr out;
    for (const auto& [t, c] : e.atoms()) out.add(rename_term(t, from, to), c);
    return out;
}

Expr substitute_symbol(const Expr& e, const std::string& sym, const CoeffPoly& value) {
    return map_coefficients(e, [&](const CoeffPoly& c) { return c.substitute(sym, value); });
}

} // namespace smx
