#include "smx/extension.hpp"

#include "smx/errors.hpp"

#include <algorithm>
#include <numeric>

namespace smx {

std::string to_string(ExtensionMethod m) {
    switch (m) {
    case ExtensionMethod::direct: return "direct";
    case ExtensionMethod::diffren: return "diffren";
    case ExtensionMethod::moment: return "moment";
    case ExtensionMethod::ms: return "MS";
    }
    return {};
}

Expr Counterterm::term() const { return pattern * CoeffPoly::symbol(constant); }

Expr ExtensionResult::with_counterterms() const {
    Expr e = extended;
    for (const auto& c : counterterms) e += c.term();
    return e;
}

namespace {

std::optional<HomogeneityReport> try_homogeneity(const Expr& e) {
    try {
        return homogeneity_analyze(e, false);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// ---- counterterm enumeration -------------------------------------------------

void multisets(std::size_t n_items, unsigned size, std::size_t start, std::vector<std::size_t>& cur,
               std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == size) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < n_items; ++i) {
        cur.push_back(i);
        multisets(n_items, size, i, cur, out);
        cur.pop_back();
    }
}

void compositions(unsigned total, std::size_t parts, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
    if (cur.size() + 1 == parts) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (unsigned v = total + 1; v-- > 0;) {
        cur.push_back(v);
        compositions(total - v, parts, cur, out);
        cur.pop_back();
    }
}

std::vector<DiffOp> sorted_ops(std::vector<DiffOp> ops) {
    std::sort(ops.begin(), ops.end(), [](const DiffOp& a, const DiffOp& b) { return compare(a, b) < 0; });
    return ops;
}

bool ops_less(const std::vector<DiffOp>& a, const std::vector<DiffOp>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const DiffOp& x, const DiffOp& y) { return compare(x, y) < 0; });
}

std::vector<DiffOp> permute_ops(const std::vector<DiffOp>& ops, const std::map<Group, Group>& perm) {
    std::vector<DiffOp> out;
    for (const auto& op : ops) {
        if (op.kind == DiffOp::Kind::box) out.push_back(DiffOp::box(perm.at(op.a)));
        else if (op.kind == DiffOp::Kind::dot) out.push_back(DiffOp::dot(perm.at(op.a), perm.at(op.b)));
        else out.push_back(op);
    }
    return sorted_ops(out);
}

} // namespace

std::vector<Counterterm> counterterm_operators(unsigned order, const CountertermSpec& spec) {
    std::vector<Counterterm> out;
    if (spec.groups.empty()) throw InvalidArgument("counterterm basis needs at least one variable group");
    std::set<Group> support(spec.groups.begin(), spec.groups.end());
    const unsigned dim = spec.d * static_cast<unsigned>(support.size());
    auto push = [&](Expr pattern) {
        Counterterm c;
        c.pattern = std::move(pattern);
        c.op_order = order;
        c.constant = spec.constant_prefix + std::to_string(out.size());
        out.push_back(std::move(c));
    };

    if (!spec.covariant) {
        std::vector<std::vector<unsigned>> betas;
        std::vector<unsigned> cur;
        compositions(order, dim, cur, betas);
        for (const auto& b : betas) push(delta(support, dim, order ? std::vector<DiffOp>{DiffOp::partial(b)} : std::vector<DiffOp>{}));
        return out;
    }
    if (order % 2) return out;

    std::vector<Group> gs(support.begin(), support.end());
    std::vector<DiffOp> invariants;
    for (const auto& g : gs) invariants.push_back(DiffOp::box(g));
    for (std::size_t i = 0; i < gs.size(); ++i)
        for (std::size_t j = i + 1; j < gs.size(); ++j) invariants.push_back(DiffOp::dot(gs[i], gs[j]));

    std::vector<std::vector<std::size_t>> choices;
    std::vector<std::size_t> cur;
    multisets(invariants.size(), order / 2, 0, cur, choices);

    std::vector<std::vector<Group>> perms;
    {
        std::vector<Group> p = gs;
        do perms.push_back(p);
        while (spec.symmetric && std::next_permutation(p.begin(), p.end()));
    }

    // orbit representative -> distinct images
    std::vector<std::pair<std::vector<DiffOp>, std::vector<std::vector<DiffOp>>>> orbits;
    for (const auto& ch : choices) {
        std::vector<DiffOp> ops;
        for (auto i : ch) ops.push_back(invariants[i]);
        ops = sorted_ops(ops);
        std::vector<std::vector<DiffOp>> images;
        for (const auto& p : perms) {
            std::map<Group, Group> perm;
            for (std::size_t i = 0; i < gs.size(); ++i) perm[gs[i]] = p[i];
            auto img = permute_ops(ops, perm);
            bool seen = false;
            for (const auto& x : images) seen = seen || (!ops_less(x, img) && !ops_less(img, x));
            if (!seen) images.push_back(img);
        }
        std::sort(images.begin(), images.end(), ops_less);
        bool known = false;
        for (const auto& o : orbits) known = known || (!ops_less(o.first, images.front()) && !ops_less(images.front(), o.first));
        if (!known) orbits.emplace_back(images.front(), images);
    }
    for (const auto& [rep, images] : orbits) {
        Expr pattern;
        for (const auto& img : images) pattern += delta(support, dim, img);
        push(pattern);
    }
    return out;
}

std::vector<Counterterm> counterterm_basis(long degree, const CountertermSpec& spec) {
    std::vector<Counterterm> out;
    const long k = static_cast<long>(spec.d * spec.groups.size());
    if (degree < k) return out;
    for (long l = 0; l <= degree - k; ++l) {
        auto ops = counterterm_operators(static_cast<unsigned>(degree - k - l), spec);
        unsigned pmax = l == 0 ? 0 : spec.max_log_power;
        for (unsigned p = 0; p <= pmax; ++p)
            for (const auto& op : ops) {
                Counterterm c = op;
                c.mass_power = static_cast<unsigned>(l);
                c.log_power = p;
                c.pattern = multiply(mass(l, p), op.pattern);
                out.push_back(std::move(c));
            }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].constant = spec.constant_prefix + std::to_string(i);
    return out;
}

// ---- direct extension -----------------------------------------------------------

ExtensionResult direct_extend(const Expr& e, unsigned k) {
    ExtensionResult r;
    r.method = ExtensionMethod::direct;
    r.extended = overline(e, k);
    r.input_homogeneity = try_homogeneity(e);
    r.output_homogeneity = try_homogeneity(r.extended);
    r.restriction_verified = restrict_away_from_origin(r.extended, k, MetricConvention{}) == e;
    return r;
}

// ---- differential renormalization -------------------------------------------------

namespace {

struct RadialLogPoly {
    long a = 0;                           // X^-a
    std::map<unsigned, CoeffPoly> coeff;  // log power -> coefficient
};

RadialLogPoly parse_radial(const Expr& u, const Group& g) {
    RadialLogPoly r;
    bool first = true;
    for (const auto& [t, c] : u.atoms()) {
        if (!t.factors.empty() || !t.mono.mass_power.is_zero() || t.mono.log_m_power)
            throw UnsupportedForm("differential renormalization needs a plain function of X: " + to_string(t));
        auto it = t.mono.inv.find(g);
        InvPower p = it == t.mono.inv.end() ? InvPower{} : it->second;
        if (p.power.has_regulator() || !is_integer(p.power.rat))
            throw UnsupportedForm("non-integer power of " + g + " in " + to_string(t));
        long a = -p.power.rat.get_num().get_si();
        if (first) r.a = a;
        else if (a != r.a) throw UnsupportedForm("mixed powers of " + g + " in " + u.to_string());
        first = false;
        r.coeff[p.log] += c;
    }
    return r;
}

// Finds g = X^(1-a) sum_q g_q L^q with box g = X^-a sum_q u_q L^q.
RadialLogPoly solve_box(const RadialLogPoly& u, const MetricConvention& metric) {
    const Rational two_s(2 * metric.sign);
    const Rational d(static_cast<long>(metric.d));
    const Rational b(1 - u.a);
    const Rational A = b * (d + 2 * b - 2);
    auto B = [&](unsigned q) -> Rational { return Rational(q) * (d + 4 * b - 2); };
    auto C = [&](unsigned q) -> Rational { return Rational(2L * q * (q - 1)); };
    const unsigned top = u.coeff.empty() ? 0 : u.coeff.rbegin()->first;

    auto uq = [&](unsigned q) {
        auto it = u.coeff.find(q);
        return it == u.coeff.end() ? CoeffPoly{} : it->second;
    };
    RadialLogPoly g;
    g.a = u.a - 1;
    auto gq = [&](unsigned q) {
        auto it = g.coeff.find(q);
        return it == g.coeff.end() ? CoeffPoly{} : it->second;
    };
    if (A != 0) {
        for (unsigned q = top + 1; q-- > 0;) {
            CoeffPoly rhs = uq(q) - CoeffPoly(two_s) * (CoeffPoly(B(q + 1)) * gq(q + 1) + CoeffPoly(C(q + 2)) * gq(q + 2));
            CoeffPoly v = rhs * CoeffPoly(Rational(1) / (two_s * A));
            if (!v.is_zero()) g.coeff[q] = v;
        }
    } else {
        // resonant: the log degree goes up by one, g_0 fixed to 0 (scale M)
        for (unsigned q = top + 1; q-- > 0;) {
            Rational bq = B(q + 1);
            if (bq == 0) throw UnsupportedForm("degenerate differential renormalization step");
            CoeffPoly rhs = uq(q) - CoeffPoly(two_s) * CoeffPoly(C(q + 2)) * gq(q + 2);
            CoeffPoly v = rhs * CoeffPoly(Rational(1) / (two_s * bq));
            if (!v.is_zero()) g.coeff[q + 1] = v;
        }
    }
    return g;
}

Expr radial_expr(const RadialLogPoly& r, const Group& g) {
    Expr e;
    for (const auto& [q, c] : r.coeff) e += inv(g, Exponent(-r.a), q) * c;
    return e;
}

} // namespace

ExtensionResult diff_renorm_extend(const Expr& u0, const MetricConvention& metric, const std::string& constant_prefix) {
    const unsigned k = metric.d;
    auto groups = u0.groups();
    if (groups.size() != 1) throw UnsupportedForm("differential renormalization needs a single variable group");
    const Group g = *groups.begin();
    auto sd = scaling_degree(u0, k);
    if (sd.minus_infinity || sd.real_part() < k) return direct_extend(u0, k);

    RadialLogPoly cur = parse_radial(u0, g);
    unsigned boxes = 0;
    while (2 * cur.a >= static_cast<long>(k)) {
        cur = solve_box(cur, metric);
        ++boxes;
    }
    ExtensionResult r;
    r.method = ExtensionMethod::diffren;
    r.extended = overline(radial_expr(cur, g), k);
    for (unsigned i = 0; i < boxes; ++i) r.extended = apply_box(g, r.extended, metric);

    long excess = 2 * parse_radial(u0, g).a - static_cast<long>(k);
    CountertermSpec spec;
    spec.groups = {g};
    spec.d = metric.d;
    spec.constant_prefix = constant_prefix;
    r.counterterms = counterterm_operators(static_cast<unsigned>(excess), spec);
    if (r.counterterms.size() == 1) r.counterterms.front().constant = constant_prefix;

    r.input_homogeneity = try_homogeneity(u0);
    r.output_homogeneity = try_homogeneity(r.with_counterterms());
    r.restriction_verified = restrict_away_from_origin(r.with_counterterms(), k, metric) == u0;
    return r;
}

// ---- moment solver -------------------------------------------------------------

namespace {

// Coefficients (in t) of prod_{j<l} (t + j - c - eta), truncated below t^N,
// each a polynomial in eta.
std::vector<UPoly> moment_row(unsigned l, unsigned N, const Rational& shift) {
    std::vector<UPoly> p(N, UPoly());
    p[0] = UPoly(1);
    for (unsigned j = 0; j < l; ++j) {
        UPoly alpha(std::vector<Rational>{Rational(j) - shift, Rational(-1)});
        std::vector<UPoly> next(N, UPoly());
        for (unsigned i = 0; i < N; ++i) {
            next[i] += p[i] * alpha;
            if (i + 1 < N) next[i + 1] += p[i];
        }
        p = std::move(next);
    }
    return p;
}

template <class Field, class IsZero>
std::vector<Field> gauss_solve(std::vector<std::vector<Field>> A, std::vector<Field> b, IsZero is_zero) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && is_zero(A[piv][col])) ++piv;
        if (piv == n) throw ResonantDegree("moment system is singular");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || is_zero(A[r][col])) continue;
            Field f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] = A[r][c] - f * A[col][c];
            b[r] = b[r] - f * b[col];
        }
    }
    std::vector<Field> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return x;
}

} // namespace

std::map<unsigned, RatFunc> moment_solver(unsigned N, unsigned l_min, const Rational& shift) {
    if (N == 0) throw InvalidArgument("annihilator order must be positive");
    std::vector<std::vector<RatFunc>> A(N, std::vector<RatFunc>(N));
    for (unsigned col = 0; col < N; ++col) {
        auto row = moment_row(l_min + col, N, shift);
        for (unsigned i = 0; i < N; ++i) A[i][col] = RatFunc(row[i]);
    }
    std::vector<RatFunc> b(N, RatFunc(0));
    b[0] = RatFunc(1);
    auto x = gauss_solve(A, b, [](const RatFunc& f) { return f.is_zero(); });
    std::map<unsigned, RatFunc> out;
    for (unsigned i = 0; i < N; ++i) out[l_min + i] = x[i];
    return out;
}

std::map<unsigned, Rational> moment_solver_at(unsigned N, unsigned l_min, const Rational& shift, const Rational& eta) {
    if (N == 0) throw InvalidArgument("annihilator order must be positive");
    std::vector<std::vector<Rational>> A(N, std::vector<Rational>(N));
    for (unsigned col = 0; col < N; ++col) {
        auto row = moment_row(l_min + col, N, shift);
        for (unsigned i = 0; i < N; ++i) A[i][col] = row[i].evaluate(eta);
    }
    std::vector<Rational> b(N, Rational(0));
    b[0] = 1;
    std::vector<Rational> x;
    try {
        x = gauss_solve(A, b, [](const Rational& q) { return q == 0; });
    } catch (const ResonantDegree&) {
        throw ResonantDegree("resonant degree: eta = " + to_string(eta) + " makes the moment system singular");
    }
    std::map<unsigned, Rational> out;
    for (unsigned i = 0; i < N; ++i) out[l_min + i] = x[i];
    return out;
}

bool moment_certificate(const std::map<unsigned, RatFunc>& c, unsigned N, const Rational& shift) {
    using BPoly = std::vector<RatFunc>;   // coefficients in B, low to high
    auto mul = [](const BPoly& a, const BPoly& b) {
        BPoly r(a.size() + b.size() - 1, RatFunc(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
        return r;
    };
    auto add = [](BPoly a, const BPoly& b) {
        if (b.size() > a.size()) a.resize(b.size(), RatFunc(0));
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
        return a;
    };
    BPoly sum{RatFunc(-1)};
    for (const auto& [l, cl] : c) {
        BPoly p{RatFunc(1)};
        for (unsigned j = 0; j < l; ++j) p = mul(p, BPoly{RatFunc(static_cast<long>(j)), RatFunc(1)});
        for (auto& x : p) x = x * cl;
        sum = add(sum, p);
    }
    BPoly divisor{RatFunc(1)};
    RatFunc root = RatFunc(UPoly(std::vector<Rational>{shift, Rational(1)}));   // c + eta
    for (unsigned i = 0; i < N; ++i) divisor = mul(divisor, BPoly{root, RatFunc(1)});
    // long division by the monic divisor
    while (sum.size() >= divisor.size()) {
        RatFunc lead = sum.back();
        std::size_t shiftB = sum.size() - divisor.size();
        for (std::size_t i = 0; i < divisor.size(); ++i) sum[shiftB + i] = sum[shiftB + i] - lead * divisor[i];
        sum.pop_back();
    }
    return std::all_of(sum.begin(), sum.end(), [](const RatFunc& f) { return f.is_zero(); });
}

// ---- analytic regularization --------------------------------------------------

ExtensionResult regularized_extend(const Expr& v0, unsigned k, const RegulatorSpec& reg, const MetricConvention& metric) {
    auto sd0 = scaling_degree(v0, k);
    if (sd0.minus_infinity || sd0.real_part() < k) return direct_extend(v0, k);

    std::vector<Group> groups = reg.groups;
    if (groups.empty()) {
        auto gs = v0.groups();
        groups.assign(gs.begin(), gs.end());
    }
    Expr factor(1);
    for (const auto& g : groups) factor = multiply_trusted(factor, inv(g, Exponent::regulator(reg.symbol)));
    Expr vz = multiply_trusted(v0, factor);

    auto h = homogeneity_analyze(vz, false);
    if (h.degree.zeta.size() != 1 || !h.degree.zeta.count(reg.symbol))
        throw DegenerateRegulators("regulator does not move the degree of " + v0.to_string());
    MomentData md;
    md.regulator = reg.symbol;
    md.eta_per_regulator = Rational(h.degree.zeta.at(reg.symbol));
    md.annihilator_order = h.annihilator_order;
    md.shift = h.degree.rat - static_cast<long>(k);
    Rational excess = sd0.real_part() - static_cast<long>(k);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), excess.get_num_mpz_t(), excess.get_den_mpz_t());
    md.l_min = static_cast<unsigned>(fl.get_si() + 1);
    md.coefficients = moment_solver(md.annihilator_order, md.l_min, md.shift);
    md.regularized = vz;
    md.regulated_groups = groups;

    // common denominator Q(eta): lcm of the denominators
    UPoly common(1);
    for (const auto& [l, c] : md.coefficients) {
        UPoly q, r;
        (common * c.den()).divmod(gcd(common, c.den()), q, r);
        common = q.monic();
    }

    ExtensionResult res;
    res.method = ExtensionMethod::moment;
    for (const auto& [l, c] : md.coefficients) {
        RatFunc scaled = c * RatFunc(common);
        if (!(scaled.den() == UPoly(1))) throw InvalidArgument("internal: denominator not cleared");
        CoeffPoly coeff = scaled.num().scaled(md.eta_per_regulator).to_coeff(reg.symbol);
        res.extended += moment_extension(l, vz, k) * coeff;
    }
    res.prefactor = RatFunc(UPoly(1), common.scaled(md.eta_per_regulator));
    res.input_homogeneity = try_homogeneity(v0);
    res.output_homogeneity = try_homogeneity(res.extended);
    CoeffPoly q = common.scaled(md.eta_per_regulator).to_coeff(reg.symbol);
    res.restriction_verified = restrict_away_from_origin(res.extended, k, metric) == vz * q;
    res.moment = std::move(md);
    return res;
}

// ---- Laurent series --------------------------------------------------------------

Expr LaurentSeries::coefficient(int n) const {
    if (n > truncation)
        throw TruncationTooSmall("coefficient of " + regulator + "^" + std::to_string(n) + " requested, series known up to " +
                                 std::to_string(truncation));
    auto it = coefficients.find(n);
    return it == coefficients.end() ? Expr{} : it->second;
}

int LaurentSeries::min_exponent() const { return coefficients.empty() ? 0 : coefficients.begin()->first; }

unsigned LaurentSeries::pole_order() const {
    int m = min_exponent();
    return m < 0 ? static_cast<unsigned>(-m) : 0u;
}

LaurentSeries LaurentSeries::principal_part() const {
    LaurentSeries p;
    p.regulator = regulator;
    p.truncation = truncation;
    for (const auto& [n, e] : coefficients)
        if (n < 0) p.coefficients[n] = e;
    return p;
}

namespace {

using Series = std::vector<Expr>;

Series series_mul(const Series& a, const Series& b, unsigned order) {
    Series r(order + 1);
    for (unsigned i = 0; i <= order && i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (unsigned j = 0; i + j <= order && j < b.size(); ++j)
            if (!b[j].is_zero()) r[i + j] += multiply_trusted(a[i], b[j]);
    }
    return r;
}

// sum_j (n zeta log)^j / j!, with log^j supplied by `log_power`.
Series exp_series(long n, unsigned order, const std::function<Expr(unsigned)>& log_power) {
    Series s(order + 1);
    Rational coef(1);
    for (unsigned j = 0; j <= order; ++j) {
        s[j] = log_power(j) * CoeffPoly(coef);
        coef = coef * n / (j + 1);
    }
    return s;
}

Series term_series(const Term& t, const std::string& sym, unsigned order) {
    Term base;
    base.mono = t.mono;
    std::vector<std::pair<Group, long>> regulated;
    for (auto& [g, p] : base.mono.inv) {
        auto it = p.power.zeta.find(sym);
        if (it != p.power.zeta.end()) {
            regulated.emplace_back(g, it->second);
            p.power.zeta.erase(it);
        }
    }
    for (auto it = base.mono.inv.begin(); it != base.mono.inv.end();)
        it = (it->second.power.is_zero() && it->second.log == 0) ? base.mono.inv.erase(it) : std::next(it);
    long mass_n = 0;
    if (auto it = base.mono.mass_power.zeta.find(sym); it != base.mono.mass_power.zeta.end()) {
        mass_n = it->second;
        base.mono.mass_power.zeta.erase(it);
    }
    Series r(order + 1);
    r[0] = Expr::atom(CoeffPoly(1), base);
    for (const auto& [g, n] : regulated)
        r = series_mul(r, exp_series(n, order, [&, g = g](unsigned j) { return log_inv(g, j); }), order);
    if (mass_n) r = series_mul(r, exp_series(mass_n, order, [](unsigned j) { return mass(0, j); }), order);
    for (const auto& f : t.factors) {
        Series fs(order + 1);
        bool wraps = std::holds_alternative<Overline>(f) || std::holds_alternative<BoxOp>(f) ||
                     std::holds_alternative<MomentDiv>(f);
        if (wraps) {
            const TermPtr& inner = std::visit(
                [](const auto& x) -> const TermPtr& {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, Overline> || std::is_same_v<T, BoxOp> || std::is_same_v<T, MomentDiv>)
                        return x.inner;
                    else throw InvalidArgument("internal: not a wrapping node");
                },
                f);
            Series in = term_series(*inner, sym, order);
            for (unsigned j = 0; j <= order; ++j)
                if (!in[j].is_zero()) fs[j] = rewrap(f, in[j]);
        } else {
            fs[0] = factor_expr(f);
        }
        r = series_mul(r, fs, order);
    }
    return r;
}

} // namespace

std::vector<Expr> regulator_series(const Expr& e, const std::string& regulator, unsigned order) {
    Series out(order + 1);
    for (const auto& [t, c] : e.atoms()) {
        Series ts = term_series(t, regulator, order);
        for (unsigned i = 0; i <= order && i <= c.degree_in(regulator); ++i) {
            CoeffPoly ci = c.coefficient_in(regulator, i);
            if (ci.is_zero()) continue;
            for (unsigned j = 0; i + j <= order; ++j)
                if (!ts[j].is_zero()) out[i + j] += ts[j] * ci;
        }
    }
    return out;
}

LaurentSeries laurent_expand(const Expr& e, const RatFunc& prefactor, const std::string& regulator, int max_exponent) {
    LaurentSeries s;
    s.regulator = regulator;
    s.truncation = max_exponent;
    auto pre = prefactor.laurent(max_exponent);
    if (pre.empty()) return s;
    int low = pre.begin()->first;
    int span = max_exponent - low;
    if (span < 0) return s;
    auto ser = regulator_series(e, regulator, static_cast<unsigned>(span));
    for (const auto& [i, a] : pre)
        for (int j = 0; i + j <= max_exponent; ++j) {
            const Expr& sj = ser[static_cast<std::size_t>(j)];
            if (sj.is_zero()) continue;
            Expr& slot = s.coefficients[i + j];
            slot += sj * CoeffPoly(a);
        }
    for (auto it = s.coefficients.begin(); it != s.coefficients.end();)
        it = it->second.is_zero() ? s.coefficients.erase(it) : std::next(it);
    return s;
}

LaurentSeries laurent_expand(const ExtensionResult& r, int max_exponent) {
    const std::string sym = r.moment ? r.moment->regulator : "zeta";
    return laurent_expand(r.extended, r.prefactor, sym, max_exponent);
}

ExtensionResult minimal_subtract(const LaurentSeries& s, std::vector<Counterterm> counterterms) {
    ExtensionResult r;
    r.method = ExtensionMethod::ms;
    r.extended = s.coefficient(0);
    r.counterterms = std::move(counterterms);
    r.output_homogeneity = try_homogeneity(r.extended);
    return r;
}

std::map<unsigned, CoeffPoly> ms_brackets(const MomentData& m, const std::string& ell) {
    std::map<unsigned, CoeffPoly> out;
    for (const auto& [l, c] : m.coefficients) {
        auto lau = c.scaled(m.eta_per_regulator).laurent(0);
        CoeffPoly b;
        for (const auto& [i, a] : lau) {
            unsigned j = static_cast<unsigned>(-i);
            Rational fact(1);
            for (unsigned t = 2; t <= j; ++t) fact *= t;
            b += CoeffPoly(a / fact) * (j ? CoeffPoly::symbol(ell, j) : CoeffPoly(1));
        }
        out[l] = b;
    }
    return out;
}

Expr assemble_from_brackets(const Expr& v0, const MomentData& m, const std::map<unsigned, CoeffPoly>& brackets,
                            unsigned k, const std::string& ell) {
    Expr log_sum;
    for (const auto& g : m.regulated_groups) log_sum += log_inv(g);
    Expr out;
    for (const auto& [l, b] : brackets) {
        Expr poly;
        for (unsigned j = 0; j <= b.degree_in(ell); ++j) {
            CoeffPoly cj = b.coefficient_in(ell, j);
            if (!cj.is_zero()) poly += power(log_sum, j) * cj;
        }
        out += moment_extension(l, multiply_trusted(v0, poly), k);
    }
    return out;
}

// ---- whole tables -------------------------------------------------------------

namespace {

std::vector<std::string> default_names(unsigned l, unsigned p, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i)
        names.push_back("C_" + std::to_string(l) + "_" + std::to_string(p) + (count > 1 ? "_" + std::to_string(i) : ""));
    return names;
}

bool plain_single_group(const Expr& e) {
    if (e.groups().size() != 1) return false;
    for (const auto& [t, c] : e.atoms())
        if (!t.factors.empty()) return false;
    return true;
}

} // namespace

SmExtension extend_sm(const SmExpansion& s, const SmExtensionOptions& opt) {
    SmExtension out;
    out.input = s;
    out.extended = s;
    out.extended.rows.clear();
    const unsigned k = s.ambient_k;
    const long L0 = s.degree - static_cast<long>(k);
    out.l0 = L0 < 0 ? 0 : static_cast<unsigned>(L0);
    if (L0 >= 0 && static_cast<long>(s.order) < L0)
        throw TruncationTooSmall("extension needs L >= L0 = " + std::to_string(L0) + ", table has L = " +
                                 std::to_string(s.order));
    auto names_for = opt.constant_names ? opt.constant_names : default_names;
    std::vector<Group> delta_groups = opt.delta_groups;
    if (delta_groups.empty()) {
        auto gs = s.groups();
        delta_groups.assign(gs.begin(), gs.end());
    }

    for (const auto& [key, row] : s.rows) {
        auto [l, p] = key;
        ExtensionResult r;
        if (static_cast<long>(l) > L0) {
            r = direct_extend(row, k);
        } else if (plain_single_group(row) && k == opt.metric.d) {
            r = diff_renorm_extend(row, opt.metric, "C");
        } else {
            ExtensionResult reg = regularized_extend(row, k, opt.regulator, opt.metric);
            if (reg.method == ExtensionMethod::direct) {
                r = reg;
            } else {
                auto series = laurent_expand(reg, 0);
                out.row_series[key] = series;
                CountertermSpec spec;
                spec.groups = delta_groups;
                spec.d = opt.metric.d;
                spec.covariant = opt.covariant;
                spec.symmetric = opt.symmetric;
                r = minimal_subtract(series, counterterm_operators(static_cast<unsigned>(L0 - static_cast<long>(l)), spec));
                r.input_homogeneity = reg.input_homogeneity;
                r.moment = reg.moment;
                r.restriction_verified = reg.restriction_verified &&
                                         restrict_away_from_origin(r.with_counterterms(), k, opt.metric) == row;
            }
        }
        auto names = names_for(l, p, r.counterterms.size());
        for (std::size_t i = 0; i < r.counterterms.size(); ++i) r.counterterms[i].constant = names.at(i);
        out.extended.set_row(l, p, r.with_counterterms());
        out.row_results[key] = std::move(r);
    }

    // remainder at order L0 + 1: rows beyond L0 plus the stored remainder
    Expr rem = overline(factor_expr(s.remainder), k);
    for (const auto& [key, row] : s.rows)
        if (static_cast<long>(key.first) > L0)
            rem += multiply(mass(static_cast<long>(key.first), key.second), out.extended.row(key.first, key.second));
    out.extended_remainder = rem;
    out.extended.remainder.tag = "extended(" + s.remainder.tag + ")";
    return out;
}

Expr r_relation_remainder(const SmExtension& ext, unsigned l1) {
    if (l1 > ext.l0) throw InvalidArgument("r-relation needs L1 <= L0");
    Expr r = ext.extended_remainder;
    for (const auto& [key, row] : ext.extended.rows)
        if (key.first > l1 && key.first <= ext.l0) r += multiply(mass(static_cast<long>(key.first), key.second), row);
    return r;
}

} // namespace smx
