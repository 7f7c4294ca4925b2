#include "smx/sm_expansion.hpp"

#include "smx/errors.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>

namespace smx {

// ---- table ------------------------------------------------------------------

Expr SmExpansion::row(unsigned l, unsigned p) const {
    auto it = rows.find({l, p});
    return it == rows.end() ? Expr{} : it->second;
}

std::optional<unsigned> SmExpansion::max_log_power(unsigned l) const {
    std::optional<unsigned> best;
    for (const auto& [key, e] : rows)
        if (key.first == l && !e.is_zero()) best = key.second;
    return best;
}

Expr SmExpansion::truncated_sum() const {
    Expr out;
    for (const auto& [key, e] : rows) out += multiply(mass(static_cast<long>(key.first), key.second), e);
    return out;
}

std::set<Group> SmExpansion::groups() const {
    std::set<Group> g = remainder.groups;
    for (const auto& [key, e] : rows) {
        auto eg = e.groups();
        g.insert(eg.begin(), eg.end());
    }
    return g;
}

void SmExpansion::set_row(unsigned l, unsigned p, Expr e) {
    if (e.is_zero()) rows.erase({l, p});
    else rows[{l, p}] = std::move(e);
}

SmExpansion sm_trivial(const Expr& e, long degree, unsigned order, unsigned k) {
    SmExpansion s;
    s.degree = degree;
    s.order = order;
    s.ambient_k = k;
    s.set_row(0, 0, e);
    s.remainder = Remainder{"trivial", Rational(degree), order + 1, e.groups(), 0, 0};
    return s;
}

SmExpansion sm_add(const SmExpansion& a, const SmExpansion& b) {
    if (a.degree != b.degree || a.ambient_k != b.ambient_k)
        throw InhomogeneousDimension("adding sm-expansions of degree " + std::to_string(a.degree) + " and " +
                                     std::to_string(b.degree));
    SmExpansion s = a;
    s.order = std::min(a.order, b.order);
    s.rows.clear();
    for (const auto* t : {&a, &b})
        for (const auto& [key, e] : t->rows)
            if (key.first <= s.order) s.set_row(key.first, key.second, s.row(key.first, key.second) + e);
    s.remainder.order = std::min(a.remainder.order, b.remainder.order);
    s.remainder.tag = "sum";
    for (const auto& g : b.remainder.groups) s.remainder.groups.insert(g);
    return s;
}

SmExpansion sm_scale(const SmExpansion& s, const CoeffPoly& c) {
    SmExpansion out = s;
    out.rows.clear();
    for (const auto& [key, e] : s.rows) out.set_row(key.first, key.second, e * c);
    return out;
}

SmExpansion sm_product(const SmExpansion& a, const SmExpansion& b, std::optional<unsigned> ambient_k) {
    SmExpansion s;
    s.degree = a.degree + b.degree;
    s.order = std::min(a.order, b.order);
    auto ga = a.groups(), gb = b.groups();
    bool shared = false;
    for (const auto& g : ga) shared = shared || gb.count(g);
    s.ambient_k = ambient_k ? *ambient_k : (shared ? std::max(a.ambient_k, b.ambient_k) : a.ambient_k + b.ambient_k);

    for (const auto& [ka, ea] : a.rows)
        for (const auto& [kb, eb] : b.rows) {
            unsigned l = ka.first + kb.first;
            if (l > s.order) continue;
            s.set_row(l, ka.second + kb.second, s.row(l, ka.second + kb.second) + multiply(ea, eb));
        }

    // The remainder collects r1*r2, r1*(partial sum 2), (partial sum 1)*r2 and
    // the overflow rows L < l <= 2L; it vanishes at least like the first
    // omitted power of m.
    unsigned overflow = 2 * s.order + 1;
    for (const auto& [ka, ea] : a.rows)
        for (const auto& [kb, eb] : b.rows) {
            unsigned l = ka.first + kb.first;
            if (l > s.order) overflow = std::min(overflow, l);
        }
    unsigned order = std::min({overflow, a.remainder.order + 0u, b.remainder.order + 0u});
    std::set<Group> groups = ga;
    groups.insert(gb.begin(), gb.end());
    s.remainder = Remainder{"product", Rational(s.degree), std::max(order, s.order + 1), groups, 0, 0};
    return s;
}

unsigned DerivativeRequest::order() const {
    if (box_group) return 2;
    unsigned n = 0;
    for (unsigned b : multi_index) n += b;
    return n;
}

SmExpansion sm_derivative(const SmExpansion& s, const DerivativeRequest& d, const MetricConvention& metric) {
    if (!d.box_group && d.order() > 0)
        throw UnsupportedDerivative("free-index derivative outside the invariant calculus; use a box");
    SmExpansion out = s;
    if (!d.box_group) return out;
    out.degree = s.degree + 2;
    out.rows.clear();
    for (const auto& [key, e] : s.rows) out.set_row(key.first, key.second, apply_box(*d.box_group, e, metric));
    out.remainder.degree += 2;
    out.remainder.tag = "box_" + *d.box_group + "(" + s.remainder.tag + ")";
    return out;
}

bool SmCheckReport::all_pass() const {
    for (const auto& [k, v] : properties)
        if (!v.pass) return false;
    return true;
}

namespace {

bool mass_free(const Expr& e) {
    for (const auto& [t, c] : e.atoms())
        if (!t.mono.mass_power.is_zero() || t.mono.log_m_power) return false;
    return true;
}

} // namespace

SmCheckReport sm_check(const SmExpansion& s) {
    SmCheckReport rep;
    auto fail = [&](const std::string& key, const std::string& why) {
        auto& p = rep.properties[key];
        if (p.pass) p.detail.clear();
        p.pass = false;
        p.detail += (p.detail.empty() ? "" : "; ") + why;
    };
    for (const char* key : {"A", "B", "C", "D", "E"}) rep.properties[key] = {true, "ok"};

    for (const auto& [key, e] : s.rows) {
        auto [l, p] = key;
        std::string tag = "u[" + std::to_string(l) + "][" + std::to_string(p) + "]";
        if (l == 0 && p != 0) fail("A", tag + " makes u_0 depend on log(m/M)");
        if (!mass_free(e)) fail(l == 0 ? "A" : "B", tag + " depends on m");
        if (l > s.order) fail("B", tag + " lies beyond the order L = " + std::to_string(s.order));
        try {
            auto h = homogeneity_analyze(e, false);
            Exponent want(Rational(s.degree - static_cast<long>(l)));
            if (!(h.degree == want))
                fail("C", tag + " has degree " + h.degree.to_string() + ", expected " + want.to_string());
        } catch (const Error& err) {
            fail("C", tag + ": " + err.what());
        }
    }
    if (s.remainder.degree != Rational(s.degree))
        fail("D", "remainder degree " + to_string(s.remainder.degree) + " differs from D = " + std::to_string(s.degree));
    if (s.remainder.order < s.order + 1)
        fail("E", "remainder order " + std::to_string(s.remainder.order) + " below L+1 = " + std::to_string(s.order + 1));
    return rep;
}

Rational sm_remainder_bound(const SmExpansion& s) { return Rational(s.degree - static_cast<long>(s.order) - 1); }

// ---- extraction -------------------------------------------------------------

namespace {

using MatrixHP = Eigen::Matrix<HighPrecision, Eigen::Dynamic, Eigen::Dynamic>;
using VectorHP = Eigen::Matrix<HighPrecision, Eigen::Dynamic, 1>;

struct JointFit {
    std::map<std::pair<unsigned, unsigned>, HighPrecision> coeff;
    HighPrecision residual;   // max |f - fit| / m^l_target
};

// Least squares for f = sum_{l <= l_max, p <= P} c_{l,p} m^l log(m)^p on a
// log-spaced grid, rows weighted by m^-l_target and columns normalized.
JointFit joint_fit(const MassSampler& f, const ExtractionOptions& o, unsigned n, unsigned l_target, unsigned P) {
    const unsigned l_max = l_target + 2;
    std::vector<std::pair<unsigned, unsigned>> basis;
    for (unsigned l = 0; l <= l_max; ++l)
        for (unsigned p = 0; p <= P; ++p) basis.emplace_back(l, p);
    if (n <= basis.size()) throw InvalidArgument("extraction grid too small for the requested basis");

    const HighPrecision lo = log(HighPrecision(o.m_min)), hi = log(HighPrecision(o.m_max));
    MatrixHP A(n, static_cast<Eigen::Index>(basis.size()));
    VectorHP b(n);
    std::vector<HighPrecision> weight(n);
    for (unsigned i = 0; i < n; ++i) {
        HighPrecision lm = lo + (hi - lo) * i / (n - 1);
        HighPrecision m = exp(lm);
        weight[i] = pow(m, -static_cast<int>(l_target));
        b(i) = f(m) * weight[i];
        for (std::size_t j = 0; j < basis.size(); ++j)
            A(i, static_cast<Eigen::Index>(j)) = pow(m, basis[j].first) * pow(lm, basis[j].second) * weight[i];
    }
    VectorHP scale(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        scale(j) = A.col(j).cwiseAbs().maxCoeff();
        A.col(j) /= scale(j);
    }
    VectorHP x = A.colPivHouseholderQr().solve(b);
    VectorHP r = A * x - b;
    JointFit out;
    out.residual = r.cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < basis.size(); ++j)
        if (basis[j].first <= l_target)
            out.coeff[basis[j]] = x(static_cast<Eigen::Index>(j)) / scale(static_cast<Eigen::Index>(j));
    return out;
}

} // namespace

std::map<unsigned, ExtractedRow> sm_extract_from_samples(const MassSampler& f, long /*degree*/, unsigned l_target,
                                                         unsigned p_start, const ExtractionOptions& o) {
    std::array<JointFit, 2> fits{joint_fit(f, o, o.grid_points, l_target, p_start),
                                 joint_fit(f, o, 2 * o.grid_points - 1, l_target, p_start)};
    std::map<unsigned, ExtractedRow> out;
    HighPrecision top(1);
    for (unsigned p = 0; p <= p_start; ++p) top = std::max(top, HighPrecision(abs(fits[1].coeff.at({l_target, p}))));
    for (const auto& fit : fits)
        if (fit.residual > o.tolerance * top)
            throw DivergentLimit("samples are not matched by log powers up to " + std::to_string(p_start) +
                                 " (weighted residual " + static_cast<HighPrecision>(fit.residual).str(6) +
                                 "); start from a higher power");
    // descending P: the highest log power is fixed first in each row
    for (unsigned l = 0; l <= l_target; ++l) {
        ExtractedRow row;
        row.l = l;
        for (unsigned P = p_start + 1; P-- > 0;) {
            HighPrecision u = fits[1].coeff.at({l, P});
            HighPrecision drift = abs(u - fits[0].coeff.at({l, P}));
            if (drift > o.tolerance * std::max(HighPrecision(1), HighPrecision(abs(u))))
                throw DivergentLimit("row l = " + std::to_string(l) + ": log power " + std::to_string(P) +
                                     " does not settle under grid refinement");
            row.coefficients[P] = static_cast<double>(u);
            row.stability[P] = static_cast<double>(drift);
        }
        out[l] = row;
    }
    return out;
}

} // namespace smx
