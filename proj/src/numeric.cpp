#include "smx/numeric.hpp"

#include "smx/errors.hpp"
#include "smx/scaling.hpp"

#include <Eigen/Dense>
#include <boost/math/differentiation/autodiff.hpp>

#include <algorithm>
#include <cmath>
#include <queue>

namespace smx {

namespace {

namespace ad = boost::math::differentiation;
using JetVar = ad::autodiff_fvar<double, TestFunction::max_order>;

double value_of(double x) { return x; }
double value_of(const JetVar& x) { return x.derivative(0); }

template <class T>
T smooth_step(const T& t) {
    using std::exp;
    double tv = value_of(t);
    if (tv <= 0) return T(0);
    if (tv >= 1) return T(1);
    T f = exp(-1 / t), g = exp(-1 / (1 - t));
    return f / (f + g);
}

template <class T>
T profile(const TestFunction& h, const T& r) {
    using std::exp;
    T x = r / h.scale;
    T u = (x - h.center) / h.width;
    T env;
    if (h.family == TestFunction::Family::bump) {
        if (std::abs(value_of(u)) >= 1) return T(0);
        env = exp(-1 / (1 - u * u));
    } else {
        env = exp(-(u * u));
    }
    T s = x * x;
    T P(0);
    for (auto it = h.poly.rbegin(); it != h.poly.rend(); ++it) P = P * s + *it;
    T out = env * P;
    if (h.cutoff_rho) out = out * smooth_step(r * *h.cutoff_rho - 1);
    return out;
}

} // namespace

TestFunction TestFunction::bump(double center, double width, std::vector<double> poly, unsigned k) {
    TestFunction h;
    h.family = Family::bump;
    h.center = center;
    h.width = width;
    h.poly = std::move(poly);
    h.k = k;
    return h;
}

TestFunction TestFunction::gaussian(double width, std::vector<double> poly, unsigned k) {
    TestFunction h;
    h.family = Family::gaussian;
    h.center = 0;
    h.width = width;
    h.poly = std::move(poly);
    h.k = k;
    return h;
}

double TestFunction::value(double r) const { return profile(*this, r); }

TestFunction::Jet TestFunction::jet(double r) const {
    auto y = profile(*this, ad::make_fvar<double, max_order>(r));
    Jet j{};
    for (unsigned i = 0; i <= max_order; ++i) j[i] = y.derivative(i);
    return j;
}

double TestFunction::support_min() const {
    double lo = 0;
    if (family == Family::bump) lo = std::max(0.0, scale * (center - width));
    if (cutoff_rho) lo = std::max(lo, 1.0 / *cutoff_rho);
    return lo;
}

double TestFunction::support_max() const {
    // exp(-u^2) is below 1e-300 for u > 27
    return family == Family::bump ? scale * (center + width) : scale * (center + 27 * width);
}

bool TestFunction::even_at_origin() const { return center == 0 && !cutoff_rho; }

unsigned TestFunction::origin_vanishing_order() const {
    if (support_min() > 0) return 1000;
    if (!even_at_origin()) return 0;
    unsigned j = 0;
    while (j < poly.size() && poly[j] == 0) ++j;
    return 2 * j;
}

double TestFunction::laplacian_power_at_origin(unsigned n) const {
    if (support_min() > 0) return 0;
    if (!even_at_origin()) throw UnsupportedGeometry("derivatives at the origin need a test function centred at 0");
    if (2 * n > max_order) throw UnsupportedGeometry("too many derivatives at the origin");
    // h = sum_j a_2j r^2j near 0 and Laplacian r^2j = 2j (2j + k - 2) r^(2j-2)
    double a = jet(0)[2 * n];
    for (unsigned i = 2; i <= 2 * n; ++i) a /= i;
    for (unsigned i = 1; i <= n; ++i) a *= 2.0 * i * (2.0 * i + k - 2);
    return a;
}

// ---- quadrature ---------------------------------------------------------------

namespace {

constexpr std::array<double, 8> gk_nodes{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                         0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                         0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                         0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kronrod_weights{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                                0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gauss_weights{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kronrod_weights[7], g = fc * gauss_weights[3];
    for (unsigned i = 0; i < 7; ++i) {
        double s = f(c - h * gk_nodes[i]) + f(c + h * gk_nodes[i]);
        k += kronrod_weights[i] * s;
        if (i % 2 == 1) g += gauss_weights[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                           unsigned max_intervals) {
    QuadratureResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<Interval> heap;
    heap.push(gk15(f, a, b));
    double value = heap.top().value, error = heap.top().error;
    unsigned intervals = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
        Interval worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        Interval l = gk15(f, worst.a, m), r = gk15(f, m, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    // re-sum to avoid drift from the running updates
    value = 0;
    error = 0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    res.value = value;
    res.error = error;
    res.nodes = 15 * (2 * intervals - 1);
    res.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return res;
}

double sphere_volume(unsigned k) { return 2 * std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0); }

// ---- pairing --------------------------------------------------------------------

namespace {

// sum c r^p h^(d)(r), keyed by (p, d)
struct RadialOp {
    std::map<std::pair<int, unsigned>, double> terms{{{0, 0}, 1.0}};

    bool is_identity() const { return terms.size() == 1 && terms.begin()->first == std::pair<int, unsigned>{0, 0} &&
                                      terms.begin()->second == 1.0; }

    RadialOp derivative() const {
        RadialOp out;
        out.terms.clear();
        for (const auto& [key, c] : terms) {
            auto [p, d] = key;
            if (p != 0) out.terms[{p - 1, d}] += c * p;
            if (d + 1 > TestFunction::max_order) throw UnsupportedGeometry("test function derivative order exceeded");
            out.terms[{p, d + 1}] += c;
        }
        return out;
    }

    RadialOp laplacian(unsigned k) const {
        RadialOp d1 = derivative(), out = d1.derivative();
        for (const auto& [key, c] : d1.terms) out.terms[{key.first - 1, key.second}] += (k - 1.0) * c;
        return out;
    }

    // (-1)^l r^l d^l/dr^l: the adjoint of the moment divergence on radial functions
    RadialOp moment(unsigned l) const {
        RadialOp out = *this;
        for (unsigned i = 0; i < l; ++i) out = out.derivative();
        RadialOp shifted;
        shifted.terms.clear();
        double sign = l % 2 ? -1.0 : 1.0;
        for (const auto& [key, c] : out.terms) shifted.terms[{key.first + static_cast<int>(l), key.second}] += sign * c;
        return shifted;
    }

    double eval(double r, const TestFunction::Jet& j) const {
        double s = 0;
        for (const auto& [key, c] : terms)
            if (c != 0) s += c * std::pow(r, key.first) * j[key.second];
        return s;
    }

    // smallest power of r in op h near the origin
    double origin_exponent(const TestFunction& h) const {
        const unsigned vo = h.origin_vanishing_order();
        if (vo >= 1000) return 1000;
        double best = 1e9;
        if (!h.even_at_origin()) {
            for (const auto& [key, c] : terms)
                if (c != 0) best = std::min(best, static_cast<double>(key.first));
            return best;
        }
        // op applied to the even Taylor monomials r^n, n >= vo; singular
        // terms of the individual summands may cancel (e.g. powers of the Laplacian)
        int lowest_p = 0;
        unsigned highest_d = 0;
        for (const auto& [key, c] : terms) {
            lowest_p = std::min(lowest_p, key.first);
            highest_d = std::max(highest_d, key.second);
        }
        const unsigned start = vo + vo % 2;
        const unsigned stop = start + highest_d + static_cast<unsigned>(-lowest_p) + 2;
        for (unsigned n = start; n <= stop; n += 2) {
            std::map<int, double> out;
            double scale = 0;
            for (const auto& [key, c] : terms) {
                auto [p, d] = key;
                if (c == 0 || d > n) continue;
                double falling = 1;
                for (unsigned i = 0; i < d; ++i) falling *= static_cast<double>(n - i);
                out[static_cast<int>(n) - static_cast<int>(d) + p] += c * falling;
                scale = std::max(scale, std::abs(c * falling));
            }
            for (const auto& [e, c] : out)
                if (std::abs(c) > 1e-12 * scale) {
                    best = std::min(best, static_cast<double>(e));
                    break;
                }
        }
        return best;
    }
};

struct Value {
    double value = 0;
    double error = 0;
    unsigned nodes = 0;
    bool converged = true;
};

Value pair_plain(const InvPower& x, const RadialOp& op, const TestFunction& h, const PairingOptions& o) {
    if (x.power.has_regulator()) throw UnsupportedGeometry("numeric pairing needs a numeric power of X");
    const double a = to_double(x.power.rat);
    const unsigned q = x.log;
    const double lo = h.support_min(), hi = h.support_max();
    // integrand ~ r^(alpha - 1) near 0
    const double alpha = 2 * a + op.origin_exponent(h) + h.k;
    if (lo == 0 && alpha <= 0)
        throw NonIntegrable("pairing diverges at the origin: sd " + std::to_string(-2 * a) + " against a test function of order " +
                            std::to_string(op.origin_exponent(h)));
    const unsigned k = h.k;
    auto integrand = [&](double r) {
        double v = std::pow(r, 2 * a + k - 1) * op.eval(r, h.jet(r));
        if (q) v *= std::pow(2 * std::log(r), q);
        return v;
    };

    std::vector<double> points{lo, hi};
    if (h.cutoff_rho) {
        points.push_back(1.0 / *h.cutoff_rho);
        points.push_back(2.0 / *h.cutoff_rho);
    }
    if (h.family == TestFunction::Family::bump) {
        points.push_back(h.scale * (h.center - h.width));
        points.push_back(h.scale * (h.center + h.width));
        points.push_back(h.scale * h.center);
    }
    const bool log_scale = lo < 1e-2 * hi;
    double floor = lo;
    if (lo == 0) floor = std::pow(10.0, -std::min(300.0, 18.0 / alpha + 2.0 + q));
    std::vector<double> cuts;
    for (double p : points)
        if (p >= floor && p <= hi) cuts.push_back(p);
    cuts.push_back(floor);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Value v;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadratureResult r;
        if (log_scale) {
            auto g = [&](double t) {
                double e = std::exp(t);
                return integrand(e) * e;
            };
            r = integrate(g, std::log(cuts[i]), std::log(cuts[i + 1]), o.rel_tol, 1e-300);
        } else {
            r = integrate(integrand, cuts[i], cuts[i + 1], o.rel_tol, 1e-300);
        }
        v.value += r.value;
        v.error += r.error;
        v.nodes += r.nodes;
        v.converged = v.converged && r.converged;
    }
    const double S = sphere_volume(k);
    v.value *= S;
    v.error *= S;
    return v;
}

std::set<Group> factor_groups(const Factor& f) {
    Term t;
    t.factors.push_back(f);
    return t.groups();
}

Value pair_node(const Term& t, const Group& g, const RadialOp& op, const TestFunction& h, unsigned pending_z,
                const PairingOptions& o) {
    auto it = t.mono.inv.find(g);
    if (t.factors.empty()) {
        if (pending_z) throw UnsupportedGeometry("moment divergence without a matching extension");
        return pair_plain(it == t.mono.inv.end() ? InvPower{} : it->second, op, h, o);
    }
    if (t.factors.size() != 1 || it != t.mono.inv.end())
        throw UnsupportedGeometry("numeric pairing of products of extended objects: " + to_string(t));
    return std::visit(
        [&](const auto& x) -> Value {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Overline>) {
                if (x.k != h.k) throw UnsupportedGeometry("extension in " + std::to_string(x.k) + " dimensions");
                if (x.z_moments != pending_z) throw UnsupportedGeometry("unmatched moment factors");
                return pair_node(*x.inner, g, op, h, 0, o);
            } else if constexpr (std::is_same_v<T, BoxOp>) {
                if (x.group != g) throw UnsupportedGeometry("box in a foreign variable");
                return pair_node(*x.inner, g, op.laplacian(h.k), h, pending_z, o);
            } else if constexpr (std::is_same_v<T, MomentDiv>) {
                return pair_node(*x.inner, g, op.moment(x.l), h, x.l, o);
            } else if constexpr (std::is_same_v<T, DeltaCT>) {
                if (x.support != std::set<Group>{g} || x.dim != h.k || !op.is_identity())
                    throw UnsupportedGeometry("numeric pairing supports box powers of a point delta only");
                for (const auto& d : x.ops)
                    if (d.kind != DiffOp::Kind::box) throw UnsupportedGeometry("non-invariant delta derivative");
                Value v;
                v.value = h.laplacian_power_at_origin(static_cast<unsigned>(x.ops.size()));
                return v;
            } else {
                throw UnsupportedGeometry("remainders have no numeric value");
            }
        },
        t.factors.front());
}

} // namespace

PairingReport pair_numeric(const Expr& e, const std::map<Group, TestFunction>& tests, const PairingOptions& o) {
    PairingReport rep;
    rep.converged = true;
    for (const auto& [t, c] : e.atoms()) {
        const double coeff = c.evaluate(o.values);
        if (t.mono.mass_power.has_regulator()) throw UnsupportedGeometry("regulated mass power");
        double mfac = std::pow(o.mass, to_double(t.mono.mass_power.rat)) * std::pow(std::log(o.mass), t.mono.log_m_power);
        for (const auto& g : t.groups())
            if (!tests.count(g)) throw InvalidArgument("no test function for variable " + g);

        std::map<Group, const Factor*> node_of;
        for (const auto& f : t.factors) {
            auto gs = factor_groups(f);
            if (gs.size() != 1) throw UnsupportedGeometry("numeric pairing of multi-variable nodes (k > 4)");
            if (node_of.count(*gs.begin())) throw UnsupportedGeometry("two nodes in one variable");
            node_of[*gs.begin()] = &f;
        }
        double value = coeff * mfac, err_rel = 0;
        for (const auto& [g, h] : tests) {
            Term part;
            if (auto it = t.mono.inv.find(g); it != t.mono.inv.end()) part.mono.inv[g] = it->second;
            if (auto it = node_of.find(g); it != node_of.end()) part.factors.push_back(*it->second);
            Value v = pair_node(part, g, RadialOp{}, h, 0, o);
            value *= v.value;
            err_rel += v.value != 0 ? v.error / std::abs(v.value) : v.error;
            rep.nodes += v.nodes;
            rep.converged = rep.converged && v.converged;
        }
        rep.value += value;
        rep.error += std::abs(value) * err_rel;
    }
    return rep;
}

PairingReport pair_numeric(const Expr& e, const TestFunction& h, const PairingOptions& o) {
    auto gs = e.groups();
    if (gs.size() > 1) throw UnsupportedGeometry("several variables need one test function each");
    return pair_numeric(e, std::map<Group, TestFunction>{{gs.empty() ? Group("X") : *gs.begin(), h}}, o);
}

// ---- limits and fits ---------------------------------------------------------------

DirectLimitReport direct_limit_check(const Expr& e, const TestFunction& h, std::vector<double> rho, double tolerance,
                                     const PairingOptions& o) {
    if (rho.empty())
        for (int j = 0; j <= 16; ++j) rho.push_back(std::ldexp(1.0, j));
    DirectLimitReport rep;
    rep.rho = rho;
    for (double r : rho) {
        TestFunction hc = h;
        hc.cutoff_rho = r;
        rep.values.push_back(pair_numeric(e, hc, o).value);
    }
    for (std::size_t i = 1; i < rep.values.size(); ++i)
        rep.increments.push_back(std::abs(rep.values[i] - rep.values[i - 1]) /
                                 std::max(std::abs(rep.values[i]), 1e-300));
    rep.limit = rep.values.back();
    const auto& inc = rep.increments;
    bool contracting = inc.size() >= 3;
    for (std::size_t i = inc.size() >= 3 ? inc.size() - 3 : 0; i + 1 < inc.size(); ++i)
        contracting = contracting && (inc[i + 1] < 0.9 * inc[i] || inc[i + 1] < 1e-3 * tolerance);
    rep.converged = contracting && !inc.empty() && inc.back() < tolerance;
    if (!rep.converged) {
        std::string tail;
        for (std::size_t i = inc.size() >= 3 ? inc.size() - 3 : 0; i < inc.size(); ++i)
            tail += (tail.empty() ? "" : ", ") + std::to_string(inc[i]);
        throw NoConvergence("cutoff limit does not settle; last relative increments " + tail);
    }
    return rep;
}

ScalingFit scaling_fit(const Expr& e, const TestFunction& h, const Rational& degree, std::vector<double> rho,
                       double tolerance, const PairingOptions& o, unsigned max_degree) {
    if (rho.empty())
        for (int j = -4; j <= 4; ++j) rho.push_back(std::ldexp(1.0, j));
    ScalingFit fit;
    fit.rho = rho;
    const double D = to_double(degree);
    for (double r : rho) {
        TestFunction hs = h;
        hs.scale = h.scale * r;
        fit.values.push_back(std::pow(r, D - h.k) * pair_numeric(e, hs, o).value);
    }
    const auto n = static_cast<Eigen::Index>(rho.size());
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = fit.values[static_cast<std::size_t>(i)];
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    for (unsigned deg = 0; deg <= max_degree && deg + 1 < rho.size(); ++deg) {
        Eigen::MatrixXd A(n, deg + 1);
        for (Eigen::Index i = 0; i < n; ++i)
            for (unsigned j = 0; j <= deg; ++j) A(i, j) = std::pow(std::log(rho[static_cast<std::size_t>(i)]), j);
        Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
        double res = (A * x - b).cwiseAbs().maxCoeff() / scale;
        if (res < tolerance) {
            fit.degree = deg;
            fit.residual = res;
            fit.coefficients.assign(x.data(), x.data() + x.size());
            return fit;
        }
    }
    throw FitFailure("no polynomial in log rho of degree <= " + std::to_string(max_degree) + " fits within " +
                     std::to_string(tolerance));
}

} // namespace smx
