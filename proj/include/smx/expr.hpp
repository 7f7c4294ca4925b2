#pragma once

#include "smx/coeff_poly.hpp"
#include "smx/rational.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace smx {

/// Name of a variable group, i.e. of one Lorentz invariant X_i = -(x_i^2 - i0)
/// built from a single relative coordinate (or coordinate difference).
using Group = std::string;

/// Exponent of the form rational + integer-linear combination of regulator
/// symbols. A regulator part n*zeta on X is read as (M^2 X)^(n zeta) and on the
/// mass as (m/M)^(n zeta), so it never changes the mass dimension.
struct Exponent {
    Rational rat{0};
    std::map<std::string, long> zeta;

    Exponent() = default;
    Exponent(const Rational& r) : rat(r) {}   // NOLINT
    Exponent(long r) : rat(r) {}              // NOLINT
    static Exponent regulator(const std::string& sym, long n = 1);

    bool is_zero() const { return rat == 0 && zeta.empty(); }
    bool has_regulator() const { return !zeta.empty(); }
    bool is_nonnegative_integer() const { return zeta.empty() && is_integer(rat) && rat >= 0; }
    CoeffPoly as_coeff() const;

    Exponent& operator+=(const Exponent& o);
    Exponent& operator-=(const Exponent& o);
    Exponent& operator*=(long n);
    friend Exponent operator+(Exponent a, const Exponent& b) { return a += b; }
    friend Exponent operator-(Exponent a, const Exponent& b) { return a -= b; }
    friend Exponent operator-(Exponent a) { return a *= -1; }
    friend Exponent operator*(Exponent a, long n) { return a *= n; }
    friend bool operator==(const Exponent& a, const Exponent& b) { return a.rat == b.rat && a.zeta == b.zeta; }

    std::string to_string() const;
};
int compare(const Exponent& a, const Exponent& b);

struct InvPower {
    Exponent power;     // X^power
    unsigned log = 0;   // log(M^2 X)^log
};

/// Coefficient-free power product: m^l log(m/M)^p prod_i X_i^{a_i} log(M^2 X_i)^{q_i}.
struct Monomial {
    Exponent mass_power;
    unsigned log_m_power = 0;
    std::map<Group, InvPower> inv;   // only non-trivial entries

    bool is_one() const { return mass_power.is_zero() && log_m_power == 0 && inv.empty(); }
    Monomial& operator*=(const Monomial& o);
    /// Groups carrying a non-polynomial factor (negative/fractional power or a log).
    std::set<Group> singular_groups() const;
};
int compare(const Monomial& a, const Monomial& b);

/// Invariant differential operator acting on a delta counterterm.
struct DiffOp {
    enum class Kind { box, dot, partial };
    Kind kind = Kind::box;
    Group a;                              // box: group; dot: first group
    Group b;                              // dot: second group
    std::vector<unsigned> multi_index;    // partial: coordinate multi-index

    static DiffOp box(Group g) { return {Kind::box, std::move(g), {}, {}}; }
    static DiffOp dot(Group g1, Group g2);
    static DiffOp partial(std::vector<unsigned> beta) { return {Kind::partial, {}, {}, std::move(beta)}; }
    unsigned order() const;
    std::string to_string() const;
};
int compare(const DiffOp& a, const DiffOp& b);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Direct extension of `inner` to R^k. `z_moments` = l means the extension is
/// taken of z_{r1}...z_{rl} * inner (it only occurs directly under MomentDiv(l)).
struct Overline {
    unsigned k = 0;
    unsigned z_moments = 0;
    TermPtr inner;
};

/// d'Alembertian in the coordinate of `group` applied to `inner` (kept formal).
struct BoxOp {
    Group group;
    TermPtr inner;
};

/// d_{r1}...d_{rl} (z_{r1}...z_{rl} * inner), fully contracted.
struct MomentDiv {
    unsigned l = 0;
    TermPtr inner;
};

/// ops delta^{(dim)} supported where all `support` invariants vanish.
struct DeltaCT {
    std::set<Group> support;
    unsigned dim = 0;
    std::vector<DiffOp> ops;   // sorted
    unsigned order() const;
};

/// Opaque sm-expansion remainder; only its metadata takes part in computations.
struct Remainder {
    std::string tag;
    Rational degree{0};
    unsigned order = 0;
    std::set<Group> groups;
    unsigned euler_applications = 0;
    unsigned mass_euler_applications = 0;
};

using Factor = std::variant<Overline, BoxOp, MomentDiv, DeltaCT, Remainder>;

/// Coefficient-free atom: a monomial times a sorted list of structural factors.
struct Term {
    Monomial mono;
    std::vector<Factor> factors;

    bool is_plain() const { return factors.empty(); }
    std::set<Group> groups() const;
};
int compare(const Term& a, const Term& b);
int compare(const Factor& a, const Factor& b);
struct TermLess {
    bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

/// Canonical finite sum of atoms with CoeffPoly coefficients. Every Expr value
/// is normalized: equal expressions compare equal with operator==.
class Expr {
public:
    using Map = std::map<Term, CoeffPoly, TermLess>;

    Expr() = default;
    Expr(const CoeffPoly& c);   // NOLINT
    Expr(long c) : Expr(CoeffPoly(c)) {}   // NOLINT
    Expr(const Rational& c) : Expr(CoeffPoly(c)) {}   // NOLINT
    static Expr atom(const CoeffPoly& c, Term t);
    static Expr symbol(const std::string& name, unsigned power = 1);

    const Map& atoms() const noexcept { return atoms_; }
    bool is_zero() const noexcept { return atoms_.empty(); }
    std::size_t size() const noexcept { return atoms_.size(); }

    void add(const Term& t, const CoeffPoly& c);
    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const CoeffPoly& c);
    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator-(Expr a) { return a *= CoeffPoly(-1); }
    friend Expr operator*(Expr a, const CoeffPoly& c) { return a *= c; }
    friend Expr operator*(const CoeffPoly& c, Expr a) { return a *= c; }
    friend Expr operator*(const Expr& a, const Expr& b);
    friend bool operator==(const Expr& a, const Expr& b);

    /// All groups appearing anywhere in the expression.
    std::set<Group> groups() const;
    bool has_factors() const;
    std::string to_string() const;

private:
    Map atoms_;
};

/// Sign convention for X and the spacetime dimension. s = -1: x.x = -X
/// (Minkowski, X = -(x^2 - i0)); s = +1: Euclidean X = |x|^2.
struct MetricConvention {
    int sign = -1;
    unsigned d = 4;
    static MetricConvention minkowski(unsigned d = 4) { return {-1, d}; }
    static MetricConvention euclidean(unsigned d = 4) { return {+1, d}; }
};

// ---- builders -------------------------------------------------------------

/// X_g^power log(M^2 X_g)^log.
Expr inv(const Group& g, const Exponent& power, unsigned log = 0);
/// log(M^2 X_g)^q.
Expr log_inv(const Group& g, unsigned q = 1);
/// m^l log(m/M)^p.
Expr mass(const Exponent& l, unsigned p = 0);
/// Direct extension; throws DivergentDirect unless sd(e) - z_moments < k.
Expr overline(const Expr& e, unsigned k, unsigned z_moments = 0);
/// Formal MomentDiv(l, e).
Expr moment_div(unsigned l, const Expr& e);
/// MomentDiv(l, Overline(z^l e)) with the extendibility check sd(e) - l < k.
Expr moment_extension(unsigned l, const Expr& e, unsigned k);
/// Formal BoxOp(g, e), used for boxes over extended distributions.
Expr box_formal(const Group& g, const Expr& e);
Expr delta(std::set<Group> support, unsigned dim, std::vector<DiffOp> ops = {});
Expr remainder(const std::string& tag, const Rational& degree, unsigned order, std::set<Group> groups);

// ---- operations -----------------------------------------------------------

/// Distributive product; throws IllDefinedProduct for products of singular
/// objects at the same point.
Expr multiply(const Expr& a, const Expr& b);
Expr power(const Expr& e, unsigned n);
/// Product without the coincident-singularity check, for rebuilding atoms
/// whose structure is already valid.
Expr multiply_trusted(const Expr& a, const Expr& b);
/// Rebuilds a wrapping node (Overline, BoxOp, MomentDiv) around a new inner
/// expression; any other factor kind is returned unchanged.
Expr rewrap(const Factor& node, const Expr& inner);
Expr factor_expr(const Factor& f);

/// Box in the coordinate of `g`, closed form via
/// box f(X) = 2s (d f'(X) + 2 X f''(X)); formal on extended objects.
Expr apply_box(const Group& g, const Expr& e, const MetricConvention& metric);

/// Euler operator sum_r z_r d_r (minus m d_m when `with_mass`).
Expr apply_euler(const Expr& e, bool with_mass = false);

/// prod_{j<l} (k + j + E) e : the value of MomentDiv(l, e) away from the origin.
Expr moment_div_reduce(unsigned l, const Expr& e, unsigned k);

/// Common mass dimension; throws InhomogeneousDimension.
Rational mass_dimension(const Expr& e);
Rational mass_dimension(const Term& t);

/// Restriction to the complement of the origin of R^k: drops counterterms
/// located at the origin and evaluates the extension markers living in R^k.
Expr restrict_away_from_origin(const Expr& e, unsigned k, const MetricConvention& metric);

/// Identity on canonical values; kept as the explicit normalization entry point.
inline const Expr& normalize(const Expr& e) { return e; }

Expr rename_group(const Expr& e, const Group& from, const Group& to);
Expr substitute_symbol(const Expr& e, const std::string& sym, const CoeffPoly& value);
/// Maps every coefficient through `f`.
template <class F>
Expr map_coefficients(const Expr& e, F&& f) {
    Expr out;
    for (const auto& [t, c] : e.atoms()) out.add(t, f(c));
    return out;
}

std::string to_string(const Term& t);

} // namespace smx
