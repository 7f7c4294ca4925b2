#include "smx/scaling.hpp"

#include "smx/errors.hpp"

namespace smx {

std::string ScalingDegree::to_string() const { return minus_infinity ? "-inf" : value.to_string(); }

namespace {

Exponent term_sd(const Term& t, unsigned k) {
    Exponent sd;
    for (const auto& [g, p] : t.mono.inv) sd -= p.power * 2;
    for (const auto& f : t.factors) {
        sd += std::visit(
            [k](const auto& x) -> Exponent {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Overline>) return term_sd(*x.inner, k) - Exponent(static_cast<long>(x.z_moments));
                else if constexpr (std::is_same_v<T, BoxOp>) return term_sd(*x.inner, k) + Exponent(2);
                else if constexpr (std::is_same_v<T, MomentDiv>) return term_sd(*x.inner, k) + Exponent(static_cast<long>(x.l));
                else if constexpr (std::is_same_v<T, DeltaCT>) return Exponent(static_cast<long>(x.dim + x.order()));
                else return Exponent(x.degree - x.order);
            },
            f);
    }
    return sd;
}

} // namespace

ScalingDegree scaling_degree(const Term& t, unsigned k) { return {false, term_sd(t, k)}; }

ScalingDegree scaling_degree(const Expr& e, unsigned k) {
    ScalingDegree best{true, {}};
    for (const auto& [t, c] : e.atoms()) {
        Exponent sd = term_sd(t, k);
        if (best.minus_infinity || compare(sd, best.value) > 0) best = {false, sd};
    }
    return best;
}

Exponent euler_weight(const Term& t, bool with_mass) {
    Exponent w;
    for (const auto& [g, p] : t.mono.inv) w += p.power * 2;
    if (with_mass) w -= t.mono.mass_power;
    for (const auto& f : t.factors) {
        w += std::visit(
            [](const auto& x) -> Exponent {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Overline>)
                    return euler_weight(*x.inner, false) + Exponent(static_cast<long>(x.z_moments));
                else if constexpr (std::is_same_v<T, BoxOp>) return euler_weight(*x.inner, false) - Exponent(2);
                else if constexpr (std::is_same_v<T, MomentDiv>)
                    return euler_weight(*x.inner, false) - Exponent(static_cast<long>(x.l));
                else if constexpr (std::is_same_v<T, DeltaCT>) return Exponent(-static_cast<long>(x.dim + x.order()));
                else return Exponent(-x.degree);
            },
            f);
    }
    return w;
}

Expr shifted_euler(const Expr& e, const Exponent& degree, bool with_mass) {
    return apply_euler(e, with_mass) + e * degree.as_coeff();
}

HomogeneityReport homogeneity_analyze(const Expr& e, bool with_mass, unsigned max_order) {
    HomogeneityReport rep;
    rep.with_mass = with_mass;
    if (e.is_zero()) return rep;

    const Term* first = nullptr;
    Exponent weight;
    for (const auto& [t, c] : e.atoms()) {
        Exponent w = euler_weight(t, with_mass);
        if (!first) {
            first = &t;
            weight = w;
        } else if (!(w == weight)) {
            throw NotAlmostHomogeneous("atoms scale with different degrees: " + to_string(*first) + " (" +
                                       (-weight).to_string() + ") and " + to_string(t) + " (" + (-w).to_string() + ")");
        }
    }
    rep.degree = -weight;
    Expr cur = e;
    for (unsigned n = 1; n <= max_order; ++n) {
        cur = shifted_euler(cur, rep.degree, with_mass);
        if (cur.is_zero()) {
            rep.annihilator_order = n;
            rep.power = n - 1;
            return rep;
        }
    }
    throw NotAlmostHomogeneous("no annihilator (E + " + rep.degree.to_string() + ")^N with N <= " +
                               std::to_string(max_order) + " for " + e.to_string());
}

} // namespace smx
