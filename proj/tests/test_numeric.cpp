#include "smx/errors.hpp"
#include "smx/models.hpp"
#include "smx/numeric.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace smx;

namespace {

const MetricConvention eucl = MetricConvention::euclidean(4);
CoeffPoly q(long p, long d = 1) { return CoeffPoly(make_rational(p, d)); }
Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }

double oracle(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b);
}

} // namespace

TEST(TestFunction, JetMatchesFiniteDifferences) {
    for (const auto& h : {TestFunction::bump(1.5, 0.5, {1.0, 0.3}), TestFunction::gaussian(0.8, {0.5, 0.0, 1.0})}) {
        for (double r : {0.7, 1.3, 1.6}) {
            auto j = h.jet(r);
            const double eps = 1e-4;
            auto jp = h.jet(r + eps), jm = h.jet(r - eps);
            for (unsigned d = 0; d < TestFunction::max_order; ++d) {
                double fd = (jp[d] - jm[d]) / (2 * eps);
                EXPECT_NEAR(j[d + 1], fd, 1e-6 * std::max(1.0, std::abs(fd)) * 50) << d << " at " << r;
            }
        }
    }
}

TEST(TestFunction, LaplacianAtOrigin) {
    // h = exp(-r^2): Laplacian h(0) = -2k
    auto h = TestFunction::gaussian(1.0);
    EXPECT_NEAR(h.laplacian_power_at_origin(1), -8.0, 1e-10);
    // r^4 / 2 -> (4 * 6) (2 * 4) / 2
    EXPECT_NEAR(h.laplacian_power_at_origin(2), 0.5 * 24 * 8, 1e-8);
    EXPECT_EQ(TestFunction::bump(1.5, 0.5).laplacian_power_at_origin(2), 0.0);
}

TEST(Quadrature, AgreesWithTanhSinh) {
    auto f = [](double x) { return std::log(x) * std::sqrt(x) + std::cos(3 * x); };
    auto r = integrate(f, 1e-12, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, oracle(f, 1e-12, 2.0), 1e-10);
    auto g = [](double x) { return std::exp(-x * x); };
    EXPECT_NEAR(integrate(g, -3, 3).value, oracle(g, -3, 3), 1e-13);
}

TEST(Quadrature, RefinementShrinksError) {
    auto f = [](double x) { return 1 / std::sqrt(x); };
    auto coarse = integrate(f, 1e-10, 1, 1e-4);
    auto fine = integrate(f, 1e-10, 1, 1e-10);
    EXPECT_LT(fine.error, coarse.error);
    EXPECT_GT(fine.nodes, coarse.nodes);
}

TEST(Pairing, InverseXAgainstOneDimensionalOracle) {
    auto h = TestFunction::bump(1.5, 0.5);
    auto p = pair_numeric(X(-1), h);
    double ref = sphere_volume(4) * oracle([&](double r) { return r * h.value(r); }, 1.0, 2.0);
    EXPECT_NEAR(p.value, ref, 1e-8 * std::abs(ref));
    EXPECT_LT(p.error, 1e-8);
}

TEST(Pairing, ExtensionAwayFromOrigin) {
    auto h = TestFunction::bump(1.5, 0.5);
    Expr f = X(-1, 1) * q(1, 4);
    EXPECT_NEAR(pair_numeric(overline(f, 4), h).value, pair_numeric(f, h).value, 1e-12);
}

TEST(Pairing, BoxMovesOntoTestFunction) {
    Expr e = apply_box("X", overline(X(-1, 1) * q(1, 4), 4), eucl);
    // away from 0 the symbolic target is -X^-2 in the Euclidean signature
    auto h = TestFunction::bump(1.5, 0.5);
    EXPECT_NEAR(pair_numeric(e, h).value, pair_numeric(-X(-2), h).value, 1e-6);
    // through the origin: compare with an independent Laplacian of h
    auto g = TestFunction::gaussian(1.0, {1.0, 0.5});
    auto lap = [&](double r) {
        auto j = g.jet(r);
        return j[2] + 3 / r * j[1];
    };
    double ref = sphere_volume(4) *
                 oracle([&](double r) { return 2 * std::log(r) / 4 * lap(r) * r; }, 0.0, 30.0);
    EXPECT_NEAR(pair_numeric(e, g).value, ref, 1e-6 * std::abs(ref));
}

TEST(Pairing, DivergentWithoutExtension) {
    EXPECT_THROW((void)pair_numeric(X(-2), TestFunction::gaussian(1.0)), NonIntegrable);
    EXPECT_NO_THROW((void)pair_numeric(X(-2), TestFunction::gaussian(1.0, {0.0, 1.0})));
}

TEST(Pairing, SeparableTwoVariables) {
    Expr e = multiply(X(-1), inv("Y", Exponent(-1)));
    auto h = TestFunction::bump(1.5, 0.5);
    double one = pair_numeric(X(-1), h).value;
    auto p = pair_numeric(e, {{"X", h}, {"Y", h}});
    EXPECT_NEAR(p.value, one * one, 1e-10 * one * one);
}

TEST(DirectLimit, ConvergesBelowThreshold) {
    auto rep = direct_limit_check(X(-1, 1), TestFunction::gaussian(1.0));
    EXPECT_TRUE(rep.converged);
    EXPECT_LT(rep.increments.back(), 1e-6);
    double full = pair_numeric(overline(X(-1, 1), 4), TestFunction::gaussian(1.0)).value;
    EXPECT_NEAR(rep.limit, full, 1e-6 * std::abs(full));
}

TEST(DirectLimit, FlagsBoundaryCase) {
    EXPECT_THROW((void)direct_limit_check(X(-2), TestFunction::gaussian(1.0)), NoConvergence);
}

TEST(DirectLimit, VanishingTestFunctionRescuesBoundaryCase) {
    auto rep = direct_limit_check(X(-2), TestFunction::gaussian(1.0, {0.0, 1.0}));
    EXPECT_TRUE(rep.converged);
}

TEST(ScalingFit, LogarithmicExtension) {
    auto fit = scaling_fit(overline(X(-1, 1) * q(1, 4), 4), TestFunction::gaussian(1.0), Rational(2));
    EXPECT_EQ(fit.degree, 1u);
    EXPECT_LT(fit.residual, 1e-8);
}

TEST(ScalingFit, HomogeneousWithoutLogs) {
    auto fit = scaling_fit(X(-1), TestFunction::gaussian(1.0), Rational(2));
    EXPECT_EQ(fit.degree, 0u);
}

TEST(ScalingFit, RenormalizedSettingSunRow) {
    PipelineOptions o;
    o.metric = eucl;
    o.normalization = Normalization::literal;
    auto ss = setting_sun_pipeline(o);
    PairingOptions po;
    po.values = {{"a0", 1.0}, {"a1", 0.7}, {"A1", 0.2}, {"C0", 0.3}, {"C1", -0.4}, {"C", 0.1}};
    Expr u21 = ss.extension.extended.row(2, 1);
    auto h = TestFunction::gaussian(1.0);
    auto fit = scaling_fit(u21, h, Rational(4), {}, 1e-8, po);
    unsigned power = ss.extension.row_results.at({2, 1}).output_homogeneity->power;
    EXPECT_LE(fit.degree, power + 1);
    EXPECT_GE(fit.degree, 1u);
}

TEST(Oracle, MomentRestrictionIdentity) {
    auto h = TestFunction::bump(1.5, 0.5);
    Expr ext = moment_extension(1, X(-2, 1), 4);
    EXPECT_EQ(restrict_away_from_origin(ext, 4, eucl), X(-2) * q(2));
    auto lhs = pair_numeric(ext, h), rhs = pair_numeric(X(-2) * q(2), h);
    EXPECT_NEAR(lhs.value, rhs.value, 1e-6 + lhs.error + rhs.error);
    Expr ext2 = moment_extension(2, X(-1), 4);
    EXPECT_NEAR(pair_numeric(ext2, h).value, pair_numeric(X(-1) * q(6), h).value, 1e-6);
}

TEST(Pairing, SquaredBoxAgainstTestFunctionNonVanishingAtOrigin) {
    // <box box Overline(log(M^2 X)/(32X)), exp(-r^2)> = pi^2 (-3/2 - gamma) in closed form
    Expr e = apply_box("X", apply_box("X", overline(X(-1, 1) * q(1, 32), 4), eucl), eucl);
    auto p = pair_numeric(e, TestFunction::gaussian(1.0));
    const double pi = 3.14159265358979323846, gamma = 0.57721566490153286061;
    EXPECT_NEAR(p.value, pi * pi * (-1.5 - gamma), 1e-8);
}
