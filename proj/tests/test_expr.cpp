#include "smx/errors.hpp"
#include "smx/expr.hpp"
#include "smx/scaling.hpp"

#include <gtest/gtest.h>

using namespace smx;

namespace {

const MetricConvention mink = MetricConvention::minkowski(4);
const MetricConvention eucl = MetricConvention::euclidean(4);

CoeffPoly q(long p, long d = 1) { return CoeffPoly(make_rational(p, d)); }
Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }
Expr c(const char* s) { return Expr::symbol(s); }

} // namespace

TEST(Multiply, ExponentsAdd) {
    Expr a0X = c("a0") * X(-1);
    EXPECT_EQ(multiply(a0X, a0X), Expr::symbol("a0", 2) * X(-2));
    Expr lhs = mass(2, 1) * X(-1);
    Expr rhs = mass(2) * X(-1);
    EXPECT_EQ(multiply(lhs, rhs), mass(4, 1) * X(-2));
}

TEST(Multiply, LogsOfDifferentGroupsStaySeparate) {
    Expr e = multiply(log_inv("X"), log_inv("Y"));
    EXPECT_EQ(e.atoms().begin()->first.mono.inv.size(), 2u);
}

TEST(Multiply, DeltaTimesSingularSameGroupIsIllDefined) {
    Expr d = delta({"X"}, 4);
    EXPECT_THROW((void)multiply(d, X(-1)), IllDefinedProduct);
    EXPECT_THROW((void)multiply(X(-1, 1), d), IllDefinedProduct);
    EXPECT_NO_THROW((void)multiply(d, inv("Y", Exponent(-1))));
    EXPECT_NO_THROW((void)multiply(d, X(2)));
}

TEST(Multiply, TwoExtensionsAtTheSamePointAreIllDefined) {
    Expr o = overline(X(-1), 4);
    EXPECT_THROW((void)multiply(o, o), IllDefinedProduct);
}

TEST(Box, MasslessWaveEquation) { EXPECT_TRUE(apply_box("X", X(-1), mink).is_zero()); }

TEST(Box, LogOverFourX) {
    EXPECT_EQ(apply_box("X", X(-1, 1) * q(1, 4), mink), X(-2));
    EXPECT_EQ(apply_box("X", X(-1, 1) * q(1, 4), eucl), -X(-2));
}

TEST(Box, LogSquaredRow) {
    Expr g = (X(-1, 2) + X(-1, 1) * q(2)) * q(1, 8);
    EXPECT_EQ(apply_box("X", g, mink), X(-2, 1));
}

TEST(Box, DoubleBoxSign) {
    Expr g = X(-1, 1) * q(1, 32);
    Expr bb = apply_box("X", apply_box("X", g, mink), mink);
    EXPECT_EQ(bb, -X(-3));
    EXPECT_EQ(apply_box("X", X(-2), mink), X(-3) * q(-8));
}

TEST(Box, FormalOnExtensionsAndDeltas) {
    Expr o = overline(X(-1, 1), 4);
    Expr b = apply_box("X", o * q(1, 4), mink);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<BoxOp>(b.atoms().begin()->first.factors.front()));
    Expr bd = apply_box("X", delta({"X"}, 4), mink);
    EXPECT_EQ(bd, delta({"X"}, 4, {DiffOp::box("X")}));
    EXPECT_THROW((void)apply_box("X", multiply(o, inv("Y", Exponent(-1))) + X(-1) * o, mink), Error);
}

TEST(Euler, HomogeneousPropagator) {
    Expr e = c("a0") * X(-1);
    EXPECT_TRUE(shifted_euler(e, Exponent(2), false).is_zero());
}

TEST(Euler, RegulatedTwoVariableRow) {
    Exponent reg = Exponent::regulator("z");
    Expr v = multiply(inv("X", Exponent(-3) + reg), inv("Y", Exponent(-1) + reg));
    // E + 8 + eta with eta = -4 z
    Exponent shift = Exponent(8) + Exponent::regulator("z", -4);
    EXPECT_TRUE(shifted_euler(shifted_euler(v, shift, false), shift, false).is_zero());
    EXPECT_TRUE(shifted_euler(v, shift, false).is_zero());
}

TEST(Euler, MassRule) {
    Expr e = mass(2, 1);
    EXPECT_EQ(shifted_euler(e, Exponent(2), true), -mass(2));
}

TEST(Euler, CommutesWithOverline) {
    Expr f = X(-1, 1);
    Expr lhs = apply_euler(overline(f, 4), false);
    Expr rhs = overline(apply_euler(f, false), 4);
    EXPECT_EQ(lhs, rhs);
}

TEST(Euler, DeltaGrading) {
    Expr d = delta({"X"}, 4, {DiffOp::partial({1, 1, 0, 0})});
    EXPECT_EQ(apply_euler(d, false), d * q(-6));
}

TEST(MomentDivReduce, EigenvalueExamples) {
    Exponent reg = Exponent::regulator("z");
    Expr v = multiply(inv("X", Exponent(-3) + reg), inv("Y", Exponent(-1) + reg));
    CoeffPoly eta = CoeffPoly::symbol("z") * q(-4);
    EXPECT_EQ(moment_div_reduce(1, v, 8), v * -eta);
    EXPECT_EQ(moment_div_reduce(2, v, 8), v * (eta * eta - eta));
    EXPECT_EQ(moment_div_reduce(1, Expr(1), 8), Expr(8));
}

TEST(MassDimension, Examples) {
    EXPECT_EQ(mass_dimension(Expr::symbol("a0", 3) * X(-3)), Rational(6));
    EXPECT_EQ(mass_dimension(delta({"X"}, 4, {DiffOp::partial({2, 0, 0, 0})})), Rational(6));
    EXPECT_EQ(mass_dimension(mass(2, 1) * X(-2)), Rational(6));
    EXPECT_THROW((void)mass_dimension(X(-1) + X(-2)), InhomogeneousDimension);
}

TEST(Overline, RejectsNonIntegrable) {
    EXPECT_THROW((void)overline(X(-2), 4), DivergentDirect);
    EXPECT_NO_THROW((void)overline(X(-1, 3), 4));
    EXPECT_THROW((void)moment_extension(1, X(-3), 4), DivergentDirect);
    EXPECT_NO_THROW((void)moment_extension(3, X(-3), 4));
}

TEST(Restriction, UnwrapsAndDropsOriginTerms) {
    Expr ext = apply_box("X", overline(X(-1, 1), 4), mink) * q(1, 4) + c("C") * delta({"X"}, 4);
    EXPECT_EQ(restrict_away_from_origin(ext, 4, mink), X(-2));
}

TEST(Restriction, MomentDivergenceReduces) {
    Expr f = X(-2, 1);
    Expr ext = moment_extension(1, f, 4);
    EXPECT_EQ(restrict_away_from_origin(ext, 4, mink), moment_div_reduce(1, f, 4));
    // (4+E) X^-2 L = 2 X^-2
    EXPECT_EQ(restrict_away_from_origin(ext, 4, mink), X(-2) * q(2));
    EXPECT_EQ(restrict_away_from_origin(moment_extension(2, X(-1), 4), 4, mink), X(-1) * q(6));
}

TEST(Expr, PrintsReadably) {
    Expr e = Expr::symbol("a0", 3) * X(-3) + mass(2, 1) * X(-2) * q(6);
    EXPECT_EQ(e.to_string(), "a0^3*X^-3 + 6*m^2*log(m/M)*X^-2");
}

TEST(Expr, RenameGroup) {
    Expr e = overline(X(-1, 1), 4) + delta({"X"}, 4, {DiffOp::box("X")});
    Expr r = rename_group(e, "X", "W");
    EXPECT_EQ(r.groups(), std::set<Group>{"W"});
    EXPECT_EQ(rename_group(r, "W", "X"), e);
}
