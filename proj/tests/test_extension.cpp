#include "smx/errors.hpp"
#include "smx/extension.hpp"

#include <gtest/gtest.h>

using namespace smx;

namespace {

const MetricConvention mink = MetricConvention::minkowski(4);

CoeffPoly q(long p, long d = 1) { return CoeffPoly(make_rational(p, d)); }
Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }
Expr Y(long a, unsigned log = 0) { return inv("Y", Exponent(a), log); }
UPoly poly(std::vector<long> c) {
    std::vector<Rational> r(c.begin(), c.end());
    return UPoly(std::move(r));
}

} // namespace

TEST(MomentSolver, SimplePole) {
    auto c = moment_solver(2, 1, Rational(0));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.at(1), RatFunc(poly({1, -2}), poly({0, 0, 1})));
    EXPECT_EQ(c.at(2), RatFunc(poly({-1}), poly({0, 0, 1})));
    EXPECT_TRUE(moment_certificate(c, 2, Rational(0)));
}

TEST(MomentSolver, TriplePole) {
    auto c = moment_solver(3, 1, Rational(0));
    UPoly den = poly({0, 0, 0, 1});
    EXPECT_EQ(c.at(1), RatFunc(poly({-1, 3, -3}), den));
    EXPECT_EQ(c.at(2), RatFunc(poly({3, -3}), den));
    EXPECT_EQ(c.at(3), RatFunc(poly({-1}), den));
    EXPECT_TRUE(moment_certificate(c, 3, Rational(0)));
}

TEST(MomentSolver, ShiftedStart) {
    auto c = moment_solver(2, 3, Rational(2));
    UPoly den = poly({0, 0, 4, 12, 13, 6, 1});
    EXPECT_EQ(c.at(3), RatFunc(poly({2, 2, -6, -4}), den));
    EXPECT_EQ(c.at(4), RatFunc(poly({-2, -6, -3}), den));
    EXPECT_TRUE(moment_certificate(c, 2, Rational(2)));
}

TEST(MomentSolver, CertificateRejectsWrongSolution) {
    auto c = moment_solver(2, 1, Rational(0));
    c.at(2) = c.at(2) + RatFunc(1);
    EXPECT_FALSE(moment_certificate(c, 2, Rational(0)));
}

TEST(MomentSolver, ResonantDegreeAtIntegerEta) {
    EXPECT_THROW((void)moment_solver_at(2, 1, Rational(0), Rational(0)), ResonantDegree);
    EXPECT_THROW((void)moment_solver_at(2, 3, Rational(2), Rational(-1)), ResonantDegree);
    auto v = moment_solver_at(2, 1, Rational(0), make_rational(1, 2));
    EXPECT_EQ(v.at(1), Rational(0));
    EXPECT_EQ(v.at(2), Rational(-4));
}

TEST(Counterterms, SettingSunBasis) {
    CountertermSpec spec;
    spec.groups = {"X"};
    auto basis = counterterm_basis(6, spec);
    ASSERT_EQ(basis.size(), 3u);
    std::size_t with_log = 0, box = 0;
    for (const auto& c : basis) {
        with_log += c.log_power;
        box += c.op_order == 2;
    }
    EXPECT_EQ(with_log, 1u);
    EXPECT_EQ(box, 1u);
}

TEST(Counterterms, TwoVariableOperators) {
    CountertermSpec spec;
    spec.groups = {"X", "Y"};
    auto sym = counterterm_operators(2, spec);
    ASSERT_EQ(sym.size(), 2u);
    Expr d2 = delta({"X", "Y"}, 8, {DiffOp::box("X")}) + delta({"X", "Y"}, 8, {DiffOp::box("Y")});
    EXPECT_EQ(sym[0].pattern, d2);
    EXPECT_EQ(sym[1].pattern, delta({"X", "Y"}, 8, {DiffOp::dot("X", "Y")}));
    spec.symmetric = false;
    EXPECT_EQ(counterterm_operators(2, spec).size(), 3u);
    EXPECT_TRUE(counterterm_operators(1, spec).empty());
    EXPECT_EQ(counterterm_basis(10, CountertermSpec{{"X", "Y"}}).size(), 4u);
}

TEST(Counterterms, NonCovariantCountsMultiIndices) {
    CountertermSpec spec;
    spec.groups = {"X"};
    spec.covariant = false;
    // multi-indices of order 2 in 4 dimensions
    EXPECT_EQ(counterterm_operators(2, spec).size(), 10u);
}

TEST(DiffRen, BelowThresholdIsDirect) {
    auto r = diff_renorm_extend(X(-1), mink);
    EXPECT_EQ(r.method, ExtensionMethod::direct);
    EXPECT_EQ(r.extended, overline(X(-1), 4));
    EXPECT_TRUE(r.restriction_verified);
}

TEST(DiffRen, LogarithmicRow) {
    auto r = diff_renorm_extend(X(-2), mink);
    EXPECT_EQ(r.extended, apply_box("X", overline(X(-1, 1) * q(1, 4), 4), mink));
    ASSERT_EQ(r.counterterms.size(), 1u);
    EXPECT_EQ(r.counterterms[0].pattern, delta({"X"}, 4));
    EXPECT_TRUE(r.restriction_verified);
}

TEST(DiffRen, LogTimesLogarithmicRow) {
    auto r = diff_renorm_extend(X(-2, 1), mink);
    Expr g = (X(-1, 2) + X(-1, 1) * q(2)) * q(1, 8);
    EXPECT_EQ(r.extended, apply_box("X", overline(g, 4), mink));
    EXPECT_TRUE(r.restriction_verified);
}

TEST(DiffRen, QuadraticRowNeedsTwoBoxes) {
    auto r = diff_renorm_extend(X(-3), mink, "C");
    Expr inner = overline(X(-1, 1) * q(1, 32), 4);
    Expr expected = -apply_box("X", apply_box("X", inner, mink), mink);
    EXPECT_EQ(r.extended, expected);
    Expr full = expected + delta({"X"}, 4, {DiffOp::box("X")}) * CoeffPoly::symbol("C");
    EXPECT_EQ(r.with_counterterms(), full);
    EXPECT_TRUE(r.restriction_verified);
    ASSERT_TRUE(r.output_homogeneity);
    EXPECT_EQ(r.output_homogeneity->degree, Exponent(6));
    EXPECT_EQ(r.output_homogeneity->power, 1u);
}

TEST(Regularized, TwoVariableMoment) {
    Expr v0 = multiply(X(-2), Y(-2));
    auto r = regularized_extend(v0, 8, RegulatorSpec{"zeta", {"X", "Y"}}, mink);
    EXPECT_EQ(r.method, ExtensionMethod::moment);
    EXPECT_TRUE(r.restriction_verified);
    ASSERT_TRUE(r.moment);
    EXPECT_EQ(r.moment->l_min, 1u);
    EXPECT_EQ(r.moment->annihilator_order, 1u);
    EXPECT_EQ(r.moment->eta_per_regulator, Rational(-4));
    auto s = laurent_expand(r, 0);
    EXPECT_EQ(s.pole_order(), 1u);
    auto ms = minimal_subtract(s, {});
    EXPECT_EQ(restrict_away_from_origin(ms.extended, 8, mink), v0);
    EXPECT_EQ(ms.extended, assemble_from_brackets(v0, *r.moment, ms_brackets(*r.moment), 8));
}

TEST(Regularized, BelowThresholdIsDirect) {
    auto r = regularized_extend(multiply(X(-1), Y(-1)), 8, RegulatorSpec{"zeta", {"X", "Y"}}, mink);
    EXPECT_EQ(r.method, ExtensionMethod::direct);
}

TEST(Laurent, SimplePoleAndTruncation) {
    Expr e = inv("X", Exponent::regulator("zeta"));
    auto s = laurent_expand(e, RatFunc(UPoly(1), UPoly::x()), "zeta", 0);
    EXPECT_EQ(s.coefficient(-1), Expr(1));
    EXPECT_EQ(s.coefficient(0), log_inv("X"));
    EXPECT_EQ(s.pole_order(), 1u);
    EXPECT_THROW((void)s.coefficient(1), TruncationTooSmall);
    EXPECT_EQ(s.principal_part().coefficients.size(), 1u);
}

TEST(Laurent, RegulatorInMassAndCoefficients) {
    Expr e = mass(Exponent::regulator("zeta") * 2) * (CoeffPoly(1) + CoeffPoly::symbol("zeta"));
    auto ser = regulator_series(e, "zeta", 1);
    EXPECT_EQ(ser[0], Expr(1));
    EXPECT_EQ(ser[1], Expr(1) + mass(0, 1) * q(2));
}

TEST(Brackets, HatRows) {
    MomentData md;
    md.eta_per_regulator = Rational(-4);
    auto ell = [](unsigned n) { return n ? CoeffPoly::symbol("ell", n) : CoeffPoly(1); };

    md.coefficients = moment_solver(2, 1, Rational(0));
    auto b21 = ms_brackets(md);
    EXPECT_EQ(b21.at(1), ell(2) * q(1, 32) + ell(1) * q(1, 2));
    EXPECT_EQ(b21.at(2), ell(2) * q(-1, 32));

    md.coefficients = moment_solver(3, 1, Rational(0));
    auto b20 = ms_brackets(md);
    EXPECT_EQ(b20.at(1), ell(3) * q(1, 384) + ell(2) * q(3, 32) + ell(1) * q(3, 4));
    EXPECT_EQ(b20.at(2), ell(3) * q(-1, 128) + ell(2) * q(-3, 32));
    EXPECT_EQ(b20.at(3), ell(3) * q(1, 384));

    md.coefficients = moment_solver(2, 3, Rational(2));
    auto b0 = ms_brackets(md);
    EXPECT_EQ(b0.at(3), ell(2) * q(1, 64) + ell(1) * q(1, 4) + q(-1, 8));
    EXPECT_EQ(b0.at(4), ell(2) * q(-1, 64) + q(7, 8));
}

TEST(ExtendSm, TruncationTooSmall) {
    SmExpansion s = sm_trivial(X(-3), 6, 1, 4);
    EXPECT_THROW((void)extend_sm(s), TruncationTooSmall);
}

TEST(ExtendSm, RRelationDropsRows) {
    SmExpansion s;
    s.degree = 4;
    s.order = 2;
    s.ambient_k = 4;
    s.set_row(0, 0, X(-2));
    s.set_row(2, 0, X(-1));
    s.remainder = Remainder{"r", Rational(4), 3, {"X"}, 0, 0};
    auto ext = extend_sm(s);
    EXPECT_EQ(ext.l0, 0u);
    EXPECT_TRUE(ext.row_results.at({0, 0}).restriction_verified);
    EXPECT_EQ(ext.row_results.at({2, 0}).method, ExtensionMethod::direct);
    Expr r0 = r_relation_remainder(ext, 0);
    EXPECT_EQ(r0, ext.extended_remainder);
    EXPECT_THROW((void)r_relation_remainder(ext, 1), InvalidArgument);
}
