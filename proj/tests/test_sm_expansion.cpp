#include "smx/errors.hpp"
#include "smx/sm_expansion.hpp"

#include <gtest/gtest.h>

using namespace smx;

namespace {

Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }
Expr sym(const char* s) { return Expr::symbol(s); }

SmExpansion propagator_table() {
    SmExpansion s;
    s.degree = 2;
    s.order = 2;
    s.ambient_k = 4;
    s.set_row(0, 0, sym("a0") * X(-1));
    s.set_row(2, 0, sym("a1") * log_inv("X") + sym("A1"));
    s.set_row(2, 1, sym("a1") * CoeffPoly(2));
    s.remainder = Remainder{"prop", Rational(2), 4, {"X"}, 0, 0};
    return s;
}

} // namespace

TEST(SmTable, CubeOfPropagator) {
    auto p = propagator_table();
    auto cube = sm_product(sm_product(p, p), p);
    EXPECT_EQ(cube.degree, 6);
    EXPECT_EQ(cube.order, 2u);
    EXPECT_EQ(cube.ambient_k, 4u);
    EXPECT_EQ(cube.row(0, 0), Expr::symbol("a0", 3) * X(-3));
    Expr u20 = (sym("a1") * log_inv("X") + sym("A1")) * X(-2) * (CoeffPoly::symbol("a0", 2) * CoeffPoly(3));
    EXPECT_EQ(cube.row(2, 0), u20);
    EXPECT_EQ(cube.row(2, 1), X(-2) * (CoeffPoly::symbol("a0", 2) * CoeffPoly::symbol("a1") * CoeffPoly(6)));
    EXPECT_TRUE(sm_check(cube).all_pass());
    EXPECT_EQ(sm_remainder_bound(cube), Rational(3));
    EXPECT_GE(cube.remainder.order, 3u);
}

TEST(SmTable, DisjointGroupsAddAmbientDimension) {
    auto p = propagator_table();
    SmExpansion q = p;
    for (auto& [key, e] : q.rows) e = rename_group(e, "X", "Y");
    q.remainder.groups = {"Y"};
    EXPECT_EQ(sm_product(p, q).ambient_k, 8u);
}

TEST(SmTable, CheckFlagsViolations) {
    auto p = propagator_table();
    p.set_row(0, 1, X(-1));
    p.set_row(1, 0, mass(1) * X(-1));
    auto rep = sm_check(p);
    EXPECT_FALSE(rep.properties.at("A").pass);
    EXPECT_FALSE(rep.properties.at("B").pass);
    EXPECT_FALSE(rep.properties.at("C").pass);
    p = propagator_table();
    p.remainder.order = 2;
    EXPECT_FALSE(sm_check(p).properties.at("E").pass);
}

TEST(SmTable, AddAndScale) {
    auto p = propagator_table();
    auto two = sm_add(p, p);
    EXPECT_EQ(two.rows, sm_scale(p, CoeffPoly(2)).rows);
}

TEST(SmTable, BoxDerivative) {
    auto p = propagator_table();
    auto b = sm_derivative(p, DerivativeRequest::box("X"), MetricConvention::minkowski(4));
    EXPECT_EQ(b.degree, 4);
    EXPECT_TRUE(b.row(0, 0).is_zero());
    EXPECT_THROW((void)sm_derivative(p, DerivativeRequest::partial({1, 0, 0, 0}), MetricConvention{}), UnsupportedDerivative);
}

TEST(Extraction, RecoversLogRows) {
    MassSampler f = [](const HighPrecision& m) { return 2 + m * m * (3 * log(m) + 5) + pow(m, 4); };
    ExtractionOptions o;
    o.m_max = 1e-6;
    auto rows = sm_extract_from_samples(f, 0, 2, 1, o);
    EXPECT_NEAR(rows.at(0).coefficients.at(0), 2, 1e-6);
    EXPECT_NEAR(rows.at(0).coefficients.at(1), 0, 1e-6);
    EXPECT_NEAR(rows.at(1).coefficients.at(0), 0, 1e-4);
    EXPECT_NEAR(rows.at(2).coefficients.at(1), 3, 1e-4);
    EXPECT_NEAR(rows.at(2).coefficients.at(0), 5, 1e-3);
}

TEST(Extraction, TooLowStartDiverges) {
    MassSampler f = [](const HighPrecision& m) { return 2 + m * m * (3 * log(m) + 5); };
    ExtractionOptions o;
    o.m_max = 1e-6;
    EXPECT_THROW((void)sm_extract_from_samples(f, 0, 2, 0, o), DivergentLimit);
}
