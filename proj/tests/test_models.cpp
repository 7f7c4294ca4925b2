#include "smx/errors.hpp"
#include "smx/models.hpp"

#include <gtest/gtest.h>

using namespace smx;

namespace {

const MetricConvention mink = MetricConvention::minkowski(4);
CoeffPoly q(long p, long d = 1) { return CoeffPoly(make_rational(p, d)); }
CoeffPoly sym(const char* s, unsigned n = 1) { return CoeffPoly::symbol(s, n); }
Expr X(long a, unsigned log = 0) { return inv("X", Exponent(a), log); }

PipelineOptions literal() {
    PipelineOptions o;
    o.normalization = Normalization::literal;
    return o;
}

} // namespace

TEST(Propagator, FeynmanTable) {
    auto s = propagator_sm(PropagatorModel::of(PropagatorKind::feynman), 2);
    EXPECT_EQ(s.degree, 2);
    EXPECT_EQ(s.row(0, 0), X(-1) * sym("a0"));
    EXPECT_EQ(s.row(2, 0), X(0, 1) * sym("a1") + Expr(sym("A1")));
    EXPECT_EQ(s.row(2, 1), Expr(sym("a1") * q(2)));
    EXPECT_EQ(s.remainder.order, 4u);
    EXPECT_TRUE(sm_check(s).all_pass());
    EXPECT_THROW((void)propagator_sm(PropagatorModel::of(PropagatorKind::feynman), 6), TruncationTooSmall);
}

TEST(Propagator, WightmanHasDegreeTwo) {
    auto s = propagator_sm(PropagatorModel::of(PropagatorKind::wightman), 2);
    EXPECT_EQ(s.degree, 2);
    EXPECT_TRUE(sm_check(s).all_pass());
}

TEST(Propagator, HadamardSwapsTheLogRow) {
    auto h = propagator_sm(PropagatorModel::of(PropagatorKind::hadamard), 2);
    EXPECT_TRUE(h.row(2, 1).is_zero());
    EXPECT_TRUE(h.row(2, 0).atoms().rbegin()->second.depends_on("lmu") ||
                h.row(2, 0).atoms().begin()->second.depends_on("lmu"));
    EXPECT_TRUE(sm_check(h).all_pass());
}

TEST(Propagator, HigherDimensionRows) {
    auto s = propagator_sm(PropagatorModel::of(PropagatorKind::feynman, 6), 4);
    EXPECT_EQ(s.degree, 4);
    EXPECT_EQ(s.row(0, 0), X(-2) * sym("a0"));
    EXPECT_EQ(s.row(2, 0), X(-1) * sym("a1"));
    EXPECT_EQ(s.row(4, 1), Expr(sym("a2") * q(2)));
    EXPECT_TRUE(sm_check(s).all_pass());
}

TEST(Vev, PairingsAndNormalization) {
    Expr F(sym("F"));
    EXPECT_EQ(two_vertex_vev(3, 3, F), Expr(sym("F", 3) * sym("hbar", 3) * q(6)));
    EXPECT_EQ(two_vertex_vev(2, 2, F), Expr(sym("F", 2) * sym("hbar", 2) * q(2)));
    EXPECT_TRUE(two_vertex_vev(2, 3, F).is_zero());
    EXPECT_EQ(two_vertex_vev(3, 3, F, Normalization::literal), Expr(sym("F", 3)));
}

TEST(HadamardSplit, FourTermIdentity) {
    auto rep = hadamard_split_check(4, 2);
    for (const auto& l : rep.lines) EXPECT_TRUE(l.pass) << l.name << ": " << l.detail;
}

TEST(SettingSun, UnrenormalizedTable) {
    auto r = setting_sun_pipeline(literal());
    const auto& s = r.input;
    EXPECT_EQ(s.degree, 6);
    EXPECT_EQ(s.row(0, 0), X(-3) * sym("a0", 3));
    EXPECT_EQ(s.row(2, 0), (X(-2, 1) * sym("a1") + X(-2) * sym("A1")) * (sym("a0", 2) * q(3)));
    EXPECT_EQ(s.row(2, 1), X(-2) * (sym("a0", 2) * sym("a1") * q(6)));
    EXPECT_TRUE(s.row(1, 0).is_zero());
    EXPECT_EQ(r.remainder_bound, Rational(3));
    for (const auto& l : r.report.lines) EXPECT_TRUE(l.pass) << l.name;
}

TEST(SettingSun, RenormalizedRows) {
    auto r = setting_sun_pipeline(literal());
    const auto& e = r.extension.extended;
    Expr u21 = apply_box("X", overline(X(-1, 1) * q(1, 4), 4), mink) * (sym("a0", 2) * sym("a1") * q(6)) +
               delta({"X"}, 4) * sym("C1");
    EXPECT_EQ(e.row(2, 1), u21);
    Expr u0 = -apply_box("X", apply_box("X", overline(X(-1, 1) * q(1, 32), 4), mink), mink) * sym("a0", 3) +
              delta({"X"}, 4, {DiffOp::box("X")}) * sym("C");
    EXPECT_EQ(e.row(0, 0), u0);
    EXPECT_EQ(r.extension.row_results.at({2, 0}).counterterms.at(0).constant, "C0");
}

TEST(SettingSun, WickNormalizationScalesRows) {
    auto wick = setting_sun_pipeline();
    auto lit = setting_sun_pipeline(literal());
    EXPECT_EQ(wick.input.row(0, 0), lit.input.row(0, 0) * (sym("hbar", 3) * q(6)));
}

TEST(Hat, RowsBracketsAndPoles) {
    auto r = setting_sun_hat_pipeline(literal());
    EXPECT_EQ(r.input.degree, 10);
    EXPECT_EQ(r.input.ambient_k, 8u);
    EXPECT_EQ(r.extension.l0, 2u);
    for (const auto& l : r.report.lines) EXPECT_TRUE(l.pass) << l.name;

    const auto& W = r.subdiagram_table;
    Expr inv_xy = multiply(X(-1), inv("Y", Exponent(-1)));
    Expr v21 = multiply(W.row(2, 1), inv_xy) * sym("a0", 2) +
               multiply(W.row(0, 0), X(-1) + inv("Y", Exponent(-1))) * (sym("a0") * sym("a1") * q(2));
    EXPECT_EQ(r.input.row(2, 1), v21);

    EXPECT_EQ(r.pole_orders.at({2, 1}), 2u);
    EXPECT_EQ(r.pole_orders.at({2, 0}), 3u);
    EXPECT_EQ(r.pole_orders.at({0, 0}), 2u);
    auto ell = [](unsigned n) { return n ? CoeffPoly::symbol("ell", n) : CoeffPoly(1); };
    EXPECT_EQ(r.brackets.at({2, 1}).at(1), ell(2) * q(1, 32) + ell(1) * q(1, 2));
    EXPECT_EQ(r.brackets.at({0, 0}).at(4), ell(2) * q(-1, 64) + q(7, 8));

    const auto& ct0 = r.extension.row_results.at({0, 0}).counterterms;
    ASSERT_EQ(ct0.size(), 2u);
    EXPECT_EQ(ct0[0].constant, "C2");
    EXPECT_EQ(ct0[1].constant, "C3");
    EXPECT_EQ(ct0[1].pattern, delta({"X", "Y"}, 8, {DiffOp::dot("X", "Y")}));
}

TEST(Freedom, HatAndSettingSun) {
    auto hat = setting_sun_hat_pipeline(literal());
    auto rep = renorm_freedom_scan(hat.extension, {"X", "Y"});
    ASSERT_EQ(rep.entries.size(), 3u);
    EXPECT_EQ(rep.entries[0].mass_power, 2u);
    EXPECT_EQ(rep.entries[0].sm_restriction, Expr::symbol("C0") + mass(0, 1) * sym("C1"));
    EXPECT_EQ(rep.entries[1].sm_restriction, Expr::symbol("C2"));
    EXPECT_EQ(rep.entries[2].sm_restriction, Expr::symbol("C3"));

    auto ss = setting_sun_pipeline(literal());
    auto rs = renorm_freedom_scan(ss.extension, {"X"});
    EXPECT_EQ(rs.basis.size(), 3u);
    EXPECT_EQ(rs.entries.size(), 2u);

    SmExtension small;
    small.input = propagator_sm(PropagatorModel::of(PropagatorKind::feynman), 2);
    EXPECT_TRUE(renorm_freedom_scan(small, {"X"}).entries.empty());
}
