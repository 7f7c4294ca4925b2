#include "smx/dimreg.hpp"
#include "smx/errors.hpp"
#include "smx/scaling.hpp"

#include <gtest/gtest.h>

using namespace smx;

TEST(LineIndexing, SlotsAndNames) {
    LineIndexing li(3);
    EXPECT_EQ(li.slots(), 3u);
    EXPECT_EQ(li.index(0, 1), 0u);
    EXPECT_EQ(li.index(0, 2), 1u);
    EXPECT_EQ(li.index(2, 1), 2u);
    EXPECT_EQ(li.regulator(2), "zeta23");
    EXPECT_EQ(li.group(1), "X13");
    EXPECT_THROW((void)li.index(1, 1), InvalidArgument);
}

TEST(RegPropagator, JointHomogeneity) {
    for (unsigned d : {4u, 6u}) {
        Expr p = reg_propagator(d, "zeta", "X", RegTruncation{3, 2});
        EXPECT_TRUE(shifted_euler(p, reg_propagator_degree(d, "zeta"), true).is_zero()) << d;
    }
    EXPECT_THROW((void)reg_propagator(5, "zeta", "X"), OddDimension);
}

TEST(RegPropagator, TermGrading) {
    Expr p = reg_propagator(4, "zeta", "X", RegTruncation{2, 1});
    EXPECT_EQ(p.size(), 3u);
    for (const auto& [t, c] : p.atoms()) {
        const auto& pw = t.mono.inv.count("X") ? t.mono.inv.at("X").power : Exponent{};
        if (pw.has_regulator()) {
            // h-terms: X^(l - 1 + zeta) with m^(2l)
            EXPECT_EQ(pw.rat + 1, t.mono.mass_power.rat / 2);
        } else {
            EXPECT_TRUE(t.mono.mass_power.has_regulator());
        }
    }
}

TEST(RegProduct, TwoLinesPopulateBins) {
    LineIndexing li(2);
    auto r = reg_product_sm({{0, 1, 0}, {0, 1, 0}}, li, 4, RegTruncation{2, 1});
    EXPECT_EQ(r.degree, 4);
    EXPECT_EQ(r.lines, 2u);
    EXPECT_EQ(r.complete_order, 1u);
    std::set<std::pair<unsigned, unsigned>> ch;
    for (const auto& [k, e] : r.bins) ch.insert({k.c[0], k.h[0]});
    EXPECT_TRUE(ch.count({0, 2}));
    EXPECT_TRUE(ch.count({1, 1}));
    EXPECT_FALSE(ch.count({2, 0}));   // c c starts at p = 2 > P
    auto wide = reg_product_sm({{0, 1, 0}, {0, 1, 0}}, li, 4, RegTruncation{3, 2});
    ch.clear();
    for (const auto& [k, e] : wide.bins) ch.insert({k.c[0], k.h[0]});
    EXPECT_TRUE(ch.count({2, 0}));
    for (const auto& l : reg_check(wide).lines) EXPECT_TRUE(l.pass) << l.name << " " << l.detail;
}

TEST(RegProduct, SingleLineReproducesPropagatorBins) {
    LineIndexing li(2);
    auto r = reg_product_sm({{0, 1, 0}}, li, 4, RegTruncation{2, 1});
    EXPECT_EQ(r.bins.size(), 3u);
    EXPECT_EQ(r.bins.begin()->first.to_string(), "0:0:1");
}

TEST(RegProduct, BoxRaisesDegree) {
    LineIndexing li(3);
    auto r = reg_product_sm({{0, 1, 0}, {1, 2, 0}}, li, 4, RegTruncation{2, 1});
    auto b = reg_box(r, li.index(0, 1));
    EXPECT_EQ(b.degree, r.degree + 2);
    for (const auto& l : reg_check(b).lines) EXPECT_TRUE(l.pass) << l.name << " " << l.detail;
    auto direct = reg_product_sm({{0, 1, 1}, {1, 2, 0}}, li, 4, RegTruncation{2, 1});
    EXPECT_EQ(direct.bins, b.bins);
}

TEST(RegCheck, FlagsViolation) {
    LineIndexing li(2);
    auto r = reg_product_sm({{0, 1, 0}}, li, 4);
    r.bins[RegBinKey{0, {1}, {0}}] = inv("X12", Exponent(-1));
    auto rep = reg_check(r);
    EXPECT_FALSE(rep.lines.at(0).pass);
    EXPECT_FALSE(rep.lines.at(1).pass);
}

TEST(RegProject, RecoversPlantedComponent) {
    const std::vector<std::string> z{"zeta12", "zeta13"};
    // u_A: degree D - 2p - 2 zeta12 ; u_B: degree D - 2p - 2 zeta13 ; D = 4, p = 0
    Expr uA = multiply(inv("X12", Exponent(-1) + Exponent::regulator("zeta12")), inv("X13", Exponent(-1))) *
              CoeffPoly::symbol("a");
    Expr uB = multiply(inv("X12", Exponent(-1)), inv("X13", Exponent(-1) + Exponent::regulator("zeta13"))) *
              CoeffPoly::symbol("b");
    std::vector<std::vector<unsigned>> cands{{1, 0}, {0, 1}};
    EXPECT_EQ(reg_project_coeff(uA + uB, {1, 0}, cands, Rational(4), 0, z), uA);
    EXPECT_EQ(reg_project_coeff(uA + uB, {0, 1}, cands, Rational(4), 0, z), uB);
    EXPECT_EQ(reg_project_coeff(uA, {1, 0}, {{1, 0}}, Rational(4), 0, z), uA);
    EXPECT_TRUE(reg_project_coeff(uB, {1, 0}, cands, Rational(4), 0, z).is_zero());
    EXPECT_THROW((void)reg_project_coeff(uA, {1, 0}, cands, Rational(4), 0, {"zeta", "zeta"}), DegenerateRegulators);
}
