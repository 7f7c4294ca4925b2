#include "smx/cli.hpp"
#include "smx/json_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace smx;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli_run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST(Cli, HelpExitsZero) {
    auto r = run({"expand", "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST(Cli, HatDocumentBrackets) {
    auto r = run({"example", "setting-sun-hat", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json doc = Json::parse(r.out);
    EXPECT_EQ(doc["schema"], "smx/1");
    const auto& b = doc["ms"]["v21"]["brackets"];
    EXPECT_EQ(coeff_from_json(b["1"]["poly"]),
              CoeffPoly::symbol("ell", 2) * CoeffPoly(make_rational(1, 32)) + CoeffPoly::symbol("ell") * CoeffPoly(make_rational(1, 2)));
    EXPECT_EQ(coeff_from_json(b["2"]["poly"]), CoeffPoly::symbol("ell", 2) * CoeffPoly(make_rational(-1, 32)));
}

TEST(Cli, VerifyDirectLimit) {
    auto r = run({"verify", "direct-limit", "--tolerance", "1e-6"});
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, ExpandModelPower) {
    auto r = run({"expand", "--model", "feynman", "--power", "3", "--normalization", "literal", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    SmExpansion s = sm_from_json(Json::parse(r.out)["table"]);
    EXPECT_EQ(s.degree, 6);
    EXPECT_EQ(s.row(0, 0), inv("X", -3) * CoeffPoly::symbol("a0", 3));
}

TEST(Cli, ExtendReportsMinimalSubtraction) {
    auto r = run({"extend", "--expr", "X^-2", "--method", "ms", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json doc = Json::parse(r.out);
    EXPECT_EQ(doc["laurent"]["pole_order"], 1);
    EXPECT_TRUE(doc["pass"].get<bool>());
}

TEST(Cli, ErrorsAreJsonOnStderr) {
    auto r = run({"extend", "--expr", "X^-2", "--method", "direct"});
    EXPECT_EQ(r.code, exit_error);
    Json e = Json::parse(r.err);
    EXPECT_EQ(e["error"]["code"], "DivergentDirect");

    r = run({"example", "no-such-pipeline"});
    EXPECT_EQ(r.code, exit_error);
    EXPECT_EQ(Json::parse(r.err)["error"]["code"], "UsageError");

    r = run({"dimreg", "--d", "5"});
    EXPECT_EQ(Json::parse(r.err)["error"]["code"], "OddDimension");

    r = run({"expand", "--expr", "X^"});
    EXPECT_EQ(Json::parse(r.err)["error"]["code"], "ParseError");
}

TEST(Cli, SeededReportsAreByteIdentical) {
    auto a = run({"verify", "extraction", "--seed", "7", "--json"});
    auto b = run({"verify", "extraction", "--seed", "7", "--json"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto c = run({"example", "setting-sun", "--json"});
    auto d = run({"example", "setting-sun", "--json"});
    EXPECT_EQ(c.out, d.out);
}

TEST(Cli, ExamplesPass) {
    for (const char* name : {"setting-sun", "hadamard-split", "freedom"}) EXPECT_EQ(run({"example", name}).code, 0) << name;
    EXPECT_EQ(run({"dimreg"}).code, 0);
    EXPECT_EQ(run({"dimreg", "--d", "6", "--lines", "3"}).code, 0);
}
