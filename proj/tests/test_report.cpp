#include "fixtures.hpp"
#include "singdeg/error.hpp"
#include "singdeg/report.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace singdeg;

namespace {

ErrorCode codeOf(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

VarianceProfile dataFile(const std::string& name) { return readProfile(std::string(SINGDEG_DATA_DIR) + "/" + name); }

}  // namespace

TEST_CASE("profile parsing") {
    const auto csv = parseProfileCsv("1, 0.5\n0.5,0\n\n");
    CHECK(csv.entries() == Eigen::Matrix2d{{1.0, 0.5}, {0.5, 0.0}});
    const auto tiny = parseProfileCsv("1e-300,1\n1,0.0\n");
    CHECK(tiny.pattern() == ZeroPattern::fromRows({{1, 1}, {1, 0}}));
    const auto json = parseProfileJson(R"({"K": 2, "entries": [[1, 0.5], [0.5, 0]]})");
    CHECK(json.entries() == csv.entries());

    CHECK(codeOf([] { parseProfileCsv("1,2\n3\n"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileCsv("1,,2\n"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileCsv("1,nan\nnan,1\n"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileCsv(""); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileCsv("1,2\n1,0\n"); }) == ErrorCode::NotSymmetric);
    CHECK(codeOf([] { parseProfileCsv("1,-1\n-1,0\n"); }) == ErrorCode::NegativeEntry);
    CHECK(codeOf([] { parseProfileJson(R"({"K": 3, "entries": [[1]]})"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileJson(R"({"K": 1, "entries": [["a"]]})"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseProfileJson("{"); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { readProfile("/nonexistent/profile.csv"); }) == ErrorCode::ParseError);

    CHECK(dataFile("anti_k2.json").entries() == dataFile("anti_k2.csv").entries());
    CHECK(dataFile("ten.csv").pattern() == fixtures::tenPattern());
}

TEST_CASE("classification documents") {
    const auto a = classifyDocument(dataFile("ten.csv"));
    CHECK(a["sigma"] == "2/3");
    CHECK(a["longest_chain"]["length"] == 4);
    CHECK(a["schema"] == 1);
    CHECK(a["kappa"].is_null());
    CHECK(a["Q"] == 6);

    const auto ones = classifyDocument(dataFile("ones4.csv"));
    CHECK(ones["support_class"] == "TotalSupport");
    CHECK(ones["sigma"] == "0/1");

    const auto ns = classifyDocument(dataFile("no_support.csv"));
    CHECK(ns["kappa"] == "1/3");
    CHECK(!ns.contains("sigma"));

    CHECK(codeOf([] { classifyDocument(VarianceProfile(Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}})); }) ==
          ErrorCode::ZeroRow);
}

TEST_CASE("canonical serialisation round trip") {
    for (const char* name : {"ten.csv", "ones4.csv", "no_support.csv", "anti_k3.csv"}) {
        const auto text = canonicalDump(classifyDocument(dataFile(name)));
        CHECK(canonicalDump(Json::parse(text)) == text);
    }
    const auto rep = canonicalDump(fullReport(dataFile("anti_k2.csv")));
    CHECK(canonicalDump(Json::parse(rep)) == rep);
    CHECK(canonicalDump(Json{{"b", 0.1}, {"a", 1.0 / 3.0}}) == "{\"a\":0.333333333333,\"b\":0.1}\n");
}

TEST_CASE("full reports") {
    const auto a = fullReport(dataFile("ten.csv"));
    CHECK(a["sigma"] == "2/3");
    REQUIRE(a.contains("residuals"));
    CHECK(a["residuals"]["F0"].get<double>() <= 1e-3);
    for (const auto& x : a["residuals"]["Fl"]) CHECK(x.get<double>() <= 1e-3);
    CHECK(a["scaling_fit"]["blocks"].size() == 7);

    const auto ones = fullReport(dataFile("ones1.csv"));
    CHECK(ones["limit_weights"]["w"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ones["residuals"]["F0"].get<double>() < 1e-9);

    const auto ns = fullReport(dataFile("no_support.csv"));
    CHECK(ns["kappa"] == "1/3");
    CHECK(!ns.contains("scaling_fit"));
    CHECK(std::abs(ns["atom_mass"]["kappa_numeric"].get<double>() - 1.0 / 3.0) < 1e-4);

    ReportOptions broken;
    broken.etaMax = 10.0;
    const auto partial = fullReport(dataFile("anti_k2.csv"), broken);
    CHECK(partial["scaling_fit"].contains("error"));
    CHECK(partial["residuals"].contains("F0"));

    ReportOptions mc;
    mc.withMc = true;
    mc.sizes = {4, 8, 16};
    mc.trials = 5;
    const auto withSweep = fullReport(dataFile("anti_k2.csv"), mc);
    CHECK(withSweep["sweep"]["sizes"].size() == 3);
    CHECK(withSweep["sweep"]["predicted_slope"].get<double>() == doctest::Approx(-1.5));
}
