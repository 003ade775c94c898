#include <doctest.h>

#include "eqca/report.hpp"

using namespace eqca;
using nlohmann::json;

namespace {

json cheap_params(const std::string& command) {
    if (command == "simulate") return {{"init", "0110"}, {"steps", 4}};
    if (command == "blocking.certify") return {{"word", "0"}};
    if (command == "blocking.falsify") return {{"word", "0"}, {"samples", 100}, {"horizon", 8}};
    if (command == "blocking.search") return {{"lmax", 2}};
    if (command == "gilman.estimate") return {{"samples", 100}, {"n", {1, 2}}};
    if (command == "gilman.classify") return {{"samples", 100}, {"n", {1, 2}}};
    if (command == "factor.verify") return {{"windows", 50}, {"point", "0"}};
    if (command == "spectrum.correlate" || command == "spectrum.scan") return {{"horizon", 20}, {"period", 8}};
    return json::object();
}

ErrorCode code_of(const RuleTable& rule, const std::string& command, const json& params) {
    try {
        analyze(rule, command, params);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("every command produces a versioned report") {
    for (const std::string& command : analysis_commands()) {
        CAPTURE(command);
        const AnalysisResult r = analyze(eca(51), command, cheap_params(command));
        const json& j = r.report;
        CHECK(j.at("schema") == kReportSchema);
        CHECK(j.at("toolkit_version") == kToolkitVersion);
        CHECK(j.at("command") == command);
        CHECK(j.at("rule").at("alphabet_size") == 2);
        CHECK(j.at("rule").at("radius") == 1);
        CHECK(j.at("rule").at("hash") == hex64(eca(51).hash()));
        CHECK(j.at("params").is_object());
        CHECK(!j.at("params").contains("threads"));
        CHECK(j.at("result").is_object());
        CHECK(j.at("passed") == r.passed);
        CHECK(!r.text.empty());
    }
}

TEST_CASE("reports record resolved parameters") {
    const json p = analyze(eca(4), "blocking.falsify", {{"word", "0"}}).report.at("params");
    CHECK(p.at("horizon") == 32);
    CHECK(p.at("samples") == 500);
    CHECK(p.at("s") == 1);
    CHECK(p.at("seed") == 1);
}

TEST_CASE("classify example report") {
    const json r = analyze(eca(4), "classify", json::object()).report.at("result");
    CHECK(r.at("verdict") == "GLOBALLY_EQUICONTINUOUS");
    CHECK(r.at("global") == json{{"preperiod", 1}, {"period", 1}});
    const json r170 = analyze(eca(170), "blocking.certify", {{"word", "00"}}).report.at("result");
    CHECK(r170.at("verdict") == "inconclusive");
    CHECK(r170.at("certificate").is_null());
}

TEST_CASE("simulate renders the space-time diagram") {
    const AnalysisResult r = analyze(eca(51), "simulate", {{"init", "0"}, {"steps", 4}});
    CHECK(r.artifact == ".\n#\n.\n#\n.\n");
    const AnalysisResult pgm = analyze(eca(51), "simulate", {{"init", "01"}, {"steps", 1}, {"format", "pgm"}});
    CHECK(pgm.artifact.rfind("P5\n2 2\n255\n", 0) == 0);
    const AnalysisResult win = analyze(eca(170), "simulate", {{"init", "0110@0"}, {"steps", 1}});
    CHECK(win.report.at("result").at("rows") == json{"11", "10"});
}

TEST_CASE("reports do not depend on the thread count") {
    for (const std::string command : {"blocking.falsify", "gilman.estimate", "factor.verify", "spectrum.scan"}) {
        json p1 = cheap_params(command);
        json p4 = p1;
        p1["threads"] = 1;
        p4["threads"] = 4;
        CHECK_MESSAGE(analyze(eca(110), command, p1).report == analyze(eca(110), command, p4).report, command);
    }
}

TEST_CASE("seeds change sampled results") {
    const json a = analyze(eca(30), "spectrum.correlate", {{"method", "mc"}, {"samples", 500}, {"seed", 1}}).report;
    const json b = analyze(eca(30), "spectrum.correlate", {{"method", "mc"}, {"samples", 500}, {"seed", 2}}).report;
    CHECK(a.at("result") != b.at("result"));
}

TEST_CASE("scan accepts an explicit series") {
    json series = json::array();
    for (int n = 0; n < 32; ++n) series.push_back(n % 2 ? -1.0 : 1.0);
    const json r = analyze(eca(204), "spectrum.scan", {{"series", series}}).report.at("result");
    REQUIRE(!r.at("peaks").empty());
    CHECK(r.at("peaks")[0].at("verdict") == "RATIONAL(1/2)");
}

TEST_CASE("failures map to error codes") {
    CHECK(code_of(eca(4), "classify", {{"bogus", 1}}) == ErrorCode::invalid_argument);
    CHECK(code_of(eca(4), "no.such.command", json::object()) == ErrorCode::invalid_argument);
    CHECK(code_of(eca(4), "blocking.certify", {{"word", 3}}) == ErrorCode::parse_error);
    CHECK(code_of(eca(4), "blocking.certify", {{"word", "0-"}}) == ErrorCode::parse_error);
    CHECK(code_of(eca(4), "blocking.certify", {{"word", "0x"}}) == ErrorCode::alphabet_mismatch);
    CHECK(code_of(eca(4), "simulate", {{"init", "0110@0"}, {"steps", 16}}) == ErrorCode::insufficient_window);
    CHECK(code_of(eca(106), "surjective", {{"subset_budget", 2}}) == ErrorCode::budget_exceeded);
    CHECK(code_of(eca(4), "gilman.estimate", {{"spec", {0.2, 0.3, 0.5}}}) == ErrorCode::alphabet_mismatch);
    CHECK(code_of(eca(170), "factor.build", json::object()) == ErrorCode::witness_invalid);
    CHECK(code_of(eca(4), "classify", json::array()) == ErrorCode::parse_error);
}

TEST_CASE("rule JSON round-trips") {
    const RuleTable r = rule_from_json(json{{"eca", 110}});
    CHECK(r == eca(110));
    CHECK(rule_from_json(rule_to_json(r)) == r);
    const RuleTable q3 = rule_from_json(json{{"alphabet_size", 3}, {"radius", 0}, {"table", {1, 2, 0}}});
    CHECK(q3.alphabet_size() == 3);
    CHECK(q3.at(2) == 0);
    CHECK_THROWS_AS(rule_from_json(json{{"alphabet_size", 2}, {"radius", 0}}), Error);
    CHECK_THROWS_AS(rule_from_json(json{{"eca", 256}}), Error);
    CHECK(hex64(0xabc) == "0000000000000abc");
}

}
