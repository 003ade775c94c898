#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "eqca/eqca.h"

namespace {

struct Rule {
    eqca_rule* p = nullptr;
    ~Rule() { eqca_rule_free(p); }
};

struct Report {
    eqca_report* p = nullptr;
    ~Report() { eqca_report_free(p); }
};

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(eqca_version()) == "1.0.0");
    CHECK(std::string(eqca_status_name(EQCA_OK)) == "ok");
    CHECK(std::string(eqca_status_name(EQCA_BUDGET_EXCEEDED)) == "budget exceeded");
    CHECK(std::string(eqca_status_name(static_cast<eqca_status>(99))) == "unknown status");
}

TEST_CASE("rules from numbers, JSON and tables") {
    Rule a, b, c;
    REQUIRE(eqca_rule_from_eca(110, &a.p) == EQCA_OK);
    REQUIRE(eqca_rule_from_json("{\"eca\": 110}", &b.p) == EQCA_OK);
    const uint8_t table[] = {0, 1, 1, 1, 0, 1, 1, 0};
    REQUIRE(eqca_rule_from_table(2, 1, table, 8, &c.p) == EQCA_OK);
    CHECK(eqca_rule_hash(a.p) == eqca_rule_hash(b.p));
    CHECK(eqca_rule_hash(a.p) == eqca_rule_hash(c.p));
    CHECK(eqca_rule_alphabet_size(a.p) == 2);
    CHECK(eqca_rule_radius(a.p) == 1);

    char* json = nullptr;
    REQUIRE(eqca_rule_to_json(a.p, &json) == EQCA_OK);
    CHECK(std::strstr(json, "\"table\"") != nullptr);
    eqca_string_free(json);

    eqca_rule* bad = nullptr;
    CHECK(eqca_rule_from_eca(256, &bad) == EQCA_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(std::strlen(eqca_last_error()) > 0);
    CHECK(eqca_rule_from_json("{not json", &bad) == EQCA_PARSE_ERROR);
    CHECK(eqca_rule_from_table(2, 1, table, 7, &bad) == EQCA_INVALID_ARGUMENT);
    CHECK(eqca_rule_from_eca(4, nullptr) == EQCA_INVALID_ARGUMENT);
}

TEST_CASE("cyclic step") {
    Rule r;
    REQUIRE(eqca_rule_from_eca(170, &r.p) == EQCA_OK);
    const uint8_t cells[] = {0, 1, 1, 0};
    uint8_t out[4] = {};
    REQUIRE(eqca_step_cyclic(r.p, cells, 4, out) == EQCA_OK);
    CHECK(std::vector<uint8_t>(out, out + 4) == std::vector<uint8_t>{1, 1, 0, 0});
    const uint8_t wrong[] = {0, 2};
    CHECK(eqca_step_cyclic(r.p, wrong, 2, out) == EQCA_ALPHABET_MISMATCH);
}

TEST_CASE("analysis reports") {
    Rule r;
    REQUIRE(eqca_rule_from_eca(4, &r.p) == EQCA_OK);
    Report rep;
    REQUIRE(eqca_analyze(r.p, "classify", nullptr, &rep.p) == EQCA_OK);
    const std::string json = eqca_report_json(rep.p);
    CHECK(json.find("\"GLOBALLY_EQUICONTINUOUS\"") != std::string::npos);
    CHECK(json.find("\"eqca.report/1\"") != std::string::npos);
    CHECK(eqca_report_passed(rep.p) == 1);
    CHECK(std::strlen(eqca_report_text(rep.p)) > 0);

    Report sim;
    REQUIRE(eqca_analyze(r.p, "simulate", "{\"init\": \"010\", \"steps\": 1}", &sim.p) == EQCA_OK);
    size_t len = 0;
    const uint8_t* art = eqca_report_artifact(sim.p, &len);
    CHECK(std::string(reinterpret_cast<const char*>(art), len) == ".#.\n.#.\n");
}

TEST_CASE("analysis errors") {
    Rule r;
    REQUIRE(eqca_rule_from_eca(4, &r.p) == EQCA_OK);
    eqca_report* rep = nullptr;
    CHECK(eqca_analyze(r.p, "simulate", "{\"init\": \"0110@0\", \"steps\": 16}", &rep) == EQCA_INSUFFICIENT_WINDOW);
    CHECK(rep == nullptr);
    CHECK(std::string(eqca_last_error()).find("cannot support") != std::string::npos);
    CHECK(eqca_analyze(r.p, "classify", "[1", &rep) == EQCA_PARSE_ERROR);
    CHECK(eqca_analyze(r.p, "nonsense", nullptr, &rep) == EQCA_INVALID_ARGUMENT);
    CHECK(eqca_analyze(nullptr, "classify", nullptr, &rep) == EQCA_INVALID_ARGUMENT);

    Rule r170;
    REQUIRE(eqca_rule_from_eca(170, &r170.p) == EQCA_OK);
    CHECK(eqca_analyze(r170.p, "factor.build", nullptr, &rep) == EQCA_WITNESS_INVALID);
}
