#include "eqca/eqca.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "eqca/report.hpp"

struct eqca_rule {
    eqca::RuleTable rule;
};

struct eqca_report {
    std::string json;
    std::string text;
    std::string artifact;
    bool passed;
};

namespace {

thread_local std::string last_error;

eqca_status status_of(eqca::ErrorCode code) {
    switch (code) {
        case eqca::ErrorCode::invalid_argument: return EQCA_INVALID_ARGUMENT;
        case eqca::ErrorCode::alphabet_mismatch: return EQCA_ALPHABET_MISMATCH;
        case eqca::ErrorCode::budget_exceeded: return EQCA_BUDGET_EXCEEDED;
        case eqca::ErrorCode::insufficient_window: return EQCA_INSUFFICIENT_WINDOW;
        case eqca::ErrorCode::parse_error: return EQCA_PARSE_ERROR;
        case eqca::ErrorCode::witness_invalid: return EQCA_WITNESS_INVALID;
    }
    return EQCA_INTERNAL;
}

template <class F>
eqca_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return EQCA_OK;
    } catch (const eqca::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed JSON: ") + e.what();
        return EQCA_PARSE_ERROR;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return EQCA_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return EQCA_INTERNAL;
    }
}

eqca_status null_argument(const char* what) {
    last_error = std::string(what) + " must not be null";
    return EQCA_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* eqca_version(void) { return eqca::kToolkitVersion; }

const char* eqca_status_name(eqca_status status) {
    switch (status) {
        case EQCA_OK: return "ok";
        case EQCA_INVALID_ARGUMENT: return "invalid argument";
        case EQCA_ALPHABET_MISMATCH: return "alphabet mismatch";
        case EQCA_BUDGET_EXCEEDED: return "budget exceeded";
        case EQCA_INSUFFICIENT_WINDOW: return "insufficient window";
        case EQCA_PARSE_ERROR: return "parse error";
        case EQCA_WITNESS_INVALID: return "witness invalid";
        case EQCA_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* eqca_last_error(void) { return last_error.c_str(); }

eqca_status eqca_rule_from_eca(int wolfram_number, eqca_rule** out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = new eqca_rule{eqca::eca(wolfram_number)}; });
}

eqca_status eqca_rule_from_json(const char* json, eqca_rule** out) {
    if (!json) return null_argument("json");
    if (!out) return null_argument("out");
    return guarded([&] { *out = new eqca_rule{eqca::rule_from_json(nlohmann::json::parse(json))}; });
}

eqca_status eqca_rule_from_table(int alphabet_size, int radius, const uint8_t* table, size_t length,
                                 eqca_rule** out) {
    if (!table && length) return null_argument("table");
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new eqca_rule{eqca::RuleTable(alphabet_size, radius, std::vector<eqca::Letter>(table, table + length))};
    });
}

void eqca_rule_free(eqca_rule* rule) { delete rule; }

int eqca_rule_alphabet_size(const eqca_rule* rule) { return rule ? rule->rule.alphabet_size() : 0; }

int eqca_rule_radius(const eqca_rule* rule) { return rule ? rule->rule.radius() : -1; }

uint64_t eqca_rule_hash(const eqca_rule* rule) { return rule ? rule->rule.hash() : 0; }

eqca_status eqca_rule_to_json(const eqca_rule* rule, char** json_out) {
    if (!rule) return null_argument("rule");
    if (!json_out) return null_argument("json_out");
    return guarded([&] { *json_out = copy_string(eqca::rule_to_json(rule->rule).dump()); });
}

eqca_status eqca_step_cyclic(const eqca_rule* rule, const uint8_t* cells, size_t length, uint8_t* out) {
    if (!rule) return null_argument("rule");
    if (length && (!cells || !out)) return null_argument("cells");
    return guarded([&] {
        if (!length) return;
        const eqca::CyclicConfig x{eqca::Word(cells, cells + length)};
        eqca::check_letters(rule->rule.alphabet_size(), x.cells);
        const eqca::CyclicConfig y = eqca::step(rule->rule, x);
        std::memcpy(out, y.cells.data(), length);
    });
}

eqca_status eqca_analyze(const eqca_rule* rule, const char* command, const char* params_json, eqca_report** out) {
    if (!rule) return null_argument("rule");
    if (!command) return null_argument("command");
    if (!out) return null_argument("out");
    return guarded([&] {
        const nlohmann::json params = params_json ? nlohmann::json::parse(params_json) : nlohmann::json::object();
        eqca::AnalysisResult res = eqca::analyze(rule->rule, command, params);
        *out = new eqca_report{res.report.dump(2) + "\n", std::move(res.text), std::move(res.artifact), res.passed};
    });
}

const char* eqca_report_json(const eqca_report* report) { return report ? report->json.c_str() : ""; }

const char* eqca_report_text(const eqca_report* report) { return report ? report->text.c_str() : ""; }

const uint8_t* eqca_report_artifact(const eqca_report* report, size_t* length) {
    if (!report) {
        if (length) *length = 0;
        return nullptr;
    }
    if (length) *length = report->artifact.size();
    return reinterpret_cast<const uint8_t*>(report->artifact.data());
}

int eqca_report_passed(const eqca_report* report) { return report && report->passed ? 1 : 0; }

void eqca_report_free(eqca_report* report) { delete report; }

void eqca_string_free(char* s) { std::free(s); }

}  // extern "C"
