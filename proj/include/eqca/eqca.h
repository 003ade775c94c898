#ifndef EQCA_H
#define EQCA_H

/* C interface to the eqca cellular automata toolkit. Every call returns an
 * eqca_status; on failure eqca_last_error() describes the problem for the
 * calling thread. Strings returned through out-parameters are owned by the
 * caller and released with eqca_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(EQCA_BUILDING)
#define EQCA_API __attribute__((visibility("default")))
#else
#define EQCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eqca_status {
    EQCA_OK = 0,
    EQCA_INVALID_ARGUMENT = 1,
    EQCA_ALPHABET_MISMATCH = 2,
    EQCA_BUDGET_EXCEEDED = 3,
    EQCA_INSUFFICIENT_WINDOW = 4,
    EQCA_PARSE_ERROR = 5,
    EQCA_WITNESS_INVALID = 6,
    EQCA_INTERNAL = 7
} eqca_status;

typedef struct eqca_rule eqca_rule;
typedef struct eqca_report eqca_report;

EQCA_API const char* eqca_version(void);
EQCA_API const char* eqca_status_name(eqca_status status);
EQCA_API const char* eqca_last_error(void);

EQCA_API eqca_status eqca_rule_from_eca(int wolfram_number, eqca_rule** out);
/* {"alphabet_size": q, "radius": r, "table": [...]} or {"eca": n} */
EQCA_API eqca_status eqca_rule_from_json(const char* json, eqca_rule** out);
EQCA_API eqca_status eqca_rule_from_table(int alphabet_size, int radius, const uint8_t* table, size_t length,
                                          eqca_rule** out);
EQCA_API void eqca_rule_free(eqca_rule* rule);

EQCA_API int eqca_rule_alphabet_size(const eqca_rule* rule);
EQCA_API int eqca_rule_radius(const eqca_rule* rule);
EQCA_API uint64_t eqca_rule_hash(const eqca_rule* rule);
EQCA_API eqca_status eqca_rule_to_json(const eqca_rule* rule, char** json_out);

/* One step on the cyclic configuration cells[0..length); writes length letters. */
EQCA_API eqca_status eqca_step_cyclic(const eqca_rule* rule, const uint8_t* cells, size_t length, uint8_t* out);

/* Runs a named analysis ("simulate", "blocking.certify", "blocking.falsify",
 * "blocking.search", "blocking.classify", "classify", "surjective",
 * "gilman.estimate", "gilman.classify", "factor.build", "factor.verify",
 * "spectrum.correlate", "spectrum.scan", "spectrum.orbits",
 * "spectrum.compare-shift") with parameters given as a JSON object (may be
 * NULL). A "threads" parameter caps parallelism and does not affect output. */
EQCA_API eqca_status eqca_analyze(const eqca_rule* rule, const char* command, const char* params_json,
                                  eqca_report** out);
EQCA_API const char* eqca_report_json(const eqca_report* report);
EQCA_API const char* eqca_report_text(const eqca_report* report);
/* Rendered space-time diagram of "simulate" (ASCII or binary PGM). */
EQCA_API const uint8_t* eqca_report_artifact(const eqca_report* report, size_t* length);
/* 0 when the analysis found a failure such as a commutation mismatch. */
EQCA_API int eqca_report_passed(const eqca_report* report);
EQCA_API void eqca_report_free(eqca_report* report);

EQCA_API void eqca_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
