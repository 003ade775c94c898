#pragma once

// Blocking words: sound certification by per-cell set abstraction, random
// falsification by exact simulation, and the topological (Kurka) report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqca/core.hpp"

namespace eqca {

inline constexpr std::size_t kDefaultMaxSteps = 4096;
inline constexpr std::uint64_t kDefaultSeed = 1;

/// Bitmask of letters; the abstraction supports alphabets of up to 64 letters.
using LetterSet = std::uint64_t;

LetterSet full_set(int alphabet_size);

/// Per-cell letter sets on [offset, offset + cells.size()); every cell outside
/// the window is the full alphabet at every time.
struct SetWord {
    std::int64_t offset = 0;
    std::vector<LetterSet> cells;

    static SetWord from_window(const WindowConfig& x);
    // Defined when every cell is a singleton.
    std::optional<WindowConfig> to_window() const;

    bool operator==(const SetWord&) const = default;
};

/// Cell i becomes the image of f over the product of the sets at i-r..i+r;
/// the window stays in place.
SetWord abstract_step(const RuleTable& rule, const SetWord& s);

struct BlockingCertificate {
    Word word;
    std::size_t s = 1;
    std::size_t p = 0;
    std::size_t margin = 0;
    std::size_t preperiod = 0;  // of the abstract orbit
    std::size_t period = 1;
    std::size_t steps = 0;      // distinct abstract states visited = preperiod + period
    std::vector<Word> witness;  // certified s-window at each visited step
    std::uint64_t replay_hash = 0;
};

struct CertifyResult {
    std::optional<BlockingCertificate> certificate;
    bool orbit_closed = false;
    std::size_t steps = 0;
    std::string reason;  // why no certificate, when there is none
};

/// A returned certificate proves w is s-blocking at offset p. The absence
/// of one is "inconclusive", never "not blocking".
CertifyResult certify_blocking(const RuleTable& rule, const Word& w, std::size_t s, std::size_t margin,
                               std::size_t max_steps = kDefaultMaxSteps);

/// Recomputes the abstract orbit and checks every recorded field.
bool replay_certificate(const RuleTable& rule, const BlockingCertificate& cert);

struct Counterexample {
    std::size_t p = 0;
    std::uint64_t sample = 0;
    WindowConfig x;
    WindowConfig y;
    std::size_t time = 0;
    Interval interval;
};

struct FalsifyResult {
    bool refuted = false;  // every admissible offset has a counterexample
    std::vector<std::optional<Counterexample>> per_offset;
    std::size_t samples_used = 0;
};

FalsifyResult falsify_blocking(const RuleTable& rule, const Word& w, std::size_t s, std::size_t horizon,
                               std::size_t samples, std::uint64_t seed, unsigned threads = 1);

/// Certified words of length s..lmax in length-then-lexicographic order.
/// With `skip_extensions`, words containing an earlier certified word are
/// not reported.
std::vector<BlockingCertificate> search_blocking_words(const RuleTable& rule, std::size_t s, std::size_t lmax,
                                                       std::size_t margin, std::size_t max_steps,
                                                       bool skip_extensions = false, unsigned threads = 1);

/// Minimal (p0, p) in lexicographic order with F^(p0+p) = F^(p0) as rule
/// tables, within the given bounds. Throws budget_exceeded when a needed
/// power does not fit the table budget.
std::optional<TemporalCycle> check_global_equicontinuity(const RuleTable& rule, std::size_t max_preperiod,
                                                         std::size_t max_period,
                                                         std::uint64_t table_budget = kDefaultTableBudget);

enum class KurkaVerdict { globally_equicontinuous, has_equicontinuous_points, sensitivity_evidence, inconclusive };

std::string to_string(KurkaVerdict v);

struct KurkaOptions {
    std::size_t max_preperiod = 6;
    std::size_t max_period = 4;
    std::uint64_t table_budget = kDefaultTableBudget;
    std::size_t lmax = 5;
    std::optional<std::size_t> margin;  // defaults to 2r
    std::size_t max_steps = kDefaultMaxSteps;
    std::size_t horizon = 32;
    std::size_t samples = 500;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
};

struct KurkaReport {
    KurkaVerdict verdict = KurkaVerdict::inconclusive;
    std::string global_status;  // "found", "none" or "budget_exceeded"
    std::optional<TemporalCycle> global;
    std::size_t s = 1;
    std::optional<BlockingCertificate> certificate;
    std::size_t words_tested = 0;
    std::size_t words_refuted = 0;
};

KurkaReport classify_kurka(const RuleTable& rule, const KurkaOptions& options = {});

/// All words of the given length over q letters, lexicographically.
std::vector<Word> all_words(int alphabet_size, std::size_t length);

}  // namespace eqca
