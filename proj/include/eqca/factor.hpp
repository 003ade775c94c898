#pragma once

// Equicontinuous counter-CA factors: splicing of trace repeats, phase sets
// of eventually periodic central windows, the counter CA, the factor map and
// a checker for the commutation pi(F(x)) = C(pi(x)).

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eqca/core.hpp"

namespace eqca {

/// The shift-periodic configuration (uw)^infinity. Its canonical rotation
/// starts with u; the window [center - r, center + r] of the cyclic form is w.
struct PeriodicPoint {
    Word u;
    Word w;

    CyclicConfig cyclic() const;
    // Index of the middle letter of w inside cyclic().
    std::int64_t w_center() const { return static_cast<std::int64_t>(u.size() + (w.size() - 1) / 2); }

    /// The same configuration read around position 0 of y: w = y(-r, r).
    /// Periods shorter than 2r+1 are unrolled first.
    static PeriodicPoint around_origin(const CyclicConfig& y, int radius);
};

/// y_left . w . (uw)^copies . u . w . y_right, placed so that the middle
/// letter of the first w sits at position 0. copies == 0 gives y back.
WindowConfig splice(const Word& y_left, const Word& w, const Word& u, const Word& y_right, std::size_t copies);

PeriodicPoint splice_limit(const Word& u, const Word& w);

struct TraceRepeat {
    Word w;
    Word u;
    std::size_t distance = 0;  // |u| + |w|
};

/// Smallest distance p >= 2r+1 (and below the period) at which the
/// width-(2r+1) window trace at p agrees with the one at 0 up to `horizon`.
std::optional<TraceRepeat> find_trace_repeat(const RuleTable& rule, const CyclicConfig& y, std::size_t horizon);

/// Temporal cycle of central windows: rows[k] is the window at time p0 + k.
struct PhaseSet {
    std::size_t preperiod = 0;
    std::size_t period = 1;
    std::vector<Word> rows;
    PeriodicPoint source;
};

/// Minimal eventual cycle of the central window of z.
PhaseSet build_phase_set(const RuleTable& rule, const PeriodicPoint& z);

/// Same, with the preperiod fixed to `preperiod` (no minimization of p0).
PhaseSet build_phase_set_from(const RuleTable& rule, const PeriodicPoint& z, std::size_t preperiod);

/// Radius-0 rule over {0..p}: a -> (a+1) mod p for a < p, p fixed.
struct CounterCA {
    std::size_t modulus = 1;
    RuleTable rule;

    Letter sink() const { return static_cast<Letter>(modulus); }
    Letter apply(Letter a) const { return rule.at(a); }
};

CounterCA counter_ca(std::size_t modulus);

/// pi(x)_i = k when the window trace at i from time p0 through p0 + lock
/// follows rows[(k + j) mod p]; the sink letter p otherwise.
struct FactorMap {
    RuleTable rule;
    PhaseSet phases;
    std::size_t lock = 1;  // number of steps checked past p0; at least p

    std::size_t horizon() const { return phases.preperiod + lock; }
    Letter sink() const { return static_cast<Letter>(phases.period); }
    std::uint64_t rule_hash() const { return rule.hash(); }
};

FactorMap make_factor_map(const RuleTable& rule, PhaseSet phases, std::optional<std::size_t> lock = std::nullopt);

/// Phase for a single local trace (rows 0..horizon of one window).
Letter phase_of(const FactorMap& pi, const std::vector<Word>& window_rows);

Word apply_factor_map(const FactorMap& pi, const CyclicConfig& x, Interval iv);
Word apply_factor_map(const FactorMap& pi, const WindowConfig& x, Interval iv);

struct Mismatch {
    std::size_t input = 0;
    std::int64_t position = 0;
    Letter pi_of_fx = 0;
    Letter c_of_pix = 0;
    Letter pi_of_x = 0;
    Word context;  // input cells around the position (cyclic: one period)
};

struct CommutationReport {
    std::size_t inputs = 0;
    std::size_t positions_checked = 0;
    std::size_t locked_positions = 0;  // pi(x)_i != sink
    std::size_t mismatch_count = 0;
    std::vector<Mismatch> mismatches;  // first few, in input order
    bool pass() const { return mismatch_count == 0; }
};

using FactorInput = std::variant<CyclicConfig, WindowConfig>;

/// `dynamics` is the map F being checked; normally pi.rule.
CommutationReport verify_commutation(const RuleTable& dynamics, const FactorMap& pi, const CounterCA& counter,
                                     const std::vector<FactorInput>& inputs, unsigned threads = 1,
                                     std::size_t keep = 16);

/// Every cyclic configuration of period 1..max_period.
std::vector<FactorInput> exhaustive_cyclic_inputs(int alphabet_size, std::size_t max_period);

/// `count` uniform random windows of `width` cells at offset 0.
std::vector<FactorInput> sampled_window_inputs(int alphabet_size, std::size_t count, std::size_t width,
                                               std::uint64_t seed);

struct TopologicalFactor {
    FactorMap map;
    CounterCA counter;
    CommutationReport verification;
};

/// Factor of a globally equicontinuous rule with F^(p0+p) = F^(p0). Phases
/// come from the all-zero configuration with the witness preperiod; the
/// lock spans the witness period. Verified on every cyclic configuration up
/// to `verify_period`.
TopologicalFactor build_topological_factor(const RuleTable& rule, TemporalCycle witness,
                                           std::size_t verify_period = 8, unsigned threads = 1);

}  // namespace eqca
