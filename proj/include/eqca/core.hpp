#pragma once

// Exact one-dimensional cellular automata: local rule tables, spatially
// periodic and windowed configurations, space-time traces.
//
// Intervals are half-open: Interval{i, s} covers positions i, ..., i+s-1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqca/error.hpp"

namespace eqca {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kDefaultSubsetBudget = std::uint64_t{1} << 20;

// q^e, throwing budget_exceeded once the value passes `limit`.
std::uint64_t checked_pow(std::uint64_t q, std::uint64_t e, std::uint64_t limit = UINT64_MAX);

/// Local rule of radius r over letters 0..q-1. Entry k of the table is the
/// image of the neighborhood whose radix-q (Horner, leftmost digit most
/// significant) encoding is k.
class RuleTable {
public:
    RuleTable(int alphabet_size, int radius, std::vector<Letter> table);

    int alphabet_size() const noexcept { return q_; }
    int radius() const noexcept { return r_; }
    int span() const noexcept { return 2 * r_ + 1; }
    std::size_t size() const noexcept { return table_.size(); }
    const std::vector<Letter>& table() const noexcept { return table_; }

    Letter at(std::size_t index) const { return table_[index]; }
    Letter operator()(std::span<const Letter> neighborhood) const;
    std::size_t index_of(std::span<const Letter> neighborhood) const;

    // FNV-1a over (q, r, table); stable across platforms.
    std::uint64_t hash() const noexcept;

    bool operator==(const RuleTable&) const = default;

private:
    int q_;
    int r_;
    std::vector<Letter> table_;
};

/// Elementary rule by Wolfram number: f(a,b,c) is bit 4a+2b+c.
RuleTable eca(int wolfram_number);

/// Radius-0 identity over q letters.
RuleTable identity_rule(int alphabet_size);

/// The left shift x_i <- x_{i+1} as a radius-1 rule over q letters.
RuleTable shift_rule(int alphabet_size);

struct Interval {
    std::int64_t start = 0;
    std::size_t width = 0;

    std::int64_t end() const noexcept { return start + static_cast<std::int64_t>(width); }
    bool operator==(const Interval&) const = default;
};

/// Spatially periodic configuration: position i holds cells[i mod n].
struct CyclicConfig {
    Word cells;

    std::size_t period() const noexcept { return cells.size(); }
    Letter at(std::int64_t i) const;
    Word read(Interval iv) const;
    // result.at(i) == at(i + k)
    CyclicConfig rotated(std::int64_t k) const;

    bool operator==(const CyclicConfig&) const = default;
};

/// Configuration known exactly on [offset, offset + cells.size()).
struct WindowConfig {
    std::int64_t offset = 0;
    Word cells;

    bool empty() const noexcept { return cells.empty(); }
    Interval interval() const noexcept { return {offset, cells.size()}; }
    std::int64_t end() const noexcept { return offset + static_cast<std::int64_t>(cells.size()); }
    bool covers(Interval iv) const noexcept { return iv.start >= offset && iv.end() <= end(); }
    Letter at(std::int64_t i) const;
    Word read(Interval iv) const;
    WindowConfig restricted(Interval iv) const;

    bool operator==(const WindowConfig&) const = default;
};

/// rows[j] is F^j(x) restricted to `interval`, j = 0..horizon.
struct Trace {
    int alphabet_size = 2;
    Interval interval;
    std::vector<Word> rows;

    std::size_t horizon() const noexcept { return rows.empty() ? 0 : rows.size() - 1; }
    bool operator==(const Trace&) const = default;
};

struct TemporalCycle {
    std::size_t preperiod = 0;
    std::size_t period = 1;
    bool operator==(const TemporalCycle&) const = default;
};

struct CycleResult {
    TemporalCycle cycle;
    std::vector<CyclicConfig> states;  // F^(p0)(x), ..., F^(p0+p-1)(x)
};

void check_letters(int alphabet_size, std::span<const Letter> word);

CyclicConfig step(const RuleTable& rule, const CyclicConfig& x);
// Offset grows by r, length shrinks by 2r; empty once the window is exhausted.
WindowConfig step(const RuleTable& rule, const WindowConfig& x);

CyclicConfig iterate(const RuleTable& rule, CyclicConfig x, std::size_t steps);

Trace trace(const RuleTable& rule, const CyclicConfig& x, Interval iv, std::size_t horizon);
// Throws insufficient_window unless x covers the horizon light cone of iv.
Trace trace(const RuleTable& rule, const WindowConfig& x, Interval iv, std::size_t horizon);

// Light cone needed to know iv exactly after `horizon` steps.
Interval light_cone(const RuleTable& rule, Interval iv, std::size_t horizon);

/// Minimal preperiod and period of the orbit of x (Brent's algorithm).
CycleResult detect_temporal_cycle(const RuleTable& rule, const CyclicConfig& x);

/// Eventual periodicity of an arbitrary sequence given by its first terms
/// plus the knowledge that s(k + period) = s(k) for k >= preperiod; returns
/// the minimal pair.
template <class Seq>
TemporalCycle minimize_cycle(const Seq& s, TemporalCycle bound) {
    const std::size_t p0 = bound.preperiod;
    std::size_t best = bound.period;
    for (std::size_t d = 1; d < bound.period; ++d) {
        if (bound.period % d != 0) continue;
        bool ok = true;
        for (std::size_t k = p0; k < p0 + bound.period && ok; ++k) ok = s[k] == s[p0 + (k - p0 + d) % bound.period];
        if (ok) {
            best = d;
            break;
        }
    }
    std::size_t pre = p0;
    while (pre > 0 && s[pre - 1] == s[pre - 1 + best]) --pre;
    return {pre, best};
}

/// outer(inner(x)) as a table of radius r_outer + r_inner.
RuleTable compose(const RuleTable& outer, const RuleTable& inner, std::uint64_t budget = kDefaultTableBudget);

/// F^k as a table of radius k*r; k == 0 yields the radius-0 identity.
RuleTable compose_rule(const RuleTable& rule, std::size_t k, std::uint64_t budget = kDefaultTableBudget);

/// Same map, neighborhood padded with ignored cells to `radius`.
RuleTable widen(const RuleTable& rule, int radius, std::uint64_t budget = kDefaultTableBudget);

/// Equality of the global maps of two rules over the same alphabet.
bool same_map(const RuleTable& a, const RuleTable& b);

struct SurjectivityResult {
    bool surjective = false;
    bool balanced = false;             // every letter has q^(2r) preimage neighborhoods
    std::optional<Word> orphan;        // shortest garden-of-eden word when not surjective
    std::size_t subsets_explored = 0;
};

/// Whether some word of length |word| + 2r maps onto `word`: a path in the
/// de Bruijn graph of width-2r words labeled by `word`.
bool has_preimage(const RuleTable& rule, std::span<const Letter> word);

/// Balance pretest followed by breadth-first subset construction on the
/// de Bruijn graph of width-2r words.
SurjectivityResult is_surjective(const RuleTable& rule, std::uint64_t subset_budget = kDefaultSubsetBudget);

enum class RenderFormat { ascii, pgm };

std::string render_spacetime(const Trace& t, RenderFormat format);
char glyph(int alphabet_size, Letter a);

Word parse_word(const std::string& text, int alphabet_size);
std::string format_word(std::span<const Letter> word);

}  // namespace eqca
