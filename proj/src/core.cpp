#include "eqca/core.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace eqca {

namespace {

constexpr std::string_view kGlyphs = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::int64_t mod(std::int64_t a, std::int64_t n) {
    const std::int64_t m = a % n;
    return m < 0 ? m + n : m;
}

}  // namespace

std::uint64_t checked_pow(std::uint64_t q, std::uint64_t e, std::uint64_t limit) {
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (q != 0 && v > limit / q) {
            std::ostringstream os;
            os << "table budget exceeded: " << q << "^" << e << " entries, budget " << limit;
            fail(ErrorCode::budget_exceeded, os.str());
        }
        v *= q;
    }
    if (v > limit) {
        std::ostringstream os;
        os << "table budget exceeded: " << q << "^" << e << " entries, budget " << limit;
        fail(ErrorCode::budget_exceeded, os.str());
    }
    return v;
}

RuleTable::RuleTable(int alphabet_size, int radius, std::vector<Letter> table)
    : q_(alphabet_size), r_(radius), table_(std::move(table)) {
    if (q_ < 1 || q_ > 256) fail(ErrorCode::invalid_argument, "alphabet size must lie in 1..256");
    if (r_ < 0) fail(ErrorCode::invalid_argument, "radius must be nonnegative");
    const std::uint64_t expected = checked_pow(static_cast<std::uint64_t>(q_), static_cast<std::uint64_t>(span()),
                                               std::uint64_t{1} << 32);
    if (table_.size() != expected) {
        std::ostringstream os;
        os << "rule table has " << table_.size() << " entries, expected " << expected;
        fail(ErrorCode::invalid_argument, os.str());
    }
    for (Letter a : table_)
        if (a >= q_) fail(ErrorCode::invalid_argument, "rule table entry outside the alphabet");
}

std::size_t RuleTable::index_of(std::span<const Letter> neighborhood) const {
    std::size_t idx = 0;
    for (Letter a : neighborhood) idx = idx * static_cast<std::size_t>(q_) + a;
    return idx;
}

Letter RuleTable::operator()(std::span<const Letter> neighborhood) const {
    if (neighborhood.size() != static_cast<std::size_t>(span()))
        fail(ErrorCode::invalid_argument, "neighborhood length must be 2r+1");
    return table_[index_of(neighborhood)];
}

std::uint64_t RuleTable::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte & 0xff;
        h *= 0x100000001b3ULL;
    };
    for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint64_t>(q_) >> shift);
    for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint64_t>(r_) >> shift);
    for (Letter a : table_) mix(a);
    return h;
}

RuleTable eca(int wolfram_number) {
    if (wolfram_number < 0 || wolfram_number > 255) {
        std::ostringstream os;
        os << "elementary rule number " << wolfram_number << " outside 0..255";
        fail(ErrorCode::invalid_argument, os.str());
    }
    std::vector<Letter> table(8);
    for (int k = 0; k < 8; ++k) table[k] = static_cast<Letter>((wolfram_number >> k) & 1);
    return RuleTable(2, 1, std::move(table));
}

RuleTable identity_rule(int alphabet_size) {
    std::vector<Letter> table(static_cast<std::size_t>(alphabet_size));
    for (int a = 0; a < alphabet_size; ++a) table[a] = static_cast<Letter>(a);
    return RuleTable(alphabet_size, 0, std::move(table));
}

RuleTable shift_rule(int alphabet_size) {
    const auto q = static_cast<std::size_t>(alphabet_size);
    std::vector<Letter> table(q * q * q);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = static_cast<Letter>(k % q);
    return RuleTable(alphabet_size, 1, std::move(table));
}

void check_letters(int alphabet_size, std::span<const Letter> word) {
    for (Letter a : word)
        if (a >= alphabet_size) {
            std::ostringstream os;
            os << "letter " << int(a) << " outside 0.." << alphabet_size - 1;
            fail(ErrorCode::alphabet_mismatch, os.str());
        }
}

Letter CyclicConfig::at(std::int64_t i) const {
    return cells[static_cast<std::size_t>(mod(i, static_cast<std::int64_t>(cells.size())))];
}

Word CyclicConfig::read(Interval iv) const {
    Word out(iv.width);
    for (std::size_t k = 0; k < iv.width; ++k) out[k] = at(iv.start + static_cast<std::int64_t>(k));
    return out;
}

CyclicConfig CyclicConfig::rotated(std::int64_t k) const {
    return CyclicConfig{read({k, cells.size()})};
}

Letter WindowConfig::at(std::int64_t i) const {
    if (i < offset || i >= end()) {
        std::ostringstream os;
        os << "position " << i << " outside window [" << offset << ", " << end() << ")";
        fail(ErrorCode::insufficient_window, os.str());
    }
    return cells[static_cast<std::size_t>(i - offset)];
}

Word WindowConfig::read(Interval iv) const {
    if (!covers(iv)) {
        std::ostringstream os;
        os << "insufficient window: need [" << iv.start << ", " << iv.end() << "), have [" << offset << ", " << end()
           << ")";
        fail(ErrorCode::insufficient_window, os.str());
    }
    const auto first = cells.begin() + (iv.start - offset);
    return Word(first, first + static_cast<std::ptrdiff_t>(iv.width));
}

WindowConfig WindowConfig::restricted(Interval iv) const { return WindowConfig{iv.start, read(iv)}; }

CyclicConfig step(const RuleTable& rule, const CyclicConfig& x) {
    check_letters(rule.alphabet_size(), x.cells);
    const std::size_t n = x.period();
    if (n == 0) return x;
    const auto q = static_cast<std::size_t>(rule.alphabet_size());
    const std::int64_t r = rule.radius();
    const std::size_t high = rule.size() / q;  // q^(2r)
    CyclicConfig out{Word(n)};
    std::size_t idx = 0;
    for (std::int64_t d = -r; d <= r; ++d) idx = idx * q + x.at(d);
    for (std::size_t i = 0; i < n; ++i) {
        out.cells[i] = rule.at(idx);
        idx = (idx % high) * q + x.at(static_cast<std::int64_t>(i) + 1 + r);
    }
    return out;
}

WindowConfig step(const RuleTable& rule, const WindowConfig& x) {
    check_letters(rule.alphabet_size(), x.cells);
    const auto span = static_cast<std::size_t>(rule.span());
    if (x.cells.size() < span) return WindowConfig{x.offset + rule.radius(), {}};
    const auto q = static_cast<std::size_t>(rule.alphabet_size());
    const std::size_t high = rule.size() / q;
    const std::size_t len = x.cells.size() - span + 1;
    WindowConfig out{x.offset + rule.radius(), Word(len)};
    std::size_t idx = 0;
    for (std::size_t k = 0; k < span; ++k) idx = idx * q + x.cells[k];
    for (std::size_t i = 0; i < len; ++i) {
        out.cells[i] = rule.at(idx);
        if (i + span < x.cells.size()) idx = (idx % high) * q + x.cells[i + span];
    }
    return out;
}

CyclicConfig iterate(const RuleTable& rule, CyclicConfig x, std::size_t steps) {
    for (std::size_t j = 0; j < steps; ++j) x = step(rule, x);
    return x;
}

Interval light_cone(const RuleTable& rule, Interval iv, std::size_t horizon) {
    const auto reach = static_cast<std::int64_t>(horizon) * rule.radius();
    return {iv.start - reach, iv.width + 2 * static_cast<std::size_t>(reach)};
}

Trace trace(const RuleTable& rule, const CyclicConfig& x, Interval iv, std::size_t horizon) {
    check_letters(rule.alphabet_size(), x.cells);
    Trace t{rule.alphabet_size(), iv, {}};
    t.rows.reserve(horizon + 1);
    CyclicConfig cur = x;
    for (std::size_t j = 0;; ++j) {
        t.rows.push_back(cur.read(iv));
        if (j == horizon) break;
        cur = step(rule, cur);
    }
    return t;
}

Trace trace(const RuleTable& rule, const WindowConfig& x, Interval iv, std::size_t horizon) {
    const Interval cone = light_cone(rule, iv, horizon);
    if (!x.covers(cone)) {
        std::ostringstream os;
        os << "insufficient window: horizon " << horizon << " on [" << iv.start << ", " << iv.end()
           << ") requires [" << cone.start << ", " << cone.end() << "), window is [" << x.offset << ", " << x.end()
           << ")";
        fail(ErrorCode::insufficient_window, os.str());
    }
    check_letters(rule.alphabet_size(), x.cells);
    Trace t{rule.alphabet_size(), iv, {}};
    t.rows.reserve(horizon + 1);
    WindowConfig cur = x.restricted(cone);
    for (std::size_t j = 0;; ++j) {
        t.rows.push_back(cur.read(iv));
        if (j == horizon) break;
        cur = step(rule, cur);
    }
    return t;
}

CycleResult detect_temporal_cycle(const RuleTable& rule, const CyclicConfig& x) {
    check_letters(rule.alphabet_size(), x.cells);
    // Brent: find the period first, then the preperiod.
    std::size_t power = 1;
    std::size_t period = 1;
    CyclicConfig tortoise = x;
    CyclicConfig hare = step(rule, x);
    while (tortoise != hare) {
        if (power == period) {
            tortoise = hare;
            power *= 2;
            period = 0;
        }
        hare = step(rule, hare);
        ++period;
    }
    tortoise = x;
    hare = iterate(rule, x, period);
    std::size_t preperiod = 0;
    while (tortoise != hare) {
        tortoise = step(rule, tortoise);
        hare = step(rule, hare);
        ++preperiod;
    }
    CycleResult out{{preperiod, period}, {}};
    out.states.reserve(period);
    for (std::size_t k = 0; k < period; ++k) {
        out.states.push_back(tortoise);
        tortoise = step(rule, tortoise);
    }
    return out;
}

RuleTable compose(const RuleTable& outer, const RuleTable& inner, std::uint64_t budget) {
    if (outer.alphabet_size() != inner.alphabet_size())
        fail(ErrorCode::alphabet_mismatch, "cannot compose rules over different alphabets");
    const auto q = static_cast<std::uint64_t>(outer.alphabet_size());
    const int radius = outer.radius() + inner.radius();
    const std::uint64_t size = checked_pow(q, static_cast<std::uint64_t>(2 * radius + 1), budget);
    const int outer_span = outer.span();
    const std::uint64_t inner_size = inner.size();
    std::vector<std::uint64_t> place(static_cast<std::size_t>(outer_span));
    for (int j = 0; j < outer_span; ++j) place[j] = checked_pow(q, static_cast<std::uint64_t>(outer_span - 1 - j));
    std::vector<Letter> table(static_cast<std::size_t>(size));
    for (std::uint64_t w = 0; w < size; ++w) {
        std::uint64_t idx = 0;
        for (int j = 0; j < outer_span; ++j) idx = idx * q + inner.at(static_cast<std::size_t>((w / place[j]) % inner_size));
        table[static_cast<std::size_t>(w)] = outer.at(static_cast<std::size_t>(idx));
    }
    return RuleTable(outer.alphabet_size(), radius, std::move(table));
}

RuleTable compose_rule(const RuleTable& rule, std::size_t k, std::uint64_t budget) {
    if (k == 0) return identity_rule(rule.alphabet_size());
    checked_pow(static_cast<std::uint64_t>(rule.alphabet_size()),
                static_cast<std::uint64_t>(2 * static_cast<std::uint64_t>(rule.radius()) * k + 1), budget);
    RuleTable acc = rule;
    for (std::size_t j = 1; j < k; ++j) acc = compose(rule, acc, budget);
    return acc;
}

RuleTable widen(const RuleTable& rule, int radius, std::uint64_t budget) {
    if (radius < rule.radius()) fail(ErrorCode::invalid_argument, "cannot narrow a rule by widening");
    const auto q = static_cast<std::uint64_t>(rule.alphabet_size());
    const std::uint64_t size = checked_pow(q, static_cast<std::uint64_t>(2 * radius + 1), budget);
    const std::uint64_t drop = checked_pow(q, static_cast<std::uint64_t>(radius - rule.radius()));
    std::vector<Letter> table(static_cast<std::size_t>(size));
    for (std::uint64_t w = 0; w < size; ++w) table[w] = rule.at(static_cast<std::size_t>((w / drop) % rule.size()));
    return RuleTable(rule.alphabet_size(), radius, std::move(table));
}

bool same_map(const RuleTable& a, const RuleTable& b) {
    if (a.alphabet_size() != b.alphabet_size()) return false;
    const RuleTable& wide = a.radius() >= b.radius() ? a : b;
    const RuleTable& narrow = a.radius() >= b.radius() ? b : a;
    const auto q = static_cast<std::uint64_t>(a.alphabet_size());
    const std::uint64_t drop = checked_pow(q, static_cast<std::uint64_t>(wide.radius() - narrow.radius()));
    for (std::uint64_t w = 0; w < wide.size(); ++w)
        if (wide.at(static_cast<std::size_t>(w)) != narrow.at(static_cast<std::size_t>((w / drop) % narrow.size())))
            return false;
    return true;
}

bool has_preimage(const RuleTable& rule, std::span<const Letter> word) {
    check_letters(rule.alphabet_size(), word);
    const auto q = static_cast<std::size_t>(rule.alphabet_size());
    const std::size_t nodes = rule.size() / q;
    std::vector<char> live(nodes, 1);
    for (Letter b : word) {
        std::vector<char> next(nodes, 0);
        bool any = false;
        for (std::size_t u = 0; u < nodes; ++u) {
            if (!live[u]) continue;
            for (std::size_t a = 0; a < q; ++a) {
                const std::size_t nb = u * q + a;
                if (rule.at(nb) != b) continue;
                next[nb % nodes] = 1;
                any = true;
            }
        }
        if (!any) return false;
        live = std::move(next);
    }
    return true;
}

SurjectivityResult is_surjective(const RuleTable& rule, std::uint64_t subset_budget) {
    const auto q = static_cast<std::size_t>(rule.alphabet_size());
    const std::size_t nodes = rule.size() / q;  // words of length 2r
    SurjectivityResult res;

    std::vector<std::size_t> counts(q, 0);
    for (Letter a : rule.table()) ++counts[a];
    res.balanced = std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == nodes; });

    const std::size_t blocks = (nodes + 63) / 64;
    using Subset = std::vector<std::uint64_t>;
    auto key = [](const Subset& s) {
        return std::string(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(std::uint64_t));
    };

    struct Visit {
        std::size_t parent;
        Letter letter;
    };
    std::vector<Subset> subsets;
    std::vector<Visit> visits;
    std::unordered_map<std::string, std::size_t> seen;

    Subset full(blocks, 0);
    for (std::size_t v = 0; v < nodes; ++v) full[v / 64] |= std::uint64_t{1} << (v % 64);
    subsets.push_back(full);
    visits.push_back({0, 0});
    seen.emplace(key(full), 0);

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t b = 0; b < q; ++b) {
            Subset next(blocks, 0);
            bool any = false;
            for (std::size_t u = 0; u < nodes; ++u) {
                if (!((subsets[cur][u / 64] >> (u % 64)) & 1)) continue;
                for (std::size_t a = 0; a < q; ++a) {
                    const std::size_t nb = u * q + a;
                    if (rule.at(nb) != b) continue;
                    const std::size_t v = nb % nodes;
                    next[v / 64] |= std::uint64_t{1} << (v % 64);
                    any = true;
                }
            }
            if (!any) {
                Word orphan{static_cast<Letter>(b)};
                for (std::size_t at = cur; at != 0; at = visits[at].parent) orphan.push_back(visits[at].letter);
                std::reverse(orphan.begin(), orphan.end());
                res.surjective = false;
                res.orphan = std::move(orphan);
                res.subsets_explored = subsets.size();
                return res;
            }
            auto [it, inserted] = seen.emplace(key(next), subsets.size());
            if (!inserted) continue;
            if (subsets.size() >= subset_budget)
                fail(ErrorCode::budget_exceeded, "surjectivity subset construction exceeded its budget");
            subsets.push_back(std::move(next));
            visits.push_back({cur, static_cast<Letter>(b)});
            queue.push_back(it->second);
        }
    }
    res.surjective = true;
    res.subsets_explored = subsets.size();
    return res;
}

char glyph(int alphabet_size, Letter a) {
    if (alphabet_size <= 2) return a == 0 ? '.' : '#';
    if (alphabet_size > static_cast<int>(kGlyphs.size()))
        fail(ErrorCode::invalid_argument, "ascii rendering supports at most 62 letters");
    return kGlyphs[a];
}

std::string render_spacetime(const Trace& t, RenderFormat format) {
    if (t.rows.empty() || t.interval.width == 0) return {};
    std::string out;
    if (format == RenderFormat::ascii) {
        out.reserve(t.rows.size() * (t.interval.width + 1));
        for (const Word& row : t.rows) {
            for (Letter a : row) out.push_back(glyph(t.alphabet_size, a));
            out.push_back('\n');
        }
        return out;
    }
    if (t.alphabet_size < 1 || t.alphabet_size > 256)
        fail(ErrorCode::invalid_argument, "pgm rendering supports alphabets of at most 256 letters");
    std::ostringstream header;
    header << "P5\n" << t.interval.width << " " << t.rows.size() << "\n255\n";
    out = header.str();
    const int top = std::max(1, t.alphabet_size - 1);
    for (const Word& row : t.rows)
        for (Letter a : row) out.push_back(static_cast<char>(static_cast<unsigned char>(a * 255 / top)));
    return out;
}

Word parse_word(const std::string& text, int alphabet_size) {
    Word out;
    if (text.find(',') != std::string::npos) {
        std::istringstream is(text);
        std::string item;
        while (std::getline(is, item, ',')) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(item, &used);
                if (used != item.size() || v < 0 || v > 255) throw std::invalid_argument(item);
                out.push_back(static_cast<Letter>(v));
            } catch (const std::exception&) {
                fail(ErrorCode::parse_error, "malformed letter '" + item + "' in word '" + text + "'");
            }
        }
    } else {
        for (char c : text) {
            const auto pos = kGlyphs.find(c);
            if (pos == std::string_view::npos)
                fail(ErrorCode::parse_error, std::string("malformed letter '") + c + "' in word '" + text + "'");
            out.push_back(static_cast<Letter>(pos));
        }
    }
    check_letters(alphabet_size, out);
    return out;
}

std::string format_word(std::span<const Letter> word) {
    const bool compact = std::all_of(word.begin(), word.end(), [](Letter a) { return a < 36; });
    std::string out;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (compact) {
            out.push_back(kGlyphs[word[k]]);
        } else {
            if (k) out.push_back(',');
            out += std::to_string(int(word[k]));
        }
    }
    return out;
}

}  // namespace eqca
