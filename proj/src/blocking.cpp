#include "eqca/blocking.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

#include "eqca/parallel.hpp"
#include "eqca/random.hpp"

namespace eqca {

namespace {

constexpr std::size_t kFalsifyBatch = 256;

void require_small_alphabet(const RuleTable& rule) {
    if (rule.alphabet_size() > 64) fail(ErrorCode::invalid_argument, "set abstraction supports at most 64 letters");
}

bool singleton(LetterSet s) { return std::has_single_bit(s); }

Letter only_letter(LetterSet s) { return static_cast<Letter>(std::countr_zero(s)); }

std::string state_key(const std::vector<LetterSet>& cells) {
    return std::string(reinterpret_cast<const char*>(cells.data()), cells.size() * sizeof(LetterSet));
}

void hash_state(std::uint64_t& h, const std::vector<LetterSet>& cells) {
    for (LetterSet c : cells)
        for (int shift = 0; shift < 64; shift += 8) {
            h ^= (c >> shift) & 0xff;
            h *= 0x100000001b3ULL;
        }
}

struct AbstractOrbit {
    std::vector<std::vector<LetterSet>> states;
    std::size_t preperiod = 0;
    std::size_t period = 0;
    bool closed = false;
};

AbstractOrbit run_abstract_orbit(const RuleTable& rule, const SetWord& start, std::size_t max_steps) {
    AbstractOrbit orbit;
    std::unordered_map<std::string, std::size_t> seen;
    SetWord cur = start;
    for (std::size_t t = 0; t <= max_steps; ++t) {
        auto [it, inserted] = seen.emplace(state_key(cur.cells), t);
        if (!inserted) {
            orbit.preperiod = it->second;
            orbit.period = t - it->second;
            orbit.closed = true;
            return orbit;
        }
        orbit.states.push_back(cur.cells);
        if (t == max_steps) break;
        cur = abstract_step(rule, cur);
    }
    return orbit;
}

SetWord initial_state(const RuleTable& rule, const Word& w, std::size_t margin) {
    const LetterSet full = full_set(rule.alphabet_size());
    SetWord s{-static_cast<std::int64_t>(margin), std::vector<LetterSet>(w.size() + 2 * margin, full)};
    for (std::size_t k = 0; k < w.size(); ++k) s.cells[margin + k] = LetterSet{1} << w[k];
    return s;
}

// Offset of the first divergence per window offset p, or SIZE_MAX.
std::vector<std::size_t> divergence_times(const Trace& a, const Trace& b, std::size_t s, std::size_t offsets) {
    std::vector<std::size_t> out(offsets, SIZE_MAX);
    for (std::size_t p = 0; p < offsets; ++p)
        for (std::size_t n = 0; n < a.rows.size(); ++n)
            if (!std::equal(a.rows[n].begin() + p, a.rows[n].begin() + p + s, b.rows[n].begin() + p)) {
                out[p] = n;
                break;
            }
    return out;
}

}  // namespace

LetterSet full_set(int alphabet_size) {
    return alphabet_size >= 64 ? ~LetterSet{0} : (LetterSet{1} << alphabet_size) - 1;
}

SetWord SetWord::from_window(const WindowConfig& x) {
    SetWord s{x.offset, {}};
    s.cells.reserve(x.cells.size());
    for (Letter a : x.cells) {
        if (a >= 64) fail(ErrorCode::invalid_argument, "set abstraction supports at most 64 letters");
        s.cells.push_back(LetterSet{1} << a);
    }
    return s;
}

std::optional<WindowConfig> SetWord::to_window() const {
    WindowConfig x{offset, {}};
    x.cells.reserve(cells.size());
    for (LetterSet c : cells) {
        if (!singleton(c)) return std::nullopt;
        x.cells.push_back(only_letter(c));
    }
    return x;
}

SetWord abstract_step(const RuleTable& rule, const SetWord& s) {
    require_small_alphabet(rule);
    const int q = rule.alphabet_size();
    const LetterSet full = full_set(q);
    const auto r = static_cast<std::int64_t>(rule.radius());
    const auto n = static_cast<std::int64_t>(s.cells.size());
    const auto span = static_cast<std::size_t>(rule.span());

    SetWord out{s.offset, std::vector<LetterSet>(s.cells.size(), 0)};
    std::vector<std::vector<Letter>> choices(span);
    std::vector<std::size_t> odometer(span);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < span; ++k) {
            const std::int64_t j = i - r + static_cast<std::int64_t>(k);
            const LetterSet set = (j < 0 || j >= n) ? full : s.cells[static_cast<std::size_t>(j)];
            choices[k].clear();
            for (int a = 0; a < q; ++a)
                if ((set >> a) & 1) choices[k].push_back(static_cast<Letter>(a));
        }
        std::fill(odometer.begin(), odometer.end(), 0);
        LetterSet image = 0;
        while (true) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < span; ++k) idx = idx * static_cast<std::size_t>(q) + choices[k][odometer[k]];
            image |= LetterSet{1} << rule.at(idx);
            if (image == full) break;
            std::size_t k = span;
            while (k > 0 && ++odometer[k - 1] == choices[k - 1].size()) odometer[--k] = 0;
            if (k == 0) break;
        }
        out.cells[static_cast<std::size_t>(i)] = image;
    }
    return out;
}

CertifyResult certify_blocking(const RuleTable& rule, const Word& w, std::size_t s, std::size_t margin,
                               std::size_t max_steps) {
    require_small_alphabet(rule);
    check_letters(rule.alphabet_size(), w);
    if (s == 0 || w.size() < s) fail(ErrorCode::invalid_argument, "certification needs 1 <= s <= |w|");

    const AbstractOrbit orbit = run_abstract_orbit(rule, initial_state(rule, w, margin), max_steps);
    CertifyResult res;
    res.orbit_closed = orbit.closed;
    res.steps = orbit.states.size();
    if (!orbit.closed) {
        res.reason = "abstract orbit did not close within max_steps";
        return res;
    }
    for (std::size_t p = 0; p + s <= w.size(); ++p) {
        const bool ok = std::all_of(orbit.states.begin(), orbit.states.end(), [&](const auto& cells) {
            return std::all_of(cells.begin() + static_cast<std::ptrdiff_t>(margin + p),
                               cells.begin() + static_cast<std::ptrdiff_t>(margin + p + s), singleton);
        });
        if (!ok) continue;
        BlockingCertificate cert{w, s, p, margin, orbit.preperiod, orbit.period, orbit.states.size(), {}, 0};
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto& cells : orbit.states) {
            Word row(s);
            for (std::size_t k = 0; k < s; ++k) row[k] = only_letter(cells[margin + p + k]);
            cert.witness.push_back(std::move(row));
            hash_state(h, cells);
        }
        cert.replay_hash = h;
        res.certificate = std::move(cert);
        return res;
    }
    res.reason = "no offset keeps a singleton window along the abstract orbit";
    return res;
}

bool replay_certificate(const RuleTable& rule, const BlockingCertificate& cert) {
    if (cert.s == 0 || cert.p + cert.s > cert.word.size()) return false;
    const AbstractOrbit orbit = run_abstract_orbit(rule, initial_state(rule, cert.word, cert.margin), cert.steps);
    if (!orbit.closed || orbit.preperiod != cert.preperiod || orbit.period != cert.period ||
        orbit.states.size() != cert.steps || cert.witness.size() != cert.steps)
        return false;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t t = 0; t < orbit.states.size(); ++t) {
        const auto& cells = orbit.states[t];
        for (std::size_t k = 0; k < cert.s; ++k) {
            const LetterSet c = cells[cert.margin + cert.p + k];
            if (!singleton(c) || only_letter(c) != cert.witness[t][k]) return false;
        }
        hash_state(h, cells);
    }
    return h == cert.replay_hash;
}

FalsifyResult falsify_blocking(const RuleTable& rule, const Word& w, std::size_t s, std::size_t horizon,
                               std::size_t samples, std::uint64_t seed, unsigned threads) {
    check_letters(rule.alphabet_size(), w);
    if (s == 0 || w.size() < s) fail(ErrorCode::invalid_argument, "falsification needs 1 <= s <= |w|");
    if (horizon == 0) fail(ErrorCode::invalid_argument, "falsification horizon must be at least 1");

    const std::size_t offsets = w.size() - s + 1;
    const Interval support{0, w.size()};
    const Interval cone = light_cone(rule, support, horizon);
    const auto q = static_cast<std::uint64_t>(rule.alphabet_size());

    auto draw = [&](std::mt19937_64& rng) {
        WindowConfig x{cone.start, Word(cone.width)};
        for (Letter& a : x.cells) a = static_cast<Letter>(uniform_below(rng, q));
        std::copy(w.begin(), w.end(), x.cells.begin() + (support.start - cone.start));
        return x;
    };

    FalsifyResult res;
    res.per_offset.assign(offsets, std::nullopt);
    std::size_t open = offsets;
    for (std::size_t base = 0; base < samples && open > 0; base += kFalsifyBatch) {
        const std::size_t count = std::min(kFalsifyBatch, samples - base);
        std::vector<std::vector<std::size_t>> times(count);
        parallel_for(count, threads, [&](std::size_t k) {
            auto rng = sample_stream(seed, base + k);
            const WindowConfig x = draw(rng);
            const WindowConfig y = draw(rng);
            times[k] = divergence_times(trace(rule, x, support, horizon), trace(rule, y, support, horizon), s, offsets);
        });
        res.samples_used = base + count;
        for (std::size_t k = 0; k < count && open > 0; ++k)
            for (std::size_t p = 0; p < offsets; ++p) {
                if (res.per_offset[p] || times[k][p] == SIZE_MAX) continue;
                auto rng = sample_stream(seed, base + k);
                WindowConfig x = draw(rng);
                WindowConfig y = draw(rng);
                res.per_offset[p] = Counterexample{p, base + k, std::move(x), std::move(y), times[k][p],
                                                   Interval{static_cast<std::int64_t>(p), s}};
                --open;
            }
    }
    res.refuted = open == 0;
    return res;
}

std::vector<Word> all_words(int alphabet_size, std::size_t length) {
    const std::uint64_t count = checked_pow(static_cast<std::uint64_t>(alphabet_size), length, std::uint64_t{1} << 26);
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(count));
    Word w(length, 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        out.push_back(w);
        std::size_t k = length;
        while (k > 0 && ++w[k - 1] == alphabet_size) w[--k] = 0;
    }
    return out;
}

std::vector<BlockingCertificate> search_blocking_words(const RuleTable& rule, std::size_t s, std::size_t lmax,
                                                       std::size_t margin, std::size_t max_steps,
                                                       bool skip_extensions, unsigned threads) {
    if (s == 0 || lmax < s) fail(ErrorCode::invalid_argument, "search needs 1 <= s <= lmax");
    std::vector<BlockingCertificate> found;
    for (std::size_t len = s; len <= lmax; ++len) {
        std::vector<Word> words = all_words(rule.alphabet_size(), len);
        if (skip_extensions) {
            std::erase_if(words, [&](const Word& w) {
                return std::any_of(found.begin(), found.end(), [&](const BlockingCertificate& c) {
                    return std::search(w.begin(), w.end(), c.word.begin(), c.word.end()) != w.end();
                });
            });
        }
        std::vector<std::optional<BlockingCertificate>> certs(words.size());
        parallel_for(words.size(), threads, [&](std::size_t k) {
            certs[k] = certify_blocking(rule, words[k], s, margin, max_steps).certificate;
        });
        for (auto& c : certs)
            if (c) found.push_back(std::move(*c));
    }
    return found;
}

std::optional<TemporalCycle> check_global_equicontinuity(const RuleTable& rule, std::size_t max_preperiod,
                                                         std::size_t max_period, std::uint64_t table_budget) {
    std::vector<RuleTable> powers{identity_rule(rule.alphabet_size())};
    for (std::size_t k = 1; k <= max_preperiod + max_period; ++k) {
        powers.push_back(k == 1 ? rule : compose(rule, powers.back(), table_budget));
        const std::size_t lo = k > max_period ? k - max_period : 0;
        const std::size_t hi = std::min(max_preperiod, k - 1);
        for (std::size_t p0 = lo; p0 <= hi; ++p0)
            if (same_map(powers[k], powers[p0])) return TemporalCycle{p0, k - p0};
    }
    return std::nullopt;
}

std::string to_string(KurkaVerdict v) {
    switch (v) {
        case KurkaVerdict::globally_equicontinuous: return "GLOBALLY_EQUICONTINUOUS";
        case KurkaVerdict::has_equicontinuous_points: return "HAS_EQUICONTINUOUS_POINTS";
        case KurkaVerdict::sensitivity_evidence: return "SENSITIVITY_EVIDENCE";
        case KurkaVerdict::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

KurkaReport classify_kurka(const RuleTable& rule, const KurkaOptions& options) {
    KurkaReport report;
    // A radius-0 rule has no meaningful 0-blocking word; use width 1.
    report.s = std::max<std::size_t>(1, static_cast<std::size_t>(rule.radius()));
    const std::size_t margin = options.margin.value_or(2 * static_cast<std::size_t>(rule.radius()));

    try {
        report.global = check_global_equicontinuity(rule, options.max_preperiod, options.max_period,
                                                    options.table_budget);
        report.global_status = report.global ? "found" : "none";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::budget_exceeded) throw;
        report.global_status = "budget_exceeded";
    }
    if (report.global) {
        report.verdict = KurkaVerdict::globally_equicontinuous;
        return report;
    }

    const std::size_t lmax = std::max(options.lmax, report.s);
    auto certs = search_blocking_words(rule, report.s, lmax, margin, options.max_steps, false, options.threads);
    if (!certs.empty()) {
        report.verdict = KurkaVerdict::has_equicontinuous_points;
        report.certificate = std::move(certs.front());
        return report;
    }

    for (std::size_t len = report.s; len <= lmax; ++len)
        for (const Word& w : all_words(rule.alphabet_size(), len)) {
            ++report.words_tested;
            if (falsify_blocking(rule, w, report.s, options.horizon, options.samples, options.seed, options.threads)
                    .refuted)
                ++report.words_refuted;
        }
    report.verdict = report.words_refuted == report.words_tested ? KurkaVerdict::sensitivity_evidence
                                                                 : KurkaVerdict::inconclusive;
    return report;
}

}  // namespace eqca
