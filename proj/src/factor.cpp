#include "eqca/factor.hpp"

#include <algorithm>
#include <sstream>

#include "eqca/parallel.hpp"
#include "eqca/random.hpp"

namespace eqca {

namespace {

// Central window of each of F^0(z) .. F^(count-1)(z).
std::vector<Word> central_windows(const RuleTable& rule, const PeriodicPoint& z, std::size_t count) {
    const auto r = static_cast<std::int64_t>(rule.radius());
    const Interval window{z.w_center() - r, static_cast<std::size_t>(rule.span())};
    std::vector<Word> out;
    out.reserve(count);
    CyclicConfig cur = z.cyclic();
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(cur.read(window));
        if (k + 1 < count) cur = step(rule, cur);
    }
    return out;
}

// Rows of the window [i-r, i+r] out of a trace on a wider interval.
std::vector<Word> slice_rows(const std::vector<Word>& rows, std::size_t first, std::size_t span) {
    std::vector<Word> out;
    out.reserve(rows.size());
    for (const Word& row : rows)
        out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(first),
                         row.begin() + static_cast<std::ptrdiff_t>(first + span));
    return out;
}

}  // namespace

CyclicConfig PeriodicPoint::cyclic() const {
    if (u.empty() && w.empty()) fail(ErrorCode::invalid_argument, "periodic point needs |uw| >= 1");
    CyclicConfig c{u};
    c.cells.insert(c.cells.end(), w.begin(), w.end());
    return c;
}

PeriodicPoint PeriodicPoint::around_origin(const CyclicConfig& y, int radius) {
    if (y.cells.empty()) fail(ErrorCode::invalid_argument, "periodic point needs a nonempty period");
    const auto span = static_cast<std::size_t>(2 * radius + 1);
    std::size_t n = y.period();
    while (n < span) n += y.period();
    const auto r = static_cast<std::int64_t>(radius);
    return {y.read({r + 1, n - span}), y.read({-r, span})};
}

WindowConfig splice(const Word& y_left, const Word& w, const Word& u, const Word& y_right, std::size_t copies) {
    WindowConfig out;
    out.offset = -static_cast<std::int64_t>(y_left.size()) - (w.empty() ? 0 : static_cast<std::int64_t>((w.size() - 1) / 2));
    Word& c = out.cells;
    c.reserve(y_left.size() + y_right.size() + (copies + 2) * w.size() + (copies + 1) * u.size());
    c.insert(c.end(), y_left.begin(), y_left.end());
    c.insert(c.end(), w.begin(), w.end());
    for (std::size_t i = 0; i < copies; ++i) {
        c.insert(c.end(), u.begin(), u.end());
        c.insert(c.end(), w.begin(), w.end());
    }
    c.insert(c.end(), u.begin(), u.end());
    c.insert(c.end(), w.begin(), w.end());
    c.insert(c.end(), y_right.begin(), y_right.end());
    return out;
}

PeriodicPoint splice_limit(const Word& u, const Word& w) {
    PeriodicPoint z{u, w};
    z.cyclic();  // validates |uw| >= 1
    return z;
}

std::optional<TraceRepeat> find_trace_repeat(const RuleTable& rule, const CyclicConfig& y, std::size_t horizon) {
    check_letters(rule.alphabet_size(), y.cells);
    const auto r = static_cast<std::int64_t>(rule.radius());
    const auto span = static_cast<std::size_t>(rule.span());
    const std::size_t n = y.period();
    if (n <= span) return std::nullopt;

    std::vector<CyclicConfig> orbit{y};
    for (std::size_t j = 0; j < horizon; ++j) orbit.push_back(step(rule, orbit.back()));
    for (std::size_t p = span; p < n; ++p) {
        const auto shift = static_cast<std::int64_t>(p);
        const bool same = std::all_of(orbit.begin(), orbit.end(), [&](const CyclicConfig& c) {
            for (std::int64_t d = -r; d <= r; ++d)
                if (c.at(d) != c.at(shift + d)) return false;
            return true;
        });
        if (same) return TraceRepeat{y.read({-r, span}), y.read({r + 1, p - span}), p};
    }
    return std::nullopt;
}

PhaseSet build_phase_set(const RuleTable& rule, const PeriodicPoint& z) {
    const CycleResult orbit = detect_temporal_cycle(rule, z.cyclic());
    const std::size_t count = orbit.cycle.preperiod + orbit.cycle.period;
    const std::vector<Word> windows = central_windows(rule, z, count);
    const TemporalCycle minimal = minimize_cycle(windows, orbit.cycle);
    PhaseSet ps{minimal.preperiod, minimal.period, {}, z};
    ps.rows.assign(windows.begin() + static_cast<std::ptrdiff_t>(minimal.preperiod),
                   windows.begin() + static_cast<std::ptrdiff_t>(minimal.preperiod + minimal.period));
    return ps;
}

PhaseSet build_phase_set_from(const RuleTable& rule, const PeriodicPoint& z, std::size_t preperiod) {
    PhaseSet minimal = build_phase_set(rule, z);
    if (preperiod < minimal.preperiod) {
        std::ostringstream os;
        os << "central window is not periodic from time " << preperiod << " (settles at " << minimal.preperiod
           << ")";
        fail(ErrorCode::witness_invalid, os.str());
    }
    const std::vector<Word> windows = central_windows(rule, z, preperiod + minimal.period);
    minimal.rows.assign(windows.begin() + static_cast<std::ptrdiff_t>(preperiod), windows.end());
    minimal.preperiod = preperiod;
    return minimal;
}

CounterCA counter_ca(std::size_t modulus) {
    if (modulus == 0) fail(ErrorCode::invalid_argument, "counter modulus must be at least 1");
    if (modulus > 255) fail(ErrorCode::invalid_argument, "counter modulus must be at most 255");
    std::vector<Letter> table(modulus + 1);
    for (std::size_t a = 0; a < modulus; ++a) table[a] = static_cast<Letter>((a + 1) % modulus);
    table[modulus] = static_cast<Letter>(modulus);
    return {modulus, RuleTable(static_cast<int>(modulus + 1), 0, std::move(table))};
}

FactorMap make_factor_map(const RuleTable& rule, PhaseSet phases, std::optional<std::size_t> lock) {
    if (phases.period == 0 || phases.rows.size() != phases.period)
        fail(ErrorCode::invalid_argument, "phase set rows must match its period");
    if (phases.period > 255) fail(ErrorCode::invalid_argument, "phase period must be at most 255");
    for (const Word& row : phases.rows) {
        if (row.size() != static_cast<std::size_t>(rule.span()))
            fail(ErrorCode::invalid_argument, "phase rows must have length 2r+1");
        check_letters(rule.alphabet_size(), row);
    }
    const std::size_t l = lock.value_or(phases.period);
    if (l < phases.period) fail(ErrorCode::invalid_argument, "factor lock must cover at least one period");
    return {rule, std::move(phases), l};
}

Letter phase_of(const FactorMap& pi, const std::vector<Word>& window_rows) {
    const PhaseSet& ps = pi.phases;
    if (window_rows.size() < pi.horizon() + 1) fail(ErrorCode::invalid_argument, "local trace shorter than horizon");
    for (std::size_t k = 0; k < ps.period; ++k) {
        bool locked = true;
        for (std::size_t j = 0; j <= pi.lock && locked; ++j)
            locked = window_rows[ps.preperiod + j] == ps.rows[(k + j) % ps.period];
        if (locked) return static_cast<Letter>(k);
    }
    return pi.sink();
}

Word apply_factor_map(const FactorMap& pi, const CyclicConfig& x, Interval iv) {
    const auto r = static_cast<std::int64_t>(pi.rule.radius());
    const auto span = static_cast<std::size_t>(pi.rule.span());
    const Trace t = trace(pi.rule, x, {iv.start - r, iv.width + span - 1}, pi.horizon());
    Word out(iv.width);
    for (std::size_t k = 0; k < iv.width; ++k) out[k] = phase_of(pi, slice_rows(t.rows, k, span));
    return out;
}

Word apply_factor_map(const FactorMap& pi, const WindowConfig& x, Interval iv) {
    const auto r = static_cast<std::int64_t>(pi.rule.radius());
    const auto span = static_cast<std::size_t>(pi.rule.span());
    const Trace t = trace(pi.rule, x, {iv.start - r, iv.width + span - 1}, pi.horizon());
    Word out(iv.width);
    for (std::size_t k = 0; k < iv.width; ++k) out[k] = phase_of(pi, slice_rows(t.rows, k, span));
    return out;
}

CommutationReport verify_commutation(const RuleTable& dynamics, const FactorMap& pi, const CounterCA& counter,
                                     const std::vector<FactorInput>& inputs, unsigned threads, std::size_t keep) {
    if (counter.modulus != pi.phases.period)
        fail(ErrorCode::invalid_argument, "counter modulus differs from the phase period");

    const auto reach = static_cast<std::int64_t>(pi.rule.radius()) * static_cast<std::int64_t>(pi.horizon() + 1);
    std::vector<CommutationReport> local(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t idx) {
        CommutationReport& rep = local[idx];
        auto record = [&](std::int64_t i, Letter pix, Letter pifx, Word context) {
            ++rep.positions_checked;
            if (pix != pi.sink()) ++rep.locked_positions;
            const Letter cpix = counter.apply(pix);
            if (cpix == pifx) return;
            ++rep.mismatch_count;
            if (rep.mismatches.size() < keep) rep.mismatches.push_back({idx, i, pifx, cpix, pix, std::move(context)});
        };
        if (const auto* cyc = std::get_if<CyclicConfig>(&inputs[idx])) {
            const Interval all{0, cyc->period()};
            const Word pix = apply_factor_map(pi, *cyc, all);
            const Word pifx = apply_factor_map(pi, step(dynamics, *cyc), all);
            for (std::size_t i = 0; i < all.width; ++i)
                record(static_cast<std::int64_t>(i), pix[i], pifx[i], cyc->cells);
        } else {
            const auto& win = std::get<WindowConfig>(inputs[idx]);
            const WindowConfig fx = step(dynamics, win);
            const std::int64_t lo = fx.offset + reach;
            const std::int64_t hi = fx.end() - reach;
            if (hi <= lo) return;
            const Interval iv{lo, static_cast<std::size_t>(hi - lo)};
            const Word pix = apply_factor_map(pi, win, iv);
            const Word pifx = apply_factor_map(pi, fx, iv);
            const std::int64_t ctx = reach + dynamics.radius();
            for (std::size_t k = 0; k < iv.width; ++k) {
                const std::int64_t i = lo + static_cast<std::int64_t>(k);
                const std::int64_t a = std::max(win.offset, i - ctx);
                const std::int64_t b = std::min(win.end(), i + ctx + 1);
                record(i, pix[k], pifx[k], win.read({a, static_cast<std::size_t>(b - a)}));
            }
        }
    });

    CommutationReport total;
    total.inputs = inputs.size();
    for (auto& rep : local) {
        total.positions_checked += rep.positions_checked;
        total.locked_positions += rep.locked_positions;
        total.mismatch_count += rep.mismatch_count;
        for (auto& m : rep.mismatches)
            if (total.mismatches.size() < keep) total.mismatches.push_back(std::move(m));
    }
    return total;
}

std::vector<FactorInput> exhaustive_cyclic_inputs(int alphabet_size, std::size_t max_period) {
    std::vector<FactorInput> out;
    for (std::size_t n = 1; n <= max_period; ++n) {
        const std::uint64_t count =
            checked_pow(static_cast<std::uint64_t>(alphabet_size), n, std::uint64_t{1} << 24);
        Word w(n, 0);
        for (std::uint64_t i = 0; i < count; ++i) {
            out.emplace_back(CyclicConfig{w});
            std::size_t k = n;
            while (k > 0 && ++w[k - 1] == alphabet_size) w[--k] = 0;
        }
    }
    return out;
}

std::vector<FactorInput> sampled_window_inputs(int alphabet_size, std::size_t count, std::size_t width,
                                               std::uint64_t seed) {
    std::vector<FactorInput> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto rng = sample_stream(seed, k);
        WindowConfig x{0, Word(width)};
        for (Letter& a : x.cells) a = static_cast<Letter>(uniform_below(rng, static_cast<std::uint64_t>(alphabet_size)));
        out.emplace_back(std::move(x));
    }
    return out;
}

TopologicalFactor build_topological_factor(const RuleTable& rule, TemporalCycle witness, std::size_t verify_period,
                                           unsigned threads) {
    if (witness.period == 0) fail(ErrorCode::witness_invalid, "witness period must be at least 1");
    if (!same_map(compose_rule(rule, witness.preperiod + witness.period), compose_rule(rule, witness.preperiod))) {
        std::ostringstream os;
        os << "witness (" << witness.preperiod << ", " << witness.period << ") does not replay: F^"
           << witness.preperiod + witness.period << " != F^" << witness.preperiod;
        fail(ErrorCode::witness_invalid, os.str());
    }
    const PeriodicPoint zero{{}, Word(static_cast<std::size_t>(rule.span()), 0)};
    PhaseSet phases = build_phase_set_from(rule, zero, witness.preperiod);
    const std::size_t modulus = phases.period;
    TopologicalFactor out{make_factor_map(rule, std::move(phases), witness.period), counter_ca(modulus), {}};
    out.verification =
        verify_commutation(rule, out.map, out.counter, exhaustive_cyclic_inputs(rule.alphabet_size(), verify_period),
                           threads);
    return out;
}

}  // namespace eqca
