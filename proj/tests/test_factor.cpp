#include <doctest.h>

#include <random>

#include "eqca/blocking.hpp"
#include "eqca/factor.hpp"
#include "oracles.hpp"
#include "splicing.hpp"

using namespace eqca;

namespace {

Word w(const char* text) { return parse_word(text, 2); }

std::vector<FactorInput> random_cyclic(std::size_t count, std::size_t period, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<FactorInput> out;
    for (std::size_t k = 0; k < count; ++k) out.emplace_back(CyclicConfig{oracle::random_word(rng, period, 2)});
    return out;
}

PhaseSet zero_phases(int rule) { return build_phase_set(eca(rule), PeriodicPoint{{}, w("000")}); }

}  // namespace

TEST_SUITE("factor") {

TEST_CASE("splice examples") {
    const WindowConfig s0 = splice({}, w("0"), w("1"), {}, 0);
    CHECK(s0.cells == w("010"));
    CHECK(s0.offset == 0);
    CHECK(splice({}, w("0"), w("1"), {}, 2).cells == w("0101010"));

    const WindowConfig s = splice(w("11"), w("010"), w("0011"), w("1"), 3);
    CHECK(s.cells.size() == 2 + 1 + 5 * 3 + 4 * 4);
    CHECK(s.offset == -3);
    CHECK(s.read({-1, 3}) == w("010"));
}

TEST_CASE("splice limit examples") {
    CHECK(splice_limit({}, w("0")).cyclic().cells == w("0"));
    CHECK(splice_limit(w("1"), w("0")).cyclic().cells == w("10"));
    CHECK(splice_limit(w("11"), w("000")).cyclic().cells == w("11000"));
    const PeriodicPoint z = splice_limit(w("11"), w("010"));
    CHECK(z.cyclic().read({z.w_center() - 1, 3}) == w("010"));
    CHECK_THROWS_AS(splice_limit({}, {}), Error);
}

TEST_CASE("trace repeat examples") {
    const auto r51 = find_trace_repeat(eca(51), CyclicConfig{w("0000")}, 10);
    REQUIRE(r51);
    CHECK(r51->distance == 3);
    CHECK(r51->w == w("000"));
    CHECK(r51->u.empty());

    const auto r204 = find_trace_repeat(eca(204), CyclicConfig{w("01100110")}, 10);
    REQUIRE(r204);
    CHECK(r204->distance == 4);
    CHECK(r204->w == w("001"));
    CHECK(r204->u == w("1"));

    CHECK(!find_trace_repeat(eca(170), CyclicConfig{w("01")}, 4));
    CHECK(!find_trace_repeat(eca(170), CyclicConfig{w("010011")}, 8));
}

TEST_CASE("phase set examples") {
    const PhaseSet p51 = zero_phases(51);
    CHECK(p51.preperiod == 0);
    CHECK(p51.period == 2);
    CHECK(p51.rows == std::vector<Word>{w("000"), w("111")});

    const PhaseSet p204 = build_phase_set(eca(204), PeriodicPoint{w("1101"), w("010")});
    CHECK(p204.preperiod == 0);
    CHECK(p204.period == 1);
    CHECK(p204.rows == std::vector<Word>{w("010")});

    const PhaseSet p4 = zero_phases(4);
    CHECK(p4.preperiod == 0);
    CHECK(p4.period == 1);
    CHECK(p4.rows == std::vector<Word>{w("000")});

    CHECK(build_phase_set_from(eca(4), PeriodicPoint{{}, w("000")}, 2).preperiod == 2);
    CHECK_THROWS_AS(build_phase_set_from(eca(4), PeriodicPoint{w("0"), w("011")}, 0), Error);
}

TEST_CASE("phase sets follow the central window trace") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 256; n += 7)
        for (int k = 0; k < 10; ++k) {
            const PeriodicPoint z{oracle::random_word(rng, rng() % 5, 2), oracle::random_word(rng, 3, 2)};
            const PhaseSet ps = build_phase_set(eca(n), z);
            const Trace t = trace(eca(n), z.cyclic(), {z.w_center() - 1, 3}, ps.preperiod + 2 * ps.period);
            for (std::size_t j = 0; j < 2 * ps.period; ++j)
                CHECK(t.rows[ps.preperiod + j] == ps.rows[j % ps.period]);
            if (ps.preperiod > 0)
                CHECK(t.rows[ps.preperiod - 1] != t.rows[ps.preperiod - 1 + ps.period]);
            for (std::size_t d = 1; d < ps.period; ++d)
                if (ps.period % d == 0) {
                    bool shorter = true;
                    for (std::size_t j = 0; j < ps.period; ++j) shorter = shorter && ps.rows[j] == ps.rows[(j + d) % ps.period];
                    CHECK(!shorter);
                }
        }
}

TEST_CASE("counter examples") {
    const CounterCA c2 = counter_ca(2);
    CHECK(c2.apply(0) == 1);
    CHECK(c2.apply(1) == 0);
    CHECK(c2.apply(2) == 2);
    const CounterCA c1 = counter_ca(1);
    CHECK(c1.apply(0) == 0);
    CHECK(c1.apply(1) == 1);
    const CounterCA c3 = counter_ca(3);
    CHECK(c3.apply(0) == 1);
    CHECK(c3.apply(1) == 2);
    CHECK(c3.apply(2) == 0);
    CHECK(c3.apply(3) == 3);
    CHECK_THROWS_AS(counter_ca(0), Error);
}

TEST_CASE("counter CA is a cellwise permutation with a fixed sink") {
    for (std::size_t p = 1; p <= 12; ++p) {
        const CounterCA c = counter_ca(p);
        CHECK(c.rule.radius() == 0);
        CHECK(c.rule.alphabet_size() == static_cast<int>(p + 1));
        CHECK(c.apply(c.sink()) == c.sink());
        for (Letter a = 0; a < p; ++a) {
            Letter x = a;
            for (std::size_t k = 0; k < p; ++k) {
                x = c.apply(x);
                CHECK(x < p);
            }
            CHECK(x == a);
        }
    }
}

TEST_CASE("factor map examples") {
    const FactorMap pi51 = make_factor_map(eca(51), zero_phases(51));
    CHECK(apply_factor_map(pi51, CyclicConfig{w("0")}, {-3, 7}) == Word(7, 0));
    CHECK(apply_factor_map(pi51, CyclicConfig{w("1")}, {5, 4}) == Word(4, 1));

    const FactorMap pi4 = make_factor_map(eca(4), zero_phases(4));
    CHECK(pi4.sink() == 1);
    const CyclicConfig x{w("00000100000")};
    CHECK(apply_factor_map(pi4, x, {0, 11}) == w("00001110000"));

    const WindowConfig win{-6, w("0000001000000")};
    CHECK(apply_factor_map(pi4, win, {-2, 5}) == w("01110"));
    CHECK_THROWS_AS(apply_factor_map(pi4, win, {-6, 3}), Error);
    CHECK_THROWS_AS(make_factor_map(eca(51), zero_phases(51), 1), Error);
}

TEST_CASE("phase assignment is unique for distinct rows") {
    const FactorMap pi = make_factor_map(eca(51), zero_phases(51));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 300; ++k) {
        std::vector<Word> rows;
        for (std::size_t j = 0; j <= pi.horizon(); ++j) rows.push_back(oracle::random_word(rng, 3, 2));
        if (k % 3 == 0) rows = {w("111"), w("000"), w("111")};
        std::size_t matches = 0;
        for (std::size_t phase = 0; phase < 2; ++phase) {
            bool ok = true;
            for (std::size_t j = 0; j <= pi.lock; ++j) ok = ok && rows[j] == pi.phases.rows[(phase + j) % 2];
            matches += ok;
        }
        CHECK(matches <= 1);
        const Letter got = phase_of(pi, rows);
        CHECK((matches == 0) == (got == pi.sink()));
    }
}

TEST_CASE("commutation on random cyclic configurations") {
    const FactorMap pi = make_factor_map(eca(51), zero_phases(51));
    const CommutationReport rep = verify_commutation(eca(51), pi, counter_ca(2), random_cyclic(100, 12, 3));
    CHECK(rep.pass());
    CHECK(rep.positions_checked == 1200);
    CHECK(rep.locked_positions > 0);

    const PhaseSet p204 = build_phase_set(eca(204), PeriodicPoint{{}, w("010")});
    const FactorMap pi204 = make_factor_map(eca(204), p204);
    CHECK(verify_commutation(eca(204), pi204, counter_ca(1), random_cyclic(100, 12, 4)).pass());
}

TEST_CASE("commutation on sampled windows") {
    const FactorMap pi = make_factor_map(eca(51), zero_phases(51));
    const auto inputs = sampled_window_inputs(2, 200, 24, 7);
    const CommutationReport a = verify_commutation(eca(51), pi, counter_ca(2), inputs, 1);
    const CommutationReport b = verify_commutation(eca(51), pi, counter_ca(2), inputs, 4);
    CHECK(a.pass());
    CHECK(a.positions_checked > 0);
    CHECK(a.positions_checked == b.positions_checked);
    CHECK(a.locked_positions == b.locked_positions);
}

TEST_CASE("topological factor examples") {
    const TopologicalFactor f51 = build_topological_factor(eca(51), {0, 2});
    CHECK(f51.counter.modulus == 2);
    CHECK(f51.map.phases.rows == std::vector<Word>{w("000"), w("111")});
    CHECK(f51.verification.pass());
    CHECK(f51.verification.positions_checked > 0);

    const TopologicalFactor f204 = build_topological_factor(eca(204), {0, 1});
    CHECK(f204.counter.modulus == 1);
    CHECK(f204.verification.pass());

    const TopologicalFactor f4 = build_topological_factor(eca(4), {1, 1});
    CHECK(f4.counter.modulus == 1);
    CHECK(f4.map.phases.preperiod == 1);
    CHECK(f4.verification.pass());

    CHECK_THROWS_AS(build_topological_factor(eca(4), {0, 1}), Error);
    CHECK_THROWS_AS(build_topological_factor(eca(170), {3, 2}), Error);
}

TEST_CASE("topological factors commute for every globally equicontinuous rule") {
    for (int n = 0; n < 256; ++n) {
        const auto g = check_global_equicontinuity(eca(n), 3, 2);
        if (!g) continue;
        const TopologicalFactor f = build_topological_factor(eca(n), *g, 6);
        CHECK_MESSAGE(f.verification.pass(), "rule " << n);
    }
}

TEST_CASE("negative controls report mismatches") {
    // Rows swapped only relabel the phases, so the map still commutes.
    PhaseSet swapped = zero_phases(51);
    std::swap(swapped.rows[0], swapped.rows[1]);
    const auto inputs = exhaustive_cyclic_inputs(2, 6);
    CHECK(verify_commutation(eca(51), make_factor_map(eca(51), swapped), counter_ca(2), inputs).pass());

    const FactorMap pi51 = make_factor_map(eca(51), zero_phases(51));
    const CommutationReport wrong = verify_commutation(eca(204), pi51, counter_ca(2), inputs);
    CHECK(!wrong.pass());
    CHECK(wrong.mismatch_count == wrong.locked_positions);
    REQUIRE(!wrong.mismatches.empty());
    const Mismatch& m = wrong.mismatches.front();
    CHECK(m.pi_of_fx != m.c_of_pix);
    CHECK(!m.context.empty());

    const FactorMap early = make_factor_map(eca(4), zero_phases(4), 1);
    const CommutationReport r4 = verify_commutation(eca(4), early, counter_ca(1), inputs);
    CHECK(!r4.pass());
    CHECK(r4.mismatches.size() <= 16);
}

TEST_CASE("splicing preserves central traces") {
    std::size_t setups = 0;
    for (int n : {4, 51, 204, 232}) {
        for (std::size_t len = 6; len <= 9; ++len)
            for (const Word& y : all_words(2, len)) {
                const auto out = check::splice_trace_check(eca(n), CyclicConfig{y}, 6);
                setups += out.setup;
                CHECK_MESSAGE(out.mismatches == 0, "rule " << n << " y " << format_word(y));
            }
    }
    CHECK(setups > 100);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(make_factor_map(eca(51), PhaseSet{0, 2, {w("000")}, {}}), Error);
    CHECK_THROWS_AS(make_factor_map(eca(51), PhaseSet{0, 1, {w("00")}, {}}), Error);
    CHECK_THROWS_AS(verify_commutation(eca(51), make_factor_map(eca(51), zero_phases(51)), counter_ca(3), {}), Error);
}

}
