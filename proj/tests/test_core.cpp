#include <doctest.h>

#include <random>
#include <set>

#include "eqca/core.hpp"
#include "oracles.hpp"

using namespace eqca;

namespace {

Word w(const char* text) { return parse_word(text, 62); }

std::vector<std::string> rows_of(const Trace& t) {
    std::vector<std::string> out;
    for (const Word& row : t.rows) out.push_back(format_word(row));
    return out;
}

template <class F>
void expect_error(ErrorCode code, F&& body) {
    try {
        body();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("eca tables follow the bit encoding") {
    for (int n : {0, 4, 51, 90, 170, 204, 255}) {
        const RuleTable rule = eca(n);
        CHECK(rule.alphabet_size() == 2);
        CHECK(rule.radius() == 1);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    const Letter nb[3] = {Letter(a), Letter(b), Letter(c)};
                    CHECK(rule(nb) == oracle::eca_bit(n, a, b, c));
                }
    }
    const Letter nb[3] = {1, 0, 1};
    CHECK(eca(170)(nb) == 1);
    CHECK(eca(204)(nb) == 0);
    expect_error(ErrorCode::invalid_argument, [] { eca(256); });
    expect_error(ErrorCode::invalid_argument, [] { eca(-1); });
}

TEST_CASE("rule table validation") {
    expect_error(ErrorCode::invalid_argument, [] { RuleTable(2, 1, {0, 1}); });
    expect_error(ErrorCode::invalid_argument, [] { RuleTable(2, 0, {0, 2}); });
    expect_error(ErrorCode::invalid_argument, [] { RuleTable(0, 0, {}); });
    CHECK(RuleTable(3, 0, {1, 2, 0}).size() == 3);
    CHECK(eca(4).hash() != eca(5).hash());
    CHECK(eca(4).hash() == eca(4).hash());
}

TEST_CASE("cyclic step examples") {
    CHECK(step(eca(170), CyclicConfig{w("01")}).cells == w("10"));
    CHECK(step(eca(51), CyclicConfig{w("0")}).cells == w("1"));
    CHECK(step(eca(204), CyclicConfig{w("0110100")}).cells == w("0110100"));
    expect_error(ErrorCode::alphabet_mismatch, [] { step(eca(4), CyclicConfig{w("012")}); });
}

TEST_CASE("cyclic step matches the bitwise oracle on every elementary rule") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 256; ++n)
        for (std::size_t len : {1, 2, 3, 5, 13}) {
            const Word x = oracle::random_word(rng, len, 2);
            CHECK(step(eca(n), CyclicConfig{x}).cells == oracle::eca_step(n, x));
        }
}

TEST_CASE("cyclic step on larger radii and alphabets matches the padded oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int q = 2 + static_cast<int>(rng() % 3);
        const int r = static_cast<int>(rng() % 3);
        const RuleTable rule(q, r, oracle::random_word(rng, oracle::power(q, 2 * r + 1), q));
        const Word x = oracle::random_word(rng, 1 + rng() % 9, q);
        CHECK(step(rule, CyclicConfig{x}).cells == oracle::cyclic_step(rule, x));
    }
}

TEST_CASE("shift commutation") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 256; n += 7) {
        const CyclicConfig x{oracle::random_word(rng, 9, 2)};
        for (std::int64_t k = -3; k <= 11; ++k)
            CHECK(step(eca(n), x.rotated(k)) == step(eca(n), x).rotated(k));
    }
}

TEST_CASE("window step examples") {
    WindowConfig a = step(eca(170), WindowConfig{0, w("0110")});
    CHECK(a.offset == 1);
    CHECK(a.cells == w("10"));  // f(0,1,1) = 1, f(1,1,0) = 0
    WindowConfig b = step(eca(4), WindowConfig{-2, w("00100")});
    CHECK(b.offset == -1);
    CHECK(b.cells == w("010"));
    WindowConfig c = step(eca(90), WindowConfig{5, w("101")});
    CHECK(c.offset == 6);
    CHECK(c.cells.size() == 1);
    CHECK(step(eca(90), WindowConfig{5, w("10")}).empty());
}

TEST_CASE("trace examples") {
    const Trace t1 = trace(eca(204), CyclicConfig{w("0110")}, {-2, 3}, 5);
    CHECK(t1.rows.size() == 6);
    CHECK(std::set<Word>(t1.rows.begin(), t1.rows.end()).size() == 1);
    CHECK(rows_of(trace(eca(170), WindowConfig{0, w("0100011")}, {3, 1}, 3)) ==
          std::vector<std::string>{"0", "0", "1", "1"});
    CHECK(rows_of(trace(eca(51), CyclicConfig{w("0")}, {0, 3}, 2)) == std::vector<std::string>{"000", "111", "000"});
}

TEST_CASE("window trace names the required light cone") {
    try {
        trace(eca(4), WindowConfig{0, w("00000")}, {2, 1}, 3);
        FAIL("expected insufficient window");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::insufficient_window);
        CHECK(std::string(e.what()).find("[-1, 6)") != std::string::npos);
    }
    CHECK(light_cone(eca(4), {2, 1}, 3) == Interval{-1, 7});
}

TEST_CASE("light-cone soundness against wide cyclic extensions") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        const int q = 2 + static_cast<int>(rng() % 2);
        const int r = 1 + static_cast<int>(rng() % 2);
        const RuleTable rule(q, r, oracle::random_word(rng, oracle::power(q, 2 * r + 1), q));
        const std::int64_t offset = static_cast<std::int64_t>(rng() % 21) - 10;
        const WindowConfig x{offset, oracle::random_word(rng, 10 + rng() % 20, q)};
        const std::size_t s = 1 + rng() % 3;
        const std::size_t slack = x.cells.size() - s;
        const std::size_t horizon = slack / (2 * static_cast<std::size_t>(r));
        const std::size_t lead = static_cast<std::size_t>(r) * horizon;
        const Interval iv{offset + static_cast<std::int64_t>(lead), s};
        const Trace from_window = trace(rule, x, iv, horizon);
        // cyclic proxy: the window followed by random filler
        Word big = x.cells;
        const Word filler = oracle::random_word(rng, 40, q);
        big.insert(big.end(), filler.begin(), filler.end());
        const CyclicConfig proxy = CyclicConfig{big}.rotated(-offset);
        CHECK(trace(rule, proxy, iv, horizon) == from_window);
    }
}

TEST_CASE("temporal cycle examples") {
    CHECK(detect_temporal_cycle(eca(204), CyclicConfig{w("0110")}).cycle == TemporalCycle{0, 1});
    const CycleResult c51 = detect_temporal_cycle(eca(51), CyclicConfig{w("0")});
    CHECK(c51.cycle == TemporalCycle{0, 2});
    REQUIRE(c51.states.size() == 2);
    CHECK(c51.states[0].cells == w("0"));
    CHECK(c51.states[1].cells == w("1"));
    CHECK(detect_temporal_cycle(eca(4), CyclicConfig{w("01")}).cycle == TemporalCycle{0, 1});
}

TEST_CASE("temporal cycles are minimal against a full-history oracle") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 256; ++n) {
        const Word x = oracle::random_word(rng, 1 + rng() % 10, 2);
        std::vector<Word> history{x};
        std::size_t p0 = 0, p = 0;
        for (;;) {
            const Word next = oracle::eca_step(n, history.back());
            const auto it = std::find(history.begin(), history.end(), next);
            if (it != history.end()) {
                p0 = static_cast<std::size_t>(it - history.begin());
                p = history.size() - p0;
                break;
            }
            history.push_back(next);
        }
        const CycleResult got = detect_temporal_cycle(eca(n), CyclicConfig{x});
        CHECK(got.cycle == TemporalCycle{p0, p});
        REQUIRE(got.states.size() == p);
        for (std::size_t k = 0; k < p; ++k) CHECK(got.states[k].cells == history[p0 + k]);
    }
}

TEST_CASE("minimize_cycle reduces a non-minimal bound") {
    const std::vector<int> s{5, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2};
    CHECK(minimize_cycle(s, {3, 4}) == TemporalCycle{1, 2});
}

TEST_CASE("compose matches nested local application exhaustively") {
    for (int a = 0; a < 256; a += 5)
        for (int b = 0; b < 256; b += 11) {
            const RuleTable c = compose(eca(a), eca(b));
            REQUIRE(c.radius() == 2);
            for (std::uint64_t code = 0; code < 32; ++code) {
                const Word nb = oracle::decode(code, 5, 2);
                CHECK(c.at(code) == oracle::apply_local(eca(a), oracle::apply_local(eca(b), nb))[0]);
            }
        }
}

TEST_CASE("compose_rule equals iterated stepping") {
    std::mt19937_64 rng(23);
    for (int n = 0; n < 256; ++n)
        for (std::size_t k = 1; k <= 3; ++k) {
            const RuleTable fk = compose_rule(eca(n), k);
            CHECK(fk.radius() == static_cast<int>(k));
            for (std::uint64_t code = 0; code < oracle::power(2, 2 * k + 1); ++code) {
                Word x = oracle::decode(code, 2 * k + 1, 2);
                for (std::size_t j = 0; j < k; ++j) x = oracle::apply_local(eca(n), x);
                CHECK(fk.at(code) == x[0]);
            }
            const Word y = oracle::random_word(rng, 17, 2);
            Word z = y;
            for (std::size_t j = 0; j < k; ++j) z = oracle::eca_step(n, z);
            CHECK(step(fk, CyclicConfig{y}).cells == z);
        }
}

TEST_CASE("compose_rule examples") {
    CHECK(same_map(compose_rule(eca(204), 3), identity_rule(2)));
    CHECK(compose_rule(eca(204), 3).radius() == 3);
    CHECK(same_map(compose_rule(eca(51), 2), identity_rule(2)));
    const RuleTable f2 = compose_rule(eca(90), 2);
    for (std::uint64_t code = 0; code < 32; ++code) {
        const Word nb = oracle::decode(code, 5, 2);
        CHECK(f2.at(code) == (nb[0] ^ nb[4]));
    }
    CHECK(same_map(compose_rule(eca(4), 2), compose_rule(eca(4), 1)));
    CHECK(compose_rule(eca(4), 0) == identity_rule(2));
    expect_error(ErrorCode::budget_exceeded, [] { compose_rule(eca(30), 20, 1 << 20); });
}

TEST_CASE("widen keeps the map") {
    const RuleTable wide = widen(eca(110), 3);
    CHECK(wide.radius() == 3);
    CHECK(same_map(wide, eca(110)));
    CHECK(!same_map(wide, eca(111)));
    CHECK(same_map(shift_rule(2), eca(170)));
    expect_error(ErrorCode::invalid_argument, [] { widen(eca(110), 0); });
}

TEST_CASE("preimage decisions agree with brute force on every word up to length 6") {
    for (int n = 0; n < 256; ++n) {
        const RuleTable rule = eca(n);
        const bool surjective = is_surjective(rule).surjective;
        for (std::size_t len = 1; len <= 6; ++len)
            for (const Word& word : [&] {
                     std::vector<Word> all;
                     for (std::uint64_t c = 0; c < oracle::power(2, len); ++c) all.push_back(oracle::decode(c, len, 2));
                     return all;
                 }()) {
                const bool brute = oracle::has_preimage(rule, word);
                CHECK_MESSAGE(has_preimage(rule, word) == brute, "rule " << n << " word " << format_word(word));
                if (surjective) CHECK(brute);
            }
    }
}

TEST_CASE("surjectivity verdicts and shortest orphans against brute force") {
    for (int n = 0; n < 256; ++n) {
        const RuleTable rule = eca(n);
        const SurjectivityResult res = is_surjective(rule);
        const auto shortest = oracle::shortest_orphan_length(rule, 10);
        CHECK_MESSAGE(res.surjective == !shortest.has_value(), "rule " << n);
        if (!res.surjective) {
            REQUIRE(res.orphan.has_value());
            CHECK(!oracle::has_preimage(rule, *res.orphan));
            if (shortest) CHECK(res.orphan->size() == *shortest);
        }
    }
}

TEST_CASE("surjectivity examples") {
    CHECK(is_surjective(eca(170)).surjective);
    CHECK(is_surjective(eca(90)).surjective);
    const SurjectivityResult r4 = is_surjective(eca(4));
    CHECK(!r4.surjective);
    CHECK(!r4.balanced);
    REQUIRE(r4.orphan);
    CHECK(!oracle::has_preimage(eca(4), *r4.orphan));
    // balanced but not surjective
    bool found = false;
    for (int n = 0; n < 256 && !found; ++n) {
        const SurjectivityResult r = is_surjective(eca(n));
        if (r.balanced && !r.surjective) {
            found = true;
            CHECK(!oracle::has_preimage(eca(n), *r.orphan));
        }
    }
    CHECK(found);
    CHECK(is_surjective(shift_rule(3)).surjective);
}

TEST_CASE("render spacetime") {
    Trace one{2, {0, 1}, {w("0")}};
    CHECK(render_spacetime(one, RenderFormat::ascii) == ".\n");
    Trace t51 = trace(eca(51), CyclicConfig{w("0")}, {0, 3}, 1);
    CHECK(render_spacetime(t51, RenderFormat::ascii) == "...\n###\n");
    const std::string pgm = render_spacetime(t51, RenderFormat::pgm);
    CHECK(pgm == std::string("P5\n3 2\n255\n") + std::string(3, '\0') + std::string(3, '\xff'));
    CHECK(render_spacetime(Trace{}, RenderFormat::ascii).empty());
    CHECK(render_spacetime(Trace{}, RenderFormat::pgm).empty());
    Trace t3{3, {0, 3}, {Word{0, 1, 2}}};
    CHECK(render_spacetime(t3, RenderFormat::ascii) == "012\n");
    const std::string p3 = render_spacetime(t3, RenderFormat::pgm);
    CHECK(p3.substr(p3.size() - 3) == std::string{'\0', '\x7f', '\xff'});
}

TEST_CASE("word parsing") {
    CHECK(parse_word("0110", 2) == Word{0, 1, 1, 0});
    CHECK(parse_word("0,3,12", 13) == Word{0, 3, 12});
    CHECK(format_word(Word{0, 3, 12}) == "03c");
    CHECK(parse_word(format_word(Word{0, 3, 12}), 13) == Word{0, 3, 12});
    CHECK(parse_word("", 2).empty());
    expect_error(ErrorCode::parse_error, [] { parse_word("01x?", 2); });
    expect_error(ErrorCode::alphabet_mismatch, [] { parse_word("012", 2); });
    expect_error(ErrorCode::parse_error, [] { parse_word("1,,2", 3); });
}

TEST_CASE("checked_pow budget") {
    CHECK(checked_pow(2, 10) == 1024);
    CHECK(checked_pow(3, 0) == 1);
    expect_error(ErrorCode::budget_exceeded, [] { checked_pow(2, 30, 1 << 20); });
    expect_error(ErrorCode::budget_exceeded, [] { checked_pow(10, 30); });
}

}
