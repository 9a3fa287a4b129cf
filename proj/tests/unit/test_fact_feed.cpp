#include <doctest.h>

#include <cmath>
#include <map>

#include "byrne/error.hpp"
#include "byrne/fact_feed.hpp"
#include "seeml_gen.hpp"

using namespace byrne;

namespace {

GameFact gf(const std::string& text, double relevance) {
    return make_game_fact(fact_from_sexpr(read_sexpr(text)), relevance);
}

const char* kThreeFacts = R"(
(tick 125)
(fact (pass from: a1 to: a2 fromloc: (30 10) toloc: (20 10) begintime: 120 endtime: 125) relevance: 10)
(fact (has-ball player: a2 location: (20 10)) relevance: 5)
(fact (move player: b1 fromloc: (5 10) toloc: (10 10) begintime: 115 endtime: 120) relevance: 3)
)";

// Random fact drawn from a small vocabulary so identities collide.
GameFact random_fact(byrne::testing::Rng& rng) {
    const std::string who = "p" + std::to_string(rng.uniform(1, 5));
    const int end = rng.uniform(0, 4);
    std::string text = "(" + std::string(rng.chance(0.5) ? "pass" : "move") + " player: " + who;
    if (end > 0) text += " endtime: " + std::to_string(100 + end);
    return gf(text + ")", rng.uniform(0, 12) + (rng.chance(0.3) ? 0.5 : 0.0));
}

}  // namespace

TEST_CASE("three-fact board from the worked example") {
    const auto log = parse_game_log(kThreeFacts);
    REQUIRE(log.size() == 1);
    CHECK(log[0].tick_time == 125);
    REQUIRE(log[0].facts.size() == 3);
    CHECK(log[0].facts[0].begin_time == 120);
    CHECK(log[0].facts[0].end_time == 125);
    CHECK_FALSE(log[0].facts[1].end_time.has_value());

    const FactBoard board = apply_tick(FactBoard{}, log[0]);
    CHECK(board.size() == 3);
    CHECK(board.clock() == 125);
    const auto chosen = select_fact(board);
    REQUIRE(chosen);
    CHECK(chosen->predicate() == "pass");
    CHECK(chosen->relevance == 10);
}

TEST_CASE("log errors") {
    CHECK_THROWS_AS(parse_game_log("(fact (a) relevance: 1)"), StructureError);
    CHECK_THROWS_AS(parse_game_log("(tick 5)\n(tick 5)"), OrderingError);
    CHECK_THROWS_AS(parse_game_log("(tick 5)\n(tick 4)"), OrderingError);
    CHECK_THROWS_AS(parse_game_log("(tick 5)\n(fact (a x: ?y) relevance: 1)"), ParseError);
    CHECK_THROWS_AS(parse_game_log("(tick 5)\n(fact (a) 3)"), ParseError);
    CHECK_THROWS_AS(parse_game_log("(tick five)"), ParseError);
    CHECK_THROWS_AS(parse_game_log("(tock 5)"), ParseError);
    CHECK(parse_game_log("\n# nothing\n").empty());
}

TEST_CASE("apply_tick re-scores, purges below one and keeps the clock strict") {
    FactBoard board = apply_tick({}, {1, {gf("(a)", 5), gf("(b)", 2)}});
    board = apply_tick(board, {2, {gf("(a)", 0.5), gf("(c)", 1)}});
    CHECK(board.find("(a)") == nullptr);
    CHECK(board.find("(b)")->relevance == 2);
    CHECK(board.find("(c)")->relevance == 1);
    CHECK_THROWS_AS(apply_tick(board, {2, {}}), OrderingError);
    CHECK_THROWS_AS(apply_tick(board, {1.5, {}}), OrderingError);
    CHECK(apply_tick(FactBoard{}, {0, {}}).empty());
}

TEST_CASE("select_fact tie-breaks") {
    CHECK_FALSE(select_fact(FactBoard{}).has_value());
    FactBoard board = apply_tick({}, {1, {gf("(a endtime: 3)", 5), gf("(b endtime: 4)", 5), gf("(c)", 5)}});
    CHECK(select_fact(board)->predicate() == "b");
    board = apply_tick({}, {1, {gf("(z)", 5), gf("(y)", 5)}});
    CHECK(select_fact(board)->predicate() == "y");
}

TEST_CASE("should_interrupt is strict") {
    const FactBoard board = apply_tick({}, {1, {gf("(has-ball player: a2)", 5), gf("(pass from: a1)", 10)}});
    CHECK(should_interrupt(gf("(has-ball player: a2)", 5), board));
    CHECK_FALSE(should_interrupt(gf("(pass from: a1)", 10), board));
    const FactBoard level = apply_tick({}, {1, {gf("(x)", 5), gf("(y)", 5)}});
    CHECK_FALSE(should_interrupt(gf("(x)", 5), level));
    // The reported fact is judged by its current board relevance.
    CHECK(should_interrupt(gf("(x)", 9), apply_tick({}, {1, {gf("(x)", 2), gf("(y)", 3)}})));
    CHECK(should_interrupt(gf("(gone)", 9), level));
}

TEST_CASE("property: apply_tick agrees with a brute-force replay") {
    byrne::testing::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        FactBoard board;
        std::map<std::string, double> oracle;  // key -> relevance, replayed from scratch
        for (int t = 0; t < 8; ++t) {
            TickUpdate u{static_cast<double>(t), {}};
            const int n = rng.uniform(0, 4);
            for (int i = 0; i < n; ++i) u.facts.push_back(random_fact(rng));
            board = apply_tick(board, u);
            for (const auto& f : u.facts) oracle[f.key()] = f.relevance;
            std::erase_if(oracle, [](const auto& kv) { return kv.second < 1.0; });

            REQUIRE(board.size() == oracle.size());
            for (const auto& [k, r] : oracle) {
                REQUIRE(board.find(k) != nullptr);
                CHECK(board.find(k)->relevance == r);
            }
            CHECK(board.clock() == t);
        }
    }
}

TEST_CASE("property: selection is the argmax and survives positive scaling") {
    byrne::testing::Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        TickUpdate u{1, {}};
        for (int i = rng.uniform(0, 8); i > 0; --i) u.facts.push_back(random_fact(rng));
        const FactBoard board = apply_tick({}, u);
        const auto chosen = select_fact(board);
        CHECK(chosen.has_value() == !board.empty());
        if (!chosen) continue;
        for (const auto& [k, f] : board.entries()) CHECK(chosen->relevance >= f.relevance);

        const double scale = rng.real(1.0, 5.0);
        TickUpdate scaled{1, {}};
        for (const auto& [k, f] : board.entries()) {
            GameFact g = f;
            g.relevance *= scale;
            scaled.facts.push_back(g);
        }
        CHECK(select_fact(apply_tick({}, scaled))->key() == chosen->key());
        CHECK_FALSE(should_interrupt(*chosen, board));
    }
}
