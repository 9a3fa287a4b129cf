#include <doctest.h>

#include <filesystem>

#include "byrne/pipeline.hpp"

using namespace byrne;

namespace {

const std::string kDemo = std::string(BYRNE_SOURCE_DIR) + "/data/demo/";

const char* kProfile = R"(
(static (supports team: a))
(template id: pass-1 (pre (pass from: ?a to: ?b)) (text "<su><seg>?a passes to ?b.</seg></su>"))
(template id: has-ball-1 (pre (has-ball player: ?p))
  (text "<su><seg>?p has the ball,</seg><seg>looks up,</seg><seg>and takes a touch.</seg></su>"))
(template id: move-1 (pre (move player: ?p)) (text "<su><seg>?p moves.</seg></su>"))
)";

GameFact gf(const std::string& text, double relevance) {
    return make_game_fact(fact_from_sexpr(read_sexpr(text)), relevance);
}

struct Fixture {
    CharacterProfile profile = load_profile(kProfile);
    StyleFile style = load_style(read_file(kDemo + "default.style"));
};

std::string slurp_dir(const std::filesystem::path& dir) {
    std::string all;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.filename().string() + "\n" + read_file(f.string());
    return all;
}

}  // namespace

TEST_CASE("the three-fact tick starts the pass") {
    Fixture fx;
    const TickUpdate tick{125,
                          {gf("(pass from: a1 to: a2 fromloc: (30 10) toloc: (20 10) begintime: 120 endtime: 125)", 10),
                           gf("(has-ball player: a2 location: (20 10))", 5),
                           gf("(move player: b1 fromloc: (5 10) toloc: (10 10) begintime: 115 endtime: 120)", 3)}};
    auto [state, events] = step(PipelineState{}, tick, fx.profile, fx.style);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == CommentaryEvent::Kind::UtteranceStart);
    CHECK(events[0].time == 125);
    CHECK(events[0].fact_key.rfind("(pass ", 0) == 0);
    CHECK(events[0].template_id == "pass-1");
    REQUIRE(events[0].bundle);
    CHECK(events[0].bundle->speech_script.find("a1 passes to a2.") != std::string::npos);
    CHECK(state.clock == 125);
    CHECK(state.in_progress.has_value());
}

TEST_CASE("an empty tick on an idle state does nothing") {
    Fixture fx;
    auto [state, events] = step(PipelineState{}, TickUpdate{1, {}}, fx.profile, fx.style);
    CHECK(events.empty());
    CHECK(state.pool.empty());
    CHECK(state.clock == 1);
    CHECK_THROWS_AS(step(state, TickUpdate{1, {}}, fx.profile, fx.style), OrderingError);
}

TEST_CASE("a more relevant fact cuts the utterance at a phrase end") {
    Fixture fx;
    auto [s1, e1] = step(PipelineState{}, TickUpdate{10, {gf("(has-ball player: a2)", 5)}}, fx.profile, fx.style);
    REQUIRE(e1.size() == 1);
    const OutputBundle bundle = *e1[0].bundle;
    REQUIRE(bundle.phrase_ends_ms.size() == 3);
    // 180 words per minute: "a2 has the ball," is 4 words, ending at 1333 ms.
    CHECK(bundle.phrase_ends_ms[0] == 1333);

    auto [s2, e2] = step(s1, TickUpdate{11, {gf("(pass from: a2 to: a7)", 10)}}, fx.profile, fx.style);
    REQUIRE(e2.size() == 2);
    CHECK(e2[0].kind == CommentaryEvent::Kind::Interrupted);
    CHECK(e2[0].cut_ms == 1333);
    CHECK(e2[0].time == doctest::Approx(11.333));
    CHECK(std::find(bundle.phrase_ends_ms.begin(), bundle.phrase_ends_ms.end(), e2[0].cut_ms) !=
          bundle.phrase_ends_ms.end());
    CHECK(e2[1].kind == CommentaryEvent::Kind::UtteranceStart);
    CHECK(e2[1].time == e2[0].time);
    CHECK(e2[1].template_id == "pass-1");

    // The pass runs to its end; the next tick after that closes it.
    auto [s3, e3] = step(s2, TickUpdate{14, {}}, fx.profile, fx.style);
    REQUIRE(e3.size() == 1);
    CHECK(e3[0].kind == CommentaryEvent::Kind::UtteranceEnd);
    CHECK_FALSE(s3.in_progress.has_value());
}

TEST_CASE("equal relevance does not interrupt, and uncovered facts are skipped") {
    Fixture fx;
    auto [s1, e1] = step(PipelineState{}, TickUpdate{10, {gf("(has-ball player: a2)", 5)}}, fx.profile, fx.style);
    auto [s2, e2] = step(s1, TickUpdate{11, {gf("(move player: a3)", 5), gf("(offside player: b9)", 9)}},
                         fx.profile, fx.style);
    CHECK(e2.empty());
    CHECK(s2.skipped.contains("(offside player: b9)"));
    auto [s3, e3] = step(s2, TickUpdate{20, {}}, fx.profile, fx.style);
    REQUIRE(e3.size() == 2);
    CHECK(e3[0].kind == CommentaryEvent::Kind::UtteranceEnd);
    CHECK(e3[1].fact_key == "(move player: a3)");
}

TEST_CASE("tick schedule merges log ticks into the grid") {
    const std::vector<TickUpdate> log{{100, {}}, {101.5, {}}, {103, {}}};
    CHECK(tick_schedule(log, 1) == std::vector<double>{100, 101, 101.5, 102, 103});
    CHECK(tick_schedule(log, 2) == std::vector<double>{100, 101.5, 102, 103});
    CHECK(tick_schedule({}, 1).empty());
}

TEST_CASE("trace formatting") {
    CommentaryEvent e;
    e.time = 11.3333;
    e.kind = CommentaryEvent::Kind::Interrupted;
    e.utterance = 3;
    e.fact_key = "(has-ball player: a2)";
    e.cut_ms = 1333;
    CHECK(trace_line(e) == "11.333\tINTERRUPT\tutt-3\t(has-ball player: a2)\tcut_ms=1333");
}

TEST_CASE("replay is deterministic and reports load failures") {
    const auto base = std::filesystem::temp_directory_path() / "byrne-pipeline-test";
    std::filesystem::remove_all(base);
    ReplayOptions opts;
    opts.log_path = kDemo + "game.log";
    opts.character_path = kDemo + "commentator.profile";
    opts.style_path = kDemo + "default.style";
    opts.out_dir = (base / "one").string();
    REQUIRE(run_replay(opts) == 0);
    opts.out_dir = (base / "two").string();
    REQUIRE(run_replay(opts) == 0);
    CHECK(slurp_dir(base / "one") == slurp_dir(base / "two"));

    opts.style_path = kDemo + "missing.style";
    CHECK(run_replay(opts) == 1);
    opts.style_path = kDemo + "default.style";
    opts.tick_seconds = 0;
    CHECK(run_replay(opts) == 1);
    std::filesystem::remove_all(base);
}
