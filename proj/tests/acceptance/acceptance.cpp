// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// all pass.

#include <spdlog/spdlog.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "byrne/behavior.hpp"
#include "byrne/error.hpp"
#include "byrne/markup.hpp"
#include "byrne/pipeline.hpp"
#include "merge_oracle.hpp"
#include "seeml_gen.hpp"

using namespace byrne;
namespace fs = std::filesystem;

namespace {

const fs::path kSource(BYRNE_SOURCE_DIR);
const fs::path kDemo = kSource / "data" / "demo";
const fs::path kGolden = kSource / "tests" / "golden" / "demo";

// Collects the reasons a criterion failed.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 8) failures.push_back(what);
    }
};

GameFact gf(const std::string& text, double relevance) {
    return make_game_fact(fact_from_sexpr(read_sexpr(text)), relevance);
}

// --- 1 ----------------------------------------------------------------------

void emotion_decay(Check& c) {
    EmotionStructure sad;
    sad.type = EmotionType::Sadness;
    sad.base_intensity = 10;
    sad.cause = read_sexpr("(scored team: a time: 125)");
    sad.decay = DecayFunction::parse(read_sexpr("1/t"));
    sad.created_at = 125;
    EmotionPool pool;
    pool.insert(sad);
    for (int s = 0; s <= 10; ++s) {
        const double want = 10.0 / std::max(1, s);
        const double got = intensity_at(sad, 125 + s);
        c.expect(std::abs(got - want) <= 1e-9, "second " + std::to_string(s) + ": " + std::to_string(got));
        c.expect(decay_pool(pool, 125 + s).size() == 1, "removed early at second " + std::to_string(s));
    }
    c.expect(intensity_at(sad, 135) == 1.0, "not exactly 1 at second 10");
    c.expect(decay_pool(pool, 136).empty(), "still present at second 11");
}

// --- 2 ----------------------------------------------------------------------

void fact_selection(Check& c) {
    const auto log = parse_game_log(R"(
(tick 125)
(fact (pass from: a1 to: a2 fromloc: (30 10) toloc: (20 10) begintime: 120 endtime: 125) relevance: 10)
(fact (has-ball player: a2 location: (20 10)) relevance: 5)
(fact (move player: b1 fromloc: (5 10) toloc: (10 10) begintime: 115 endtime: 120) relevance: 3)
)");
    const auto chosen = select_fact(apply_tick({}, log.at(0)));
    c.expect(chosen && chosen->predicate() == "pass" && chosen->relevance == 10, "worked example did not pick the pass");

    byrne::testing::Rng rng(2002);
    for (int trial = 0; trial < 1000; ++trial) {
        TickUpdate u{1, {}};
        for (int i = rng.uniform(1, 10); i > 0; --i) {
            std::string text = "(f" + std::to_string(rng.uniform(0, 6)) + " x: " + std::to_string(rng.uniform(0, 3));
            if (rng.chance(0.5)) text += " endtime: " + std::to_string(rng.uniform(0, 5));
            u.facts.push_back(gf(text + ")", rng.uniform(1, 10) + (rng.chance(0.5) ? 0.25 : 0.0)));
        }
        const FactBoard board = apply_tick({}, u);
        const auto pick = select_fact(board);
        bool is_max = pick.has_value();
        for (const auto& [k, f] : board.entries()) is_max = is_max && pick->relevance >= f.relevance;
        c.expect(is_max, "board " + std::to_string(trial) + ": not an argmax");

        const double scale = rng.real(0.5, 20.0);
        TickUpdate scaled{1, {}};
        for (const auto& [k, f] : board.entries()) {
            GameFact g = f;
            g.relevance = g.relevance * scale + 1.0;  // keep every fact on the board
            scaled.facts.push_back(g);
        }
        const auto again = select_fact(apply_tick({}, scaled));
        c.expect(again && pick && again->key() == pick->key(), "board " + std::to_string(trial) + ": scaling changed the pick");
    }
}

// --- 3 and 4 ----------------------------------------------------------------

std::vector<SeemlDocument> corpus() {
    byrne::testing::Rng rng(3003);
    std::vector<SeemlDocument> docs;
    for (int i = 0; i < 1000; ++i) docs.push_back(byrne::testing::random_seeml(rng));
    return docs;
}

void merge_algebra(Check& c) {
    int n = 0;
    for (const auto& doc : corpus()) {
        const std::string tag = "doc " + std::to_string(n++) + " ";
        const auto once = merge_tags(doc);
        c.expect(merge_tags(once) == once, tag + "not idempotent");
        c.expect(plain_text(once) == plain_text(doc), tag + "text changed");
        const auto redundant = byrne::testing::redundancy_violations(once);
        c.expect(redundant.empty(), tag + (redundant.empty() ? "" : redundant.front()));
        const auto wrong = byrne::testing::merge_violations(doc, once);
        c.expect(wrong.empty(), tag + (wrong.empty() ? "" : wrong.front()));
    }
}

std::vector<std::string> fixture_texts() {
    std::vector<std::string> out;
    const auto profile = load_profile(read_file((kDemo / "commentator.profile").string()));
    for (const auto& t : profile.templates) out.push_back(t.body_text);
    if (fs::exists(kGolden)) {
        for (const auto& e : fs::directory_iterator(kGolden)) {
            if (e.path().extension() == ".sable") out.push_back(read_file(e.path().string()));
        }
    }
    return out;
}

void round_trip(Check& c) {
    int n = 0;
    for (const auto& doc : corpus()) {
        const std::string text = serialize_seeml(doc);
        const auto back = parse_seeml(text);
        c.expect(back == doc && serialize_seeml(back) == text, "corpus doc " + std::to_string(n) + " changed");
        ++n;
    }
    const auto fixtures = fixture_texts();
    c.expect(fixtures.size() >= 20, "too few fixtures: " + std::to_string(fixtures.size()));
    for (const auto& text : fixtures) {
        const std::string once = serialize_seeml(parse_seeml(text));
        c.expect(serialize_seeml(parse_seeml(once)) == once, "fixture not a fixpoint: " + once);
    }
}

// --- 5 ----------------------------------------------------------------------

void split(Check& c) {
    const StyleFile style = load_style(read_file((kDemo / "default.style").string()));
    const auto bundle = verify_and_split(parse_seeml("<EXPR NAME=\"smile\">ball</EXPR>"), style);
    std::vector<TimelineEvent> aus;
    for (const auto& e : bundle.face_timeline) {
        if (e.kind == TimelineEvent::Kind::ActionUnit) aus.push_back(e);
    }
    const double word_ms = 60000.0 / style.words_per_minute;
    c.expect(aus.size() == 2, "expected two AU events, got " + std::to_string(aus.size()));
    if (aus.size() == 2) {
        c.expect(aus[0].action_unit == 6 && std::abs(aus[0].intensity - 0.6) < 1e-9, "first event is not AU6@0.6");
        c.expect(aus[1].action_unit == 12 && std::abs(aus[1].intensity - 0.9) < 1e-9, "second event is not AU12@0.9");
        for (const auto& e : aus) {
            c.expect(e.onset_ms == 0, "AU does not start with the word");
            c.expect(std::abs(static_cast<double>(e.duration_ms) - word_ms) <= 1.0,
                     "AU lasts " + std::to_string(e.duration_ms) + " ms");
        }
    }
    try {
        const auto script = parse_seeml(bundle.speech_script);
        c.expect(script.roots.size() == 1 && script.roots[0].is("SABLE"), "script root is not SABLE");
        for_each_element(script.roots, [&](const Node& n) {
            const auto cat = find_tag(n.tag)->category;
            c.expect(cat == TagCategory::Gda || cat == TagCategory::Sable, "script contains <" + n.tag + ">");
        });
        c.expect(plain_text(script) == "ball", "script text changed");
    } catch (const Error& e) {
        c.expect(false, std::string("script does not parse: ") + e.what());
    }
}

// --- 6 ----------------------------------------------------------------------

void arbitration(Check& c) {
    auto emotion = [](EmotionType type, double intensity, const char* cause) {
        EmotionStructure e;
        e.type = type;
        e.base_intensity = intensity;
        e.cause = read_sexpr(cause);
        e.decay = DecayFunction::parse(read_sexpr("constant"));
        return e;
    };
    EmotionPool pool;
    pool.insert(emotion(EmotionType::Happiness, 4, "(scores team: a)"));
    pool.insert(emotion(EmotionType::Interest, 5, "(shoot player: a9)"));
    pool.insert(emotion(EmotionType::Sadness, 8, "(injury player: a4)"));
    MarkupDirective smile;
    smile.name = "smile";
    MarkupDirective frown;
    frown.name = "sadness";
    std::vector<BehaviorSpec> specs(2);
    specs[0].id = "beam";
    specs[0].group = "face";
    specs[0].motivated_by = {{EmotionType::Happiness, {}}, {EmotionType::Interest, {}}};
    specs[0].directives = {smile};
    specs[1].id = "mope";
    specs[1].group = "face";
    specs[1].motivated_by = {{EmotionType::Sadness, {}}};
    specs[1].directives = {frown};
    const auto winners = arbitrate(activate_behaviors(specs, pool, {}, 0));
    c.expect(winners.size() == 1 && winners[0].spec.id == "beam" && winners[0].activation == 9,
             "two motivations (4+5) did not beat one (8)");

    byrne::testing::Rng rng(6006);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<ActivatedBehavior> set;
        for (int i = rng.uniform(0, 15); i > 0; --i) {
            BehaviorSpec s;
            s.id = "b" + std::to_string(rng.uniform(0, 40));
            s.group = "g" + std::to_string(rng.uniform(0, 4));
            set.push_back({s, rng.uniform(1, 8) + (rng.chance(0.3) ? 0.5 : 0.0), {}});
        }
        std::map<std::string, int> count;
        std::map<std::string, double> best;
        for (const auto& a : set) best[a.spec.group] = std::max(best[a.spec.group], a.activation);
        const auto w = arbitrate(set);
        for (const auto& a : w) {
            ++count[a.spec.group];
            c.expect(a.activation == best[a.spec.group], "winner is not the strongest in its group");
        }
        c.expect(count.size() == best.size(), "a group has no winner");
        for (const auto& [g, n] : count) c.expect(n == 1, "group " + g + " has " + std::to_string(n) + " winners");
    }
}

// --- 7 ----------------------------------------------------------------------

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path().string());
    return out;
}

void golden_replay(Check& c) {
    const std::string log_text = read_file((kDemo / "game.log").string());
    const auto log = parse_game_log(log_text);
    std::set<std::string> facts;
    for (const auto& t : log) {
        for (const auto& f : t.facts) facts.insert(f.key());
    }
    c.expect(!log.empty() && log.back().tick_time - log.front().tick_time >= 120, "demo log shorter than 2 minutes");
    c.expect(facts.size() >= 20, "demo log has only " + std::to_string(facts.size()) + " facts");

    const fs::path base = fs::temp_directory_path() / ("byrne-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(base);
    ReplayOptions opts;
    opts.log_path = (kDemo / "game.log").string();
    opts.character_path = (kDemo / "commentator.profile").string();
    opts.style_path = (kDemo / "default.style").string();
    for (const char* run : {"first", "second"}) {
        opts.out_dir = (base / run).string();
        c.expect(run_replay(opts) == 0, std::string("replay ") + run + " failed");
    }
    const auto first = read_tree(base / "first");
    c.expect(!first.empty(), "replay wrote nothing");
    c.expect(first == read_tree(base / "second"), "the two runs differ");
    const auto golden = read_tree(kGolden);
    c.expect(!golden.empty(), "no committed goldens");
    c.expect(first == golden, "output differs from the committed goldens");
    for (const auto& [name, text] : golden) {
        if (!first.contains(name)) c.expect(false, "missing output " + name);
        else if (first.at(name) != text) c.expect(false, "differs from golden: " + name);
    }
    fs::remove_all(base);

    // Every cut must land on a phrase end of the utterance it interrupts.
    const CharacterProfile profile = load_profile(read_file(opts.character_path));
    const StyleFile style = load_style(read_file(opts.style_path));
    PipelineState state;
    std::size_t next = 0;
    int cuts = 0;
    for (double t : tick_schedule(log, 1.0)) {
        TickUpdate u{t, {}};
        if (next < log.size() && log[next].tick_time == t) u = log[next++];
        std::optional<OutputBundle> current;
        if (state.in_progress) current = state.in_progress->bundle;
        auto [s, events] = step(std::move(state), u, profile, style);
        state = std::move(s);
        for (const auto& e : events) {
            if (e.kind != CommentaryEvent::Kind::Interrupted) continue;
            ++cuts;
            const auto& ends = current->phrase_ends_ms;
            c.expect(std::find(ends.begin(), ends.end(), e.cut_ms) != ends.end(),
                     "cut at " + std::to_string(e.cut_ms) + " ms is not a phrase end");
        }
    }
    c.expect(cuts > 0, "the demo contains no interruption");
}

// --- 8 ----------------------------------------------------------------------

void profile_validation(Check& c) {
    struct Case {
        const char* name;
        const char* text;
        std::vector<std::string> needles;
    };
    const std::vector<Case> cases{
        {"cycle",
         "(behavior id: loop-a group: g (motivated-by fear) (children loop-b))\n"
         "(behavior id: loop-b group: g (children loop-a))",
         {"cycle", "loop-"}},
        {"dangling child", "(behavior id: parent group: g (motivated-by fear) (children ghost))", {"ghost"}},
        {"unbound variable",
         "(emotion-rule (pre (scores team: ?team))\n"
         "  (add (type: anger intensity: 5 target: ?culprit cause: (scores team: ?team) decay: 1/t)) (del))",
         {"unbound", "?culprit"}},
        {"unbound template slot", "(template id: t1 (pre (pass from: ?a)) (text \"<seg>?a to ?mystery</seg>\"))",
         {"unbound", "?mystery"}},
        {"unknown expression", "(behavior id: b1 group: g (motivated-by fear) (directives (expr glee)))", {"glee"}},
        {"duplicate id",
         "(behavior id: twin group: g (motivated-by fear) (directives (expr fear)))\n"
         "(behavior id: twin group: g (motivated-by fear) (directives (expr fear)))",
         {"duplicate", "twin"}},
    };
    for (const auto& k : cases) {
        try {
            load_profile(k.text);
            c.expect(false, std::string(k.name) + ": accepted");
        } catch (const ProfileError& e) {
            bool named = false;
            for (const auto& d : e.diagnostics()) {
                bool all = true;
                for (const auto& n : k.needles) all = all && d.message.find(n) != std::string::npos;
                named = named || all;
            }
            c.expect(named, std::string(k.name) + ": diagnostic does not name the offender: " + e.what());
        }
    }
    try {
        load_profile(read_file((kDemo / "commentator.profile").string()));
    } catch (const Error& e) {
        c.expect(false, std::string("demo profile rejected: ") + e.what());
    }
}

struct Criterion {
    int number;
    const char* title;
    double limit_seconds;
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<Criterion> criteria{
        {1, "emotion decay: 10/t sadness exact to 1e-9, removed at second 11", 1.0, emotion_decay},
        {2, "fact selection: worked example plus 1000 random boards", 5.0, fact_selection},
        {3, "merge algebra on 1000 random documents against a brute-force oracle", 30.0, merge_algebra},
        {4, "parse/serialize fixpoint on the corpus and bundled fixtures", 10.0, round_trip},
        {5, "split: smile over one word gives AU6@0.6 and AU12@0.9 for one word (+-1 ms)", 5.0, split},
        {6, "arbitration: 4+5 beats 8; one winner per group over 1000 sets", 5.0, arbitration},
        {7, "demo replay: deterministic, matches goldens, cuts on phrase ends", 5.0, golden_replay},
        {8, "profile validation names each offender", 5.0, profile_validation},
    };
    int failed = 0;
    for (const auto& k : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            k.run(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= k.limit_seconds) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", secs, k.limit_seconds);
            check.failures.push_back(buf);
        }
        const bool ok = check.failures.empty();
        failed += !ok;
        std::printf("%s [%d] %s (%.3f s)\n", ok ? "PASS" : "FAIL", k.number, k.title, secs);
        for (const auto& f : check.failures) std::printf("       %s\n", f.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
