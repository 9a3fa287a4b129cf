#include "byrne/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "byrne/behavior.hpp"
#include "byrne/markup.hpp"

namespace byrne {

namespace {

// Facts still worth mentioning: on the board, not yet spoken, coverable.
FactBoard candidates(const PipelineState& state) {
    FactBoard out = state.board;
    for (const auto& k : state.spoken) out.erase(k);
    for (const auto& k : state.skipped) out.erase(k);
    return out;
}

void forget_purged(std::set<std::string>& keys, const FactBoard& board) {
    std::erase_if(keys, [&](const std::string& k) { return board.find(k) == nullptr; });
}

Utterance generate(const PipelineState& state, const GameFact& fact, double now, const CharacterProfile& profile,
                   const StyleFile& style) {
    const TemplateChoice choice =
        select_template(fact, profile.templates, state.history, now, profile.statics, profile.lambda_use_penalty);
    SeemlDocument doc = instantiate(*choice.chosen, choice.bindings, profile.name_table);
    const auto winners = arbitrate(activate_behaviors(profile.behaviors, state.pool, profile.statics, now));
    doc = merge_tags(apply_directives(std::move(doc), expand(winners, profile.behaviors)));
    return Utterance{state.utterances_started + 1, fact, choice.chosen->id, now, verify_and_split(doc, style)};
}

// Starts the best candidate more relevant than `floor`, skipping facts that
// no template covers.
bool start_next(PipelineState& state, double now, double floor, const CharacterProfile& profile,
                const StyleFile& style, std::vector<CommentaryEvent>& events) {
    FactBoard pool = candidates(state);
    if (state.in_progress) pool.erase(state.in_progress->fact.key());
    while (auto fact = select_fact(pool)) {
        if (fact->relevance <= floor) return false;
        try {
            Utterance u = generate(state, *fact, now, profile, style);
            state.history = record_usage(std::move(state.history), u.template_id, now);
            state.spoken.insert(fact->key());
            ++state.utterances_started;
            CommentaryEvent e;
            e.time = now;
            e.kind = CommentaryEvent::Kind::UtteranceStart;
            e.utterance = u.number;
            e.fact_key = fact->key();
            e.template_id = u.template_id;
            e.bundle = u.bundle;
            events.push_back(std::move(e));
            state.in_progress = std::move(u);
            return true;
        } catch (const CoverageError& e) {
            spdlog::warn("skipping {}: {}", fact->key(), e.what());
            state.skipped.insert(fact->key());
            pool.erase(fact->key());
        }
    }
    return false;
}

CommentaryEvent finish(const Utterance& u, double time) {
    CommentaryEvent e;
    e.time = time;
    e.kind = CommentaryEvent::Kind::UtteranceEnd;
    e.utterance = u.number;
    e.fact_key = u.fact.key();
    return e;
}

}  // namespace

std::pair<PipelineState, std::vector<CommentaryEvent>> step(PipelineState state, const TickUpdate& update,
                                                            const CharacterProfile& profile, const StyleFile& style) {
    const double now = update.tick_time;
    state.board = apply_tick(std::move(state.board), update);
    state.clock = now;
    forget_purged(state.spoken, state.board);
    forget_purged(state.skipped, state.board);
    state.pool = apply_rules(std::move(state.pool), state.board, profile.statics, profile.emotion_rules, now);
    state.pool = decay_pool(std::move(state.pool), now);

    std::vector<CommentaryEvent> events;
    if (state.in_progress && state.in_progress->end_time() <= now) {
        events.push_back(finish(*state.in_progress, state.in_progress->end_time()));
        state.in_progress.reset();
    }

    if (state.in_progress) {
        const Utterance& cur = *state.in_progress;
        FactBoard pool = candidates(state);
        if (const GameFact* live = state.board.find(cur.fact.key())) pool.upsert(*live);
        const GameFact* live = state.board.find(cur.fact.key());
        if (should_interrupt(live ? *live : cur.fact, pool)) {
            const double floor = live ? live->relevance : 0.0;
            const double elapsed_ms = (now - cur.start_time) * 1000.0;
            std::int64_t cut = cur.bundle.total_duration_ms;
            for (auto end : cur.bundle.phrase_ends_ms) {
                if (static_cast<double>(end) >= elapsed_ms) {
                    cut = end;
                    break;
                }
            }
            const double cut_time = cur.start_time + static_cast<double>(cut) / 1000.0;
            PipelineState trial = state;
            std::vector<CommentaryEvent> started;
            if (start_next(trial, cut_time, floor, profile, style, started)) {
                CommentaryEvent e = finish(cur, cut_time);
                if (cut < cur.bundle.total_duration_ms) {
                    e.kind = CommentaryEvent::Kind::Interrupted;
                    e.cut_ms = cut;
                }
                events.push_back(std::move(e));
                events.insert(events.end(), started.begin(), started.end());
                state = std::move(trial);
            } else {
                state.skipped = trial.skipped;
            }
        }
    }

    if (!state.in_progress) {
        start_next(state, now, -std::numeric_limits<double>::infinity(), profile, style, events);
    }
    return {std::move(state), std::move(events)};
}

std::vector<double> tick_schedule(const std::vector<TickUpdate>& log, double tick_seconds) {
    std::vector<double> out;
    if (log.empty()) return out;
    const double first = log.front().tick_time;
    const double last = log.back().tick_time;
    std::size_t i = 0;
    for (long k = 0;; ++k) {
        const double grid = first + static_cast<double>(k) * tick_seconds;
        while (i < log.size() && log[i].tick_time < grid - 1e-9) out.push_back(log[i++].tick_time);
        if (i < log.size() && std::abs(log[i].tick_time - grid) <= 1e-9) {
            out.push_back(log[i++].tick_time);
        } else if (grid <= last) {
            out.push_back(grid);
        }
        if (grid >= last) break;
    }
    while (i < log.size()) out.push_back(log[i++].tick_time);
    return out;
}

std::string format_time(double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", seconds);
    return buf;
}

std::string trace_line(const CommentaryEvent& e) {
    std::string out = format_time(e.time) + "\t";
    const std::string utt = "utt-" + std::to_string(e.utterance);
    switch (e.kind) {
        case CommentaryEvent::Kind::UtteranceStart:
            out += "START\t" + utt + "\t" + e.fact_key + "\ttemplate=" + e.template_id +
                   "\tduration_ms=" + std::to_string(e.bundle ? e.bundle->total_duration_ms : 0);
            break;
        case CommentaryEvent::Kind::UtteranceEnd: out += "END\t" + utt + "\t" + e.fact_key; break;
        case CommentaryEvent::Kind::Interrupted:
            out += "INTERRUPT\t" + utt + "\t" + e.fact_key + "\tcut_ms=" + std::to_string(e.cut_ms);
            break;
    }
    return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

std::string emotion_lines(double now, const EmotionPool& pool) {
    const std::string t = format_time(now);
    if (pool.empty()) return t + "\t-\n";
    std::string out;
    for (const auto& e : pool.structures()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", intensity_at(e, now));
        out += t + "\t" + std::string(to_string(e.type)) + "\t" + (e.target ? to_string(*e.target) : "nil") + "\t" +
               to_string(e.cause) + "\t" + buf + "\n";
    }
    return out;
}

// Bound on how long a replay may keep ticking after the log runs out.
constexpr double kMaxTailSeconds = 600.0;

}  // namespace

int run_replay(const ReplayOptions& options) {
    std::vector<TickUpdate> log;
    CharacterProfile profile;
    StyleFile style;
    try {
        if (!(options.tick_seconds > 0.0)) throw Error("tick length must be positive");
        log = parse_game_log(read_file(options.log_path));
        profile = load_profile(read_file(options.character_path));
        style = load_style(read_file(options.style_path));
    } catch (const ProfileError& e) {
        for (const auto& d : e.diagnostics()) {
            spdlog::error("{}:{}: {}", options.character_path, d.line, d.message);
        }
        return 1;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    }

    try {
        const std::filesystem::path out_dir(options.out_dir);
        std::filesystem::create_directories(out_dir);

        std::string commentary = "#byrne-commentary v1 seed=" + std::to_string(options.seed) + "\n";
        std::string emotions = "#byrne-emotions v1\n";
        PipelineState state;
        state.rng_seed = options.seed;

        auto run_tick = [&](const TickUpdate& update) {
            auto [next, events] = step(std::move(state), update, profile, style);
            state = std::move(next);
            emotions += emotion_lines(update.tick_time, state.pool);
            for (const auto& e : events) {
                const std::string line = trace_line(e);
                spdlog::debug("{}", line);
                if (options.echo_trace) std::cout << line << '\n';
                commentary += line + "\n";
                if (e.kind == CommentaryEvent::Kind::UtteranceStart) {
                    const std::string stem = "utt-" + std::to_string(e.utterance);
                    write_text(out_dir / (stem + ".sable"), e.bundle->speech_script + "\n");
                    write_text(out_dir / (stem + ".facs"), write_face_timeline(e.bundle->face_timeline));
                }
            }
        };

        std::size_t next_log = 0;
        for (double t : tick_schedule(log, options.tick_seconds)) {
            TickUpdate update{t, {}};
            if (next_log < log.size() && log[next_log].tick_time == t) update = log[next_log++];
            run_tick(update);
        }
        if (!log.empty()) {
            const double last = log.back().tick_time;
            for (long k = 1; k * options.tick_seconds <= kMaxTailSeconds; ++k) {
                if (!state.in_progress && candidates(state).empty()) break;
                run_tick(TickUpdate{last + static_cast<double>(k) * options.tick_seconds, {}});
            }
        }
        if (state.in_progress) spdlog::warn("replay ended with {} unfinished", "utt-" + std::to_string(state.in_progress->number));

        write_text(out_dir / "commentary.trace", commentary);
        write_text(out_dir / "emotions.trace", emotions);
        spdlog::info("replayed {} log ticks, {} utterances", log.size(), state.utterances_started);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}

}  // namespace byrne
