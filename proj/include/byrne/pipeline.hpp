#pragma once

// The per-tick commentary loop and log replay.

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "byrne/emotion.hpp"
#include "byrne/fact_feed.hpp"
#include "byrne/profile.hpp"
#include "byrne/textgen.hpp"
#include "byrne/verifier.hpp"

namespace byrne {

struct Utterance {
    int number = 0;  // 1-based, in start order
    GameFact fact;
    std::string template_id;
    double start_time = 0.0;
    OutputBundle bundle;

    double end_time() const { return start_time + static_cast<double>(bundle.total_duration_ms) / 1000.0; }
};

struct PipelineState {
    FactBoard board;
    EmotionPool pool;
    UsageHistory history;
    std::optional<Utterance> in_progress;
    double clock = -std::numeric_limits<double>::infinity();
    std::uint64_t rng_seed = 0;
    int utterances_started = 0;
    /// Board keys already verbalized, and keys no template covers. Neither
    /// is selected again while it stays on the board.
    std::set<std::string> spoken;
    std::set<std::string> skipped;
};

struct CommentaryEvent {
    enum class Kind { UtteranceStart, UtteranceEnd, Interrupted };

    double time = 0.0;
    Kind kind = Kind::UtteranceStart;
    int utterance = 0;
    std::string fact_key;
    std::string template_id;            // UtteranceStart
    std::optional<OutputBundle> bundle;  // UtteranceStart
    std::int64_t cut_ms = 0;            // Interrupted: offset into the utterance
};

/// One clock tick: board update, emotion update, then the utterance in
/// progress either ends, is cut at its next phrase end for a strictly more
/// relevant fact, or carries on; an idle commentator picks the best unspoken
/// fact. Facts with no matching template are skipped and logged.
/// Throws OrderingError if the tick does not advance the clock.
std::pair<PipelineState, std::vector<CommentaryEvent>> step(PipelineState state, const TickUpdate& update,
                                                            const CharacterProfile& profile, const StyleFile& style);

struct ReplayOptions {
    std::string log_path;
    std::string character_path;
    std::string style_path;
    std::string out_dir;
    double tick_seconds = 1.0;
    std::uint64_t seed = 0;
    bool echo_trace = false;
};

/// Tick times replayed for a log: every log tick plus a grid of
/// `tick_seconds` from the first log tick to the last one.
std::vector<double> tick_schedule(const std::vector<TickUpdate>& log, double tick_seconds);

/// `%.3f`-formatted seconds.
std::string format_time(double seconds);

/// One commentary.trace line, without the newline.
std::string trace_line(const CommentaryEvent& event);

/// Writes utt-<n>.sable, utt-<n>.facs, commentary.trace and emotions.trace
/// to the output directory. Returns 0, 1 on load errors or 2 on errors
/// while running; diagnostics go to the log.
int run_replay(const ReplayOptions& options);

}  // namespace byrne
