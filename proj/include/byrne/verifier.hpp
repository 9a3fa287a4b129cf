#pragma once

// Interprets a merged SEEML utterance against a style file and splits it into
// a SABLE speech script and a timed FACS/viseme face timeline.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "byrne/seeml.hpp"

namespace byrne {

/// Face- and voice-specific interpretation rules.
struct StyleFile {
    struct ActionUnitWeight {
        int action_unit = 0;
        double weight = 1.0;
        friend bool operator==(const ActionUnitWeight&, const ActionUnitWeight&) = default;
    };

    std::map<std::string, std::vector<ActionUnitWeight>> expressions;
    std::map<std::string, std::string> aural;  // event name -> sound file
    double words_per_minute = 180.0;
    double break_ms = 250.0;  // pause added by each BREAK
    double point_ms = 200.0;  // face event length for AUs placed at a point
    std::optional<std::string> base_pitch;
    std::optional<std::string> pitch_range;
    std::map<std::string, std::string> visemes;  // letter class -> viseme symbol

    double word_ms() const { return 60000.0 / words_per_minute; }

    friend bool operator==(const StyleFile&, const StyleFile&) = default;
};

struct TimedWord {
    std::string text;
    double onset_ms = 0.0;
    double duration_ms = 0.0;
};

struct TimelineEvent {
    enum class Kind { ActionUnit, Viseme };

    std::int64_t onset_ms = 0;
    Kind kind = Kind::ActionUnit;
    int action_unit = 0;       // ActionUnit
    std::string viseme;        // Viseme
    double intensity = 1.0;    // ActionUnit, in [0, 1]
    std::int64_t duration_ms = 0;

    friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

/// Sort order of a timeline: onset, then AUs before visemes, then id.
bool timeline_before(const TimelineEvent& a, const TimelineEvent& b);

struct OutputBundle {
    std::string speech_script;
    std::vector<TimelineEvent> face_timeline;
    std::int64_t total_duration_ms = 0;
    /// End time of every `seg`, ascending: where an utterance may be cut.
    std::vector<std::int64_t> phrase_ends_ms;
    std::vector<TimedWord> words;
};

/// Letter classes scanned by lip_sync.
inline constexpr std::array<std::string_view, 9> kVisemeClasses{"a", "e", "i", "o", "u", "mbp", "fv", "w", "wide"};

/// Cartoon lip sync: letter-class scan of each word, consecutive repeats
/// collapsed, `h`/`l` silent, spread evenly over the word with at most one
/// viseme per 60 ms. Unmapped classes use the class name as the symbol.
std::vector<TimelineEvent> lip_sync(const std::vector<TimedWord>& words,
                                    const std::map<std::string, std::string>& visemes);

/// Throws VerificationError for an expression or aural event the style does
/// not define, or facial markup in a document without words.
OutputBundle verify_and_split(const SeemlDocument& doc, const StyleFile& style);

/// `#byrne-facs v1` header, then `onset<TAB>AU|VIS<TAB>id<TAB>intensity<TAB>duration`
/// per event; visemes carry `-` as intensity.
std::string write_face_timeline(const std::vector<TimelineEvent>& events);

/// Inverse of write_face_timeline. Throws ParseError.
std::vector<TimelineEvent> read_face_timeline(std::string_view text);

}  // namespace byrne
