#pragma once

// Character profiles and style files.
//
// Profile forms (s-expressions, `;` or `#` comments):
//   (static <fact>)
//   (names (<id> "<display>") ...)
//   (params lambda: <seconds>)
//   (emotion-rule (pre <pattern>...) (add <emotion-schema>...) (del <pattern>...))
//   (behavior id: <sym> group: <sym> (motivated-by <type> [target: <pattern>] ...)
//             [(pre <pattern>...)] (children <id>...) | (directives <directive>...))
//   (template id: <sym> (pre <pattern>...) (text "<seeml fragment>"))
//
// Directives:
//   (expr <name> [level: <0..1>] [scope: <scope>])
//   (au <1..46> [level: <0..1>] [scope: <scope>])
//   (aural <name> scope: start|end)
//   (speech <TAG> [<attr>: <value>]... [scope: <scope>])
// with <scope> one of utterance (default), phrase, start, end, (word <w>).

#include <string>
#include <string_view>
#include <vector>

#include "byrne/behavior.hpp"
#include "byrne/emotion.hpp"
#include "byrne/textgen.hpp"
#include "byrne/verifier.hpp"

namespace byrne {

struct CharacterProfile {
    std::vector<Fact> statics;
    NameTable name_table;
    std::vector<EmotionRule> emotion_rules;
    std::vector<BehaviorSpec> behaviors;
    std::vector<Template> templates;
    double lambda_use_penalty = kDefaultUsePenaltySeconds;

    friend bool operator==(const CharacterProfile&, const CharacterProfile&) = default;
};

/// Parses and validates. Throws ProfileError listing every problem found
/// (syntax errors stop at the first).
CharacterProfile load_profile(std::string_view text);

/// Canonical text; load_profile(dump_profile(p)) == p.
std::string dump_profile(const CharacterProfile& profile);

/// Sectioned key = value text with [expressions], [aural], [speech] and
/// [visemes]; expression lines read `name = AU<k>:<w> AU<k>:<w> ...`.
/// Throws StyleError.
StyleFile load_style(std::string_view text);

/// Reads a whole file. Throws Error if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace byrne
