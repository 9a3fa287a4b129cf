#pragma once

// Expressive markup: leaf-level markup directives, their application to an
// utterance, and the tag combination rules.

#include <string>
#include <vector>

#include "byrne/seeml.hpp"

namespace byrne {

struct DirectiveScope {
    enum class Kind { Utterance, EveryPhrase, LexicalTrigger, PointStart, PointEnd };

    Kind kind = Kind::Utterance;
    std::string word;  // LexicalTrigger only

    bool is_point() const noexcept { return kind == Kind::PointStart || kind == Kind::PointEnd; }

    friend bool operator==(const DirectiveScope&, const DirectiveScope&) = default;
};

struct MarkupDirective {
    enum class Kind { FacialExpression, ActionUnit, AuralEvent, SpeechTag };

    Kind kind = Kind::FacialExpression;
    std::string name;      // expression name, aural event name, or SABLE tag
    int action_unit = 0;   // ActionUnit only
    double intensity = 1;  // FacialExpression / ActionUnit, in [0, 1]
    Attributes attrs;      // SpeechTag only
    DirectiveScope scope;

    /// Throws DirectiveError if the directive cannot be realised.
    void validate() const;

    /// The element this directive inserts, without children.
    Node make_element() const;

    friend bool operator==(const MarkupDirective&, const MarkupDirective&) = default;
};

/// Applies directives in order:
///   Utterance       wraps the whole content
///   EveryPhrase     wraps each `seg`
///   LexicalTrigger  wraps each whole-word, case-insensitive occurrence
///                   (a `w` whose text is the word is wrapped as a unit)
///   PointStart/End  inserts an empty element at the start/end
SeemlDocument apply_directives(SeemlDocument doc, const std::vector<MarkupDirective>& directives);

/// Identity used by the combination rules: tag, non-numeric attributes, and
/// the names and units of numeric attributes.
std::string tag_identity(const Node& element);

/// True if every numeric attribute is signed (a change such as "+10%") and
/// there is at least one.
bool is_delta_tag(const Node& element);

/// Applies the combination rules bottom-up:
///  - non-identical tags are left alone;
///  - a tag nested in an identical one is redundant and removed;
///  - nested identical delta tags are summed onto the inner span, with the
///    outer tag kept on the rest of its span.
/// The result contains no element with an identical ancestor.
SeemlDocument merge_tags(SeemlDocument doc);

/// Formats a signed delta such as "+15%" (values rounded to 1e-6).
std::string format_delta(double value, std::string_view unit);

}  // namespace byrne
