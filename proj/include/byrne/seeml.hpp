#pragma once

// SEEML document model: GDA linguistic structure, SABLE speech tags,
// facial expressions, FACS action units, aural events and affect tags in one
// SGML-style tree.
//
// Canonical output uses lower-case GDA tags/attributes and upper-case for
// everything else; attributes are sorted and double-quoted. Elements without
// children are written self-closed (`<AU NUM="9"/>`). Input tag and
// attribute names are case-insensitive; BREAK, AUDIO and EVENT may omit the
// self-closing slash.

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace byrne {

enum class TagCategory { Gda, Sable, Expression, ActionUnit, AuralEvent, Affect };

struct TagInfo {
    std::string_view name;  // canonical spelling
    TagCategory category;
    bool always_empty;
};

/// Case-insensitive lookup; nullptr for unknown tags.
const TagInfo* find_tag(std::string_view name);

/// Facial expression names accepted by EXPR.
inline constexpr std::array<std::string_view, 6> kExpressionNames{"anger", "disgust", "fear",
                                                                  "sadness", "smile", "surprise"};
bool is_expression_name(std::string_view name);

inline constexpr int kMaxActionUnit = 46;

using Attributes = std::map<std::string, std::string>;

struct Node {
    enum class Kind { Text, Element };

    Kind kind = Kind::Text;
    std::string text;  // Text only
    std::string tag;   // Element only, canonical spelling
    Attributes attrs;
    std::vector<Node> children;

    static Node make_text(std::string text);
    static Node make_element(std::string tag, Attributes attrs = {}, std::vector<Node> children = {});

    bool is_text() const noexcept { return kind == Kind::Text; }
    bool is_element() const noexcept { return kind == Kind::Element; }
    bool is(std::string_view tag_name) const noexcept { return is_element() && tag == tag_name; }
    const std::string* attr(const std::string& name) const;

    friend bool operator==(const Node&, const Node&) = default;
};

struct SeemlDocument {
    std::vector<Node> roots;

    friend bool operator==(const SeemlDocument&, const SeemlDocument&) = default;
};

/// Throws ParseError on unbalanced or unknown tags, an EXPR name outside the
/// six expressions, or an AU number outside 1..46.
SeemlDocument parse_seeml(std::string_view text);

std::string serialize_seeml(const SeemlDocument& doc);

/// Concatenated text with all markup removed.
std::string plain_text(const SeemlDocument& doc);
std::string plain_text(const Node& node);

/// Merges adjacent text nodes and drops empty ones, recursively.
void normalize(std::vector<Node>& nodes);

/// Checks the category invariants of a single element (not its children).
/// Throws ParseError describing the violation.
void validate_element(const Node& element);

/// Visits every element, parents before children.
template <typename Fn>
void for_each_element(const std::vector<Node>& nodes, Fn&& fn) {
    for (const auto& n : nodes) {
        if (!n.is_element()) continue;
        fn(n);
        for_each_element(n.children, fn);
    }
}

}  // namespace byrne
