#include "byrne/seeml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>

#include "byrne/error.hpp"

namespace byrne {

namespace {

constexpr std::array<TagInfo, 15> kTags{{
    {"su", TagCategory::Gda, false},
    {"seg", TagCategory::Gda, false},
    {"np", TagCategory::Gda, false},
    {"vp", TagCategory::Gda, false},
    {"w", TagCategory::Gda, false},
    {"SABLE", TagCategory::Sable, false},
    {"RATE", TagCategory::Sable, false},
    {"PITCH", TagCategory::Sable, false},
    {"VOLUME", TagCategory::Sable, false},
    {"EMPH", TagCategory::Sable, false},
    {"BREAK", TagCategory::Sable, true},
    {"AUDIO", TagCategory::Sable, true},
    {"EXPR", TagCategory::Expression, false},
    {"AU", TagCategory::ActionUnit, false},
    {"EVENT", TagCategory::AuralEvent, true},
}};

constexpr TagInfo kAffect{"AFFECT", TagCategory::Affect, false};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void escape_into(std::string& out, std::string_view s, bool in_attr) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"':
                if (in_attr) {
                    out += "&quot;";
                    break;
                }
                [[fallthrough]];
            default: out += c;
        }
    }
}

// `&#65;` or `&#x41;` at the start of `s`: code point and length.
std::optional<std::pair<char32_t, std::size_t>> char_ref(std::string_view s) {
    const bool hex = s.size() > 2 && (s[2] == 'x' || s[2] == 'X');
    const std::size_t digits = hex ? 3 : 2;
    const auto semi = s.find(';');
    if (semi == std::string_view::npos || semi <= digits || semi > digits + 8) return std::nullopt;
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + digits, s.data() + semi, v, hex ? 16 : 10);
    if (ec != std::errc() || p != s.data() + semi || v == 0 || v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) {
        return std::nullopt;
    }
    return std::pair{static_cast<char32_t>(v), semi + 1};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string decode_entities(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, char>, 5> kEntities{
        {{"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}}};
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        bool matched = false;
        if (s[i] == '&') {
            for (auto [name, ch] : kEntities) {
                if (s.substr(i, name.size()) == name) {
                    out += ch;
                    i += name.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched && s.substr(i, 2) == "&#") {
            if (auto cp = char_ref(s.substr(i))) {
                append_utf8(out, cp->first);
                i += cp->second;
                matched = true;
            }
        }
        if (!matched) out += s[i++];
    }
    return out;
}

void write_nodes(std::string& out, const std::vector<Node>& nodes) {
    for (const auto& n : nodes) {
        if (n.is_text()) {
            escape_into(out, n.text, false);
            continue;
        }
        out += '<';
        out += n.tag;
        for (const auto& [k, v] : n.attrs) {
            out += ' ';
            out += k;
            out += "=\"";
            escape_into(out, v, true);
            out += '"';
        }
        if (n.children.empty()) {
            out += "/>";
            continue;
        }
        out += '>';
        write_nodes(out, n.children);
        out += "</";
        out += n.tag;
        out += '>';
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    SeemlDocument parse() {
        struct Open {
            Node node;
            int line;
        };
        std::vector<Open> stack;
        std::vector<Node> roots;
        auto sink = [&]() -> std::vector<Node>& { return stack.empty() ? roots : stack.back().node.children; };

        while (pos_ < text_.size()) {
            if (text_[pos_] != '<') {
                const auto next = text_.find('<', pos_);
                const auto chunk = text_.substr(pos_, next == std::string_view::npos ? std::string_view::npos : next - pos_);
                if (chunk.find('>') != std::string_view::npos) throw ParseError("stray '>' in text", line_);
                count_lines(chunk);
                sink().push_back(Node::make_text(decode_entities(chunk)));
                pos_ = next == std::string_view::npos ? text_.size() : next;
                continue;
            }
            const int tag_line = line_;
            const auto close = text_.find('>', pos_);
            if (close == std::string_view::npos) throw ParseError("unterminated tag", tag_line);
            std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
            count_lines(text_.substr(pos_, close - pos_ + 1));
            pos_ = close + 1;

            if (!body.empty() && body.front() == '/') {
                const std::string_view name = trim(body.substr(1));
                const TagInfo* info = lookup(name, tag_line);
                if (info->always_empty) {
                    throw ParseError("</" + std::string(info->name) + "> closes an empty element", tag_line);
                }
                if (stack.empty() || stack.back().node.tag != info->name) {
                    throw ParseError("unbalanced </" + std::string(info->name) + ">" +
                                         (stack.empty() ? "" : ", expected </" + stack.back().node.tag + ">"),
                                     tag_line);
                }
                Node done = std::move(stack.back().node);
                stack.pop_back();
                sink().push_back(std::move(done));
                continue;
            }

            bool self_closed = false;
            if (!body.empty() && body.back() == '/') {
                self_closed = true;
                body.remove_suffix(1);
            }
            Node element = open_tag(body, tag_line);
            const TagInfo* info = find_tag(element.tag);
            if (self_closed || info->always_empty) {
                sink().push_back(std::move(element));
            } else {
                stack.push_back({std::move(element), tag_line});
            }
        }
        if (!stack.empty()) {
            throw ParseError("unclosed <" + stack.back().node.tag + ">", stack.back().line);
        }
        normalize(roots);
        return SeemlDocument{std::move(roots)};
    }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    void count_lines(std::string_view s) { line_ += static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

    static const TagInfo* lookup(std::string_view name, int line) {
        const TagInfo* info = find_tag(name);
        if (info == nullptr) throw ParseError("unknown tag <" + std::string(name) + ">", line);
        return info;
    }

    Node open_tag(std::string_view body, int line) {
        std::size_t i = 0;
        auto is_name_char = [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == ':';
        };
        while (i < body.size() && is_name_char(body[i])) ++i;
        const TagInfo* info = lookup(body.substr(0, i), line);
        const bool gda = info->category == TagCategory::Gda;
        Node element = Node::make_element(std::string(info->name));

        for (;;) {
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            if (i >= body.size()) break;
            const std::size_t name_begin = i;
            while (i < body.size() && is_name_char(body[i])) ++i;
            if (i == name_begin) throw ParseError("bad attribute syntax in <" + std::string(body) + ">", line);
            std::string name = gda ? lower(body.substr(name_begin, i - name_begin))
                                   : upper(body.substr(name_begin, i - name_begin));
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            if (i >= body.size() || body[i] != '=') throw ParseError("attribute " + name + " has no value", line);
            ++i;
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            std::string value;
            if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
                const char quote = body[i++];
                const auto end = body.find(quote, i);
                if (end == std::string_view::npos) throw ParseError("unterminated attribute value", line);
                value = decode_entities(body.substr(i, end - i));
                i = end + 1;
            } else {
                const std::size_t vb = i;
                while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
                value = decode_entities(body.substr(vb, i - vb));
            }
            if (!element.attrs.emplace(std::move(name), std::move(value)).second) {
                throw ParseError("duplicate attribute in <" + std::string(body) + ">", line);
            }
        }
        if (info->category == TagCategory::Expression) {
            if (auto it = element.attrs.find("NAME"); it != element.attrs.end()) it->second = lower(it->second);
        }
        try {
            validate_element(element);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line);
        }
        return element;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

int parse_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return -1;
    return v;
}

}  // namespace

const TagInfo* find_tag(std::string_view name) {
    for (const auto& t : kTags) {
        if (iequals(t.name, name)) return &t;
    }
    if (iequals(kAffect.name, name)) return &kAffect;
    return nullptr;
}

bool is_expression_name(std::string_view name) {
    return std::find(kExpressionNames.begin(), kExpressionNames.end(), name) != kExpressionNames.end();
}

Node Node::make_text(std::string text) {
    Node n;
    n.kind = Kind::Text;
    n.text = std::move(text);
    return n;
}

Node Node::make_element(std::string tag, Attributes attrs, std::vector<Node> children) {
    Node n;
    n.kind = Kind::Element;
    n.tag = std::move(tag);
    n.attrs = std::move(attrs);
    n.children = std::move(children);
    return n;
}

const std::string* Node::attr(const std::string& name) const {
    auto it = attrs.find(name);
    return it == attrs.end() ? nullptr : &it->second;
}

void validate_element(const Node& element) {
    const TagInfo* info = find_tag(element.tag);
    if (info == nullptr) throw ParseError("unknown tag <" + element.tag + ">", 0);
    if (info->always_empty && !element.children.empty()) {
        throw ParseError("<" + element.tag + "> cannot enclose text", 0);
    }
    auto require = [&](const char* attr) -> const std::string& {
        const std::string* v = element.attr(attr);
        if (v == nullptr) throw ParseError("<" + element.tag + "> requires " + attr + "=", 0);
        return *v;
    };
    switch (info->category) {
        case TagCategory::Expression: {
            const std::string& name = require("NAME");
            if (!is_expression_name(name)) throw ParseError("unknown facial expression '" + name + "'", 0);
            break;
        }
        case TagCategory::ActionUnit: {
            const int au = parse_int(require("NUM"));
            if (au < 1 || au > kMaxActionUnit) {
                throw ParseError("action unit " + *element.attr("NUM") + " outside 1.." + std::to_string(kMaxActionUnit), 0);
            }
            break;
        }
        case TagCategory::AuralEvent: require("NAME"); break;
        default:
            if (element.tag == "AUDIO") require("SRC");
            break;
    }
}

SeemlDocument parse_seeml(std::string_view text) { return Parser(text).parse(); }

std::string serialize_seeml(const SeemlDocument& doc) {
    std::string out;
    write_nodes(out, doc.roots);
    return out;
}

std::string plain_text(const Node& node) {
    if (node.is_text()) return node.text;
    std::string out;
    for (const auto& c : node.children) out += plain_text(c);
    return out;
}

std::string plain_text(const SeemlDocument& doc) {
    std::string out;
    for (const auto& n : doc.roots) out += plain_text(n);
    return out;
}

void normalize(std::vector<Node>& nodes) {
    std::vector<Node> out;
    out.reserve(nodes.size());
    for (auto& n : nodes) {
        if (n.is_text()) {
            if (n.text.empty()) continue;
            if (!out.empty() && out.back().is_text()) {
                out.back().text += n.text;
                continue;
            }
        } else {
            normalize(n.children);
        }
        out.push_back(std::move(n));
    }
    nodes = std::move(out);
}

}  // namespace byrne
