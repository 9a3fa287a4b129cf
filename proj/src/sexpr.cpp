#include "byrne/sexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "byrne/error.hpp"

namespace byrne {

Sexpr Sexpr::number(double value, int line) {
    Sexpr s(Kind::Number, {}, line);
    s.number_ = value;
    return s;
}

Sexpr Sexpr::list(std::vector<Sexpr> items, int line) {
    Sexpr s(Kind::List, {}, line);
    s.items_ = std::move(items);
    return s;
}

bool Sexpr::is_ground() const {
    if (kind_ == Kind::Variable) return false;
    return std::all_of(items_.begin(), items_.end(), [](const Sexpr& e) { return e.is_ground(); });
}

const Sexpr* Sexpr::find_keyword(std::string_view key) const {
    for (std::size_t i = 0; i + 1 < items_.size(); ++i) {
        if (items_[i].is_keyword() && items_[i].text() == key) return &items_[i + 1];
    }
    return nullptr;
}

bool operator==(const Sexpr& a, const Sexpr& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
        case Sexpr::Kind::Number: return a.number_ == b.number_;
        case Sexpr::Kind::List: return a.items_ == b.items_;
        default: return a.text_ == b.text_;
    }
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

namespace {

void write_string(std::string& out, const std::string& text) {
    out += '"';
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void write(std::string& out, const Sexpr& e) {
    switch (e.kind()) {
        case Sexpr::Kind::Symbol: out += e.text(); break;
        case Sexpr::Kind::Number: out += format_number(e.number_value()); break;
        case Sexpr::Kind::String: write_string(out, e.text()); break;
        case Sexpr::Kind::Keyword: out += e.text() + ":"; break;
        case Sexpr::Kind::Variable: out += "?" + e.text(); break;
        case Sexpr::Kind::List: {
            out += '(';
            bool first = true;
            for (const auto& item : e.items()) {
                if (!first) out += ' ';
                first = false;
                write(out, item);
            }
            out += ')';
            break;
        }
    }
}

bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"';
}

std::optional<double> parse_number(std::string_view tok) {
    if (tok.empty()) return std::nullopt;
    const char c = tok.front();
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.')) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

class Reader {
public:
    Reader(std::string_view text, int line) : text_(text), line_(line) {}

    std::vector<Sexpr> read_all() {
        std::vector<Sexpr> out;
        while (skip_space()) out.push_back(read());
        return out;
    }

private:
    // Returns false at end of input.
    bool skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == ';' || c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                return true;
            }
        }
        return false;
    }

    Sexpr read() {
        const char c = text_[pos_];
        const int start_line = line_;
        if (c == '(') {
            ++pos_;
            std::vector<Sexpr> items;
            for (;;) {
                if (!skip_space()) throw ParseError("unterminated list", start_line);
                if (text_[pos_] == ')') {
                    ++pos_;
                    return Sexpr::list(std::move(items), start_line);
                }
                items.push_back(read());
            }
        }
        if (c == ')') throw ParseError("unexpected ')'", line_);
        if (c == '"') return read_string();
        return read_atom();
    }

    Sexpr read_string() {
        const int start_line = line_;
        ++pos_;
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_++];
            if (c == '"') return Sexpr::string(std::move(out), start_line);
            if (c == '\\') {
                if (pos_ >= text_.size()) break;
                c = text_[pos_++];
            }
            if (c == '\n') ++line_;
            out += c;
        }
        throw ParseError("unterminated string", start_line);
    }

    Sexpr read_atom() {
        const std::size_t begin = pos_;
        while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
        const std::string_view tok = text_.substr(begin, pos_ - begin);
        if (auto n = parse_number(tok)) return Sexpr::number(*n, line_);
        if (tok.size() > 1 && tok.back() == ':') return Sexpr::keyword(std::string(tok.substr(0, tok.size() - 1)), line_);
        if (tok.size() > 1 && tok.front() == '?') return Sexpr::variable(std::string(tok.substr(1)), line_);
        if (tok == "?") throw ParseError("variable without a name", line_);
        return Sexpr::symbol(std::string(tok), line_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

}  // namespace

std::string to_string(const Sexpr& expr) {
    std::string out;
    write(out, expr);
    return out;
}

std::vector<Sexpr> read_sexprs(std::string_view text, int first_line) {
    return Reader(text, first_line).read_all();
}

Sexpr read_sexpr(std::string_view text, int first_line) {
    auto all = read_sexprs(text, first_line);
    if (all.size() != 1) {
        throw ParseError("expected exactly one expression, found " + std::to_string(all.size()), first_line);
    }
    return std::move(all.front());
}

const Sexpr* Fact::arg(std::string_view key) const {
    for (const auto& [k, v] : args) {
        if (k == key) return &v;
    }
    return nullptr;
}

Sexpr Fact::to_sexpr() const {
    std::vector<Sexpr> items;
    items.reserve(1 + 2 * args.size());
    items.push_back(Sexpr::symbol(predicate));
    for (const auto& [k, v] : args) {
        items.push_back(Sexpr::keyword(k));
        items.push_back(v);
    }
    return Sexpr::list(std::move(items));
}

std::string Fact::key() const {
    std::vector<const std::pair<std::string, Sexpr>*> sorted;
    for (const auto& a : args) sorted.push_back(&a);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
    std::string out = "(" + predicate;
    for (const auto* a : sorted) out += " " + a->first + ": " + to_string(a->second);
    return out + ")";
}

Fact fact_from_sexpr(const Sexpr& expr) {
    if (!expr.is_list() || expr.items().empty() || !expr.items().front().is_symbol()) {
        throw ParseError("expected (predicate key: value ...), got " + to_string(expr), expr.line());
    }
    const auto& items = expr.items();
    if (items.size() % 2 == 0) throw ParseError("dangling keyword or value in " + to_string(expr), expr.line());
    Fact fact;
    fact.predicate = items.front().text();
    std::set<std::string> seen;
    for (std::size_t i = 1; i < items.size(); i += 2) {
        if (!items[i].is_keyword()) throw ParseError("expected keyword, got " + to_string(items[i]), items[i].line());
        if (items[i + 1].is_keyword()) throw ParseError("missing value for " + items[i].text() + ":", items[i].line());
        if (!seen.insert(items[i].text()).second) {
            throw ParseError("duplicate keyword " + items[i].text() + ":", items[i].line());
        }
        fact.args.emplace_back(items[i].text(), items[i + 1]);
    }
    return fact;
}

std::string to_string(const Fact& fact) { return to_string(fact.to_sexpr()); }

}  // namespace byrne
