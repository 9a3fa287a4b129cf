#pragma once

// S-expression reader and printer shared by game logs, character profiles,
// emotion rules and templates.
//
// Tokens:
//   (  )              list delimiters
//   "text"            string, with \" and \\ escapes
//   name:             keyword (stored without the colon)
//   ?name             pattern variable (stored without the '?')
//   12  -3.5  .25     number
//   anything else     symbol
// A `;` or `#` at the start of a token comments out the rest of the line.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace byrne {

class Sexpr {
public:
    enum class Kind { Symbol, Number, String, Keyword, Variable, List };

    Sexpr() : kind_(Kind::List) {}

    static Sexpr symbol(std::string name, int line = 0) { return Sexpr(Kind::Symbol, std::move(name), line); }
    static Sexpr string(std::string text, int line = 0) { return Sexpr(Kind::String, std::move(text), line); }
    static Sexpr keyword(std::string name, int line = 0) { return Sexpr(Kind::Keyword, std::move(name), line); }
    static Sexpr variable(std::string name, int line = 0) { return Sexpr(Kind::Variable, std::move(name), line); }
    static Sexpr number(double value, int line = 0);
    static Sexpr list(std::vector<Sexpr> items = {}, int line = 0);

    Kind kind() const noexcept { return kind_; }
    bool is_list() const noexcept { return kind_ == Kind::List; }
    bool is_symbol() const noexcept { return kind_ == Kind::Symbol; }
    bool is_number() const noexcept { return kind_ == Kind::Number; }
    bool is_string() const noexcept { return kind_ == Kind::String; }
    bool is_keyword() const noexcept { return kind_ == Kind::Keyword; }
    bool is_variable() const noexcept { return kind_ == Kind::Variable; }
    bool is_symbol(std::string_view name) const noexcept { return is_symbol() && text_ == name; }

    /// Symbol/string/keyword/variable text. Empty for numbers and lists.
    const std::string& text() const noexcept { return text_; }
    double number_value() const noexcept { return number_; }
    const std::vector<Sexpr>& items() const noexcept { return items_; }
    std::vector<Sexpr>& items() noexcept { return items_; }

    /// Line the expression started on in its source text, 0 if synthesized.
    int line() const noexcept { return line_; }

    /// True when no variable occurs anywhere inside.
    bool is_ground() const;

    /// Value following `key:` in a keyword-argument list, if present.
    const Sexpr* find_keyword(std::string_view key) const;

    /// Structural equality; source lines are ignored.
    friend bool operator==(const Sexpr& a, const Sexpr& b);

private:
    Sexpr(Kind kind, std::string text, int line) : kind_(kind), text_(std::move(text)), line_(line) {}

    Kind kind_;
    std::string text_;
    double number_ = 0.0;
    std::vector<Sexpr> items_;
    int line_ = 0;
};

/// Shortest text that reads back as the same double.
std::string format_number(double value);

/// Canonical single-line rendering.
std::string to_string(const Sexpr& expr);

/// Reads every top-level expression. Throws ParseError with a line number.
std::vector<Sexpr> read_sexprs(std::string_view text, int first_line = 1);

/// Reads exactly one expression.
Sexpr read_sexpr(std::string_view text, int first_line = 1);

/// A keyword-argument fact such as `(pass from: a1 to: a2)`.
struct Fact {
    std::string predicate;
    std::vector<std::pair<std::string, Sexpr>> args;

    const Sexpr* arg(std::string_view key) const;
    Sexpr to_sexpr() const;

    /// Canonical identity: predicate plus arguments sorted by keyword.
    std::string key() const;

    friend bool operator==(const Fact&, const Fact&) = default;
};

/// Throws ParseError when `expr` is not `(symbol key: value ...)` with unique keys.
Fact fact_from_sexpr(const Sexpr& expr);

std::string to_string(const Fact& fact);

}  // namespace byrne
