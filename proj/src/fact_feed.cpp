#include "byrne/fact_feed.hpp"

#include <cmath>
#include <limits>

#include "byrne/error.hpp"

namespace byrne {

namespace {

constexpr double kMinRelevance = 1.0;

std::optional<double> time_arg(const Fact& fact, std::string_view key) {
    const Sexpr* v = fact.arg(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) throw ParseError(std::string(key) + ": must be a number in " + to_string(fact), v->line());
    return v->number_value();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// True if `a` should be reported in preference to `b`.
bool outranks(const GameFact& a, const std::string& a_key, const GameFact& b, const std::string& b_key) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    const double ea = a.end_time.value_or(-std::numeric_limits<double>::infinity());
    const double eb = b.end_time.value_or(-std::numeric_limits<double>::infinity());
    if (ea != eb) return ea > eb;
    return a_key < b_key;
}

}  // namespace

GameFact make_game_fact(Fact fact, double relevance) {
    if (!fact.to_sexpr().is_ground()) throw ParseError("fact contains variables: " + to_string(fact), 0);
    GameFact g;
    g.begin_time = time_arg(fact, "begintime");
    g.end_time = time_arg(fact, "endtime");
    g.relevance = relevance;
    g.fact = std::move(fact);
    return g;
}

const GameFact* FactBoard::find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void FactBoard::upsert(GameFact fact) {
    auto key = fact.key();
    entries_.insert_or_assign(std::move(key), std::move(fact));
}

std::vector<TickUpdate> parse_game_log(std::string_view text) {
    std::vector<TickUpdate> ticks;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        const Sexpr expr = read_sexpr(line, line_no);
        const auto& items = expr.items();
        if (!expr.is_list() || items.empty() || !items.front().is_symbol()) {
            throw ParseError("expected (tick ...) or (fact ...)", line_no);
        }
        const std::string& head = items.front().text();
        if (head == "tick") {
            if (items.size() != 2 || !items[1].is_number()) throw ParseError("expected (tick <seconds>)", line_no);
            const double t = items[1].number_value();
            if (!ticks.empty() && t <= ticks.back().tick_time) {
                throw OrderingError("line " + std::to_string(line_no) + ": tick " + format_number(t) +
                                    " does not follow tick " + format_number(ticks.back().tick_time));
            }
            ticks.push_back(TickUpdate{t, {}});
        } else if (head == "fact") {
            if (items.size() != 4 || !items[2].is_keyword() || items[2].text() != "relevance" ||
                !items[3].is_number()) {
                throw ParseError("expected (fact <fact> relevance: <number>)", line_no);
            }
            if (ticks.empty()) throw StructureError("fact before any (tick ...) line", line_no);
            Fact fact = fact_from_sexpr(items[1]);
            try {
                ticks.back().facts.push_back(make_game_fact(std::move(fact), items[3].number_value()));
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no);
            }
        } else {
            throw ParseError("unknown log form '" + head + "'", line_no);
        }
    }
    return ticks;
}

FactBoard apply_tick(FactBoard board, const TickUpdate& update) {
    if (update.tick_time <= board.clock_) {
        throw OrderingError("tick " + format_number(update.tick_time) + " is not after board clock " +
                            format_number(board.clock_));
    }
    for (const auto& fact : update.facts) board.upsert(fact);
    std::erase_if(board.entries_, [](const auto& kv) { return kv.second.relevance < kMinRelevance; });
    board.clock_ = update.tick_time;
    return board;
}

std::optional<GameFact> select_fact(const FactBoard& board) {
    const GameFact* best = nullptr;
    const std::string* best_key = nullptr;
    for (const auto& [key, fact] : board.entries()) {
        if (best == nullptr || outranks(fact, key, *best, *best_key)) {
            best = &fact;
            best_key = &key;
        }
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

bool should_interrupt(const GameFact& reported, const FactBoard& board) {
    const GameFact* current = board.find(reported.key());
    const double threshold = current ? current->relevance : 0.0;
    for (const auto& [key, fact] : board.entries()) {
        if (fact.relevance > threshold) return true;
    }
    return false;
}

}  // namespace byrne
