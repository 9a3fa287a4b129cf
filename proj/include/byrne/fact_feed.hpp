#pragma once

// Per-tick game fact logs, the relevance-scored fact board, fact selection
// and interruption.
//
// Log grammar (one item per line):
//   (tick <seconds>)
//   (fact (<predicate> key: value ...) relevance: <number>)
//   # comment
// Blank lines are ignored. `begintime:` and `endtime:` arguments, when
// present, also populate the fact's time span.

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "byrne/sexpr.hpp"

namespace byrne {

struct GameFact {
    Fact fact;
    std::optional<double> begin_time;
    std::optional<double> end_time;
    double relevance = 0.0;

    const std::string& predicate() const noexcept { return fact.predicate; }
    /// Identity on the board; relevance is not part of it.
    std::string key() const { return fact.key(); }

    friend bool operator==(const GameFact&, const GameFact&) = default;
};

/// Builds a GameFact, lifting begintime/endtime out of the arguments.
/// Throws ParseError if the fact is not ground or the times are not numbers.
GameFact make_game_fact(Fact fact, double relevance);

struct TickUpdate {
    double tick_time = 0.0;
    std::vector<GameFact> facts;

    friend bool operator==(const TickUpdate&, const TickUpdate&) = default;
};

class FactBoard {
public:
    double clock() const noexcept { return clock_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, GameFact>& entries() const noexcept { return entries_; }
    const GameFact* find(const std::string& key) const;

    /// Inserts or re-scores by identity. Does not purge; see apply_tick.
    void upsert(GameFact fact);
    void erase(const std::string& key) { entries_.erase(key); }

    friend bool operator==(const FactBoard&, const FactBoard&) = default;

private:
    friend FactBoard apply_tick(FactBoard board, const TickUpdate& update);

    std::map<std::string, GameFact> entries_;
    double clock_ = -std::numeric_limits<double>::infinity();
};

/// Throws ParseError (bad syntax), StructureError (fact before any tick) or
/// OrderingError (tick times not strictly increasing).
std::vector<TickUpdate> parse_game_log(std::string_view text);

/// Requires update.tick_time > board.clock(), else OrderingError.
FactBoard apply_tick(FactBoard board, const TickUpdate& update);

/// Highest relevance; ties go to the latest end time (absent sorts earliest),
/// then to the lexicographically smallest identity key.
std::optional<GameFact> select_fact(const FactBoard& board);

/// True iff some entry is strictly more relevant than `reported` is now.
/// A reported fact no longer on the board counts as relevance 0.
bool should_interrupt(const GameFact& reported, const FactBoard& board);

}  // namespace byrne
