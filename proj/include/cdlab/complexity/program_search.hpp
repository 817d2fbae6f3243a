#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "cdlab/complexity/toy_machine.hpp"

namespace cdl {

enum class SearchStatus { running, found, none, budget_exhausted };

struct SearchResult {
    SearchStatus status = SearchStatus::none;
    std::optional<toy::Program> program;  // set iff found
    std::uint64_t length = 0;             // encoded program length when found
    std::uint64_t steps = 0;              // work units spent
};

// Shortest-program search over the toy machine. Every program is a path of
// instructions through output positions 0..|w|, so a uniform-cost search on
// positions (edge = cheapest instruction emitting w[p..q)) is exhaustive and
// returns a minimum-length program. Work is metered in elementary units
// (bit comparisons and relaxations) and the search can be advanced one node
// expansion at a time, which lets callers interleave it with other work.
class ProgramSearch {
public:
    ProgramSearch(BitView target, std::uint64_t max_len, BitView context = {});

    // Expands one node; returns the work units it consumed.
    std::uint64_t step();
    SearchStatus status() const { return status_; }
    std::uint64_t steps() const { return steps_; }
    // Runs until finished or until `budget` total units have been spent.
    SearchResult run(std::uint64_t budget);
    SearchResult result() const;

private:
    struct Edge {
        std::uint64_t cost = 0;
        toy::Instruction ins;
    };
    struct Pred {
        std::size_t from = 0;
        toy::Instruction ins;
    };
    void finish_with(SearchStatus s) { status_ = s; }

    std::vector<Bit> w_;
    std::vector<Bit> x_;
    std::uint64_t max_len_;
    std::vector<std::uint64_t> dist_;
    std::vector<bool> done_;
    std::vector<std::optional<Pred>> pred_;
    using Entry = std::pair<std::uint64_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    SearchStatus status_ = SearchStatus::running;
    std::uint64_t steps_ = 0;
};

// Convenience wrapper: a program of length <= max_len producing w, or a
// definitive none, or budget exhaustion.
SearchResult find_short_program(BitView w, std::uint64_t max_len, std::uint64_t budget,
                                BitView context = {});

}  // namespace cdl
