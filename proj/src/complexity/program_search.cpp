#include "cdlab/complexity/program_search.hpp"

#include <algorithm>
#include <limits>

namespace cdl {

namespace {
constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
}

ProgramSearch::ProgramSearch(BitView target, std::uint64_t max_len, BitView context)
    : w_(target.begin(), target.end()),
      x_(context.begin(), context.end()),
      max_len_(max_len),
      dist_(target.size() + 1, kInf),
      done_(target.size() + 1, false),
      pred_(target.size() + 1) {
    // The empty program "0" costs one bit.
    if (max_len_ < 1) {
        status_ = SearchStatus::none;
        return;
    }
    dist_[0] = 0;
    queue_.push({0, 0});
}

std::uint64_t ProgramSearch::step() {
    if (status_ != SearchStatus::running) return 0;
    std::uint64_t work = 1;
    std::size_t p = 0;
    for (;;) {
        if (queue_.empty()) {
            finish_with(SearchStatus::none);
            steps_ += work;
            return work;
        }
        auto [d, node] = queue_.top();
        queue_.pop();
        if (!done_[node] && d == dist_[node]) {
            p = node;
            break;
        }
    }
    done_[p] = true;
    const std::size_t n = w_.size();
    if (p == n) {
        finish_with(SearchStatus::found);
        steps_ += work;
        return work;
    }

    // Cheapest single instruction for every reachable end position q > p.
    const std::size_t span = n - p;
    std::vector<Edge> best(span + 1);
    auto offer = [&](std::size_t len, std::uint64_t cost, auto make) {
        if (cost < best[len].cost || best[len].cost == 0) {
            best[len].cost = cost;
            best[len].ins = make();
        }
    };
    BitView rest(w_.data() + p, span);
    for (std::size_t len = 1; len <= span; ++len) {
        offer(len, toy::literal_cost(len), [&] { return toy::Instruction::make_literal(rest.first(len)); });
    }
    work += span;

    std::size_t run = 1;
    while (run < span && rest[run] == rest[0]) ++run;
    work += run;
    for (std::size_t len = 1; len <= run; ++len) {
        offer(len, toy::run_cost(len), [&] { return toy::Instruction::make_run(rest[0], len); });
    }

    // Smallest period P reaching each length; cost grows with P so the first
    // period to reach a length is the cheapest repeat for it.
    std::size_t reached = 0;
    for (std::size_t P = 1; P <= span && reached < span; ++P) {
        std::size_t ext = P;
        while (ext < span && rest[ext] == rest[ext - P]) ++ext;
        work += ext - P + 1;
        for (std::size_t len = std::max(reached + 1, P); len <= ext; ++len) {
            offer(len, toy::repeat_cost(P, len),
                  [&] { return toy::Instruction::make_repeat(rest.first(P), len); });
        }
        reached = std::max(reached, ext);
    }

    // Earliest copy offset for each length.
    std::size_t covered = 0;
    for (std::size_t o = 0; o < x_.size() && covered < span; ++o) {
        std::size_t l = 0;
        while (l < span && o + l < x_.size() && x_[o + l] == rest[l]) ++l;
        work += l + 1;
        for (std::size_t len = covered + 1; len <= l; ++len) {
            offer(len, toy::copy_cost(o, len), [&] { return toy::Instruction::make_copy(o, len); });
        }
        covered = std::max(covered, l);
    }

    for (std::size_t len = 1; len <= span; ++len) {
        const std::uint64_t nd = dist_[p] + best[len].cost;
        const std::size_t q = p + len;
        ++work;
        if (nd + 1 > max_len_ || nd >= dist_[q] || done_[q]) continue;
        dist_[q] = nd;
        pred_[q] = Pred{p, std::move(best[len].ins)};
        queue_.push({nd, q});
    }
    steps_ += work;
    return work;
}

SearchResult ProgramSearch::run(std::uint64_t budget) {
    while (status_ == SearchStatus::running) {
        if (steps_ >= budget) {
            status_ = SearchStatus::budget_exhausted;
            break;
        }
        step();
    }
    return result();
}

SearchResult ProgramSearch::result() const {
    SearchResult r;
    r.status = status_;
    r.steps = steps_;
    if (status_ == SearchStatus::found) {
        toy::Program prog;
        for (std::size_t q = w_.size(); q != 0;) {
            const auto& pr = *pred_[q];
            prog.instructions.push_back(pr.ins);
            q = pr.from;
        }
        std::reverse(prog.instructions.begin(), prog.instructions.end());
        r.length = toy::program_length(prog);
        r.program = std::move(prog);
    }
    return r;
}

SearchResult find_short_program(BitView w, std::uint64_t max_len, std::uint64_t budget, BitView context) {
    ProgramSearch search(w, max_len, context);
    return search.run(budget);
}

}  // namespace cdl
