#include "cdlab/reductions/guard.hpp"

#include "cdlab/complexity/program_search.hpp"

namespace cdl::red {

std::string to_string(GuardEntry::Winner w) {
    switch (w) {
        case GuardEntry::Winner::machine: return "machine";
        case GuardEntry::Winner::search: return "search";
        case GuardEntry::Winner::none: return "none";
    }
    return "?";
}

OracleMachine guard(const OracleMachine& M, const Rational& alpha_prime, const ComplexityOracle& oracle,
                    GuardSchedule schedule, std::shared_ptr<GuardLog> log) {
    if (alpha_prime <= Rational(0) || alpha_prime >= Rational(1)) {
        throw std::invalid_argument("guard needs 0 < alpha' < 1");
    }
    if (schedule.machine_steps == 0 || schedule.search_steps == 0) {
        throw std::invalid_argument("guard schedule needs at least one step per side");
    }
    const std::uint64_t budget = oracle.settings().budget;
    return OracleMachine(
        "guard(" + alpha_prime.to_fraction() + "," + M.name() + ")",
        [M, alpha_prime, budget, schedule, log](MachineIO& io) {
            auto proc = M.start();
            std::optional<Bit> answer;
            std::uint64_t emitted_by_m = 0;
            bool m_halted = false;
            std::vector<Bit> prefix;  // S[0..m-1] as read by the probes

            auto cap = [&](std::uint64_t m) {
                return static_cast<std::uint64_t>(static_cast<__int128>(m) * alpha_prime.num() / alpha_prime.den());
            };

            for (std::uint64_t k = 0;; ++k) {
                GuardEntry entry;
                entry.bit = k;
                std::uint64_t next_m = k + 1;
                std::uint64_t m_steps_this_bit = 0;
                bool search_done = false;
                std::optional<Bit> out;

                while (!out) {
                    const bool machine_live = !m_halted && m_steps_this_bit < schedule.machine_budget;
                    if (!machine_live && search_done) break;
                    for (std::uint64_t s = 0; s < schedule.machine_steps && machine_live && !out; ++s) {
                        if (m_halted || m_steps_this_bit >= schedule.machine_budget) break;
                        const Action a = proc->next(answer);
                        answer.reset();
                        ++m_steps_this_bit;
                        ++entry.machine_steps;
                        if (const auto* q = std::get_if<Query>(&a)) {
                            answer = io.query(q->position);
                        } else if (const auto* e = std::get_if<Emit>(&a)) {
                            if (emitted_by_m++ == k) {
                                out = e->bit;
                                entry.winner = GuardEntry::Winner::machine;
                            }
                        } else if (std::holds_alternative<Tick>(a)) {
                            io.tick();
                        } else {
                            m_halted = true;
                        }
                    }
                    for (std::uint64_t s = 0; s < schedule.search_steps && !search_done && !out; ++s) {
                        const std::uint64_t m = next_m++;
                        while (prefix.size() < m) prefix.push_back(io.query(prefix.size()));
                        io.tick();
                        ++entry.probes;
                        entry.m = m;
                        auto r = find_short_program(BitView(prefix).first(m), cap(m), budget);
                        if (r.status == SearchStatus::found) {
                            out = Bit{0};
                            entry.winner = GuardEntry::Winner::search;
                            entry.program_length = r.length;
                        }
                        if (next_m > k + schedule.window) search_done = true;
                    }
                }
                if (log) log->entries.push_back(entry);
                if (!out) {
                    throw MachineError("not total at bit " + std::to_string(k) + ": " +
                                       (m_halted ? std::string("machine halted")
                                                 : "machine exceeded " + std::to_string(schedule.machine_budget) +
                                                       " steps") +
                                       " and no program within the length cap for m up to " +
                                       std::to_string(k + schedule.window));
                }
                io.emit(*out);
            }
        });
}

}  // namespace cdl::red
