// One PASS/FAIL line per acceptance criterion, with the measured numbers.
// Exit status is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "cdlab/cli/experiment.hpp"
#include "cdlab/codec/codec.hpp"
#include "cdlab/complexity/program_search.hpp"
#include "cdlab/dimension/profile.hpp"
#include "cdlab/extractor/extractor.hpp"
#include "cdlab/generators/generators.hpp"
#include "cdlab/reductions/compose.hpp"
#include "cdlab/reductions/guard.hpp"
#include "cdlab/reductions/machines.hpp"
#include "cdlab/reductions/verify.hpp"
#include "cdlab/seqcore/blocks.hpp"

using namespace cdl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " C" << id << " " << title << ": " << detail << std::endl;
}

// Runs one criterion; an escaping exception is a failure, not a crash.
void criterion(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(id, title, ok, detail);
    } catch (const std::exception& e) {
        report(id, title, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(double x, int prec = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << x;
    return s.str();
}

gen::GeneratorSpec spec(gen::Kind kind, Rational a = Rational(1, 2), Rational b = Rational(1)) {
    gen::GeneratorSpec s;
    s.kind = kind;
    s.alpha = a;
    s.beta = kind == gen::Kind::oscillate ? b : a;
    s.seed = 7;
    return s;
}

std::uint64_t ceil_log2(std::uint64_t x) {
    std::uint64_t k = 0;
    while ((std::uint64_t{1} << k) < x) ++k;
    return k;
}

struct Encoding {
    std::string name;
    BitSequence S;
    codec::Encoded enc;
    codec::Decoded dec;
    std::uint64_t N = 0;
};

}  // namespace

int main() {
    const ComplexityOracle oracle;
    const std::uint64_t N = 100'000;
    const fs::path configs = std::getenv("CDLAB_CONFIGS") ? fs::path(std::getenv("CDLAB_CONFIGS")) : "configs";

    // Shared by 1, 2, 3 and 10.
    std::vector<Encoding> encodings;
    double codec_seconds = 0;
    criterion(1, "codec round trip to 10^5 bits, all generators", [&] {
        const auto t0 = Clock::now();
        const std::uint64_t K = blocks::blocks_to_cover(N);
        const std::uint64_t T = blocks::triangular(K);
        bool ok = true;
        std::ostringstream d;
        for (auto [name, s] : {std::pair{"zeros", spec(gen::Kind::zeros)},
                               {"prng", spec(gen::Kind::prng)},
                               {"dilute", spec(gen::Kind::dilute)},
                               {"oscillate", spec(gen::Kind::oscillate, Rational(1, 4), Rational(3, 4))}}) {
            Encoding e;
            e.name = name;
            e.S = gen::generate(s, T);
            e.N = T;
            e.enc = codec::encode(PrefixOracle::of(e.S), N, oracle);
            e.dec = codec::decode(PrefixOracle::of(e.enc.stream), T, oracle);
            const bool same = e.dec.prefix == e.S;
            ok = ok && same;
            d << name << (same ? " ok" : " MISMATCH") << " |R|=" << e.enc.stream.size() << "; ";
            encodings.push_back(std::move(e));
        }
        codec_seconds = since(t0);
        d << T << " bits each, " << fmt(codec_seconds, 1) << " s (limit 60 s)";
        return std::pair{ok && codec_seconds < 60, d.str()};
    });

    criterion(2, "record length law", [&] {
        std::uint64_t records = 0, bad = 0, worst_slack = ~std::uint64_t{0};
        for (const auto& e : encodings) {
            for (std::uint64_t i = 1; i <= e.enc.record_lengths.size(); ++i) {
                const std::uint64_t bound = i + 2 * ceil_log2(i + 1) + codec::kHeaderBits;
                const std::uint64_t len = e.enc.record_lengths[i - 1];
                ++records;
                if (len > bound) ++bad;
                else worst_slack = std::min(worst_slack, bound - len);
            }
        }
        return std::pair{bad == 0 && records > 0, std::to_string(records) + " records, " + std::to_string(bad) +
                                                       " over i + 2ceil(log2(i+1)) + " +
                                                       std::to_string(codec::kHeaderBits) + ", min slack " +
                                                       std::to_string(worst_slack)};
    });

    criterion(3, "boundary usage equals |r_1..r_k|", [&] {
        std::uint64_t checked = 0, bad = 0, kmax = 0;
        for (const auto& e : encodings) {
            std::uint64_t sum = 0;
            for (std::uint64_t k = 1; k <= e.enc.record_lengths.size(); ++k) {
                sum += e.enc.record_lengths[k - 1];
                ++checked;
                kmax = std::max(kmax, k);
                if (e.dec.trace.usage[blocks::triangular(k)] != sum || e.dec.trace.boundary_usage[k - 1] != sum) ++bad;
            }
        }
        return std::pair{bad == 0 && kmax >= 300, std::to_string(checked) + " boundaries, k up to " +
                                                      std::to_string(kmax) + ", " + std::to_string(bad) + " mismatches"};
    });

    criterion(4, "dimension estimator sanity at N = 10^5", [&] {
        const auto grid = dim::geometric_grid(dim::kDefaultGridStart, dim::kDefaultGridRatio, N);
        const auto tail = dim::default_tail_start(N);
        auto prof = [&](const gen::GeneratorSpec& s, std::vector<std::uint64_t> pts) {
            const auto p = dim::profile(PrefixOracle::of(gen::generate(s, N)), std::move(pts), oracle, tail);
            return std::pair{dim::dim_hat_H(p).to_double(), dim::dim_hat_P(p).to_double()};
        };
        const auto [zH, zP] = prof(spec(gen::Kind::zeros), grid);
        const auto [rH, rP] = prof(spec(gen::Kind::prng), grid);
        const auto [dH, dP] = prof(spec(gen::Kind::dilute), grid);
        const auto osc = spec(gen::Kind::oscillate, Rational(1, 4), Rational(3, 4));
        auto pts = grid;
        for (auto e : gen::macro_boundaries(osc.schedule, N)) pts.push_back(e);
        const auto [oH, oP] = prof(osc, pts);
        const bool ok = zP <= 0.05 && rH >= 0.9 && std::abs(dH - 0.5) <= 0.1 && std::abs(dP - 0.5) <= 0.1 &&
                        std::abs(oH - 0.25) <= 0.12 && std::abs(oP - 0.75) <= 0.12;
        return std::pair{ok, "zeros P " + fmt(zP) + " (<= 0.05); prng H " + fmt(rH) + " (>= 0.9); dilute H/P " +
                                 fmt(dH) + "/" + fmt(dP) + " (0.5 +- 0.1); oscillate(1/4,3/4) tail min/max " +
                                 fmt(oH) + "/" + fmt(oP) + " (0.25/0.75 +- 0.12, grid plus macro-block ends)"};
    });

    criterion(5, "composition law and double-encode ratio", [&] {
        const auto S = PrefixOracle::of(gen::prng(7, 50'000));
        const std::vector<std::string> names{"identity", "complement", "double", "xor-pair", "first-bit"};
        std::uint64_t pairs = 0, held = 0;
        std::string broken;
        for (const auto& a : names) {
            for (const auto& b : names) {
                const auto c = red::check_composition(red::make_machine(a, oracle), red::make_machine(b, oracle), S,
                                                      10'000);
                ++pairs;
                const bool ok = c.law_holds && c.composite.trace.produced() == 10'000;
                held += ok;
                if (!ok) broken += " " + a + "->" + b;
            }
        }
        const auto t0 = Clock::now();
        const auto d = red::double_encode(PrefixOracle::of(gen::generate(spec(gen::Kind::dilute), 2 * N)), N, oracle);
        const double t = since(t0);
        const Rational bound = d.rho_outer * d.rho_inner + Rational(1, 20);
        const bool dbl = d.output_ok && d.check.law_holds && d.rho_composite <= bound;
        return std::pair{held == pairs && dbl,
                         std::to_string(held) + "/" + std::to_string(pairs) + " pairs exact for n <= 10^4" + broken +
                             "; double encode n=" + std::to_string(d.n) + " law " + (d.check.law_holds ? "ok" : "broken") +
                             ", rho+ composite " + fmt(d.rho_composite.to_double()) + " <= " +
                             fmt(d.rho_outer.to_double()) + " * " + fmt(d.rho_inner.to_double()) + " + 0.05 = " +
                             fmt(bound.to_double()) + " (" + fmt(t, 1) + " s)"};
    });

    // Extraction runs for 6, 7 and the improvement-direction invariant.
    struct Run {
        std::string name;
        std::optional<ext::ExtractResult> result;
        BitSequence S;
        std::string error;
        double seconds = 0;
    };
    std::vector<Run> runs;
    for (const char* file : {"regular-half.json", "oscillate-03-06.json", "zeros.json"}) {
        Run r;
        r.name = file;
        try {
            const auto c = cli::load_config(configs / file);
            r.name = c.name;
            const ComplexityOracle o(c.oracle);
            r.S = gen::generate(c.generator, c.horizon());
            const auto t0 = Clock::now();
            try {
                r.result = ext::extract(PrefixOracle::of(r.S), c.extract, o);
            } catch (const ext::ExtractionError& e) {
                r.error = e.what();
            }
            r.seconds = since(t0);
        } catch (const std::exception& e) {
            r.error = std::string("config: ") + e.what();
        }
        runs.push_back(std::move(r));
    }
    auto find_run = [&](const std::string& name) -> const Run* {
        for (const auto& r : runs) {
            if (r.name == name) return &r;
        }
        return nullptr;
    };

    criterion(6, "extractor conditions re-verified on shipped configs", [&] {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            if (!r.result) {
                d << r.name << ": not extracted (" << r.error << "); ";
                if (r.name != "zeros") ok = false;
                continue;
            }
            const auto& rep = r.result->report;
            const auto& p = rep.params;
            const auto& R = r.result->R;
            const std::uint64_t Ncov = rep.covered;
            const auto dec = codec::decode(PrefixOracle::of(R), Ncov, ComplexityOracle{});
            bool a = dec.trace.usage[Ncov] == R.size();
            for (std::uint64_t k = 0; k < Ncov && a; ++k) a = dec.prefix[k] == r.S[k];
            std::uint64_t b_bad = 0, c_bad = 0;
            for (const auto& st : rep.stages) {
                if (Rational(static_cast<std::int64_t>(dec.trace.usage[st.N]), static_cast<std::int64_t>(st.N)) > p.d) {
                    ++b_bad;
                }
            }
            for (std::uint64_t m = std::max<std::uint64_t>(p.n0, 1); m <= Ncov; ++m) {
                if (Rational(static_cast<std::int64_t>(dec.trace.usage[m]), static_cast<std::int64_t>(m)) > p.D) ++c_bad;
            }
            ok = ok && a && b_bad == 0 && c_bad == 0;
            d << r.name << ": (a) " << (a ? "ok" : "FAILED") << " over " << Ncov << " bits, (b) " << b_bad << "/"
              << rep.stages.size() << " boundaries over d=" << p.d.to_decimal(4) << ", (c) " << c_bad
              << " m in [" << p.n0 << ", " << Ncov << "] over D=" << p.D.to_decimal(4) << "; ";
        }
        return std::pair{ok, d.str() + "zeros is expected to stop at the precondition"};
    });

    criterion(7, "extraction improvement", [&] {
        const Run* osc = find_run("oscillate-03-06");
        const Run* reg = find_run("regular-half");
        if (!osc || !osc->result || !reg || !reg->result) return std::pair{false, std::string("a run did not finish")};
        const auto& o = osc->result->report;
        const auto& g = reg->result->report;
        const double oH = o.output_H.to_double(), oP = o.output_P.to_double(), gH = g.output_H.to_double();
        const std::uint64_t len = osc->result->R.size();
        bool ok = oH >= 0.35 && oP >= 0.75 && len >= 20'000 && gH >= 0.6 && osc->seconds < 600 &&
                   reg->seconds < 600;
        // Direction on every run: H(R') >= H(S) and P(R') >= P(S) - 0.05.
        std::ostringstream dir;
        for (const auto& r : runs) {
            if (!r.result) continue;
            const auto& rep = r.result->report;
            ok = ok && rep.output_H >= rep.source_H && rep.output_P >= rep.source_P - Rational(1, 20);
            dir << "; " << r.name << " H " << fmt(rep.source_H.to_double()) << " -> " << fmt(rep.output_H.to_double())
                << ", P " << fmt(rep.source_P.to_double()) << " -> " << fmt(rep.output_P.to_double());
        }
        return std::pair{ok, "oscillate(0.3,0.6) eps 0.15: H(R') " + fmt(oH) + " (>= 0.35), P(R') " + fmt(oP) +
                                 " (>= 0.75), |R'| " + std::to_string(len) + " (>= 20000), " + fmt(osc->seconds, 1) +
                                 " s; dilute(1/2): H(R') " + fmt(gH) + " (>= 0.6), " + fmt(reg->seconds, 1) +
                                 " s (limit 600 s each)" + dir.str() +
                                 " (direction: H(R') >= H(S), P(R') >= P(S) - 0.05)"};
    });

    criterion(8, "structured vs exhaustive search on 3-block instances (cap 16)", [&] {
        const auto t0 = Clock::now();
        std::uint64_t total = 0, agree = 0, accepted = 0;
        std::string dis;
        for (unsigned v : {0u, 5u, 18u, 27u, 42u, 51u, 60u, 63u}) {
            BitSequence s;
            for (int t = 0; t < 6; ++t) s.push_back(static_cast<Bit>((v >> (5 - t)) & 1u));
            const auto S = PrefixOracle::of(s);
            for (auto [d, D, n0] : {std::tuple{Rational(1), Rational(3), std::uint64_t{1}},
                                    {Rational(3, 2), Rational(3), std::uint64_t{3}},
                                    {Rational(2), Rational(2), std::uint64_t{1}},
                                    {Rational(3), Rational(5), std::uint64_t{1}}}) {
                ext::ExtractorParams p;
                p.d = d;
                p.D = D;
                p.n0 = n0;
                ext::Extractor ex(S, p, oracle);
                const bool structured = ex.next_extension().found;
                const bool exhaustive = ext::exhaustive_extension(ext::ExtractorState{}, S, p, oracle, 16).found.has_value();
                ++total;
                accepted += structured;
                if (structured == exhaustive) ++agree;
                else dis += " " + s.to_string() + "/d=" + d.to_fraction();
            }
        }
        return std::pair{agree == total, std::to_string(agree) + "/" + std::to_string(total) + " instances agree (" +
                                             std::to_string(accepted) + " accepted)" + dis + ", " +
                                             fmt(since(t0), 1) + " s"};
    });

    criterion(9, "guard combinator", [&] {
        // Compressible: complement on zeros.
        const std::uint64_t n = 300;
        const auto z = gen::zeros(4 * n);
        red::GuardSchedule sch;
        sch.window = 64;
        auto log = std::make_shared<red::GuardLog>();
        const auto r = red::run(red::guard(red::complement(), Rational(1, 2), oracle, sch, log), PrefixOracle::of(z), n);
        std::map<std::uint64_t, bool> memo;
        auto found = [&](std::uint64_t m) {
            auto it = memo.find(m);
            if (it != memo.end()) return it->second;
            const bool f = find_short_program(z.prefix(m), m / 2, oracle.settings().budget).status == SearchStatus::found;
            return memo[m] = f;
        };
        std::optional<std::uint64_t> first_m;
        for (std::uint64_t m = 1; m <= 4 * n && !first_m; ++m) {
            if (found(m)) first_m = m;
        }
        bool ok = r.trace.status == red::RunStatus::complete && first_m.has_value();
        std::optional<std::uint64_t> first_zero;
        for (std::uint64_t k = 0; k < r.trace.produced(); ++k) {
            if (r.output[k] == 0 && !first_zero) first_zero = k;
            if (first_zero && r.output[k] != 0) ok = false;
        }
        // The first zero is the first bit whose probe window reaches first_m.
        std::optional<std::uint64_t> first_win;
        for (const auto& e : log->entries) {
            if (e.winner == red::GuardEntry::Winner::search) {
                if (!first_win) first_win = e.bit;
                ok = ok && found(e.m);
                for (std::uint64_t m = e.bit + 1; m < e.m; ++m) ok = ok && !found(m);
            } else {
                for (std::uint64_t m = e.bit + 1; m <= e.bit + e.probes; ++m) ok = ok && !found(m);
            }
        }
        ok = ok && first_zero && first_win && *first_zero == *first_win && log->entries[*first_win].m == *first_m;

        // Random input, infeasible cap: agreement past the logged cutoff.
        const std::uint64_t n2 = 1000;
        const auto pr = gen::prng(17, 2 * n2);
        auto log2 = std::make_shared<red::GuardLog>();
        const auto g = red::run(red::guard(red::identity(), Rational(1, 4), oracle, {}, log2), PrefixOracle::of(pr), n2);
        std::uint64_t cutoff = 0;
        for (const auto& e : log2->entries) {
            if (e.winner == red::GuardEntry::Winner::search) cutoff = e.bit + 1;
        }
        std::uint64_t disagree = 0;
        for (std::uint64_t k = cutoff; k < g.trace.produced(); ++k) disagree += g.output[k] != pr[k];
        ok = ok && g.trace.status == red::RunStatus::complete && disagree == 0;
        std::ostringstream d;
        d << "zeros: first short program at m=" << (first_m ? std::to_string(*first_m) : "none")
          << ", guarded output 0 from bit " << (first_zero ? std::to_string(*first_zero) : "none") << " to " << n - 1
          << ", log matches independent searches; prng alpha'=1/4: cutoff " << cutoff << ", " << disagree
          << " disagreements over bits " << cutoff << ".." << n2 - 1;
        return std::pair{ok, d.str()};
    });

    criterion(10, "codec-decode class verification", [&] {
        bool ok = !encodings.empty();
        std::ostringstream d;
        for (const auto& e : encodings) {
            if (e.name != "dilute" && e.name != "prng") continue;
            const auto r = red::run(red::codec_decode(oracle), PrefixOracle::of(e.enc.stream), N);
            const auto w = red::verify_class(r.trace, red::codec_decode(oracle).declared());
            ok = ok && r.trace.status == red::RunStatus::complete && w.pass && w.checked == N;
            d << e.name << ": wtt q(n) " << (w.pass ? "holds" : "FAILS") << " for n <= " << w.checked << ", bT(c) fails";
            std::uint64_t failing = 0;
            for (std::uint64_t c = 0; c <= 16; ++c) {
                const auto b = red::verify_class(r.trace, red::bounded_tt(c));
                if (!b.pass && !b.violations.empty()) ++failing;
                if (c == 16 && !b.violations.empty()) {
                    d << " (c=16 first at bit " << b.violations.front().n << " with " << b.violations.front().value
                      << " queries)";
                }
            }
            d << " for " << failing << "/17 values of c; ";
            ok = ok && failing == 17;
        }
        return std::pair{ok, d.str()};
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
