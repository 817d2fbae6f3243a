#include "cdlab/cli/commands.hpp"

#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdlab/cli/artifacts.hpp"
#include "cdlab/cli/experiment.hpp"
#include "cdlab/codec/codec.hpp"
#include "cdlab/dimension/profile.hpp"
#include "cdlab/extractor/extractor.hpp"
#include "cdlab/generators/generators.hpp"
#include "cdlab/reductions/compose.hpp"
#include "cdlab/reductions/guard.hpp"
#include "cdlab/reductions/machines.hpp"
#include "cdlab/reductions/verify.hpp"
#include "cdlab/seqcore/blocks.hpp"
#include "cdlab/seqcore/seq_file.hpp"

namespace cdl::cli {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return hex64(fnv1a64(bytes));
}

Rational rational_flag(const std::string& text, const char* flag) {
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

struct OracleFlags {
    std::string kind = "mixture";
    OracleSettings s;

    void add(CLI::App* app) {
        app->add_option("--oracle", kind, "complexity oracle: exact, mixture or lz78")->capture_default_str();
        app->add_option("--budget", s.budget, "work units per exact program search")->capture_default_str();
        app->add_option("--max-program-len", s.max_program_len, "exact search length cap (bits)")
            ->capture_default_str();
        app->add_option("--proxy-search-limit", s.proxy_search_limit,
                        "proxies try an exact search up to this input length")
            ->capture_default_str();
    }
    OracleSettings settings() const {
        OracleSettings out = s;
        const auto k = parse_oracle_kind(kind);
        if (!k) throw UsageError("--oracle: unknown kind '" + kind + "'");
        out.kind = *k;
        return out;
    }
};

struct GenFlags {
    std::string kind = "prng";
    std::string alpha = "1/2", beta;
    std::uint64_t seed = 1;
    std::uint64_t base = 4, first_length = 1;

    void add(CLI::App* app) {
        app->add_option("--kind", kind, "zeros, prng, dilute or oscillate")->capture_default_str();
        app->add_option("--alpha", alpha, "rate (dilute) or low rate (oscillate)")->capture_default_str();
        app->add_option("--beta", beta, "high rate (oscillate); default 1");
        app->add_option("--seed", seed, "PRNG seed of the source bits")->capture_default_str();
        app->add_option("--base", base, "oscillation macro-block growth factor")->capture_default_str();
        app->add_option("--first-length", first_length, "length of macro-block 0")->capture_default_str();
    }
    gen::GeneratorSpec spec() const {
        gen::GeneratorSpec g;
        const auto k = gen::parse_kind(kind);
        if (!k) throw UsageError("--kind: unknown generator '" + kind + "'");
        g.kind = *k;
        g.alpha = rational_flag(alpha, "--alpha");
        g.beta = beta.empty() ? (g.kind == gen::Kind::oscillate ? Rational(1) : g.alpha) : rational_flag(beta, "--beta");
        g.seed = seed;
        g.schedule = {base, first_length};
        try {
            gen::validate(g);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return g;
    }
};

// Input sequence: --in FILE, or generated from GenFlags.
struct InputFlags {
    std::string in;
    GenFlags gen;

    void add(CLI::App* app) {
        app->add_option("--in", in, "input .seq file (otherwise generated from the generator flags)")
            ->check(CLI::ExistingFile);
        gen.add(app);
    }
    BitSequence load(std::uint64_t n) const {
        if (!in.empty()) return seqfile::read(in);
        return gen::generate(gen.spec(), n);
    }
    json describe() const {
        if (!in.empty()) return {{"in", in}, {"in_fnv1a64", file_hash(in)}};
        return {{"generator", to_json(gen.spec())}};
    }
};

std::string trace_csv(const std::vector<std::uint64_t>& usage) {
    std::ostringstream out;
    out << "n,usage\n";
    for (std::size_t n = 1; n < usage.size(); ++n) out << n << ',' << usage[n] << '\n';
    return out.str();
}

int cmd_gen(const GenFlags& g, std::uint64_t n, const std::string& out_path, std::ostream& out) {
    const auto spec = g.spec();
    json cfg = {{"generator", to_json(spec)}, {"n", n}};
    const auto seq = gen::generate(spec, n);
    write_seq_artifact(out_path, seq, {"gen", cfg});
    out << "wrote " << out_path << " (" << seq.size() << " bits)\n";
    return kOk;
}

struct ProfileFlags {
    InputFlags input;
    OracleFlags oracle;
    std::uint64_t n = 100'000;
    std::uint64_t grid_start = dim::kDefaultGridStart;
    double grid_ratio = dim::kDefaultGridRatio;
    std::uint64_t tail_start = 0;
    std::string kernel = "auto";
    std::string out_path;
};

int cmd_profile(const ProfileFlags& f, std::ostream& out) {
    const auto seq = f.input.load(f.n);
    const std::uint64_t N = f.input.in.empty() ? f.n : std::min<std::uint64_t>(f.n, seq.size());
    if (N == 0) throw UsageError("nothing to profile: the sequence is empty");
    dim::Kernel kernel;
    if (f.kernel == "auto") kernel = dim::Kernel::automatic;
    else if (f.kernel == "serial") kernel = dim::Kernel::serial;
    else if (f.kernel == "parallel") kernel = dim::Kernel::parallel;
    else if (f.kernel == "streaming") kernel = dim::Kernel::streaming;
    else throw UsageError("--kernel must be auto, serial, parallel or streaming");
    const std::uint64_t tail = std::min(f.tail_start ? f.tail_start : dim::default_tail_start(N), N);
    const ComplexityOracle oracle(f.oracle.settings());
    const auto p = dim::profile(PrefixOracle::of(seq), dim::geometric_grid(f.grid_start, f.grid_ratio, N), oracle,
                                tail, kernel);
    json cfg = f.input.describe();
    cfg["oracle"] = to_json(oracle.settings());
    cfg["grid"] = {{"start", f.grid_start}, {"ratio", f.grid_ratio}, {"N", N}, {"tail_start", tail}};
    cfg["kernel"] = f.kernel;
    write_artifact(f.out_path, profile_csv(p, "c"), {"profile", cfg});
    out << "dim_hat_H " << dim::dim_hat_H(p).to_decimal(6) << "\ndim_hat_P " << dim::dim_hat_P(p).to_decimal(6)
        << (p.confirmed ? "" : "\n(some samples are upper bounds only)") << "\nwrote " << f.out_path << '\n';
    return kOk;
}

struct CodecFlags {
    InputFlags input;
    OracleFlags oracle;
    std::uint64_t n = 0;
    std::string out_path, trace_path;
};

int cmd_encode(const CodecFlags& f, std::ostream& out) {
    const std::uint64_t want = f.n ? blocks::triangular(blocks::blocks_to_cover(f.n)) : 100'000;
    const auto seq = f.input.load(f.n ? want : blocks::triangular(blocks::blocks_to_cover(want)));
    std::uint64_t n = f.n;
    if (n == 0) {
        const auto c = blocks::block_containing(seq.size());
        n = blocks::triangular(c.complete);
    }
    if (blocks::triangular(blocks::blocks_to_cover(n)) > seq.size()) {
        throw UsageError("--n " + std::to_string(n) + " needs " +
                         std::to_string(blocks::triangular(blocks::blocks_to_cover(n))) +
                         " input bits (whole blocks); the input has " + std::to_string(seq.size()));
    }
    const ComplexityOracle oracle(f.oracle.settings());
    const auto enc = codec::encode(PrefixOracle::of(seq), n, oracle);
    json cfg = f.input.describe();
    cfg["oracle"] = to_json(oracle.settings());
    cfg["n"] = n;
    write_seq_artifact(f.out_path, enc.stream, {"encode", cfg});
    if (!f.trace_path.empty()) {
        const auto dec = codec::decode(PrefixOracle::of(enc.stream), n, oracle);
        write_artifact(f.trace_path, trace_csv(dec.trace.usage), {"encode", cfg});
    }
    std::uint64_t conditional = 0;
    for (auto m : enc.modes) conditional += m == codec::Mode::conditional;
    out << "blocks " << enc.modes.size() << " (" << conditional << " conditional)\nsource bits "
        << blocks::triangular(enc.modes.size()) << "\nstream bits " << enc.stream.size() << "\nwrote " << f.out_path
        << '\n';
    return kOk;
}

int cmd_decode(const CodecFlags& f, std::ostream& out) {
    if (f.input.in.empty()) throw UsageError("decode needs --in");
    const auto stream = seqfile::read(f.input.in);
    const ComplexityOracle oracle(f.oracle.settings());
    std::uint64_t n = f.n;
    if (n == 0) {
        // Every whole record in the stream.
        codec::Decoder dec(oracle);
        std::uint64_t pos = 0;
        const BitSource in = [&]() -> std::optional<Bit> {
            if (pos >= stream.size()) return std::nullopt;
            return stream[pos++];
        };
        while (pos < stream.size()) {
            const std::uint64_t i = dec.blocks_done() + 1;
            if (!dec.next_block(in)) {
                throw codec::DecodeError(codec::DecodeError::Kind::malformed, i,
                                         "record " + std::to_string(i) + " is malformed or truncated at stream bit " +
                                             std::to_string(pos));
            }
        }
        n = blocks::triangular(dec.blocks_done());
    }
    const auto dec = codec::decode(PrefixOracle::of(stream), n, oracle);
    json cfg = {{"in", f.input.in}, {"in_fnv1a64", file_hash(f.input.in)}, {"oracle", to_json(oracle.settings())}, {"n", n}};
    write_seq_artifact(f.out_path, dec.prefix, {"decode", cfg});
    if (!f.trace_path.empty()) write_artifact(f.trace_path, trace_csv(dec.trace.usage), {"decode", cfg});
    out << "decoded " << dec.prefix.size() << " bits using " << (dec.trace.usage.empty() ? 0 : dec.trace.usage.back())
        << " stream bits\nwrote " << f.out_path << '\n';
    return kOk;
}

struct ExtractFlags {
    InputFlags input;
    OracleFlags oracle;
    std::string config;
    std::string epsilon = "3/20";
    std::uint64_t target_n = 20'000, profile_n = 0, horizon = 0;
    std::string d, D, param_source = "codec_ratio";
    std::uint64_t n0 = 0;
    std::uint64_t search_budget = 200'000, exhaustive_cap = 0;
    unsigned full_lookahead = 8;
    std::string out_dir = "extract_out";
    CLI::App* app = nullptr;
};

int cmd_extract(const ExtractFlags& f, std::ostream& out) {
    ExperimentConfig c;
    BitSequence seq;
    if (!f.config.empty()) {
        c = load_config(f.config);
    } else {
        c.name = "extract";
        c.oracle = f.oracle.settings();
    }
    auto given = [&](const char* flag) { return f.app->count(flag) > 0; };
    auto& e = c.extract;
    if (f.config.empty() || given("--epsilon")) e.epsilon = rational_flag(f.epsilon, "--epsilon");
    if (f.config.empty() || given("--target-n")) e.target_N = f.target_n;
    if (f.config.empty() || given("--profile-n")) e.profile_N = f.profile_n;
    if (given("--horizon")) c.source_horizon = f.horizon;
    if (given("--d")) e.d = rational_flag(f.d, "--d");
    if (given("--D")) e.D = rational_flag(f.D, "--D");
    if (given("--n0")) e.n0 = f.n0;
    if (f.config.empty() || given("--search-budget")) e.search_budget = f.search_budget;
    if (f.config.empty() || given("--full-lookahead")) e.full_lookahead = f.full_lookahead;
    if (f.config.empty() || given("--exhaustive-cap")) e.exhaustive_cap = f.exhaustive_cap;
    if (f.config.empty() || given("--param-source")) {
        if (f.param_source == "codec_ratio") e.source = ext::ParamSource::codec_ratio;
        else if (f.param_source == "complexity") e.source = ext::ParamSource::complexity;
        else throw UsageError("--param-source must be codec_ratio or complexity");
    }
    if (!(e.epsilon > Rational(0)) || !(e.epsilon < Rational(1))) throw UsageError("--epsilon must be in (0, 1)");
    if (e.target_N == 0) throw UsageError("--target-n must be positive");

    json cfg;
    if (!f.input.in.empty()) {
        seq = seqfile::read(f.input.in);
        cfg = to_json(c);
        cfg.erase("generator");
        cfg["in"] = f.input.in;
        cfg["in_fnv1a64"] = file_hash(f.input.in);
    } else {
        if (f.config.empty()) c.generator = f.input.gen.spec();
        seq = gen::generate(c.generator, c.horizon());
        cfg = to_json(c);
    }
    const Provenance prov{"extract", cfg};
    const std::filesystem::path dir = f.out_dir;
    const ComplexityOracle oracle(c.oracle);
    try {
        const auto res = ext::extract(PrefixOracle::of(seq), e, oracle);
        const auto& rep = res.report;
        write_seq_artifact(dir / "R_prime.seq", res.R, prov);
        write_artifact(dir / "profile_S.csv", profile_csv(rep.source_profile, "c"), prov);
        write_artifact(dir / "ratio_S.csv", profile_csv(rep.source_ratio, "usage"), prov);
        write_artifact(dir / "profile_R.csv", profile_csv(rep.output_profile, "c"), prov);
        write_artifact(dir / "stages.csv", stages_csv(rep.stages), prov);
        json rj = report_json(rep);
        if (f.input.in.empty()) {
            const auto [H, P] = nominal_dimensions(c.generator);
            rj["nominal"] = {{"dim_H", rational_json(H)}, {"dim_P", rational_json(P)}};
            if (P > Rational(0)) rj["target"]["nominal_H"] = rational_json(H / P - e.epsilon);
        }
        write_artifact(dir / "report.json", rj.dump(2) + "\n", prov);
        out << "stages " << rep.stages.size() << "\n|R'| " << res.R.size() << "\ncovered " << rep.covered
            << "\nsource dim_hat_H " << rep.source_H.to_decimal(6) << " dim_hat_P " << rep.source_P.to_decimal(6)
            << "\noutput dim_hat_H " << rep.output_H.to_decimal(6) << " dim_hat_P " << rep.output_P.to_decimal(6)
            << "\nverification " << (rep.verification.ok() ? "ok" : "FAILED: " + rep.verification.detail)
            << "\nwrote " << dir.string() << '\n';
        return rep.verification.ok() ? kOk : kDomainError;
    } catch (const ext::ExtractionError& x) {
        json rj = report_json(x.partial());
        rj["error"] = x.what();
        write_artifact(dir / "report.json", rj.dump(2) + "\n", prov);
        throw;
    }
}

struct ComposeFlags {
    InputFlags input;
    OracleFlags oracle;
    std::string inner = "double", outer = "xor-pair";
    std::uint64_t n = 1000;
    std::uint64_t step_budget = 1'000'000'000;
    bool double_encode = false;
    std::string out_path, trace_path;
};

int cmd_compose(const ComposeFlags& f, std::ostream& out) {
    const ComplexityOracle oracle(f.oracle.settings());
    json cfg = f.input.describe();
    cfg["oracle"] = to_json(oracle.settings());
    cfg["n"] = f.n;
    if (f.double_encode) {
        cfg["double_encode"] = true;
        const auto seq = f.input.load(blocks::triangular(blocks::blocks_to_cover(f.n)));
        const auto d = red::double_encode(PrefixOracle::of(seq), f.n, oracle);
        std::ostringstream csv;
        csv << "profile,n,usage,ratio,ratio_fraction\n";
        auto rows = [&](const char* label, const dim::Profile& p) {
            for (const auto& s : p.samples) {
                csv << label << ',' << s.n << ',' << s.value << ',' << s.ratio().to_decimal(6) << ','
                    << s.ratio().to_fraction() << '\n';
            }
        };
        rows("composite", d.composite);
        rows("outer", d.outer);
        rows("inner", d.inner);
        write_artifact(f.out_path, csv.str(), {"compose-demo", cfg});
        const Rational bound = d.rho_outer * d.rho_inner + Rational(1, 20);
        out << "|X| " << d.n << " |R1| " << d.R1.size() << " |R2| " << d.R2.size() << "\ncomposition law "
            << (d.check.law_holds ? "holds" : "FAILS at n = " + std::to_string(d.check.first_mismatch))
            << "\noutput " << (d.output_ok ? "matches X" : "DIFFERS from X") << "\nrho+ composite "
            << d.rho_composite.to_decimal(6) << " outer " << d.rho_outer.to_decimal(6) << " inner "
            << d.rho_inner.to_decimal(6) << "\nproduct bound " << bound.to_decimal(6)
            << (d.rho_composite <= bound ? " holds" : " FAILS") << "\nwrote " << f.out_path << '\n';
        return d.check.law_holds && d.output_ok ? kOk : kDomainError;
    }
    cfg["inner"] = f.inner;
    cfg["outer"] = f.outer;
    const auto M1 = red::make_machine(f.inner, oracle);
    const auto M2 = red::make_machine(f.outer, oracle);
    // Inputs generated on the fly are sized generously; a finite file is its own horizon.
    const auto seq = f.input.load(std::max<std::uint64_t>(16 * f.n + 1024, 1 << 16));
    const auto c = red::check_composition(M1, M2, PrefixOracle::of(seq), f.n, f.step_budget);
    std::ostringstream csv;
    csv << "n,usage_composite,usage_outer,predicted,match\n";
    const auto& tc = c.composite.trace;
    const std::uint64_t rows = std::min<std::uint64_t>(tc.produced(), c.predicted.size() ? c.predicted.size() - 1 : 0);
    for (std::uint64_t k = 1; k <= rows; ++k) {
        const std::uint64_t u2 = c.m2.trace.usage[k];
        csv << k << ',' << tc.usage[k] << ',' << u2 << ',' << c.predicted[k] << ','
            << (c.predicted[k] == tc.usage[k] ? 1 : 0) << '\n';
    }
    write_artifact(f.out_path, csv.str(), {"compose-demo", cfg});
    if (!f.trace_path.empty()) {
        std::ostringstream t;
        red::write_trace_csv(t, tc);
        write_artifact(f.trace_path, t.str(), {"compose-demo", cfg});
    }
    out << c.composite.output.size() << " bits, status " << red::to_string(tc.status)
        << (tc.detail.empty() ? "" : " (" + tc.detail + ")") << "\ncomposition law "
        << (c.law_holds ? "holds" : "FAILS at n = " + std::to_string(c.first_mismatch)) << "\nwrote " << f.out_path
        << '\n';
    return c.law_holds ? kOk : kDomainError;
}

struct GuardFlags {
    InputFlags input;
    OracleFlags oracle;
    std::string machine = "identity";
    std::string alpha_prime = "1/2";
    std::uint64_t n = 300;
    red::GuardSchedule schedule;
    std::string out_path;
};

int cmd_guard(const GuardFlags& f, std::ostream& out) {
    const ComplexityOracle oracle(f.oracle.settings());
    const Rational ap = rational_flag(f.alpha_prime, "--alpha-prime");
    if (!(ap > Rational(0)) || !(ap < Rational(1))) throw UsageError("--alpha-prime must be in (0, 1)");
    const auto M = red::make_machine(f.machine, oracle);
    auto log = std::make_shared<red::GuardLog>();
    const auto N = red::guard(M, ap, oracle, f.schedule, log);
    const auto seq = f.input.load(f.n + f.schedule.window + 4 * f.n + 1024);
    const auto S = PrefixOracle::of(seq);
    const auto guarded = red::run(N, S, f.n);
    const auto plain = red::run(M, S, f.n);

    json cfg = f.input.describe();
    cfg["oracle"] = to_json(oracle.settings());
    cfg["machine"] = f.machine;
    cfg["alpha_prime"] = ap.to_fraction();
    cfg["n"] = f.n;
    cfg["schedule"] = {{"machine_steps", f.schedule.machine_steps},
                       {"search_steps", f.schedule.search_steps},
                       {"window", f.schedule.window},
                       {"machine_budget", f.schedule.machine_budget}};
    std::ostringstream csv;
    csv << "bit,guarded,unguarded,winner,m,probes,machine_steps,program_length\n";
    std::optional<std::uint64_t> first_search, cutoff;
    for (const auto& e : log->entries) {
        if (e.bit >= guarded.output.size()) break;
        const bool has_plain = e.bit < plain.output.size();
        csv << e.bit << ',' << int(guarded.output[e.bit]) << ','
            << (has_plain ? std::to_string(plain.output[e.bit]) : std::string()) << ',' << red::to_string(e.winner)
            << ',' << e.m << ',' << e.probes << ',' << e.machine_steps << ',' << e.program_length << '\n';
        if (e.winner == red::GuardEntry::Winner::search && !first_search) first_search = e.bit;
        if (!has_plain || plain.output[e.bit] != guarded.output[e.bit]) cutoff = e.bit;
    }
    write_artifact(f.out_path, csv.str(), {"guard-demo", cfg});
    out << guarded.output.size() << " guarded bits, status " << red::to_string(guarded.trace.status)
        << (guarded.trace.detail.empty() ? "" : " (" + guarded.trace.detail + ")") << "\nfirst search win "
        << (first_search ? std::to_string(*first_search) : "none") << "\nlast disagreement with " << M.name() << ' '
        << (cutoff ? std::to_string(*cutoff) : "none") << "\nwrote " << f.out_path << '\n';
    return guarded.trace.status == red::RunStatus::complete ? kOk : kDomainError;
}

int cmd_experiment(const std::vector<std::string>& configs, const std::string& out_root, std::ostream& out) {
    std::vector<ExperimentConfig> parsed;
    for (const auto& p : configs) parsed.push_back(load_config(p));
    std::string all = summary_header();
    int code = kOk;
    for (const auto& c : parsed) {
        const std::filesystem::path dir = !out_root.empty()        ? std::filesystem::path(out_root) / c.name
                                          : !c.output.empty()      ? std::filesystem::path(c.output)
                                                                   : std::filesystem::path("runs") / c.name;
        const auto row = run_experiment(c, dir);
        const Provenance prov{"experiment", to_json(c)};
        write_artifact(dir / "summary.csv", summary_header() + summary_line(row), prov);
        all += summary_line(row);
        if (!out_root.empty()) {
            json list = json::array();
            for (const auto& p : configs) list.push_back(p);
            write_artifact(std::filesystem::path(out_root) / "summary.csv", all, {"experiment", {{"configs", list}}});
        }
        out << row.name << ": " << row.result << (row.note.empty() ? "" : " (" + row.note + ")") << '\n';
        if (row.result != "pass") code = kDomainError;
    }
    return code;
}

}  // namespace

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cdlab: complexity-dimension laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    GenFlags gen_flags;
    std::uint64_t gen_n = 100'000;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "write a generated sequence as .seq");
    gen_flags.add(gen_cmd);
    gen_cmd->add_option("--n", gen_n, "number of bits")->capture_default_str();
    gen_cmd->add_option("--out", gen_out, "output .seq file")->required();

    ProfileFlags pf;
    auto* prof_cmd = app.add_subcommand("profile", "sample C(S[0..n-1])/n on a geometric grid");
    pf.input.add(prof_cmd);
    pf.oracle.add(prof_cmd);
    prof_cmd->add_option("--n", pf.n, "horizon N (capped by the input length)")->capture_default_str();
    prof_cmd->add_option("--grid-start", pf.grid_start)->capture_default_str();
    prof_cmd->add_option("--grid-ratio", pf.grid_ratio)->capture_default_str()->check(CLI::PositiveNumber);
    prof_cmd->add_option("--tail-start", pf.tail_start, "first n of the tail; default max(256, ceil(sqrt N))");
    prof_cmd->add_option("--kernel", pf.kernel, "auto, serial, parallel or streaming")->capture_default_str();
    prof_cmd->add_option("--out", pf.out_path, "output CSV")->required();

    CodecFlags ef;
    auto* enc_cmd = app.add_subcommand("encode", "block-codec encode a sequence");
    ef.input.add(enc_cmd);
    ef.oracle.add(enc_cmd);
    enc_cmd->add_option("--n", ef.n, "source bits to cover (rounded up to whole blocks); default: all whole blocks");
    enc_cmd->add_option("--out", ef.out_path, "output .seq of record bits")->required();
    enc_cmd->add_option("--trace", ef.trace_path, "usage trace CSV (n,usage)");

    CodecFlags df;
    auto* dec_cmd = app.add_subcommand("decode", "decode a record stream");
    dec_cmd->add_option("--in", df.input.in, "record stream .seq")->required()->check(CLI::ExistingFile);
    df.oracle.add(dec_cmd);
    dec_cmd->add_option("--n", df.n, "bits to decode; default: every whole record");
    dec_cmd->add_option("--out", df.out_path, "output .seq")->required();
    dec_cmd->add_option("--trace", df.trace_path, "usage trace CSV (n,usage)");

    ExtractFlags xf;
    auto* ext_cmd = app.add_subcommand("extract", "build R' with a higher dimension that decodes to S");
    xf.app = ext_cmd;
    xf.input.add(ext_cmd);
    xf.oracle.add(ext_cmd);
    ext_cmd->add_option("--config", xf.config, "experiment config; flags given explicitly override it")
        ->check(CLI::ExistingFile);
    ext_cmd->add_option("--epsilon", xf.epsilon)->capture_default_str();
    ext_cmd->add_option("--target-n", xf.target_n, "source bits R' must cover")->capture_default_str();
    ext_cmd->add_option("--profile-n", xf.profile_n, "horizon for measuring S; default target-n");
    ext_cmd->add_option("--horizon", xf.horizon, "generated source length; default max(8 target-n, 2^17)");
    ext_cmd->add_option("--param-source", xf.param_source, "codec_ratio or complexity")->capture_default_str();
    ext_cmd->add_option("--d", xf.d, "override d");
    ext_cmd->add_option("--D", xf.D, "override D");
    ext_cmd->add_option("--n0", xf.n0, "override n0");
    ext_cmd->add_option("--search-budget", xf.search_budget, "structured candidates per stage")->capture_default_str();
    ext_cmd->add_option("--full-lookahead", xf.full_lookahead, "blocks with all mode assignments tried")
        ->capture_default_str();
    ext_cmd->add_option("--exhaustive-cap", xf.exhaustive_cap, "exhaustive fallback length cap, 0 = off")
        ->capture_default_str()
        ->check(CLI::Range(0, 24));
    ext_cmd->add_option("--out-dir", xf.out_dir)->capture_default_str();

    ComposeFlags cf;
    auto* comp_cmd = app.add_subcommand("compose-demo", "check the usage composition law for two machines");
    cf.input.add(comp_cmd);
    cf.oracle.add(comp_cmd);
    comp_cmd->add_option("--inner", cf.inner, "M1, reads S")->capture_default_str();
    comp_cmd->add_option("--outer", cf.outer, "M2, reads M1's output")->capture_default_str();
    comp_cmd->add_option("--n", cf.n, "output bits")->capture_default_str();
    comp_cmd->add_option("--step-budget", cf.step_budget)->capture_default_str();
    comp_cmd->add_flag("--double-encode", cf.double_encode, "encode twice and decode with a composed decoder");
    comp_cmd->add_option("--out", cf.out_path, "output CSV")->required();
    comp_cmd->add_option("--trace", cf.trace_path, "composite trace CSV (n,usage,per_bit_queries)");

    GuardFlags gf;
    auto* guard_cmd = app.add_subcommand("guard-demo", "run a machine under the compressibility guard");
    gf.input.add(guard_cmd);
    gf.oracle.add(guard_cmd);
    guard_cmd->add_option("--machine", gf.machine, "machine name")->capture_default_str();
    guard_cmd->add_option("--alpha-prime", gf.alpha_prime, "length cap factor in (0, 1)")->capture_default_str();
    guard_cmd->add_option("--n", gf.n, "output bits")->capture_default_str();
    guard_cmd->add_option("--machine-steps", gf.schedule.machine_steps)->capture_default_str();
    guard_cmd->add_option("--search-steps", gf.schedule.search_steps)->capture_default_str();
    guard_cmd->add_option("--window", gf.schedule.window, "probes per bit")->capture_default_str();
    guard_cmd->add_option("--machine-budget", gf.schedule.machine_budget, "machine steps per bit")
        ->capture_default_str();
    guard_cmd->add_option("--out", gf.out_path, "output CSV")->required();

    std::vector<std::string> configs;
    std::string exp_out;
    auto* exp_cmd = app.add_subcommand("experiment", "generate, profile, encode, extract, re-profile");
    exp_cmd->add_option("configs", configs, "config files")->required()->check(CLI::ExistingFile);
    exp_cmd->add_option("--out", exp_out, "root directory; default: each config's output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen_flags, gen_n, gen_out, out);
        if (*prof_cmd) return cmd_profile(pf, out);
        if (*enc_cmd) return cmd_encode(ef, out);
        if (*dec_cmd) return cmd_decode(df, out);
        if (*ext_cmd) return cmd_extract(xf, out);
        if (*comp_cmd) return cmd_compose(cf, out);
        if (*guard_cmd) return cmd_guard(gf, out);
        if (*exp_cmd) return cmd_experiment(configs, exp_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ext::ExtractionError& e) {
        err << "extraction failed: " << e.what() << '\n';
        return kDomainError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace cdl::cli
