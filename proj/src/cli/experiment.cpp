#include "cdlab/cli/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cdlab/cli/artifacts.hpp"
#include "cdlab/codec/codec.hpp"
#include "cdlab/seqcore/blocks.hpp"

namespace cdl::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

Rational rational_of(const json& v, const std::string& what) {
    try {
        if (v.is_string()) return Rational::parse(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_number_float()) return Rational::approximate(v.get<double>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
    throw ConfigError(what + " must be a rational (string or number)");
}

std::uint64_t count_of(const json& v, const std::string& what) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(what + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

template <class F>
void opt(const json& j, const char* key, F&& f) {
    if (j.contains(key)) f(j.at(key));
}

}  // namespace

std::uint64_t ExperimentConfig::horizon() const {
    return source_horizon ? source_horizon : std::max<std::uint64_t>(8 * extract.target_N, 1u << 17);
}

gen::GeneratorSpec parse_generator(const json& j) {
    only_keys(j, "generator", {"kind", "alpha", "beta", "seed", "schedule"});
    if (!j.contains("kind")) throw ConfigError("generator.kind is required");
    gen::GeneratorSpec g;
    const auto kind = gen::parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw ConfigError("generator.kind: unknown kind '" + j.at("kind").get<std::string>() + "'");
    g.kind = *kind;
    opt(j, "alpha", [&](const json& v) { g.alpha = rational_of(v, "generator.alpha"); });
    g.beta = g.kind == gen::Kind::oscillate ? Rational(1) : g.alpha;
    opt(j, "beta", [&](const json& v) { g.beta = rational_of(v, "generator.beta"); });
    opt(j, "seed", [&](const json& v) { g.seed = count_of(v, "generator.seed"); });
    opt(j, "schedule", [&](const json& s) {
        only_keys(s, "generator.schedule", {"base", "first_length"});
        opt(s, "base", [&](const json& v) { g.schedule.base = count_of(v, "schedule.base"); });
        opt(s, "first_length", [&](const json& v) { g.schedule.first_length = count_of(v, "schedule.first_length"); });
    });
    try {
        gen::validate(g);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("generator: ") + e.what());
    }
    return g;
}

json to_json(const gen::GeneratorSpec& g) {
    return {{"kind", gen::to_string(g.kind)},
            {"alpha", g.alpha.to_fraction()},
            {"beta", g.beta.to_fraction()},
            {"seed", g.seed},
            {"schedule", {{"base", g.schedule.base}, {"first_length", g.schedule.first_length}}}};
}

OracleSettings parse_oracle(const json& j) {
    only_keys(j, "oracle", {"kind", "budget", "max_program_len", "proxy_search_limit", "mixture"});
    OracleSettings s;
    opt(j, "kind", [&](const json& v) {
        const auto k = parse_oracle_kind(v.get<std::string>());
        if (!k) throw ConfigError("oracle.kind: unknown kind '" + v.get<std::string>() + "'");
        s.kind = *k;
    });
    opt(j, "budget", [&](const json& v) { s.budget = count_of(v, "oracle.budget"); });
    opt(j, "max_program_len", [&](const json& v) { s.max_program_len = count_of(v, "oracle.max_program_len"); });
    opt(j, "proxy_search_limit",
        [&](const json& v) { s.proxy_search_limit = count_of(v, "oracle.proxy_search_limit"); });
    opt(j, "mixture", [&](const json& m) {
        only_keys(m, "oracle.mixture", {"max_period", "orders", "depth"});
        opt(m, "max_period", [&](const json& v) {
            s.mixture.max_period = static_cast<unsigned>(count_of(v, "mixture.max_period"));
        });
        opt(m, "orders", [&](const json& v) {
            if (!v.is_array()) throw ConfigError("mixture.orders must be an array");
            s.mixture.orders.clear();
            for (const auto& o : v) s.mixture.orders.push_back(static_cast<unsigned>(count_of(o, "mixture.orders")));
        });
        opt(m, "depth", [&](const json& v) { s.mixture.depth = static_cast<unsigned>(count_of(v, "mixture.depth")); });
    });
    if (s.mixture.depth == 0 || s.mixture.depth > 40) throw ConfigError("mixture.depth must be in 1..40");
    return s;
}

json to_json(const OracleSettings& s) {
    return {{"kind", to_string(s.kind)},
            {"budget", s.budget},
            {"max_program_len", s.max_program_len},
            {"proxy_search_limit", s.proxy_search_limit},
            {"mixture",
             {{"max_period", s.mixture.max_period}, {"orders", s.mixture.orders}, {"depth", s.mixture.depth}}}};
}

ExperimentConfig parse_config(const json& j) {
    only_keys(j, "config", {"schema", "name", "generator", "oracle", "grid", "extractor", "output"});
    if (!j.contains("schema")) throw ConfigError("config: missing 'schema'");
    if (j.at("schema") != kSchemaVersion) {
        throw ConfigError("config: schema " + j.at("schema").dump() + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    ExperimentConfig c;
    if (!j.contains("name") || !j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
        throw ConfigError("config: 'name' must be a non-empty string");
    }
    c.name = j.at("name").get<std::string>();
    if (c.name.find_first_of("/\\,\"\n") != std::string::npos) {
        throw ConfigError("config: 'name' may not contain path separators, commas or quotes");
    }
    if (!j.contains("generator")) throw ConfigError("config: missing 'generator'");
    c.generator = parse_generator(j.at("generator"));
    opt(j, "oracle", [&](const json& v) { c.oracle = parse_oracle(v); });
    opt(j, "grid", [&](const json& g) {
        only_keys(g, "grid", {"start", "ratio"});
        opt(g, "start", [&](const json& v) { c.grid_start = count_of(v, "grid.start"); });
        opt(g, "ratio", [&](const json& v) {
            if (!v.is_number()) throw ConfigError("grid.ratio must be a number");
            c.grid_ratio = v.get<double>();
        });
    });
    if (c.grid_start == 0 || !(c.grid_ratio > 1.0)) throw ConfigError("grid: need start >= 1 and ratio > 1");
    auto& e = c.extract;
    opt(j, "extractor", [&](const json& x) {
        only_keys(x, "extractor",
                  {"epsilon", "target_N", "profile_N", "source_horizon", "param_source", "d", "D", "n0",
                   "search_budget", "full_lookahead", "exhaustive_cap", "precondition_floor"});
        opt(x, "epsilon", [&](const json& v) { e.epsilon = rational_of(v, "extractor.epsilon"); });
        opt(x, "target_N", [&](const json& v) { e.target_N = count_of(v, "extractor.target_N"); });
        opt(x, "profile_N", [&](const json& v) { e.profile_N = count_of(v, "extractor.profile_N"); });
        opt(x, "source_horizon", [&](const json& v) { c.source_horizon = count_of(v, "extractor.source_horizon"); });
        opt(x, "param_source", [&](const json& v) {
            const auto s = v.get<std::string>();
            if (s == "codec_ratio") e.source = ext::ParamSource::codec_ratio;
            else if (s == "complexity") e.source = ext::ParamSource::complexity;
            else throw ConfigError("extractor.param_source must be codec_ratio or complexity");
        });
        opt(x, "d", [&](const json& v) { if (!v.is_null()) e.d = rational_of(v, "extractor.d"); });
        opt(x, "D", [&](const json& v) { if (!v.is_null()) e.D = rational_of(v, "extractor.D"); });
        opt(x, "n0", [&](const json& v) { if (!v.is_null()) e.n0 = count_of(v, "extractor.n0"); });
        opt(x, "search_budget", [&](const json& v) { e.search_budget = count_of(v, "extractor.search_budget"); });
        opt(x, "full_lookahead", [&](const json& v) {
            e.full_lookahead = static_cast<unsigned>(count_of(v, "extractor.full_lookahead"));
        });
        opt(x, "exhaustive_cap", [&](const json& v) { e.exhaustive_cap = count_of(v, "extractor.exhaustive_cap"); });
        opt(x, "precondition_floor",
            [&](const json& v) { e.precondition_floor = rational_of(v, "extractor.precondition_floor"); });
    });
    e.grid_start = c.grid_start;
    e.grid_ratio = c.grid_ratio;
    if (!(e.epsilon > Rational(0)) || !(e.epsilon < Rational(1))) throw ConfigError("extractor.epsilon must be in (0, 1)");
    if (e.target_N == 0) throw ConfigError("extractor.target_N must be positive");
    if (e.full_lookahead > 16) throw ConfigError("extractor.full_lookahead must be at most 16");
    if (e.exhaustive_cap > 24) throw ConfigError("extractor.exhaustive_cap must be at most 24");
    const std::uint64_t H = e.profile_N ? e.profile_N : e.target_N;
    if (c.source_horizon && c.source_horizon < std::max(H, e.target_N)) {
        throw ConfigError("extractor.source_horizon must cover target_N and profile_N");
    }
    opt(j, "output", [&](const json& v) { c.output = v.get<std::string>(); });
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json to_json(const ExperimentConfig& c) {
    const auto& e = c.extract;
    json x = {{"epsilon", e.epsilon.to_fraction()},
              {"target_N", e.target_N},
              {"profile_N", e.profile_N},
              {"source_horizon", c.horizon()},
              {"param_source", e.source == ext::ParamSource::codec_ratio ? "codec_ratio" : "complexity"},
              {"d", e.d ? json(e.d->to_fraction()) : json(nullptr)},
              {"D", e.D ? json(e.D->to_fraction()) : json(nullptr)},
              {"n0", e.n0 ? json(*e.n0) : json(nullptr)},
              {"search_budget", e.search_budget},
              {"full_lookahead", e.full_lookahead},
              {"exhaustive_cap", e.exhaustive_cap},
              {"precondition_floor", e.precondition_floor.to_fraction()}};
    return {{"schema", kSchemaVersion},
            {"name", c.name},
            {"generator", to_json(c.generator)},
            {"oracle", to_json(c.oracle)},
            {"grid", {{"start", c.grid_start}, {"ratio", c.grid_ratio}}},
            {"extractor", x},
            {"output", c.output}};
}

std::pair<Rational, Rational> nominal_dimensions(const gen::GeneratorSpec& g) {
    switch (g.kind) {
        case gen::Kind::zeros: return {Rational(0), Rational(0)};
        case gen::Kind::prng: return {Rational(1), Rational(1)};
        case gen::Kind::dilute: return {g.alpha, g.alpha};
        case gen::Kind::oscillate: return {g.alpha, g.beta};
    }
    return {Rational(0), Rational(0)};
}

json report_json(const ext::ExtractReport& rep) {
    const auto& p = rep.params;
    json stages = json::array();
    for (const auto& s : rep.stages) {
        stages.push_back({{"stage", s.stage},
                          {"blocks", {s.first_block, s.last_block}},
                          {"N", s.N},
                          {"usage", s.usage},
                          {"candidates", s.candidates},
                          {"modes", s.modes},
                          {"exhaustive", s.exhaustive},
                          {"c_peak", rational_json(s.c_peak)},
                          {"conditions", {{"a", true}, {"b", true}, {"c", true}}}});
    }
    const auto& v = rep.verification;
    return {{"params",
             {{"epsilon", rational_json(p.epsilon)},
              {"delta", rational_json(p.delta)},
              {"d", rational_json(p.d)},
              {"D", rational_json(p.D)},
              {"n0", p.n0},
              {"search_budget", p.search_budget},
              {"full_lookahead", p.full_lookahead},
              {"exhaustive_cap", p.exhaustive_cap}}},
            {"source", {{"dim_hat_H", rational_json(rep.source_H)}, {"dim_hat_P", rational_json(rep.source_P)}}},
            {"target", {{"dim_hat_H", rational_json(rep.target_H)}, {"dim_hat_P", rational_json(rep.target_P)}}},
            {"output",
             {{"dim_hat_H", rational_json(rep.output_H)},
              {"dim_hat_P", rational_json(rep.output_P)},
              {"length", rep.output_profile.samples.empty() ? 0 : rep.output_profile.samples.back().n}}},
            {"covered", rep.covered},
            {"prefix_stable", rep.prefix_stable},
            {"verification",
             {{"ok", v.ok()},
              {"N", v.N},
              {"a_decode", v.decode_ok},
              {"b_violations", v.b_violations},
              {"c_violation_count", v.c_violation_count},
              {"c_violations", v.c_violations},
              {"detail", v.detail}}},
            {"stages", stages}};
}

std::string stages_csv(const std::vector<ext::StageRecord>& stages) {
    std::ostringstream out;
    out << "stage,first_block,last_block,N,usage,candidates,modes,exhaustive,c_peak,c_peak_fraction\n";
    for (const auto& s : stages) {
        out << s.stage << ',' << s.first_block << ',' << s.last_block << ',' << s.N << ',' << s.usage << ','
            << s.candidates << ',' << s.modes << ',' << (s.exhaustive ? 1 : 0) << ',' << s.c_peak.to_decimal(6) << ','
            << s.c_peak.to_fraction() << '\n';
    }
    return out.str();
}

std::string summary_header() {
    return "name,dim_hat_H_S,dim_hat_P_S,target,dim_hat_H_R,dim_hat_P_R,result,note,"
           "dim_hat_H_S_fraction,dim_hat_P_S_fraction,target_fraction,dim_hat_H_R_fraction,dim_hat_P_R_fraction\n";
}

std::string summary_line(const SummaryRow& row) {
    auto dec = [](const std::optional<Rational>& r) { return r ? r->to_decimal(6) : std::string(); };
    auto frac = [](const std::optional<Rational>& r) { return r ? r->to_fraction() : std::string(); };
    std::string note = row.note;
    std::replace(note.begin(), note.end(), '"', '\'');
    std::ostringstream out;
    out << row.name << ',' << dec(row.H_S) << ',' << dec(row.P_S) << ',' << dec(row.target) << ',' << dec(row.H_R)
        << ',' << dec(row.P_R) << ',' << row.result << ",\"" << note << "\"," << frac(row.H_S) << ',' << frac(row.P_S)
        << ',' << frac(row.target) << ',' << frac(row.H_R) << ',' << frac(row.P_R) << '\n';
    return out.str();
}

SummaryRow run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir) {
    SummaryRow row;
    row.name = c.name;
    const auto [nom_H, nom_P] = nominal_dimensions(c.generator);
    if (nom_P > Rational(0)) row.target = nom_H / nom_P - c.extract.epsilon;

    Provenance prov{"experiment", to_json(c)};
    const ComplexityOracle oracle(c.oracle);
    const std::uint64_t H = c.extract.profile_N ? c.extract.profile_N : c.extract.target_N;

    const BitSequence seq = gen::generate(c.generator, c.horizon());
    write_seq_artifact(dir / "S.seq", seq, prov);
    const PrefixOracle S = PrefixOracle::of(seq);

    // Codec stream of S over the measurement horizon, with its usage trace.
    const auto enc = codec::encode(S, H, oracle);
    write_seq_artifact(dir / "S_encoded.seq", enc.stream, prov);

    auto write_source = [&](const ext::ExtractReport& rep) {
        if (!rep.source_profile.samples.empty()) {
            write_artifact(dir / "profile_S.csv", profile_csv(rep.source_profile, "c"), prov);
            row.H_S = rep.source_H;
            row.P_S = rep.source_P;
        }
        if (!rep.source_ratio.samples.empty()) {
            write_artifact(dir / "ratio_S.csv", profile_csv(rep.source_ratio, "usage"), prov);
        }
    };

    try {
        const auto res = ext::extract(S, c.extract, oracle);
        const auto& rep = res.report;
        write_source(rep);
        write_seq_artifact(dir / "R_prime.seq", res.R, prov);
        write_artifact(dir / "profile_R.csv", profile_csv(rep.output_profile, "c"), prov);
        write_artifact(dir / "stages.csv", stages_csv(rep.stages), prov);
        json rj = report_json(rep);
        rj["name"] = c.name;
        rj["nominal"] = {{"dim_H", rational_json(nom_H)}, {"dim_P", rational_json(nom_P)}};
        if (row.target) rj["target"]["nominal_H"] = rational_json(*row.target);
        write_artifact(dir / "report.json", rj.dump(2) + "\n", prov);

        row.H_R = rep.output_H;
        row.P_R = rep.output_P;
        const Rational target_H = row.target.value_or(rep.target_H);
        row.target = target_H;
        std::vector<std::string> misses;
        if (!rep.verification.ok()) misses.push_back("verification failed: " + rep.verification.detail);
        if (rep.output_H < target_H) misses.push_back("dim_hat_H(R') below target");
        if (rep.output_P < rep.target_P) misses.push_back("dim_hat_P(R') below 1 - epsilon");
        if (!rep.prefix_stable) misses.push_back("prefix not stable");
        row.result = misses.empty() ? "pass" : "fail";
        std::ostringstream note;
        note << "stages=" << rep.stages.size() << " |R'|=" << res.R.size() << " covered=" << rep.covered;
        for (const auto& m : misses) note << "; " << m;
        row.note = note.str();
    } catch (const ext::ExtractionError& e) {
        write_source(e.partial());
        if (!e.partial().stages.empty()) write_artifact(dir / "stages.csv", stages_csv(e.partial().stages), prov);
        json rj = report_json(e.partial());
        rj["name"] = c.name;
        rj["error"] = e.what();
        write_artifact(dir / "report.json", rj.dump(2) + "\n", prov);
        row.result = e.kind() == ext::ExtractionError::Kind::precondition ? "precondition_failed" : "exhausted";
        row.note = e.what();
    }
    return row;
}

}  // namespace cdl::cli
