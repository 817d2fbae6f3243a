#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/extractor/extractor.hpp"
#include "cdlab/generators/generators.hpp"
#include "json.hpp"

namespace cdl::cli {

// Schema 1 (docs/formats.md):
//
//   { "schema": 1, "name": "...",
//     "generator": { "kind", "alpha", "beta", "seed", "schedule": { "base", "first_length" } },
//     "oracle":    { "kind", "budget", "max_program_len", "proxy_search_limit",
//                    "mixture": { "max_period", "orders", "depth" } },
//     "grid":      { "start", "ratio" },
//     "extractor": { "epsilon", "target_N", "profile_N", "source_horizon", "param_source",
//                    "d", "D", "n0", "search_budget", "full_lookahead", "exhaustive_cap",
//                    "precondition_floor" },
//     "output": "dir" }
//
// Everything but schema, name and generator.kind has a default. Rationals
// are strings ("3/20", "0.15") or numbers. Unknown keys are errors.
inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string name;
    gen::GeneratorSpec generator;
    OracleSettings oracle;
    std::uint64_t grid_start = dim::kDefaultGridStart;
    double grid_ratio = dim::kDefaultGridRatio;
    ext::ExtractOptions extract;
    std::uint64_t source_horizon = 0;  // 0: max(8 target_N, 2^17)
    std::string output;                // empty: "runs/<name>"

    std::uint64_t horizon() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical form with every default filled in; a fixed point of
// to_json(parse_config(.)).
nlohmann::json to_json(const ExperimentConfig& c);

OracleSettings parse_oracle(const nlohmann::json& j);
nlohmann::json to_json(const OracleSettings& s);
gen::GeneratorSpec parse_generator(const nlohmann::json& j);
nlohmann::json to_json(const gen::GeneratorSpec& g);

// (dim_H, dim_P) a generator is designed around: zeros (0, 0), prng (1, 1),
// dilute (alpha, alpha), oscillate (alpha, beta).
std::pair<Rational, Rational> nominal_dimensions(const gen::GeneratorSpec& g);

nlohmann::json report_json(const ext::ExtractReport& rep);
std::string stages_csv(const std::vector<ext::StageRecord>& stages);

struct SummaryRow {
    std::string name;
    std::optional<Rational> H_S, P_S, target, H_R, P_R;
    std::string result;  // pass, fail, precondition_failed, exhausted, error
    std::string note;
};
std::string summary_header();
std::string summary_line(const SummaryRow& row);

// generate -> profile -> encode -> extract -> re-profile into `dir`. Never
// throws for domain failures; they become the row's result.
SummaryRow run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir);

}  // namespace cdl::cli
