#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cdlab/dimension/profile.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"
#include "json.hpp"

// Output plumbing shared by every subcommand. Each artifact X is written
// atomically and gets a sidecar X.meta.json naming the tool version, the
// command and the FNV-1a hash of the effective configuration, so a rerun with
// the same inputs reproduces every byte.
namespace cdl::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

struct Provenance {
    std::string command;
    nlohmann::json config;  // effective flags / config
    std::string hash() const;  // fnv1a64 of config.dump(), hex
};

void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_artifact(const std::filesystem::path& path, const std::string& content, const Provenance& prov);
void write_seq_artifact(const std::filesystem::path& path, const BitSequence& seq, const Provenance& prov);

std::string profile_csv(const dim::Profile& p, const char* value_name);
// {"decimal": "0.375000", "fraction": "3/8"}
nlohmann::json rational_json(const Rational& r);

}  // namespace cdl::cli
