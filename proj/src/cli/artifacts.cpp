#include "cdlab/cli/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cdlab/seqcore/seq_file.hpp"

namespace cdl::cli {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string Provenance::hash() const { return hex64(fnv1a64(config.dump())); }

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

void write_sidecar(const std::filesystem::path& path, const Provenance& prov) {
    nlohmann::json meta;
    meta["tool"] = "cdlab";
    meta["version"] = kToolVersion;
    meta["command"] = prov.command;
    meta["config_hash"] = "fnv1a64:" + prov.hash();
    meta["config"] = prov.config;
    auto side = path;
    side += ".meta.json";
    write_text_atomic(side, meta.dump(2) + "\n");
}

}  // namespace

void write_artifact(const std::filesystem::path& path, const std::string& content, const Provenance& prov) {
    write_text_atomic(path, content);
    write_sidecar(path, prov);
}

void write_seq_artifact(const std::filesystem::path& path, const BitSequence& seq, const Provenance& prov) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    seqfile::write(path, seq);
    write_sidecar(path, prov);
}

std::string profile_csv(const dim::Profile& p, const char* value_name) {
    std::ostringstream out;
    dim::write_csv(out, p, value_name);
    return out.str();
}

nlohmann::json rational_json(const Rational& r) {
    return {{"decimal", r.to_decimal(6)}, {"fraction", r.to_fraction()}};
}

}  // namespace cdl::cli
