#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdlab/cli/artifacts.hpp"
#include "cdlab/cli/commands.hpp"
#include "cdlab/cli/experiment.hpp"
#include "cdlab/seqcore/seq_file.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cdl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("cdlab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cdlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

fs::path configs() {
    const char* dir = std::getenv("CDLAB_CONFIGS");
    return dir ? fs::path(dir) : fs::path("configs");
}

}  // namespace

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(cli::hex64(cli::fnv1a64("")) == "cbf29ce484222325");
    CHECK(cli::hex64(cli::fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(cli::hex64(cli::fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("config parsing") {
    const json base = json::parse(R"({"schema": 1, "name": "t", "generator": {"kind": "dilute", "alpha": "3/10"}})");
    SUBCASE("defaults and fixed point") {
        const auto c = cli::parse_config(base);
        CHECK(c.generator.alpha == Rational(3, 10));
        CHECK(c.extract.epsilon == Rational(3, 20));
        CHECK(c.output.empty());
        CHECK(c.horizon() == std::max<std::uint64_t>(8 * c.extract.target_N, 1u << 17));
        const json canon = cli::to_json(c);
        CHECK(cli::to_json(cli::parse_config(canon)) == canon);
    }
    SUBCASE("shipped configs are fixed points") {
        for (const char* name : {"regular-half.json", "oscillate-03-06.json", "zeros.json"}) {
            const auto c = cli::load_config(configs() / name);
            CHECK(cli::to_json(cli::parse_config(cli::to_json(c))) == cli::to_json(c));
        }
    }
    SUBCASE("rationals as strings or numbers") {
        json j = base;
        j["extractor"] = {{"epsilon", 0.25}, {"d", "0.6"}, {"D", "4/5"}};
        const auto c = cli::parse_config(j);
        CHECK(c.extract.epsilon == Rational(1, 4));
        CHECK(*c.extract.d == Rational(3, 5));
        CHECK(*c.extract.D == Rational(4, 5));
    }
    SUBCASE("errors") {
        auto bad = [&](auto edit) {
            json j = base;
            edit(j);
            CHECK_THROWS_AS(cli::parse_config(j), cli::ConfigError);
        };
        bad([](json& j) { j["schema"] = 2; });
        bad([](json& j) { j.erase("schema"); });
        bad([](json& j) { j.erase("name"); });
        bad([](json& j) { j["name"] = "a/b"; });
        bad([](json& j) { j["typo"] = 1; });
        bad([](json& j) { j["generator"]["kind"] = "nope"; });
        bad([](json& j) { j["generator"]["alpha"] = "x"; });
        bad([](json& j) { j["extractor"] = {{"epsilon", "1/5"}, {"full_lookahead", 40}}; });
        bad([](json& j) { j["oracle"] = {{"kind", "gzip"}}; });
    }
}

TEST_CASE("summary rows") {
    cli::SummaryRow row;
    row.name = "x";
    row.H_S = Rational(1, 2);
    row.result = "precondition_failed";
    row.note = "a, b";
    const auto f = fields(cli::summary_line(row));
    const auto h = fields(cli::summary_header());
    CHECK(f.size() == h.size());
    CHECK(h[0] == "name");
    CHECK(f[0] == "x");
    CHECK(f[1] == "0.500000");
    CHECK(f[2].empty());
    CHECK(f[6] == "precondition_failed");
    CHECK(f[7] == "a, b");
}

TEST_CASE("gen, profile, encode, decode") {
    TempDir t;
    const auto s1 = (t.path / "a.seq").string(), s2 = (t.path / "b.seq").string();
    REQUIRE(invoke({"gen", "--kind", "dilute", "--alpha", "1/2", "--seed", "3", "--n", "5000", "--out", s1}).code == 0);
    REQUIRE(invoke({"gen", "--kind", "dilute", "--alpha", "1/2", "--seed", "3", "--n", "5000", "--out", s2}).code == 0);
    CHECK(slurp(s1) == slurp(s2));
    const json meta = json::parse(slurp(s1 + ".meta.json"));
    CHECK(meta["tool"] == "cdlab");
    CHECK(meta["command"] == "gen");
    CHECK(meta["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(meta["config_hash"] == "fnv1a64:" + cli::hex64(cli::fnv1a64(meta["config"].dump())));
    CHECK(seqfile::read(s1).size() == 5000);

    const auto prof = (t.path / "p.csv").string();
    const auto r = invoke({"profile", "--in", s1, "--n", "5000", "--grid-start", "256", "--out", prof});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("dim_hat_H") != std::string::npos);
    const auto pl = lines(slurp(prof));
    REQUIRE(pl.size() > 2);
    CHECK(fields(pl[0])[0] == "n");

    const auto enc = (t.path / "e.seq").string(), dec = (t.path / "d.seq").string();
    REQUIRE(invoke({"encode", "--in", s1, "--n", "4000", "--out", enc}).code == 0);
    REQUIRE(invoke({"decode", "--in", enc, "--out", dec}).code == 0);
    const auto orig = seqfile::read(s1), back = seqfile::read(dec);
    REQUIRE(back.size() >= 4000);
    for (std::size_t k = 0; k < back.size(); ++k) REQUIRE(back[k] == orig[k]);
    const json dmeta = json::parse(slurp(dec + ".meta.json"));
    CHECK(dmeta["config"].contains("in_fnv1a64"));
}

TEST_CASE("usage and domain errors") {
    TempDir t;
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
    CHECK(invoke({"gen", "--kind", "dilute", "--n", "10"}).code == cli::kUsageError);  // no --out
    CHECK(invoke({"gen", "--kind", "nope", "--n", "10", "--out", (t.path / "x.seq").string()}).code == cli::kUsageError);
    CHECK(invoke({"gen", "--kind", "dilute", "--alpha", "2", "--n", "10", "--out", (t.path / "x.seq").string()}).code ==
          cli::kUsageError);
    CHECK(invoke({"decode", "--in", (t.path / "missing.seq").string(), "--out", (t.path / "y.seq").string()}).code ==
          cli::kUsageError);
    {
        std::ofstream junk(t.path / "junk.seq", std::ios::binary);
        junk << "not a seq file";
    }
    CHECK(invoke({"decode", "--in", (t.path / "junk.seq").string(), "--out", (t.path / "y.seq").string()}).code ==
          cli::kDomainError);
    CHECK(invoke({"guard-demo", "--machine", "nope", "--n", "10", "--alpha-prime", "1/2"}).code == cli::kUsageError);
    {
        std::ofstream cfg(t.path / "bad.json");
        cfg << R"({"schema": 1, "name": "b", "generator": {"kind": "zeros"}, "extra": 1})";
    }
    CHECK(invoke({"experiment", (t.path / "bad.json").string(), "--out", (t.path / "o").string()}).code ==
          cli::kUsageError);
}

TEST_CASE("demos") {
    TempDir t;
    const auto comp = (t.path / "c.csv").string();
    const auto r = invoke({"compose-demo", "--inner", "double", "--outer", "xor-pair", "--n", "2000", "--out", comp});
    REQUIRE(r.code == 0);
    const auto cl = lines(slurp(comp));
    REQUIRE(cl.size() == 2001);
    const auto h = fields(cl[0]);
    for (std::size_t i = 1; i < cl.size(); ++i) CHECK(fields(cl[i]).back() == "1");
    CHECK(h.back() == "match");

    const auto g = (t.path / "g.csv").string();
    const auto gr = invoke({"guard-demo", "--machine", "complement", "--kind", "zeros", "--alpha-prime", "1/2", "--n", "60",
                         "--out", g});
    REQUIRE(gr.code == 0);
    const auto gl = lines(slurp(g));
    REQUIRE(gl.size() == 61);
    bool zero_seen = false;
    for (std::size_t i = 1; i < gl.size(); ++i) {
        const auto f = fields(gl[i]);
        if (f[1] == "0") zero_seen = true;
        if (zero_seen) CHECK(f[1] == "0");
        CHECK(f[2] == "1");
    }
    CHECK(zero_seen);
}

TEST_CASE("experiment runs") {
    TempDir t;
    const auto out = t.path / "runs";
    const auto r = invoke({"experiment", (configs() / "zeros.json").string(), (configs() / "regular-half.json").string(),
                        "--out", out.string()});
    CHECK(r.code == cli::kDomainError);  // the zeros row does not pass
    const auto rows = lines(slurp(out / "summary.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] + "\n" == cli::summary_header());
    const auto z = fields(rows[1]);
    CHECK(z[0] == "zeros");
    CHECK(z[6] == "precondition_failed");
    const auto h = fields(rows[2]);
    CHECK(h[0] == "regular-half");
    CHECK(h[3] == "0.800000");
    CHECK(h[6] == "pass");
    CHECK(std::stod(h[4]) >= 0.6);
    for (const char* f : {"S.seq", "R_prime.seq", "profile_S.csv", "ratio_S.csv", "profile_R.csv", "stages.csv",
                          "report.json", "summary.csv"}) {
        CHECK_MESSAGE(fs::exists(out / "regular-half" / f), f);
    }
    CHECK(fs::exists(out / "regular-half" / "R_prime.seq.meta.json"));
    const json rep = json::parse(slurp(out / "regular-half" / "report.json"));
    CHECK(rep["verification"]["ok"] == true);

    const auto first = slurp(out / "summary.csv");
    const auto first_r = slurp(out / "regular-half" / "R_prime.seq");
    const auto again = invoke({"experiment", (configs() / "zeros.json").string(),
                            (configs() / "regular-half.json").string(), "--out", out.string()});
    CHECK(again.code == cli::kDomainError);
    CHECK(slurp(out / "summary.csv") == first);
    CHECK(slurp(out / "regular-half" / "R_prime.seq") == first_r);
}

TEST_CASE("installed binary") {
    const char* bin = std::getenv("CDLAB_BIN");
    if (!bin) return;
    TempDir t;
    const auto a = (t.path / "z.seq").string();
    const std::string b(bin);
    CHECK(std::system((b + " gen --kind zeros --n 100 --out " + a + " > /dev/null").c_str()) == 0);
    CHECK(fs::file_size(a) > 0);
    const int bad = std::system((b + " gen --bogus 2> /dev/null").c_str());
    REQUIRE(WIFEXITED(bad));
    CHECK(WEXITSTATUS(bad) == 2);
}
