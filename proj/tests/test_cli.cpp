#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "evadopt/cli.hpp"
#include "evadopt/errors.hpp"
#include "evadopt/io.hpp"
#include "evadopt/synthetic.hpp"

using namespace evadopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
    fs::path root;
    Workspace() {
        std::random_device rd;
        root = fs::temp_directory_path() / ("evadopt-cli-" + std::to_string(rd()));
        fs::create_directories(root);
        io::write_text(root / "survey.csv", synthetic_survey_csv(99, {{"Germany", "Norway"}, 600}));
        io::write_json(root / "schema.json", default_schema().to_json());
    }
    ~Workspace() { fs::remove_all(root); }

    fs::path config(json overrides) const {
        json j = {{"survey_csv", "survey.csv"},
                  {"schema", "schema.json"},
                  {"country", "Germany"},
                  {"seed", 3},
                  {"model",
                   {{"beta", 0.01},
                    {"gamma", 0.02},
                    {"influence", "population_weighted"}}},
                  {"simulation", {{"horizon", 60}}}};
        if (overrides.is_object()) j.merge_patch(overrides);
        const fs::path p = root / ("config-" + std::to_string(io::fnv1a(j.dump())) + ".json");
        io::write_json(p, j);
        return p;
    }

    int run(std::vector<std::string> args, std::string* err_text = nullptr) const {
        args.insert(args.begin(), "evadopt");
        args.push_back("--out");
        args.push_back((root / "out").string());
        std::ostringstream out, err;
        const int rc = cli::run(args, out, err);
        if (err_text) *err_text = err.str();
        return rc;
    }

    fs::path run_dir(const fs::path& config_path) const {
        const char* env = std::getenv("EVADOPT_DATA_DIR");
        auto cfg = cli::RunConfig::from_json(io::read_json(config_path), config_path.parent_path(),
                                             env ? env : "data");
        cfg.out_dir = root / "out";
        return cfg.run_dir();
    }
};

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("budget strings") {
    CHECK(cli::Budget::parse("n").resolve(25) == 25.0);
    CHECK(cli::Budget::parse("0.75n").resolve(25) == 18.75);
    CHECK(cli::Budget::parse(3.5).resolve(25) == 3.5);
    CHECK(cli::Budget::parse("2").resolve(25) == 2.0);
    CHECK_THROWS_AS(cli::Budget::parse("x"), ConfigError);
    CHECK_THROWS_AS(cli::Budget::parse(-1), ConfigError);
    CHECK(cli::default_policies().size() == 8);
}

TEST_CASE("pipeline writes every artifact") {
    Workspace ws;
    const fs::path cfg = ws.config({});
    std::string err;
    REQUIRE_MESSAGE(ws.run({"--config", cfg.string(), "pipeline"}, &err) == 0, err);
    const fs::path dir = ws.run_dir(cfg);
    for (const char* f : {"calibrated.json", "clusters.csv", "W.csv", "centralities.csv"})
        CHECK(fs::exists(dir / f));
    const json doc = io::read_json(dir / "calibrated.json");
    CHECK(doc["schema_version"] == cli::kSchemaVersion);
    const Vector f = io::vector_from_json(doc["calibrated"]["f"]);
    CHECK(f.size() == 25);
    CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(line_count(dir / "W.csv") == 26);
    CHECK(line_count(dir / "clusters.csv") == 9);
    CHECK(doc["model_check"]["valid"] == true);

    // idempotent
    std::ifstream first(dir / "calibrated.json");
    const std::string before((std::istreambuf_iterator<char>(first)), {});
    REQUIRE(ws.run({"--config", cfg.string(), "pipeline"}) == 0);
    std::ifstream second(dir / "calibrated.json");
    CHECK(std::string((std::istreambuf_iterator<char>(second)), {}) == before);
}

TEST_CASE("input errors exit with code 2") {
    Workspace ws;
    std::string err;
    CHECK(ws.run({"--config", ws.config({{"schema", "missing.json"}}).string(), "pipeline"}, &err) == 2);
    CHECK(err.find("schema file not found") != std::string::npos);
    CHECK(ws.run({"--config", ws.config({{"seed", nullptr}}).string(), "pipeline"}) == 2);
    CHECK(ws.run({"--config", ws.config({}).string(), "--rule", "random", "simulate"}) == 2);
    CHECK(ws.run({"--config", (ws.root / "nope.json").string(), "analyze"}) == 2);
    CHECK(ws.run({"--config", ws.config({{"country", "Atlantis"}}).string(), "pipeline"}) == 2);
    CHECK(ws.run({}) == 2);
}

TEST_CASE("invalid model parameters exit with code 1") {
    Workspace ws;
    std::string err;
    const auto cfg = ws.config({{"model", {{"beta", 0.9}}}});
    CHECK(ws.run({"--config", cfg.string(), "simulate"}, &err) == 1);
    CHECK(err.find("beta") != std::string::npos);
}

TEST_CASE("analyze report validates and classifies") {
    Workspace ws;
    const auto cfg = ws.config({});
    REQUIRE(ws.run({"--config", cfg.string(), "analyze"}) == 0);
    const json doc = io::read_json(ws.run_dir(cfg) / "stability.json");
    CHECK(cli::validate_stability_json(doc).empty());
    json broken = doc;
    broken.erase("r0_max");
    CHECK_FALSE(cli::validate_stability_json(broken).empty());

    const auto inert = ws.config({{"model", {{"beta", 0.0}, {"delta", 1.0}}}});
    REQUIRE(ws.run({"--config", inert.string(), "analyze"}) == 0);
    const json g = io::read_json(ws.run_dir(inert) / "stability.json");
    CHECK(g["classification"] == "GloballyStableAdoptionFree");
    CHECK(g["r0_max"] == 0.0);
}

TEST_CASE("simulate writes a trace and summary") {
    Workspace ws;
    const auto cfg = ws.config({});
    REQUIRE(ws.run({"--config", cfg.string(), "--horizon", "0", "simulate"}) == 0);
    fs::path dir = ws.run_dir(cfg);
    auto zero = cli::RunConfig::from_json(io::read_json(cfg), cfg.parent_path(), "data");
    zero.horizon = 0;
    zero.out_dir = ws.root / "out";
    CHECK(line_count(zero.run_dir() / "trace.csv") == 2);

    REQUIRE(ws.run({"--config", cfg.string(), "--per-community", "--kind", "dissatisfaction", "--rule", "pagerank",
                    "--budget", "10", "simulate"}) == 0);
    auto ctl = zero;
    ctl.horizon = 60;
    ctl.per_community = true;
    ctl.policy = {ControlKind::DissatisfactionReduction, AllocationRule::PageRank, {10.0, false}};
    dir = ctl.run_dir();
    CHECK(line_count(dir / "trace.csv") == 62);
    const json summary = io::read_json(dir / "summary.json");
    CHECK(summary["policy"]["kind"] == "dissatisfaction");
    CHECK(summary["final"]["adopters"].is_number());
    std::ifstream trace(dir / "trace.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header.find("x_24") != std::string::npos);
}

TEST_CASE("compare and sweep") {
    Workspace ws;
    const auto cfg = ws.config({});
    REQUIRE(ws.run({"--config", cfg.string(), "compare"}) == 0);
    const fs::path dir = ws.run_dir(cfg);
    CHECK(line_count(dir / "ranking.csv") == 10);
    std::size_t traces = 0;
    for (const auto& e : fs::directory_iterator(dir / "traces")) traces += e.path().extension() == ".csv";
    CHECK(traces == 9);

    const auto empty = ws.config({{"policies", json::array()}});
    REQUIRE(ws.run({"--config", empty.string(), "compare"}) == 0);
    CHECK(line_count(ws.run_dir(empty) / "ranking.csv") == 2);

    REQUIRE(ws.run({"--config", cfg.string(), "sweep"}) == 0);
    CHECK(line_count(dir / "sweep.csv") == 21);
    const json sweep = io::read_json(dir / "sweep.json");
    CHECK(sweep["monotone_in_budget"].size() == 4);
}
