#include <doctest.h>

#include "eulerlab/cli.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace eulerlab;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string output;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("eulerlab_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

Result run_cli(const std::string& args) {
    const std::string cmd = std::string(EULERLAB_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kEnergy = R"({"experiment": "energy_conservation", "grid": {"n": 128},
  "synth": {"kind": "taylor_green"}, "solver": {"dt": 1e-3, "T": 0.5, "snapshot_stride": 100}})";

}  // namespace

TEST_CASE("cli: energy conservation run writes artifacts") {
    const auto cfg = write_config("energy.json", kEnergy);
    const auto out = scratch_dir() / "energy_out";
    const Result r = run_cli("run " + cfg.string() + " --output-dir " + out.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("energy_conservation") != std::string::npos);
    const auto report = cli::Json::parse(slurp(out / "report.json"));
    CHECK(report["result"]["relative_drift"].get<double>() <= 1e-6);
    CHECK(report["result"]["pass"].get<bool>());
    for (const char* f : {"metadata.json", "manifest.json", "ledger.csv", "initial.eulb", "final.eulb"}) {
        CHECK(fs::exists(out / f));
    }
    const auto manifest = cli::Json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["config_hash"] == report["config_hash"]);
    CHECK(manifest["artifacts"].size() == 5);
}

TEST_CASE("cli: configuration errors exit 1 and name the problem") {
    const auto bad_grid = write_config("grid7.json", R"({"experiment": "energy_conservation", "grid": {"n": 7},
      "synth": {"kind": "taylor_green"}, "solver": {"dt": 1e-3, "T": 0.1}})");
    Result r = run_cli("run " + bad_grid.string() + " --output-dir " + (scratch_dir() / "never").string());
    CHECK(r.code == 1);
    CHECK(r.output.find("power of two") != std::string::npos);
    CHECK_FALSE(fs::exists(scratch_dir() / "never"));

    const auto unknown = write_config("unknown.json", R"({"experiment": "besov_fit", "grid": {"n": 64},
      "synth": {"kind": "taylor_green", "colour": 3}})");
    r = run_cli("validate " + unknown.string());
    CHECK(r.code == 1);
    CHECK(r.output.find("synth.colour") != std::string::npos);

    const auto eps = write_config("eps.json", R"({"experiment": "commutator_scaling", "grid": {"n": 64},
      "synth": {"kind": "taylor_green"}, "sweep": {"epsilons": [0.5, 0.25, 0.125, 0.0625]}})");
    r = run_cli("validate " + eps.string());
    CHECK(r.code == 1);
    CHECK(r.output.find("need n_per_axis >= 128") != std::string::npos);

    const auto cfl = write_config("cfl.json", R"({"experiment": "energy_conservation", "grid": {"n": 64},
      "synth": {"kind": "taylor_green"}, "solver": {"dt": 0.5, "T": 1}})");
    r = run_cli("validate " + cfl.string());
    CHECK(r.code == 1);
    CHECK(r.output.find("CFL") != std::string::npos);

    r = run_cli("run " + (scratch_dir() / "missing.json").string());
    CHECK(r.code == 1);
    r = run_cli("frobnicate x.json");
    CHECK(r.code == 1);
}

TEST_CASE("cli: validate prints derived quantities") {
    const auto cfg = write_config("valid.json", kEnergy);
    const Result r = run_cli("validate " + cfg.string());
    CHECK(r.code == 0);
    for (const char* key : {"grid.spacing", "epsilon.min", "solver.cfl_dt_bound", "solver.steps", "config ok"}) {
        CHECK(r.output.find(key) != std::string::npos);
    }
    CHECK(r.output.find("error") == std::string::npos);
}

TEST_CASE("cli: uniqueness exit statuses") {
    const auto same = write_config("same.json", R"({"experiment": "uniqueness", "grid": {"n": 64},
      "synth": {"kind": "taylor_green"}, "solver": {"dt": 2e-3, "T": 0.1, "snapshot_stride": 10},
      "runs": {"a": {"n": 32}, "b": {"n": 32}}})");
    const auto out = scratch_dir() / "same_out";
    Result r = run_cli("run " + same.string() + " --output-dir " + out.string());
    CHECK(r.code == 0);
    const auto report = cli::Json::parse(slurp(out / "report.json"));
    for (const auto& e : report["result"]["series"]["E"]) CHECK(e.get<double>() == 0.0);
    CHECK(report["result"]["verdict"] == "pass");
    CHECK(fs::exists(out / "series.csv"));

    const auto rough = write_config("rough.json", R"({"experiment": "uniqueness", "grid": {"n": 64},
      "synth": {"kind": "lacunary", "alpha": 0.3, "j_max": 4, "amplitude": 0.1},
      "solver": {"dt": 2e-3, "T": 0.02, "snapshot_stride": 5}, "runs": {"a": {"n": 32}, "b": {"n": 64}}})");
    r = run_cli("run " + rough.string() + " --output-dir " + (scratch_dir() / "rough_out").string());
    CHECK(r.code == 3);
    CHECK(r.output.find("hypothesis_not_met") != std::string::npos);

    const auto strict = write_config("strict.json", R"({"experiment": "energy_conservation", "grid": {"n": 64},
      "synth": {"kind": "random_divfree", "slope": 2, "amplitude": 0.5},
      "solver": {"dt": 4e-3, "T": 0.2}, "checks": {"max_relative_drift": 1e-30}})");
    r = run_cli("run " + strict.string() + " --output-dir " + (scratch_dir() / "strict_out").string());
    CHECK(r.code == 2);
}

TEST_CASE("cli: reruns are byte-identical and seeds change the hash") {
    const auto cfg = write_config("det.json", R"({"experiment": "cet_scaling", "seed": 5, "grid": {"n": 128},
      "synth": {"kind": "lacunary", "alpha": 0.6, "j_max": 5}, "sweep": {"samples": 2}})");
    const auto a = scratch_dir() / "det_a";
    const auto b = scratch_dir() / "det_b";
    CHECK(run_cli("run " + cfg.string() + " --output-dir " + a.string() + " --jobs 1").code != 1);
    CHECK(run_cli("run " + cfg.string() + " --output-dir " + b.string() + " --jobs 4").code != 1);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "scaling.csv") == slurp(b / "scaling.csv"));
    CHECK(slurp(a / "field.eulb") == slurp(b / "field.eulb"));

    const auto c = scratch_dir() / "det_c";
    CHECK(run_cli("run " + cfg.string() + " --output-dir " + c.string() + " --seed-override 6").code != 1);
    const auto ra = cli::Json::parse(slurp(a / "report.json"));
    const auto rc = cli::Json::parse(slurp(c / "report.json"));
    CHECK(rc["seed"] == 6);
    CHECK(ra["config_hash"] != rc["config_hash"]);
}

TEST_CASE("cli: output root from the environment and config hashing") {
    const auto cfg = write_config("env.json", R"({"experiment": "besov_fit", "grid": {"n": 64},
      "synth": {"kind": "taylor_green"}})");
    const auto root = scratch_dir() / "root";
    const Result r = run_cli("run " + cfg.string() + " --jobs 2 --output-dir " + (scratch_dir() / "jobs").string() +
                             " && EULERLAB_OUTPUT_ROOT=" + root.string() + " " + std::string(EULERLAB_CLI_PATH) +
                             " run " + cfg.string());
    CHECK(r.code == 0);
    const auto config = cli::load_config(cfg);
    CHECK(fs::exists(root / ("besov_fit-" + cli::config_hash(config)) / "report.json"));

    CHECK(cli::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    cli::RunOptions o;
    o.seed_override = 3;
    CHECK(cli::config_hash(config) != cli::config_hash(config, o));
    CHECK(cli::experiment_names().size() == 8);
}
