#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hsps/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "hsps_cli_test";

// Small grids so each command runs in well under a second.
const char* kSmall = R"({
  "grid": {"points": 48},
  "filters": {"fwhm_m": {"min": 1e-9, "max": 5e-9, "points": 5}, "resample_points": 48},
  "heralding": {"points": 5, "focal_values": {"min": 0.5, "max": 3, "points": 4}, "jsi_grid_points": 24},
  "poling": {"grid_points": 64, "pmf_points": 201,
             "landscape": {"pump_fwhm_m": [4e-9, 12e-9], "length_m": [1e-3, 2e-3]}},
  "multiplex": {"trials": 20000, "n_max": 60}
})";

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(HSPS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string write(const std::string& name, const std::string& text)
{
    fs::create_directories(kWork);
    const auto p = kWork / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) { return hsps::io::read_file(p); }

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::string small() { return write("small.json", kSmall); }

}  // namespace

TEST_CASE("exit codes")
{
    CHECK(run("").code == 2);
    CHECK(run("--bogus jsa").code == 2);
    CHECK(run("--config /nonexistent.json jsa").code == 2);
    CHECK(run("--config " + write("bad_key.json", R"({"crystal": {"lenght_m": 1}})") + " jsa").code == 2);
    CHECK(run("--config " + write("bad_json.json", "{ nope") + " jsa").code == 2);
    CHECK(run("--config " + write("bad_axis.json", R"({"crystal": {"axes": {"pump": "q"}}})") + " jsa").code == 2);
    const auto out = (kWork / "codes").string();
    CHECK(run("--out " + out + " multiplex fit --data /nonexistent.csv").code == 4);
    CHECK(run("--out " + out + " multiplex fit --data " + write("garbage.csv", "n,p\n1,x\n")).code == 4);
    CHECK(run("--out " + out + " multiplex fit --kind bogus").code == 2);
    CHECK(run("--out " + out + " poling evaluate").code == 2);
    CHECK(run("--out " + out + " poling evaluate --structure " + write("s.txt", "not a structure\n")).code == 4);
    // window starts at 0.39 um; a 300 nm pump sits outside it
    CHECK(run("--config " + write("uv.json", R"({"pump": {"center_wavelength_m": 3e-7}, "grid": {"points": 16}})") +
              " --out " + out + " jsa")
              .code == 3);
    CHECK(run("config").code == 0);
}

TEST_CASE("config command prints the resolved canonical configuration")
{
    const auto r = run("--config " + small() + " config");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["grid"]["points"] == 48);
    CHECK(j["crystal"]["length_m"] == 2e-3);
}

TEST_CASE("jsa output shapes and manifest hashes")
{
    const auto out = kWork / "jsa";
    fs::remove_all(out);
    REQUIRE(run("--config " + small() + " --out " + out.string() + " jsa").code == 0);
    const auto jsi = slurp(out / "jsa_jsi.csv");
    CHECK(count_lines(jsi) == 48);
    const auto first = jsi.substr(0, jsi.find('\n'));
    CHECK(std::count(first.begin(), first.end(), ',') == 47);
    const auto diag = json::parse(slurp(out / "jsa_diagnostics.json"));
    CHECK(diag["approximation_valid"] == true);
    CHECK(diag["grid"]["rows"] == 48);

    const auto man = json::parse(slurp(out / "jsa.manifest.json"));
    CHECK(man["command"] == "jsa");
    REQUIRE(man["outputs"].size() >= 4);
    for (const auto& o : man["outputs"]) {
        const auto bytes = slurp(out / o["file"].get<std::string>());
        CHECK(o["bytes"] == bytes.size());
        CHECK(o["fnv1a64"] == hsps::io::hex64(hsps::io::fnv1a64(bytes)));
    }
}

TEST_CASE("outputs do not depend on the thread count")
{
    const auto a = kWork / "t1", b = kWork / "t3";
    for (const auto& [dir, n] : {std::pair{a, 1}, std::pair{b, 3}}) {
        fs::remove_all(dir);
        const auto base = "--config " + small() + " --out " + dir.string() + " --threads " + std::to_string(n);
        REQUIRE(run(base + " jsa").code == 0);
        REQUIRE(run(base + " multiplex simulate").code == 0);
        REQUIRE(run(base + " purity").code == 0);
        REQUIRE(run(base + " multiplex fit --data " + std::string(HSPS_DATA_DIR) + "/multiplex_synthetic.csv").code == 0);
    }
    for (const char* f : {"jsa_jsi.csv", "jsa_diagnostics.json", "multiplex_simulation.json", "purity_sweep.csv",
                          "purity_summary.json", "multiplex_fit.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto ma = json::parse(slurp(a / "jsa.manifest.json"));
    const auto mb = json::parse(slurp(b / "jsa.manifest.json"));
    CHECK(ma["threads"] == 1);
    CHECK(mb["threads"] == 3);
    // the resolved configs differ only in the output directory
    auto ca = ma["resolved_config"], cb = mb["resolved_config"];
    ca["io"].erase("out_dir");
    cb["io"].erase("out_dir");
    CHECK(ca == cb);
}

TEST_CASE("seed flag changes the simulation only through the seed")
{
    const auto a = kWork / "s1", b = kWork / "s2";
    REQUIRE(run("--config " + small() + " --out " + a.string() + " --seed 1 multiplex simulate").code == 0);
    REQUIRE(run("--config " + small() + " --out " + b.string() + " --seed 2 multiplex simulate").code == 0);
    const auto ja = json::parse(slurp(a / "multiplex_simulation.json"));
    const auto jb = json::parse(slurp(b / "multiplex_simulation.json"));
    CHECK(ja["seed"] == 1);
    CHECK(jb["seed"] == 2);
    CHECK(ja["analytic"] == jb["analytic"]);
    CHECK(ja["successes"] != jb["successes"]);
}

TEST_CASE("poling optimize feeds evaluate")
{
    const auto out = kWork / "poling";
    fs::remove_all(out);
    const auto base = "--config " + small() + " --out " + out.string();
    REQUIRE(run(base + " poling optimize").code == 0);
    const auto opt = json::parse(slurp(out / "poling_optimize_summary.json"));
    REQUIRE(run(base + " poling evaluate --structure " + (out / "poling_structure.txt").string()).code == 0);
    const auto ev = json::parse(slurp(out / "poling_evaluate_summary.json"));
    CHECK(ev["purity_gain"].get<double>() > 0.0);
    CHECK(ev["purity_gain"] == opt["purity_gain"]);
    CHECK(count_lines(slurp(out / "poling_optimize_pmf.csv")) == 202);

    REQUIRE(run(base + " poling landscape").code == 0);
    CHECK(count_lines(slurp(out / "poling_landscape.csv")) == 1 + 2 * 2);
}

TEST_CASE("heralding and multiplex model files")
{
    const auto out = kWork / "misc";
    fs::remove_all(out);
    const auto base = "--config " + small() + " --out " + out.string();
    REQUIRE(run(base + " heralding --sweep all").code == 0);
    CHECK(count_lines(slurp(out / "heralding_wavelength.csv")) == 6);
    CHECK(fs::exists(out / "heralding_focal.csv"));
    CHECK(fs::exists(out / "heralding_argmax.json"));
    REQUIRE(run(base + " multiplex model").code == 0);
    CHECK(count_lines(slurp(out / "multiplex_model.csv")) == 61);
}
