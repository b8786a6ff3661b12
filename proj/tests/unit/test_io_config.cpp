#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "hsps/config.hpp"
#include "hsps/error.hpp"
#include "hsps/io.hpp"

using namespace hsps;

TEST_CASE("shortest round-trip formatting")
{
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1e-300) == "1e-300");
    CHECK(io::format_double(std::nan("")) == "nan");
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::pow(10.0, u(rng)) * (k % 2 ? -1.0 : 1.0);
        CHECK(std::stod(io::format_double(v)) == v);
    }
}

TEST_CASE("fnv1a64 reference values")
{
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(io::hex64(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
    CHECK(io::hex64(1) == "0000000000000001");
}

TEST_CASE("csv tables quote when needed")
{
    io::Table t;
    t.header = {"a", "b"};
    t.add({"1", "x,y"});
    t.add({"2", "say \"hi\""});
    CHECK(t.to_csv() == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    Eigen::MatrixXd m(2, 2);
    m << 1, 0.5, -2, 0.25;
    CHECK(io::matrix_csv(m) == "1,0.5\n-2,0.25\n");
}

TEST_CASE("xy csv parsing")
{
    const auto d = io::parse_xy_csv("# comment\nn,p\n1, 0.5\n\n2,0.25,0.01\n");
    REQUIRE(d.size() == 2);
    CHECK(d[0].x == 1.0);
    CHECK(d[0].y == 0.5);
    CHECK_FALSE(d[0].sigma.has_value());
    CHECK(*d[1].sigma == 0.01);
    CHECK(io::parse_xy_csv("3,4\n").size() == 1);

    try {
        io::parse_xy_csv("n,p\n1,0.5\n2,abc\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(io::parse_xy_csv("1,2,3,4\n"), DataError);
    CHECK_THROWS_AS(io::parse_xy_csv("1\n"), DataError);
    CHECK_THROWS_AS(io::read_xy_csv("/nonexistent/file.csv"), DataError);

    const auto synth = io::read_xy_csv(std::string(HSPS_DATA_DIR) + "/multiplex_synthetic.csv");
    CHECK(synth.size() == 50);
    CHECK(synth.front().x == 11.0);
    CHECK(synth.back().x == 60.0);
}

TEST_CASE("config: defaults validate and round trip")
{
    const auto d = config::RunConfig::defaults();
    CHECK_NOTHROW(d.validate());
    const std::string s = config::serialize(d);
    CHECK(config::serialize(config::parse(s)) == s);
    CHECK(config::serialize(config::parse("{}")) == s);
    CHECK(config::serialize(config::parse("// nothing\n{ /* empty */ }")) == s);
}

TEST_CASE("config: unknown keys and bad values name their path")
{
    auto msg = [](const std::string& text) {
        try {
            config::parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(msg(R"({"crystal": {"lenght_m": 0.002}})").find("crystal.lenght_m") != std::string::npos);
    CHECK(msg(R"({"bogus": 1})").find("bogus") != std::string::npos);
    CHECK(msg(R"({"crystal": {"length_m": -1}})").find("crystal.length_m") != std::string::npos);
    CHECK(msg(R"({"grid": {"points": "many"}})").find("grid.points") != std::string::npos);
    CHECK(msg(R"({"multiplex": {"preset": "nope"}})").find("nope") != std::string::npos);
    CHECK(msg(R"({"dispersion_models": {"ktp_kato2002": {}}})").find("reserved") != std::string::npos);
    CHECK(msg("{ broken").find("no error") == std::string::npos);
}

TEST_CASE("config: range lists match explicit lists")
{
    const auto a = config::parse(R"({"filters": {"fwhm_m": {"min": 1e-10, "max": 6e-9, "points": 60}}})");
    const auto d = config::RunConfig::defaults();
    CHECK(a.filters.fwhm_values == d.filters.fwhm_values);
    const auto g = config::parse(R"({"filters": {"fwhm_m": {"min": 1e-10, "max": 1e-8, "points": 3, "spacing": "log"}}})");
    REQUIRE(g.filters.fwhm_values.size() == 3);
    CHECK(g.filters.fwhm_values[1] == doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("config: presets feed the multiplex parameters")
{
    const auto c = config::parse(R"({"multiplex": {"preset": "loop_loss_measured"}})");
    CHECK(c.multiplex.params.eta_sl == 0.063);
    const auto u = config::parse(R"({"presets": {"mine": {"mu": 0.01, "bins": 20}}, "multiplex": {"preset": "mine"}})");
    CHECK(u.multiplex.params.mu == 0.01);
    CHECK(u.multiplex.params.bins == 20);
    CHECK(config::serialize(config::parse(config::serialize(u))) == config::serialize(u));
}

TEST_CASE("experiment preset resolves to the built-in defaults")
{
    const auto p = config::load(std::string(HSPS_PRESET_DIR) + "/experiment.jsonc");
    auto d = config::RunConfig::defaults();
    d.multiplex.fit.data_file = p.multiplex.fit.data_file;
    d.multiplex.fit.options.fix_eta = 0.31;
    CHECK(config::serialize(p) == config::serialize(d));
    CHECK_THROWS_AS(config::load("/nonexistent/config.json"), ConfigError);
}
