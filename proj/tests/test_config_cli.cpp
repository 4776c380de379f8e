#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pra/cli.hpp"
#include "pra/config_io.hpp"
#include "pra/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace pra;
using std::numbers::pi;

namespace {

struct CliRun
{
    int code = -1;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "pra_cli");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path write_temp(const std::string& name, const std::string& body)
{
    const auto p = std::filesystem::temp_directory_path() / ("pra_test_cli_" + name);
    std::ofstream(p) << body;
    return p;
}

bool has_item(const config_error& e, const std::string& fragment)
{
    for (const auto& item : e.items())
        if (item.find(fragment) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST_CASE("angle parsing")
{
    CHECK(parse_angle("0.5") == 0.5);
    CHECK(parse_angle("-1e-3") == -1e-3);
    CHECK(parse_angle("pi") == doctest::Approx(pi));
    CHECK(parse_angle("-pi/2") == doctest::Approx(-pi / 2));
    CHECK(parse_angle("2pi/3") == doctest::Approx(2 * pi / 3));
    CHECK(parse_angle(" -2pi/3 ") == doctest::Approx(-2 * pi / 3));
    CHECK(parse_angle("2*pi/3") == doctest::Approx(2 * pi / 3));
    CHECK(parse_angle("0.25pi") == doctest::Approx(pi / 4));
    for (const char* bad : {"", "abc", "pi/0", "2pix", "pi/", "1.2.3", "nan"})
        CHECK_THROWS_AS(parse_angle(bad), argument_error);

    const auto list = parse_angle_list("0,2pi/3,-2pi/3");
    REQUIRE(list.size() == 3);
    CHECK(list[1] == doctest::Approx(2 * pi / 3));
    CHECK_THROWS_AS(parse_angle_list("0,,1"), argument_error);
}

TEST_CASE("config parsing")
{
    const std::string doc = R"({
      "comb": {"d": 3, "bw_hz": 2e6, "delta_hz": 50e3},
      "input": {"amps_re": [1, 0, 0], "amps_im": [0, 0.5, 0], "tau_s": 2e-6},
      "write": {"rabi_hz": 400e3},
      "read": {"rabi_hz": 400e3, "phase": 0.3},
      "grids": {"dt_s": 4e-9, "nz": 30, "ndelta": 600}
    })";
    const auto loaded = parse_config(doc);
    CHECK(loaded.warnings.empty());
    const auto& c = loaded.config;
    CHECK(c.comb.d == 3);
    CHECK(c.comb.delta_hz == 50e3);
    REQUIRE(c.input.amplitudes.size() == 3);
    CHECK(c.input.amplitudes[1] == cplx(0, 0.5));
    CHECK(c.input.tau_s == 2e-6);
    CHECK(c.read.phase == 0.3);
    CHECK(c.write.gamma_hz == HshPulse{}.gamma_hz);
    CHECK(c.grids.nz == 30);

    const auto again = parse_config(config_to_json(c)).config;
    CHECK(again.comb.bw_hz == c.comb.bw_hz);
    CHECK(again.input.amplitudes == c.input.amplitudes);
    CHECK(again.grids.dt_s == c.grids.dt_s);
    CHECK(again.read.phase == c.read.phase);
}

TEST_CASE("missing grids fall back with a warning")
{
    const auto loaded = parse_config(R"({"comb": {"d": 4}})");
    REQUIRE(loaded.warnings.size() == 1);
    CHECK(loaded.warnings[0].find("grids") != std::string::npos);
    CHECK(loaded.config.grids.nz == GridConfig{}.nz);
}

TEST_CASE("config errors are itemised")
{
    try {
        parse_config(R"({"comb": {"d": "four", "teeth": 3}, "extra": 1,
                         "input": {"amps_re": [1, 0], "amps_im": [0]},
                         "grids": {"nz": 2.5}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(has_item(e, "comb.d"));
        CHECK(has_item(e, "comb.teeth: unknown key"));
        CHECK(has_item(e, "extra: unknown key"));
        CHECK(has_item(e, "differ in length"));
        CHECK(has_item(e, "grids.nz"));
    }
    try {
        parse_config(R"({"read": {"rabi_hz": -5}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(has_item(e, "read.rabi_hz"));
    }
    try {
        parse_config(R"({"grids": {"dt_s": 1e-7}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(has_item(e, "does not resolve"));
    }
    CHECK_THROWS_AS(parse_config("{not json"), config_error);
    CHECK_THROWS_AS(parse_config("[1, 2]"), config_error);
    CHECK_THROWS_AS(load_config("/nonexistent/pra.json"), io_error);
}

TEST_CASE("summary json")
{
    RunSummary s;
    s.eta0 = 0.3;
    s.bin_energies = {0.1, 0.1, 0.1, 0, 0};
    auto j = nlohmann::json::parse(summary_json(s));
    CHECK(j["eta0"] == 0.3);
    CHECK(j["bin_energies"].size() == 5);
    CHECK_FALSE(j.contains("eta"));
    s.eta = 0.6;
    s.fidelity = 0.98;
    j = nlohmann::json::parse(summary_json(s));
    CHECK(j["fidelity"] == 0.98);
}

TEST_CASE("cli solve and tables")
{
    auto r = cli({"solve", "--phases", "0,pi/2,0"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("eta,0.600000") != std::string::npos);

    r = cli({"solve", "--phases", "0,2pi/3,-2pi/3"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("eta,0.333333") != std::string::npos);

    r = cli({"solve", "--phases", "0,banana,0"});
    CHECK(r.code == exit_invalid);
    CHECK(r.err.find("banana") != std::string::npos);

    CHECK(cli({"solve", "--phases", "0,1"}).code == exit_invalid);
    CHECK(cli({"solve"}).code == exit_invalid);
    CHECK(cli({"frobnicate"}).code == exit_invalid);
    CHECK(cli({}).code == exit_invalid);
    CHECK(cli({"--help"}).code == exit_ok);

    r = cli({"table1"});
    CHECK(r.code == exit_ok);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 13);

    r = cli({"bounds", "--max-support", "4"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("generic_bound,0.75") != std::string::npos);
    CHECK(r.out.find("support_lemma,pass") != std::string::npos);
}

TEST_CASE("cli visibility")
{
    auto r = cli({"visibility", "--basis", "mub1", "--plane", "0-2", "--backend", "synthetic",
                  "--rotation", "pi/18"});
    CHECK(r.code == exit_ok);
    std::istringstream lines(r.out);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(first.find(",10.000,") != std::string::npos);

    CHECK(cli({"visibility", "--plane", "1-2"}).code == exit_invalid);
    CHECK(cli({"visibility", "--backend", "magic"}).code == exit_invalid);
    CHECK(cli({"visibility", "--basis", "mub9"}).code == exit_invalid);
}

TEST_CASE("cli config handling and exit codes")
{
    const auto bad = write_temp("bad.json", R"({"comb": {"d": -1}})");
    auto r = cli({"simulate", "--config", bad.string()});
    CHECK(r.code == exit_invalid);
    CHECK(r.err.find("comb.d") != std::string::npos);

    CHECK(cli({"simulate", "--config", "/nonexistent/x.json"}).code == exit_invalid);

    // a short, strongly driven read pulse makes the transfer map oscillate
    const auto oscillating = write_temp("osc.json", R"({
      "read": {"gamma_hz": 1e5, "rabi_hz": 3e6},
      "grids": {"nz": 5}
    })");
    r = cli({"simulate", "--config", oscillating.string(), "--basis", "mub1",
             "--calibration-points", "21"});
    CHECK(r.code == exit_numerical);
    CHECK(r.err.find("non-monotone") != std::string::npos);

    const auto quick = write_temp("quick.json", R"({
      "grids": {"nz": 10, "dt_s": 1e-8},
      "comb": {"d": 0}
    })");
    const auto out = std::filesystem::temp_directory_path() / "pra_test_cli_out";
    std::filesystem::remove_all(out);
    r = cli({"simulate", "--config", quick.string(), "--basis", "none", "--out", out.string()});
    CHECK(r.code == exit_ok);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["eta0"].get<double>() < 1e-9);
    CHECK(j["bin_energies"].size() == 5);
    CHECK(std::distance(std::filesystem::directory_iterator(out), {}) == 2);
    std::filesystem::remove_all(out);
}
