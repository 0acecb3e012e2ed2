// Runs the command-line binary end to end.
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path& workdir()
{
    static const fs::path d = [] {
        fs::path p = fs::path(HALFLINE_TEST_DIR) / "cli_work";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

Outcome cli(const std::string& args, const std::string& env = "")
{
    const fs::path o = workdir() / "stdout.txt", e = workdir() / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + HALFLINE_CLI + "\" " + args + " >\"" +
                            o.string() + "\" 2>\"" + e.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

fs::path write_config(const std::string& name, const json& j)
{
    const fs::path p = workdir() / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

json run(const std::string& name, const std::string& experiment)
{
    return {{"schema_version", 1},
            {"name", name},
            {"experiment", experiment},
            {"grid", {{"L", 6.0}, {"N", 63}}},
            {"solver", {{"T", 0.2}, {"window_T0", 0.05}, {"output_dt", 0.05}, {"quad_nodes", 9}}}};
}

} // namespace

TEST_CASE("presets and usage")
{
    const auto p = cli("presets");
    CHECK(p.code == 0);
    CHECK(json::parse(p.out).is_object());
    CHECK(cli("").code != 0);
    CHECK(cli("frobnicate").code != 0);
    CHECK(cli("--help").code == 0);
    CHECK(cli("run").code != 0);
}

TEST_CASE("zero problem exits cleanly with zero residual columns")
{
    json j = run("zero", "solve");
    j["potential"] = "harmonic";
    j["nonlinearity"] = "power(-1, 3)";
    const auto cfg = write_config("zero", j);
    const auto r = cli("run \"" + cfg.string() + "\"");
    CHECK(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s["identities"]["max_residual_mass"] == 0.0);
    std::istringstream csv(slurp(workdir() / "zero_identities.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("residual_mass") != std::string::npos);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        REQUIRE(cells.size() == 11);
        // the residual columns
        for (int k = 7; k < 11; ++k)
            CHECK(std::stod(cells[k]) == 0.0);
    }
    CHECK(rows == 5);
}

TEST_CASE("validate reports the failing hypothesis")
{
    CHECK(cli("validate \"" + write_config("ok", run("ok", "solve")).string() + "\"").code == 0);
    json j = run("bad", "solve");
    j["force"] = "constant(1)";
    j["initial"] = "eigenmode(1)";
    const auto r = cli("validate \"" + write_config("bad", j).string() + "\"");
    CHECK(r.code == 2);
    const json e = json::parse(r.err);
    CHECK(e["error"]["code"] == "configuration");
    CHECK(e["error"]["hypothesis"].is_string());
    CHECK(cli("run \"" + write_config("bad", j).string() + "\"").code == 2);

    json u = run("u", "solve");
    u["surprise"] = true;
    const auto ru = cli("validate \"" + write_config("u", u).string() + "\"");
    CHECK(ru.code == 2);
    CHECK(json::parse(ru.err)["error"]["message"].get<std::string>().find("surprise") != std::string::npos);
    CHECK(cli("validate /nonexistent/config.json").code == 1);
}

TEST_CASE("blow-up and contraction failures have their own exit codes")
{
    json b = run("blow", "solve");
    b["nonlinearity"] = "power(i, 3)";
    b["initial"] = "gaussian(3, 0.6, 0, 2)";
    b["solver"]["T"] = 5.0;
    b["solver"]["blowup_threshold"] = 50.0;
    CHECK(cli("run -q \"" + write_config("blow", b).string() + "\"").code == 3);
    b["expect_blowup"] = true;
    CHECK(cli("run -q \"" + write_config("blow", b).string() + "\"").code == 0);

    json c = run("stiff", "solve");
    c["nonlinearity"] = "power(-1, 3)";
    c["initial"] = "gaussian(3, 0.6, 0, 8)";
    c["solver"]["window_T0"] = 0.25;
    c["solver"]["min_window"] = 0.25;
    c["solver"]["T"] = 0.5;
    c["solver"]["output_dt"] = 0.25;
    CHECK(cli("run -q \"" + write_config("stiff", c).string() + "\"").code == 4);
}

TEST_CASE("convergence on the free cubic defocusing benchmark")
{
    json j = run("conv", "convergence");
    j["grid"] = {{"L", 8.0}, {"N", 127}};
    j["nonlinearity"] = "power(1, 3)";
    j["initial"] = "gaussian(4, 0.7, 1, 0.7)";
    j["solver"] = {{"T", 0.4}, {"window_T0", 0.04}, {"output_dt", 0.04}, {"quad_nodes", 17}};
    j["convergence"] = {{"levels", 3}, {"oracle", false}};
    const auto r = cli("run -j 2 \"" + write_config("conv", j).string() + "\"");
    REQUIRE(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s["min_order"]["residual_mass"].get<double>() >= 1.9);
    CHECK(s["min_order"]["residual_energy"].get<double>() >= 1.9);
    CHECK(fs::exists(workdir() / "conv_convergence.csv"));
}

TEST_CASE("hypotheses report sign condition for real and imaginary coupling")
{
    json j = run("hyp", "hypotheses");
    j["hypotheses"] = {{"samples", 10}, {"calibration_samples", 10}};
    j["nonlinearity"] = "power(-2, 3)";
    const auto a = cli("run \"" + write_config("hyp", j).string() + "\"");
    CHECK(a.code == 0);
    CHECK(json::parse(a.out)["nonlinearity_report"]["sign_condition"]["pass"] == true);
    j["nonlinearity"] = "power(i, 3)";
    const auto b = cli("run \"" + write_config("hyp", j).string() + "\"");
    CHECK(json::parse(b.out)["nonlinearity_report"]["sign_condition"]["pass"] == false);
}

TEST_CASE("output directory override, thread variable and determinism")
{
    json a = run("a", "solve"), b = run("b", "dependence");
    for (json* j : {&a, &b}) {
        (*j)["nonlinearity"] = "power(-1, 3)";
        (*j)["initial"] = "gaussian(3, 0.6, 1, 0.5)";
    }
    b["dependence"] = {{"eps", {0.01, 0.001}}, {"eta", "gaussian(3, 0.6, 0)"}};
    a.erase("schema_version");
    b.erase("schema_version");
    const auto cfg = write_config("batch", json{{"schema_version", 1}, {"batch", {a, b}}});
    const fs::path d1 = workdir() / "o1", d2 = workdir() / "o2";
    CHECK(cli("run -q -o \"" + d1.string() + "\" \"" + cfg.string() + "\"", "HALFLINE_NLS_THREADS=1").code == 0);
    CHECK(cli("run -q -o \"" + d2.string() + "\" \"" + cfg.string() + "\"", "HALFLINE_NLS_THREADS=4").code == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(d1)) {
        ++files;
        CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
    }
    CHECK(files == 4);
}
