#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(GSWL_ECT_BIN) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("gswl_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("generate, validate and compare") {
    TempDir dir;
    REQUIRE(run("generate --kind grid --nx 4 --ny 3 --out " + (dir / "grid.json")).code == 0);
    REQUIRE(run("generate --kind grid --nx 4 --ny 3 --deform bend --amplitude 0.2 --seed 3 --out " +
                (dir / "bent.json")).code == 0);
    REQUIRE(run("generate --library torus_T2 --embed spectral --out " + (dir / "torus.json")).code == 0);

    const auto v = run("validate " + (dir / "grid.json"));
    CHECK(v.code == 0);
    const auto j = json::parse(v.out);
    CHECK(j["counts"] == json::array({12, 23, 12}));
    CHECK(j["euler_characteristic"] == 1);
    CHECK(json::parse(run("validate " + (dir / "torus.json")).out)["euler_characteristic"] == 0);

    const auto same = run("equiv " + (dir / "grid.json") + " " + (dir / "bent.json") + " --mode swl --depth 4");
    CHECK(same.code == 0);
    CHECK(json::parse(same.out)["equivalent"] == true);
    const auto diff = run("equiv " + (dir / "grid.json") + " " + (dir / "bent.json") + " --mode gswl --depth 0");
    CHECK(diff.code == 1);
    CHECK(json::parse(diff.out)["equivalent"] == false);

    const auto refine = run("refine --mode gswl --depth 2 --phi derived --adjacency full " + (dir / "grid.json"));
    CHECK(refine.code == 0);
    CHECK(json::parse(refine.out)["rounds"].size() == 3);

    CHECK(run("ect " + (dir / "grid.json") + " --directions 8 --thresholds 10 --out " + (dir / "ect.csv")).code == 0);
    std::ifstream csv(dir / "ect.csv");
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line == "direction,threshold,chi");
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 80);

    const auto dist = run("ect-dist " + (dir / "grid.json") + " " + (dir / "bent.json") + " --quad 64");
    CHECK(dist.code == 0);
    CHECK(json::parse(dist.out)["distance"].get<double>() > 0.0);
    const auto zero = run("ect-dist " + (dir / "grid.json") + " " + (dir / "grid.json"));
    CHECK(json::parse(zero.out)["distance"] == 0.0);

    CHECK(run("check-upper " + (dir / "grid.json") + " " + (dir / "grid.json") + " --depth 2 --trials 5 --seed 7")
              .code == 0);
}

TEST_CASE("realize over a family directory") {
    TempDir dir;
    fs::create_directories(dir.path / "family");
    for (int s = 0; s < 3; ++s) {
        REQUIRE(run("generate --kind grid --nx 3 --ny 3 --deform random_smooth --amplitude 0.2 --seed " +
                    std::to_string(s) + " --out " + (dir / ("family/m" + std::to_string(s) + ".json")))
                    .code == 0);
    }
    const auto h = run("realize --family " + (dir / "family") + " --depth 2 --readout histogram");
    CHECK(h.code == 0);
    CHECK(json::parse(h.out)["readouts"].size() == 3);
    const auto e = run("realize --family " + (dir / "family") + " --depth 2 --readout ect --directions 8 --thresholds 10");
    CHECK(e.code == 0);
    const auto j = json::parse(e.out);
    CHECK(j["direct_ect_mismatches"] == 0);
    CHECK(j["readouts"][0].size() == 80);
}

TEST_CASE("run honors the exit-code contract") {
    TempDir dir;
    {
        std::ofstream f(dir / "ok.json");
        f << R"({"scenario": "mantra_suite", "seeds": [0]})";
    }
    const auto ok = run("run " + (dir / "ok.json") + " --out " + (dir / "reports"));
    CHECK(ok.code == 0);
    CHECK(fs::exists(dir.path / "reports" / "mantra_suite.csv"));
    CHECK(fs::exists(dir.path / "reports" / "mantra_suite.json"));
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"scenario": "mantra_suite", "trials": -1})";
    }
    CHECK(run("run " + (dir / "bad.json")).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("validate " + (dir / "missing.json")).code == 2);
    CHECK(run("--version").code == 0);
}

TEST_CASE("quantization digits come from the environment") {
    TempDir dir;
    {
        std::ofstream f(dir / "a.json");
        f << R"({"ambient_dim": 1, "vertices": {"0": [0.0], "1": [1.0]}, "maximal_simplices": [[0, 1]]})";
        std::ofstream g(dir / "b.json");
        g << R"({"ambient_dim": 1, "vertices": {"0": [0.0], "1": [1.004]}, "maximal_simplices": [[0, 1]]})";
    }
    const std::string args = "equiv " + (dir / "a.json") + " " + (dir / "b.json") + " --mode gswl --depth 0";
    CHECK(run(args).code == 1);
    const std::string cmd = "GSWL_QUANT_DIGITS=2 " + std::string(GSWL_ECT_BIN) + " " + args + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
}
