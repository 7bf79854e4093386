#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include <sys/wait.h>

#include <fuzzmat/fuzzmat.hpp>

#include "helpers.hpp"

#ifndef FUZZMAT_BIN
#error "FUZZMAT_BIN must point at the CLI binary"
#endif

namespace {

struct CliResult {
    int exitCode = -1;
    std::string output;  // stdout only
};

CliResult run_cli(const std::string& args, const std::string& envPrefix = "") {
    const std::string cmd = envPrefix + std::string(FUZZMAT_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string example_path(const testutil::TempDir& tmp) {
    const auto p = tmp.path("tex.pgm").string();
    fuzzmat::save_pgm(testutil::example_texture(), p);
    return p;
}

}  // namespace

TEST_CASE("help exits 0, unknown flags and values exit 2") {
    CHECK(run_cli("--help").exitCode == 0);
    CHECK(run_cli("matrix --help").exitCode == 0);
    CHECK(run_cli("bogus-subcommand").exitCode == 2);

    testutil::TempDir tmp;
    const auto tex = example_path(tmp);
    CHECK(run_cli("matrix --kind bogus " + tex).exitCode == 2);
    CHECK(run_cli("matrix --wat 1 " + tex).exitCode == 2);
    CHECK(run_cli("matrix --kind szm --conn 5 " + tex).exitCode == 2);
}

TEST_CASE("runtime failures exit 1") {
    CHECK(run_cli("info /definitely/not/there.pgm").exitCode == 1);
    testutil::TempDir tmp;
    const auto bad = tmp.writeText("bad.pgm", "P2\n2 2\n3\n0 1 2 9\n");
    CHECK(run_cli("info " + bad).exitCode == 1);
}

TEST_CASE("matrix szm emits the worked example as CSV") {
    testutil::TempDir tmp;
    const auto tex = example_path(tmp);
    const CliResult res = run_cli("matrix --kind szm --conn 8 " + tex);
    REQUIRE(res.exitCode == 0);
    const std::string expected =
        "g,0,1,2,3\n"
        "0,0,0,0,0\n"
        "1,0,2,1,0\n"
        "2,0,1,0,1\n"
        "3,0,0,0,1\n"
        "4,0,2,0,1\n";
    CHECK(res.output == expected);
}

TEST_CASE("every matrix kind is reachable from the flag grammar") {
    testutil::TempDir tmp;
    const auto tex = example_path(tmp);
    const std::vector<std::string> invocations{
        "matrix --kind com --offset 0,1 " + tex,
        "matrix --kind comavg " + tex,
        "matrix --kind dh --offset 0,1 " + tex,
        "matrix --kind sh --offset 0,1 " + tex,
        "matrix --kind rlm --dir 0 " + tex,
        "matrix --kind szm --conn 8 " + tex,
        "matrix --kind mszm --quants 2,4 --weights 0.5,0.5 " + tex,
        "matrix --kind fcom --offset 0,1 --beta linear --radius 2 " + tex,
        "matrix --kind frlm --dir 0 --beta linear --radius 2 " + tex,
        "matrix --kind fszm --conn 8 --beta linear --radius 2 " + tex,
        "matrix --kind fuzzyrlm --dir 0 --beta linear --radius 2 --agg mean " + tex,
        "matrix --kind fuzzyszm --conn 8 --beta linear --radius 2 --agg mean " + tex,
        "matrix --kind multifuzzyszm --conn 8 --beta linear --multi 0,2 --agg mean " + tex,
    };
    for (const auto& inv : invocations) {
        const CliResult res = run_cli(inv);
        INFO(inv);
        CHECK(res.exitCode == 0);
        CHECK(res.output.rfind("g,", 0) == 0);
    }
}

TEST_CASE("info, flatzones and quantize subcommands") {
    testutil::TempDir tmp;
    const auto tex = example_path(tmp);

    const CliResult info = run_cli("info " + tex);
    REQUIRE(info.exitCode == 0);
    CHECK(info.output.find("width: 4") != std::string::npos);
    CHECK(info.output.find("levels: 5") != std::string::npos);

    const CliResult zones = run_cli("flatzones --conn 8 " + tex);
    REQUIRE(zones.exitCode == 0);
    CHECK(zones.output.rfind("gray,size,row,col\n1,2,0,0\n", 0) == 0);
    CHECK(std::count(zones.output.begin(), zones.output.end(), '\n') == 10);  // header + 9 zones

    const CliResult q = run_cli("quantize --quant linear:2 " + tex);
    REQUIRE(q.exitCode == 0);
    CHECK(q.output.rfind("P2\n4 4\n1\n", 0) == 0);

    const auto outPath = tmp.path("q.pgm").string();
    REQUIRE(run_cli("quantize --quant kmeans:2 --out " + outPath + " " + tex).exitCode == 0);
    CHECK(fuzzmat::load_pgm(outPath).levels() == 2);
}

TEST_CASE("features subcommand emits one CSV row per image") {
    testutil::TempDir tmp;
    const auto tex = example_path(tmp);
    const CliResult res = run_cli("features --kind szm --conn 8 " + tex + " " + tex);
    REQUIRE(res.exitCode == 0);
    CHECK(res.output.find("szm-c8.SZE") != std::string::npos);
    CHECK(std::count(res.output.begin(), res.output.end(), '\n') == 3);  // header + 2 rows
}

TEST_CASE("mask flag restricts descriptors") {
    testutil::TempDir tmp;
    const auto tex = example_path(tmp);
    std::vector<int> maskPx(16, 0);
    for (int r = 0; r < 4; ++r) maskPx[r * 4] = 1;  // first column only
    const auto maskPath = tmp.path("mask.pgm").string();
    fuzzmat::save_pgm(fuzzmat::GrayImage(4, 4, 2, maskPx), maskPath);
    const CliResult res = run_cli("info --mask " + maskPath + " " + tex);
    REQUIRE(res.exitCode == 0);
    CHECK(res.output.find("inside pixels: 4") != std::string::npos);
}

TEST_CASE("extract and evaluate run on a small manifest") {
    testutil::TempDir tmp;
    // two texture classes: vertical stripes vs constant blocks, 3 images each
    std::string manifest = "path,label,group\n";
    std::mt19937_64 rng(3);
    for (int i = 0; i < 6; ++i) {
        const bool striped = i % 2 == 0;
        std::vector<int> px(36);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c)
                px[r * 6 + c] = striped ? (c % 2) * 3 + static_cast<int>(rng() % 2)
                                        : 2 + static_cast<int>(rng() % 2);
        const std::string name = "img" + std::to_string(i) + ".pgm";
        fuzzmat::save_pgm(fuzzmat::GrayImage(6, 6, 8, px), tmp.path(name).string());
        manifest += name + "," + (striped ? "striped" : "flat") + ",g" + std::to_string(i) + "\n";
    }
    const auto manifestPath = tmp.writeText("data.csv", manifest);

    const CliResult ext =
        run_cli("extract --pipeline \"kind=szm conn=8\" " + manifestPath);
    REQUIRE(ext.exitCode == 0);
    CHECK(ext.output.rfind("path,label,group,szm-c8.SZE", 0) == 0);
    CHECK(std::count(ext.output.begin(), ext.output.end(), '\n') == 7);

    const CliResult ev = run_cli(
        "evaluate --pipeline \"kind=szm conn=8\" --classifier centroid --scheme logo " +
        manifestPath);
    REQUIRE(ev.exitCode == 0);
    CHECK(ev.output.find("overall accuracy") != std::string::npos);

    const CliResult js = run_cli(
        "evaluate --pipeline \"kind=szm conn=8\" --classifier centroid --scheme kfold:3 "
        "--json " + manifestPath);
    REQUIRE(js.exitCode == 0);
    const auto parsed = nlohmann::json::parse(js.output);
    CHECK(parsed.contains("cellLevel"));
    CHECK(parsed.contains("imageLevel"));
    CHECK(parsed["folds"] == 3);

    // byte-identical reruns with the same seed, regardless of the worker cap
    const std::string evalCmd =
        "evaluate --pipeline \"kind=szm conn=8\" --epochs 40 --seed 5 --scheme kfold:2 " +
        manifestPath;
    const CliResult a = run_cli(evalCmd);
    const CliResult b = run_cli(evalCmd);
    REQUIRE(a.exitCode == 0);
    CHECK(a.output == b.output);
    const CliResult serial = run_cli(evalCmd, "FUZZMAT_THREADS=1 ");
    CHECK(serial.output == a.output);
}

TEST_CASE("bench reports the crisp-to-fuzzy timing ratio") {
    const CliResult res = run_cli("bench --size 48 --levels 8 --radius 2 --seed 1");
    REQUIRE(res.exitCode == 0);
    CHECK(res.output.find("szm:") != std::string::npos);
    CHECK(res.output.find("ratio:") != std::string::npos);
}
