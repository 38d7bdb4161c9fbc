#include "doctest.h"

#include "mfglab/array2d.hpp"
#include "mfglab/io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace mfg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const char* tag) {
    auto d = fs::temp_directory_path() / (std::string("mfglab_io_") + tag);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("hash matches the published test vectors") {
    CHECK(io::fnv1a64("") == 14695981039346656037ull);
    CHECK(io::fnv1a64("a") == 12638187200555641996ull);
    CHECK(io::fnv1a64("foobar") == 9625390261332436968ull);
    CHECK(io::fnv1a64("hello world") == 8618312879776256743ull);
    CHECK(io::hash_hex("") == "cbf29ce484222325");
    CHECK(io::hash_hex("a").size() == 16);
}

TEST_CASE("doubles format shortest and parse back exactly") {
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(-2.0) == "-2");

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::vector<double> samples = {0.1, 1.0 / 3.0, 1e-17, -2.5e300, 0.0, 6.02e23};
    for (int i = 0; i < 200; ++i) samples.push_back(u(rng));
    for (double v : samples) {
        const std::string s = io::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("csv quoting and row serialization") {
    CHECK(io::csv_escape("abc") == "abc");
    CHECK(io::csv_escape("x,y") == "\"x,y\"");
    CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_escape("a\nb") == "\"a\nb\"");

    io::Csv csv;
    csv.header = {"a", "b"};
    csv.add_row({"1", "x,y"});
    CHECK(csv.serialize() == "a,b\r\n1,\"x,y\"\r\n");

    io::Csv bare;
    bare.add_row({"q"});
    CHECK(bare.serialize() == "q\r\n");
}

TEST_CASE("atomic writes create parents, overwrite and leave no droppings") {
    const auto dir = fresh_dir("atomic");
    const auto target = dir / "deep" / "nest" / "f.txt";
    io::write_file_atomic(target, "first");
    CHECK(slurp(target) == "first");
    io::write_file_atomic(target, "second");
    CHECK(slurp(target) == "second");

    std::size_t stray = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "f.txt") ++stray;
    CHECK(stray == 0);
    fs::remove_all(dir);
}

TEST_CASE("manifest body: sorted keys, escaping, faithful values") {
    io::RunManifest meta;
    meta.tool_version = "mfglab 0.1.0";
    meta.config_path = "runs/a.toml";
    meta.config_echo = "line1\nkey = \"v\"\n";
    meta.seed = 42;
    meta.wall_seconds = 0.125;
    meta.checks = {{"mass", true}, {"positivity", false}};
    std::vector<io::FileRecord> files = {{"b.csv", io::hash_hex("xy"), 2}};

    const std::string body = io::manifest_json(meta, files);
    const char* keys[] = {"\"checks\"",  "\"config_echo\"",  "\"config_path\"",
                          "\"files\"",   "\"seed\"",         "\"tool_version\"",
                          "\"wall_seconds\""};
    std::size_t prev = 0;
    for (const char* k : keys) {
        const auto pos = body.find(k);
        REQUIRE(pos != std::string::npos);
        CHECK(pos > prev);
        prev = pos;
    }

    const auto j = nlohmann::json::parse(body);
    CHECK(j["config_echo"].get<std::string>() == meta.config_echo);
    CHECK(j["seed"].get<std::uint64_t>() == 42);
    CHECK(j["wall_seconds"].get<double>() == 0.125);
    CHECK(j["checks"][0]["name"] == "mass");
    CHECK(j["checks"][1]["pass"] == false);
    CHECK(j["files"][0]["name"] == "b.csv");
    CHECK(j["files"][0]["bytes"] == 2);
    CHECK(j["files"][0]["fnv1a64"].get<std::string>() == io::hash_hex("xy"));
    CHECK(body.back() == '\n');
}

TEST_CASE("emitter records every artifact and the manifest excludes itself") {
    const auto dir = fresh_dir("emit");
    io::Emitter em(dir);
    em.emit("table.csv", "a,b\r\n");
    em.emit("data.json", "{}\n");
    REQUIRE(em.files().size() == 2);
    CHECK(em.files()[0].name == "table.csv");
    CHECK(em.files()[0].bytes == 5);
    CHECK(em.files()[0].hash == io::hash_hex("a,b\r\n"));

    io::RunManifest meta;
    meta.tool_version = "mfglab 0.1.0";
    em.write_manifest(meta);

    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    REQUIRE(j["files"].size() == 2);
    for (const auto& f : j["files"]) {
        CHECK(f["name"] != "manifest.json");
        const std::string body = slurp(dir / f["name"].get<std::string>());
        CHECK(io::hash_hex(body) == f["fnv1a64"].get<std::string>());
        CHECK(body.size() == f["bytes"].get<std::uint64_t>());
    }
    fs::remove_all(dir);
}

TEST_CASE("svg output is self-contained") {
    const std::vector<double> xs = {0.0, 0.5, 1.0};
    const std::vector<io::LineSeries> series = {{"mean", {1.0, 2.0, 3.0}},
                                                {"sup", {3.0, 2.5, 2.0}}};
    const std::string chart = io::svg_line_chart(xs, series, "growth", "t", "value");
    CHECK(chart.find("<svg") != std::string::npos);
    CHECK(chart.find("</svg>") != std::string::npos);
    CHECK(chart.find("growth") != std::string::npos);
    CHECK(chart.find("href") == std::string::npos);

    Array2d cells(2, 3, 0.0);
    cells(0, 0) = -1.0;
    cells(1, 2) = 1.0;
    const std::string map =
        io::svg_cell_map(cells, {}, "counts", "mean", "horizon", -3.0, 3.0, 0.1, 1.0);
    CHECK(map.find("<svg") != std::string::npos);
    CHECK(map.find("href") == std::string::npos);

    const std::string lo = io::ramp_color(0.0, 0.0, 1.0);
    const std::string hi = io::ramp_color(1.0, 0.0, 1.0);
    CHECK(lo.size() == 7);
    CHECK(lo[0] == '#');
    CHECK(lo != hi);
}
