#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const auto scratch = fs::temp_directory_path() / "mfglab_cli_streams";
    fs::create_directories(scratch);
    const auto out = scratch / ("out" + std::to_string(counter));
    const auto err = scratch / ("err" + std::to_string(counter));
    ++counter;

    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string(MFGLAB_BIN) + " " + args + " > " + out.string() + " 2> " +
           err.string();
    const int raw = std::system(cmd.c_str());
    CmdResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path workspace(const char* name) {
    const auto d = fs::temp_directory_path() / (std::string("mfglab_cli_") + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const char* name, const std::string& body) {
    const auto p = dir / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
}

std::string bundled(const char* name) {
    return (fs::path(MFGLAB_CONFIG_DIR) / name).string();
}

const std::string kMcConfig = R"(kind = "mc-verify"
seed = 3

[problem]
hamiltonian = "bangbang"
a = -1.0
b = 1.0
sigma = 1.0
init = "gaussian"
init_mean = 0.2
init_variance = 0.25
horizon = 1.0

[numerics]
n_x = 64
n_t = 32

[mc]
n_paths = 4000
n_steps = 64
n_checkpoints = 5
control = 0.7
)";

} // namespace

TEST_CASE("version and argument errors") {
    CHECK(run_cli("--version").status == 0);
    CHECK(run_cli("--version").out.find("mfglab 0.1.0") != std::string::npos);

    const auto bare = run_cli("");
    CHECK(bare.status == 2);
    CHECK(!bare.err.empty());

    CHECK(run_cli("run /no/such/config.toml").status == 2);
    CHECK(run_cli("run /no/such/config.toml").err.find("cannot open") !=
          std::string::npos);

    const auto bad_range = run_cli("regime-diagram --t-range nope");
    CHECK(bad_range.status == 2);
    CHECK(bad_range.err.find("A:B:N") != std::string::npos);
}

TEST_CASE("bundled three-solution catalog run") {
    const auto ws = workspace("three");
    const std::string cfg = bundled("three_solutions.toml");
    const auto res = run_cli("run " + cfg + " --out " + (ws / "run").string());
    CHECK(res.status == 0);
    CHECK(res.out.find("[FAIL]") == std::string::npos);
    CHECK(res.out.find("catalog_nonempty") != std::string::npos);

    const auto cat = json::parse(slurp(ws / "run" / "catalog.json"));
    CHECK(cat["count"] == 3);
    std::set<std::string> labels;
    for (const auto& e : cat["entries"]) {
        labels.insert(e["label"].get<std::string>());
        CHECK(e["residual"].get<double>() <= 1e-3);
    }
    CHECK(labels.count("plus") == 1);
    CHECK(labels.count("minus") == 1);

    // manifest: complete, hash-faithful, echoes the raw config
    const auto man = json::parse(slurp(ws / "run" / "manifest.json"));
    CHECK(man["config_echo"].get<std::string>() == slurp(cfg));
    CHECK(man["seed"] == 1);
    CHECK(man["tool_version"] == "mfglab 0.1.0");

    std::set<std::string> listed, present;
    for (const auto& f : man["files"]) {
        const std::string name = f["name"].get<std::string>();
        listed.insert(name);
        const std::string body = slurp(ws / "run" / name);
        CHECK(body.size() == f["bytes"].get<std::uint64_t>());
    }
    for (const auto& e : fs::directory_iterator(ws / "run"))
        if (e.path().filename() != "manifest.json")
            present.insert(e.path().filename().string());
    CHECK(listed == present);
    CHECK(present.count("means.csv") == 1);
    CHECK(present.count("terminal_density.csv") == 1);
    CHECK(present.count("means.svg") == 1);
}

TEST_CASE("bundled unique-regime run") {
    const auto ws = workspace("unique");
    const auto res = run_cli("run " + bundled("unique_regime.toml") + " --out " +
                             (ws / "run").string() + " --quiet");
    CHECK(res.status == 0);
    CHECK(res.out.empty());
    const auto cat = json::parse(slurp(ws / "run" / "catalog.json"));
    CHECK(cat["count"] == 1);
}

TEST_CASE("config diagnostics carry file and line") {
    const auto ws = workspace("diag");

    const auto broken = write_config(ws, "broken.toml",
                                     "kind = \"branches\"\nseed = 1\nthis is not toml\n");
    const auto r1 = run_cli("run " + broken.string());
    CHECK(r1.status == 2);
    CHECK(r1.err.find(broken.string() + ":3:") != std::string::npos);

    const auto unknown = write_config(ws, "unknown.toml", R"(kind = "branches"

[numerics]
n_y = 3
)");
    const auto r2 = run_cli("run " + unknown.string());
    CHECK(r2.status == 2);
    CHECK(r2.err.find(":4:") != std::string::npos);
    CHECK(r2.err.find("unknown key 'numerics.n_y'") != std::string::npos);

    const auto foreign = write_config(ws, "foreign.toml", R"(kind = "branches"

[mc]
n_paths = 10
)");
    const auto r3 = run_cli("run " + foreign.string());
    CHECK(r3.status == 2);
    CHECK(r3.err.find("does not apply to kind 'branches'") != std::string::npos);

    const auto badval = write_config(ws, "badval.toml", R"(kind = "branches"

[problem]
sigma = -1.0
)");
    const auto r4 = run_cli("run " + badval.string());
    CHECK(r4.status == 2);
    CHECK(r4.err.find("problem.sigma must be positive") != std::string::npos);
}

TEST_CASE("failed asserts exit 1 and are named in the summary") {
    const auto ws = workspace("assert");
    const auto cfg = write_config(ws, "wrong.toml", R"(kind = "branches"
seed = 1

[problem]
hamiltonian = "bangbang"
a = -1.0
b = 1.0
sigma = 1.0
alpha = 0.0
beta = -1.0
init = "gaussian"
horizon = 1.0

[numerics]
n_x = 64
n_t = 64

[assert]
catalog_size = 2
)");
    const auto res = run_cli("run " + cfg.string() + " --out " + (ws / "w").string());
    CHECK(res.status == 1);
    CHECK(res.out.find("[FAIL] assert catalog_size == 2") != std::string::npos);
}

TEST_CASE("reruns are byte-identical apart from the manifest clock") {
    const auto ws = workspace("repro");
    const auto cfg = write_config(ws, "mc.toml", kMcConfig);
    const auto a = ws / "a";
    const auto b = ws / "b";
    CHECK(run_cli("run " + cfg.string() + " --out " + a.string() + " --quiet").status ==
          0);
    CHECK(run_cli("run " + cfg.string() + " --out " + b.string() + " --quiet").status ==
          0);

    for (const char* name : {"moments.csv", "mc.json", "moments.svg"})
        CHECK(slurp(a / name) == slurp(b / name));

    auto ja = json::parse(slurp(a / "manifest.json"));
    auto jb = json::parse(slurp(b / "manifest.json"));
    CHECK(ja["wall_seconds"].is_number());
    ja.erase("wall_seconds");
    jb.erase("wall_seconds");
    CHECK(ja == jb);
}

TEST_CASE("seed override flows into the sampler and the record") {
    const auto ws = workspace("seed");
    const auto cfg = write_config(ws, "mc.toml", kMcConfig);
    const auto five = ws / "five", again = ws / "again", six = ws / "six";
    for (const auto& [dir, seed] :
         {std::pair{five, "5"}, std::pair{again, "5"}, std::pair{six, "6"}})
        CHECK(run_cli("run " + cfg.string() + " --seed " + seed + " --out " +
                      dir.string() + " --quiet")
                  .status == 0);

    CHECK(slurp(five / "mc.json") == slurp(again / "mc.json"));
    CHECK(slurp(five / "mc.json") != slurp(six / "mc.json"));

    const auto j5 = json::parse(slurp(five / "mc.json"));
    CHECK(j5["seed"] == 5);
    const auto j6 = json::parse(slurp(six / "mc.json"));
    const double m5 = j5["checkpoints"].back()["mc_mean"].get<double>();
    const double m6 = j6["checkpoints"].back()["mc_mean"].get<double>();
    CHECK(m5 != m6);
}

TEST_CASE("thread cap does not change the artifacts") {
    const auto ws = workspace("threads");
    const auto cfg = write_config(ws, "mc.toml", kMcConfig);
    const auto wide = ws / "wide", narrow = ws / "narrow";
    CHECK(run_cli("run " + cfg.string() + " --out " + wide.string() + " --quiet")
              .status == 0);
    CHECK(run_cli("run " + cfg.string() + " --out " + narrow.string() + " --quiet",
                  "MFGLAB_THREADS=1")
              .status == 0);
    CHECK(slurp(wide / "mc.json") == slurp(narrow / "mc.json"));
    CHECK(slurp(wide / "moments.csv") == slurp(narrow / "moments.csv"));
}

TEST_CASE("regime diagram over a short horizon is flat and symmetric") {
    const auto ws = workspace("diagram");
    const auto res = run_cli("regime-diagram --c0 1 --t-range 0.1:0.1:1 "
                             "--mean-range -3:3:7 --out " +
                             (ws / "d").string() + " --quiet");
    CHECK(res.status == 0);

    const std::string csv = slurp(ws / "d" / "diagram.csv");
    std::vector<std::vector<std::string>> rows;
    std::size_t start = 0;
    while (start < csv.size()) {
        const auto end = csv.find("\r\n", start);
        if (end == std::string::npos) break;
        const std::string line = csv.substr(start, end - start);
        start = end + 2;
        std::vector<std::string> cols;
        std::size_t p = 0;
        while (true) {
            const auto c = line.find(',', p);
            cols.push_back(line.substr(p, c == std::string::npos ? c : c - p));
            if (c == std::string::npos) break;
            p = c + 1;
        }
        rows.push_back(cols);
    }
    REQUIRE(rows.size() == 8); // header + 7 means
    CHECK(rows[0] == std::vector<std::string>{"horizon", "mean_init", "root_count"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] == "1");
    for (std::size_t i = 1; i <= 3; ++i) CHECK(rows[i][2] == rows[8 - i][2]);

    CHECK(fs::exists(ws / "d" / "diagram.svg"));
}

TEST_CASE("monotonicity certificates from the command line") {
    const auto ws = workspace("mono");
    const auto good = run_cli("certify monotone --alpha 1 --beta 0.5 --out " +
                              (ws / "g").string() + " --quiet");
    CHECK(good.status == 0);
    const auto jg = json::parse(slurp(ws / "g" / "certificate.json"));
    CHECK(jg["sampled_verdict"] == "MonotonePass");
    CHECK(jg["regime_verdict"] == "ProvablyUnique");
    CHECK(jg["min_f_form"].get<double>() > 0.0);
    CHECK(jg["closed_form_max_gap"].get<double>() <= 1e-9);
    CHECK(fs::exists(ws / "g" / "pairs.csv"));

    const auto bad = run_cli("certify monotone --alpha -1 --beta -1 --out " +
                             (ws / "b").string() + " --quiet");
    CHECK(bad.status == 0);
    const auto jb = json::parse(slurp(ws / "b" / "certificate.json"));
    CHECK(jb["sampled_verdict"] == "MonotoneFail");
    CHECK(jb["regime_verdict"] == "ProvablyMultiple");
}

TEST_CASE("threshold certificate from the command line") {
    const auto ws = workspace("thresh");
    const auto res =
        run_cli("certify threshold --out " + (ws / "t").string() + " --quiet");
    CHECK(res.status == 0);
    const auto j = json::parse(slurp(ws / "t" / "certificate.json"));
    CHECK(std::abs(j["T_bar"].get<double>() - 0.06865173047109313) <= 1e-9);
    CHECK(j["exceeds_scan"] == false);
    CHECK(!j["discrepancy_note"].get<std::string>().empty());
    CHECK(j.contains("lg_zero_quadratic") == false);

    const auto zero = run_cli("certify threshold --lg 0 --out " + (ws / "z").string() +
                              " --quiet");
    CHECK(zero.status == 0);
    const auto jz = json::parse(slurp(ws / "z" / "certificate.json"));
    const double quad = jz["lg_zero_quadratic"].get<double>();
    const double imp = jz["lg_zero_improved"].get<double>();
    CHECK(quad > 0.0);
    CHECK(imp >= quad);
}

TEST_CASE("density-bound certificate with a bent drift") {
    const auto ws = workspace("bound");
    const auto res = run_cli("certify density-bound --drift sin --bound 1 --sigma 1 "
                             "--t 0.25 --out " +
                             (ws / "d").string() + " --quiet");
    CHECK(res.status == 0);
    const auto j = json::parse(slurp(ws / "d" / "certificate.json"));
    CHECK(j["pass"] == true);
    CHECK(std::abs(j["c_hat"].get<double>() - 7.2709108819302495) <= 1e-12);
    CHECK(j["ratio"].get<double>() <= 1.05);
}

TEST_CASE("two-population runs demand the right kind and deliver both branches") {
    const auto ws = workspace("twopop");
    const auto wrong = run_cli("twopop " + bundled("three_solutions.toml"));
    CHECK(wrong.status == 2);
    CHECK(wrong.err.find("kind = \"twopop\"") != std::string::npos);

    const auto cfg = write_config(ws, "two.toml", R"(kind = "twopop"
seed = 1

[problem]
sigma = 1.0
init = "gaussian"
init_mean = 0.0
init_variance = 0.25
horizon = 1.0

[numerics]
n_x = 96
n_t = 96

[twopop]
alpha1 = -1.0
beta1 = -1.0
gamma1 = -1.0
delta1 = -1.0
alpha2 = -1.0
beta2 = -1.0
gamma2 = -1.0
delta2 = -1.0

[assert]
catalog_size = 2
max_residual = 1e-3
verdict = "ProvablyMultiple"
)");
    const auto res =
        run_cli("twopop " + cfg.string() + " --out " + (ws / "w").string());
    CHECK(res.status == 0);
    CHECK(res.out.find("[FAIL]") == std::string::npos);

    const auto j = json::parse(slurp(ws / "w" / "twopop.json"));
    CHECK(j["matrix"]["verdict"] == "ProvablyMultiple");
    REQUIRE(j["branches"].size() == 2);
    CHECK(j["branches"][0]["label"] == "plus/plus");
    CHECK(std::abs(j["branches"][0]["mean1_terminal"].get<double>() - 1.0) <= 0.02);
    CHECK(std::abs(j["branches"][1]["mean2_terminal"].get<double>() + 1.0) <= 0.02);
    CHECK(j["diagnostics"].empty());
}
