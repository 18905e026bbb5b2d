#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "gec/cli/commands.hpp"

using namespace gec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

fs::path scratch(const std::string& name) {
    static const fs::path root = fs::temp_directory_path() / ("gec_cli_test_" + std::to_string(::getpid()));
    const auto p = root / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// plain split; the numeric tables never quote
Table read_csv(const fs::path& p) {
    Table t;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        t.push_back(row);
    }
    return t;
}

std::size_t column(const Table& t, const std::string& name) {
    const auto& h = t.front();
    const auto it = std::find(h.begin(), h.end(), name);
    REQUIRE(it != h.end());
    return static_cast<std::size_t>(it - h.begin());
}

cli::ExperimentConfig parse(const std::string& text) {
    return cli::parse_experiment(io::KeyValueConfig::parse_string(text));
}

io::RunManifest run_in(const std::string& text, const fs::path& out, std::size_t workers = 0) {
    auto x = parse(text);
    x.out = out.string();
    if (workers) x.workers = workers;
    return cli::run_experiment(x);
}

nlohmann::json manifest_of(const fs::path& out) { return nlohmann::json::parse(slurp(out / io::kManifestName)); }

// every file in the directory is listed in the manifest and vice versa
void check_manifest_complete(const fs::path& out) {
    const auto m = manifest_of(out);
    std::set<std::string> listed;
    for (const auto& f : m["outputs"]) listed.insert(f.get<std::string>());
    std::set<std::string> present;
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().filename() != io::kManifestName) present.insert(e.path().filename().string());
    CHECK(listed == present);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m["version"] == kVersion);
    CHECK_FALSE(m["stages"].empty());
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto dir = scratch("cfg_" + name);
    fs::create_directories(dir);
    const auto p = dir / (name + ".ini");
    std::ofstream(p) << text;
    return p;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(GEC_RUN_PATH) + " " + args + " -q >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

const char* kRpmAnalytic = R"(
[experiment]
kind = analytic-sweep
[model]
name = rpm
[grid]
values = 0.5, 1.5
sizes = 256, inf
)";

const char* kRpmEd = R"(
[experiment]
kind = ed-distribution
seed = 42
[model]
name = rpm
[grid]
values = 0.5, 1.5
sizes = 64
[ensemble]
realizations = 40
bins = 16
raw_max = 500
)";

const char* kTlgSweep14 = R"(
[experiment]
kind = tlg-sweep
[model]
name = tlg
L = 14
N = 7
[grid]
values = 0.2, 1.0, 3.0
[tlg]
partner_offset = 0
ed_check_max_L = 14
)";

}  // namespace

// ---------------------------------------------------------------- config

TEST_CASE("config: malformed and unknown input is rejected", "[cli][config]") {
    const std::string head = "[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\n[grid]\nvalues = 1\n";
    CHECK_NOTHROW(parse(head));
    CHECK_THROWS_WITH(parse(head + "colour = red\n"), ContainsSubstring("unknown key [grid] colour"));
    CHECK_THROWS_WITH(parse(head + "[ensemble]\nrealizations = 5\n"), ContainsSubstring("unknown key [ensemble]"));
    CHECK_THROWS_WITH(parse("kind = analytic-sweep\n" + head), ContainsSubstring("outside any [section]"));
    CHECK_THROWS_AS(parse("[model]\nname = rpm\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\nkind = fit\n[model]\nname = rpm\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\ngamma = abc\n[grid]\nvalues = 1\n"),
                    ConfigError);
    CHECK_THROWS_WITH(parse(head + "start = 0\nstop = 1\nstep = 0.5\n"), ContainsSubstring("not both"));
    CHECK_THROWS_WITH(parse("[experiment]\nkind = analytic-sweep\n[model]\nname = goe\n"),
                      ContainsSubstring("rpm or qsm"));
    CHECK_THROWS_WITH(parse("[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\n"),
                      ContainsSubstring("nonempty"));
    CHECK_THROWS_AS(parse("[experiment]\nkind = ed-distribution\n[model]\nname = rpm\n[grid]\nsizes = inf\n"),
                    ConfigError);
    CHECK_THROWS_WITH(parse("[experiment]\nkind = tlg-sweep\n[model]\nname = tlg\nbc = open\n[grid]\nvalues = 1\n"),
                      ContainsSubstring("periodic"));
    CHECK_THROWS_AS(parse("[experiment]\nkind = analytic-sweep\nworkers = 0\n[model]\nname = rpm\n[grid]\nvalues = 1\n"),
                    ConfigError);
}

TEST_CASE("config: start/stop/step grid lands on decimal values", "[cli][config]") {
    const auto x = parse("[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\n"
                         "[grid]\nstart = 0.2\nstop = 3.0\nstep = 0.05\nsizes = 256, inf\n");
    REQUIRE(x.grid.size() == 57);
    CHECK(x.grid.front() == 0.2);
    CHECK(x.grid[16] == 1.0);
    CHECK(x.grid.back() == 3.0);
    REQUIRE(x.sizes.size() == 2);
    CHECK(std::isinf(x.sizes[1]));
}

TEST_CASE("config: every shipped config parses", "[cli][config]") {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(GEC_CONFIG_DIR)) {
        if (e.path().extension() != ".ini") continue;
        INFO(e.path().string());
        CHECK_NOTHROW(cli::load_experiment(e.path().string()));
        ++n;
    }
    CHECK(n >= 5);
}

// ---------------------------------------------------------------- analytic sweep

TEST_CASE("analytic-sweep: single grid point gives a single row", "[cli]") {
    const auto out = scratch("single");
    run_in("[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\ndim = 1024\n[grid]\nvalues = 1.25\n", out);
    const auto t = read_csv(out / "analytic_sweep.csv");
    REQUIRE(t.size() == 2);
    CHECK(t[1][column(t, "var")] == io::format_real(rpm_gec_var(SystemSize::finite(1024), 1.25)));
    CHECK(t[1][column(t, "mean")] == io::format_real(rpm_gec_mean(SystemSize::finite(1024), 1.25)));
    check_manifest_complete(out);
}

TEST_CASE("analytic-sweep: limit rows are the step function", "[cli]") {
    const auto out = scratch("limit");
    run_in(kRpmAnalytic, out);
    const auto t = read_csv(out / "analytic_sweep.csv");
    REQUIRE(t.size() == 5);
    const auto s = column(t, "size"), g = column(t, "gamma"), v = column(t, "var");
    for (const auto& r : Table(t.begin() + 1, t.end())) {
        if (r[s] != "inf") continue;
        CHECK(r[v] == (r[g] == "0.5" ? "0" : "2"));
    }
    check_manifest_complete(out);
}

TEST_CASE("analytic-sweep: rpm crossings drift to gamma = 1", "[cli]") {
    const auto out = scratch("rpm_cross");
    run_in("[experiment]\nkind = analytic-sweep\n[model]\nname = rpm\n"
           "[grid]\nstart = 0\nstop = 3\nstep = 0.05\nsizes = 1024, 1073741824, inf\n",
           out);
    const auto t = read_csv(out / "crossings.csv");
    REQUIRE(t.size() == 2);
    CHECK(t[1][column(t, "status")] == "ok");
    CHECK_THAT(std::stod(t[1][column(t, "gamma_star")]), WithinAbs(1.0, 0.01));
}

// ---------------------------------------------------------------- ED distribution

TEST_CASE("ed-distribution: outputs are byte-identical across worker counts", "[cli][determinism]") {
    std::vector<fs::path> outs;
    for (std::size_t w : {1, 3, 8}) {
        outs.push_back(scratch("det_" + std::to_string(w)));
        run_in(kRpmEd, outs.back(), w);
        check_manifest_complete(outs.back());
    }
    const auto again = scratch("det_again");
    run_in(kRpmEd, again, 3);
    outs.push_back(again);
    for (const char* f : {"moments.csv", "gec_values.csv", "histograms.csv", "records.json"}) {
        INFO(f);
        const auto ref = slurp(outs[0] / f);
        CHECK_FALSE(ref.empty());
        for (std::size_t k = 1; k < outs.size(); ++k) CHECK(slurp(outs[k] / f) == ref);
    }
    CHECK(manifest_of(outs[0])["config_hash"] == manifest_of(outs[1])["config_hash"]);
}

TEST_CASE("ed-distribution: moments table and subsampling", "[cli]") {
    const auto out = scratch("rpm_ed");
    run_in(kRpmEd, out);
    const auto m = read_csv(out / "moments.csv");
    REQUIRE(m.size() == 1 + 2 * 2);  // two gammas, two estimators
    CHECK(m[1][column(m, "n_realizations")] == "40");
    CHECK(m[1][column(m, "seed")] == "42");
    const auto raw = read_csv(out / "gec_values.csv");
    CHECK(raw.size() - 1 <= 2 * 500);
    CHECK(raw.size() - 1 >= 2 * 400);
    const auto h = read_csv(out / "histograms.csv");
    CHECK(h.size() == 1 + 2 * 16);
    const auto records = nlohmann::json::parse(slurp(out / "records.json"));
    REQUIRE(records.size() == 4);
    CHECK(records[0]["model"] == "rpm(D=64,gamma=0.5)");
}

TEST_CASE("ed-distribution: rpm ergodic vs fractal histograms", "[cli]") {
    const auto out = scratch("rpm_4096");
    run_in("[experiment]\nkind = ed-distribution\nworkers = 4\n[model]\nname = rpm\n"
           "[grid]\nvalues = 0.25, 1.5\nsizes = 4096\n[ensemble]\nrealizations = 50\nestimator = exact\nraw_max = 0\n",
           out);
    const auto m = read_csv(out / "moments.csv");
    REQUIRE(m.size() == 3);
    const auto v = column(m, "var");
    const double narrow = std::stod(m[1][v]), wide = std::stod(m[2][v]);
    CHECK(narrow < 0.02);
    CHECK(wide > 20.0 * narrow);
    CHECK(read_csv(out / "histograms.csv").size() == 1 + 2 * 64);
    CHECK_FALSE(fs::exists(out / "gec_values.csv"));
    check_manifest_complete(out);
}

TEST_CASE("ed-distribution: qsm histograms are emitted", "[cli]") {
    const auto out = scratch("qsm_ed");
    run_in("[experiment]\nkind = ed-distribution\nworkers = 4\n[model]\nname = qsm\nouter = 10\n"
           "[grid]\nvalues = 0.75, 1.25\n[ensemble]\nrealizations = 5\n",
           out);
    const auto h = read_csv(out / "histograms.csv");
    REQUIRE(h.size() == 1 + 2 * 64);
    const auto c = column(h, "count");
    std::size_t total = 0;
    for (std::size_t r = 1; r < h.size(); ++r) total += std::stoul(h[r][c]);
    CHECK(total == 2 * 5 * (std::size_t{1} << 13));
}

TEST_CASE("ed-distribution: two-state model fills one histogram bin", "[cli]") {
    const SparseHamiltonian h({0.0, 0.0}, {{0, 1, 1.0}});
    const auto g = gec_exact(h);
    CHECK(g.values == std::vector<double>{2.0, 2.0});
    const auto hist = histogram(g.values, cli::ExperimentConfig{}.binning, cli::ExperimentConfig{}.bins);
    CHECK(std::count_if(hist.counts.begin(), hist.counts.end(), [](std::size_t c) { return c > 0; }) == 1);
    CHECK(hist.outside == 0);
}

// ---------------------------------------------------------------- TLG sweep

TEST_CASE("tlg-sweep: rows match the library and ED", "[cli][tlg]") {
    const auto out = scratch("tlg14");
    const auto m = run_in(kTlgSweep14, out);
    const auto t = read_csv(out / "tlg_sweep.csv");
    REQUIRE(t.size() == 4);
    for (std::size_t r = 1; r < t.size(); ++r) {
        const double V = std::stod(t[r][column(t, "V")]);
        CHECK(t[r][column(t, "mean")] == io::format_real(tlg_gec_mean(14, 7, V)));
        CHECK(t[r][column(t, "var")] == io::format_real(tlg_gec_var(14, 7, V)));
    }
    const auto check = read_csv(out / "tlg_ed_check.csv");
    REQUIRE(check.size() == 4);
    for (std::size_t r = 1; r < check.size(); ++r) {
        CHECK(std::stod(check[r][column(check, "rel_dev_mean")]) < 1e-10);
        CHECK(std::stod(check[r][column(check, "rel_dev_var")]) < 1e-10);
    }
    CHECK(m.summary["ed_check_max_rel_dev"].get<double>() < 1e-10);
    check_manifest_complete(out);
}

TEST_CASE("tlg-sweep: crossing against the L - 4 partner", "[cli][tlg]") {
    const auto out = scratch("tlg_cross");
    run_in("[experiment]\nkind = tlg-sweep\n[model]\nname = tlg\n"
           "[grid]\nstart = 0.2\nstop = 3.0\nstep = 0.05\nsizes = 60, 80, 100\n",
           out);
    const auto c = read_csv(out / "crossings.csv");
    REQUIRE(c.size() == 4);
    double prev = 0.0;
    for (std::size_t r = 1; r < c.size(); ++r) {
        CHECK(c[r][column(c, "status")] == "ok");
        const double v = std::stod(c[r][column(c, "V_star")]);
        CHECK(v > 0.6);
        CHECK(v < 1.0);
        CHECK(v > prev);
        prev = v;
    }
    const auto s = nlohmann::json::parse(slurp(out / "tlg_summary.json"));
    CHECK(s.contains("extrapolation"));
    // moments for partners were computed as well
    CHECK(read_csv(out / "tlg_moments.csv").size() == 1 + 6 * 4);
}

// ---------------------------------------------------------------- diagnostics

TEST_CASE("diagnostics: identity observable has no fluctuations", "[cli][diagnostics]") {
    const auto out = scratch("identity");
    run_in("[experiment]\nkind = diagnostics\n[model]\nname = goe\n[grid]\nsizes = 64\n"
           "[diagnostics]\nrealizations = 2\nobservable = identity\n",
           out);
    const auto t = read_csv(out / "eth_fluctuations.csv");
    REQUIRE(t.size() == 3);
    for (std::size_t r = 1; r < t.size(); ++r) {
        CHECK_THAT(std::stod(t[r][column(t, "z_av")]), WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::stod(t[r][column(t, "z_max")]), WithinAbs(0.0, 1e-12));
    }
    check_manifest_complete(out);
}

TEST_CASE("diagnostics: goe gap ratio", "[cli][diagnostics]") {
    const auto out = scratch("goe_r");
    run_in("[experiment]\nkind = diagnostics\nworkers = 4\n[model]\nname = goe\n[grid]\nsizes = 512\n"
           "[diagnostics]\nrealizations = 8\n",
           out);
    const auto t = read_csv(out / "gap_ratio.csv");
    REQUIRE(t.size() == 2);
    CHECK_THAT(std::stod(t[1][column(t, "mean_r")]), WithinAbs(0.5307, 0.01));
    CHECK(t[1][column(t, "n_ratios")] == std::to_string(8 * 510));
}

TEST_CASE("diagnostics: tlg gap ratio drops at strong interaction", "[cli][diagnostics]") {
    const auto out = scratch("tlg_r");
    run_in("[experiment]\nkind = diagnostics\nworkers = 2\n[model]\nname = tlg\nL = 12\nN = 6\nbc = open\n"
           "[grid]\nvalues = 0.2, 3.0\n",
           out);
    const auto t = read_csv(out / "gap_ratio.csv");
    REQUIRE(t.size() == 3);
    const auto r = column(t, "mean_r");
    CHECK(t[1][column(t, "sectors")] == "2");
    CHECK(std::stod(t[1][r]) - std::stod(t[2][r]) > 0.02);
    const auto e = read_csv(out / "eigenstates.csv");
    CHECK(e.size() == 1 + 2 * 924);
    const auto see = column(e, "see_over_page");
    for (std::size_t k = 1; k < e.size(); ++k) {
        const double v = std::stod(e[k][see]);
        CHECK(v >= 0.0);
        CHECK(v < 1.2);
    }
    check_manifest_complete(out);
}

// ---------------------------------------------------------------- graph export

TEST_CASE("graph-export: tlg sector graph", "[cli][graph]") {
    const auto out = scratch("graph");
    run_in("[experiment]\nkind = graph-export\n[model]\nname = tlg\nL = 8\nN = 4\n[export]\nformat = both\n", out);
    CHECK(read_csv(out / "graph_nodes.csv").size() == 2 + 70);  // comment line, header
    CHECK(read_csv(out / "graph_edges.csv").size() > 1);
    CHECK_THAT(slurp(out / "graph.dot"), ContainsSubstring("graph"));
    check_manifest_complete(out);
    CHECK_THROWS_AS(run_in("[experiment]\nkind = graph-export\n[model]\nname = goe\ndim = 12\n", scratch("g12")),
                    ConfigError);
}

// ---------------------------------------------------------------- binary

TEST_CASE("gec_run: exit codes", "[cli][binary]") {
    const auto ok = write_config("ok", kRpmAnalytic);
    const auto ok_out = scratch("bin_ok");
    CHECK(run_binary("--config " + ok.string() + " --out " + ok_out.string()) == 0);
    check_manifest_complete(ok_out);

    const auto bad = write_config("bad", std::string(kRpmAnalytic) + "mystery = 1\n");
    CHECK(run_binary("--config " + bad.string() + " --out " + scratch("bin_bad").string()) == 2);
    CHECK(run_binary("--config /nonexistent/x.ini") == 2);
    CHECK(run_binary("--config " + ok.string() + " --workers 0") == 2);

    const auto cap = write_config("cap", "[experiment]\nkind = graph-export\n[model]\nname = qsm\ngrain = 10\nouter = 17\n");
    CHECK(run_binary("--config " + cap.string() + " --out " + scratch("bin_cap").string()) == 3);

    const auto out = scratch("bin_budget");
    const auto slow = write_config("slow", std::string(kTlgSweep14));
    CHECK(run_binary("--config " + slow.string() + " --budget 1e-9 --out " + out.string()) == 4);
    const auto m = manifest_of(out);
    CHECK(m["status"] == "budget-exceeded");
    CHECK(fs::exists(out / "tlg_sweep.csv"));
    check_manifest_complete(out);
}

TEST_CASE("gec_run: command-line overrides", "[cli][binary]") {
    const auto cfg = write_config("override", kRpmEd);
    const auto a = scratch("ov_a"), b = scratch("ov_b");
    REQUIRE(run_binary("--config " + cfg.string() + " --seed 9 --workers 2 --out " + a.string()) == 0);
    REQUIRE(run_binary("--config " + cfg.string() + " --seed 9 --workers 5 --out " + b.string()) == 0);
    const auto m = manifest_of(a);
    CHECK(m["seed"] == 9);
    CHECK(m["workers"] == 2);
    CHECK(slurp(a / "moments.csv") == slurp(b / "moments.csv"));
    CHECK(m["config_hash"] == manifest_of(b)["config_hash"]);

    const auto c = scratch("ov_c");
    REQUIRE(run_binary("--config " + cfg.string() + " --out " + c.string()) == 0);
    CHECK(slurp(a / "moments.csv") != slurp(c / "moments.csv"));
    CHECK(m["config_hash"] != manifest_of(c)["config_hash"]);
}
