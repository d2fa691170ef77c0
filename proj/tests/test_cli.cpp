#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = GLUCONET_CLI_PATH;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("gluconet_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& rel) const { return (dir / rel).string(); }
};

int run(const std::string& args) {
    const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string read_all(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool identical_trees(const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        if (!fs::exists(other)) return false;
        if (read_all(entry.path()) != read_all(other)) return false;
    }
    return true;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream is(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(is, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("cli: unknown subcommand and bad flags exit with 2") {
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("synth --no-such-flag") == 2);
    CHECK(run("") == 2);
}

TEST_CASE("cli: runtime failures exit with 1") {
    Sandbox sb;
    CHECK(run("decompose " + sb.path("missing.csv") + " -o " + sb.path("out")) == 1);
    CHECK(run("train -o " + sb.path("out")) == 1);  // no input source
}

TEST_CASE("cli: synth twice with the same seed produces identical output files") {
    Sandbox sb;
    REQUIRE(run("synth --seed 7 --days 2 -o " + sb.path("a")) == 0);
    REQUIRE(run("synth --seed 7 --days 2 -o " + sb.path("b")) == 0);
    CHECK(identical_trees(sb.dir / "a", sb.dir / "b"));
    CHECK(fs::exists(sb.dir / "a" / "data.csv"));
    CHECK(fs::exists(sb.dir / "a" / "manifest.txt"));
    const std::string manifest = read_all(sb.dir / "a" / "manifest.txt");
    CHECK(manifest.find("subcommand = synth") != std::string::npos);
    CHECK(manifest.find("seed = 7") != std::string::npos);
    CHECK(manifest.find("config_hash = ") != std::string::npos);

    REQUIRE(run("synth --seed 8 --days 2 -o " + sb.path("c")) == 0);
    CHECK(read_all(sb.dir / "a" / "data.csv") != read_all(sb.dir / "c" / "data.csv"));
}

TEST_CASE("cli: decompose writes the modes file with omega header and m+1 columns") {
    Sandbox sb;
    REQUIRE(run("synth --seed 3 --days 2 -o " + sb.path("data")) == 0);
    REQUIRE(run("decompose " + sb.path("data/data.csv") + " --modes 5 -o " + sb.path("dec")) == 0);
    std::ifstream is(sb.dir / "dec" / "modes.txt");
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("# omegas:", 0) == 0);
    std::istringstream hs(header.substr(9));
    double w;
    int omegas = 0;
    while (hs >> w) ++omegas;
    CHECK(omegas == 5);
    std::string columns;
    std::getline(is, columns);
    std::string first_row;
    std::getline(is, first_row);
    std::istringstream rs(first_row);
    double v;
    int cols = 0;
    while (rs >> v) ++cols;
    CHECK(cols == 6);  // five modes plus the residual column
}

TEST_CASE("cli: features emits curves aligned with the grid") {
    Sandbox sb;
    REQUIRE(run("synth --seed 4 --days 2 -o " + sb.path("data")) == 0);
    REQUIRE(run("features " + sb.path("data/data.csv") + " -o " + sb.path("feat")) == 0);
    const fs::path f = sb.dir / "feat" / "features.csv";
    REQUIRE(fs::exists(f));
    CHECK(count_lines(f) == 2 * 288 + 1);  // header + one row per 5-minute sample
    std::ifstream is(f);
    std::string header;
    std::getline(is, header);
    CHECK(header == "timestamp,operative_carbs,active_insulin");
}

TEST_CASE("cli: train then evaluate on the synthetic fixture covers all horizons") {
    Sandbox sb;
    // tiny budget: the point is the wiring, not the accuracy
    const std::string cfg_path = sb.path("desk.cfg");
    {
        std::ofstream cfg(cfg_path);
        cfg << "[train]\nepochs_low = 2\nepochs_teacher = 2\nepochs_student = 2\n"
            << "[models]\nlstm_vec = 16,8\ntrain_student_supervised = false\n"
            << "train_teacher_variant = false\n";
    }
    REQUIRE(run("train --synth --synth-days 2 --horizons 1,6,12 --runs 1 --config " + cfg_path +
                " --seed 5 -o " + sb.path("run")) == 0);
    for (const char* f : {"runs.csv", "steps.csv", "losses.csv", "norm_stats.txt", "config.txt",
                          "arch.txt", "manifest.txt"})
        CHECK(fs::exists(sb.dir / "run" / f));
    CHECK(fs::exists(sb.dir / "run" / "ckpt_h6_run0_low_final.bin"));
    CHECK(fs::exists(sb.dir / "run" / "ckpt_h6_run0_student_kd_final.bin"));
    CHECK(fs::exists(sb.dir / "run" / "ckpt_h6_run0_teacher_best.bin"));

    REQUIRE(run("evaluate --run-dir " + sb.path("run")) == 0);
    const std::string summary = read_all(sb.dir / "run" / "summary.txt");
    CHECK(summary.find("RMSE@5") != std::string::npos);
    CHECK(summary.find("RMSE@30") != std::string::npos);
    CHECK(summary.find("RMSE@60") != std::string::npos);
    CHECK(summary.find("gluconet_kd_st") != std::string::npos);
    CHECK(summary.find("baseline") != std::string::npos);
    CHECK(fs::exists(sb.dir / "run" / "efficiency_60min.csv"));

    SUBCASE("predict from the saved checkpoints") {
        REQUIRE(run("synth --seed 6 --days 2 -o " + sb.path("new")) == 0);
        REQUIRE(run("predict --model-dir " + sb.path("run") + " --input " +
                    sb.path("new/data.csv") + " --horizon 6 -o " + sb.path("pred")) == 0);
        const fs::path p = sb.dir / "pred" / "predictions.csv";
        REQUIRE(fs::exists(p));
        std::ifstream is(p);
        std::string header;
        std::getline(is, header);
        CHECK(header ==
              "window_end,pred_plus_5min,pred_plus_10min,pred_plus_15min,pred_plus_20min,"
              "pred_plus_25min,pred_plus_30min");
        CHECK(count_lines(p) > 100);
    }
    SUBCASE("report aggregates runs files") {
        REQUIRE(run("report " + sb.path("run/runs.csv") + " " + sb.path("run/runs.csv") + " -o " +
                    sb.path("agg")) == 0);
        CHECK(fs::exists(sb.dir / "agg" / "summary.txt"));
        CHECK(count_lines(sb.dir / "agg" / "all_runs.csv") ==
              2 * (count_lines(sb.dir / "run" / "runs.csv") - 1) + 1);
    }
    SUBCASE("rerunning train with the same inputs reproduces runs.csv bit for bit") {
        REQUIRE(run("train --synth --synth-days 2 --horizons 1,6,12 --runs 1 --config " + cfg_path +
                    " --seed 5 -o " + sb.path("run2")) == 0);
        CHECK(read_all(sb.dir / "run" / "runs.csv") == read_all(sb.dir / "run2" / "runs.csv"));
        CHECK(read_all(sb.dir / "run" / "manifest.txt") ==
              read_all(sb.dir / "run2" / "manifest.txt"));
        CHECK(read_all(sb.dir / "run" / "ckpt_h1_run0_low_final.bin") ==
              read_all(sb.dir / "run2" / "ckpt_h1_run0_low_final.bin"));
    }
}

TEST_CASE("cli: GLUCONET_OUT provides the default output root") {
    Sandbox sb;
    ::setenv("GLUCONET_OUT", sb.path("envout").c_str(), 1);
    CHECK(run("synth --seed 2 --days 2") == 0);
    ::unsetenv("GLUCONET_OUT");
    CHECK(fs::exists(sb.dir / "envout" / "data.csv"));
}
