#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gknn/csv.hpp"
#include "gknn/fixtures.hpp"
#include "gknn/neighbors.hpp"

#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace gknn;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const std::string& cli_path() {
    static const std::string path = [] {
        if (const char* env = std::getenv("GKNN_CLI_PATH")) return std::string(env);
        return std::string(GKNN_CLI_PATH);
    }();
    return path;
}

const std::filesystem::path& scratch_dir() {
    static const std::filesystem::path dir = [] {
        std::filesystem::path d = std::filesystem::temp_directory_path() /
                                  ("gknn_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string scratch(const std::string& leaf) { return (scratch_dir() / leaf).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string out_path = scratch("stdout_" + std::to_string(counter));
    const std::string err_path = scratch("stderr_" + std::to_string(counter));
    ++counter;
    const std::string cmd = cli_path() + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    CliResult r;
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::string write_file(const std::string& leaf, const std::string& text) {
    const std::string path = scratch(leaf);
    std::ofstream out(path);
    out << text;
    return path;
}

// one positive at (1,0), one negative at (-1,0)
std::string two_point_csv() {
    return write_file("twopoint.csv", "x,y,label\n1.0,0.0,1\n-1.0,0.0,-1\n");
}

std::string small_csv(const std::string& leaf, Eigen::Index m_plus, Eigen::Index m_minus,
                      std::uint64_t seed) {
    const Dataset d = make_two_gaussian(m_plus, m_minus, seed, "small");
    const std::string path = scratch(leaf);
    save_csv(path, d);
    return path;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("help exits 0 everywhere") {
    CHECK(run_cli("--help").code == 0);
    for (const char* sub : {"bench", "tune", "boundary", "heatmap", "sample", "theory"}) {
        const CliResult r = run_cli(std::string(sub) + " --help");
        CHECK(r.code == 0);
        CHECK_FALSE(r.out.empty());
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("bench --data fixture:ir5 --no-such-flag").code == 1);
    CHECK(run_cli("frobnicate").code == 1);
    // pickers that need a sampler refuse politely
    CHECK(run_cli("heatmap --data fixture:ir5").code == 1);
    CHECK(run_cli("sample --data fixture:ir5").code == 1);
}

TEST_CASE("data errors exit 2") {
    const CliResult missing = run_cli("tune --data /no/such/file.csv");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("data error:") != std::string::npos);

    const std::string bad = write_file("bad.csv", "a,b,label\n1,2,1\n1,oops,-1\n");
    const CliResult malformed = run_cli("tune --data " + bad);
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("line 3") != std::string::npos);
}

TEST_CASE("bench writes a table row per dataset") {
    const std::string out_dir = scratch("bench_out");
    const CliResult r = run_cli("bench --data fixture:ir5 --classifier knn --runs 1 --out " +
                                out_dir);
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 2);  // header + one dataset row
    CHECK(r.out.find("fixture-ir5") != std::string::npos);
    CHECK(r.out.find("knn") != std::string::npos);
    CHECK(std::filesystem::exists(out_dir + "/fixture-ir5.json"));
    CHECK(std::filesystem::exists(out_dir + "/results.txt"));
    CHECK(slurp(out_dir + "/results.txt") == r.out);

    const nlohmann::json j = nlohmann::json::parse(slurp(out_dir + "/fixture-ir5.json"));
    CHECK(j["dataset"] == "fixture-ir5");
    CHECK(j["classifier"] == "knn");
    CHECK(j["runs"] == 1);
    CHECK(j["per_run"].size() == 1);
    CHECK(j["std_f1"] == 0.0);

    // a bad path among good ones: partial results, exit 2
    const CliResult mixed = run_cli("bench --data fixture:ir5 --data /no/file.csv --classifier knn"
                                    " --runs 1 --out " + scratch("bench_mixed"));
    CHECK(mixed.code == 2);
    CHECK(count_lines(mixed.out) == 2);
    CHECK(mixed.err.find("/no/file.csv") != std::string::npos);
}

TEST_CASE("boundary at gamma 1 is the perpendicular bisector") {
    const std::string data = two_point_csv();
    const std::string out = scratch("bisector.csv");
    const CliResult r = run_cli("boundary --data " + data + " --k 1 --gamma 1.0 --resolution 41"
                                " --out " + out);
    CHECK(r.code == 0);

    std::ifstream in(out);
    const CsvTable table = read_csv_table(in);
    REQUIRE(table.header == std::vector<std::string>{"x", "y", "label"});
    REQUIRE(table.rows.size() == 41u * 41u);
    int wrong = 0;
    for (const std::vector<std::string>& row : table.rows) {
        const double x = std::stod(row[0]);
        const int label = std::stoi(row[2]);
        const int expect = x >= 0.0 ? 1 : -1;  // x == 0 ties to the positive
        if (label != expect) ++wrong;
    }
    CHECK(wrong == 0);
}

TEST_CASE("boundary at gamma 0.5 matches the closed-form circle") {
    const std::string data = two_point_csv();
    const std::string out = scratch("circle.csv");
    const CliResult r = run_cli("boundary --data " + data + " --k 1 --gamma 0.5 --resolution 101"
                                " --out " + out);
    CHECK(r.code == 0);

    std::ifstream in(out);
    const CsvTable table = read_csv_table(in);
    REQUIRE(table.rows.size() == 101u * 101u);
    int wrong = 0;
    for (const std::vector<std::string>& row : table.rows) {
        const double x = std::stod(row[0]);
        const double y = std::stod(row[1]);
        const int label = std::stoi(row[2]);
        const double dp2 = (x - 1.0) * (x - 1.0) + y * y;
        const double dn2 = (x + 1.0) * (x + 1.0) + y * y;
        // positive iff 0.25 dp^2 <= dn^2; skip razor-thin margins
        const double margin = 0.25 * dp2 - dn2;
        if (std::abs(margin) < 1e-12) continue;
        const int expect = margin < 0.0 ? 1 : -1;
        if (label != expect) ++wrong;
    }
    CHECK(wrong == 0);
}

TEST_CASE("positive area shrinks as gamma grows") {
    const std::string data = two_point_csv();
    std::vector<long> positive_cells;
    for (const char* g : {"0.3", "0.6", "1.0"}) {
        const std::string out = scratch(std::string("area_") + g + ".csv");
        const CliResult r = run_cli("boundary --data " + data + " --k 1 --gamma " + g +
                                    " --resolution 61 --out " + out);
        REQUIRE(r.code == 0);
        std::ifstream in(out);
        const CsvTable table = read_csv_table(in);
        long pos = 0;
        for (const std::vector<std::string>& row : table.rows)
            if (row[2] == "1") ++pos;
        positive_cells.push_back(pos);
    }
    CHECK(positive_cells[0] >= positive_cells[1]);
    CHECK(positive_cells[1] >= positive_cells[2]);
    CHECK(positive_cells[2] > 0);
}

TEST_CASE("theory table round-trips and is monotone") {
    const std::string out = scratch("theory.csv");
    const CliResult r = run_cli("theory --m-plus 5 --m-minus 40 --trials 4000 --epsilon 0.2"
                                " --seed 42 --out " + out);
    CHECK(r.code == 0);

    const CsvTable table = read_csv_file(out);
    REQUIRE(table.header == std::vector<std::string>{"gamma", "fn", "fn_se", "fp", "fp_se"});
    REQUIRE(table.rows.size() == 20);
    double prev_gamma = 0.0, prev_fn = -1.0, prev_fp = 2.0;
    for (const std::vector<std::string>& row : table.rows) {
        REQUIRE(row.size() == 5);
        const double gamma = std::stod(row[0]);
        const double fn = std::stod(row[1]);
        const double fp = std::stod(row[3]);
        CHECK(gamma > prev_gamma);
        CHECK(fn >= prev_fn);
        CHECK(fp <= prev_fp);
        CHECK(std::stod(row[2]) >= 0.0);
        CHECK(std::stod(row[4]) >= 0.0);
        prev_gamma = gamma;
        prev_fn = fn;
        prev_fp = fp;
    }

    // same invocation, byte-identical output
    const std::string out2 = scratch("theory2.csv");
    run_cli("theory --m-plus 5 --m-minus 40 --trials 4000 --epsilon 0.2 --seed 42 --out " + out2);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("sample output round-trips with provenance") {
    const std::string data = small_csv("sample_in.csv", 10, 90, 33);
    const std::string out = scratch("sampled.csv");
    const CliResult r = run_cli("sample --data " + data + " --sampler smote --ratio 0.5"
                                " --sampler-seed 9 --out " + out);
    CHECK(r.code == 0);
    CHECK(r.err.find("rows 100 -> 135 (35 synthetic)") != std::string::npos);

    const Dataset back = load_csv(out);
    CHECK(back.rows() == 135);
    CHECK(back.positives() == 45);
    CHECK(back.negatives() == 90);
    CHECK(back.has_synthetic());
    Eigen::Index synth = 0;
    for (Provenance p : back.provenance)
        if (p == Provenance::synthetic) ++synth;
    CHECK(synth == 35);
}

TEST_CASE("a 1x1 heatmap equals the tuned objective") {
    const std::string data = small_csv("hm_in.csv", 12, 60, 21);
    const std::string hm_out = scratch("hm.csv");
    const std::string tn_out = scratch("tn.json");
    const std::string shared = " --data " + data + " --sampler smote --ratio 0.6"
                               " --gamma-grid 0.7 --folds 5 --seed 3 --out ";

    const CliResult hm = run_cli("heatmap" + shared + hm_out);
    CHECK(hm.code == 0);
    CHECK(hm.err.find("best gamma_real=") != std::string::npos);
    const CliResult tn = run_cli("tune" + shared + tn_out);
    CHECK(tn.code == 0);

    const CsvTable table = read_csv_file(hm_out);
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.rows[0].size() == 2);  // gamma_real column + one gamma_synth cell
    const double cell = std::stod(table.rows[0][1]);

    const nlohmann::json j = nlohmann::json::parse(slurp(tn_out));
    CHECK(j["gamma_real"] == 0.7);
    CHECK(j["gamma_synth"] == 0.7);
    CHECK(j["ratio"] == 0.6);
    CHECK(j["cv_f1"].get<double>() == cell);
}

TEST_CASE("bench is deterministic across invocations") {
    const std::string a = scratch("det_a");
    const std::string b = scratch("det_b");
    const std::string args = "bench --data fixture:ir5 --classifier gammaknn --sampler smote"
                             " --ratio 0.5 --runs 1 --gamma-grid 0.5,1.0 --folds 5 --out ";
    CHECK(run_cli(args + a).code == 0);
    CHECK(run_cli(args + b).code == 0);
    CHECK(slurp(a + "/fixture-ir5.json") == slurp(b + "/fixture-ir5.json"));
    CHECK(slurp(a + "/results.txt") == slurp(b + "/results.txt"));
    CHECK_FALSE(slurp(a + "/fixture-ir5.json").empty());
}
