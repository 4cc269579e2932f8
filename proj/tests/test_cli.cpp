#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "spixct/io.hpp"

using namespace spixct;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("SPIXCT_CLI");
    REQUIRE(path != nullptr);
    return path;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("spixct_cli_" + tag + "_" + std::to_string(getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate --out /tmp") == 1);
    CHECK(run("forward") == 1);  // --out is required
}

TEST_CASE("missing output directory exits with code 2") {
    CHECK(run("forward --out /nonexistent/dir/xyz --n 16 --angles 20") == 2);
}

TEST_CASE("invalid phantom and parameters exit with code 2") {
    TempDir dir("val");
    CHECK(run("forward --out " + dir.str() + " --phantom marble --n 16") == 2);
    CHECK(run("forward --out " + dir.str() + " --phantom file:/no/such.csv --n 16") == 2);
    CHECK(run("forward --out " + dir.str() + " --phantom disk --radius 5 --n 16") == 2);
}

TEST_CASE("forward of the zero phantom writes a constant 2*pi field") {
    TempDir dir("zero");
    CHECK(run("forward --out " + dir.str() +
              " --phantom disk --amplitude 0 --n 33 --angles 40") == 0);
    const ScalarField kf = read_field_csv((dir.path / "kf.csv").string());
    CHECK(kf.grid.n == 33);
    for (double v : kf.values) CHECK(std::abs(v - 2.0 * M_PI) < 1e-12);
}

TEST_CASE("forward of a disk dips at the center") {
    TempDir dir("disk");
    CHECK(run("forward --out " + dir.str() +
              " --phantom disk --radius 0.5 --amplitude 1 --n 41 --angles 60") == 0);
    const ScalarField kf = read_field_csv((dir.path / "kf.csv").string());
    const int c = kf.grid.n / 2;
    const double center = kf.at(c, c);
    CHECK(center < kf.at(c, c + 6));
    CHECK(kf.at(c, c + 6) < kf.at(c, c + 12));
    CHECK(center == doctest::Approx(2.0 * M_PI * std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("reruns are byte-identical, including the noise path") {
    TempDir a("det_a"), b("det_b");
    const std::string args =
        " --phantom gaussian --sigma 0.22 --amplitude 0.4 --n 24 --angles 40"
        " --max-iters 3 --noise 0.005 --seed 7 --threads 2 --out ";
    CHECK(run("reconstruct" + args + a.str()) == 0);
    CHECK(run("reconstruct" + args + b.str()) == 0);
    for (const char* name : {"phantom.csv", "recon.csv", "report.csv", "summary.csv"}) {
        INFO(name);
        const std::string fa = slurp(a.path / name), fb = slurp(b.path / name);
        CHECK(!fa.empty());
        CHECK(fa == fb);
    }
}

TEST_CASE("output files begin with the config stamp") {
    TempDir dir("stamp");
    CHECK(run("forward --out " + dir.str() + " --phantom disk --n 17 --angles 24 --seed 9") ==
          0);
    std::ifstream in(dir.path / "kf.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("# config_hash=", 0) == 0);
    CHECK(first.find("seed=9") != std::string::npos);
}

TEST_CASE("config file values apply and flags win") {
    TempDir dir("cfg");
    std::ofstream cfg(dir.path / "run.cfg");
    cfg << "phantom=disk\nn=21\nangles=24\nradius=0.4\n";
    cfg.close();
    CHECK(run("forward --config " + (dir.path / "run.cfg").string() + " --out " + dir.str() +
              " --n 13") == 0);
    const ScalarField kf = read_field_csv((dir.path / "kf.csv").string());
    CHECK(kf.grid.n == 13);  // flag beat the config file
}

TEST_CASE("invert-linear writes a first-order epsilon table") {
    TempDir dir("lin");
    CHECK(run("invert-linear --out " + dir.str() +
              " --phantom gaussian --sigma 0.2 --n 48 --angles 60 --epsilons 0.1,0.01") == 0);
    std::ifstream in(dir.path / "epsilon_table.csv");
    std::string line;
    std::getline(in, line);  // stamp
    std::getline(in, line);  // header
    CHECK(line == "epsilon,distance_to_analytic");
    double eps1, d1, eps2, d2;
    char comma;
    in >> eps1 >> comma >> d1;
    in >> eps2 >> comma >> d2;
    CHECK(eps1 > eps2);
    CHECK(d1 > d2);                    // finite-eps defect shrinks with eps
    CHECK(d1 / d2 == doctest::Approx(10.0).epsilon(0.25));
    CHECK(fs::exists(dir.path / "recon.csv"));
    CHECK(fs::exists(dir.path / "summary.csv"));
}

TEST_CASE("stability-audit writes both buckets and flags") {
    TempDir dir("stab");
    CHECK(run("stability-audit --out " + dir.str() + " --n 24 --angles 40 --pairs 3") == 0);
    CHECK(fs::exists(dir.path / "stability_small.csv"));
    CHECK(fs::exists(dir.path / "stability_large.csv"));
    CHECK(fs::exists(dir.path / "summary.csv"));
}
