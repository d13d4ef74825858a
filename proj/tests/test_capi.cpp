#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "battbayes.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("battbayes_capi_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

struct RunHandle {
    bb_run* run;
    explicit RunHandle(const char* mode) : run(bb_run_new(mode)) {}
    ~RunHandle() { bb_run_free(run); }
};

// Two-cell fade table, fabricated but self-consistent.
const char* kCorpus =
    "cell_id,temp_c,c_rate,soc_avg,soc_min,soc_max,ah,fade_pct,replicate\n"
    "A,35,2.82,38.5,22.6,50,500,5.1,1\n"
    "A,35,2.82,38.5,22.6,50,1000,7.4,1\n"
    "A,35,2.82,38.5,22.6,50,1500,9.2,1\n"
    "A,35,2.82,38.5,22.6,50,2000,10.8,1\n"
    "A,35,2.82,38.5,22.6,50,2500,12.1,1\n"
    "B,23,3.0,41.9,32.5,54,500,3.3,1\n"
    "B,23,3.0,41.9,32.5,54,1000,4.9,1\n"
    "B,23,3.0,41.9,32.5,54,1500,6.1,1\n"
    "B,23,3.0,41.9,32.5,54,2000,7.1,1\n"
    "B,23,3.0,41.9,32.5,54,2500,8.0,1\n";

}  // namespace

TEST_CASE("version string is present") {
    REQUIRE(bb_version() != nullptr);
    CHECK(std::strlen(bb_version()) >= 5);
}

TEST_CASE("log density kernel matches reference values") {
    double out = 0.0;
    REQUIRE(bb_log_pdf("gamma", 2.0, 1.0, 2.0, &out) == BB_OK);
    CHECK(out == doctest::Approx(-0.9397292053084385).epsilon(1e-12));
    REQUIRE(bb_log_pdf("normal", 0.0, 1.0, 0.0, &out) == BB_OK);
    CHECK(out == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
    REQUIRE(bb_log_pdf("gamma", 2.0, 1.0, -1.0, &out) == BB_OK);
    CHECK(out == -std::numeric_limits<double>::infinity());
    CHECK(bb_log_pdf("cauchy", 0.0, 1.0, 0.0, &out) == BB_ERR_USAGE);
    CHECK(bb_log_pdf("gamma", 2.0, 1.0, 2.0, nullptr) == BB_ERR_USAGE);
}

TEST_CASE("draw kernel is deterministic and respects support") {
    std::vector<double> a(100), b(100);
    REQUIRE(bb_draw("beta", 0.5, 0.1, 42, 3, a.size(), a.data()) == BB_OK);
    REQUIRE(bb_draw("beta", 0.5, 0.1, 42, 3, b.size(), b.data()) == BB_OK);
    CHECK(a == b);
    for (double x : a) {
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    std::vector<double> c(100);
    REQUIRE(bb_draw("beta", 0.5, 0.1, 42, 4, c.size(), c.data()) == BB_OK);
    CHECK(a != c);
    CHECK(bb_draw("beta", 0.5, 1.7, 42, 3, 1, a.data()) == BB_ERR_DOMAIN);
}

TEST_CASE("autocorrelation and decorrelation kernels") {
    std::vector<double> alt;
    for (int i = 0; i < 100; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
    double r = 0.0;
    REQUIRE(bb_autocorrelation(alt.data(), alt.size(), 1, &r) == BB_OK);
    CHECK(r == doctest::Approx(-1.0).epsilon(1e-12));
    size_t lag = 0;
    REQUIRE(bb_decorrelation_lag(alt.data(), alt.size(), 0.2, &lag) == BB_OK);
    CHECK(lag == 1);
    std::vector<double> constant(10, 2.0);
    CHECK(bb_autocorrelation(constant.data(), constant.size(), 1, &r) == BB_ERR_DOMAIN);
}

TEST_CASE("fit metrics kernel matches the worked example") {
    const double est[] = {11.0, 19.0};
    const double meas[] = {10.0, 20.0};
    double r2 = 0.0, rmsd = 0.0;
    REQUIRE(bb_fit_metrics(est, meas, 2, &r2, &rmsd) == BB_OK);
    CHECK(r2 == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(rmsd == doctest::Approx(6.666666666666667).epsilon(1e-12));
    const double flat[] = {3.0, 3.0};
    CHECK(bb_fit_metrics(est, flat, 2, &r2, &rmsd) == BB_ERR_DOMAIN);
}

TEST_CASE("run handles validate their inputs") {
    RunHandle bad("fly");
    REQUIRE(bad.run != nullptr);
    CHECK(bb_run_set_config(bad.run, "somewhere.json") == BB_OK);
    CHECK(bb_run_execute(bad.run) == BB_ERR_USAGE);
    CHECK(std::string(bb_run_last_error(bad.run)).find("unknown mode") !=
          std::string::npos);

    RunHandle no_config("train");
    CHECK(bb_run_execute(no_config.run) == BB_ERR_USAGE);

    RunHandle train("train");
    CHECK(bb_run_set_config(train.run, "") == BB_ERR_USAGE);
    CHECK(bb_run_set_iterations(train.run, 0) == BB_ERR_USAGE);
    CHECK(bb_run_set_burn_in(train.run, 1.5) == BB_ERR_USAGE);
    CHECK(bb_run_set_split(train.run, 2.0, nullptr) == BB_ERR_USAGE);
    CHECK(bb_run_set_split(train.run, 0.8, "diagonal") == BB_ERR_USAGE);

    RunHandle missing("train");
    CHECK(bb_run_set_config(missing.run, "no_such_config.json") == BB_OK);
    CHECK(bb_run_execute(missing.run) == BB_ERR_USAGE);
}

TEST_CASE("train then test through the C interface") {
    TempDir dir("cycle");
    write_text(dir.file("cells.csv"), kCorpus);
    write_text(dir.file("run.json"),
               std::string("{\"training_csv\": \"cells.csv\", \"out_dir\": \"") +
                   dir.file("out") + "\", \"seed\": 5, \"iterations\": 300, " +
                   "\"split_ratio\": 0.8}");

    RunHandle train("train");
    REQUIRE(bb_run_set_config(train.run, dir.file("run.json").c_str()) == BB_OK);
    const bb_status trained = bb_run_execute(train.run);
    INFO(bb_run_last_error(train.run));
    REQUIRE(trained == BB_OK);
    CHECK(fs::exists(dir.file("out") + "/parameters.csv"));

    RunHandle test("test");
    REQUIRE(bb_run_set_config(test.run, dir.file("run.json").c_str()) == BB_OK);
    REQUIRE(bb_run_set_trained_dir(test.run, dir.file("out").c_str()) == BB_OK);
    REQUIRE(bb_run_set_out_dir(test.run, dir.file("test_out").c_str()) == BB_OK);
    const bb_status tested = bb_run_execute(test.run);
    INFO(bb_run_last_error(test.run));
    REQUIRE(tested == BB_OK);
    CHECK(fs::exists(dir.file("test_out") + "/test_metrics.csv"));
}

TEST_CASE("test without trained artifacts reports the missing parameters") {
    TempDir dir("missing");
    write_text(dir.file("run.json"), "{}");
    RunHandle test("test");
    REQUIRE(bb_run_set_config(test.run, dir.file("run.json").c_str()) == BB_OK);
    REQUIRE(bb_run_set_trained_dir(test.run, dir.file("void").c_str()) == BB_OK);
    CHECK(bb_run_execute(test.run) == BB_ERR_DOMAIN);
    CHECK(std::string(bb_run_last_error(test.run)).find("missing trained parameters") !=
          std::string::npos);
}
