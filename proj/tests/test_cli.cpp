// End-to-end tests that drive the installed binary (path in $GEOSEL_BIN)
// through std::system, checking outputs and exit codes.
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "geosel/io.hpp"

using namespace geosel;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliFixture {
    fs::path dir;
    std::string bin;

    CliFixture() {
        const char* b = std::getenv("GEOSEL_BIN");
        REQUIRE(b != nullptr);
        bin = b;
        dir = fs::temp_directory_path() /
              ("geosel_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~CliFixture() { fs::remove_all(dir); }

    RunResult run(const std::string& args) const {
        const fs::path out = dir / "stdout.txt";
        const fs::path err = dir / "stderr.txt";
        const std::string cmd =
            bin + " " + args + " > " + out.string() + " 2> " + err.string();
        const int raw = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    // Clustered training coordinates: 6 tight clusters ~1100 km apart.
    fs::path make_coords() const {
        const fs::path f = dir / "coords.csv";
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> jitter(-0.4, 0.4);
        std::vector<GeoPoint> pts;
        for (int c = 0; c < 6; ++c) {
            const double lat = -25.0 + 10.0 * c;
            const double lon = 10.0 * c;
            for (int i = 0; i < 700; ++i) {
                pts.emplace_back(lat + jitter(rng), lon + jitter(rng));
            }
        }
        write_coords(f, pts);
        return f;
    }
};

}  // namespace

TEST_CASE("full pipeline runs clean and is byte-deterministic") {
    CliFixture cli;
    const fs::path coords = cli.make_coords();
    const fs::path grid = cli.dir / "grid.csv";
    const fs::path preds = cli.dir / "preds.txt";
    const fs::path labels = cli.dir / "labels.csv";

    auto r = cli.run("partition --input " + coords.string() + " --output " +
                     grid.string() + " --min-count 50 --max-count 400");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("cells=") != std::string::npos);

    r = cli.run("synth --grid " + grid.string() + " --output " +
                preds.string() + " --labels-output " + labels.string() +
                " --n-localizable 120 --n-nonlocalizable 120 --scale-km 25" +
                " --seed 7 --mc-passes 3");
    REQUIRE(r.code == 0);
    CHECK(r.out == "records=240\n");

    const fs::path scores = cli.dir / "scores.csv";
    r = cli.run("score --grid " + grid.string() + " --input " + preds.string() +
                " --output " + scores.string() +
                " --method se --method pd --method sr --method mc" +
                " --scale-km 25 --scale-km 200");
    REQUIRE(r.code == 0);
    CHECK(r.out == "rows=1920\n");  // 240 records x 4 methods x 2 scales

    const fs::path cal = cli.dir / "cal.csv";
    r = cli.run("calibrate --grid " + grid.string() + " --input " +
                preds.string() + " --output " + cal.string() +
                " --method pd --scale-km 25");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("theta=") != std::string::npos);

    const fs::path rc = cli.dir / "rc.csv";
    const fs::path report = cli.dir / "report.json";
    r = cli.run("evaluate --grid " + grid.string() + " --input " +
                preds.string() + " --method pd --scale-km 25 --calibration " +
                cal.string() + " --rc-output " + rc.string() +
                " --report-output " + report.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("coverage=") != std::string::npos);
    CHECK(slurp(report).find("\"confusion\"") != std::string::npos);

    const fs::path out_l = cli.dir / "loc.txt";
    const fs::path out_n = cli.dir / "nonloc.txt";
    r = cli.run("split --grid " + grid.string() + " --input " + preds.string() +
                " --method pd --scale-km 25 --calibration " + cal.string() +
                " --output-localizable " + out_l.string() +
                " --output-nonlocalizable " + out_n.string());
    REQUIRE(r.code == 0);
    const auto g = read_grid(grid);
    CHECK(read_predictions(out_l, g).size() + read_predictions(out_n, g).size() ==
          240);

    SUBCASE("second identical invocations reproduce every artifact") {
        const std::string snap_grid = slurp(grid);
        const std::string snap_preds = slurp(preds);
        const std::string snap_scores = slurp(scores);
        const std::string snap_rc = slurp(rc);
        const std::string snap_report = slurp(report);

        CHECK(cli.run("partition --input " + coords.string() + " --output " +
                      grid.string() + " --min-count 50 --max-count 400")
                  .code == 0);
        CHECK(cli.run("synth --grid " + grid.string() + " --output " +
                      preds.string() + " --labels-output " + labels.string() +
                      " --n-localizable 120 --n-nonlocalizable 120" +
                      " --scale-km 25 --seed 7 --mc-passes 3")
                  .code == 0);
        CHECK(cli.run("score --grid " + grid.string() + " --input " +
                      preds.string() + " --output " + scores.string() +
                      " --method se --method pd --method sr --method mc" +
                      " --scale-km 25 --scale-km 200")
                  .code == 0);
        CHECK(cli.run("evaluate --grid " + grid.string() + " --input " +
                      preds.string() + " --method pd --scale-km 25" +
                      " --calibration " + cal.string() + " --rc-output " +
                      rc.string() + " --report-output " + report.string())
                  .code == 0);

        CHECK(slurp(grid) == snap_grid);
        CHECK(slurp(preds) == snap_preds);
        CHECK(slurp(scores) == snap_scores);
        CHECK(slurp(rc) == snap_rc);
        CHECK(slurp(report) == snap_report);
    }
}

TEST_CASE("every error class maps to its exit code") {
    CliFixture cli;
    const fs::path coords = cli.make_coords();
    const fs::path grid = cli.dir / "grid.csv";
    REQUIRE(cli.run("partition --input " + coords.string() + " --output " +
                    grid.string() + " --min-count 50 --max-count 400")
                .code == 0);
    const fs::path preds = cli.dir / "preds.txt";
    const fs::path labels = cli.dir / "labels.csv";
    REQUIRE(cli.run("synth --grid " + grid.string() + " --output " +
                    preds.string() + " --labels-output " + labels.string() +
                    " --n-localizable 10 --n-nonlocalizable 10 --seed 1")
                .code == 0);

    SUBCASE("usage errors exit 2") {
        auto r = cli.run("score --no-such-flag");
        CHECK(r.code == 2);
        CHECK(r.err.find("error[usage]") != std::string::npos);

        r = cli.run("calibrate --grid " + grid.string() + " --input " +
                    preds.string() + " --output " + (cli.dir / "c.csv").string() +
                    " --method random");
        CHECK(r.code == 2);
        CHECK(r.err.find("no threshold to calibrate") != std::string::npos);

        r = cli.run("evaluate --grid " + grid.string() + " --input " +
                    preds.string() + " --method sr --rc-output " +
                    (cli.dir / "rc.csv").string() + " --report-output " +
                    (cli.dir / "rep.json").string());
        CHECK(r.code == 2);  // neither --theta nor --calibration
    }

    SUBCASE("input format errors exit 3") {
        const fs::path bad = cli.dir / "bad.txt";
        std::ofstream(bad) << "not|a\nvalid file\n";
        auto r = cli.run("score --grid " + grid.string() + " --input " +
                         bad.string() + " --output " +
                         (cli.dir / "s.csv").string() + " --method sr");
        CHECK(r.code == 3);
        CHECK(r.err.find("error[input-format]") != std::string::npos);
    }

    SUBCASE("consistency errors exit 4") {
        // Predictions generated against a different grid.
        const fs::path grid2 = cli.dir / "grid2.csv";
        REQUIRE(cli.run("partition --input " + coords.string() + " --output " +
                        grid2.string() + " --min-count 50 --max-count 900")
                    .code == 0);
        auto r = cli.run("score --grid " + grid2.string() + " --input " +
                         preds.string() + " --output " +
                         (cli.dir / "s.csv").string() + " --method sr");
        CHECK(r.code == 4);
        CHECK(r.err.find("error[consistency]") != std::string::npos);

        // MC scoring without stochastic passes.
        r = cli.run("score --grid " + grid.string() + " --input " +
                    preds.string() + " --output " +
                    (cli.dir / "s.csv").string() + " --method mc");
        CHECK(r.code == 4);
        CHECK(r.err.find("mc passes") != std::string::npos);

        // Calibration file for another method/scale.
        const fs::path cal = cli.dir / "cal.csv";
        REQUIRE(cli.run("calibrate --grid " + grid.string() + " --input " +
                        preds.string() + " --output " + cal.string() +
                        " --method sr --scale-km 25")
                    .code == 0);
        r = cli.run("evaluate --grid " + grid.string() + " --input " +
                    preds.string() + " --method pd --scale-km 25" +
                    " --calibration " + cal.string() + " --rc-output " +
                    (cli.dir / "rc.csv").string() + " --report-output " +
                    (cli.dir / "rep.json").string());
        CHECK(r.code == 4);
    }

    SUBCASE("empty results exit 5") {
        const fs::path none = cli.dir / "none.csv";
        std::ofstream(none) << "# geosel coords v1\n";
        auto r = cli.run("partition --input " + none.string() + " --output " +
                         (cli.dir / "g.csv").string());
        CHECK(r.code == 5);
        CHECK(r.err.find("error[empty-result]") != std::string::npos);

        // Too few points in every cell after the split.
        const fs::path sparse = cli.dir / "sparse.csv";
        {
            std::vector<GeoPoint> pts;
            for (int i = 0; i < 10; ++i) pts.emplace_back(i * 1.0, i * 1.0);
            write_coords(sparse, pts);
        }
        r = cli.run("partition --input " + sparse.string() + " --output " +
                    (cli.dir / "g.csv").string() + " --min-count 50");
        CHECK(r.code == 5);
    }

    SUBCASE("--help exits 0") {
        CHECK(cli.run("--help").code == 0);
        CHECK(cli.run("score --help").code == 0);
    }
}
