#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "geosel/error.hpp"
#include "geosel/io.hpp"
#include "geosel/selective_eval.hpp"
#include "geosel/synth.hpp"

using namespace geosel;
namespace fs = std::filesystem;

namespace {

// 20x20 lattice, 0.1 degree pitch (~11 km): dense enough for 25 km
// neighborhoods yet wide enough (~220 km) for 5 mutually distant regions.
CellGrid lattice_grid() {
    std::vector<Cell> cells;
    CellId id = 0;
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 20; ++c) {
            cells.push_back(Cell{id++, GeoPoint(r * 0.1, c * 0.1), 50, 1});
        }
    }
    return CellGrid::from_cells(std::move(cells));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("planted labels agree with the localizability labeling") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 80;
    spec.n_nonlocalizable = 80;
    spec.scale_km = 25.0;
    spec.seed = 21;
    const SynthResult res = synthesize(g, spec);

    REQUIRE(res.records.size() == 160);
    REQUIRE(res.planted_labels.size() == 160);
    const auto labels =
        label_localizability(res.records, g, DistanceKm{spec.scale_km});
    CHECK(labels == res.planted_labels);

    // Both classes survive the shuffle interleaved.
    int ones = 0;
    for (int l : res.planted_labels) ones += l;
    CHECK(ones == 80);
    bool mixed_prefix = false;
    for (int i = 1; i < 20; ++i) {
        if (res.planted_labels[i] != res.planted_labels[0]) mixed_prefix = true;
    }
    CHECK(mixed_prefix);
}

TEST_CASE("generation is deterministic per seed") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 30;
    spec.n_nonlocalizable = 30;
    spec.seed = 5;
    spec.mc_passes = 2;

    const auto a = synthesize(g, spec);
    const auto b = synthesize(g, spec);
    spec.seed = 6;
    const auto c = synthesize(g, spec);

    const fs::path tmp = fs::temp_directory_path();
    write_predictions(tmp / "synth_a.txt", a.records, g);
    write_predictions(tmp / "synth_b.txt", b.records, g);
    write_predictions(tmp / "synth_c.txt", c.records, g);
    CHECK(slurp(tmp / "synth_a.txt") == slurp(tmp / "synth_b.txt"));
    CHECK(slurp(tmp / "synth_a.txt") != slurp(tmp / "synth_c.txt"));
    CHECK(a.planted_labels == b.planted_labels);
    fs::remove(tmp / "synth_a.txt");
    fs::remove(tmp / "synth_b.txt");
    fs::remove(tmp / "synth_c.txt");
}

TEST_CASE("dispersed records score as unlocalizable") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 0;
    spec.n_nonlocalizable = 40;
    spec.scale_km = 25.0;
    spec.seed = 3;
    const SynthResult res = synthesize(g, spec);

    for (const EvalRecord& r : res.records) {
        CHECK(r.dist.entries().size() == 5);
        // Five near-equal distant regions: entropy just under log2(5).
        const double se =
            spatial_entropy(r.dist, g, DistanceKm{spec.scale_km}).value;
        CHECK(se > 2.0);
        // The argmax region holds barely more than a fifth of the mass.
        const double pd =
            prediction_density(r.dist, g, DistanceKm{spec.scale_km}).value;
        CHECK(pd < 0.3);
    }
}

TEST_CASE("infinite concentration collapses to a single cell") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 20;
    spec.concentration = std::numeric_limits<double>::infinity();
    spec.seed = 17;
    const SynthResult res = synthesize(g, spec);
    for (const EvalRecord& r : res.records) {
        CHECK(r.dist.entries().size() == 1);
        CHECK(prediction_density(r.dist, g, DistanceKm{25.0}).value == 1.0);
    }
}

TEST_CASE("mc passes are attached and scorable") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 10;
    spec.n_nonlocalizable = 10;
    spec.mc_passes = 4;
    spec.seed = 9;
    const SynthResult res = synthesize(g, spec);
    for (const EvalRecord& r : res.records) {
        CHECK(r.mc_dists.size() == 4);
    }
    const auto scores = score_records(res.records, g, Method::MC, std::nullopt);
    for (const ConfidenceScore& s : scores) CHECK(s.value >= 0.0);
}

TEST_CASE("parameter and feasibility errors") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 1;

    SUBCASE("non-positive scale") {
        spec.scale_km = 0.0;
        CHECK_THROWS_AS((void)synthesize(g, spec), Error);
    }
    SUBCASE("negative concentration") {
        spec.concentration = -1.0;
        CHECK_THROWS_AS((void)synthesize(g, spec), Error);
    }
    SUBCASE("no records requested") {
        spec.n_localizable = 0;
        CHECK_THROWS_AS((void)synthesize(g, spec), Error);
    }
    SUBCASE("grid too small for dispersion") {
        // Three cells inside one 25 km neighborhood.
        std::vector<Cell> cells = {Cell{0, GeoPoint(0.0, 0.0), 50, 1},
                                   Cell{1, GeoPoint(0.0, 0.1), 50, 1},
                                   Cell{2, GeoPoint(0.1, 0.0), 50, 1}};
        const CellGrid tiny = CellGrid::from_cells(std::move(cells));
        spec.n_nonlocalizable = 1;
        try {
            (void)synthesize(tiny, spec);
            FAIL("expected consistency error");
        } catch (const Error& e) {
            CHECK(e.cls() == ErrorClass::Consistency);
        }
        // Without dispersed records the same grid is fine.
        spec.n_nonlocalizable = 0;
        CHECK_NOTHROW((void)synthesize(tiny, spec));
    }
}

TEST_CASE("hidden labels round-trip") {
    const CellGrid g = lattice_grid();
    SynthSpec spec;
    spec.n_localizable = 15;
    spec.n_nonlocalizable = 15;
    spec.seed = 33;
    const SynthResult res = synthesize(g, spec);

    const fs::path f = fs::temp_directory_path() / "synth_labels.csv";
    write_labels(f, res.records, res.planted_labels);
    const auto back = read_labels(f);
    fs::remove(f);
    REQUIRE(back.size() == res.records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].first == res.records[i].image_id);
        CHECK(back[i].second == res.planted_labels[i]);
    }
}
