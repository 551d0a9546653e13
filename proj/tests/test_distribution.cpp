#include "doctest.h"

#include <random>

#include "geosel/distribution.hpp"
#include "geosel/error.hpp"
#include "oracles.hpp"

using namespace geosel;

namespace {

CellGrid tiny_grid() {
    std::vector<Cell> cells(3);
    cells[0] = Cell{0, GeoPoint(10, 20), 60, 1};
    cells[1] = Cell{1, GeoPoint(-30, 40), 70, 1};
    cells[2] = Cell{2, GeoPoint(50, -60), 80, 1};
    return CellGrid::from_cells(std::move(cells));
}

}  // namespace

TEST_CASE("validate accepts and renormalizes") {
    const CellGrid grid = tiny_grid();

    auto d = CellDistribution::validate({{0, 1.0}}, grid);
    CHECK(d.entries().size() == 1);
    CHECK(d.entries()[0].second == 1.0);

    // Sum 1.0001 is inside tolerance and renormalized to exactly 1.
    auto d2 = CellDistribution::validate({{0, 0.5}, {1, 0.5001}}, grid);
    double sum = 0.0;
    for (const auto& [id, p] : d2.entries()) sum += p;
    CHECK(std::fabs(sum - 1.0) < 1e-12);
}

TEST_CASE("validate error paths are distinct") {
    const CellGrid grid = tiny_grid();
    CHECK_THROWS_WITH_AS(CellDistribution::validate({}, grid),
                         doctest::Contains("empty"), Error);
    CHECK_THROWS_WITH_AS(CellDistribution::validate({{0, -0.1}, {1, 1.1}}, grid),
                         doctest::Contains("negative"), Error);
    CHECK_THROWS_WITH_AS(CellDistribution::validate({{0, 0.5}}, grid),
                         doctest::Contains("sum"), Error);
    CHECK_THROWS_WITH_AS(CellDistribution::validate({{7, 1.0}}, grid),
                         doctest::Contains("unknown cell id"), Error);
    CHECK_THROWS_WITH_AS(CellDistribution::validate({{0, 0.5}, {0, 0.5}}, grid),
                         doctest::Contains("duplicate"), Error);
}

TEST_CASE("argmax with deterministic tie-break") {
    const CellGrid grid = tiny_grid();
    CHECK(CellDistribution::validate({{0, 1.0}}, grid).argmax_cell() == 0);
    CHECK(CellDistribution::validate({{0, 0.4}, {1, 0.6}}, grid).argmax_cell() == 1);
    // Exact tie: smallest id wins.
    CHECK(CellDistribution::validate({{1, 0.5}, {2, 0.5}}, grid).argmax_cell() == 1);
}

TEST_CASE("argmax invariant under uniform scaling before renormalization") {
    const CellGrid grid = tiny_grid();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        std::uniform_real_distribution<double> u(0.05, 1.0);
        double a = u(rng), b = u(rng), c = u(rng);
        const double s = a + b + c;
        auto d1 = CellDistribution::validate({{0, a / s}, {1, b / s}, {2, c / s}},
                                             grid);
        // Same weights scaled by 0.99995 still pass tolerance after
        // renormalization and keep the argmax.
        const double k = 0.99995 / s;
        auto d2 = CellDistribution::validate({{0, a * k}, {1, b * k}, {2, c * k}},
                                             grid);
        CHECK(d1.argmax_cell() == d2.argmax_cell());
    }
}

TEST_CASE("predict_location is the argmax cell center") {
    const CellGrid grid = tiny_grid();
    auto d = CellDistribution::validate({{0, 1.0}}, grid);
    const GeoPoint p = predict_location(d, grid);
    CHECK(p.lat == 10.0);
    CHECK(p.lon == 20.0);

    auto d2 = CellDistribution::validate({{0, 0.3}, {1, 0.7}}, grid);
    CHECK(predict_location(d2, grid).lat == -30.0);

    auto tie = CellDistribution::validate({{1, 0.5}, {2, 0.5}}, grid);
    CHECK(predict_location(tie, grid).lat == -30.0);  // min id 1

    std::mt19937_64 rng(12);
    const CellGrid rg = oracle::random_grid(rng, 30);
    for (int i = 0; i < 50; ++i) {
        auto rd = oracle::random_distribution(rng, rg, 10);
        const GeoPoint q = predict_location(rd, rg);
        const GeoPoint c = rg.cell_center(rd.argmax_cell());
        CHECK(q.lat == c.lat);
        CHECK(q.lon == c.lon);
    }
}

TEST_CASE("binding to a different grid is rejected") {
    const CellGrid g1 = tiny_grid();
    std::mt19937_64 rng(13);
    const CellGrid g2 = oracle::random_grid(rng, 5);
    auto d = CellDistribution::validate({{0, 1.0}}, g1);
    CHECK_THROWS_AS(predict_location(d, g2), Error);
}
