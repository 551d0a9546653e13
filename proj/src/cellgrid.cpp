#include "geosel/cellgrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "geosel/error.hpp"

namespace geosel {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double mean_latitude(std::span<const GeoPoint> pts, std::span<const std::uint32_t> idx) {
    double s = 0.0;
    for (auto i : idx) s += pts[i].lat;
    return s / static_cast<double>(idx.size());
}

// Circular mean of longitudes; falls back to the arithmetic mean when the
// resultant vector degenerates (points spread so evenly the mean direction
// is undefined).
double mean_longitude(std::span<const GeoPoint> pts, std::span<const std::uint32_t> idx) {
    double sx = 0.0, sy = 0.0;
    for (auto i : idx) {
        const double r = pts[i].lon * kDegToRad;
        sx += std::cos(r);
        sy += std::sin(r);
    }
    if (std::hypot(sx, sy) < 1e-9) {
        double s = 0.0;
        for (auto i : idx) s += pts[i].lon;
        return normalize_lon(s / static_cast<double>(idx.size()));
    }
    return normalize_lon(std::atan2(sy, sx) * kRadToDeg);
}

struct Builder {
    std::span<const GeoPoint> pts;
    PartitionParams params;
    std::vector<LeafInfo> leaves;
    std::vector<Cell> cells;
    std::size_t discarded_points = 0;
    std::size_t discarded_cells = 0;

    void visit(const LeafRect& rect, std::vector<std::uint32_t>& idx, int depth) {
        if (idx.size() > params.max_count && depth < params.max_depth) {
            const double lat_mid = 0.5 * (rect.lat_lo + rect.lat_hi);
            const double lon_mid = 0.5 * (rect.lon_lo + rect.lon_hi);
            const LeafRect quads[4] = {
                {rect.lat_lo, lat_mid, rect.lon_lo, lon_mid},  // SW
                {rect.lat_lo, lat_mid, lon_mid, rect.lon_hi},  // SE
                {lat_mid, rect.lat_hi, rect.lon_lo, lon_mid},  // NW
                {lat_mid, rect.lat_hi, lon_mid, rect.lon_hi},  // NE
            };
            for (const LeafRect& q : quads) {
                std::vector<std::uint32_t> sub;
                for (auto i : idx) {
                    if (q.contains(pts[i])) sub.push_back(i);
                }
                visit(q, sub, depth + 1);
            }
            return;
        }

        LeafInfo leaf;
        leaf.rect = rect;
        leaf.count = static_cast<std::uint32_t>(idx.size());
        leaf.depth = depth;
        if (idx.size() >= params.min_count) {
            leaf.retained = true;
            leaf.cell_id = static_cast<CellId>(cells.size());
            Cell c;
            c.id = leaf.cell_id;
            c.center = GeoPoint(mean_latitude(pts, idx), mean_longitude(pts, idx));
            c.count = leaf.count;
            c.depth = depth;
            cells.push_back(c);
        } else {
            discarded_points += idx.size();
            if (!idx.empty()) ++discarded_cells;
        }
        leaves.push_back(leaf);
    }
};

}  // namespace

PartitionResult build_partition(std::span<const GeoPoint> points,
                                const PartitionParams& params) {
    if (params.min_count == 0 || params.min_count > params.max_count) {
        throw Error(ErrorClass::Usage, "require 0 < min_count <= max_count");
    }
    if (points.empty()) {
        throw Error(ErrorClass::EmptyResult, "empty input: no training points");
    }

    Builder b;
    b.pts = points;
    b.params = params;
    std::vector<std::uint32_t> all(points.size());
    std::iota(all.begin(), all.end(), 0u);
    b.visit(LeafRect{-90.0, 90.0, -180.0, 180.0}, all, 0);

    if (b.cells.empty()) {
        throw Error(ErrorClass::EmptyResult,
                    "zero retained cells: every leaf fell below min_count");
    }

    PartitionResult res;
    res.grid = CellGrid::from_cells(std::move(b.cells));
    res.leaves = std::move(b.leaves);
    res.discarded_points = b.discarded_points;
    res.discarded_cells = b.discarded_cells;
    res.params = params;
    return res;
}

CellGrid CellGrid::from_cells(std::vector<Cell> cells) {
    if (cells.empty()) {
        throw Error(ErrorClass::EmptyResult, "empty cell grid");
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].id == cells[i - 1].id) {
            throw Error(ErrorClass::InputFormat, "duplicate cell id in grid");
        }
    }
    CellGrid g;
    g.cells_ = std::move(cells);
    g.by_lat_.resize(g.cells_.size());
    std::iota(g.by_lat_.begin(), g.by_lat_.end(), 0u);
    std::sort(g.by_lat_.begin(), g.by_lat_.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                  return g.cells_[a].center.lat < g.cells_[b].center.lat;
              });
    g.signature_ = g.compute_signature();
    return g;
}

bool CellGrid::contains(CellId id) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), id,
                               [](const Cell& c, CellId v) { return c.id < v; });
    return it != cells_.end() && it->id == id;
}

const Cell& CellGrid::cell(CellId id) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), id,
                               [](const Cell& c, CellId v) { return c.id < v; });
    if (it == cells_.end() || it->id != id) {
        throw Error(ErrorClass::Consistency,
                    "unknown cell id " + std::to_string(id));
    }
    return *it;
}

std::vector<CellId> CellGrid::cells_within(CellId origin, DistanceKm d) const {
    const Cell& o = cell(origin);
    if (d.km < 0.0) {
        throw Error(ErrorClass::Usage, "negative radius");
    }

    // Latitude band prune: gcd >= R * |dlat|, so matches satisfy
    // |dlat_deg| <= d * 180 / (pi * R). Small slack against rounding.
    const double band = d.km * kRadToDeg / kEarthRadiusKm + 1e-9;
    const double lo = o.center.lat - band;
    const double hi = o.center.lat + band;

    auto lower = std::lower_bound(by_lat_.begin(), by_lat_.end(), lo,
                                  [&](std::uint32_t i, double v) {
                                      return cells_[i].center.lat < v;
                                  });
    auto upper = std::upper_bound(by_lat_.begin(), by_lat_.end(), hi,
                                  [&](double v, std::uint32_t i) {
                                      return v < cells_[i].center.lat;
                                  });

    std::vector<CellId> out;
    for (auto it = lower; it != upper; ++it) {
        const Cell& c = cells_[*it];
        if (gcd_km(c.center, o.center) <= d.km) out.push_back(c.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t CellGrid::compute_signature() const {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;  // FNV prime
        }
    };
    for (const Cell& c : cells_) {
        mix(c.id);
        mix(std::bit_cast<std::uint64_t>(c.center.lat));
        mix(std::bit_cast<std::uint64_t>(c.center.lon));
        mix(c.count);
        mix(static_cast<std::uint64_t>(c.depth));
    }
    return h;
}

}  // namespace geosel
