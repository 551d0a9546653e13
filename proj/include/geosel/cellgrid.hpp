#ifndef GEOSEL_CELLGRID_HPP
#define GEOSEL_CELLGRID_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "geosel/geodesy.hpp"

namespace geosel {

using CellId = std::uint32_t;

struct Cell {
    CellId id = 0;
    GeoPoint center;          // mean of member training points
    std::uint32_t count = 0;  // member training points
    int depth = 0;            // quadtree depth at which the leaf terminated
};

struct PartitionParams {
    std::uint32_t min_count = 50;
    std::uint32_t max_count = 1000;
    int max_depth = 16;  // termination safeguard for co-located points
};

/// Immutable set of geographic cells with a latitude-band index over cell
/// centers for radius queries. Thread-safe for concurrent reads.
class CellGrid {
  public:
    /// Builds a grid from an explicit cell list (e.g. read from a grid
    /// file). Throws on empty input or duplicate ids.
    static CellGrid from_cells(std::vector<Cell> cells);

    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool contains(CellId id) const;

    /// Throws Error(Consistency) on unknown id.
    const Cell& cell(CellId id) const;
    GeoPoint cell_center(CellId id) const { return cell(id).center; }

    /// All cell ids whose center is within great-circle distance d of the
    /// origin cell's center (inclusive), the origin itself always among
    /// them. Result sorted ascending.
    std::vector<CellId> cells_within(CellId origin, DistanceKm d) const;

    /// FNV-1a over the canonical cell serialization; used to bind
    /// prediction files to the grid they were produced against. Computed
    /// once at construction.
    std::uint64_t signature() const { return signature_; }

    CellGrid() = default;  // empty grid; populate via from_cells

  private:
    std::uint64_t compute_signature() const;

    std::vector<Cell> cells_;             // sorted by id
    std::vector<std::uint32_t> by_lat_;   // indices into cells_, sorted by center.lat
    std::uint64_t signature_ = 0;
};

/// Lat/lon rectangle of a quadtree leaf; lat in [lat_lo, lat_hi),
/// lon in [lon_lo, lon_hi), with lat_hi == 90 closed at the top edge.
struct LeafRect {
    double lat_lo, lat_hi, lon_lo, lon_hi;

    bool contains(const GeoPoint& p) const {
        const bool lat_ok =
            (p.lat >= lat_lo && p.lat < lat_hi) || (p.lat == 90.0 && lat_hi == 90.0);
        return lat_ok && p.lon >= lon_lo && p.lon < lon_hi;
    }
};

struct LeafInfo {
    LeafRect rect;
    std::uint32_t count = 0;
    bool retained = false;
    CellId cell_id = 0;  // valid only when retained
    int depth = 0;
};

struct PartitionResult {
    CellGrid grid;
    std::vector<LeafInfo> leaves;    // all leaves, retained and discarded
    std::size_t discarded_points = 0;
    std::size_t discarded_cells = 0;
    PartitionParams params;
};

/// Adaptive lat/lon quadtree: a node splits into 4 equal sub-rectangles
/// while it holds more than max_count points and depth < max_depth. Leaves
/// with fewer than min_count points are discarded. Deterministic: identical
/// input always yields identical ids, centers and counts.
///
/// Throws Error(EmptyResult) on empty input or when every leaf is discarded.
PartitionResult build_partition(std::span<const GeoPoint> points,
                                const PartitionParams& params);

}  // namespace geosel

#endif
