#ifndef GEOSEL_DISTRIBUTION_HPP
#define GEOSEL_DISTRIBUTION_HPP

#include <string>
#include <utility>
#include <vector>

#include "geosel/cellgrid.hpp"

namespace geosel {

/// Sparse probability distribution over the cells of one grid. Validated
/// and renormalized on construction; immutable afterwards.
class CellDistribution {
  public:
    /// Establishes the invariants: entries non-empty, no negative mass, no
    /// duplicate or unknown cell ids, sum within 1e-4 of 1 (then
    /// renormalized to sum exactly 1 up to rounding).
    static CellDistribution validate(std::vector<std::pair<CellId, double>> raw,
                                     const CellGrid& grid);

    /// Entries sorted ascending by cell id, probabilities summing to 1.
    const std::vector<std::pair<CellId, double>>& entries() const {
        return entries_;
    }

    /// Signature of the grid this distribution was validated against.
    std::uint64_t grid_signature() const { return grid_sig_; }

    /// Cell with maximal probability; ties break to the smallest id.
    CellId argmax_cell() const;

    CellDistribution() = default;  // empty placeholder; build via validate

  private:
    std::vector<std::pair<CellId, double>> entries_;
    std::uint64_t grid_sig_ = 0;
};

/// Model prediction f(x): the center of the most probable cell.
GeoPoint predict_location(const CellDistribution& dist, const CellGrid& grid);

/// One evaluation sample: ground truth plus the model's output
/// distribution(s). mc_dists holds per-forward-pass distributions when the
/// caller supplies them (>= 2 required for MC scoring).
struct EvalRecord {
    std::string image_id;
    GeoPoint truth;
    CellDistribution dist;
    std::vector<CellDistribution> mc_dists;
};

}  // namespace geosel

#endif
