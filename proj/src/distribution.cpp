#include "geosel/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "geosel/error.hpp"

namespace geosel {

CellDistribution CellDistribution::validate(
    std::vector<std::pair<CellId, double>> raw, const CellGrid& grid) {
    if (raw.empty()) {
        throw Error(ErrorClass::InputFormat, "empty distribution");
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& [id, p] = raw[i];
        if (!std::isfinite(p) || p < 0.0) {
            throw Error(ErrorClass::InputFormat,
                        "negative probability for cell " + std::to_string(id));
        }
        if (i > 0 && id == raw[i - 1].first) {
            throw Error(ErrorClass::InputFormat,
                        "duplicate cell id " + std::to_string(id) +
                            " in distribution");
        }
        if (!grid.contains(id)) {
            throw Error(ErrorClass::Consistency,
                        "distribution references unknown cell id " +
                            std::to_string(id));
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-4) {
        throw Error(ErrorClass::InputFormat,
                    "probability sum " + std::to_string(sum) +
                        " outside tolerance 1e-4 of 1");
    }
    for (auto& [id, p] : raw) p /= sum;

    CellDistribution d;
    d.entries_ = std::move(raw);
    d.grid_sig_ = grid.signature();
    return d;
}

CellId CellDistribution::argmax_cell() const {
    // Entries are sorted by id; strict > keeps the smallest id on ties.
    CellId best = entries_.front().first;
    double best_p = entries_.front().second;
    for (const auto& [id, p] : entries_) {
        if (p > best_p) {
            best = id;
            best_p = p;
        }
    }
    return best;
}

GeoPoint predict_location(const CellDistribution& dist, const CellGrid& grid) {
    if (dist.grid_signature() != grid.signature()) {
        throw Error(ErrorClass::Consistency,
                    "distribution is bound to a different grid");
    }
    return grid.cell_center(dist.argmax_cell());
}

}  // namespace geosel
