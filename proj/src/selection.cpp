#include "geosel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "geosel/error.hpp"

namespace geosel {

Orientation orientation_of(Method m) {
    switch (m) {
        case Method::SE:
        case Method::MC:
            return Orientation::LowerConfident;
        case Method::PD:
        case Method::SR:
        case Method::Random:
        case Method::Ideal:
            return Orientation::HigherConfident;
    }
    return Orientation::HigherConfident;
}

std::string method_token(Method m) {
    switch (m) {
        case Method::SE: return "se";
        case Method::PD: return "pd";
        case Method::SR: return "sr";
        case Method::MC: return "mc";
        case Method::Random: return "random";
        case Method::Ideal: return "ideal";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& token) {
    if (token == "se") return Method::SE;
    if (token == "pd") return Method::PD;
    if (token == "sr") return Method::SR;
    if (token == "mc") return Method::MC;
    if (token == "random") return Method::Random;
    if (token == "ideal") return Method::Ideal;
    return std::nullopt;
}

bool method_is_scaled(Method m) {
    return m == Method::SE || m == Method::PD || m == Method::Ideal;
}

namespace {

void check_binding(const CellDistribution& dist, const CellGrid& grid) {
    if (dist.grid_signature() != grid.signature()) {
        throw Error(ErrorClass::Consistency,
                    "distribution is bound to a different grid");
    }
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

SuperCellSet build_supercells(const CellDistribution& dist, const CellGrid& grid,
                              DistanceKm d) {
    check_binding(dist, grid);
    if (d.km < 0.0) throw Error(ErrorClass::Usage, "negative scale");

    const auto& entries = dist.entries();
    std::vector<bool> consumed(entries.size(), false);

    SuperCellSet out;
    std::size_t remaining = entries.size();
    while (remaining > 0 && out.cumulative_mass < 0.9) {
        // Seed: most probable unconsumed cell; ascending-id order plus
        // strict > gives the smallest id on ties.
        std::size_t seed = entries.size();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (consumed[i]) continue;
            if (seed == entries.size() || entries[i].second > entries[seed].second) {
                seed = i;
            }
        }

        const std::vector<CellId> nearby =
            grid.cells_within(entries[seed].first, d);
        SuperCell sc;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (consumed[i]) continue;
            if (std::binary_search(nearby.begin(), nearby.end(),
                                   entries[i].first)) {
                sc.members.push_back(entries[i].first);
                sc.mass += entries[i].second;
                consumed[i] = true;
                --remaining;
            }
        }
        out.cumulative_mass += sc.mass;
        out.cells.push_back(std::move(sc));
    }
    // A lone super-cell absorbing the whole distribution holds total mass
    // exactly 1 by the distribution invariant; pin it so the degenerate
    // scale identity SE == 0 is exact rather than rounding noise.
    if (out.cells.size() == 1 && remaining == 0) {
        out.cells.front().mass = 1.0;
        out.cumulative_mass = 1.0;
    }
    return out;
}

ConfidenceScore spatial_entropy(const CellDistribution& dist, const CellGrid& grid,
                                DistanceKm d, bool renormalize) {
    const SuperCellSet sc = build_supercells(dist, grid, d);
    const double denom = renormalize ? sc.cumulative_mass : 1.0;
    double h = 0.0;
    for (const SuperCell& s : sc.cells) h -= xlog2x(s.mass / denom);
    return ConfidenceScore{h, Orientation::LowerConfident, Method::SE, d};
}

ConfidenceScore prediction_density(const CellDistribution& dist,
                                   const CellGrid& grid, DistanceKm d) {
    check_binding(dist, grid);
    if (d.km < 0.0) throw Error(ErrorClass::Usage, "negative scale");

    const std::vector<CellId> nearby = grid.cells_within(dist.argmax_cell(), d);
    double mass = 0.0;
    std::size_t matched = 0;
    for (const auto& [id, p] : dist.entries()) {
        if (std::binary_search(nearby.begin(), nearby.end(), id)) {
            mass += p;
            ++matched;
        }
    }
    // Whole distribution in range: total mass is exactly 1 by invariant.
    if (matched == dist.entries().size()) mass = 1.0;
    return ConfidenceScore{mass, Orientation::HigherConfident, Method::PD, d};
}

ConfidenceScore softmax_response(const CellDistribution& dist) {
    double best = 0.0;
    for (const auto& [id, p] : dist.entries()) best = std::max(best, p);
    return ConfidenceScore{best, Orientation::HigherConfident, Method::SR,
                           std::nullopt};
}

ConfidenceScore mc_variance(std::span<const CellDistribution> mc_dists) {
    if (mc_dists.size() < 2) {
        throw Error(ErrorClass::Consistency,
                    "MC variance requires at least 2 forward passes");
    }
    const std::uint64_t sig = mc_dists.front().grid_signature();
    std::vector<double> sr;
    sr.reserve(mc_dists.size());
    for (const CellDistribution& d : mc_dists) {
        if (d.grid_signature() != sig) {
            throw Error(ErrorClass::Consistency,
                        "MC passes bound to different grids");
        }
        sr.push_back(softmax_response(d).value);
    }
    double mean = 0.0;
    for (double v : sr) mean += v;
    mean /= static_cast<double>(sr.size());
    double var = 0.0;
    for (double v : sr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(sr.size());
    return ConfidenceScore{var, Orientation::LowerConfident, Method::MC,
                           std::nullopt};
}

bool gate(const ConfidenceScore& score, double theta) {
    return score.orientation == Orientation::HigherConfident
               ? score.value >= theta
               : score.value <= theta;
}

std::vector<std::size_t> ideal_rank(std::span<const int> labels) {
    std::vector<std::size_t> order;
    order.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i]) order.push_back(i);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) order.push_back(i);
    }
    return order;
}

double uniform01(std::uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

std::vector<bool> random_select(std::size_t n, double p_accept,
                                std::uint64_t seed) {
    if (!(p_accept >= 0.0 && p_accept <= 1.0)) {
        throw Error(ErrorClass::Usage, "p_accept must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::vector<bool> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = uniform01(rng()) < p_accept;
    return out;
}

}  // namespace geosel
