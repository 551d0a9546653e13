#ifndef GEOSEL_SELECTION_HPP
#define GEOSEL_SELECTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geosel/distribution.hpp"

namespace geosel {

enum class Method { SE, PD, SR, MC, Random, Ideal };

enum class Orientation {
    HigherConfident,  // accept iff score >= theta
    LowerConfident,   // accept iff score <= theta
};

Orientation orientation_of(Method m);
std::string method_token(Method m);
std::optional<Method> parse_method(const std::string& token);

/// True when the method's score depends on the scale d.
bool method_is_scaled(Method m);

struct ConfidenceScore {
    double value = 0.0;
    Orientation orientation = Orientation::HigherConfident;
    Method method = Method::SR;
    std::optional<DistanceKm> scale;
};

struct SuperCell {
    std::vector<CellId> members;  // sorted ascending
    double mass = 0.0;            // sum of member probabilities
};

/// Super-cells in greedy selection order, stopped once cumulative mass
/// reaches 0.9 (the crossing super-cell included) or the distribution is
/// exhausted.
struct SuperCellSet {
    std::vector<SuperCell> cells;
    double cumulative_mass = 0.0;
};

/// Greedy merge: repeatedly seed on the most probable unconsumed cell
/// (ties to the smallest id) and absorb every unconsumed cell whose center
/// lies within gcd <= d of the seed's center.
SuperCellSet build_supercells(const CellDistribution& dist, const CellGrid& grid,
                              DistanceKm d);

/// Shannon entropy (base 2) of the super-cell masses. By default the
/// masses are used as-is, so the 90% cutoff can leave them summing below
/// one; renormalize=true divides by the cumulative mass first.
/// Lower-is-confident.
ConfidenceScore spatial_entropy(const CellDistribution& dist, const CellGrid& grid,
                                DistanceKm d, bool renormalize = false);

/// Total probability mass within gcd <= d of the argmax cell's center.
/// Higher-is-confident.
ConfidenceScore prediction_density(const CellDistribution& dist,
                                   const CellGrid& grid, DistanceKm d);

/// Maximum cell probability. Higher-is-confident, scale-independent.
ConfidenceScore softmax_response(const CellDistribution& dist);

/// Population variance of the softmax response across forward passes.
/// Requires >= 2 passes. Lower-is-confident.
ConfidenceScore mc_variance(std::span<const CellDistribution> mc_dists);

/// Selection gate g: boundary equality always accepts.
bool gate(const ConfidenceScore& score, double theta);

/// Stable reordering with all localizable (label 1) records first.
/// Returns indices into the input.
std::vector<std::size_t> ideal_rank(std::span<const int> labels);

/// Seeded i.i.d. Bernoulli(p_accept) decisions.
std::vector<bool> random_select(std::size_t n, double p_accept, std::uint64_t seed);

/// Uniform [0,1) draw from a raw 64-bit engine output; used wherever
/// reproducibility across standard libraries matters.
double uniform01(std::uint64_t raw);

}  // namespace geosel

#endif
