#ifndef GEOSEL_SYNTH_HPP
#define GEOSEL_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "geosel/distribution.hpp"

namespace geosel {

/// Parameters for the synthetic prediction corpus. Planted-localizable
/// records concentrate their mass on cells within scale_km of the truth;
/// planted-dispersed records spread it over 5 regions that are mutually
/// farther apart than scale_km, with the truth placed away from the
/// argmax region.
struct SynthSpec {
    std::size_t n_localizable = 0;
    std::size_t n_nonlocalizable = 0;
    double concentration = 1.0;  // higher = mass more concentrated on the seed cell
    double scale_km = 25.0;      // planted scale d
    std::uint64_t seed = 0;
    int mc_passes = 0;  // per-record stochastic passes; 0 = none
};

struct SynthResult {
    std::vector<EvalRecord> records;  // seeded deterministic shuffle
    std::vector<int> planted_labels;  // 1 = planted localizable
};

/// Throws Error(Consistency) when the grid lacks 5 mutually distant cells
/// at the planted scale, Error(Usage) on bad parameters.
SynthResult synthesize(const CellGrid& grid, const SynthSpec& spec);

// Hidden labels file: CSV image_id,label.
void write_labels(const std::filesystem::path& file,
                  std::span<const EvalRecord> records,
                  std::span<const int> labels);
std::vector<std::pair<std::string, int>> read_labels(
    const std::filesystem::path& file);

}  // namespace geosel

#endif
