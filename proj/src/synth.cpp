#include "geosel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "geosel/error.hpp"
#include "geosel/selection.hpp"

namespace geosel {

namespace {

constexpr std::size_t kDispersedRegions = 5;
constexpr std::size_t kMaxNeighbors = 11;  // localizable: seed + up to 11

double clamp_lat(double lat) { return std::clamp(lat, -90.0, 90.0); }

// Normalized weights -> raw entry list over the given cells.
std::vector<std::pair<CellId, double>> to_entries(
    const std::vector<CellId>& ids, const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    std::vector<std::pair<CellId, double>> raw;
    raw.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (weights[i] > 0.0) raw.emplace_back(ids[i], weights[i] / sum);
    }
    return raw;
}

std::vector<double> perturbed(const std::vector<double>& weights,
                              std::mt19937_64& rng) {
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = weights[i] * (1.0 + 0.1 * uniform01(rng()));
    }
    return out;
}

}  // namespace

SynthResult synthesize(const CellGrid& grid, const SynthSpec& spec) {
    if (spec.scale_km <= 0.0) {
        throw Error(ErrorClass::Usage, "planted scale must be positive");
    }
    if (spec.concentration < 0.0 || !std::isfinite(spec.concentration)) {
        if (!(spec.concentration == std::numeric_limits<double>::infinity())) {
            throw Error(ErrorClass::Usage, "concentration must be >= 0");
        }
    }
    if (spec.n_localizable + spec.n_nonlocalizable == 0) {
        throw Error(ErrorClass::Usage, "no records requested");
    }

    std::mt19937_64 rng(spec.seed);
    const auto& cells = grid.cells();
    const DistanceKm d{spec.scale_km};
    // Dispersed regions keep a margin above the scale so that truth jitter
    // (< 0.2 km) can never pull a prediction back inside d.
    const double separation_km = std::max(1.05 * spec.scale_km, spec.scale_km + 1.0);

    // Verify up front that 5 mutually distant regions exist at all.
    {
        std::vector<GeoPoint> picked;
        for (const Cell& c : cells) {
            bool far = true;
            for (const GeoPoint& p : picked) {
                if (gcd_km(c.center, p) <= separation_km) {
                    far = false;
                    break;
                }
            }
            if (far) picked.push_back(c.center);
            if (picked.size() == kDispersedRegions) break;
        }
        if (spec.n_nonlocalizable > 0 && picked.size() < kDispersedRegions) {
            throw Error(ErrorClass::Consistency,
                        "grid too small for requested dispersion: fewer than 5 "
                        "mutually distant cells at the planted scale");
        }
    }

    // Cap below the seed weight so the argmax always lands on the seed
    // cell and the planted label stays valid at any concentration.
    const double neighbor_weight = std::min(std::exp(-spec.concentration), 0.9);
    const double truth_jitter_deg = spec.scale_km / (111.0 * 8.0);

    SynthResult res;

    auto emit = [&](std::vector<CellId> ids, std::vector<double> weights,
                    GeoPoint truth, int label) {
        EvalRecord rec;
        rec.image_id = "synth-" + std::to_string(res.records.size());
        rec.truth = truth;
        rec.dist = CellDistribution::validate(to_entries(ids, weights), grid);
        for (int p = 0; p < spec.mc_passes; ++p) {
            rec.mc_dists.push_back(CellDistribution::validate(
                to_entries(ids, perturbed(weights, rng)), grid));
        }
        res.records.push_back(std::move(rec));
        res.planted_labels.push_back(label);
    };

    for (std::size_t n = 0; n < spec.n_localizable; ++n) {
        const Cell& seed =
            cells[static_cast<std::size_t>(uniform01(rng()) * cells.size())];
        std::vector<CellId> ids{seed.id};
        std::vector<double> weights{1.0 + 0.05 * uniform01(rng())};

        const std::size_t m =
            1 + static_cast<std::size_t>(uniform01(rng()) * (kMaxNeighbors + 1));
        std::vector<CellId> nearby = grid.cells_within(seed.id, d);
        std::erase(nearby, seed.id);
        for (std::size_t i = 0; i < nearby.size() && ids.size() < m; ++i) {
            ids.push_back(nearby[i]);
            weights.push_back(neighbor_weight * (1.0 + 0.05 * uniform01(rng())));
        }

        GeoPoint truth(
            clamp_lat(seed.center.lat +
                      (2.0 * uniform01(rng()) - 1.0) * truth_jitter_deg),
            seed.center.lon + (2.0 * uniform01(rng()) - 1.0) * truth_jitter_deg);
        emit(std::move(ids), std::move(weights), truth, 1);
    }

    for (std::size_t n = 0; n < spec.n_nonlocalizable; ++n) {
        // Greedy far-apart selection over a seeded random scan order.
        std::vector<std::size_t> order(cells.size());
        std::iota(order.begin(), order.end(), 0u);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1],
                      order[static_cast<std::size_t>(uniform01(rng()) * i)]);
        }
        std::vector<CellId> ids;
        for (std::size_t idx : order) {
            bool far = true;
            for (CellId picked : ids) {
                if (gcd_km(cells[idx].center, grid.cell_center(picked)) <=
                    separation_km) {
                    far = false;
                    break;
                }
            }
            if (far) ids.push_back(cells[idx].id);
            if (ids.size() == kDispersedRegions) break;
        }
        if (ids.size() < kDispersedRegions) {
            throw Error(ErrorClass::Consistency,
                        "grid too small for requested dispersion: fewer than 5 "
                        "mutually distant cells at the planted scale");
        }

        std::vector<double> weights;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            weights.push_back(1.0 + 0.02 * uniform01(rng()));
        }
        weights[0] *= 1.15;  // force the argmax region

        const GeoPoint away = grid.cell_center(ids[2]);
        GeoPoint truth(clamp_lat(away.lat + (2.0 * uniform01(rng()) - 1.0) * 1e-3),
                       away.lon + (2.0 * uniform01(rng()) - 1.0) * 1e-3);
        emit(std::move(ids), std::move(weights), truth, 0);
    }

    // Seeded Fisher-Yates shuffle so planted classes are interleaved.
    for (std::size_t i = res.records.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform01(rng()) * i);
        std::swap(res.records[i - 1], res.records[j]);
        std::swap(res.planted_labels[i - 1], res.planted_labels[j]);
    }
    return res;
}

void write_labels(const std::filesystem::path& file,
                  std::span<const EvalRecord> records,
                  std::span<const int> labels) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw Error(ErrorClass::InputFormat,
                    "cannot open " + file.string() + " for writing");
    }
    out << "image_id,label\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << records[i].image_id << ',' << labels[i] << '\n';
    }
}

std::vector<std::pair<std::string, int>> read_labels(
    const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorClass::InputFormat,
                    "cannot open " + file.string() + " for reading");
    }
    std::vector<std::pair<std::string, int>> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw Error(ErrorClass::InputFormat,
                        "bad label row in " + file.string());
        }
        out.emplace_back(line.substr(0, comma),
                         line.substr(comma + 1) == "1" ? 1 : 0);
    }
    return out;
}

}  // namespace geosel
