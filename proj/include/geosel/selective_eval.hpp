#ifndef GEOSEL_SELECTIVE_EVAL_HPP
#define GEOSEL_SELECTIVE_EVAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geosel/selection.hpp"

namespace geosel {

/// Localizability label: 1 iff gcd(prediction, truth) < d (strict).
int localizability_label(const EvalRecord& rec, const CellGrid& grid,
                         DistanceKm d);

std::vector<int> label_localizability(std::span<const EvalRecord> records,
                                      const CellGrid& grid, DistanceKm d);

/// Selective 0/1 loss: 1 iff gcd(l1, l2) > d (strict; exactly d counts as
/// correct). Note the deliberate boundary asymmetry with the
/// localizability label.
int loss01(const GeoPoint& l1, const GeoPoint& l2, DistanceKm d);

/// Fraction of accepted decisions. Throws on empty input.
double coverage(std::span<const bool> decisions);

/// Error rate among accepted records; nullopt at zero coverage.
std::optional<double> risk(std::span<const EvalRecord> records,
                           std::span<const bool> decisions,
                           const CellGrid& grid, DistanceKm d);

struct RCPoint {
    double theta = 0.0;  // +-infinity at the sentinels
    double coverage = 0.0;
    std::optional<double> risk;  // nullopt at zero coverage
};

/// Per-record confidence scores for one method at one scale. Ideal scores
/// are ranks (distinct, higher = earlier in the ideal ordering); Random
/// scores are seeded uniforms.
std::vector<ConfidenceScore> score_records(std::span<const EvalRecord> records,
                                           const CellGrid& grid, Method method,
                                           std::optional<DistanceKm> d,
                                           std::uint64_t seed = 0,
                                           bool se_renormalize = false);

/// Risk-coverage curve: theta swept over the distinct observed score
/// values plus +-infinity sentinels, points ordered by increasing
/// coverage.
std::vector<RCPoint> rc_curve(std::span<const EvalRecord> records,
                              std::span<const ConfidenceScore> scores,
                              const CellGrid& grid, DistanceKm d);

struct CalibrationResult {
    Method method = Method::SR;
    double d_km = 0.0;
    double theta = 0.0;
    double target_coverage = 0.0;
    double achieved_coverage = 0.0;
};

/// Picks theta so validation coverage matches the base model's
/// geolocation accuracy at scale d: theta is the k-th most confident
/// score with k = ceil(target * N). Ties can push achieved coverage above
/// the target; the result reports both.
CalibrationResult calibrate_threshold(std::span<const EvalRecord> records,
                                      std::span<const ConfidenceScore> scores,
                                      const CellGrid& grid, DistanceKm d);

struct SelectiveReport {
    // Localizability label is the ground truth, the gate decision the
    // positive-class prediction.
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double f1_positive = 0.0;
    std::optional<double> optimal_risk;  // risk at theta*, nullopt at zero coverage
    double optimal_coverage = 0.0;
    // Geolocation accuracy per report scale for the whole set and the
    // accepted (L) / rejected (N) subsets; nullopt when a subset is empty.
    std::vector<double> scales_km;
    std::vector<double> accuracy_all;
    std::vector<std::optional<double>> accuracy_localizable;
    std::vector<std::optional<double>> accuracy_nonlocalizable;
};

SelectiveReport selective_report(std::span<const EvalRecord> records,
                                 std::span<const ConfidenceScore> scores,
                                 const CellGrid& grid, DistanceKm d,
                                 double theta,
                                 std::span<const DistanceKm> report_scales);

/// Fraction of records with gcd(prediction, truth) <= d, per scale.
std::vector<double> geolocation_accuracy(std::span<const EvalRecord> records,
                                         const CellGrid& grid,
                                         std::span<const DistanceKm> scales);

/// Gate-based partition into (accepted, rejected) record indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_dataset(
    std::span<const ConfidenceScore> scores, double theta);

}  // namespace geosel

#endif
