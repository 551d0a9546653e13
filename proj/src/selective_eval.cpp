#include "geosel/selective_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "geosel/error.hpp"

namespace geosel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int localizability_label(const EvalRecord& rec, const CellGrid& grid,
                         DistanceKm d) {
    return gcd_km(predict_location(rec.dist, grid), rec.truth) < d.km ? 1 : 0;
}

std::vector<int> label_localizability(std::span<const EvalRecord> records,
                                      const CellGrid& grid, DistanceKm d) {
    std::vector<int> labels;
    labels.reserve(records.size());
    for (const EvalRecord& r : records) {
        labels.push_back(localizability_label(r, grid, d));
    }
    return labels;
}

int loss01(const GeoPoint& l1, const GeoPoint& l2, DistanceKm d) {
    return gcd_km(l1, l2) > d.km ? 1 : 0;
}

double coverage(std::span<const bool> decisions) {
    if (decisions.empty()) {
        throw Error(ErrorClass::EmptyResult, "coverage of an empty set");
    }
    std::size_t accepted = 0;
    for (bool b : decisions) accepted += b;
    return static_cast<double>(accepted) / static_cast<double>(decisions.size());
}

std::optional<double> risk(std::span<const EvalRecord> records,
                           std::span<const bool> decisions,
                           const CellGrid& grid, DistanceKm d) {
    if (records.empty()) {
        throw Error(ErrorClass::EmptyResult, "risk of an empty set");
    }
    if (records.size() != decisions.size()) {
        throw Error(ErrorClass::Consistency,
                    "decisions not aligned with records");
    }
    std::size_t accepted = 0, wrong = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!decisions[i]) continue;
        ++accepted;
        wrong += loss01(predict_location(records[i].dist, grid),
                        records[i].truth, d);
    }
    if (accepted == 0) return std::nullopt;
    return static_cast<double>(wrong) / static_cast<double>(accepted);
}

std::vector<ConfidenceScore> score_records(std::span<const EvalRecord> records,
                                           const CellGrid& grid, Method method,
                                           std::optional<DistanceKm> d,
                                           std::uint64_t seed,
                                           bool se_renormalize) {
    if (method_is_scaled(method) && !d) {
        throw Error(ErrorClass::Usage,
                    "method " + method_token(method) + " requires a scale");
    }

    std::vector<ConfidenceScore> out;
    out.reserve(records.size());
    switch (method) {
        case Method::SE:
            for (const EvalRecord& r : records) {
                out.push_back(spatial_entropy(r.dist, grid, *d, se_renormalize));
            }
            break;
        case Method::PD:
            for (const EvalRecord& r : records) {
                out.push_back(prediction_density(r.dist, grid, *d));
            }
            break;
        case Method::SR:
            for (const EvalRecord& r : records) {
                out.push_back(softmax_response(r.dist));
            }
            break;
        case Method::MC: {
            std::string missing;
            for (const EvalRecord& r : records) {
                if (r.mc_dists.size() < 2) {
                    if (!missing.empty()) missing += ", ";
                    missing += r.image_id;
                }
            }
            if (!missing.empty()) {
                throw Error(ErrorClass::Consistency,
                            "MC requested but records lack mc passes: " + missing);
            }
            for (const EvalRecord& r : records) {
                out.push_back(mc_variance(r.mc_dists));
            }
            break;
        }
        case Method::Random: {
            std::mt19937_64 rng(seed);
            for (std::size_t i = 0; i < records.size(); ++i) {
                out.push_back(ConfidenceScore{uniform01(rng()),
                                              Orientation::HigherConfident,
                                              Method::Random, std::nullopt});
            }
            break;
        }
        case Method::Ideal: {
            // Rank score: position in the ideal ordering, most confident
            // first; distinct values so the RC sweep traces every prefix.
            const std::vector<int> labels = label_localizability(records, grid, *d);
            const std::vector<std::size_t> order = ideal_rank(labels);
            std::vector<double> value(records.size(), 0.0);
            for (std::size_t pos = 0; pos < order.size(); ++pos) {
                value[order[pos]] =
                    static_cast<double>(records.size() - pos);
            }
            for (std::size_t i = 0; i < records.size(); ++i) {
                out.push_back(ConfidenceScore{value[i],
                                              Orientation::HigherConfident,
                                              Method::Ideal, *d});
            }
            break;
        }
    }
    return out;
}

std::vector<RCPoint> rc_curve(std::span<const EvalRecord> records,
                              std::span<const ConfidenceScore> scores,
                              const CellGrid& grid, DistanceKm d) {
    if (records.empty()) {
        throw Error(ErrorClass::EmptyResult, "rc_curve of an empty set");
    }
    if (records.size() != scores.size()) {
        throw Error(ErrorClass::Consistency, "scores not aligned with records");
    }
    const Orientation orient = scores.front().orientation;

    std::vector<int> losses(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        losses[i] = loss01(predict_location(records[i].dist, grid),
                           records[i].truth, d);
    }

    // Threshold knots: distinct observed values, ordered so coverage is
    // non-decreasing, plus the accept-none and accept-all sentinels.
    std::vector<double> thetas;
    thetas.reserve(scores.size() + 2);
    for (const ConfidenceScore& s : scores) thetas.push_back(s.value);
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    if (orient == Orientation::HigherConfident) {
        std::reverse(thetas.begin(), thetas.end());
        thetas.insert(thetas.begin(), kInf);
        thetas.push_back(-kInf);
    } else {
        thetas.insert(thetas.begin(), -kInf);
        thetas.push_back(kInf);
    }

    std::vector<RCPoint> out;
    out.reserve(thetas.size());
    const double n = static_cast<double>(records.size());
    for (double theta : thetas) {
        std::size_t accepted = 0, wrong = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (!gate(scores[i], theta)) continue;
            ++accepted;
            wrong += losses[i];
        }
        RCPoint p;
        p.theta = theta;
        p.coverage = static_cast<double>(accepted) / n;
        if (accepted > 0) {
            p.risk = static_cast<double>(wrong) / static_cast<double>(accepted);
        }
        out.push_back(p);
    }
    return out;
}

CalibrationResult calibrate_threshold(std::span<const EvalRecord> records,
                                      std::span<const ConfidenceScore> scores,
                                      const CellGrid& grid, DistanceKm d) {
    if (records.empty()) {
        throw Error(ErrorClass::EmptyResult, "empty validation set");
    }
    if (records.size() != scores.size()) {
        throw Error(ErrorClass::Consistency, "scores not aligned with records");
    }
    const Orientation orient = scores.front().orientation;

    // Target coverage = base accuracy at d. Both are exact counts, so
    // ceil(target * N) is simply the correct count.
    std::size_t correct = 0;
    for (const EvalRecord& r : records) {
        correct += 1 - loss01(predict_location(r.dist, grid), r.truth, d);
    }
    const double n = static_cast<double>(records.size());

    CalibrationResult res;
    res.method = scores.front().method;
    res.d_km = d.km;
    res.target_coverage = static_cast<double>(correct) / n;

    if (correct == 0) {
        // Nothing to cover: pick the threshold no score can pass.
        res.theta = orient == Orientation::HigherConfident ? kInf : -kInf;
        res.achieved_coverage = 0.0;
        return res;
    }

    std::vector<double> vals;
    vals.reserve(scores.size());
    for (const ConfidenceScore& s : scores) vals.push_back(s.value);
    std::sort(vals.begin(), vals.end());
    if (orient == Orientation::HigherConfident) {
        std::reverse(vals.begin(), vals.end());
    }
    res.theta = vals[correct - 1];  // k-th most confident

    std::size_t accepted = 0;
    for (const ConfidenceScore& s : scores) accepted += gate(s, res.theta);
    res.achieved_coverage = static_cast<double>(accepted) / n;
    return res;
}

SelectiveReport selective_report(std::span<const EvalRecord> records,
                                 std::span<const ConfidenceScore> scores,
                                 const CellGrid& grid, DistanceKm d,
                                 double theta,
                                 std::span<const DistanceKm> report_scales) {
    if (records.empty()) {
        throw Error(ErrorClass::EmptyResult, "empty evaluation set");
    }
    if (records.size() != scores.size()) {
        throw Error(ErrorClass::Consistency, "scores not aligned with records");
    }

    SelectiveReport rep;
    std::size_t accepted = 0, wrong_accepted = 0;
    std::vector<bool> decisions(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const bool accept = gate(scores[i], theta);
        decisions[i] = accept;
        const int label = localizability_label(records[i], grid, d);
        if (accept) {
            ++accepted;
            wrong_accepted += loss01(predict_location(records[i].dist, grid),
                                     records[i].truth, d);
            label ? ++rep.tp : ++rep.fp;
        } else {
            label ? ++rep.fn : ++rep.tn;
        }
    }

    const double n = static_cast<double>(records.size());
    rep.accuracy = static_cast<double>(rep.tp + rep.tn) / n;
    const std::size_t f1_den = 2 * rep.tp + rep.fp + rep.fn;
    rep.f1_positive =
        f1_den == 0 ? 0.0
                    : static_cast<double>(2 * rep.tp) / static_cast<double>(f1_den);
    rep.optimal_coverage = static_cast<double>(accepted) / n;
    if (accepted > 0) {
        rep.optimal_risk = static_cast<double>(wrong_accepted) /
                           static_cast<double>(accepted);
    }

    for (const DistanceKm& s : report_scales) {
        rep.scales_km.push_back(s.km);
        std::size_t all_ok = 0, l_ok = 0, l_n = 0, n_ok = 0, n_n = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const int ok = 1 - loss01(predict_location(records[i].dist, grid),
                                      records[i].truth, s);
            all_ok += ok;
            if (decisions[i]) {
                ++l_n;
                l_ok += ok;
            } else {
                ++n_n;
                n_ok += ok;
            }
        }
        rep.accuracy_all.push_back(static_cast<double>(all_ok) / n);
        rep.accuracy_localizable.push_back(
            l_n ? std::optional<double>(static_cast<double>(l_ok) / l_n)
                : std::nullopt);
        rep.accuracy_nonlocalizable.push_back(
            n_n ? std::optional<double>(static_cast<double>(n_ok) / n_n)
                : std::nullopt);
    }
    return rep;
}

std::vector<double> geolocation_accuracy(std::span<const EvalRecord> records,
                                         const CellGrid& grid,
                                         std::span<const DistanceKm> scales) {
    if (records.empty()) {
        throw Error(ErrorClass::EmptyResult, "empty record set");
    }
    std::vector<double> dists;
    dists.reserve(records.size());
    for (const EvalRecord& r : records) {
        dists.push_back(gcd_km(predict_location(r.dist, grid), r.truth));
    }
    std::vector<double> out;
    out.reserve(scales.size());
    for (const DistanceKm& d : scales) {
        std::size_t ok = 0;
        for (double g : dists) ok += (g <= d.km);
        out.push_back(static_cast<double>(ok) /
                      static_cast<double>(records.size()));
    }
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_dataset(
    std::span<const ConfidenceScore> scores, double theta) {
    std::vector<std::size_t> accepted, rejected;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (gate(scores[i], theta) ? accepted : rejected).push_back(i);
    }
    return {std::move(accepted), std::move(rejected)};
}

}  // namespace geosel
