#ifndef GEOSEL_IO_HPP
#define GEOSEL_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geosel/selective_eval.hpp"

namespace geosel {

/// Shortest decimal that round-trips the exact double.
std::string format_double(double v);

/// 9 significant digits, for serialized probabilities.
std::string format_prob(double v);

// Training coordinates: CSV "lat,lon" per line, '#' comments and blank
// lines ignored.
std::vector<GeoPoint> read_coords(const std::filesystem::path& file);
void write_coords(const std::filesystem::path& file,
                  std::span<const GeoPoint> points);

// Grid file: header comments carrying format version, partition params and
// the grid signature, then CSV rows cell_id,center_lat,center_lon,count,depth.
// Centers are written with shortest round-trip decimals, so write/read
// reproduces the grid (and its signature) bit-exactly.
void write_grid(const std::filesystem::path& file, const CellGrid& grid,
                const PartitionParams& params);
CellGrid read_grid(const std::filesystem::path& file);

// Predictions file: header with format version and grid signature, then
// one record per line:
//   image_id|true_lat,true_lon|cid:p,cid:p,...[|mc:cid:p,...]*
void write_predictions(const std::filesystem::path& file,
                       std::span<const EvalRecord> records,
                       const CellGrid& grid);
std::vector<EvalRecord> read_predictions(const std::filesystem::path& file,
                                         const CellGrid& grid);

struct ScoreRow {
    std::string image_id;
    Method method;
    double d_km = 0.0;
    double value = 0.0;
    Orientation orientation = Orientation::HigherConfident;
};

// Scores CSV: image_id,method,d_km,score,orientation.
void write_scores(const std::filesystem::path& file,
                  std::span<const ScoreRow> rows);

// Calibration file: CSV method,d_km,theta,target_coverage,achieved_coverage.
void write_calibration(const std::filesystem::path& file,
                       const CalibrationResult& cal);
CalibrationResult read_calibration(const std::filesystem::path& file);

// RC curve CSV: theta,coverage,risk; zero-coverage points (undefined risk)
// are omitted.
void write_rc_curve(const std::filesystem::path& file,
                    std::span<const RCPoint> points);

void write_report(const std::filesystem::path& file, const SelectiveReport& rep,
                  Method method, double d_km, double theta);

}  // namespace geosel

#endif
