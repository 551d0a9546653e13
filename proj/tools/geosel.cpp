// geosel: selective-prediction pipeline for classification-based image
// geolocation. Subcommands: partition, score, calibrate, evaluate, split,
// synth.
#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "geosel/error.hpp"
#include "geosel/io.hpp"
#include "geosel/synth.hpp"

namespace {

using namespace geosel;

bool log_enabled() {
    const char* v = std::getenv("GEOSEL_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "geosel: " << msg << '\n';
}

Method require_method(const std::string& token) {
    const auto m = parse_method(token);
    if (!m) throw Error(ErrorClass::Usage, "unknown method '" + token + "'");
    return *m;
}

std::vector<DistanceKm> as_scales(const std::vector<double>& km) {
    std::vector<DistanceKm> out;
    for (double v : km) {
        if (v < 0.0) throw Error(ErrorClass::Usage, "negative scale");
        out.push_back(DistanceKm{v});
    }
    return out;
}

const std::vector<double> kDefaultScalesKm = {1.0, 25.0, 200.0, 750.0, 2500.0};

struct EvalInputs {
    CellGrid grid;
    std::vector<EvalRecord> records;
};

EvalInputs load_eval_inputs(const std::string& grid_file,
                            const std::string& input_file) {
    EvalInputs in{read_grid(grid_file), {}};
    log_line("grid: " + std::to_string(in.grid.size()) + " cells");
    in.records = read_predictions(input_file, in.grid);
    log_line("records: " + std::to_string(in.records.size()));
    return in;
}

double resolve_theta(const std::optional<double>& theta_flag,
                     const std::string& calibration_file, Method method,
                     double d_km) {
    if (theta_flag) return *theta_flag;
    if (calibration_file.empty()) {
        throw Error(ErrorClass::Usage,
                    "either --theta or --calibration is required");
    }
    const CalibrationResult cal = read_calibration(calibration_file);
    if (cal.method != method || cal.d_km != d_km) {
        throw Error(ErrorClass::Consistency,
                    "calibration file is for " + method_token(cal.method) +
                        " at d=" + format_double(cal.d_km) +
                        " km, not the requested method/scale");
    }
    return cal.theta;
}

int run(int argc, char** argv) {
    CLI::App app{"Selective prediction for classification-based geolocation"};
    app.require_subcommand(1);

    // partition
    auto* partition = app.add_subcommand(
        "partition", "Build an adaptive cell grid from training coordinates");
    std::string p_input, p_output;
    PartitionParams p_params;
    partition->add_option("--input", p_input, "coordinates CSV (lat,lon per line)")
        ->required();
    partition->add_option("--output", p_output, "grid file to write")->required();
    partition->add_option("--min-count", p_params.min_count,
                          "discard cells with fewer points");
    partition->add_option("--max-count", p_params.max_count,
                          "split cells with more points");
    partition->add_option("--max-depth", p_params.max_depth,
                          "quadtree depth safeguard");

    // score
    auto* score = app.add_subcommand(
        "score", "Compute confidence scores for every record");
    std::string s_grid, s_input, s_output;
    std::vector<std::string> s_methods;
    std::vector<double> s_scales = kDefaultScalesKm;
    std::uint64_t s_seed = 0;
    bool s_se_renorm = false;
    score->add_option("--grid", s_grid, "grid file")->required();
    score->add_option("--input", s_input, "predictions file")->required();
    score->add_option("--output", s_output, "scores CSV to write")->required();
    score->add_option("--method", s_methods, "se|pd|sr|mc|random|ideal (repeatable)")
        ->required();
    score->add_option("--scale-km", s_scales, "scales d in km (repeatable)");
    score->add_option("--seed", s_seed, "seed for the random method");
    score->add_flag("--se-renormalize", s_se_renorm,
                    "renormalize super-cell masses before the entropy");

    // calibrate
    auto* calibrate = app.add_subcommand(
        "calibrate", "Pick the threshold whose coverage matches base accuracy");
    std::string c_grid, c_input, c_output, c_method;
    double c_scale = 25.0;
    std::uint64_t c_seed = 0;
    bool c_se_renorm = false;
    calibrate->add_option("--grid", c_grid, "grid file")->required();
    calibrate->add_option("--input", c_input, "validation predictions file")
        ->required();
    calibrate->add_option("--output", c_output, "calibration file to write")
        ->required();
    calibrate->add_option("--method", c_method, "se|pd|sr|mc|ideal")->required();
    calibrate->add_option("--scale-km", c_scale, "scale d in km");
    calibrate->add_option("--seed", c_seed, "seed (unused by deterministic methods)");
    calibrate->add_flag("--se-renormalize", c_se_renorm,
                        "renormalize super-cell masses before the entropy");

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "RC curve and selective report at a threshold");
    std::string e_grid, e_input, e_method, e_calibration, e_rc, e_report;
    double e_scale = 25.0;
    std::optional<double> e_theta;
    std::vector<double> e_report_scales = kDefaultScalesKm;
    std::uint64_t e_seed = 0;
    bool e_se_renorm = false;
    evaluate->add_option("--grid", e_grid, "grid file")->required();
    evaluate->add_option("--input", e_input, "test predictions file")->required();
    evaluate->add_option("--method", e_method, "se|pd|sr|mc|random|ideal")
        ->required();
    evaluate->add_option("--scale-km", e_scale, "scale d in km");
    evaluate->add_option("--theta", e_theta, "explicit threshold");
    evaluate->add_option("--calibration", e_calibration,
                         "calibration file providing theta");
    evaluate->add_option("--rc-output", e_rc, "RC-curve CSV to write")->required();
    evaluate->add_option("--report-output", e_report, "report JSON to write")
        ->required();
    evaluate->add_option("--report-scale-km", e_report_scales,
                         "scales for subset accuracies (repeatable)");
    evaluate->add_option("--seed", e_seed, "seed for the random method");
    evaluate->add_flag("--se-renormalize", e_se_renorm,
                       "renormalize super-cell masses before the entropy");

    // split
    auto* split_cmd = app.add_subcommand(
        "split", "Partition records into localizable/non-localizable files");
    std::string sp_grid, sp_input, sp_method, sp_calibration, sp_out_l, sp_out_n;
    double sp_scale = 25.0;
    std::optional<double> sp_theta;
    std::uint64_t sp_seed = 0;
    bool sp_se_renorm = false;
    split_cmd->add_option("--grid", sp_grid, "grid file")->required();
    split_cmd->add_option("--input", sp_input, "predictions file")->required();
    split_cmd->add_option("--method", sp_method, "se|pd|sr|mc|random|ideal")
        ->required();
    split_cmd->add_option("--scale-km", sp_scale, "scale d in km");
    split_cmd->add_option("--theta", sp_theta, "explicit threshold");
    split_cmd->add_option("--calibration", sp_calibration,
                          "calibration file providing theta");
    split_cmd->add_option("--output-localizable", sp_out_l,
                          "accepted-records predictions file")
        ->required();
    split_cmd->add_option("--output-nonlocalizable", sp_out_n,
                          "rejected-records predictions file")
        ->required();
    split_cmd->add_option("--seed", sp_seed, "seed for the random method");
    split_cmd->add_flag("--se-renormalize", sp_se_renorm,
                        "renormalize super-cell masses before the entropy");

    // synth
    auto* synth = app.add_subcommand(
        "synth", "Generate a planted synthetic prediction corpus");
    std::string sy_grid, sy_output, sy_labels;
    SynthSpec sy_spec;
    synth->add_option("--grid", sy_grid, "grid file")->required();
    synth->add_option("--output", sy_output, "predictions file to write")
        ->required();
    synth->add_option("--labels-output", sy_labels,
                      "hidden planted-labels CSV to write")
        ->required();
    synth->add_option("--n-localizable", sy_spec.n_localizable,
                      "planted-localizable record count")
        ->required();
    synth->add_option("--n-nonlocalizable", sy_spec.n_nonlocalizable,
                      "planted-dispersed record count")
        ->required();
    synth->add_option("--concentration", sy_spec.concentration,
                      "mass concentration on the seed cell");
    synth->add_option("--scale-km", sy_spec.scale_km, "planted scale d in km");
    synth->add_option("--seed", sy_spec.seed, "generator seed");
    synth->add_option("--mc-passes", sy_spec.mc_passes,
                      "stochastic passes per record (0 = none)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error[usage]: " << e.what() << '\n';
        return static_cast<int>(ErrorClass::Usage);
    }

    if (partition->parsed()) {
        const std::vector<GeoPoint> pts = read_coords(p_input);
        if (pts.empty()) {
            throw Error(ErrorClass::EmptyResult,
                        "empty input: no coordinates in " + p_input);
        }
        const PartitionResult res = build_partition(pts, p_params);
        write_grid(p_output, res.grid, p_params);
        std::cout << "cells=" << res.grid.size()
                  << " discarded_points=" << res.discarded_points
                  << " discarded_cells=" << res.discarded_cells << '\n';
        return 0;
    }

    if (score->parsed()) {
        EvalInputs in = load_eval_inputs(s_grid, s_input);
        std::sort(s_scales.begin(), s_scales.end());
        const std::vector<DistanceKm> scales = as_scales(s_scales);
        std::vector<ScoreRow> rows;
        for (const std::string& mt : s_methods) {
            const Method m = require_method(mt);
            for (const DistanceKm& d : scales) {
                const auto scores = score_records(
                    in.records, in.grid, m, d, s_seed, s_se_renorm);
                for (std::size_t i = 0; i < scores.size(); ++i) {
                    rows.push_back(ScoreRow{in.records[i].image_id, m, d.km,
                                            scores[i].value,
                                            scores[i].orientation});
                }
            }
        }
        // Declared order: method x ascending scale x input order; reorder
        // to input order x method x scale for the documented row layout.
        std::vector<ScoreRow> ordered;
        ordered.reserve(rows.size());
        const std::size_t n = in.records.size();
        const std::size_t blocks = rows.size() / std::max<std::size_t>(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t b = 0; b < blocks; ++b) {
                ordered.push_back(rows[b * n + i]);
            }
        }
        write_scores(s_output, ordered);
        std::cout << "rows=" << ordered.size() << '\n';
        return 0;
    }

    if (calibrate->parsed()) {
        const Method m = require_method(c_method);
        if (m == Method::Random) {
            throw Error(ErrorClass::Usage,
                        "random has no threshold to calibrate");
        }
        EvalInputs in = load_eval_inputs(c_grid, c_input);
        if (in.records.empty()) {
            throw Error(ErrorClass::EmptyResult, "empty validation set");
        }
        const DistanceKm d{c_scale};
        const auto scores =
            score_records(in.records, in.grid, m, d, c_seed, c_se_renorm);
        const CalibrationResult cal =
            calibrate_threshold(in.records, scores, in.grid, d);
        write_calibration(c_output, cal);
        std::cout << "theta=" << format_double(cal.theta)
                  << " target_coverage=" << format_double(cal.target_coverage)
                  << " achieved_coverage=" << format_double(cal.achieved_coverage)
                  << '\n';
        return 0;
    }

    if (evaluate->parsed()) {
        const Method m = require_method(e_method);
        EvalInputs in = load_eval_inputs(e_grid, e_input);
        if (in.records.empty()) {
            throw Error(ErrorClass::EmptyResult, "empty evaluation set");
        }
        const DistanceKm d{e_scale};
        const double theta = resolve_theta(e_theta, e_calibration, m, e_scale);
        const auto scores =
            score_records(in.records, in.grid, m, d, e_seed, e_se_renorm);
        write_rc_curve(e_rc, rc_curve(in.records, scores, in.grid, d));
        const std::vector<DistanceKm> rs = as_scales(e_report_scales);
        const SelectiveReport rep =
            selective_report(in.records, scores, in.grid, d, theta, rs);
        write_report(e_report, rep, m, e_scale, theta);
        std::cout << "coverage=" << format_double(rep.optimal_coverage)
                  << " risk="
                  << (rep.optimal_risk ? format_double(*rep.optimal_risk)
                                       : "undefined")
                  << '\n';
        return 0;
    }

    if (split_cmd->parsed()) {
        const Method m = require_method(sp_method);
        EvalInputs in = load_eval_inputs(sp_grid, sp_input);
        if (in.records.empty()) {
            throw Error(ErrorClass::EmptyResult, "empty input set");
        }
        const DistanceKm d{sp_scale};
        const double theta = resolve_theta(sp_theta, sp_calibration, m, sp_scale);
        const auto scores =
            score_records(in.records, in.grid, m, d, sp_seed, sp_se_renorm);
        const auto [accepted, rejected] = split_dataset(scores, theta);
        std::vector<EvalRecord> l_recs, n_recs;
        for (std::size_t i : accepted) l_recs.push_back(in.records[i]);
        for (std::size_t i : rejected) n_recs.push_back(in.records[i]);
        write_predictions(sp_out_l, l_recs, in.grid);
        write_predictions(sp_out_n, n_recs, in.grid);
        std::cout << "localizable=" << l_recs.size()
                  << " non_localizable=" << n_recs.size() << '\n';
        return 0;
    }

    if (synth->parsed()) {
        const CellGrid grid = read_grid(sy_grid);
        const SynthResult res = synthesize(grid, sy_spec);
        write_predictions(sy_output, res.records, grid);
        write_labels(sy_labels, res.records, res.planted_labels);
        std::cout << "records=" << res.records.size() << '\n';
        return 0;
    }

    throw Error(ErrorClass::Usage, "no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const geosel::Error& e) {
        std::cerr << "error[" << e.token() << "]: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
