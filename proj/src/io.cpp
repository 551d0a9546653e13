#include "geosel/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "geosel/error.hpp"

namespace geosel {

namespace {

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorClass::InputFormat,
                    "cannot open " + file.string() + " for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);  // binary: "\n" everywhere
    if (!out) {
        throw Error(ErrorClass::InputFormat,
                    "cannot open " + file.string() + " for writing");
    }
    return out;
}

double parse_double(const std::string& tok, const std::string& ctx) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        // from_chars rejects "inf"/"nan" text in some libcs; handle inf
        // explicitly since calibration thetas can legitimately be infinite.
        if (tok == "inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorClass::InputFormat,
                    "bad number '" + tok + "' in " + ctx);
    }
    return v;
}

std::uint64_t parse_u64(const std::string& tok, const std::string& ctx, int base = 10) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw Error(ErrorClass::InputFormat,
                    "bad integer '" + tok + "' in " + ctx);
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string signature_hex(std::uint64_t sig) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(sig));
    return buf;
}

// Parses "cid:p,cid:p,..." into a raw entry list.
std::vector<std::pair<CellId, double>> parse_entries(const std::string& field,
                                                     const std::string& ctx) {
    std::vector<std::pair<CellId, double>> raw;
    for (const std::string& item : split(field, ',')) {
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            throw Error(ErrorClass::InputFormat,
                        "bad entry '" + item + "' in " + ctx);
        }
        raw.emplace_back(
            static_cast<CellId>(parse_u64(item.substr(0, colon), ctx)),
            parse_double(item.substr(colon + 1), ctx));
    }
    return raw;
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<GeoPoint> read_coords(const std::filesystem::path& file) {
    std::ifstream in = open_in(file);
    std::vector<GeoPoint> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, ',');
        const std::string ctx = file.string() + ":" + std::to_string(lineno);
        if (fields.size() != 2) {
            throw Error(ErrorClass::InputFormat, "expected lat,lon in " + ctx);
        }
        out.emplace_back(parse_double(fields[0], ctx),
                         parse_double(fields[1], ctx));
    }
    return out;
}

void write_coords(const std::filesystem::path& file,
                  std::span<const GeoPoint> points) {
    std::ofstream out = open_out(file);
    out << "# geosel coords v1\n";
    for (const GeoPoint& p : points) {
        out << format_double(p.lat) << ',' << format_double(p.lon) << '\n';
    }
}

void write_grid(const std::filesystem::path& file, const CellGrid& grid,
                const PartitionParams& params) {
    std::ofstream out = open_out(file);
    out << "# geosel grid v1\n";
    out << "# min_count=" << params.min_count << " max_count=" << params.max_count
        << " max_depth=" << params.max_depth << '\n';
    out << "# r_earth_km=" << format_double(kEarthRadiusKm) << '\n';
    out << "# signature=" << signature_hex(grid.signature()) << '\n';
    out << "cell_id,center_lat,center_lon,count,depth\n";
    for (const Cell& c : grid.cells()) {
        out << c.id << ',' << format_double(c.center.lat) << ','
            << format_double(c.center.lon) << ',' << c.count << ',' << c.depth
            << '\n';
    }
}

CellGrid read_grid(const std::filesystem::path& file) {
    std::ifstream in = open_in(file);
    std::vector<Cell> cells;
    std::string line;
    std::size_t lineno = 0;
    std::string declared_sig;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string sig_key = "# signature=";
            if (line.rfind(sig_key, 0) == 0) declared_sig = line.substr(sig_key.size());
            continue;
        }
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        const std::string ctx = file.string() + ":" + std::to_string(lineno);
        if (fields.size() != 5) {
            throw Error(ErrorClass::InputFormat, "expected 5 columns in " + ctx);
        }
        Cell c;
        c.id = static_cast<CellId>(parse_u64(fields[0], ctx));
        c.center = GeoPoint(parse_double(fields[1], ctx),
                            parse_double(fields[2], ctx));
        c.count = static_cast<std::uint32_t>(parse_u64(fields[3], ctx));
        c.depth = static_cast<int>(parse_u64(fields[4], ctx));
        cells.push_back(c);
    }
    if (cells.empty()) {
        throw Error(ErrorClass::EmptyResult,
                    "empty input: no cells in " + file.string());
    }
    CellGrid grid = CellGrid::from_cells(std::move(cells));
    if (!declared_sig.empty() &&
        parse_u64(declared_sig, "grid signature", 16) != grid.signature()) {
        throw Error(ErrorClass::Consistency,
                    "grid file signature does not match its contents");
    }
    return grid;
}

void write_predictions(const std::filesystem::path& file,
                       std::span<const EvalRecord> records,
                       const CellGrid& grid) {
    std::ofstream out = open_out(file);
    out << "# geosel predictions v1\n";
    out << "# grid_signature=" << signature_hex(grid.signature()) << '\n';
    for (const EvalRecord& r : records) {
        out << r.image_id << '|' << format_double(r.truth.lat) << ','
            << format_double(r.truth.lon) << '|';
        bool first = true;
        for (const auto& [id, p] : r.dist.entries()) {
            if (!first) out << ',';
            first = false;
            out << id << ':' << format_prob(p);
        }
        for (const CellDistribution& mc : r.mc_dists) {
            out << "|mc:";
            first = true;
            for (const auto& [id, p] : mc.entries()) {
                if (!first) out << ',';
                first = false;
                out << id << ':' << format_prob(p);
            }
        }
        out << '\n';
    }
}

std::vector<EvalRecord> read_predictions(const std::filesystem::path& file,
                                         const CellGrid& grid) {
    std::ifstream in = open_in(file);
    std::vector<EvalRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string ctx = file.string() + ":" + std::to_string(lineno);
        if (line[0] == '#') {
            const std::string sig_key = "# grid_signature=";
            if (line.rfind(sig_key, 0) == 0) {
                const std::uint64_t sig =
                    parse_u64(line.substr(sig_key.size()), ctx, 16);
                if (sig != grid.signature()) {
                    throw Error(ErrorClass::Consistency,
                                "predictions were produced against a different "
                                "grid (signature mismatch)");
                }
            }
            continue;
        }
        const auto fields = split(line, '|');
        if (fields.size() < 3) {
            throw Error(ErrorClass::InputFormat,
                        "expected image_id|lat,lon|entries in " + ctx);
        }
        EvalRecord rec;
        rec.image_id = fields[0];
        const auto truth = split(fields[1], ',');
        if (truth.size() != 2) {
            throw Error(ErrorClass::InputFormat, "bad truth field in " + ctx);
        }
        rec.truth = GeoPoint(parse_double(truth[0], ctx),
                             parse_double(truth[1], ctx));
        rec.dist = CellDistribution::validate(parse_entries(fields[2], ctx), grid);
        for (std::size_t i = 3; i < fields.size(); ++i) {
            if (fields[i].rfind("mc:", 0) != 0) {
                throw Error(ErrorClass::InputFormat,
                            "expected mc: block in " + ctx);
            }
            rec.mc_dists.push_back(CellDistribution::validate(
                parse_entries(fields[i].substr(3), ctx), grid));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_scores(const std::filesystem::path& file,
                  std::span<const ScoreRow> rows) {
    std::ofstream out = open_out(file);
    out << "image_id,method,d_km,score,orientation\n";
    for (const ScoreRow& r : rows) {
        out << r.image_id << ',' << method_token(r.method) << ','
            << format_double(r.d_km) << ',' << format_double(r.value) << ','
            << (r.orientation == Orientation::HigherConfident ? "higher" : "lower")
            << '\n';
    }
}

void write_calibration(const std::filesystem::path& file,
                       const CalibrationResult& cal) {
    std::ofstream out = open_out(file);
    out << "method,d_km,theta,target_coverage,achieved_coverage\n";
    out << method_token(cal.method) << ',' << format_double(cal.d_km) << ','
        << format_double(cal.theta) << ',' << format_double(cal.target_coverage)
        << ',' << format_double(cal.achieved_coverage) << '\n';
}

CalibrationResult read_calibration(const std::filesystem::path& file) {
    std::ifstream in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorClass::InputFormat,
                    "empty calibration file " + file.string());
    }
    if (!std::getline(in, line)) {
        throw Error(ErrorClass::InputFormat,
                    "calibration file " + file.string() + " has no data row");
    }
    const auto fields = split(line, ',');
    const std::string ctx = file.string();
    if (fields.size() != 5) {
        throw Error(ErrorClass::InputFormat, "expected 5 columns in " + ctx);
    }
    CalibrationResult cal;
    const auto m = parse_method(fields[0]);
    if (!m) {
        throw Error(ErrorClass::InputFormat,
                    "unknown method '" + fields[0] + "' in " + ctx);
    }
    cal.method = *m;
    cal.d_km = parse_double(fields[1], ctx);
    cal.theta = parse_double(fields[2], ctx);
    cal.target_coverage = parse_double(fields[3], ctx);
    cal.achieved_coverage = parse_double(fields[4], ctx);
    return cal;
}

void write_rc_curve(const std::filesystem::path& file,
                    std::span<const RCPoint> points) {
    std::ofstream out = open_out(file);
    out << "theta,coverage,risk\n";
    for (const RCPoint& p : points) {
        if (!p.risk) continue;  // undefined at zero coverage
        out << format_double(p.theta) << ',' << format_double(p.coverage) << ','
            << format_double(*p.risk) << '\n';
    }
}

void write_report(const std::filesystem::path& file, const SelectiveReport& rep,
                  Method method, double d_km, double theta) {
    nlohmann::ordered_json j;
    j["method"] = method_token(method);
    j["d_km"] = d_km;
    j["theta"] = std::isinf(theta) ? nlohmann::ordered_json(format_double(theta))
                                   : nlohmann::ordered_json(theta);
    j["accuracy"] = rep.accuracy;
    j["f1_positive"] = rep.f1_positive;
    j["optimal_risk"] =
        rep.optimal_risk ? nlohmann::ordered_json(*rep.optimal_risk)
                         : nlohmann::ordered_json(nullptr);
    j["optimal_coverage"] = rep.optimal_coverage;
    j["confusion"] = {{"tp", rep.tp}, {"fp", rep.fp}, {"tn", rep.tn}, {"fn", rep.fn}};

    auto acc_array = [&](const std::vector<std::optional<double>>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& x : v) {
            a.push_back(x ? nlohmann::ordered_json(*x)
                          : nlohmann::ordered_json(nullptr));
        }
        return a;
    };
    j["scales_km"] = rep.scales_km;
    j["geolocation_accuracy"] = {
        {"all", rep.accuracy_all},
        {"localizable", acc_array(rep.accuracy_localizable)},
        {"non_localizable", acc_array(rep.accuracy_nonlocalizable)},
    };

    std::ofstream out = open_out(file);
    out << j.dump(2) << '\n';
}

}  // namespace geosel
