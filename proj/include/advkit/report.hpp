#pragma once

// Run reports: a versioned JSON document plus flat CSV and deterministic SVG
// plots rendered purely from report data.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/metrics.hpp"

namespace advkit {

inline constexpr int kReportSchemaVersion = 1;

struct ExperimentReport {
    std::string experiment;
    json spec_snapshot = json::object();
    json metrics = json::object();          // flat name -> number
    std::vector<SensitivityCurve> curves;
    json tables = json::object();           // name -> {labels: [...], series: {name: [...]}}
    json dataset_hashes = json::object();   // name -> hex hash
    double wall_clock_seconds = 0.0;

    json to_json() const {
        json curves_j = json::array();
        for (const auto& c : curves) curves_j.push_back(c.to_json());
        return {{"schema_version", kReportSchemaVersion},
                {"experiment", experiment},
                {"spec", spec_snapshot},
                {"metrics", metrics},
                {"curves", curves_j},
                {"tables", tables},
                {"dataset_hashes", dataset_hashes},
                {"wall_clock_seconds", wall_clock_seconds},
                {"environment", environment_fingerprint()}};
    }

    static ExperimentReport from_json(const json& j) {
        if (j.value("schema_version", 0) != kReportSchemaVersion)
            throw DataError("unsupported report schema version");
        ExperimentReport r;
        r.experiment = j.at("experiment").get<std::string>();
        r.spec_snapshot = j.value("spec", json::object());
        r.metrics = j.value("metrics", json::object());
        for (const auto& c : j.value("curves", json::array()))
            r.curves.push_back(SensitivityCurve::from_json(c));
        r.tables = j.value("tables", json::object());
        r.dataset_hashes = j.value("dataset_hashes", json::object());
        r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
        return r;
    }

    static json environment_fingerprint() {
        json env;
#if defined(__clang__)
        env["compiler"] = "clang " + std::to_string(__clang_major__);
#elif defined(__GNUC__)
        env["compiler"] = "gcc " + std::to_string(__GNUC__);
#endif
        env["float_size"] = sizeof(float);
#if defined(__linux__)
        env["platform"] = "linux";
#elif defined(__APPLE__)
        env["platform"] = "darwin";
#else
        env["platform"] = "other";
#endif
        return env;
    }
};

// One row per metric point: section,name,value (full double precision).
inline std::string report_to_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "section,name,value\n";
    for (const auto& [k, v] : r.metrics.items())
        out << "metrics," << k << "," << v.dump() << "\n";
    for (const auto& c : r.curves)
        for (const auto& [lvl, acc] : c.points)
            out << "curve:" << c.kind << ",level_" << lvl << "," << json(acc).dump() << "\n";
    for (const auto& [tname, tbl] : r.tables.items()) {
        const auto& labels = tbl.at("labels");
        for (const auto& [sname, series] : tbl.at("series").items())
            for (std::size_t i = 0; i < series.size(); ++i)
                out << "table:" << tname << "," << sname << ":"
                    << labels[i].get<std::string>() << "," << series[i].dump() << "\n";
    }
    return out.str();
}

// ----------------------------------------------------------------------------
// SVG rendering (line plot per curve, grouped bars per table)

namespace svgdetail {

inline std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

inline const char* series_color(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    return colors[i % 5];
}

}  // namespace svgdetail

inline std::string render_curve_svg(const SensitivityCurve& curve) {
    using svgdetail::fmt;
    const int W = 480, H = 320, ml = 50, mr = 15, mt = 25, mb = 40;
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    s << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
    const int max_level = curve.points.empty() ? 1 : curve.points.back().first;
    auto px = [&](double lvl) { return ml + lvl / std::max(1, max_level) * (W - ml - mr); };
    auto py = [&](double acc) { return mt + (1.0 - acc) * (H - mt - mb); };
    // axes
    s << "<line x1='" << ml << "' y1='" << py(0) << "' x2='" << (W - mr) << "' y2='" << py(0)
      << "' stroke='black'/>\n";
    s << "<line x1='" << ml << "' y1='" << py(0) << "' x2='" << ml << "' y2='" << mt
      << "' stroke='black'/>\n";
    for (int tick = 0; tick <= 5; ++tick) {
        const double acc = tick / 5.0;
        s << "<text x='" << (ml - 8) << "' y='" << fmt(py(acc) + 4)
          << "' font-size='11' text-anchor='end'>" << fmt(acc) << "</text>\n";
    }
    std::string path;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        path += (i == 0 ? "M" : "L");
        path += fmt(px(curve.points[i].first)) + " " + fmt(py(curve.points[i].second)) + " ";
        s << "<circle cx='" << fmt(px(curve.points[i].first)) << "' cy='"
          << fmt(py(curve.points[i].second)) << "' r='3' fill='#1f77b4'/>\n";
        s << "<text x='" << fmt(px(curve.points[i].first)) << "' y='" << (H - mb + 16)
          << "' font-size='11' text-anchor='middle'>" << curve.points[i].first << "</text>\n";
    }
    s << "<path d='" << path << "' fill='none' stroke='#1f77b4' stroke-width='2'/>\n";
    s << "<text x='" << (W / 2) << "' y='15' font-size='13' text-anchor='middle'>" << curve.kind
      << " distortion: accuracy vs level</text>\n";
    s << "<text x='" << (W / 2) << "' y='" << (H - 8)
      << "' font-size='12' text-anchor='middle'>level</text>\n";
    s << "</svg>\n";
    return s.str();
}

inline std::string render_bar_table_svg(const std::string& name, const json& table) {
    using svgdetail::fmt;
    const auto& labels = table.at("labels");
    const auto& series = table.at("series");
    const int W = 520, H = 340, ml = 50, mr = 15, mt = 30, mb = 50;
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    s << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
    const std::size_t groups = labels.size();
    const std::size_t nseries = series.size();
    const double gw = static_cast<double>(W - ml - mr) / std::max<std::size_t>(1, groups);
    const double bw = gw / (nseries + 1);
    auto py = [&](double v) { return mt + (1.0 - v) * (H - mt - mb); };
    s << "<line x1='" << ml << "' y1='" << py(0) << "' x2='" << (W - mr) << "' y2='" << py(0)
      << "' stroke='black'/>\n";
    for (int tick = 0; tick <= 5; ++tick) {
        const double v = tick / 5.0;
        s << "<text x='" << (ml - 8) << "' y='" << fmt(py(v) + 4)
          << "' font-size='11' text-anchor='end'>" << fmt(v) << "</text>\n";
    }
    std::size_t si = 0;
    for (const auto& [sname, values] : series.items()) {
        for (std::size_t g = 0; g < groups; ++g) {
            const double v = values[g].get<double>();
            const double x = ml + g * gw + (si + 0.5) * bw;
            s << "<rect x='" << fmt(x) << "' y='" << fmt(py(std::max(0.0, v))) << "' width='"
              << fmt(bw * 0.9) << "' height='" << fmt(std::abs(py(0) - py(v)))
              << "' fill='" << svgdetail::series_color(si) << "'/>\n";
        }
        s << "<text x='" << (ml + 10 + 110 * static_cast<int>(si)) << "' y='" << (mt - 10)
          << "' font-size='12' fill='" << svgdetail::series_color(si) << "'>" << sname
          << "</text>\n";
        ++si;
    }
    for (std::size_t g = 0; g < groups; ++g)
        s << "<text x='" << fmt(ml + (g + 0.5) * gw) << "' y='" << (H - mb + 16)
          << "' font-size='11' text-anchor='middle'>" << labels[g].get<std::string>()
          << "</text>\n";
    s << "<text x='" << (W / 2) << "' y='" << (H - 8) << "' font-size='12' text-anchor='middle'>"
      << name << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

// One plot file per curve/table, deterministic filenames. Errors if the
// report has nothing to plot.
inline std::vector<std::filesystem::path> emit_plots(const ExperimentReport& report,
                                                     const std::filesystem::path& out_dir) {
    if (report.curves.empty() && report.tables.empty())
        throw DataError("emit_plots: report has no curves or tables");
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;
    for (const auto& c : report.curves) {
        const auto path = out_dir / ("curve_" + c.kind + ".svg");
        std::ofstream out(path);
        if (!out) throw DataError("cannot write plot: " + path.string());
        out << render_curve_svg(c);
        files.push_back(path);
    }
    for (const auto& [name, tbl] : report.tables.items()) {
        const auto path = out_dir / ("table_" + name + ".svg");
        std::ofstream out(path);
        if (!out) throw DataError("cannot write plot: " + path.string());
        out << render_bar_table_svg(name, tbl);
        files.push_back(path);
    }
    return files;
}

inline void write_report(const ExperimentReport& report, const std::filesystem::path& run_dir) {
    std::filesystem::create_directories(run_dir);
    write_json(report.to_json(), run_dir / "report.json");
    std::ofstream csv(run_dir / "report.csv");
    if (!csv) throw DataError("cannot write report.csv");
    csv << report_to_csv(report);
    if (!report.curves.empty() || !report.tables.empty()) emit_plots(report, run_dir / "plots");
}

}  // namespace advkit
