#pragma once

#include "dopkey/experiments.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dopkey {

/// Header plus rows of already formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest round-tripping form, at most 17 significant digits ("%.17g" fallback).
std::string format_number(double v);
std::string format_number(std::uint64_t v);
std::string format_number(int v);

/// RFC 4180 style: comma separated, CRLF-free "\n" line ends, fields quoted when needed.
std::string to_csv(const Table& table);
/// Writes to_csv(table); throws IoError with the path on failure.
void write_csv(const Table& table, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

Table fig4_table(const Fig4Result& r);
Table fig4_summary_table(const Fig4Result& r);
Table fig5_table(const std::vector<Fig5Row>& rows);
Table fig6_table(const std::vector<KdrCurvePoint>& points);
Table key_agreement_table(const std::vector<KeyAgreementPoint>& points);
Table key_sample_table(const std::vector<DurationRecord>& records);

struct PlotPoint {
    double x = 0.0, y = 0.0;
};

struct PlotSeries {
    std::string label;
    std::vector<PlotPoint> points;
    bool line = true;
    bool markers = false;
};

struct AxesSpec {
    std::string title, x_label, y_label;
    bool log_y = false;
};

/// Standalone SVG line/scatter chart. Non-positive y values are dropped on a log axis.
std::string render_svg(const std::vector<PlotSeries>& series, const AxesSpec& axes);
void write_svg(const std::vector<PlotSeries>& series, const AxesSpec& axes, const std::filesystem::path& path);

std::vector<PlotSeries> fig4_series(const Fig4Result& r, int pilot_length);
std::vector<PlotSeries> fig5_series(const std::vector<Fig5Row>& rows);
/// One theory polyline per N and simulation markers.
std::vector<PlotSeries> fig6_series(const std::vector<KdrCurvePoint>& points);

} // namespace dopkey
