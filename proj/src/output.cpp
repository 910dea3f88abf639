#include "dopkey/output.hpp"

#include "dopkey/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dopkey {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t v) { return std::to_string(v); }
std::string format_number(int v) { return std::to_string(v); }

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string to_csv(const Table& table) {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_field(cells[i]);
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw UsageError("to_csv: row width differs from the header");
        line(row);
    }
    return out.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

void write_csv(const Table& table, const std::filesystem::path& path) { write_text(to_csv(table), path); }

Table fig4_table(const Fig4Result& r) {
    Table t{{"N", "node", "bin_lo", "bin_hi", "mass"}, {}};
    for (const auto& b : r.bins) {
        t.rows.push_back({format_number(b.pilot_length), b.node, format_number(b.lo), format_number(b.hi),
                          format_number(b.mass)});
    }
    return t;
}

Table fig4_summary_table(const Fig4Result& r) {
    Table t{{"N", "theta_ab", "var_alice", "var_bob", "var_eve_from_a", "var_eve_from_b", "ks_alice_bob_d",
             "ks_alice_bob_p"},
            {}};
    for (const auto& s : r.summary) {
        t.rows.push_back({format_number(s.pilot_length), format_number(s.theta_ab), format_number(s.var_alice),
                          format_number(s.var_bob), format_number(s.var_eve_from_a), format_number(s.var_eve_from_b),
                          format_number(s.ks_alice_bob.statistic), format_number(s.ks_alice_bob.p_value)});
    }
    return t;
}

Table fig5_table(const std::vector<Fig5Row>& rows) {
    Table t{{"N", "theta_ab", "theta_ae", "theta_be", "mse_ab", "se_ab", "mse_ba", "se_ba", "mse_ae", "se_ae",
             "mse_be", "se_be"},
            {}};
    for (const auto& r : rows) {
        t.rows.push_back({format_number(r.pilot_length), format_number(r.theta_ab), format_number(r.theta_ae),
                          format_number(r.theta_be), format_number(r.mse_ab), format_number(r.se_ab),
                          format_number(r.mse_ba), format_number(r.se_ba), format_number(r.mse_ae),
                          format_number(r.se_ae), format_number(r.mse_be), format_number(r.se_be)});
    }
    return t;
}

Table fig6_table(const std::vector<KdrCurvePoint>& points) {
    Table t{{"N", "gamma", "kdr_theory", "kdr_sim", "stderr", "D", "M"}, {}};
    for (const auto& p : points) {
        t.rows.push_back({format_number(p.pilot_length), format_number(p.gamma), format_number(p.kdr_theory),
                          format_number(p.kdr_sim), format_number(p.std_error), format_number(p.durations),
                          format_number(p.quadrature_order)});
    }
    return t;
}

Table key_agreement_table(const std::vector<KeyAgreementPoint>& points) {
    Table t{{"N", "gamma", "kdr_ab", "stderr_ab", "kdr_b_ea", "stderr_b_ea", "kdr_a_eb", "stderr_a_eb", "D"}, {}};
    for (const auto& p : points) {
        t.rows.push_back({format_number(p.pilot_length), format_number(p.gamma), format_number(p.alice_bob.rate),
                          format_number(p.alice_bob.std_error), format_number(p.bob_eve_from_a.rate),
                          format_number(p.bob_eve_from_a.std_error), format_number(p.alice_eve_from_b.rate),
                          format_number(p.alice_eve_from_b.std_error), format_number(p.alice_bob.durations)});
    }
    return t;
}

Table key_sample_table(const std::vector<DurationRecord>& records) {
    Table t{{"duration", "theta_hat_bob", "theta_hat_alice", "theta_hat_eve_from_a", "theta_hat_eve_from_b", "key_bob",
             "key_alice", "key_eve_from_a", "key_eve_from_b"},
            {}};
    for (std::size_t d = 0; d < records.size(); ++d) {
        const auto& r = records[d];
        t.rows.push_back({format_number(static_cast<std::uint64_t>(d)), format_number(r.estimates.at_bob),
                          format_number(r.estimates.at_alice), format_number(r.estimates.at_eve_from_a),
                          format_number(r.estimates.at_eve_from_b), key_hex(r.q_b), key_hex(r.q_a),
                          key_hex(r.q_e_from_a), key_hex(r.q_e_from_b)});
    }
    return t;
}

std::string render_svg(const std::vector<PlotSeries>& series, const AxesSpec& axes) {
    constexpr double kWidth = 720, kHeight = 480;
    constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    auto ty = [&](double y) { return axes.log_y ? std::log10(y) : y; };
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (axes.log_y && !(p.y > 0.0)) continue;
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, ty(p.y));
            y_hi = std::max(y_hi, ty(p.y));
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    }
    if (x_hi <= x_lo) x_lo -= 0.5, x_hi += 0.5;
    if (axes.log_y) {
        y_lo = std::floor(y_lo);
        y_hi = std::max(std::ceil(y_hi), y_lo + 1.0);
    } else if (y_hi <= y_lo) {
        y_lo -= 0.5, y_hi += 0.5;
    }
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - (ty(y) - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(axes.title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / 5.0;
        o << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << fixed(px(x)) << "\" y2=\""
          << kTop + plot_h + 5 << "\" stroke=\"black\"/>"
          << "<text x=\"" << fixed(px(x)) << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\">"
          << format_number(std::round(x * 1e4) / 1e4) << "</text>\n";
    }
    if (axes.log_y) {
        for (double e = y_lo; e <= y_hi + 1e-9; e += 1.0) {
            const double y = kTop + (1.0 - (e - y_lo) / (y_hi - y_lo)) * plot_h;
            o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
              << fixed(y) << "\" stroke=\"#dddddd\"/>"
              << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">1e"
              << static_cast<int>(e) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            const double v = y_lo + (y_hi - y_lo) * i / 5.0;
            const double y = kTop + (1.0 - i / 5.0) * plot_h;
            o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
              << fixed(y) << "\" stroke=\"#dddddd\"/>"
              << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
              << format_number(std::round(v * 1e4) / 1e4) << "</text>\n";
        }
    }
    o << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(axes.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed(kTop + plot_h / 2) << ")\">" << xml_escape(axes.y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
        std::vector<PlotPoint> pts;
        for (const auto& p : s.points) {
            if (!axes.log_y || p.y > 0.0) pts.push_back(p);
        }
        if (s.line && pts.size() > 1) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = 0; k < pts.size(); ++k) o << (k ? " " : "") << fixed(px(pts[k].x)) << ',' << fixed(py(pts[k].y));
            o << "\"/>\n";
        }
        if (s.markers || pts.size() == 1) {
            for (const auto& p : pts) {
                o << "<circle cx=\"" << fixed(px(p.x)) << "\" cy=\"" << fixed(py(p.y)) << "\" r=\"3.5\" fill=\"none\" stroke=\""
                  << color << "\"/>\n";
            }
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 15;
        o << "<line x1=\"" << lx << "\" y1=\"" << fixed(ly) << "\" x2=\"" << lx + 20 << "\" y2=\"" << fixed(ly)
          << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (s.line ? "" : " stroke-dasharray=\"2 3\"")
          << "/><text x=\"" << lx + 26 << "\" y=\"" << fixed(ly + 4) << "\">" << xml_escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_svg(const std::vector<PlotSeries>& series, const AxesSpec& axes, const std::filesystem::path& path) {
    write_text(render_svg(series, axes), path);
}

std::vector<PlotSeries> fig4_series(const Fig4Result& r, int pilot_length) {
    std::map<std::string, PlotSeries> by_node;
    std::vector<std::string> order;
    for (const auto& b : r.bins) {
        if (b.pilot_length != pilot_length) continue;
        auto [it, fresh] = by_node.try_emplace(b.node);
        if (fresh) {
            it->second.label = b.node;
            order.push_back(b.node);
        }
        const double width = b.hi - b.lo;
        it->second.points.push_back({0.5 * (b.lo + b.hi), width > 0.0 ? b.mass / width : 0.0});
    }
    std::vector<PlotSeries> out;
    for (const auto& name : order) out.push_back(by_node[name]);
    return out;
}

std::vector<PlotSeries> fig5_series(const std::vector<Fig5Row>& rows) {
    std::vector<PlotSeries> out{{"MSE ab", {}, true, true}, {"MSE ae", {}, true, true}, {"MSE be", {}, true, true}};
    for (const auto& r : rows) {
        out[0].points.push_back({static_cast<double>(r.pilot_length), r.mse_ab});
        out[1].points.push_back({static_cast<double>(r.pilot_length), r.mse_ae});
        out[2].points.push_back({static_cast<double>(r.pilot_length), r.mse_be});
    }
    return out;
}

std::vector<PlotSeries> fig6_series(const std::vector<KdrCurvePoint>& points) {
    std::vector<int> order;
    std::map<int, std::pair<PlotSeries, PlotSeries>> by_n;
    for (const auto& p : points) {
        auto [it, fresh] = by_n.try_emplace(p.pilot_length);
        if (fresh) {
            order.push_back(p.pilot_length);
            it->second.first = {"theory N=" + std::to_string(p.pilot_length), {}, true, false};
            it->second.second = {"sim N=" + std::to_string(p.pilot_length), {}, false, true};
        }
        it->second.first.points.push_back({p.gamma, p.kdr_theory});
        it->second.second.points.push_back({p.gamma, p.kdr_sim});
    }
    std::vector<PlotSeries> out;
    for (int n : order) {
        out.push_back(by_n[n].first);
        out.push_back(by_n[n].second);
    }
    return out;
}

} // namespace dopkey
