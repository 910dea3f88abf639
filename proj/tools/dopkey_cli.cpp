// Command-line driver: loads a config, runs one experiment, writes CSV/SVG and a manifest.

#include "dopkey/config.hpp"
#include "dopkey/error.hpp"
#include "dopkey/experiments.hpp"
#include "dopkey/output.hpp"
#include "dopkey/selftest.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace dopkey;

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kConfig = 3, kIo = 4, kNumeric = 5, kInternal = 6 };

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level log_level() {
    const char* env = std::getenv("DOPKEY_LOG_LEVEL");
    if (!env) return Level::warn;
    const std::string v = env;
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

void log(Level level, const std::string& msg) {
    static const Level threshold = log_level();
    if (level > threshold) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[dopkey " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

struct Check {
    std::string name;
    bool passed;
};

struct RunOutput {
    std::vector<std::string> files;
    std::vector<Check> checks;
};

bool all_in_unit_interval(const std::vector<KdrCurvePoint>& pts) {
    for (const auto& p : pts) {
        if (!(p.kdr_theory >= 0.0 && p.kdr_theory <= 1.0 && p.kdr_sim >= 0.0 && p.kdr_sim <= 1.0 &&
              p.std_error >= 0.0)) {
            return false;
        }
    }
    return true;
}

RunOutput run(const std::string& experiment, const RunConfig& cfg, const fs::path& out_dir, bool plots) {
    RunOutput out;
    const Scenario& scn = cfg.scenario;
    const auto& g = cfg.grids;
    auto emit_csv = [&](const Table& t, const std::string& name) {
        write_csv(t, out_dir / name);
        out.files.push_back(name);
        log(Level::info, "wrote " + (out_dir / name).string());
    };
    auto emit_svg = [&](const std::vector<PlotSeries>& s, const AxesSpec& axes, const std::string& name) {
        if (!plots) return;
        write_svg(s, axes, out_dir / name);
        out.files.push_back(name);
        log(Level::info, "wrote " + (out_dir / name).string());
    };

    if (experiment == "fig4") {
        const auto r = run_fig4(scn, g.fig4_pilot_lengths, g.fig4_bins);
        emit_csv(fig4_table(r), "fig4.csv");
        emit_csv(fig4_summary_table(r), "fig4_summary.csv");
        std::vector<PlotSeries> series;
        for (int n : g.fig4_pilot_lengths) {
            for (auto s : fig4_series(r, n)) {
                s.label += " N=" + std::to_string(n);
                series.push_back(s);
            }
        }
        emit_svg(series, {"Empirical pdf of NPSDS estimates", "estimate", "density", false}, "fig4.svg");
        bool sums = true;
        for (std::size_t i = 0; i < r.bins.size(); i += static_cast<std::size_t>(g.fig4_bins)) {
            double total = 0.0;
            for (int b = 0; b < g.fig4_bins; ++b) total += r.bins[i + b].mass;
            sums = sums && std::fabs(total - 1.0) <= 1e-9;
        }
        out.checks.push_back({"histogram masses sum to 1", sums});
    } else if (experiment == "fig5") {
        const auto rows = run_fig5(scn, g.fig5_pilot_lengths);
        emit_csv(fig5_table(rows), "fig5.csv");
        emit_svg(fig5_series(rows), {"MSE vs number of observations", "N", "MSE", true}, "fig5.svg");
        bool nonneg = true;
        for (const auto& r : rows) nonneg = nonneg && r.mse_ab >= 0.0 && r.mse_ae >= 0.0 && r.mse_be >= 0.0;
        out.checks.push_back({"MSE values are non-negative", nonneg});
    } else if (experiment == "fig6") {
        const auto pts = run_fig6(scn, g.fig6_pilot_lengths, g.fig6_gammas, g.quadrature_order);
        emit_csv(fig6_table(pts), "fig6.csv");
        emit_svg(fig6_series(pts), {"KDR vs normalized quantization interval", "gamma", "KDR", true}, "fig6.svg");
        out.checks.push_back({"KDR values and standard errors in range", all_in_unit_interval(pts)});
    } else if (experiment == "single-run") {
        const auto pts = run_key_agreement(scn, g.fig6_gammas);
        emit_csv(key_agreement_table(pts), "single-run.csv");
        const std::uint64_t shown = std::min<std::uint64_t>(scn.durations, 100);
        std::vector<DurationRecord> records;
        const double step = g.single_run_gamma * scn.system.pilot_length;
        for (std::uint64_t d = 0; d < shown; ++d) records.push_back(run_key_duration(scn, d, step));
        emit_csv(key_sample_table(records), "single-run_keys.csv");
        bool ok = true;
        for (const auto& p : pts) ok = ok && p.alice_bob.rate >= 0.0 && p.alice_bob.rate <= 1.0;
        out.checks.push_back({"KDR values in range", ok});
    } else if (experiment == "selftest") {
        const auto results = run_selftest();
        const int failures = report_selftest(results, std::cout);
        Table t{{"check", "passed", "detail"}, {}};
        for (const auto& r : results) {
            t.rows.push_back({r.name, r.passed ? "1" : "0", r.detail});
            out.checks.push_back({r.name, r.passed});
        }
        emit_csv(t, "selftest.csv");
        log(failures ? Level::warn : Level::info, std::to_string(failures) + " selftest check(s) failed");
    } else {
        throw UsageError("unknown experiment '" + experiment + "'");
    }
    return out;
}

void write_manifest(const std::string& experiment, const RunConfig& cfg, const RunOutput& out,
                    const fs::path& out_dir) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.content_hash));
    nlohmann::ordered_json j;
    j["artifact"] = "dopkey";
    j["version"] = kVersion;
    j["experiment"] = experiment;
    j["config_path"] = cfg.source;
    j["config_hash_fnv1a64"] = hash;
    j["seed"] = cfg.scenario.seed;
    j["backend"] = to_string(cfg.scenario.backend);
    j["durations"] = cfg.scenario.durations;
    j["quadrature_order"] = cfg.grids.quadrature_order;
    j["outputs"] = out.files;
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : out.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}});
    write_text(j.dump(2) + "\n", out_dir / "manifest.json");
}

int fail(ExitCode code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["status"] = "error";
    j["kind"] = kind;
    j["exit_code"] = static_cast<int>(code);
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doppler-based secret key generation simulator"};
    std::string experiment, config_path, out_dir = ".", backend;
    std::optional<std::uint64_t> seed, durations;
    std::optional<int> order, threads;
    bool no_plots = false;
    app.add_option("--experiment", experiment, "fig4 | fig5 | fig6 | single-run | selftest")
        ->required()
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "single-run", "selftest"}));
    app.add_option("--config", config_path, "key = value config file (defaults when omitted)");
    app.add_option("--out-dir", out_dir, "output directory (created if missing)");
    app.add_option("--seed", seed, "override the config seed");
    app.add_flag("--no-plots", no_plots, "skip SVG output");
    app.add_option("--backend", backend, "waveform | generative")->check(CLI::IsMember({"waveform", "generative"}));
    app.add_option("--durations", durations, "override D")->check(CLI::PositiveNumber);
    app.add_option("--quadrature-order", order, "override the Gauss-Laguerre order M")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.set_version_flag("--version", kVersion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, "usage", e.what());
    }

    try {
        RunConfig cfg = config_path.empty() ? parse_config("", "<defaults>") : load_config(config_path);
        if (seed) cfg.scenario.seed = *seed;
        if (!backend.empty()) cfg.scenario.backend = backend_from_string(backend);
        if (durations) cfg.scenario.durations = *durations;
        if (order) cfg.grids.quadrature_order = *order;
        if (threads) cfg.scenario.threads = *threads;
        validate_config(cfg);
        log(Level::info, "experiment " + experiment + ", config " + cfg.source + ", seed " +
                             std::to_string(cfg.scenario.seed) + ", D " + std::to_string(cfg.scenario.durations));

        const fs::path dir(out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

        const RunOutput out = run(experiment, cfg, dir, !no_plots);
        write_manifest(experiment, cfg, out, dir);
        int failed = 0;
        for (const auto& c : out.checks) {
            if (!c.passed) {
                ++failed;
                log(Level::warn, "check failed: " + c.name);
            }
        }
        if (failed) return fail(kCheckFailed, "check", std::to_string(failed) + " internal check(s) failed");
        return kOk;
    } catch (const ConfigError& e) {
        return fail(kConfig, "config", e.what());
    } catch (const IoError& e) {
        return fail(kIo, "io", e.what());
    } catch (const UsageError& e) {
        return fail(kUsage, "usage", e.what());
    } catch (const NumericError& e) {
        return fail(kNumeric, "numeric", e.what());
    } catch (const DomainError& e) {
        return fail(kNumeric, "domain", e.what());
    } catch (const std::exception& e) {
        return fail(kInternal, "internal", e.what());
    }
}
