#include "dopkey/config.hpp"

#include "dopkey/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace dopkey {

namespace {

const std::vector<std::string> kKeys{
    "carrier_freq_hz", "symbol_period_s", "symbol_energy", "symbol_energy_db", "noise_variance",
    "noise_variance_db", "path_loss_exponent", "pilot_length", "modulation", "doppler_ab_hz", "doppler_ba_hz",
    "doppler_ae_hz", "doppler_ea_hz", "doppler_be_hz", "doppler_eb_hz", "velocity_ab_mps", "velocity_ae_mps",
    "velocity_be_mps", "distance_ab", "distance_ae", "distance_be", "durations", "seed", "backend",
    "quadrature_order", "fig4_pilot_lengths", "fig4_bins", "fig5_pilot_lengths", "fig6_pilot_lengths",
    "fig6_gammas", "single_run_gamma", "threads"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

class Parser {
public:
    Parser(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    std::vector<std::string>& errors() { return errors_; }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<double> real(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        double v = 0.0;
        if (!parse_real(it->second.value, v)) {
            error(key, "expected a real number, got '" + it->second.value + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        long long v = 0;
        if (!parse_integer(it->second.value, v)) {
            error(key, "expected an integer, got '" + it->second.value + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        const std::string& s = it->second.value;
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
        if (s.empty() || s[0] == '-' || *end != '\0' || errno == ERANGE) {
            error(key, "expected a non-negative 64-bit integer, got '" + s + "'");
            return std::nullopt;
        }
        return static_cast<std::uint64_t>(v);
    }

    std::optional<std::string> text(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    template <class T>
    std::optional<std::vector<T>> list(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        std::vector<T> out;
        std::stringstream ss(it->second.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            bool ok;
            if constexpr (std::is_same_v<T, int>) {
                long long v = 0;
                ok = parse_integer(item, v) && v >= -2147483647LL && v <= 2147483647LL;
                if (ok) out.push_back(static_cast<int>(v));
            } else {
                double v = 0.0;
                ok = parse_real(item, v);
                if (ok) out.push_back(v);
            }
            if (!ok) {
                error(key, "malformed list element '" + item + "'");
                return std::nullopt;
            }
        }
        if (out.empty()) {
            error(key, "list must not be empty");
            return std::nullopt;
        }
        return out;
    }

    void error(const std::string& key, const std::string& what) {
        const auto it = entries_.find(key);
        std::ostringstream msg;
        msg << source_;
        if (it != entries_.end()) msg << ":" << it->second.line;
        msg << ": " << key << ": " << what;
        errors_.push_back(msg.str());
    }

private:
    static bool parse_real(const std::string& s, double& out) {
        if (s.empty()) return false;
        char* end = nullptr;
        errno = 0;
        out = std::strtod(s.c_str(), &end);
        return *end == '\0' && errno != ERANGE && std::isfinite(out);
    }
    static bool parse_integer(const std::string& s, long long& out) {
        if (s.empty()) return false;
        char* end = nullptr;
        errno = 0;
        out = std::strtoll(s.c_str(), &end, 10);
        return *end == '\0' && errno != ERANGE;
    }

    std::string source_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> errors_;
};

double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Resolves one link from its forward/reverse Doppler or velocity keys.
void read_link(Parser& p, const std::string& ab, const std::string& ba, double carrier, LinkConfig& link) {
    const std::string fwd = "doppler_" + ab + "_hz", rev = "doppler_" + ba + "_hz";
    const std::string vel = "velocity_" + ab + "_mps", dist = "distance_" + ab;
    if (auto d = p.real(dist)) link.distance = *d;
    const auto f = p.real(fwd);
    const auto r = p.real(rev);
    const auto v = p.real(vel);
    if (v && (f || r)) {
        p.error(vel, "give either a velocity or Doppler shifts for link " + ab + ", not both");
        return;
    }
    if (v) {
        link.doppler_shift = LinkConfig::from_relative_velocity(*v, carrier, link.distance).doppler_shift;
        return;
    }
    if (f) link.doppler_shift = *f;
    if (r && !f) link.doppler_shift = -*r;
    if (f && r && *r != -*f) {
        std::ostringstream msg;
        msg << "reverse Doppler shift must be the negated forward shift (" << rev << " = " << *r << ", "
            << fwd << " = " << *f << ")";
        p.error(rev, msg.str());
    }
}

} // namespace

const std::vector<std::string>& config_keys() { return kKeys; }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void validate_config(const RunConfig& cfg) {
    auto problems = cfg.scenario.violations();
    const auto& g = cfg.grids;
    auto positive_ints = [&](const std::vector<int>& v, const std::string& name) {
        for (int n : v) {
            if (n < 1) {
                problems.push_back(name + " entries must be >= 1");
                return;
            }
        }
    };
    positive_ints(g.fig4_pilot_lengths, "fig4_pilot_lengths");
    positive_ints(g.fig5_pilot_lengths, "fig5_pilot_lengths");
    positive_ints(g.fig6_pilot_lengths, "fig6_pilot_lengths");
    for (int n : g.fig6_pilot_lengths) {
        if (n > 171) {
            problems.push_back("fig6_pilot_lengths entries must be <= 171 (Laguerre exponent N-1 <= 170)");
            break;
        }
    }
    for (double x : g.fig6_gammas) {
        if (!(x > 0.0)) {
            problems.push_back("fig6_gammas entries must be positive");
            break;
        }
    }
    if (g.fig4_bins < 1) problems.push_back("fig4_bins must be >= 1");
    if (!(g.single_run_gamma > 0.0)) problems.push_back("single_run_gamma must be positive");
    if (g.quadrature_order < 1) problems.push_back("quadrature_order must be >= 1");
    if (problems.empty()) return;
    std::ostringstream msg;
    msg << "invalid configuration (" << cfg.source << "):";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    std::vector<std::string> syntax;
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
        if (eq == std::string::npos) {
            syntax.push_back(where() + "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            syntax.push_back(where() + "unknown key '" + key + "'");
            continue;
        }
        if (auto it = entries.find(key); it != entries.end()) {
            syntax.push_back(where() + key + ": repeated (first set on line " + std::to_string(it->second.line) + ")");
            continue;
        }
        entries[key] = {value, line_no};
    }

    Parser p(source, std::move(entries));
    auto& errors = p.errors();
    errors.insert(errors.begin(), syntax.begin(), syntax.end());

    RunConfig cfg;
    cfg.source = source;
    cfg.content_hash = fnv1a64(text);
    SystemConfig& sys = cfg.scenario.system;
    if (auto v = p.real("carrier_freq_hz")) sys.carrier_freq = *v;
    if (auto v = p.real("symbol_period_s")) sys.symbol_period = *v;
    if (p.has("symbol_energy") && p.has("symbol_energy_db")) {
        p.error("symbol_energy_db", "give symbol_energy or symbol_energy_db, not both");
    }
    if (auto v = p.real("symbol_energy")) sys.symbol_energy = *v;
    if (auto v = p.real("symbol_energy_db")) sys.symbol_energy = from_db(*v);
    if (p.has("noise_variance") && p.has("noise_variance_db")) {
        p.error("noise_variance_db", "give noise_variance or noise_variance_db, not both");
    }
    if (auto v = p.real("noise_variance")) sys.noise_variance = *v;
    if (auto v = p.real("noise_variance_db")) sys.noise_variance = from_db(*v);
    if (auto v = p.real("path_loss_exponent")) sys.path_loss_exponent = *v;
    if (auto v = p.integer("pilot_length")) sys.pilot_length = static_cast<int>(*v);
    if (auto v = p.text("modulation"); v && *v != "bpsk" && *v != "BPSK") {
        p.error("modulation", "only bpsk is supported, got '" + *v + "'");
    }

    read_link(p, "ab", "ba", sys.carrier_freq, cfg.scenario.link_ab);
    read_link(p, "ae", "ea", sys.carrier_freq, cfg.scenario.link_ae);
    read_link(p, "be", "eb", sys.carrier_freq, cfg.scenario.link_be);

    if (auto v = p.integer("durations")) {
        if (*v < 1) {
            p.error("durations", "must be >= 1");
        } else {
            cfg.scenario.durations = static_cast<std::uint64_t>(*v);
        }
    }
    if (auto v = p.unsigned_integer("seed")) cfg.scenario.seed = *v;
    if (auto v = p.text("backend")) {
        try {
            cfg.scenario.backend = backend_from_string(*v);
        } catch (const UsageError& e) {
            p.error("backend", e.what());
        }
    }
    if (auto v = p.integer("threads")) cfg.scenario.threads = static_cast<int>(*v);

    auto& g = cfg.grids;
    if (auto v = p.integer("quadrature_order")) g.quadrature_order = static_cast<int>(*v);
    if (auto v = p.list<int>("fig4_pilot_lengths")) g.fig4_pilot_lengths = *v;
    if (auto v = p.integer("fig4_bins")) g.fig4_bins = static_cast<int>(*v);
    if (auto v = p.list<int>("fig5_pilot_lengths")) g.fig5_pilot_lengths = *v;
    if (auto v = p.list<int>("fig6_pilot_lengths")) g.fig6_pilot_lengths = *v;
    if (auto v = p.list<double>("fig6_gammas")) g.fig6_gammas = *v;
    if (auto v = p.real("single_run_gamma")) g.single_run_gamma = *v;

    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        const auto nl = msg.find('\n');
        if (nl != std::string::npos) {
            std::istringstream lines(msg.substr(nl + 1));
            std::string l;
            while (std::getline(lines, l)) errors.push_back(source + ": " + trim(l).substr(2));
        }
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "configuration errors in " << source << ":";
        for (const auto& e : errors) msg << "\n  " << e;
        throw ConfigError(msg.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading config file '" + path + "'");
    return parse_config(buf.str(), path);
}

} // namespace dopkey
