#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& err_file = {}) {
    std::string cmd = std::string(DOPKEY_CLI_PATH) + " " + args;
    cmd += err_file.empty() ? " 2>/dev/null" : " 2>" + err_file.string();
    cmd += " >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("dopkey_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kConfig = " --config " DOPKEY_SOURCE_DIR "/configs/default.conf";

} // namespace

TEST_CASE("fig6 writes CSV, SVG and manifest and exits 0") {
    const auto dir = scratch("fig6");
    CHECK(run("--experiment fig6 --durations 2000 --out-dir " + dir.string() + kConfig) == 0);
    CHECK(slurp(dir / "fig6.csv").rfind("N,gamma,kdr_theory,kdr_sim,stderr,D,M\n", 0) == 0);
    CHECK(fs::exists(dir / "fig6.svg"));
    const auto manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"config_hash_fnv1a64\"") != std::string::npos);
    CHECK(manifest.find("\"seed\": 1") != std::string::npos);
    CHECK(manifest.find("\"version\"") != std::string::npos);
}

TEST_CASE("--no-plots and overrides") {
    const auto dir = scratch("noplots");
    CHECK(run("--experiment fig5 --no-plots --durations 500 --seed 9 --backend waveform --out-dir " + dir.string() +
              kConfig) == 0);
    CHECK(fs::exists(dir / "fig5.csv"));
    CHECK_FALSE(fs::exists(dir / "fig5.svg"));
    const auto manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"seed\": 9") != std::string::npos);
    CHECK(manifest.find("\"backend\": \"waveform\"") != std::string::npos);
}

TEST_CASE("single-run writes the key tables") {
    const auto dir = scratch("single");
    CHECK(run("--experiment single-run --durations 300 --out-dir " + dir.string() + kConfig) == 0);
    CHECK(slurp(dir / "single-run.csv").rfind("N,gamma,kdr_ab,", 0) == 0);
    CHECK(slurp(dir / "single-run_keys.csv").rfind("duration,theta_hat_bob,", 0) == 0);
}

TEST_CASE("errors give nonzero exits and a JSON summary on stderr") {
    const auto dir = scratch("errors");
    const auto err = dir / "stderr.txt";
    CHECK(run("--experiment fig7 --out-dir " + dir.string(), err) == 2);
    CHECK(slurp(err).find("\"kind\":\"usage\"") != std::string::npos);

    const auto bad = dir / "bad.conf";
    std::ofstream(bad) << "doppler_ab_hz = 1\ndoppler_ba_hz = 1\nunknown_key = 3\n";
    CHECK(run("--experiment fig6 --out-dir " + dir.string() + " --config " + bad.string(), err) == 3);
    const auto text = slurp(err);
    CHECK(text.find("\"status\":\"error\"") != std::string::npos);
    CHECK(text.find("\"kind\":\"config\"") != std::string::npos);
    CHECK(text.find("unknown_key") != std::string::npos);
    CHECK(text.find("doppler_ba_hz") != std::string::npos);

    CHECK(run("--experiment fig6 --out-dir " + dir.string() + " --config /nonexistent.conf", err) == 4);
    CHECK(slurp(err).find("\"kind\":\"io\"") != std::string::npos);
}

TEST_CASE("selftest prints one line per invariant and reports failures through the exit status") {
    const auto dir = scratch("selftest");
    const std::string cmd = std::string(DOPKEY_CLI_PATH) + " --experiment selftest --out-dir " + dir.string() +
                            " > " + (dir / "out.txt").string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const auto out = slurp(dir / "out.txt");
    std::size_t lines = 0, failed = 0;
    std::istringstream in(out);
    for (std::string l; std::getline(in, l);) {
        CHECK((l.rfind("PASS ", 0) == 0 || l.rfind("FAIL ", 0) == 0));
        ++lines;
        failed += l.rfind("FAIL ", 0) == 0;
    }
    CHECK(lines >= 5);
    CHECK(code == (failed ? 1 : 0));
}
