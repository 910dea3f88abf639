#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dopkey {

/// Seedable random stream. Sub-streams are derived by hashing a seed together
/// with a path of identifiers (duration index, link id, ...), so a given path
/// always yields the same sequence regardless of evaluation order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::mt19937_64& engine() noexcept { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal(double mean, double stddev) { return std::normal_distribution<double>(mean, stddev)(engine_); }
    bool fair_coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finaliser; also used to fingerprint configuration files
std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace dopkey
